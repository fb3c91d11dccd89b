"""Special functions, bias/variance/MSE predictions and DFT-covariance oracles.

Notation: psi and psi' are the digamma and trigamma functions at integer
arguments; for g epochs the log of an averaged periodogram ordinate has
variance psi'(g). The short-memory curvature r = f_star''(0)/f_star(0)
enters through B = (4/81) pi^4 r^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.special import roots_jacobi, roots_legendre

from .model import ArfimaModel, _density, f_star, f_star_ratio_curvature

__all__ = [
    "EULER_GAMMA",
    "QuadratureError",
    "KernelQuery",
    "MsePrediction",
    "digamma_int",
    "trigamma_int",
    "b_star",
    "c_star",
    "optimal_bandwidth",
    "epoch_mse_ratio",
    "mse_prediction",
    "limit_kernel_D",
    "limit_covariance",
    "finite_n_dft_covariance",
    "normalized_dft_covariance",
]

EULER_GAMMA = 0.57721566490153286060651209008240243


class QuadratureError(ArithmeticError):
    """A quadrature could not certify its requested tolerance."""


def _check_positive_int(g):
    if int(g) != g or g < 1:
        raise ValueError(f"argument must be a positive integer, got {g}")
    return int(g)


def digamma_int(g: int) -> float:
    """psi(g) = -gamma + sum_{k<g} 1/k."""
    g = _check_positive_int(g)
    return math.fsum([-EULER_GAMMA] + [1.0 / k for k in range(1, g)])


def trigamma_int(g: int) -> float:
    """psi'(g) = pi^2/6 - sum_{k<g} 1/k^2."""
    g = _check_positive_int(g)
    return math.fsum([math.pi**2 / 6.0] + [-1.0 / (k * k) for k in range(1, g)])


# --------------------------------------------------------------------------
# bandwidth and MSE
# --------------------------------------------------------------------------

def b_star(model: ArfimaModel, convention: str = "ar") -> float:
    """B = (4/81) pi^4 (f_star''(0)/f_star(0))^2."""
    return 4.0 / 81.0 * math.pi**4 * f_star_ratio_curvature(model, convention) ** 2


def c_star(B: float) -> float:
    """Constant in the optimal MSE C psi'(g)^(4/5) n^(-4/5).

    Plugging the optimal bandwidth into B m^4/n^4 + psi'/(4m) gives
    C = 16^(-4/5) B^(1/5) + (16 B)^(1/5) / 4.
    """
    return 16.0 ** -0.8 * B**0.2 + (16.0 * B) ** 0.2 / 4.0


def _optimal_m_real(B: float, n: int, g: int) -> float:
    return (trigamma_int(g) / (16.0 * B)) ** 0.2 * n**0.8


def optimal_bandwidth(model: ArfimaModel, n: int, g: int) -> int:
    """floor((psi'(g) / (16 B))^(1/5) n^(4/5)), clamped to [2, floor(n/2)].

    B uses the AR-only curvature -2 phi / (1 - phi)^2: with the default
    sine regressor the fractional factor |2 sin(w/2)|^(-2d) is fitted
    exactly and only the AR factor is left to bias the slope. The exact
    f_star of |w|^(-2d) f_star would add d/6 from (2 sin(w/2)/w)^(-2d); the
    published ARFIMA(1, d, 0) bandwidths are reproduced only without it.
    """
    if n < 4 or g < 1:
        raise ValueError("need n >= 4 and g >= 1")
    B = b_star(model)
    if B == 0.0:
        raise ValueError(
            "optimal bandwidth undefined: f_star''(0) = 0 (phi = 0); use a fixed rule"
        )
    m = math.floor(_optimal_m_real(B, n, g))
    return int(min(max(m, 2), n // 2))


def epoch_mse_ratio(g: int) -> float:
    """Predicted MSE(N/g, g) / MSE(N, 1) = (g psi'(g) / psi'(1))^(4/5)."""
    return (g * trigamma_int(g) / trigamma_int(1)) ** 0.8


@dataclass(frozen=True)
class MsePrediction:
    m: int
    bias_leading: float
    variance_leading: float
    mse: float
    optimal_m: Optional[int]
    optimal_m_real: Optional[float]
    optimal_mse: Optional[float]
    b_star: float
    c_star: Optional[float]
    epoch_ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def mse_prediction(model: ArfimaModel, n: int, g: int,
                   m: Optional[int] = None) -> MsePrediction:
    """Leading-order bias, variance and MSE of the estimator.

    bias = -2 pi^2 r m^2 / (9 n^2), variance = psi'(g) / (4 m), with
    r = f_star''(0)/f_star(0). Without ``m`` the optimal bandwidth is used;
    ``optimal_mse`` is C psi'(g)^(4/5) n^(-4/5) at the real-valued optimum.
    """
    r = f_star_ratio_curvature(model)
    B = b_star(model)
    tg = trigamma_int(g)
    if B > 0.0:
        opt_real = _optimal_m_real(B, n, g)
        opt_m = optimal_bandwidth(model, n, g)
        C = c_star(B)
        opt_mse = C * tg**0.8 * n**-0.8
    elif m is None:
        raise ValueError(
            "optimal bandwidth undefined: f_star''(0) = 0 (phi = 0); pass m explicitly"
        )
    else:
        opt_real = opt_m = C = opt_mse = None
    if m is None:
        m = opt_m
    if m < 1:
        raise ValueError("m must be >= 1")
    bias = -2.0 * math.pi**2 * r * m**2 / (9.0 * n**2)
    var = tg / (4.0 * m)
    return MsePrediction(
        m=int(m), bias_leading=bias, variance_leading=var, mse=bias**2 + var,
        optimal_m=opt_m, optimal_m_real=opt_real, optimal_mse=opt_mse,
        b_star=B, c_star=C, epoch_ratio=epoch_mse_ratio(g),
    )


# --------------------------------------------------------------------------
# limit kernels
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelQuery:
    d: float
    j: int
    k: int
    ell: int = 0

    def __post_init__(self):
        if not -0.5 < self.d < 0.5:
            raise ValueError("d must lie in (-1/2, 1/2)")
        if not (1 <= self.j <= self.k):
            raise ValueError("need 1 <= j <= k")
        if self.ell < 0:
            raise ValueError("ell must be >= 0")


def _quad(func, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            return integrate.quad(func, a, b, **kw)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(str(exc)) from None


def limit_kernel_D(query: KernelQuery, which: int = 1, tol: float = 1e-6) -> complex:
    """D1 or D2 as the integral over the real line.

    D1 = int |w|^(-2d) Delta(w - 2 pi j) Delta(2 pi k - w) e^{-i l w} dw and
    D2 replaces Delta(2 pi k - w) by Delta(-2 pi k - w), where
    Delta(w) = (e^{iw} - 1) / (iw). Both reduce to

        int |w|^(-2d) (2 - 2 cos w) e^{-i l w} / ((w - a)(w - b)) dw

    with a = 2 pi j and b = 2 pi k (D1) or b = -2 pi k (D2). On [0, L] the
    integrand is evaluated in the cancellation-free form
    (-1)^(j+k) sinc((w-a)/2) sinc((w-b)/2); beyond L the three Fourier
    components of (2 - 2 cos w) e^{-ilw} are integrated to infinity with
    QAWF, so there is no truncation error. Raises ``QuadratureError`` if
    the summed error estimates exceed ``tol``.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    d, j, k, ell = query.d, query.j, query.k, query.ell
    a = 2.0 * math.pi * j
    b = 2.0 * math.pi * k * (1 if which == 1 else -1)
    sign = -1.0 if (j + k) % 2 else 1.0
    p = -2.0 * d

    def sinc(x):
        return np.sinc(x / (2.0 * math.pi))

    def folded(w):
        # w in [0, L]: contributions of +w and -w
        wp = w**p if w > 0 else (0.0 if p > 0 else 1.0)
        return sign * wp * complex(
            sinc(w - a) * sinc(w - b) * complex(math.cos(ell * w), -math.sin(ell * w))
            + sinc(w + a) * sinc(w + b) * complex(math.cos(ell * w), math.sin(ell * w))
        )

    L = 2.0 * math.pi * (max(j, k) + ell + 8)
    breaks = sorted({abs(a), abs(b)})
    kw = dict(points=breaks, limit=4000, epsabs=tol * 1e-3, epsrel=1e-12)
    re, e1 = _quad(lambda w: folded(w).real, 0.0, L, **kw)
    im, e2 = _quad(lambda w: folded(w).imag, 0.0, L, **kw)
    err = e1 + e2

    def h_minus(w):
        return w**p / ((w - a) * (w - b))

    def h_plus(w):
        return w**p / ((w + a) * (w + b))

    tail_kw = dict(epsabs=tol * 1e-3, limlst=200, limit=2000)
    for freq, coef in ((ell, 2.0), (ell - 1, -1.0), (ell + 1, -1.0)):
        if freq == 0:
            v, e = _quad(lambda w: h_minus(w) + h_plus(w), L, np.inf,
                         epsabs=tol * 1e-3, limit=2000)
            re += coef * v
            err += abs(coef) * e
            continue
        q, s = abs(freq), (1.0 if freq > 0 else -1.0)
        vc, ec = _quad(lambda w: h_minus(w) + h_plus(w), L, np.inf,
                       weight="cos", wvar=q, **tail_kw)
        vs, es = _quad(lambda w: h_minus(w) - h_plus(w), L, np.inf,
                       weight="sin", wvar=q, **tail_kw)
        re += coef * vc
        im -= s * coef * vs
        err += abs(coef) * (ec + es)
    if not err <= tol:
        raise QuadratureError(f"limit kernel error estimate {err:.3g} exceeds {tol:.3g}")
    return complex(re, im)


def limit_covariance(query: KernelQuery, f_star0: float, conjugated: bool = True,
                     tol: float = 1e-6) -> complex:
    """Large-n limit of w_j^d w_k^d E[d_0(w_j) conj(d_l(w_k))] (or of the
    unconjugated product when ``conjugated`` is False).

    Equals (2 pi j)^d (2 pi k)^d / (2 pi) f_star(0) times conj(D1) (resp.
    conj(D2)). The conjugate appears because the DFT here uses e^{+itw};
    D1 and D2 as written correspond to the opposite sign convention.
    """
    D = limit_kernel_D(query, 1 if conjugated else 2, tol)
    d, j, k = query.d, query.j, query.k
    scale = (2.0 * math.pi * j) ** d * (2.0 * math.pi * k) ** d / (2.0 * math.pi)
    return scale * f_star0 * D.conjugate()


# --------------------------------------------------------------------------
# finite-n covariance
# --------------------------------------------------------------------------

def _dirichlet(x, n):
    # sum_{t=1}^{n} e^{itx} = e^{i(n+1)x/2} sin(nx/2) / sin(x/2)
    half = 0.5 * x
    s = np.sin(half)
    small = np.abs(s) < 1e-300
    ratio = np.where(small, float(n), np.sin(n * half) / np.where(small, 1.0, s))
    return np.exp(1j * (n + 1) * half) * ratio


def _panel_rule(nodes: int, d: float):
    gx, gw = roots_legendre(nodes)
    # weight (1+x)^(-2d) on [-1, 1] for the panel starting at the origin
    jx, jw = roots_jacobi(nodes, 0.0, -2.0 * d)
    return gx, gw, jx, jw


def _finite_n_quadrature(model, n, alpha, beta, ell, nodes):
    d = model.d
    panels_per_half = n * (ell + 1)
    h = math.pi / panels_per_half
    gx, gw, jx, jw = _panel_rule(nodes, d)

    # regular panels on (0, pi] and [-pi, 0), excluding the two touching 0
    starts = h * np.arange(1, panels_per_half)
    w_pos = (starts[:, None] + 0.5 * h * (gx[None, :] + 1.0)).ravel()
    wt_pos = np.tile(0.5 * h * gw, starts.size)
    w_reg = np.concatenate([w_pos, -w_pos])
    wt_reg = np.concatenate([wt_pos, wt_pos])
    f_reg = _density(model, np.abs(w_reg))

    # panels [0, h] and [-h, 0]: |w|^(-2d) carried by the Jacobi weight
    u = 0.5 * h * (jx + 1.0)
    scale = (0.5 * h) ** (1.0 - 2.0 * d)
    w_sing = np.concatenate([u, -u])
    wt_sing = np.concatenate([scale * jw, scale * jw])
    f_sing = f_star(model, w_sing)

    w = np.concatenate([w_reg, w_sing])
    wt = np.concatenate([wt_reg * f_reg, wt_sing * f_sing])
    kern = (_dirichlet(w + alpha, n) * np.conj(_dirichlet(w + beta, n))
            * np.exp(-1j * ell * n * w))
    return complex(np.sum(wt * kern) / (2.0 * math.pi * n))


def finite_n_dft_covariance(model: ArfimaModel, n: int, j: int, k: int, ell: int = 0,
                            conjugated: bool = True, tol: float = 1e-8,
                            nodes: int = 16) -> complex:
    """E[d_0(w_j) conj(d_l(w_k))] (``conjugated``) or E[d_0(w_j) d_l(w_k)].

    Computed as

        (2 pi n)^(-1) int_{-pi}^{pi} f(w) D_n(w + w_j) conj(D_n(w + b)) e^{-i l n w} dw

    with D_n(x) = sum_{t=1}^{n} e^{itx}, b = w_k (conjugated) or -w_k. The
    interval is cut into panels of width pi / (n (l + 1)) so each panel
    sees O(1) oscillations; the two panels at the origin use Gauss-Jacobi
    nodes for the |w|^(-2d) singularity, the rest Gauss-Legendre. The error
    is estimated by repeating with twice the nodes; ``QuadratureError`` is
    raised if it exceeds ``tol``.
    """
    if not (1 <= j <= k <= n // 2):
        raise ValueError("need 1 <= j <= k <= floor(n/2)")
    if ell < 0:
        raise ValueError("ell must be >= 0")
    wj = 2.0 * math.pi * j / n
    wk = 2.0 * math.pi * k / n
    beta = wk if conjugated else -wk
    coarse = _finite_n_quadrature(model, n, wj, beta, ell, nodes)
    fine = _finite_n_quadrature(model, n, wj, beta, ell, 2 * nodes)
    if not abs(fine - coarse) <= tol:
        raise QuadratureError(
            f"finite-n covariance error estimate {abs(fine - coarse):.3g} exceeds {tol:.3g}"
        )
    return fine


def normalized_dft_covariance(model: ArfimaModel, n: int, j: int, k: int, ell: int = 0,
                              conjugated: bool = True, tol: float = 1e-8) -> complex:
    """w_j^d w_k^d times :func:`finite_n_dft_covariance`."""
    wj = 2.0 * math.pi * j / n
    wk = 2.0 * math.pi * k / n
    return (wj * wk) ** model.d * finite_n_dft_covariance(model, n, j, k, ell, conjugated, tol)
