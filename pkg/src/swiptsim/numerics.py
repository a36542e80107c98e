"""Special-function layer for the relay likelihoods.

Everything here revolves around the one-dimensional integral

    I(eps1, eps2, beta1, beta2, lam)
        = int_0^inf exp(-(x + beta1/(1+eps1 x) + beta2/(1+eps2 x)))
                    / ((1+eps1 x)^lam (1+eps2 x)) dx

which is the conditional density kernel of an amplify-and-forward
observation.  Two evaluators are provided: a vectorised adaptive
Gauss-Kronrod reference (``integral_I_ref``) and the fixed five-node
Gauss-Legendre closed form (``integral_I_gl5``).  All functions broadcast
over numpy arrays held in :class:`IntegralArgs`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .errors import AccuracyError, DomainError

__all__ = [
    "IntegralArgs",
    "Gl5Rule",
    "GL5",
    "PdfParams",
    "psi",
    "integral_I_ref",
    "integral_I_gl5",
    "log_integral_I",
    "pdf_X0",
    "pdf_Y0",
]

DEFAULT_TOL = 1e-10
MAX_DEPTH = 40
_CHUNK = 8192
_MAX_ACTIVE = 1 << 20
_ROUNDOFF = 50 * np.finfo(float).eps


@dataclass(frozen=True)
class IntegralArgs:
    """Arguments of I; each field may be a scalar or a broadcastable array.

    eps = 0 and beta = 0 are accepted as the limiting cases.
    """

    eps1: object
    eps2: object
    beta1: object
    beta2: object
    lam: object = 1.0

    def __post_init__(self):
        arrays = np.broadcast_arrays(
            *(np.asarray(v, dtype=float) for v in (self.eps1, self.eps2, self.beta1, self.beta2, self.lam))
        )
        for v in arrays:
            if not np.all(np.isfinite(v)):
                raise DomainError("integral arguments must be finite")
        e1, e2, b1, b2, lam = arrays
        if np.any(e1 < 0) or np.any(e2 < 0):
            raise DomainError("eps1, eps2 must be nonnegative")
        if np.any(b1 < 0) or np.any(b2 < 0):
            raise DomainError("beta1, beta2 must be nonnegative")
        if np.any(lam <= 0):
            raise DomainError("lam must be positive")

    def arrays(self):
        """Broadcast float arrays (eps1, eps2, beta1, beta2, lam)."""
        return np.broadcast_arrays(
            *(np.asarray(v, dtype=float) for v in (self.eps1, self.eps2, self.beta1, self.beta2, self.lam))
        )


@dataclass(frozen=True)
class Gl5Rule:
    nodes: np.ndarray
    weights: np.ndarray


def _gl5_rule() -> Gl5Rule:
    r = np.sqrt(10.0 / 7.0)
    inner = np.sqrt(5.0 - 2.0 * r) / 3.0
    outer = np.sqrt(5.0 + 2.0 * r) / 3.0
    w_inner = (322.0 + 13.0 * np.sqrt(70.0)) / 900.0
    w_outer = (322.0 - 13.0 * np.sqrt(70.0)) / 900.0
    nodes = np.array([0.0, inner, -inner, outer, -outer])
    weights = np.array([128.0 / 225.0, w_inner, w_inner, w_outer, w_outer])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return Gl5Rule(nodes, weights)


GL5 = _gl5_rule()
# GL-5 nodes mapped from [-1, 1] onto (0, 1); none touches an endpoint.
_GL5_Z = (1.0 + GL5.nodes) / 2.0
_GL5_LOGW = np.log(GL5.weights)

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XK_POS = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
])
_WK_POS = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
])
_WK_CENTER = 0.209482141084727828012999174891714
_WG_POS = np.array([0.0, 0.129484966168869693270611432679082, 0.0,
                    0.279705391489276667901467771423780, 0.0,
                    0.381830050505118944950369775488975, 0.0])
_WG_CENTER = 0.417959183673469387755102040816327

_XK = np.concatenate([-_XK_POS, [0.0], _XK_POS[::-1]])
_WK = np.concatenate([_WK_POS, [_WK_CENTER], _WK_POS[::-1]])
_WG = np.concatenate([_WG_POS, [_WG_CENTER], _WG_POS[::-1]])


def _scalar_or_array(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


def _log_psi(z, e1, e2, b1, b2, lam):
    lz = np.log(z)
    u1 = 1.0 - e1 * lz
    u2 = 1.0 - e2 * lz
    return -(b1 / u1 + b2 / u2) - lam * np.log(u1) - np.log(u2)


def psi(z, args: IntegralArgs):
    """Integrand of I after the substitution z = exp(-x); defined on (0, 1]."""
    z = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z <= 0) or np.any(z > 1):
        raise DomainError("psi is defined for 0 < z <= 1")
    e1, e2, b1, b2, lam = args.arrays()
    return _scalar_or_array(np.exp(_log_psi(z, e1, e2, b1, b2, lam)))


def _gl5_log_terms(e1, e2, b1, b2, lam):
    # shape (..., 5): log(w_i * psi(z_i))
    e1, e2, b1, b2, lam = (v[..., None] for v in (e1, e2, b1, b2, lam))
    return _GL5_LOGW + _log_psi(_GL5_Z, e1, e2, b1, b2, lam)


def integral_I_gl5(args: IntegralArgs):
    """Five-node Gauss-Legendre approximation of I on the z-domain."""
    terms = _gl5_log_terms(*args.arrays())
    return _scalar_or_array(0.5 * np.exp(terms).sum(axis=-1))


# --- reference quadrature -------------------------------------------------

def _log_integrand_x(x, e1, e2, b1, b2, lam):
    u1 = np.log1p(e1 * x)
    u2 = np.log1p(e2 * x)
    return -x - b1 * np.exp(-u1) - b2 * np.exp(-u2) - lam * u1 - u2


_PEAK_GRID = np.concatenate([[0.0], np.geomspace(1e-4, 1e9, 66)])


def _locate_peak(e1, e2, b1, b2, lam):
    """Approximate argmax and max of the x-domain log-integrand (1-D arrays)."""
    cols = [v[:, None] for v in (e1, e2, b1, b2, lam)]
    vals = _log_integrand_x(_PEAK_GRID[None, :], *cols)
    j = np.argmax(vals, axis=1)
    lo = np.log(_PEAK_GRID[np.maximum(j - 1, 1)])
    hi = np.log(_PEAK_GRID[np.minimum(j + 1, _PEAK_GRID.size - 1)])
    # golden-section refinement in log x between the grid neighbours
    g = (np.sqrt(5.0) - 1.0) / 2.0
    for _ in range(40):
        m1 = hi - g * (hi - lo)
        m2 = lo + g * (hi - lo)
        f1 = _log_integrand_x(np.exp(m1), e1, e2, b1, b2, lam)
        f2 = _log_integrand_x(np.exp(m2), e1, e2, b1, b2, lam)
        left = f1 >= f2
        hi = np.where(left, m2, hi)
        lo = np.where(left, lo, m1)
    x_ref = np.exp(0.5 * (lo + hi))
    f_ref = _log_integrand_x(x_ref, e1, e2, b1, b2, lam)
    f0 = vals[:, 0]
    at_zero = (j == 0) | (f0 >= f_ref)
    x_peak = np.where(at_zero, 0.0, x_ref)
    f_peak = np.maximum(np.where(at_zero, f0, f_ref), vals.max(axis=1))
    return x_peak, f_peak


def _adaptive_gk15(f, n, tol, max_depth, noise=0.0):
    """Breadth-first adaptive G7/K15 on [0, 1] for n integrands at once.

    ``f(t, idx)`` evaluates integrand ``idx[i]`` at the points ``t[i, :]``.
    An interval is accepted once |K15 - G7| <= tol * width, so the summed
    error bound never exceeds tol (scalar or one value per integrand), or
    once the difference is below the relative evaluation noise of the
    integrand (``noise``, scalar or per integrand, plus round-off).  Integrands still open after
    ``max_depth`` bisections, or when the interval count passes
    ``_MAX_ACTIVE``, are reported as not converged.
    Returns (values, error bound, converged).
    """
    tol = np.broadcast_to(np.asarray(tol, dtype=float), (n,))
    floor = _ROUNDOFF + np.broadcast_to(np.asarray(noise, dtype=float), (n,))
    total = np.zeros(n)
    errsum = np.zeros(n)
    converged = np.ones(n, dtype=bool)
    a = np.zeros(n)
    b = np.ones(n)
    idx = np.arange(n)
    for depth in range(max_depth + 1):
        if idx.size == 0:
            break
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        ft = f(mid[:, None] + half[:, None] * _XK[None, :], idx)
        k = half * (ft @ _WK)
        g = half * (ft @ _WG)
        err = np.abs(k - g)
        done = err <= np.maximum(tol[idx] * (b - a), floor[idx] * np.abs(k))
        if depth == max_depth or np.count_nonzero(~done) > _MAX_ACTIVE:
            converged[idx[~done]] = False
            done[:] = True
        np.add.at(total, idx[done], k[done])
        np.add.at(errsum, idx[done], err[done])
        rest = ~done
        a, b, mid, idx = a[rest], b[rest], mid[rest], idx[rest]
        a, b, idx = np.concatenate([a, mid]), np.concatenate([mid, b]), np.concatenate([idx, idx])
    return total, errsum, converged


def _ref_shifted(e1, e2, b1, b2, lam, tol, max_depth, absolute):
    """Return (log shift c, J, err, ok) with I = exp(c) * J for flat float arrays.

    With ``absolute`` the tolerance bounds the error of I itself, which
    loosens the bound on J by exp(-c); otherwise it applies to J directly.
    """
    x_peak, c = _locate_peak(e1, e2, b1, b2, lam)
    scale = np.maximum(x_peak, 1.0)
    log_scale = np.log(scale)

    def integrand(t, idx):
        s = scale[idx, None]
        one_minus = 1.0 - t
        x = s * t / one_minus
        logv = (_log_integrand_x(x, e1[idx, None], e2[idx, None], b1[idx, None], b2[idx, None], lam[idx, None])
                - c[idx, None] + log_scale[idx, None] - 2.0 * np.log(one_minus))
        return np.exp(logv)

    if absolute:
        tol = tol * np.exp(np.minimum(-c, 700.0))
    # the shifted log-integrand is a difference of terms of size |c|
    noise = _ROUNDOFF * np.abs(c)
    J, err, ok = _adaptive_gk15(integrand, e1.size, tol, max_depth, noise)
    return c, J, err, ok


def _reference(args: IntegralArgs, tol, max_depth, relative):
    if not (0.0 < tol <= 1e-6):
        raise DomainError("tol must lie in (0, 1e-6]")
    arrays = args.arrays()
    shape = arrays[0].shape
    flat = [np.ascontiguousarray(v, dtype=float).ravel() for v in arrays]
    n = flat[0].size
    c = np.empty(n)
    J = np.empty(n)
    ok = np.ones(n, dtype=bool)
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        part = [v[sl] for v in flat]
        c_p, J_p, _, ok_p = _ref_shifted(*part, tol, max_depth, absolute=not relative)
        if relative:
            # absolute tol on ln I means relative tol on J
            small = np.flatnonzero(J_p < 1.0)
            if small.size:
                sub = [v[small] for v in part]
                sub_tol = np.maximum(J_p[small], 1e-300) * tol
                c1, J1, _, ok1 = _ref_shifted(*sub, sub_tol, max_depth, absolute=False)
                c_p[small], J_p[small], ok_p[small] = c1, J1, ok1
        c[sl], J[sl], ok[sl] = c_p, J_p, ok_p
    return c.reshape(shape), J.reshape(shape), ok.reshape(shape)


def integral_I_ref(args: IntegralArgs, tol: float = DEFAULT_TOL, max_depth: int = MAX_DEPTH):
    """Reference value of I with absolute error at most ``tol``.

    The x-domain integral is mapped onto [0, 1] by x = s t / (1 - t), with s
    placed at the integrand peak, after factoring out the peak value; the
    result is then integrated by adaptive bisection with a G7/K15 pair.
    Raises AccuracyError (carrying the estimate) if ``max_depth`` bisections
    do not reach the tolerance.
    """
    c, J, ok = _reference(args, tol, max_depth, relative=False)
    value = np.exp(c) * J
    if not np.all(ok):
        raise AccuracyError("reference quadrature did not converge", _scalar_or_array(value))
    return _scalar_or_array(value)


def log_integral_I(args: IntegralArgs, mode: str = "gl5", tol: float = DEFAULT_TOL,
                   max_depth: int = MAX_DEPTH):
    """ln I evaluated without leaving the log domain.

    mode="gl5" uses the five-node rule via log-sum-exp; mode="exact" uses the
    reference quadrature with ``tol`` as an absolute bound on ln I.  For
    very negative ln I the bound cannot beat the evaluation noise of the
    integrand itself, roughly 1e-14 * |ln I|, and that floor applies instead.
    """
    if mode == "gl5":
        terms = _gl5_log_terms(*args.arrays())
        return _scalar_or_array(logsumexp(terms, axis=-1) - np.log(2.0))
    if mode == "exact":
        c, J, ok = _reference(args, tol, max_depth, relative=True)
        value = c + np.log(J)
        if not np.all(ok):
            raise AccuracyError("reference quadrature did not converge", _scalar_or_array(value))
        return _scalar_or_array(value)
    raise ValueError(f"unknown mode {mode!r}")


# --- densities of the relayed observation ----------------------------------

@dataclass(frozen=True)
class PdfParams:
    """Parameters of X0 = X1 X2 c + X2 x1 + x2 (DPSK) or Y0 (FSK, tone p)."""

    omega1: float
    omega2: float
    sigma1sq: float
    sigma2sq: float
    c: Optional[complex] = None
    p: Optional[int] = None
    M: Optional[int] = None

    def __post_init__(self):
        for name in ("omega1", "omega2", "sigma1sq", "sigma2sq"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite")
        if self.p is not None:
            if self.M is None or not (1 <= self.p <= self.M):
                raise DomainError("tone index p must satisfy 1 <= p <= M")


def pdf_X0(x, params: PdfParams, tol: float = DEFAULT_TOL):
    """Density of the 2-vector X0 at ``x`` (shape (..., 2), complex)."""
    if params.c is None:
        raise DomainError("pdf_X0 needs the complex coefficient c")
    x = np.asarray(x, dtype=complex)
    c = complex(params.c)
    norm_c = 1.0 + abs(c) ** 2
    s1, s2 = params.sigma1sq, params.sigma2sq
    eps1 = params.omega2 * s1 / s2
    eps2 = (1.0 + params.omega1 * norm_c / s1) * eps1
    x1, x2 = x[..., 0], x[..., 1]
    beta1 = np.abs(x2 - c * x1) ** 2 / (norm_c * s2)
    beta2 = np.abs(x1 + np.conj(c) * x2) ** 2 / (norm_c * s2)
    val = integral_I_ref(IntegralArgs(eps1, eps2, beta1, beta2, 1.0), tol)
    return val / (np.pi * s2) ** 2


def pdf_Y0(y, params: PdfParams, tol: float = DEFAULT_TOL):
    """Density of the M-vector Y0 (signal on tone ``p``, 1-based) at ``y``."""
    if params.p is None or params.M is None:
        raise DomainError("pdf_Y0 needs tone index p and alphabet size M")
    M = params.M
    if M - 1 <= 0:
        raise DomainError("pdf_Y0 needs M >= 2 (lam = M - 1 must be positive)")
    y = np.asarray(y, dtype=complex)
    if y.shape[-1] != M:
        raise DomainError(f"observation length {y.shape[-1]} does not match M={M}")
    s1, s2 = params.sigma1sq, params.sigma2sq
    eps1 = params.omega2 * s1 / s2
    eps2 = (1.0 + params.omega1 / s1) * eps1
    energy = np.sum(np.abs(y) ** 2, axis=-1)
    tone = np.abs(y[..., params.p - 1]) ** 2
    val = integral_I_ref(IntegralArgs(eps1, eps2, np.maximum(energy - tone, 0.0) / s2, tone / s2, M - 1), tol)
    return val / (np.pi * s2) ** M
