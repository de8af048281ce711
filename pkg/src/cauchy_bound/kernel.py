"""The analytic kernel ``H(z, w)`` and its double power series.

``H(z, w) = (w - z) sqrt(psi'(w)) sqrt(psi'(z)) / (psi(w) - psi(z))`` extends
analytically across ``w = z`` with value 1 there.  Its Taylor coefficients
``a_mn`` are extracted by a trapezoidal double contour integral over
``|u| = s`` (index ``m``) and ``|v| = r`` (index ``n``), i.e. a 2-D FFT of the
sampled kernel followed by radius scaling.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .domain import AnalyticDomain, check_power_of_two
from .errors import KernelSingular, RadiiError
from .power_series import taylor_shift_many

LOGGER = logging.getLogger(__name__)

DELTA_DIAG = 1e-3
DIAG_ORDER = 8
M_CAP = 64
TAIL_RTOL = 1e-10
TOL_COEFF = 1e-9


@dataclass(frozen=True)
class RadiiPair:
    r: float
    s: float

    def __post_init__(self):
        if not 1 < self.r < self.s:
            raise RadiiError(f"need 1 < r < s, got r={self.r}, s={self.s}")

    def check(self, R: float) -> "RadiiPair":
        if not self.s < R:
            raise RadiiError(f"need s < R, got s={self.s}, R={R}")
        return self

    @classmethod
    def default(cls, R: float) -> "RadiiPair":
        return cls(R ** (1 / 3), R ** (2 / 3))


def kernel_eval(dom: AnalyticDomain, z, w):
    """``H(z, w)``, with the removable diagonal evaluated by a recentered Taylor quotient.

    Broadcasts over ``z`` and ``w``.  For ``|w - z| < 1e-3`` the difference
    quotient ``(psi(w) - psi(z)) / (w - z)`` is summed from the Taylor
    coefficients of ``psi`` about ``z``.
    """
    z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    if np.any(np.abs(z) >= dom.R) or np.any(np.abs(w) >= dom.R):
        raise ValueError(f"kernel arguments must satisfy |z|, |w| < R = {dom.R:g}")
    h = w - z
    near = np.abs(h) < DELTA_DIAG
    quotient = np.empty(z.shape, dtype=complex)
    far = ~near
    if np.any(far):
        dpsi = dom.psi(w[far]) - dom.psi(z[far])
        scale = np.abs(dom.psi_prime(z[far])) * np.abs(h[far])
        if np.any(np.abs(dpsi) <= 1e-14 * scale):
            raise KernelSingular("psi(w) = psi(z) for w != z: psi is not injective here")
        quotient[far] = dpsi / h[far]
    if np.any(near):
        order = min(dom.psi.order, DIAG_ORDER + 1)
        d = taylor_shift_many(dom.psi.coeffs, z[near], order)
        acc = d[..., order]
        for k in range(order - 1, 0, -1):
            acc = acc * h[near] + d[..., k]
        quotient[near] = acc
    out = dom.sqrt_psi_prime(z) * dom.sqrt_psi_prime(w) / quotient
    return out[()] if out.ndim == 0 else out


def _torus(dom: AnalyticDomain, radii: RadiiPair, grid_N: int):
    theta = 2 * np.pi * np.arange(grid_N) / grid_N
    u = radii.s * np.exp(1j * theta)
    v = radii.r * np.exp(1j * theta)
    return u, v


def sample_kernel(dom: AnalyticDomain, radii: RadiiPair, grid_N: int) -> np.ndarray:
    """``H(u_j, v_l)`` on ``|u| = s`` (rows) times ``|v| = r`` (columns).

    The circles are disjoint, so the direct formula applies everywhere and the
    per-circle factors are computed once.
    """
    u, v = _torus(dom, radii, grid_N)
    pu, pv = dom.psi(u), dom.psi(v)
    ru, rv = dom.sqrt_psi_prime(u), dom.sqrt_psi_prime(v)
    diff = pv[None, :] - pu[:, None]
    if np.any(diff == 0):
        raise KernelSingular("psi takes equal values on the two circles")
    return (v[None, :] - u[:, None]) * ru[:, None] * rv[None, :] / diff


def sup_norm_H(dom: AnalyticDomain, radii: RadiiPair, grid_N: int = 256,
               samples: np.ndarray | None = None, polish: bool = True) -> float:
    """Sampled maximum of ``|H|`` over ``|u| = s, |v| = r``.

    The grid maximum is refined by local optimization from the best few grid
    points; the returned value is never below the grid maximum.
    """
    radii.check(dom.R)
    H = sample_kernel(dom, radii, grid_N) if samples is None else samples
    mag = np.abs(H)
    best = float(mag.max())
    if not polish:
        return best

    def neg(x):
        u = radii.s * np.exp(1j * x[0])
        v = radii.r * np.exp(1j * x[1])
        return -abs(complex(kernel_eval(dom, u, v)))

    step = 2 * np.pi / grid_N
    for idx in np.argsort(mag, axis=None)[::-1][:4]:
        j, l = np.unravel_index(idx, mag.shape)
        x0 = np.array([j * step, l * step])
        res = minimize(neg, x0, method="Nelder-Mead",
                       options={"xatol": 1e-11, "fatol": 1e-16, "maxiter": 2000,
                                "initial_simplex": [x0, x0 + [step, 0], x0 + [0, step]]})
        best = max(best, -float(res.fun))
    return best


def coefficient_bound(sup_H: float, radii: RadiiPair, m, n):
    """``s**2 * sup_H / (r**(m+1) * r**(n+1))``."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    return radii.s ** 2 * sup_H * radii.r ** (-(m + 1)) * radii.r ** (-(n + 1))


def tail_sum_bound(sup_H: float, radii: RadiiPair, M: int) -> float:
    """Sum of :func:`coefficient_bound` over all ``(m, n)`` outside ``[0, M]**2``.

    With ``g = sum_{m>=0} r**-(m+1) = 1/(r-1)`` and ``G`` its partial sum to
    ``M``, the tail is ``s**2 sup_H (g**2 - G**2)``; ``g - G`` is formed directly
    to avoid cancellation.
    """
    r = radii.r
    g = 1.0 / (r - 1.0)
    gap = r ** (-(M + 1)) / (r - 1.0)
    return float(radii.s ** 2 * sup_H * gap * (2 * g - gap))


@dataclass(frozen=True)
class KernelExpansion:
    a: np.ndarray
    radii: RadiiPair
    sup_H: float
    grid_N: int
    warnings: tuple = field(default=())
    source: str = ""

    def __post_init__(self):
        a = np.array(self.a, dtype=complex)
        a.flags.writeable = False
        object.__setattr__(self, "a", a)

    @property
    def M(self) -> int:
        return self.a.shape[0] - 1

    @property
    def abs_sum(self) -> float:
        return abs_sum(self)

    @property
    def tail_bound(self) -> float:
        return tail_sum_bound(self.sup_H, self.radii, self.M)

    @property
    def norm_bound(self) -> float:
        return self.abs_sum + self.tail_bound

    def bounds(self) -> np.ndarray:
        m = np.arange(self.M + 1)
        return coefficient_bound(self.sup_H, self.radii, m[:, None], m[None, :])

    def truncated(self, M: int) -> "KernelExpansion":
        if not 0 <= M <= self.M:
            raise ValueError(f"truncation {M} outside [0, {self.M}]")
        return KernelExpansion(self.a[: M + 1, : M + 1], self.radii, self.sup_H,
                               self.grid_N, self.warnings, self.source)

    def evaluate(self, z, w):
        """``sum_{m,n <= M} a_mn z**m w**n`` by nested Horner."""
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        acc = np.zeros(z.shape, dtype=complex)
        for m in range(self.M, -1, -1):
            row = np.full(z.shape, self.a[m, -1], dtype=complex)
            for c in self.a[m, -2::-1]:
                row = row * w + c
            acc = acc * z + row
        return acc[()] if acc.ndim == 0 else acc


def abs_sum(expansion: KernelExpansion) -> float:
    return float(np.sum(np.abs(expansion.a)))


def extract_coefficients(H: np.ndarray, radii: RadiiPair, M: int) -> np.ndarray:
    """``a_mn`` for ``m, n <= M`` from kernel samples on the torus ``|u| = s, |v| = r``."""
    N = H.shape[0]
    spec = np.fft.fft2(H)[: M + 1, : M + 1] / (N * N)
    k = np.arange(M + 1)
    return spec * radii.s ** (-k)[:, None] * radii.r ** (-k)[None, :]


def auto_grid(M: int) -> int:
    need = max(256, 4 * (M + 1))
    return 1 << (need - 1).bit_length()


def choose_M(a: np.ndarray, sup_H: float, radii: RadiiPair, cap: int = M_CAP) -> int:
    """Smallest ``M`` whose tail bound is at most ``1e-10`` of the retained absolute sum."""
    mag = np.abs(a)
    for M in range(min(cap, a.shape[0] - 1) + 1):
        if tail_sum_bound(sup_H, radii, M) <= TAIL_RTOL * mag[: M + 1, : M + 1].sum():
            return M
    return min(cap, a.shape[0] - 1)


def kernel_coefficients(dom: AnalyticDomain, radii: RadiiPair | None = None,
                        M: int | None = None, grid_N: int | None = None) -> KernelExpansion:
    """Extract ``a_mn`` of ``H`` by double contour integration.

    Parameters
    ----------
    radii : RadiiPair, optional
        Contours ``|v| = r`` and ``|u| = s``; default ``(R**(1/3), R**(2/3))``.
    M : int, optional
        Truncation degree in each variable.  ``None`` picks the smallest ``M``
        (at most 64) whose tail bound is below ``1e-10`` of the absolute sum.
    grid_N : int, optional
        Points per contour; default ``max(256, 4 (M + 1))`` rounded up to a
        power of two.
    """
    radii = (RadiiPair.default(dom.R) if radii is None else radii).check(dom.R)
    if M is None:
        probe_grid = auto_grid(M_CAP) if grid_N is None else grid_N
        H = sample_kernel(dom, radii, probe_grid)
        sup = sup_norm_H(dom, radii, probe_grid, samples=H)
        M = choose_M(extract_coefficients(H, radii, min(M_CAP, probe_grid // 2 - 1)), sup, radii)
        LOGGER.debug("auto M = %d (sup_H = %.6g)", M, sup)
    if M < 0:
        raise ValueError("M must be nonnegative")
    grid_N = auto_grid(M) if grid_N is None else check_power_of_two(grid_N)
    warnings = []
    if grid_N < 4 * M:
        warnings.append(f"AliasRisk: grid_N = {grid_N} < 4 M = {4 * M}")
    if M > grid_N // 2 - 1:
        raise ValueError(f"M = {M} needs grid_N > {2 * (M + 1)}")
    H = sample_kernel(dom, radii, grid_N)
    sup = sup_norm_H(dom, radii, grid_N, samples=H)
    a = extract_coefficients(H, radii, M)
    return KernelExpansion(a, radii, sup, grid_N, tuple(warnings), dom.fingerprint())
