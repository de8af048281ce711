"""Domains given as conformal images ``D = psi(unit disc)``.

Everything downstream is conjugated through ``psi``, so a domain is fully
described by a (polynomial or truncated) power series for ``psi`` and a radius
``R > 1`` on which ``psi`` is analytic and injective.
"""
from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist
from shapely.geometry import LinearRing

from .errors import (BoundaryNotAnalytic, ConfigError, InversionDiverged,
                     NotConformal, NotInjective, SizeError)
from .power_series import (DEFAULT_ORDER, PowerSeries, pairs_to_series, ps_derivative,
                           ps_sqrt_branch, series_to_pairs)

LOGGER = logging.getLogger(__name__)

R_CAP = 4.0
SAFETY = 0.95
INJECTIVITY_SAMPLES = 2048
NEWTON_MAX_ITER = 100
NEWTON_DAMP_RADIUS = 1.5


def _trimmed(coeffs: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(coeffs)
    return coeffs[: nz[-1] + 1] if nz.size else coeffs[:1]


def critical_points(psi: PowerSeries) -> np.ndarray:
    """Roots of ``psi'`` (empty when ``psi'`` is constant)."""
    d = _trimmed(ps_derivative(psi).coeffs) if psi.order >= 1 else np.zeros(1)
    if d.size <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(d[::-1]).astype(complex) + psi.center


def _winding(values: np.ndarray, about: complex) -> int:
    ang = np.unwrap(np.angle(np.append(values, values[0]) - about))
    return int(round((ang[-1] - ang[0]) / (2 * np.pi)))


def circle_image(psi: PowerSeries, rho: float, n: int = INJECTIVITY_SAMPLES) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n) / n
    return psi(rho * np.exp(1j * theta))


def circle_is_injective(psi: PowerSeries, rho: float, n: int = INJECTIVITY_SAMPLES):
    """Sampled injectivity evidence for ``psi`` on ``|z| = rho``.

    Returns ``(ok, min_pairwise_distance, winding)``.  The image polygon must be
    simple and wind once about ``psi(0)``.
    """
    pts = circle_image(psi, rho, n)
    xy = np.column_stack([pts.real, pts.imag])
    dist, _ = cKDTree(xy).query(xy, k=2)
    min_dist = float(dist[:, 1].min())
    winding = _winding(pts, complex(psi(psi.center)))
    simple = min_dist > 0 and LinearRing(xy).is_simple
    return bool(simple and winding == 1), min_dist, winding


@dataclass(frozen=True)
class ValidationReport:
    R_check: float
    min_abs_psi_prime: float
    nearest_critical_point: float
    min_pairwise_distance: float
    winding_number: int
    simple_curve: bool

    @property
    def valid(self) -> bool:
        return (self.min_abs_psi_prime > 0 and self.nearest_critical_point > self.R_check
                and self.simple_curve and self.winding_number == 1)

    def to_dict(self) -> dict:
        return {
            "R_check": self.R_check,
            "min_abs_psi_prime": self.min_abs_psi_prime,
            "nearest_critical_point": self.nearest_critical_point,
            "min_pairwise_distance": self.min_pairwise_distance,
            "winding_number": self.winding_number,
            "simple_curve": self.simple_curve,
            "valid": self.valid,
        }


def validate_conformal(psi: PowerSeries, R_check: float) -> ValidationReport:
    """Check that ``psi`` is conformal on the closed disc ``|z| <= R_check``.

    Raises
    ------
    NotConformal
        ``psi'`` has a root in the closed disc.
    NotInjective
        The image of ``|z| = R_check`` self-intersects or does not wind once.
    """
    if R_check < 1:
        raise ValueError("R_check must be at least 1")
    dpsi = ps_derivative(psi) if psi.order >= 1 else PowerSeries([0.0])
    rho = np.linspace(0.0, R_check, 65)[:, None]
    theta = 2 * np.pi * np.arange(256)[None, :] / 256
    min_abs = float(np.abs(dpsi(psi.center + rho * np.exp(1j * theta))).min())
    crit = critical_points(psi)
    nearest = float(np.abs(crit - psi.center).min()) if crit.size else np.inf
    if min_abs == 0 or nearest <= R_check:
        raise NotConformal(
            f"psi' vanishes at distance {nearest:.6g} <= R_check = {R_check:g}")
    ok, min_dist, winding = circle_is_injective(psi, R_check)
    report = ValidationReport(float(R_check), min_abs, nearest, min_dist, winding, ok)
    if not ok:
        raise NotInjective(f"image of |z| = {R_check:g} is not a simple curve "
                           f"winding once (winding {winding})")
    return report


def estimate_R(psi: PowerSeries) -> float:
    """Radius of certified-by-sampling analyticity and injectivity, with safety factor.

    ``0.95 * min(|nearest root of psi'|, largest injective radius)``, capped at 4.
    """
    if psi.order < 1 or not np.any(psi.coeffs[1:]):
        raise BoundaryNotAnalytic("psi must have degree at least 1")
    crit = critical_points(psi)
    root = float(np.abs(crit - psi.center).min()) if crit.size else np.inf
    top = R_CAP / SAFETY
    upper = min(root, top)
    if not circle_is_injective(psi, 1.0)[0]:
        raise BoundaryNotAnalytic("psi is not injective on the unit circle")
    grid = np.linspace(1.0, upper, 41)
    good, bad = 1.0, None
    for rho in grid[1:]:
        if circle_is_injective(psi, rho)[0]:
            good = rho
        else:
            bad = rho
            break
    if bad is not None:
        for _ in range(40):
            mid = 0.5 * (good + bad)
            if circle_is_injective(psi, mid)[0]:
                good = mid
            else:
                bad = mid
            if bad - good < 1e-9:
                break
        inj = good
    else:
        inj = upper
    reach = min(root, inj)
    R = R_CAP if reach >= top * (1 - 1e-12) else min(R_CAP, SAFETY * reach)
    if R <= 1.0:
        raise BoundaryNotAnalytic(f"no analyticity radius above 1 (got {R:.6g})")
    return max(R, 1.0 + 1e-6)


def _principal_product_sqrt(psi_prime: PowerSeries, roots: np.ndarray):
    """Branch of ``sqrt(psi')`` anchored at the center, from the root factorization."""
    c0 = psi_prime.coeffs[0]
    base = np.sqrt(c0)
    shifted = roots - psi_prime.center

    def evaluate(z):
        h = np.asarray(z, dtype=complex) - psi_prime.center
        out = np.full(h.shape, base, dtype=complex)
        for rk in shifted:
            out = out * np.sqrt(1 - h / rk)
        return out
    return evaluate


def _radial_sqrt(psi_prime: PowerSeries, steps: int = 128):
    """Branch of ``sqrt(psi')`` continued along rays from the center."""
    def evaluate(z):
        h = np.asarray(z, dtype=complex) - psi_prime.center
        prev = np.full(h.shape, np.sqrt(psi_prime.coeffs[0]), dtype=complex)
        for t in np.linspace(0, 1, steps + 1)[1:]:
            cur = np.sqrt(psi_prime(psi_prime.center + t * h))
            flip = np.abs(cur - prev) > np.abs(cur + prev)
            prev = np.where(flip, -cur, cur)
        return prev
    return evaluate


class AnalyticDomain:
    """``D = psi(unit disc)`` with ``psi`` analytic and injective on ``|z| < R``."""

    def __init__(self, psi, R: float | None = None, name: str = "custom",
                 order: int = DEFAULT_ORDER):
        if not isinstance(psi, PowerSeries):
            psi = PowerSeries(psi)
        if psi.center != 0:
            raise ValueError("psi must be expanded about 0")
        self.name = name
        self.psi = psi
        self.R = float(estimate_R(psi) if R is None else R)
        if self.R <= 1:
            raise BoundaryNotAnalytic("R must exceed 1")
        self.psi_prime = ps_derivative(psi)
        if self.psi_prime.coeffs[0] == 0:
            raise NotConformal("psi'(0) = 0")
        self.half_derivative = ps_sqrt_branch(self.psi_prime, order)
        roots = critical_points(psi)
        self._sqrt = _principal_product_sqrt(self.psi_prime, roots)
        probe = self.R * np.exp(2j * np.pi * np.arange(64) / 64)
        scale = np.abs(self.psi_prime(probe)).max()
        if np.abs(self._sqrt(probe) ** 2 - self.psi_prime(probe)).max() > 1e-12 * scale:
            LOGGER.info("root factorization of psi' is ill-conditioned; "
                        "using radial continuation for sqrt(psi')")
            self._sqrt = _radial_sqrt(self.psi_prime)

    def __repr__(self):
        return f"AnalyticDomain(name={self.name!r}, degree={self.psi.order}, R={self.R:.6g})"

    def sqrt_psi_prime(self, z):
        """Branch of ``psi'(z)**0.5`` analytic on ``|z| < R``, equal to the principal root at 0."""
        return self._sqrt(z)

    def inverse_sqrt_psi_prime(self, z):
        return 1.0 / self._sqrt(z)

    def validate(self, R_check: float | None = None) -> ValidationReport:
        return validate_conformal(self.psi, self.R if R_check is None else R_check)

    @cached_property
    def diameter(self) -> float:
        return float(pdist(np.column_stack(_xy(circle_image(self.psi, 1.0, 256)))).max())

    def fingerprint(self) -> str:
        import hashlib
        h = hashlib.sha256(self.psi.coeffs.tobytes())
        h.update(np.float64(self.R).tobytes())
        return h.hexdigest()[:16]

    def to_spec(self) -> dict:
        return {"name": self.name, "psi": series_to_pairs(self.psi.coeffs), "R": self.R}

    @classmethod
    def from_spec(cls, spec: dict) -> "AnalyticDomain":
        unknown = set(spec) - {"name", "psi", "R"}
        if unknown:
            raise ConfigError(f"unknown domain keys: {sorted(unknown)}")
        if "psi" not in spec:
            raise ConfigError("domain spec needs a 'psi' coefficient list")
        return cls(pairs_to_series(spec["psi"]), spec.get("R"), spec.get("name", "custom"))


def _xy(z):
    return z.real, z.imag


def invert_map(dom: AnalyticDomain, w, tol: float = 1e-13):
    """Solve ``psi(z) = w`` for ``z`` in the unit disc by damped Newton iteration.

    Starts from the affine guess ``(w - psi(0)) / psi'(0)``, which is ``w`` for
    maps normalized like the presets.  Steps landing outside ``|z| = 1.5`` are
    halved.  Accepts scalars or arrays.
    """
    w = np.asarray(w, dtype=complex)
    p0 = dom.psi.coeffs[0]
    d0 = dom.psi_prime.coeffs[0]
    z = (w - p0) / d0
    for _ in range(NEWTON_MAX_ITER):
        res = dom.psi(z) - w
        if np.all(np.abs(res) <= tol):
            return z[()] if z.ndim == 0 else z
        step = -res / dom.psi_prime(z)
        lam = np.ones(z.shape)
        for _ in range(30):
            over = np.abs(z + lam * step) > NEWTON_DAMP_RADIUS
            if not np.any(over):
                break
            lam = np.where(over, 0.5 * lam, lam)
        z = z + lam * step
    res = np.abs(dom.psi(z) - w)
    if np.all(res <= tol):
        return z[()] if z.ndim == 0 else z
    raise InversionDiverged(f"Newton did not converge (residual {res.max():.3g})")


@dataclass(frozen=True)
class BoundaryNodes:
    theta: np.ndarray
    zeta: np.ndarray
    weight: np.ndarray

    def __iter__(self):
        return iter(zip(self.theta, self.zeta, self.weight))

    def __len__(self):
        return self.theta.size


def check_power_of_two(N: int, minimum: int = 4) -> int:
    N = int(N)
    if N < minimum or N & (N - 1):
        raise SizeError(f"N = {N} must be a power of two >= {minimum}")
    return N


def boundary_nodes(dom: AnalyticDomain, N: int) -> BoundaryNodes:
    """Trapezoidal nodes on ``dD``: ``zeta_j = psi(e^{i theta_j})`` and ``d zeta`` weights."""
    N = check_power_of_two(N)
    theta = 2 * np.pi * np.arange(N) / N
    e = np.exp(1j * theta)
    return BoundaryNodes(theta, dom.psi(e), dom.psi_prime(e) * 1j * e * (2 * np.pi / N))


_PRESET_RE = re.compile(r"^(disk|perturbed-disk|cubic-blob)(?:-([0-9.eE+-]+))?$")
SHIPPED_PRESETS = ("disk", "perturbed-disk-0.2", "cubic-blob-0.1")


def preset(name: str) -> AnalyticDomain:
    """Build a shipped domain: ``disk``, ``perturbed-disk[-eps]`` or ``cubic-blob[-eps]``."""
    m = _PRESET_RE.match(name)
    if not m:
        raise ConfigError(f"unknown preset {name!r}")
    kind, eps = m.group(1), m.group(2)
    if kind == "disk":
        if eps is not None:
            raise ConfigError("the disk preset takes no parameter")
        return AnalyticDomain([0.0, 1.0], name="disk")
    eps = float(eps) if eps is not None else (0.2 if kind == "perturbed-disk" else 0.1)
    if kind == "perturbed-disk":
        if not 0 < eps < 0.5:
            raise ConfigError("perturbed-disk needs eps in (0, 0.5)")
        return AnalyticDomain([0.0, 1.0, eps], name=f"perturbed-disk-{eps:g}")
    if not 0 < eps < 1 / 3:
        raise ConfigError("cubic-blob needs eps in (0, 1/3)")
    return AnalyticDomain([0.0, 1.0, 0.0, eps], name=f"cubic-blob-{eps:g}")


def load_domain(source: str) -> AnalyticDomain:
    """Load a domain from a JSON spec file, or build a preset by name."""
    if os.path.exists(source):
        with open(source) as fh:
            try:
                spec = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{source}: {exc}") from exc
        return AnalyticDomain.from_spec(spec)
    return preset(source)
