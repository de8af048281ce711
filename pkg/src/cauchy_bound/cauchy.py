"""Cauchy transform on ``D`` by trapezoidal quadrature, and conformal transplantation.

The transplantation operators are ``f -> (f o psi) sqrt(psi')`` (boundary of
``D`` to unit circle) and its inverse ``g -> (g o phi) sqrt(phi')`` with
``phi = psi^{-1}``.  The root of ``phi'`` is always taken as the reciprocal of
the ``sqrt(psi')`` branch composed with ``phi``, so the two maps are exact
inverses of each other.
"""
from __future__ import annotations

import numpy as np

from .boundary import BoundaryFunction, HardyFunction, resample
from .domain import AnalyticDomain, boundary_nodes, invert_map
from .errors import NearBoundary

DELTA_MIN_FRACTION = 0.05
CONJUGATED_MAX_RADIUS = 0.95

TO_DISK = "to_disk"
TO_CURVE = "to_curve"
_DIRECTIONS = {"to_disk": TO_DISK, "todisk": TO_DISK, "to_curve": TO_CURVE, "tocurve": TO_CURVE}


def _points(z) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    return np.atleast_1d(arr), arr.ndim == 0


def cauchy_transform_domain(dom: AnalyticDomain, f_boundary: BoundaryFunction, z,
                            delta_min: float | None = None):
    """``(1/2 pi i) int_{dD} f(zeta) / (zeta - z) d zeta`` at interior points ``z``.

    ``f_boundary`` holds samples at the boundary nodes of ``dom`` for its own
    ``N``.  Points outside ``D`` are not detected.

    Raises
    ------
    NearBoundary
        If some ``z`` lies closer than ``delta_min`` (default 5% of the domain
        diameter) to a boundary node.
    """
    zs, scalar = _points(z)
    nodes = boundary_nodes(dom, f_boundary.N)
    if delta_min is None:
        delta_min = DELTA_MIN_FRACTION * dom.diameter
    diff = nodes.zeta[None, :] - zs[:, None]
    dist = np.abs(diff).min(axis=1)
    bad = np.flatnonzero(dist < delta_min)
    if bad.size:
        i = bad[0]
        raise NearBoundary(complex(zs[i]), float(dist[i]), float(delta_min))
    terms = (f_boundary.samples * nodes.weight)[None, :] / diff
    out = np.sum(terms, axis=1) / (2j * np.pi)
    return out[0] if scalar else out


def transplant_boundary(dom: AnalyticDomain, f: BoundaryFunction, direction: str) -> BoundaryFunction:
    """Move boundary data between ``dD`` and the unit circle.

    ``to_disk``: ``g(e^{i theta}) = f(psi(e^{i theta})) sqrt(psi'(e^{i theta}))``
    ``to_curve``: the inverse, ``f(zeta) = g(phi(zeta)) / sqrt(psi'(phi(zeta)))``;
    on the nodes ``phi(zeta_j) = e^{i theta_j}`` holds exactly.
    """
    key = _DIRECTIONS.get(direction.replace("-", "_").lower())
    if key is None:
        raise ValueError(f"direction must be 'to_disk' or 'to_curve', not {direction!r}")
    root = dom.sqrt_psi_prime(np.exp(1j * f.theta))
    if key == TO_DISK:
        return BoundaryFunction(f.samples * root)
    return BoundaryFunction(f.samples / root)


def transplant_interior(dom: AnalyticDomain, g: HardyFunction, z_in_D, tol: float = 1e-14):
    """Evaluate ``(g o phi) sqrt(phi')`` at points of ``D``."""
    zs, scalar = _points(z_in_D)
    pre = np.atleast_1d(invert_map(dom, zs, tol))
    out = g(pre) * dom.inverse_sqrt_psi_prime(pre)
    return out[0] if scalar else out


def cauchy_representation_check(dom: AnalyticDomain, g: HardyFunction, probes,
                                N: int = 256) -> float:
    """Max deviation between an E^2(D) function and the Cauchy integral of its boundary trace.

    ``f = (g o phi) sqrt(phi')`` is sampled on ``dD`` and its Cauchy transform is
    compared with ``f`` itself at ``psi(probes)``.
    """
    probes = np.atleast_1d(np.asarray(probes, dtype=complex))
    trace = transplant_boundary(dom, g.boundary(N), TO_CURVE)
    points = dom.psi(probes)
    via_cauchy = cauchy_transform_domain(dom, trace, points)
    direct = transplant_interior(dom, g, points)
    return float(np.max(np.abs(via_cauchy - direct)))


def direct_conjugated_operator(dom: AnalyticDomain, f: BoundaryFunction, z,
                               N_quad: int | None = None):
    """The conjugated Cauchy operator on the unit circle, by trapezoidal quadrature.

    Computes ``(1/2 pi i) int f(w) sqrt(psi'(w)) sqrt(psi'(z)) / (psi(w) - psi(z)) dw``
    over ``|w| = 1`` for ``|z| <= 0.95``.  ``f`` is band-limited-interpolated to
    ``N_quad`` nodes when that is larger than its own size.
    """
    zs, scalar = _points(z)
    if np.any(np.abs(zs) > CONJUGATED_MAX_RADIUS):
        i = int(np.argmax(np.abs(zs)))
        raise NearBoundary(complex(zs[i]), float(1 - abs(zs[i])), 1 - CONJUGATED_MAX_RADIUS)
    if N_quad is not None and N_quad > f.N:
        f = resample(f, N_quad)
    w = np.exp(1j * f.theta)
    weighted = f.samples * dom.sqrt_psi_prime(w) * w
    denom = dom.psi(w)[None, :] - dom.psi(zs)[:, None]
    out = dom.sqrt_psi_prime(zs) * np.sum(weighted[None, :] / denom, axis=1) / f.N
    return out[0] if scalar else out


def cauchy_transform_e2_norm(dom: AnalyticDomain, f_curve: BoundaryFunction,
                             rho: float = 0.75, K: int = 40, n_circle: int = 128) -> float:
    """E^2(D) norm of ``C_D f`` computed from its definition, without the series.

    ``G = (C_D f o psi) sqrt(psi')`` is sampled on ``|z| = rho`` by quadrature,
    its Taylor coefficients up to degree ``K`` are read off by FFT, and the H^2
    norm of ``G`` is returned.  Coefficients beyond ``K`` are dropped, so ``K``
    must cover the decay of ``G`` (geometric for analytic boundaries).
    """
    z = rho * np.exp(2j * np.pi * np.arange(n_circle) / n_circle)
    G = cauchy_transform_domain(dom, f_curve, dom.psi(z)) * dom.sqrt_psi_prime(z)
    taylor = np.fft.fft(G)[: K + 1] / n_circle / rho ** np.arange(K + 1)
    return float(np.sqrt(np.sum(np.abs(taylor) ** 2)))
