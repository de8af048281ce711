"""Truncated complex power series.

A :class:`PowerSeries` holds the coefficients of ``sum_k c_k (z - center)**k``
up to an explicit truncation order.  Binary operations truncate to the
smaller of the two orders unless an ``order`` is passed explicitly, in which
case the shorter operand is treated as a polynomial (zero-padded).

Logarithms and square roots are anchored at the center with the principal
value; whether the resulting branch is valid on a given disc is for the
caller to certify (see :mod:`cauchy_bound.domain`).
"""
from __future__ import annotations

import cmath
import json
from dataclasses import dataclass

import numpy as np

from .errors import DegreeTooLow, DivisionBySingularSeries, LogOfVanishingSeries

DEFAULT_ORDER = 64
FLUSH = 1e-300


def _as_coeffs(values) -> np.ndarray:
    c = np.array(values, dtype=complex).ravel()
    if c.size == 0:
        raise ValueError("a power series needs at least one coefficient")
    c.real[np.abs(c.real) < FLUSH] = 0.0
    c.imag[np.abs(c.imag) < FLUSH] = 0.0
    c.flags.writeable = False
    return c


@dataclass(frozen=True)
class PowerSeries:
    coeffs: np.ndarray
    center: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))
        object.__setattr__(self, "center", complex(self.center))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.center == other.center and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.center, self.coeffs.tobytes()))

    def __call__(self, z):
        return ps_eval(self, z)

    def __add__(self, other):
        return ps_add(self, other)

    def __sub__(self, other):
        return ps_add(self, ps_scale(other, -1.0))

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return ps_mul(self, other)
        return ps_scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PowerSeries):
            return ps_div(self, other)
        return ps_scale(self, 1.0 / other)

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(_fit(self.coeffs, order), self.center)

    def derivative(self) -> "PowerSeries":
        return ps_derivative(self)

    def to_json(self) -> str:
        return json.dumps(series_to_pairs(self.coeffs))

    @classmethod
    def from_json(cls, text: str, center: complex = 0j) -> "PowerSeries":
        return cls(pairs_to_series(json.loads(text)), center)


def series_to_pairs(coeffs) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(coeffs, dtype=complex)]


def pairs_to_series(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("expected a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def _fit(c: np.ndarray, order: int) -> np.ndarray:
    if order < 0:
        raise ValueError("order must be nonnegative")
    out = np.zeros(order + 1, dtype=complex)
    n = min(order + 1, c.size)
    out[:n] = c[:n]
    return out


def _common(a: PowerSeries, b: PowerSeries, order):
    if a.center != b.center:
        raise ValueError("series have different centers")
    if order is None:
        order = min(a.order, b.order)
    return _fit(a.coeffs, order), _fit(b.coeffs, order), order


def ps_eval(s: PowerSeries, z):
    """Horner evaluation of the truncated polynomial at ``z`` (scalar or array)."""
    h = np.asarray(z, dtype=complex) - s.center
    acc = np.full(h.shape, s.coeffs[-1], dtype=complex)
    for c in s.coeffs[-2::-1]:
        acc = acc * h + c
    return acc[()] if acc.ndim == 0 else acc


def ps_scale(s: PowerSeries, alpha) -> PowerSeries:
    return PowerSeries(s.coeffs * complex(alpha), s.center)


def ps_add(a: PowerSeries, b: PowerSeries, order: int | None = None) -> PowerSeries:
    ca, cb, _ = _common(a, b, order)
    return PowerSeries(ca + cb, a.center)


def ps_derivative(s: PowerSeries) -> PowerSeries:
    if s.order < 1:
        raise DegreeTooLow("cannot differentiate a series of order 0")
    k = np.arange(1, s.order + 1)
    return PowerSeries(k * s.coeffs[1:], s.center)


def ps_integrate(s: PowerSeries) -> PowerSeries:
    """Antiderivative with zero constant term; the order grows by one."""
    k = np.arange(1, s.order + 2)
    return PowerSeries(np.concatenate([[0.0], s.coeffs / k]), s.center)


def ps_mul(a: PowerSeries, b: PowerSeries, order: int | None = None) -> PowerSeries:
    ca, cb, order = _common(a, b, order)
    return PowerSeries(np.convolve(ca, cb)[: order + 1], a.center)


def ps_div(a: PowerSeries, b: PowerSeries, order: int | None = None) -> PowerSeries:
    ca, cb, order = _common(a, b, order)
    if cb[0] == 0:
        raise DivisionBySingularSeries("divisor has zero constant term")
    q = np.zeros(order + 1, dtype=complex)
    q[0] = ca[0] / cb[0]
    for k in range(1, order + 1):
        q[k] = (ca[k] - np.dot(cb[1 : k + 1], q[k - 1 :: -1])) / cb[0]
    return PowerSeries(q, a.center)


def ps_exp(s: PowerSeries, order: int | None = None) -> PowerSeries:
    # e' = s' e  =>  k e_k = sum_{j=1..k} j s_j e_{k-j}
    order = s.order if order is None else order
    c = _fit(s.coeffs, order)
    js = np.arange(order + 1) * c
    e = np.zeros(order + 1, dtype=complex)
    e[0] = cmath.exp(c[0])
    for k in range(1, order + 1):
        e[k] = np.dot(js[1 : k + 1], e[k - 1 :: -1][:k]) / k
    return PowerSeries(e, s.center)


def ps_log_branch(s: PowerSeries, order: int | None = None) -> PowerSeries:
    """Logarithm with ``L(center) = Log(s(center))`` and ``L' = s'/s``."""
    order = s.order if order is None else order
    c = _fit(s.coeffs, order)
    if c[0] == 0:
        raise LogOfVanishingSeries("series vanishes at its center")
    if order == 0:
        return PowerSeries([cmath.log(c[0])], s.center)
    full = PowerSeries(c, s.center)
    quotient = ps_div(ps_derivative(full), full.truncate(order - 1))
    out = ps_integrate(quotient).coeffs.copy()
    out[0] = cmath.log(c[0])
    return PowerSeries(out, s.center)


def ps_sqrt_branch(s: PowerSeries, order: int | None = None) -> PowerSeries:
    half_log = ps_scale(ps_log_branch(s, order), 0.5)
    return ps_exp(half_log)


def ps_recenter(s: PowerSeries, z0, new_order: int | None = None) -> PowerSeries:
    """Taylor coefficients of the same polynomial about ``z0``.

    Exact for polynomials (repeated synthetic division).
    """
    h = complex(z0) - s.center
    c = s.coeffs.copy()
    n = c.size
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += h * c[j + 1]
    new_order = s.order if new_order is None else new_order
    return PowerSeries(_fit(c, new_order), complex(z0))


def taylor_shift_many(coeffs: np.ndarray, z0: np.ndarray, order: int) -> np.ndarray:
    """Recentered coefficients of one polynomial about many points at once.

    Returns an array of shape ``z0.shape + (order + 1,)``; row ``k`` holds
    ``p^(k)(z0) / k!``.
    """
    z0 = np.asarray(z0, dtype=complex)
    out = np.zeros(z0.shape + (order + 1,), dtype=complex)
    d = np.asarray(coeffs, dtype=complex)
    for k in range(order + 1):
        if d.size == 0:
            break
        acc = np.full(z0.shape, d[-1], dtype=complex)
        for c in d[-2::-1]:
            acc = acc * z0 + c
        out[..., k] = acc
        # next: derivative / (k+1)
        d = d[1:] * np.arange(1, d.size) / (k + 1)
    return out
