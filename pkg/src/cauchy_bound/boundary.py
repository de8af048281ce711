"""Functions on circles, Fourier analysis, Hardy functions and the Riesz projection.

Normalization: Fourier coefficients are ``f_k = (1/N) sum_j f(theta_j) e^{-ik theta_j}``,
so that ``sum_k |f_k|**2`` equals the normalized arc-length norm
``(1/2pi) int |f|**2 dtheta`` of the samples.  Frequencies are band-limited to
``-N/2 <= k <= N/2 - 1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .domain import AnalyticDomain, boundary_nodes, check_power_of_two
from .errors import SizeError
from .power_series import pairs_to_series, series_to_pairs


def _frozen(values) -> np.ndarray:
    a = np.array(values, dtype=complex).ravel()
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class BoundaryFunction:
    """Equispaced samples ``f(theta_j)``, ``theta_j = 2 pi j / N``.

    On a circle the samples sit at ``circle_radius * e^{i theta_j}``; for a
    function on ``dD`` they sit at the nodes ``psi(e^{i theta_j})``.
    """
    samples: np.ndarray
    circle_radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen(self.samples))
        check_power_of_two(self.samples.size)

    @property
    def N(self) -> int:
        return self.samples.size

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.N) / self.N

    @classmethod
    def from_callable(cls, fn, N: int, circle_radius: float = 1.0) -> "BoundaryFunction":
        """Sample ``fn(theta)`` at the ``N`` equispaced angles."""
        check_power_of_two(N)
        return cls(fn(2 * np.pi * np.arange(N) / N), circle_radius)

    def __add__(self, other):
        return BoundaryFunction(self.samples + other.samples, self.circle_radius)

    def __mul__(self, alpha):
        return BoundaryFunction(self.samples * alpha, self.circle_radius)

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {"N": self.N, "samples": series_to_pairs(self.samples),
                "circle_radius": self.circle_radius}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "BoundaryFunction":
        samples = pairs_to_series(d["samples"])
        if int(d.get("N", samples.size)) != samples.size:
            raise SizeError(f"N = {d['N']} but {samples.size} samples given")
        return cls(samples, float(d.get("circle_radius", 1.0)))

    @classmethod
    def from_json(cls, text: str) -> "BoundaryFunction":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class FourierCoefficients:
    """Laurent/Fourier coefficients ``c_k`` for ``k = kmin, ..., kmin + len - 1``."""
    values: np.ndarray
    kmin: int

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "kmin", int(self.kmin))

    @property
    def kmax(self) -> int:
        return self.kmin + self.values.size - 1

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.kmin, self.kmax + 1)

    def __getitem__(self, k: int) -> complex:
        i = k - self.kmin
        return complex(self.values[i]) if 0 <= i < self.values.size else 0j

    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))

    def nonnegative(self) -> np.ndarray:
        """Coefficients ``c_0, c_1, ..., c_kmax`` (empty if ``kmax < 0``)."""
        if self.kmax < 0:
            return np.zeros(0, dtype=complex)
        start = max(0, -self.kmin)
        return np.concatenate([np.zeros(max(0, self.kmin), dtype=complex), self.values[start:]])


@dataclass(frozen=True)
class HardyFunction:
    """Element of H^2 of the disc, stored by its Taylor coefficients."""
    taylor: np.ndarray

    def __post_init__(self):
        t = _frozen(self.taylor)
        object.__setattr__(self, "taylor", t if t.size else _frozen([0.0]))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.full(z.shape, self.taylor[-1], dtype=complex)
        for c in self.taylor[-2::-1]:
            acc = acc * z + c
        return acc[()] if acc.ndim == 0 else acc

    def __add__(self, other):
        n = max(self.taylor.size, other.taylor.size)
        return HardyFunction(_pad(self.taylor, n) + _pad(other.taylor, n))

    def __mul__(self, alpha):
        return HardyFunction(self.taylor * alpha)

    __rmul__ = __mul__

    def norm(self) -> float:
        return hardy_norm(self)

    def boundary(self, N: int) -> BoundaryFunction:
        """Boundary samples on the unit circle (exact if the degree is below ``N/2``)."""
        return synthesize(FourierCoefficients(self.taylor, 0), N)


def _pad(a: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    out[: a.size] = a
    return out


def analyze(f: BoundaryFunction) -> FourierCoefficients:
    N = check_power_of_two(f.N)
    c = np.fft.fftshift(np.fft.fft(f.samples)) / N
    return FourierCoefficients(c, -N // 2)


def synthesize(coeffs: FourierCoefficients, N: int | None = None,
               circle_radius: float = 1.0) -> BoundaryFunction:
    """Samples of ``sum_k c_k e^{ik theta}`` at ``N`` points.

    ``N`` defaults to the smallest power of two whose band holds every coefficient.
    """
    lo, hi = coeffs.kmin, coeffs.kmax
    if N is None:
        N = 8
        while lo < -N // 2 or hi > N // 2 - 1:
            N *= 2
    N = check_power_of_two(N)
    k = coeffs.frequencies
    inside = (k >= -N // 2) & (k <= N // 2 - 1)
    if np.any(coeffs.values[~inside] != 0):
        raise SizeError(f"coefficients outside the band of N = {N}")
    spec = np.zeros(N, dtype=complex)
    spec[k[inside] % N] = coeffs.values[inside]
    return BoundaryFunction(np.fft.ifft(spec) * N, circle_radius)


def resample(f: BoundaryFunction, N: int) -> BoundaryFunction:
    """Band-limited interpolation of ``f`` onto ``N >= f.N`` points."""
    if N < f.N:
        raise SizeError("resample only refines")
    return synthesize(analyze(f), N, f.circle_radius)


def l2_norm_circle(f: BoundaryFunction) -> float:
    return float(np.sqrt(np.mean(np.abs(f.samples) ** 2)))


def l2_norm_curve(f: BoundaryFunction, dom: AnalyticDomain) -> float:
    """Normalized arc-length norm on ``dD`` of samples taken at the boundary nodes."""
    nodes = boundary_nodes(dom, f.N)
    return float(np.sqrt(np.sum(np.abs(f.samples) ** 2 * np.abs(nodes.weight)) / (2 * np.pi)))


def hardy_norm(f: HardyFunction) -> float:
    return float(np.sqrt(np.sum(np.abs(f.taylor) ** 2)))


def riesz_projection(f) -> HardyFunction:
    """Keep the nonnegative frequencies; this is the Cauchy integral on the unit circle."""
    coeffs = analyze(f) if isinstance(f, BoundaryFunction) else f
    return HardyFunction(coeffs.nonnegative())


def monomial_multiply(f, n: int):
    """Multiply by ``z**n``.

    On boundary samples this is the pointwise factor ``e^{in theta}`` (``N_n``);
    on a Hardy function it shifts Taylor coefficients up by ``n`` (``M_m``,
    ``n >= 0``); on Fourier coefficients it shifts the frequency window.
    """
    n = int(n)
    if isinstance(f, BoundaryFunction):
        return BoundaryFunction(f.samples * np.exp(1j * n * f.theta), f.circle_radius)
    if isinstance(f, HardyFunction):
        if n < 0:
            raise ValueError("M_m needs m >= 0 on H^2")
        return HardyFunction(np.concatenate([np.zeros(n, dtype=complex), f.taylor]))
    if isinstance(f, FourierCoefficients):
        return FourierCoefficients(f.values, f.kmin + n)
    raise TypeError(f"cannot multiply {type(f).__name__} by a monomial")


def random_trig_poly(rng: np.random.Generator, degree: int, N: int,
                     nonnegative: bool = False) -> BoundaryFunction:
    """Random trigonometric polynomial with complex Gaussian coefficients ``|k| <= degree``."""
    lo = 0 if nonnegative else -degree
    c = rng.standard_normal(degree - lo + 1) + 1j * rng.standard_normal(degree - lo + 1)
    return synthesize(FourierCoefficients(c, lo), N)
