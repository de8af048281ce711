"""The conjugated Cauchy operator as the series ``A = sum a_mn M_m C N_n``.

``N_n`` multiplies boundary data by ``w**n``, ``C`` keeps nonnegative
frequencies and ``M_m`` shifts Taylor coefficients by ``m``.  Instead of
composing the ``(M+1)**2`` operators literally, the ``M+1`` projections
``p_n = C N_n f`` are formed once and combined as ``sum_m z**m (sum_n a_mn p_n)``.
All work is done on exact Fourier/Taylor index ranges, so nothing aliases.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryFunction, FourierCoefficients, HardyFunction, analyze
from .cauchy import direct_conjugated_operator
from .domain import AnalyticDomain
from .kernel import KernelExpansion, RadiiPair, kernel_coefficients, tail_sum_bound


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("CAUCHY_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SeriesOperator:
    expansion: KernelExpansion
    domain: AnalyticDomain

    def __post_init__(self):
        if self.expansion.source and self.expansion.source != self.domain.fingerprint():
            raise ValueError("kernel expansion was computed for a different domain")

    @classmethod
    def build(cls, dom: AnalyticDomain, radii: RadiiPair | None = None,
              M: int | None = None, grid_N: int | None = None) -> "SeriesOperator":
        return cls(kernel_coefficients(dom, radii, M, grid_N), dom)

    @property
    def M(self) -> int:
        return self.expansion.M

    def truncated(self, M: int) -> "SeriesOperator":
        return SeriesOperator(self.expansion.truncated(M), self.domain)

    def __call__(self, f) -> HardyFunction:
        return apply_series_operator(self, f)

    def adjoint(self, g: HardyFunction) -> FourierCoefficients:
        return apply_adjoint(self, g)


def _coefficients(f) -> FourierCoefficients:
    if isinstance(f, BoundaryFunction):
        return analyze(f)
    if isinstance(f, FourierCoefficients):
        return f
    raise TypeError(f"expected boundary data, got {type(f).__name__}")


def _series_apply(a: np.ndarray, values: np.ndarray, kmin: int) -> np.ndarray:
    """Taylor coefficients of ``A f`` for Fourier coefficients stacked along the last axis."""
    M = a.shape[0] - 1
    K = values.shape[-1]
    L = kmin + K + M
    if L <= 0:
        return np.zeros(values.shape[:-1] + (1,), dtype=complex)
    # P[..., n, j] = c_{j-n}: Taylor coefficient j of the projection of w**n f
    idx = np.arange(L)[None, :] - np.arange(M + 1)[:, None] - kmin
    valid = (idx >= 0) & (idx < K)
    P = np.ascontiguousarray(np.where(valid, values[..., np.clip(idx, 0, K - 1)], 0))
    Q = np.matmul(a, P)
    out = np.zeros(values.shape[:-1] + (L + M,), dtype=complex)
    for m in range(M + 1):
        out[..., m : m + L] += Q[..., m, :]
    return out


def _adjoint_apply(a: np.ndarray, taylor: np.ndarray) -> np.ndarray:
    """Fourier coefficients ``k = -M, ...`` of ``A* g``, stacked along the last axis."""
    M = a.shape[0] - 1
    T = taylor.shape[-1]
    idx = np.arange(T)[None, :] + np.arange(M + 1)[:, None]
    G = np.ascontiguousarray(np.where(idx < T, taylor[..., np.clip(idx, 0, T - 1)], 0))
    Rn = np.matmul(np.ascontiguousarray(a.conj().T), G)
    out = np.zeros(taylor.shape[:-1] + (T + M,), dtype=complex)
    for n in range(M + 1):
        out[..., M - n : M - n + T] += Rn[..., n, :]
    return out


def apply_series_operator(op: SeriesOperator, f) -> HardyFunction:
    """``A f = sum_{m,n <= M} a_mn z**m C(w**n f)`` as Taylor coefficients."""
    c = _coefficients(f)
    return HardyFunction(_series_apply(op.expansion.a, c.values, c.kmin))


def apply_adjoint(op: SeriesOperator, g: HardyFunction) -> FourierCoefficients:
    """Adjoint of :func:`apply_series_operator`, from H^2 back to the circle.

    ``(A* g)_k = sum_{m,n} conj(a_mn) g_{k+n+m}`` over ``k + n >= 0``.
    """
    return FourierCoefficients(_adjoint_apply(op.expansion.a, g.taylor), -op.M)


def operator_norm_upper(op: SeriesOperator) -> float:
    """``sum |a_mn|`` over the truncation plus the closed-form geometric tail."""
    return op.expansion.norm_bound


def _rayleigh_batch(a: np.ndarray, values: np.ndarray, kmin: int, steps: int) -> np.ndarray:
    """Best ``||A f|| / ||f||`` seen along ``steps`` power iterations, per row."""
    M = a.shape[0] - 1
    best = np.zeros(values.shape[0])
    for i in range(steps + 1):
        norm_f = np.sqrt(np.sum(np.abs(values) ** 2, axis=-1))
        g = _series_apply(a, values, kmin)
        ratio = np.sqrt(np.sum(np.abs(g) ** 2, axis=-1)) / np.where(norm_f > 0, norm_f, 1)
        best = np.maximum(best, np.where(norm_f > 0, ratio, 0))
        if i < steps:
            values = _adjoint_apply(a, g)
            scale = np.sqrt(np.sum(np.abs(values) ** 2, axis=-1, keepdims=True))
            values = values / np.where(scale > 0, scale, 1)
            kmin = -M
    return best


def operator_norm_lower_mc(op: SeriesOperator, trials: int = 200, seed: int = 0,
                           N: int = 256, power_steps: int = 3,
                           workers: int | None = None) -> float:
    """Empirical lower bound ``max ||A f|| / ||f||`` over random band-limited ``f``.

    Each start has complex Gaussian Fourier coefficients with a flat profile on
    ``|k| <= N/4``, then takes ``power_steps`` steps of power iteration on
    ``A* A``.  Every iterate is a genuine test function, so the result is a lower
    bound for the norm.  Deterministic for a given seed regardless of ``workers``.
    """
    rng = np.random.default_rng(seed)
    band = N // 4
    starts = (rng.standard_normal((trials, 2 * band + 1))
              + 1j * rng.standard_normal((trials, 2 * band + 1)))
    if trials == 0:
        return 0.0
    workers = thread_cap() if workers is None else workers
    chunks = np.array_split(starts, min(workers, trials) * 4 if workers > 1 else max(1, trials // 50))
    run = lambda block: _rayleigh_batch(op.expansion.a, block, -band, power_steps)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            ratios = list(pool.map(run, chunks))
    else:
        ratios = [run(block) for block in chunks]
    return float(np.concatenate(ratios).max())


def partial_sum_convergence(op: SeriesOperator, f, schedule) -> np.ndarray:
    """``||A_{M'} f - A_M f||`` in H^2 for each ``M'`` in ``schedule`` (``M`` = full truncation)."""
    c = _coefficients(f)
    full = _series_apply(op.expansion.a, c.values, c.kmin)
    out = []
    for Mp in schedule:
        part = _series_apply(op.expansion.a[: Mp + 1, : Mp + 1], c.values, c.kmin)
        diff = full.copy()
        diff[: part.size] -= part
        out.append(float(np.sqrt(np.sum(np.abs(diff) ** 2))))
    return np.array(out)


def partial_sum_bounds(op: SeriesOperator, f, schedule) -> np.ndarray:
    """``tail_sum_bound(M') * ||f||`` for each ``M'``."""
    norm = np.sqrt(_coefficients(f).energy())
    e = op.expansion
    return np.array([tail_sum_bound(e.sup_H, e.radii, Mp) * norm for Mp in schedule])


def equivalence_check(op: SeriesOperator, f: BoundaryFunction, probes, N_quad: int = 512) -> float:
    """Max over ``probes`` of |series ``A f`` - quadrature of the conjugated operator|."""
    probes = np.atleast_1d(np.asarray(probes, dtype=complex))
    series = apply_series_operator(op, f)(probes)
    direct = direct_conjugated_operator(op.domain, f, probes, N_quad)
    return float(np.max(np.abs(series - direct)))
