import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cauchy_bound.boundary import (BoundaryFunction, FourierCoefficients, HardyFunction, analyze,
                                   hardy_norm, l2_norm_circle, l2_norm_curve, monomial_multiply,
                                   random_trig_poly, resample, riesz_projection, synthesize)
from cauchy_bound.errors import SizeError
from oracles import arc_length

N = 64


def bf(fn, n=N):
    return BoundaryFunction.from_callable(fn, n)


def taylor(h, n):
    out = np.zeros(n, dtype=complex)
    out[: min(n, h.taylor.size)] = h.taylor[:n]
    return out


def test_analyze_exponential():
    c = analyze(bf(lambda t: np.exp(1j * t)))
    assert c[1] == pytest.approx(1, abs=1e-15)
    assert np.max(np.abs(np.delete(c.values, 1 - c.kmin))) <= 1e-15
    assert c.kmin == -N // 2 and c.kmax == N // 2 - 1


def test_analyze_constant():
    c = analyze(bf(lambda t: np.ones_like(t)))
    assert c[0] == pytest.approx(1, abs=1e-15)
    assert c.energy() == pytest.approx(1, abs=1e-15)


def test_analyze_matches_direct_sum(rng):
    f = BoundaryFunction(rng.standard_normal(16) + 1j * rng.standard_normal(16))
    theta = f.theta
    for k in range(-8, 8):
        direct = np.mean(f.samples * np.exp(-1j * k * theta))
        assert analyze(f)[k] == pytest.approx(direct, abs=1e-14)


def test_round_trip(rng):
    f = BoundaryFunction(rng.standard_normal(128) + 1j * rng.standard_normal(128))
    assert np.max(np.abs(synthesize(analyze(f)).samples - f.samples)) <= 1e-13


def test_non_power_of_two_rejected():
    with pytest.raises(SizeError):
        BoundaryFunction(np.ones(12))
    with pytest.raises(SizeError):
        synthesize(FourierCoefficients([1.0], 40), 64)


def test_synthesize_picks_size():
    f = synthesize(FourierCoefficients([1.0], 9))
    assert f.N == 32


def test_resample_preserves_band_limited(rng):
    f = random_trig_poly(rng, 10, 32)
    g = resample(f, 128)
    assert np.allclose(g.samples[::4], f.samples, atol=1e-13)
    with pytest.raises(SizeError):
        resample(g, 64)


def test_norms_on_circle():
    assert l2_norm_circle(bf(lambda t: np.exp(1j * t))) == pytest.approx(1, abs=1e-15)
    assert l2_norm_circle(bf(lambda t: 2 + 0 * t)) == pytest.approx(2, abs=1e-15)


def test_curve_norm_of_one_is_arc_length(perturbed):
    n = l2_norm_curve(BoundaryFunction(np.ones(256)), perturbed)
    assert n == pytest.approx(np.sqrt(arc_length([0, 1, 0.2]) / (2 * np.pi)), rel=1e-12)
    assert n >= 1


@pytest.mark.parametrize("coeffs,want", [([3, 4], 5), ([1], 1), ([0] * 7 + [1], 1)])
def test_hardy_norm(coeffs, want):
    assert hardy_norm(HardyFunction(coeffs)) == pytest.approx(want)


def test_riesz_examples():
    assert hardy_norm(riesz_projection(bf(lambda t: np.exp(-1j * t)))) <= 1e-15
    assert np.allclose(taylor(riesz_projection(bf(lambda t: np.exp(2j * t))), 4), [0, 0, 1, 0], atol=1e-15)
    assert np.allclose(taylor(riesz_projection(bf(lambda t: 2 * np.cos(t))), 3), [0, 1, 0], atol=1e-15)


def test_monomial_examples(rng):
    one = bf(lambda t: np.ones_like(t))
    assert np.allclose(monomial_multiply(one, 1).samples, np.exp(1j * one.theta), atol=1e-15)
    assert np.allclose(monomial_multiply(HardyFunction([1, 1]), 2).taylor, [0, 0, 1, 1])
    f = random_trig_poly(rng, 12, 64)
    for n in range(17):
        assert abs(l2_norm_circle(monomial_multiply(f, n)) - l2_norm_circle(f)) <= 1e-13


def test_monomial_commutes_with_analysis(rng):
    f = random_trig_poly(rng, 6, 64)
    a = analyze(monomial_multiply(f, 3))
    b = monomial_multiply(analyze(f), 3)
    for k in range(-9, 10):
        assert a[k] == pytest.approx(b[k], abs=1e-14)


def test_hardy_boundary_and_eval(rng):
    h = HardyFunction(rng.standard_normal(6) + 1j * rng.standard_normal(6))
    z = 0.3 - 0.4j
    assert h(z) == pytest.approx(np.polynomial.polynomial.polyval(z, h.taylor), abs=1e-14)
    b = h.boundary(32)
    assert np.allclose(b.samples, h(np.exp(1j * b.theta)), atol=1e-13)


def test_riesz_idempotent(rng):
    f = random_trig_poly(rng, 20, 128)
    p = riesz_projection(f)
    assert np.allclose(taylor(riesz_projection(p.boundary(128)), 21), taylor(p, 21), atol=1e-14)


def test_riesz_contractive_and_isometric_on_analytic(rng):
    for _ in range(200):
        f = random_trig_poly(rng, 16, 64)
        assert hardy_norm(riesz_projection(f)) <= l2_norm_circle(f) + 1e-15
    for _ in range(20):
        f = random_trig_poly(rng, 16, 64, nonnegative=True)
        assert abs(hardy_norm(riesz_projection(f)) - l2_norm_circle(f)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30))
def test_parseval_and_orthogonal_split(seed, degree):
    f = random_trig_poly(np.random.default_rng(seed), degree, 64)
    c = analyze(f)
    total = l2_norm_circle(f) ** 2
    assert abs(total - c.energy()) <= 1e-12 * max(1, total)
    negative = sum(abs(c[k]) ** 2 for k in range(c.kmin, 0))
    assert abs(hardy_norm(riesz_projection(f)) ** 2 + negative - total) <= 1e-12 * max(1, total)


def test_json_round_trip(rng):
    f = random_trig_poly(rng, 3, 16)
    g = BoundaryFunction.from_json(f.to_json())
    assert np.array_equal(g.samples, f.samples)
    with pytest.raises(SizeError):
        BoundaryFunction.from_dict({"N": 8, "samples": [[1, 0]] * 16})


def test_arithmetic(rng):
    f = random_trig_poly(rng, 3, 16)
    assert np.allclose((2 * f + f).samples, 3 * f.samples)
    h = HardyFunction([1, 2]) + HardyFunction([0, 0, 3])
    assert np.allclose(h.taylor, [1, 2, 3])
