import json
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from cauchy_bound import AnalyticDomain, PowerSeries
from cauchy_bound.domain import (SHIPPED_PRESETS, boundary_nodes, estimate_R, invert_map,
                                 load_domain, preset, validate_conformal)
from cauchy_bound.errors import (BoundaryNotAnalytic, ConfigError, InversionDiverged,
                                 NotConformal, NotInjective, SizeError)
from oracles import arc_length


def exp_partial_sum(c, degree):
    """Coefficients of (e^{cz} - 1)/c up to ``degree``: locally conformal, folds for |z| > pi/c."""
    return [0.0] + [c ** (k - 1) / math.factorial(k) for k in range(1, degree + 1)]


class TestValidate:
    def test_identity(self):
        rep = validate_conformal(PowerSeries([0, 1]), 2.0)
        assert rep.valid and rep.winding_number == 1
        assert rep.min_abs_psi_prime == pytest.approx(1.0)

    def test_quadratic_inside_root(self):
        rep = validate_conformal(PowerSeries([0, 1, 0.2]), 2.4)
        assert rep.valid
        assert rep.nearest_critical_point == pytest.approx(2.5)
        # min |psi'| on the closed disc is attained on the negative axis: 1 - 0.4*2.4
        assert rep.min_abs_psi_prime == pytest.approx(1 - 0.4 * 2.4, abs=1e-12)

    def test_critical_point_inside(self):
        with pytest.raises(NotConformal):
            validate_conformal(PowerSeries([0, 1, 0.6]), 1.0)

    def test_fold_without_critical_point(self):
        with pytest.raises(NotInjective):
            validate_conformal(PowerSeries(exp_partial_sum(4.0, 30)), 1.0)

    def test_small_radius_rejected(self):
        with pytest.raises(ValueError):
            validate_conformal(PowerSeries([0, 1]), 0.5)

    def test_report_serializes(self):
        d = validate_conformal(PowerSeries([0, 1, 0.2]), 2.0).to_dict()
        assert json.loads(json.dumps(d))["valid"] is True


class TestEstimateR:
    def test_identity_capped(self):
        assert estimate_R(PowerSeries([0, 1])) == 4.0

    @pytest.mark.parametrize("eps", [0.2, 0.45])
    def test_quadratic_binds_at_root(self, eps):
        assert estimate_R(PowerSeries([0, 1, eps])) == pytest.approx(0.95 / (2 * eps), rel=1e-9)

    def test_fold_binds_before_roots(self):
        # e^{2z} identifies z with z + i pi, so injectivity fails at radius pi/2,
        # well inside the nearest critical point of the truncated series.
        coeffs = exp_partial_sum(2.0, 30)
        R = estimate_R(PowerSeries(coeffs))
        assert R == pytest.approx(0.95 * math.pi / 2, rel=1e-3)

    def test_not_injective_on_unit_circle(self):
        with pytest.raises(BoundaryNotAnalytic):
            estimate_R(PowerSeries(exp_partial_sum(4.0, 30)))

    def test_constant_rejected(self):
        with pytest.raises(BoundaryNotAnalytic):
            estimate_R(PowerSeries([1.0, 0.0]))


class TestInvertMap:
    def test_identity(self, disk):
        assert invert_map(disk, 0.3 + 0.1j) == pytest.approx(0.3 + 0.1j, abs=1e-15)

    def test_real_point(self, perturbed):
        assert invert_map(perturbed, 0.55) == pytest.approx(0.5, abs=1e-13)

    def test_round_trip_imaginary(self, perturbed):
        w = perturbed.psi(0.9j)
        assert abs(invert_map(perturbed, w) - 0.9j) <= 1e-12

    @pytest.mark.parametrize("name", SHIPPED_PRESETS)
    def test_round_trip_random(self, name, rng):
        dom = preset(name)
        z = np.sqrt(rng.uniform(0, 0.95**2, 100)) * np.exp(2j * np.pi * rng.uniform(size=100))
        assert np.max(np.abs(invert_map(dom, dom.psi(z)) - z)) <= 1e-10

    def test_real_axis_against_brentq(self, cubic):
        # independent scalar root finder on the real axis
        for x in (0.2, 0.6, 0.9):
            w = x + 0.1 * x**3
            want = brentq(lambda t: t + 0.1 * t**3 - w, -1, 1, xtol=1e-15)
            assert invert_map(cubic, w) == pytest.approx(want, abs=1e-13)

    def test_divergence_reported(self):
        dom = AnalyticDomain([0, 1, 0.2], R=2.0)
        with pytest.raises(InversionDiverged):
            invert_map(dom, -5.0)   # psi(z) = -5 has no solution in |z| <= 1.5


class TestBranch:
    @pytest.mark.parametrize("name", SHIPPED_PRESETS)
    def test_half_derivative_squares_to_derivative(self, name):
        dom = preset(name)
        z = np.exp(2j * np.pi * np.arange(512) / 512)
        assert np.max(np.abs(dom.half_derivative(z) ** 2 - dom.psi_prime(z))) <= 1e-12

    @pytest.mark.parametrize("name", SHIPPED_PRESETS)
    def test_pointwise_root_is_continuous_along_radii(self, name):
        dom = preset(name)
        theta = 2 * np.pi * np.arange(64) / 64
        rho = np.linspace(0, 1.0, 400)[:, None]
        z = rho * np.exp(1j * theta)[None, :]
        vals = dom.sqrt_psi_prime(z)
        assert vals[0, 0] == pytest.approx(np.sqrt(dom.psi_prime(0)))
        assert np.max(np.abs(np.diff(vals, axis=0))) < 0.05
        # matches the series branch on the unit circle
        assert np.max(np.abs(vals[-1] - dom.half_derivative(z[-1]))) <= 1e-12


class TestBoundaryNodes:
    def test_identity_four_nodes(self, disk):
        nodes = boundary_nodes(disk, 4)
        assert np.allclose(nodes.zeta, [1, 1j, -1, -1j], atol=1e-15)
        assert np.allclose(nodes.weight, 1j * np.exp(1j * nodes.theta) * np.pi / 2, atol=1e-15)

    @pytest.mark.parametrize("name", SHIPPED_PRESETS)
    def test_closed_curve(self, name):
        assert abs(boundary_nodes(preset(name), 64).weight.sum()) <= 1e-14

    def test_winding_about_origin(self, perturbed):
        nodes = boundary_nodes(perturbed, 256)
        assert abs(np.sum(nodes.weight / nodes.zeta) / (2j * np.pi) - 1) <= 1e-12

    @pytest.mark.parametrize("name", SHIPPED_PRESETS)
    def test_arc_length_spectral(self, name):
        dom = preset(name)
        L = [np.abs(boundary_nodes(dom, N).weight).sum() for N in (128, 256)]
        assert abs(L[1] - L[0]) <= 1e-10
        assert L[1] == pytest.approx(arc_length(dom.psi.coeffs), rel=1e-12)

    @pytest.mark.parametrize("N", [3, 12, 2])
    def test_bad_sizes(self, disk, N):
        with pytest.raises(SizeError):
            boundary_nodes(disk, N)


class TestSpecsAndPresets:
    def test_presets(self):
        assert preset("disk").R == 4.0
        assert preset("perturbed-disk-0.2").R == pytest.approx(2.375)
        assert preset("perturbed-disk").psi.coeffs[2] == 0.2
        assert preset("cubic-blob").psi.coeffs[3] == 0.1

    @pytest.mark.parametrize("name", ["perturbed-disk-0.6", "cubic-blob-0.5", "disk-0.1", "ellipse"])
    def test_bad_presets(self, name):
        with pytest.raises(ConfigError):
            preset(name)

    def test_spec_round_trip(self, tmp_path, perturbed):
        path = tmp_path / "dom.json"
        path.write_text(json.dumps(perturbed.to_spec()))
        back = load_domain(str(path))
        assert back.fingerprint() == perturbed.fingerprint()

    def test_null_R_triggers_estimate(self):
        dom = AnalyticDomain.from_spec({"name": "q", "psi": [[0, 0], [1, 0], [0.2, 0]], "R": None})
        assert dom.R == pytest.approx(2.375)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            AnalyticDomain.from_spec({"psi": [[0, 0], [1, 0]], "radius": 2})

    def test_diameter(self, perturbed, disk):
        assert disk.diameter == pytest.approx(2.0, abs=1e-12)
        # brute-force maximum over a dense sample of the boundary
        t = np.linspace(0, 2 * np.pi, 4001)
        pts = perturbed.psi(np.exp(1j * t))
        brute = np.max(np.abs(pts[:, None] - pts[None, :]))
        assert perturbed.diameter == pytest.approx(brute, rel=1e-4)
