import math

import numpy as np
import pytest

from ucsk.colorimetry import ChromaticityPoint, xy_distance
from ucsk.constellation import FIXED_BLUE, BlueTarget, validate_against_target
from ucsk.optimizer import (
    ConvergenceError,
    InfeasibleTargetError,
    OptimizerConfig,
    _DesignProblem,
    design_constellation,
    dmin_upper_bound,
    objective_and_constraints,
)
from ucsk.presets import TABLE1_FIXTURES, blue_target_preset, led_triangle_gamut

FAST = OptimizerConfig(multistart_count=8, max_iterations=120, rng_seed=0)


class TestUpperBound:
    def test_target1(self):
        target = blue_target_preset(1)
        expect = xy_distance(target.center, FIXED_BLUE) + 0.1
        assert dmin_upper_bound(target) == pytest.approx(expect, rel=1e-12)
        assert dmin_upper_bound(target) == pytest.approx(0.2807, abs=1e-4)

    def test_target2(self):
        assert dmin_upper_bound(blue_target_preset(2)) == pytest.approx(
            0.1811, abs=1e-4
        )

    def test_zero_radius(self):
        target = BlueTarget(ChromaticityPoint(0.2, 0.3), 0.0)
        assert dmin_upper_bound(target) == xy_distance(target.center, FIXED_BLUE)


class TestObjective:
    def test_softmin_below_hard_min_and_limit(self, locus):
        fx = TABLE1_FIXTURES["table1-t3o1"]
        target = blue_target_preset(3)
        soft, _ = objective_and_constraints(fx.r, fx.g, target, locus, beta=200.0)
        hard, _ = objective_and_constraints(fx.r, fx.g, target, locus, beta=1e7)
        assert soft <= hard
        # beta -> inf recovers the hard minimum of the six pairwise distances
        assert hard == pytest.approx(0.0936, abs=1e-3)

    def test_disk_residual_at_center(self, locus):
        # choose R and G so the centroid lands exactly on the disk center
        center = ChromaticityPoint(0.2, 0.25)
        r = ChromaticityPoint(
            3 * center.x - FIXED_BLUE.x - 0.1, 3 * center.y - FIXED_BLUE.y - 0.5
        )
        g = ChromaticityPoint(0.1, 0.5)
        target = BlueTarget(center, 0.07)
        _, residuals = objective_and_constraints(r, g, target, locus)
        assert residuals[0] == pytest.approx(-target.radius, abs=1e-12)

    def test_gamut_residual_signs(self, locus):
        target = blue_target_preset(2)
        _, res_in = objective_and_constraints(
            ChromaticityPoint(0.3, 0.3), ChromaticityPoint(0.2, 0.4), target, locus
        )
        assert res_in[1] < 0 and res_in[2] < 0
        _, res_out = objective_and_constraints(
            ChromaticityPoint(0.9, 0.9), ChromaticityPoint(0.2, 0.4), target, locus
        )
        assert res_out[1] > 0


class TestGradient:
    def test_al_gradient_matches_finite_differences(self, locus):
        problem = _DesignProblem(
            FIXED_BLUE.as_array(), blue_target_preset(2), locus
        )
        rng = np.random.default_rng(3)
        lam = np.array([0.3, 0.1, 0.2])
        for _ in range(12):
            z = rng.uniform([0.05, 0.05, 0.05, 0.05], [0.6, 0.7, 0.6, 0.7])
            val, grad = problem.al_value_grad(z, 200.0, lam, 50.0)
            num = np.zeros(4)
            h = 1e-7
            for i in range(4):
                zp, zm = z.copy(), z.copy()
                zp[i] += h
                zm[i] -= h
                vp, _ = problem.al_value_grad(zp, 200.0, lam, 50.0)
                vm, _ = problem.al_value_grad(zm, 200.0, lam, 50.0)
                num[i] = (vp - vm) / (2 * h)
            np.testing.assert_allclose(grad, num, rtol=2e-4, atol=2e-4)


class TestDesign:
    def test_target3_bracket(self, locus):
        target = blue_target_preset(3)
        result = design_constellation(target, FAST, locus)
        assert 0.0962 <= result.achieved_dmin <= 0.1019
        assert result.achieved_dmin <= dmin_upper_bound(target) + 1e-6
        assert result.constraint_residual <= FAST.constraint_tolerance
        # dominates the best published design for this target
        best_published = max(
            fx.d_min_tabulated
            for fx in TABLE1_FIXTURES.values()
            if fx.target_id == 3
        )
        assert result.achieved_dmin >= best_published - 0.005
        report = validate_against_target(result.constellation, target, locus)
        assert report.inside
        assert all(report.points_in_gamut.values())

    def test_deterministic(self, locus):
        target = blue_target_preset(3)
        a = design_constellation(target, FAST, locus)
        b = design_constellation(target, FAST, locus)
        assert a == b

    def test_seed_changes_search(self, locus):
        target = blue_target_preset(3)
        a = design_constellation(target, FAST, locus)
        b = design_constellation(
            target, OptimizerConfig(multistart_count=8, rng_seed=99), locus
        )
        # same optimum within tolerance, independent searches
        assert a.achieved_dmin == pytest.approx(b.achieved_dmin, abs=1e-4)

    def test_degenerate_disk_at_blue(self, locus):
        target = BlueTarget(FIXED_BLUE, 0.0)
        result = design_constellation(target, FAST, locus)
        assert result.achieved_dmin <= 1e-3
        assert result.constraint_residual <= FAST.constraint_tolerance
        assert xy_distance(result.constellation.x, FIXED_BLUE) <= 1e-9

    def test_degenerate_disk_pins_x(self, locus):
        center = ChromaticityPoint(0.15, 0.15)
        target = BlueTarget(center, 0.0)
        result = design_constellation(target, FAST, locus)
        assert xy_distance(result.constellation.x, center) <= 1e-9
        assert result.achieved_dmin <= xy_distance(center, FIXED_BLUE) + 1e-9

    def test_infeasible_target(self, locus):
        with pytest.raises(InfeasibleTargetError):
            design_constellation(
                BlueTarget(ChromaticityPoint(2.0, 2.0), 0.1), FAST, locus
            )

    def test_unreachable_centroid_reports_diagnostics(self):
        # disk inside the LED triangle but beyond any centroid with B fixed
        tri = led_triangle_gamut()
        target = BlueTarget(ChromaticityPoint(0.70, 0.28), 0.005)
        cfg = OptimizerConfig(multistart_count=3, max_iterations=60, rng_seed=0)
        with pytest.raises(ConvergenceError) as err:
            design_constellation(target, cfg, tri)
        assert len(err.value.diagnostics) == 3

    def test_labels_canonical(self, locus):
        result = design_constellation(blue_target_preset(3), FAST, locus)
        assert result.constellation.r.x >= result.constellation.g.x


class TestConfigValidation:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            OptimizerConfig(multistart_count=0)
        with pytest.raises(ValueError):
            OptimizerConfig(constraint_tolerance=0.0)
        with pytest.raises(ValueError):
            OptimizerConfig(penalty_growth=1.0)
