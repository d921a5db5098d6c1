import math

import numpy as np
import pandas as pd
import pytest

from pml_select.errors import DomainError, NumericFailure
from pml_select.numerics import QuadratureRule, gauss_legendre
from pml_select.objective import (
    ObjectiveSpec,
    ScanRange,
    average_reflectivity,
    baseline_search,
    initial_point,
    make_objective,
    map_ordered,
    optimize_profile,
    scan2d,
    scan_summary,
    sweep_table,
    theta_sweep,
)
from pml_select.optimizer import PENALTY, SimplexConfig, Termination
from pml_select.profiles import Family, Power, RationalMinus, format_profile
from pml_select.published import (
    BASELINE_AVG_R,
    RATIONAL_MINUS_OPTIMA,
    RATIONAL_PLUS_OPTIMA,
    comparison_profiles,
)
from pml_select.reflectivity import HALF_PI, GridSpec, Sampling


def _within(value, target, rel):
    return abs(value - target) <= rel * target


# ==================== AVERAGE REFLECTIVITY ====================

def test_lossless_profile_averages_to_one(objective_spec):
    profile = Power(S=0.0, p=3)
    assert average_reflectivity(profile, objective_spec(profile)) == pytest.approx(1.0, abs=1e-9)


def test_baseline_calibration(quad):
    # at least one sampling mode must land on the reported value
    values = []
    for mode in Sampling:
        grid = GridSpec(sampling=mode)
        spec = ObjectiveSpec(grid=grid, quad=quad, family=Family.POWER, p=3)
        values.append(average_reflectivity(Power(S=100.4, p=3), spec))
    assert any(_within(v, BASELINE_AVG_R, 0.15) for v in values), values


def test_default_sampling_reproduces_baseline(baseline_profile, objective_spec):
    value = average_reflectivity(baseline_profile, objective_spec(baseline_profile))
    assert _within(value, BASELINE_AVG_R, 0.15), value


@pytest.mark.parametrize("p", [2, 5, 8])
def test_published_rational_minus_optima(p, objective_spec):
    row = RATIONAL_MINUS_OPTIMA[p]
    value = average_reflectivity(row.profile, objective_spec(row.profile))
    assert _within(value, row.avg_R, 0.15), value


@pytest.mark.parametrize("p", [2, 3, 5])
def test_published_rational_plus_optima(p, objective_spec):
    row = RATIONAL_PLUS_OPTIMA[p]
    value = average_reflectivity(row.profile, objective_spec(row.profile))
    assert _within(value, row.avg_R, 0.15), value


def test_quadrature_refinement_is_stable(grid):
    coarse = gauss_legendre(100, 0.0, HALF_PI)
    fine = gauss_legendre(200, 0.0, HALF_PI)
    for p, row in RATIONAL_MINUS_OPTIMA.items():
        a = average_reflectivity(row.profile, ObjectiveSpec(grid, coarse, row.family, p))
        b = average_reflectivity(row.profile, ObjectiveSpec(grid, fine, row.family, p))
        assert abs(a - b) < 1e-3 * b, p


def test_average_is_bounded_and_deterministic(objective_spec):
    rng = np.random.default_rng(11)
    for _ in range(10):
        profile = RationalMinus(a2=rng.uniform(0, 60), ap=rng.uniform(0, 300), p=int(rng.integers(3, 12)))
        spec = objective_spec(profile)
        first = average_reflectivity(profile, spec)
        assert 0.0 <= first <= 1.0
        assert average_reflectivity(profile, spec) == first


def test_quadrature_must_avoid_endpoints(grid):
    bad = QuadratureRule(nodes=np.array([0.0, 1.0]), weights=np.array([0.5, 0.5]), a=0.0, b=HALF_PI)
    with pytest.raises(DomainError):
        ObjectiveSpec(grid=grid, quad=bad)
    with pytest.raises(DomainError):
        ObjectiveSpec(grid=grid, quad=gauss_legendre(4, 0.0, math.pi))


def test_objective_ignores_signs_and_penalizes_bad_vectors(grid, quad):
    spec = ObjectiveSpec(grid=grid, quad=quad, family=Family.RATIONAL_MINUS, p=5)
    objective = make_objective(spec)
    assert objective(np.array([-23.6, 35.9])) == objective(np.array([23.6, 35.9]))
    assert objective(np.array([23.6, 35.9, 1.0])) == PENALTY
    assert objective(np.array([np.inf, 35.9])) == PENALTY


def test_unresolvable_grid_is_penalized(quad):
    spec = ObjectiveSpec(grid=GridSpec(h=1.0), quad=quad, family=Family.POWER, p=3)
    assert make_objective(spec)(np.array([50.0])) == PENALTY


def test_initial_points():
    assert initial_point(Family.RATIONAL_MINUS, 5) == (0.0, 50.0)
    assert initial_point(Family.RATIONAL_MINUS, 2) == (50.0,)
    assert initial_point(Family.RATIONAL_PLUS, 4) == (0.0, 0.0, 50.0)
    assert initial_point(Family.POWER, 3) == (50.0,)
    assert initial_point(Family.LEGACY, 3) == (50.0,)


def test_short_optimization_reports_absolute_coefficients(grid):
    quad = gauss_legendre(20, 0.0, HALF_PI)
    optimum = optimize_profile(Family.RATIONAL_MINUS, 4, grid, quad, SimplexConfig(max_evals=30))
    assert optimum.result.evals >= 30 or optimum.result.termination is Termination.CONVERGED
    assert all(c >= 0 for c in optimum.coefficients.values)
    spec = ObjectiveSpec(grid=grid, quad=quad, family=Family.RATIONAL_MINUS, p=4)
    assert average_reflectivity(optimum.profile, spec) == optimum.avg_reflectivity
    assert optimum.avg_reflectivity < 1.0


# ==================== SWEEPS ====================

def test_lossless_sweep_is_flat(grid):
    rows = theta_sweep(Power(S=0.0, p=2), grid, 25, 0.001, 1.0)
    assert len(rows) == 25
    assert rows[0].theta_frac == pytest.approx(0.001)
    assert rows[-1].theta_frac == 1.0
    np.testing.assert_allclose([r.abs_R for r in rows], 1.0, atol=1e-10)


def test_sweep_range_is_validated(grid):
    with pytest.raises(DomainError):
        theta_sweep(Power(S=0.0, p=2), grid, 1, 0.1, 1.0)
    with pytest.raises(DomainError):
        theta_sweep(Power(S=0.0, p=2), grid, 10, 0.0, 1.0)
    with pytest.raises(DomainError):
        theta_sweep(Power(S=0.0, p=2), grid, 10, 0.5, 0.4)


def test_rational_minus_p8_leads_the_figure_sweeps(grid):
    named = [(format_profile(p), p) for p in comparison_profiles()]
    p8 = format_profile(RATIONAL_MINUS_OPTIMA[8].profile)

    wide = sweep_table(named, grid, 500, 0.001, 1.0)
    assert list(wide.columns) == ["theta_frac"] + [name for name, _ in named]
    upper = wide[wide["theta_frac"] > 0.3].drop(columns="theta_frac").mean()
    assert upper.idxmin() == p8

    small = sweep_table(named, grid, 200, 0.0005, 0.005).drop(columns="theta_frac")
    assert small.mean().idxmin() == p8


# ==================== 2-D SCAN ====================

def test_scan_axis_inserts_marker():
    axis = ScanRange(0.0, 50.0, 11).axis(23.3)
    assert 23.3 in axis
    assert len(axis) == 12
    assert np.all(np.diff(axis) > 0)
    assert len(ScanRange(0.0, 50.0, 11).axis(80.0)) == 11
    with pytest.raises(DomainError):
        ScanRange(1.0, 1.0, 5)


def test_scan_corner_and_sign_symmetry(grid):
    spec = ObjectiveSpec(grid=grid, quad=gauss_legendre(16, 0.0, HALF_PI), p=8)
    positive = scan2d(8, ScanRange(0.0, 30.0, 2), ScanRange(0.0, 100.0, 2), spec, marker=None)
    negative = scan2d(8, ScanRange(-30.0, 0.0, 2), ScanRange(0.0, 100.0, 2), spec, marker=None)

    assert list(positive.columns) == ["a2", "ap", "avg_R"]
    assert positive[["a2", "ap"]].values.tolist() == [[0.0, 0.0], [0.0, 100.0], [30.0, 0.0], [30.0, 100.0]]
    assert positive["avg_R"].iloc[0] == pytest.approx(1.0, abs=1e-9)

    mirrored = negative.assign(a2=negative["a2"].abs()).sort_values(["a2", "ap"]).reset_index(drop=True)
    np.testing.assert_array_equal(mirrored["avg_R"].values, positive["avg_R"].values)


def test_scan_needs_two_coefficient_family(grid, quad):
    spec = ObjectiveSpec(grid=grid, quad=quad, p=2)
    with pytest.raises(DomainError):
        scan2d(2, ScanRange(0.0, 1.0, 2), ScanRange(0.0, 1.0, 2), spec)


def test_scan_summary_reports_marker_ratio():
    frame = pd.DataFrame({"a2": [0.0, 1.0, 1.0], "ap": [0.0, 0.0, 2.0], "avg_R": [1.0, 0.5, 0.25]})
    summary = scan_summary(frame, (1.0, 0.0))
    assert summary["min_a2"] == 1.0 and summary["min_ap"] == 2.0
    assert summary["marker_avg_R"] == 0.5
    assert summary["marker_to_min_ratio"] == 2.0
    assert "marker_avg_R" not in scan_summary(frame, None)


def test_scan_summary_rejects_a_scan_with_no_valid_cell():
    frame = pd.DataFrame({"a2": [0.0, 1.0], "ap": [0.0, 0.0], "avg_R": [math.nan, math.nan]})
    with pytest.raises(NumericFailure) as excinfo:
        scan_summary(frame, (1.0, 0.0))
    assert excinfo.value.exit_code == 3


def test_parallel_map_keeps_order():
    items = list(range(-20, 0))
    assert map_ordered(abs, items, workers=2) == [abs(i) for i in items]
    assert map_ordered(abs, items, workers=1) == [abs(i) for i in items]


@pytest.mark.slow
def test_marked_optimum_sits_near_scan_minimum(grid, quad):
    spec = ObjectiveSpec(grid=grid, quad=quad, p=8)
    frame = scan2d(8, ScanRange(0.0, 50.0, 101), ScanRange(0.0, 300.0, 101), spec, workers=2)
    summary = scan_summary(frame, (23.3, 121.3))
    assert summary["marker_to_min_ratio"] <= 1.05
    assert _within(summary["marker_avg_R"], 0.0037, 0.15)


# ==================== OPTIMIZATION RUNS ====================

@pytest.mark.slow
@pytest.mark.parametrize("p, bound", [(5, 0.0055), (8, 0.0043)])
def test_rational_minus_optimization(p, bound, grid, quad):
    optimum = optimize_profile(Family.RATIONAL_MINUS, p, grid, quad)
    assert optimum.avg_reflectivity <= bound
    assert optimum.result.evals <= 2000 + 3


@pytest.mark.slow
def test_rational_plus_optimization(grid, quad):
    optimum = optimize_profile(Family.RATIONAL_PLUS, 4, grid, quad)
    assert optimum.avg_reflectivity <= 0.0105


@pytest.mark.slow
def test_power_baseline_selects_cubic(grid, quad):
    best, runs = baseline_search(grid, quad)
    assert [r.p for r in runs] == [2, 3, 4, 5]
    assert best.p == 3
    assert _within(best.avg_reflectivity, BASELINE_AVG_R, 0.15)
