import cmath
import math

import numpy as np
import pytest

from pml_select.errors import DomainError, UnresolvableWave
from pml_select.numerics import solve_dense
from pml_select.profiles import Power, RationalMinus, RationalPlus
from pml_select.reflectivity import (
    HALF_PI,
    GridSpec,
    Incidence,
    Sampling,
    assemble_system,
    discrete_wavenumber,
    reflection,
    reflection_coefficients,
    reflection_oracle,
)


def _random_profile(rng):
    kind = rng.integers(3)
    if kind == 0:
        return Power(S=rng.uniform(0.0, 200.0), p=int(rng.integers(2, 7)))
    if kind == 1:
        p = int(rng.integers(2, 7))
        return RationalPlus(coeffs=tuple(rng.uniform(0.0, 100.0, size=p - 1)), p=p)
    p = int(rng.integers(2, 11))
    ap = rng.uniform(0.0, 200.0) if p > 2 else 0.0
    return RationalMinus(a2=rng.uniform(0.0, 50.0), ap=ap, p=p)


# ==================== DISCRETE DISPERSION ====================

def test_discrete_wavenumber_values():
    assert discrete_wavenumber(0.0, 0.05) == 0.0
    expected = 40.0 * math.asin(0.05 * math.pi)
    ah = discrete_wavenumber(2.0 * math.pi, 0.05)
    assert ah == pytest.approx(expected, rel=1e-15)
    assert ah == pytest.approx(6.29351, abs=1e-5)
    residual = (2.0 - 2.0 * math.cos(ah * 0.05)) / 0.05 ** 2 - (2.0 * math.pi) ** 2
    assert abs(residual) < 1e-10


def test_discrete_wavenumber_matches_series_for_small_alpha_h():
    alpha, h = 1.0, 1e-3
    series = alpha * (1.0 + (alpha * h) ** 2 / 24.0)
    assert discrete_wavenumber(alpha, h) == pytest.approx(series, rel=1e-12)


def test_unresolvable_wave():
    with pytest.raises(UnresolvableWave):
        discrete_wavenumber(50.0, 0.05)
    with pytest.raises(UnresolvableWave):
        Incidence.from_angle(HALF_PI, GridSpec(h=1.0))


def test_incidence_angle_convention(grid):
    normal = Incidence.from_angle(HALF_PI, grid)
    assert normal.alpha == pytest.approx(2.0 * math.pi)
    assert normal.beta == pytest.approx(0.0, abs=1e-12)
    grazing = Incidence.from_angle(1e-3, grid)
    assert grazing.alpha < 1e-2
    for bad in (0.0, -0.1, HALF_PI + 1e-9, float("nan")):
        with pytest.raises(DomainError):
            Incidence.from_angle(bad, grid)


# ==================== BORDERED SYSTEM ====================

def test_system_shape_and_pivots(grid):
    profile = RationalPlus(coeffs=(74.2,), p=2)
    system = assemble_system(profile, grid, Incidence.from_angle(math.pi / 4, grid))
    assert system.dimension == grid.m + 1
    x = solve_dense(system)
    assert system.residual(x) < 1e-12


def test_lossless_layer_reflects_totally(grid):
    thetas = np.linspace(0.01, HALF_PI, 50)
    R = reflection_coefficients(Power(S=0.0, p=2), grid, thetas)
    np.testing.assert_allclose(np.abs(R), 1.0, atol=1e-10)


def test_one_cell_layer_matches_hand_elimination():
    grid = GridSpec(m=1, h=0.05)
    profile = Power(S=3.0, p=2)
    theta = 0.7
    inc = Incidence.from_angle(theta, grid)

    # node 1 sits on the interface (tau = 0), the only cell centre at tau = 1/2
    s_cell = 1.0 + 1j * 3.0 * 0.25
    lower, upper = 1.0 / s_cell, 1.0
    d = -(lower + upper) + (inc.alpha * grid.h) ** 2
    phase = inc.alpha_hat * grid.h
    # u1 = 1 + R, and d u1 + upper (e^{-i phase} + R e^{i phase}) = 0
    R_hand = -(d + upper * cmath.exp(-1j * phase)) / (d + upper * cmath.exp(1j * phase))

    assert reflection(profile, grid, theta).R == pytest.approx(R_hand, rel=1e-13)
    assert reflection_oracle(profile, grid, theta).R == pytest.approx(R_hand, rel=1e-13)


def test_bordered_solve_agrees_with_shooting():
    rng = np.random.default_rng(20240501)
    for _ in range(200):
        profile = _random_profile(rng)
        grid = GridSpec(m=int(rng.choice([3, 5, 8])))
        theta = rng.uniform(0.05, HALF_PI)
        direct = reflection(profile, grid, theta).R
        oracle = reflection_oracle(profile, grid, theta).R
        # relative where |R| is not tiny; both methods lose digits near zeros of R
        assert abs(direct - oracle) <= 1e-10 * max(abs(oracle), 1e-2), (profile, theta)


def test_shooting_agrees_on_published_profile(grid, rminus_optimum):
    profile = rminus_optimum(5)
    thetas = np.linspace(0.02, HALF_PI, 50)
    direct = reflection_coefficients(profile, grid, thetas)
    for theta, R in zip(thetas, direct):
        assert reflection_oracle(profile, grid, theta).R == pytest.approx(R, rel=1e-10, abs=1e-12)


def test_layer_is_passive():
    rng = np.random.default_rng(7)
    thetas = np.linspace(0.005, HALF_PI, 40)
    for _ in range(30):
        R = reflection_coefficients(_random_profile(rng), GridSpec(), thetas)
        assert np.all(np.abs(R) <= 1.0 + 1e-12)


def test_reference_shift_changes_phase_only(grid, rminus_optimum):
    profile = rminus_optimum(8)
    thetas = np.array([0.1, 0.6, 1.2, HALF_PI])
    R0 = reflection_coefficients(profile, grid, thetas)
    Rc = reflection_coefficients(profile, grid, thetas, reference_shift=0.5)
    np.testing.assert_allclose(np.abs(Rc), np.abs(R0), rtol=1e-12)
    alpha_hat = discrete_wavenumber(grid.wavenumber * np.sin(thetas), grid.h)
    np.testing.assert_allclose(Rc, R0 * np.exp(1j * alpha_hat * grid.h), rtol=1e-11)


def test_cell_average_sampling_differs_but_stays_close(grid, baseline_profile):
    averaged = GridSpec(sampling=Sampling.CELL_AVERAGE)
    r_mid = reflection(baseline_profile, grid, 0.8).abs_R
    r_avg = reflection(baseline_profile, averaged, 0.8).abs_R
    assert r_mid != r_avg
    assert abs(r_mid - r_avg) < 0.05


def test_second_order_refinement_at_normal_incidence():
    thickness = 0.25
    profile = Power(S=5.0, p=2)
    values = [
        reflection(profile, GridSpec(h=thickness / m, m=m), HALF_PI).abs_R
        for m in (40, 80, 160)
    ]
    ratio = abs(values[0] - values[1]) / abs(values[1] - values[2])
    assert 3.0 <= ratio <= 5.0
