import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import sici

from spectral_sums import (
    BandFilter,
    GridFunction,
    analyze,
    apply_multiplier,
    band_projector,
    build_dirichlet_1d,
    log_weighted_norm,
    maximal_function,
    partial_sum,
    synthesize,
)
from spectral_sums.errors import DomainError, StructuralError
from spectral_sums.grid import uniform_grid
from spectral_sums.spectral import (
    SpectralCoefficients,
    coefficients_csv,
    coefficients_from_modes,
    parse_coefficients_csv,
    random_coefficients,
    synthesis_csv,
)


def modes(model, **weights):
    return coefficients_from_modes(model, {int(k[1:]) - 1: w for k, w in weights.items()})


# -- analyze ---------------------------------------------------------------------


def test_analyze_single_mode(dirichlet64):
    c = analyze(dirichlet64, dirichlet64.eigenfunction(1))
    assert abs(c.coeffs[1] - 1.0) < 1e-7
    assert np.max(np.abs(np.delete(c.coeffs, 1))) < 1e-7


def test_analyze_zero(dirichlet64):
    c = analyze(dirichlet64, GridFunction(dirichlet64.grid, np.zeros(len(dirichlet64.grid))))
    assert not np.any(c.coeffs)


def test_analyze_parabola_against_fine_quadrature(dirichlet64):
    x = dirichlet64.grid.points
    c = analyze(dirichlet64, GridFunction(dirichlet64.grid, x * (math.pi - x)))
    # oracle: trapezoid at 2^16 points, independent of the model grid
    xf = np.linspace(0.0, math.pi, 2 ** 16 + 1)
    w = np.full(xf.size, xf[1] - xf[0])
    w[[0, -1]] /= 2
    k = np.arange(1, 65)
    phi = math.sqrt(2 / math.pi) * np.sin(np.outer(xf, k))
    oracle = phi.T @ (w * xf * (math.pi - xf))
    assert np.max(np.abs(c.coeffs - oracle)) < 1e-6
    # closed form sqrt(2/pi) * 4 / k^3 for odd k, zero for even k
    closed = np.where(k % 2 == 1, math.sqrt(2 / math.pi) * 4 / k ** 3, 0.0)
    assert np.max(np.abs(c.coeffs - closed)) < 1e-6
    assert np.max(np.abs(c.coeffs[1::2])) < 1e-6


def test_analyze_grid_mismatch(dirichlet64):
    g = uniform_grid(0.0, math.pi, 101)
    with pytest.raises(StructuralError):
        analyze(dirichlet64, GridFunction(g, np.ones(101)))


# -- partial sums -------------------------------------------------------------------


def test_partial_sum_inclusive_threshold(dirichlet64):
    c = modes(dirichlet64, k3=1.0)
    assert not np.any(partial_sum(c, 8.99).values)
    np.testing.assert_array_equal(partial_sum(c, 9.0).values, dirichlet64.basis[:, 2])


def test_partial_sum_two_modes(dirichlet64):
    c = modes(dirichlet64, k1=1.0, k2=1.0)
    np.testing.assert_array_equal(partial_sum(c, 2.0).values, dirichlet64.basis[:, 0])


def test_partial_sum_negative_R(dirichlet64):
    with pytest.raises(DomainError):
        partial_sum(modes(dirichlet64, k1=1.0), -1.0)


def _sign_coefficients(k):
    # <sign(x - pi/2), sqrt(2/pi) sin kx> in closed form
    return math.sqrt(2 / math.pi) * (2 * np.cos(k * math.pi / 2) - 1 - np.cos(k * math.pi)) / k


def test_gibbs_overshoot(dirichlet64):
    x = dirichlet64.grid.points
    c = analyze(dirichlet64, GridFunction(dirichlet64.grid, np.sign(x - math.pi / 2)))
    peak = float(np.max(np.abs(partial_sum(c, 400.0).values)))
    # oracle 1: exact coefficients summed for the same 20 modes on a dense grid
    k = np.arange(1, 21)
    xx = np.linspace(0.0, math.pi, 200001)
    dense = (math.sqrt(2 / math.pi) * np.sin(np.outer(xx, k))) @ _sign_coefficients(k)
    assert abs(peak - np.max(np.abs(dense))) < 1e-3
    # oracle 2: the 10^4-mode sum near the jump approaches (2/pi) Si(pi)
    K = np.arange(1, 10001)
    bK = _sign_coefficients(K)
    t = math.pi / 2 + np.linspace(1e-5, 2e-3, 400)
    big = np.sin(np.outer(t, K)) @ (math.sqrt(2 / math.pi) * bK)
    gibbs = 2 / math.pi * sici(math.pi)[0]
    assert abs(np.max(big) - gibbs) < 1e-5
    assert abs(peak - gibbs) < 5e-3
    # relative to the jump of 2 the overshoot is the familiar ~8.95%
    assert abs((peak - 1.0) / 2.0 - 0.0895) < 3e-3


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1000), st.integers(1, 63))
def test_partial_sum_constant_between_eigenvalues(seed, k):
    model = _SMALL
    c = random_coefficients(model, seed)
    lo, hi = model.eigenvalues[k - 1], model.eigenvalues[k]
    mid = 0.5 * (lo + hi)
    np.testing.assert_array_equal(partial_sum(c, lo).values, partial_sum(c, mid).values)
    np.testing.assert_array_equal(partial_sum(c, mid).values, partial_sum(c, np.nextafter(hi, 0)).values)


_SMALL = build_dirichlet_1d(math.pi, 64, n_points=513)


# -- multipliers ------------------------------------------------------------------------


def test_multiplier_identity(dirichlet64):
    c = random_coefficients(dirichlet64, 3)
    out = apply_multiplier(c, BandFilter.everywhere(np.ones_like))
    np.testing.assert_array_equal(out.coeffs, c.coeffs)


def test_multiplier_root_order(dirichlet64):
    c = random_coefficients(dirichlet64, 3)
    out = apply_multiplier(c, BandFilter.indicator(0.0, 5.0, 2))
    kept = np.flatnonzero(out.coeffs)
    assert kept.tolist() == [0, 1, 2, 3, 4]


def test_multiplier_heat(dirichlet64):
    c = modes(dirichlet64, k1=1.0, k2=1.0)
    out = apply_multiplier(c, BandFilter.everywhere(lambda t: np.exp(-t)))
    assert out.coeffs[0] == pytest.approx(math.exp(-1), rel=1e-15)
    assert out.coeffs[1] == pytest.approx(math.exp(-4), rel=1e-15)
    assert not np.any(out.coeffs[2:])


def test_indicator_multiplier_recovers_partial_sum(dirichlet64):
    c = random_coefficients(dirichlet64, 5)
    via_f = synthesize(apply_multiplier(c, BandFilter.indicator(0.0, 30.0)))
    np.testing.assert_allclose(via_f.values, partial_sum(c, 30.0).values, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.01, 2.0), st.floats(-1.0, 1.0))
def test_multiplicativity(seed, s, p):
    c = random_coefficients(_SMALL, seed)
    F1 = BandFilter.everywhere(lambda t: np.exp(-s * t))
    F2 = BandFilter.everywhere(lambda t: np.cos(p * t))
    both = BandFilter.everywhere(lambda t: np.exp(-s * t) * np.cos(p * t))
    np.testing.assert_allclose(
        apply_multiplier(apply_multiplier(c, F1), F2).coeffs, apply_multiplier(c, both).coeffs, rtol=1e-12, atol=1e-300
    )


def test_scaled_l2_norm_of_band_indicator():
    F = BandFilter.indicator(16 / 4, 16.0)
    assert F.scaled_l2_norm(16.0) == pytest.approx(math.sqrt(3) / 2, rel=1e-12)


# -- maximal function ---------------------------------------------------------------


def test_maximal_single_mode(dirichlet64):
    c = modes(dirichlet64, k5=-2.5)
    np.testing.assert_array_equal(
        maximal_function(c, dirichlet64.eigenvalues[-1]).values, np.abs(-2.5 * dirichlet64.basis[:, 4])
    )


def test_maximal_two_modes(dirichlet64):
    c = modes(dirichlet64, k1=1.0, k2=1.0)
    p1 = dirichlet64.basis[:, 0]
    p12 = np.zeros_like(p1) + 1.0 * p1 + 1.0 * dirichlet64.basis[:, 1]
    expected = np.maximum(np.abs(p1), np.abs(p12))
    np.testing.assert_array_equal(maximal_function(c, 100.0).values, expected)


def _dense_sweep_oracle(c, R_max, n_thresholds=4096):
    """max over S_R f for R on a dense sweep that contains every eigenvalue <= R_max."""
    sweep = np.union1d(np.linspace(0.0, R_max, n_thresholds), c.model.eigenvalues[c.model.eigenvalues <= R_max])
    best = np.zeros(len(c.model.grid))
    for R in sweep:
        best = np.maximum(best, np.abs(partial_sum(c, R).values))
    return best


def test_maximal_matches_dense_sweep_seed7(dirichlet64):
    c = random_coefficients(dirichlet64, 7)
    R_max = float(dirichlet64.eigenvalues[-1])
    np.testing.assert_array_equal(maximal_function(c, R_max).values, _dense_sweep_oracle(c, R_max))


def test_maximal_rejects_small_rmax(dirichlet64):
    with pytest.raises(DomainError):
        maximal_function(modes(dirichlet64, k1=1.0), 0.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.0, 4096.0))
def test_maximal_dominates_partial_sums(seed, R):
    c = random_coefficients(_SMALL, seed)
    M = maximal_function(c, float(_SMALL.eigenvalues[-1])).values
    assert np.all(M >= np.abs(partial_sum(c, R).values))


# -- projectors and norms ---------------------------------------------------------------


def test_band_projector_examples(dirichlet64):
    c = random_coefficients(dirichlet64, 11)
    np.testing.assert_array_equal(band_projector(c, 0.0, dirichlet64.eigenvalues[-1]).coeffs, c.coeffs)
    kept = np.flatnonzero(band_projector(c, 1.0, 4.0).coeffs)
    assert kept.tolist() == [1]
    with pytest.raises(DomainError):
        band_projector(c, 2.0, 1.0)


def test_band_projectors_tile(dirichlet64):
    c = random_coefficients(dirichlet64, 11)
    edges = np.concatenate([[0.0], np.arange(1, 70) ** 2.0, [5000.0]])
    total = np.zeros_like(c.coeffs)
    for lo, hi in zip(edges[:-1], edges[1:]):
        total = total + band_projector(c, lo, hi).coeffs
    np.testing.assert_array_equal(total, c.coeffs)


def test_log_weighted_norm_examples(dirichlet64):
    assert log_weighted_norm(modes(dirichlet64, k3=1.0)) == pytest.approx(math.log(11), rel=1e-15)
    assert log_weighted_norm(SpectralCoefficients(dirichlet64, np.zeros(64))) == 0.0
    two = log_weighted_norm(modes(dirichlet64, k1=1.0, k2=1.0))
    assert two == pytest.approx(math.sqrt(math.log(3) ** 2 + math.log(6) ** 2), rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.0, 3.0))
def test_log_norm_lower_bound(seed, decay):
    c = random_coefficients(_SMALL, seed, decay)
    assert log_weighted_norm(c) >= math.log(2) * c.norm()


# -- Parseval ---------------------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_parseval_in_span(seed):
    c = random_coefficients(_SMALL, seed)
    f = synthesize(c)
    back = analyze(_SMALL, f)
    assert abs(back.norm() - f.norm()) <= 1e-8 * max(1.0, f.norm())
    np.testing.assert_allclose(back.coeffs, c.coeffs, atol=1e-8)


def test_bessel_outside_span(dirichlet64):
    x = dirichlet64.grid.points
    f = GridFunction(dirichlet64.grid, np.exp(x))
    c = analyze(dirichlet64, f)
    assert synthesize(c).norm() <= f.norm()


# -- CSV -----------------------------------------------------------------------------


def test_coefficient_csv_roundtrip(dirichlet64):
    c = random_coefficients(dirichlet64, 2)
    text = coefficients_csv(c)
    assert text.splitlines()[0] == "k,i,lambda,coefficient"
    np.testing.assert_array_equal(parse_coefficients_csv(text, dirichlet64).coeffs, c.coeffs)


def test_synthesis_csv_header(dirichlet64):
    text = synthesis_csv(synthesize(modes(dirichlet64, k1=1.0)))
    lines = text.splitlines()
    assert lines[0] == "x,value"
    assert len(lines) == len(dirichlet64.grid) + 1


def test_random_coefficients_deterministic(dirichlet64):
    a = random_coefficients(dirichlet64, 9, trial=4)
    b = random_coefficients(dirichlet64, 9, trial=4)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert not np.array_equal(a.coeffs, random_coefficients(dirichlet64, 9, trial=5).coeffs)
