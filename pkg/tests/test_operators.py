import math

import numpy as np
import pytest

from spectral_sums import (
    PotentialSpec,
    build_dirichlet_1d,
    build_hermite_1d,
    build_schrodinger_fd,
    validate_growth_conditions,
)
from spectral_sums.checks import weyl_count
from spectral_sums.errors import ConfigurationError, DomainError, StructuralError
from spectral_sums.grid import uniform_grid
from spectral_sums.operators import (
    SpectralModel,
    ball_potential,
    constant_potential,
    export_model,
    gram_defect,
    harmonic_potential,
    hermite_box,
    hermite_functions,
    import_model,
    inverse_square_potential,
    merge_eigenvalues,
    power_potential,
    zero_potential,
)


def test_dirichlet_three_modes():
    m = build_dirichlet_1d(math.pi, 3)
    assert m.eigenvalues.tolist() == [1.0, 4.0, 9.0]
    assert gram_defect(m.grid, m.basis) <= 5e-7
    assert weyl_count(m, 10.0) == 3


def test_dirichlet_other_length():
    m = build_dirichlet_1d(2.0, 4)
    np.testing.assert_allclose(m.eigenvalues, (np.arange(1, 5) * math.pi / 2) ** 2, rtol=1e-15)
    assert gram_defect(m.grid, m.basis) <= 5e-7


def test_resolution_guards():
    with pytest.raises(ConfigurationError):
        build_dirichlet_1d(math.pi, 64, n_points=500)
    with pytest.raises(ConfigurationError):
        build_hermite_1d(64, n_points=1000)
    with pytest.raises(ConfigurationError):
        build_schrodinger_fd(zero_potential(), (0, math.pi), 100, 25)


def test_hermite_five_modes():
    m = build_hermite_1d(5)
    assert m.eigenvalues.tolist() == [1.0, 3.0, 5.0, 7.0, 9.0]
    x = m.grid.points
    h0 = m.basis[:, 0]
    ratio = h0 / np.exp(-x ** 2 / 2)
    assert np.allclose(ratio, ratio[len(ratio) // 2], rtol=1e-12)
    assert abs(m.eigenfunction(0).norm() - 1.0) < 1e-6
    k = np.arange(5)
    assert np.all(k + 1 <= (2 * k + 1) ** 1)


def test_hermite_norms_up_to_256():
    n = 257
    grid = uniform_grid(-hermite_box(n), hermite_box(n), 16 * n + 1)
    H = hermite_functions(grid.points, n)
    norms = np.sqrt(grid.weights @ H ** 2)
    assert np.max(np.abs(norms - 1.0)) < 1e-6


def test_hermite_recurrence_matches_polynomials():
    from numpy.polynomial.hermite import hermval

    x = np.linspace(-4, 4, 41)
    H = hermite_functions(x, 8)
    for k in range(8):
        coef = np.zeros(k + 1)
        coef[k] = 1.0
        ref = hermval(x, coef) * np.exp(-x ** 2 / 2) / math.sqrt(2 ** k * math.factorial(k) * math.sqrt(math.pi))
        np.testing.assert_allclose(H[:, k], ref, atol=1e-13)


def _fd_formula(k, n_points, length=math.pi):
    h = length / (n_points - 1)
    return (2 - 2 * np.cos(k * h)) / h ** 2


def test_fd_free_matches_dirichlet():
    m = build_schrodinger_fd(zero_potential(), (0.0, math.pi), 2048, 3)
    assert np.max(np.abs(m.eigenvalues - [1, 4, 9])) < 5e-3
    # exact discrete comparison
    np.testing.assert_allclose(m.eigenvalues, _fd_formula(np.arange(1, 4), 2048), rtol=1e-10)


def test_fd_harmonic():
    m = build_schrodinger_fd(harmonic_potential(), (-12.0, 12.0), 4096, 5)
    assert np.max(np.abs(m.eigenvalues - [1, 3, 5, 7, 9])) < 1e-2


def test_fd_inverse_square_positive_increasing():
    V = inverse_square_potential(1.0, dimension=1)
    m = build_schrodinger_fd(V, (1e-3, 1.0), 2048, 6)
    assert np.all(m.eigenvalues > 0)
    assert np.all(np.diff(m.eigenvalues) > 0)
    assert m.metadata["sigma"] == 0.0


def test_fd_order_h2():
    errs = []
    for n in (513, 1025, 2049):
        m = build_schrodinger_fd(zero_potential(), (0.0, math.pi), n, 3)
        errs.append(np.abs(m.eigenvalues - [1, 4, 9]))
    errs = np.array(errs)
    orders = np.log2(errs[:-1] / errs[1:])
    assert np.all((orders >= 1.8) & (orders <= 2.2)), orders


def test_fd_rejects_singular_node():
    V = PotentialSpec(lambda x: 1.0 / x, name="1/x")
    with pytest.raises(DomainError):
        build_schrodinger_fd(V, (-1.0, 1.0), 101, 3)


def test_fd_rejects_multidimensional_potential():
    with pytest.raises(ConfigurationError):
        build_schrodinger_fd(harmonic_potential(3), (-5, 5), 1001, 3)


def test_merge_eigenvalues():
    vals = np.array([1.0, 1.0 + 1e-12, 2.0, 3.0, 3.0 + 1e-11, 3.0 + 2e-11])
    distinct, mult = merge_eigenvalues(vals, 1e-9)
    assert mult.tolist() == [2, 1, 3]
    assert distinct[0] == pytest.approx(1.0, abs=1e-12)


def test_model_with_multiplicity():
    grid = uniform_grid(0.0, math.pi, 1025)
    x = grid.points
    basis = math.sqrt(2 / math.pi) * np.column_stack([np.sin(x), np.sin(2 * x), np.sin(3 * x)])
    m = SpectralModel(grid, np.array([1.0, 4.0]), basis, np.array([1, 2]))
    assert m.n_distinct == 2 and m.n_functions == 3
    assert len(m.eigenspace(1)) == 2
    assert m.column_eigenvalues.tolist() == [1.0, 4.0, 4.0]
    assert weyl_count(m, 4.0) == 3


def test_model_invariants():
    grid = uniform_grid(0.0, math.pi, 1025)
    x = grid.points
    basis = np.column_stack([np.sin(x), np.sin(2 * x)])  # not normalized
    with pytest.raises(StructuralError):
        SpectralModel(grid, np.array([1.0, 4.0]), basis, np.array([1, 1]))
    good = basis * math.sqrt(2 / math.pi)
    with pytest.raises(StructuralError):
        SpectralModel(grid, np.array([4.0, 1.0]), good, np.array([1, 1]))
    with pytest.raises(DomainError):
        SpectralModel(grid, np.array([-1.0, 4.0]), good, np.array([1, 1]))


def test_growth_harmonic_passes():
    r = validate_growth_conditions(harmonic_potential(), (-20.0, 20.0), 4001)
    assert r.passed
    x = np.linspace(-20, 20, 4001)
    far = np.abs(x) >= 3
    oracle = np.min(x[far] ** 2 / (1 + np.abs(x[far])) ** 2)
    assert r.metadata["tightest_lower_const"] == pytest.approx(oracle, rel=1e-14)
    assert r.metadata["tightest_lower_const"] >= 0.5
    assert r.metadata["tightest_upper_const"] <= 1.0


def test_growth_bounded_and_zero_fail():
    assert not validate_growth_conditions(constant_potential(1.0), (-20, 20), 1001).passed
    assert not validate_growth_conditions(zero_potential(), (-20, 20), 1001, growth_exponent=2).passed


def test_growth_with_explicit_constants():
    V = power_potential(4)
    assert validate_growth_conditions(V, (-10, 10), 1001).passed
    # c = 1 is too greedy for x^4 against (1+|x|)^4
    assert not validate_growth_conditions(V, (-10, 10), 1001, lower_const=1.0).passed
    with pytest.raises(ConfigurationError):
        validate_growth_conditions(V, (-10, 10), 50)


def test_inverse_square_admissibility():
    with pytest.raises(ConfigurationError):
        inverse_square_potential(-0.25, dimension=3)
    V = inverse_square_potential(-0.2, dimension=3)
    assert V.sigma == pytest.approx(0.5 - math.sqrt(0.05))
    assert V.p_star == pytest.approx(3 / V.sigma)
    assert inverse_square_potential(0.5, dimension=3).p_star == math.inf


def test_ball_potential_values():
    V = ball_potential(2.0, radius=1.0)
    pts = np.array([[0.0, 0.0, 0.0], [0.5, 0.5, 0.5], [1.0, 1.0, 0.0]])
    assert V(pts).tolist() == [2.0, 2.0, 0.0]


def test_export_roundtrip_bitwise():
    m = build_schrodinger_fd(harmonic_potential(), (-8.0, 8.0), 1001, 6)
    back = import_model(export_model(m))
    assert np.array_equal(back.grid.points, m.grid.points)
    assert np.array_equal(back.grid.weights, m.grid.weights)
    assert np.array_equal(back.eigenvalues, m.eigenvalues)
    assert np.array_equal(back.multiplicities, m.multiplicities)
    assert np.array_equal(back.basis, m.basis)
    assert back.label == m.label
    assert export_model(back) == export_model(m)


def test_import_rejects_garbage():
    with pytest.raises(StructuralError):
        import_model("nonsense")
