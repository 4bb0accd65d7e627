import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectral_sums import (
    GridFunction,
    Window,
    inner_product,
    norm_on_window,
    uniform_grid,
)
from spectral_sums.errors import DomainError, StructuralError


def test_constant_inner_product_is_interval_length():
    g = uniform_grid(0.0, math.pi, 1025)
    one = GridFunction(g, np.ones(len(g)))
    assert abs(inner_product(one, one) - math.pi) < 1e-12


def test_sine_modes_orthogonal():
    g = uniform_grid(0.0, math.pi, 2049)
    f = GridFunction.from_callable(g, np.sin)
    h = GridFunction.from_callable(g, lambda x: np.sin(2 * x))
    assert abs(inner_product(f, h)) < 1e-8


def test_sine_squared_integral():
    g = uniform_grid(0.0, math.pi, 1025)
    f = GridFunction.from_callable(g, np.sin)
    assert abs(inner_product(f, f) - math.pi / 2) < 1e-8


def test_full_window_norm_matches_inner_product():
    g = uniform_grid(0.0, math.pi, 1025)
    f = GridFunction.from_callable(g, lambda x: np.cos(3 * x) + x)
    assert norm_on_window(f, Window.full(g)) == pytest.approx(math.sqrt(inner_product(f, f)), rel=1e-14)


def test_left_half_window():
    # pi/2 falls between nodes, so the trapezoid cells of the left nodes tile [0, pi/2]
    g = uniform_grid(0.0, math.pi, 2048)
    one = GridFunction(g, np.ones(len(g)))
    K = Window(g.points < math.pi / 2)
    assert abs(norm_on_window(one, K) - math.sqrt(math.pi / 2)) < 1e-6


def test_interval_window_counts_midpoint_node():
    g = uniform_grid(0.0, math.pi, 1025)
    one = GridFunction(g, np.ones(len(g)))
    K = Window.interval(g, 0.0, math.pi / 2 + 1e-12)
    assert abs(norm_on_window(one, K) ** 2 - (math.pi / 2 + g.spacing / 2)) < 1e-12


def test_zero_function_has_zero_norm():
    g = uniform_grid(0.0, 1.0, 101)
    assert norm_on_window(GridFunction(g, np.zeros(101)), Window.full(g)) == 0.0


def test_errors():
    g = uniform_grid(0.0, 1.0, 11)
    with pytest.raises(DomainError):
        Window(np.zeros(11, dtype=bool))
    with pytest.raises(StructuralError):
        norm_on_window(GridFunction(g, np.ones(11)), Window(np.ones(5, dtype=bool)))
    with pytest.raises(StructuralError):
        inner_product(GridFunction(g, np.ones(11)), GridFunction(uniform_grid(0, 2, 11), np.ones(11)))
    with pytest.raises(DomainError):
        GridFunction(g, np.full(11, np.nan))
    with pytest.raises(DomainError):
        uniform_grid(1.0, 1.0, 10)


def test_grid_is_read_only():
    g = uniform_grid(0.0, 1.0, 11)
    with pytest.raises(ValueError):
        g.points[0] = 5.0


_values = st.lists(st.floats(-1e3, 1e3), min_size=16, max_size=16)


@settings(max_examples=200, deadline=None)
@given(_values, _values)
def test_cauchy_schwarz(a, b):
    g = uniform_grid(0.0, 1.0, 16)
    f, h = GridFunction(g, a), GridFunction(g, b)
    assert abs(inner_product(f, h)) <= f.norm() * h.norm() * (1 + 1e-12) + 1e-300


@settings(max_examples=200, deadline=None)
@given(_values, st.lists(st.booleans(), min_size=16, max_size=16), st.lists(st.booleans(), min_size=16, max_size=16))
def test_window_monotone(a, m1, m2):
    g = uniform_grid(0.0, 1.0, 16)
    small = np.array(m1) & np.array(m2)
    big = np.array(m1) | np.array(m2)
    if not small.any():
        small[0] = big[0] = True
    f = GridFunction(g, a)
    assert norm_on_window(f, Window(small)) <= norm_on_window(f, Window(big))


@pytest.mark.parametrize("k,j", [(1, 1), (3, 3), (2, 5), (7, 7)])
def test_trapezoid_sine_products_within_c_over_m2(k, j):
    exact = _sin_sin_exp(k, j, 0.25)
    scaled = []
    for m in (257, 513, 1025):
        g = uniform_grid(0.0, math.pi, m)
        f = GridFunction.from_callable(g, lambda x: np.sin(k * x))
        h = GridFunction.from_callable(g, lambda x: np.sin(j * x) * np.exp(x / 4))
        scaled.append(abs(inner_product(f, h) - exact) * m ** 2)
    # m^2 * error stays bounded (it decays: the integrand vanishes at both ends)
    assert scaled[1] <= scaled[0] * 1.01 and scaled[2] <= scaled[1] * 1.01
    assert scaled[0] < 1.0


@pytest.mark.parametrize("k,j", [(0, 1), (2, 3), (4, 4)])
def test_trapezoid_observed_order_two(k, j):
    exact = _cos_cos_exp(k, j, 0.25)
    errs = []
    for m in (257, 513, 1025):
        g = uniform_grid(0.0, math.pi, m)
        f = GridFunction.from_callable(g, lambda x: np.cos(k * x))
        h = GridFunction.from_callable(g, lambda x: np.cos(j * x) * np.exp(x / 4))
        errs.append(abs(inner_product(f, h) - exact))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(1.9 < p < 2.1 for p in orders), orders


def _cos_exp(w, s):
    """int_0^pi cos(wx) e^{sx} dx."""
    return (math.exp(s * math.pi) * (s * math.cos(w * math.pi) + w * math.sin(w * math.pi)) - s) / (s * s + w * w)


def _sin_sin_exp(k, j, s):
    return 0.5 * (_cos_exp(k - j, s) - _cos_exp(k + j, s))


def _cos_cos_exp(k, j, s):
    return 0.5 * (_cos_exp(k - j, s) + _cos_exp(k + j, s))
