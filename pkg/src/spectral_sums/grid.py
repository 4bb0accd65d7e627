"""1-D grids with quadrature weights, sampled functions and window masks."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StructuralError


@dataclass(frozen=True, eq=False)
class Grid1D:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if points.ndim != 1 or points.shape != weights.shape:
            raise StructuralError("points and weights must be 1-D arrays of equal length")
        if points.size < 2:
            raise StructuralError("a grid needs at least two points")
        if not np.all(np.diff(points) > 0):
            raise StructuralError("grid points must be strictly increasing")
        if not np.all(weights > 0):
            raise StructuralError("quadrature weights must be positive")
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.points.size

    @property
    def spacing(self):
        return float(self.points[1] - self.points[0])

    @property
    def interval(self):
        return float(self.points[0]), float(self.points[-1])

    def same_as(self, other):
        return self is other or (
            np.array_equal(self.points, other.points) and np.array_equal(self.weights, other.weights)
        )


def uniform_grid(lo, hi, n_points):
    """Uniform grid on [lo, hi] with trapezoid weights (half weight at the ends)."""
    if not hi > lo:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    if n_points < 2:
        raise DomainError("need at least two grid points")
    points = np.linspace(lo, hi, n_points)
    h = (hi - lo) / (n_points - 1)
    weights = np.full(n_points, h)
    weights[0] = weights[-1] = h / 2
    return Grid1D(points, weights)


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.points.shape:
            raise StructuralError(
                f"{values.size} values for a grid of {len(self.grid)} points"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("grid function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid, fn):
        return cls(grid, fn(grid.points))

    @property
    def x(self):
        return self.grid.points

    def __add__(self, other):
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar):
        return GridFunction(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def norm(self):
        return float(np.sqrt(inner_product(self, self)))


@dataclass(frozen=True, eq=False)
class Window:
    """Boolean mask selecting the compact set K on a grid."""

    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 1:
            raise StructuralError("window mask must be 1-D")
        if not mask.any():
            raise DomainError("window selects no grid points")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def full(cls, grid):
        return cls(np.ones(len(grid), dtype=bool))

    @classmethod
    def interval(cls, grid, lo, hi):
        """Points with lo <= x <= hi."""
        x = grid.points
        return cls((x >= lo) & (x <= hi))

    def __len__(self):
        return self.mask.size

    def issubset(self, other):
        return bool(np.all(~self.mask | other.mask))


def _check_same_grid(f, g):
    if not f.grid.same_as(g.grid):
        raise StructuralError("grid functions live on different grids")


def inner_product(f, g):
    """Quadrature inner product sum_j w_j f_j g_j."""
    _check_same_grid(f, g)
    return float(np.dot(f.grid.weights * f.values, g.values))


def norm_on_window(f, K):
    """L2 norm of f restricted to the window K."""
    if len(K) != len(f.grid):
        raise StructuralError("window mask length does not match the grid")
    m = K.mask
    return float(np.sqrt(np.dot(f.grid.weights[m], f.values[m] ** 2)))
