"""Eigenfunction expansions: coefficients, spherical partial sums S_R(L)f,
multipliers F(L^{1/m}), band projectors E_L(a, b] and the maximal function.

Every routine that builds a function from coefficients accumulates the
terms in the same fixed order (increasing eigenvalue, then eigenspace
member), so partial sums, syntheses and maximal functions agree bitwise.
"""

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid

from .config import stream
from .errors import DomainError, StructuralError
from .grid import GridFunction


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """Coefficients <f, phi_{k,i}>, one per basis column of ``model``."""

    model: object
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (self.model.n_functions,):
            raise StructuralError(
                f"expected {self.model.n_functions} coefficients, got shape {coeffs.shape}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def by_eigenspace(self):
        off = self.model.group_offsets
        return [self.coeffs[off[k]: off[k + 1]] for k in range(self.model.n_distinct)]

    def norm(self):
        return float(np.sqrt(np.dot(self.coeffs, self.coeffs)))

    def scaled(self, t):
        return SpectralCoefficients(self.model, self.coeffs * t)

    def __add__(self, other):
        if other.model is not self.model:
            raise StructuralError("coefficients belong to different models")
        return SpectralCoefficients(self.model, self.coeffs + other.coeffs)


@dataclass(frozen=True)
class BandFilter:
    """Multiplier F with support [lo, hi], applied as F(L^{1/m})."""

    fn: Callable
    support: tuple
    root_order: int = 1

    def __post_init__(self):
        lo, hi = self.support
        if not lo <= hi:
            raise DomainError(f"empty support [{lo}, {hi}]")
        if self.root_order < 1:
            raise DomainError("root order must be >= 1")

    def __call__(self, lam):
        """F(lam^{1/m}) for eigenvalues lam >= 0, zero outside the support."""
        arg = np.asarray(lam, dtype=float) ** (1.0 / self.root_order)
        lo, hi = self.support
        inside = (arg >= lo) & (arg <= hi)
        out = np.zeros_like(arg)
        out[inside] = np.asarray(self.fn(arg[inside]), dtype=float)
        return out

    @classmethod
    def indicator(cls, lo, hi, root_order=1):
        return cls(np.ones_like, (float(lo), float(hi)), root_order)

    @classmethod
    def everywhere(cls, fn, root_order=1):
        return cls(fn, (0.0, math.inf), root_order)

    def scaled_l2_norm(self, M, n=20001):
        """||F(M .)||_{L^2(0, inf)} by trapezoid quadrature over the rescaled support."""
        lo, hi = self.support
        if math.isinf(hi):
            raise DomainError("L2 norm of an unbounded-support filter is not defined here")
        if hi == lo:
            return 0.0
        t = np.linspace(lo / M, hi / M, n)
        vals = np.asarray(self.fn(M * t), dtype=float) ** 2
        return float(math.sqrt(trapezoid(vals, t)))


def analyze(model, f):
    """Coefficients c_{k,i} = <f, phi_{k,i}> by grid quadrature."""
    if not f.grid.same_as(model.grid):
        raise StructuralError("function and model live on different grids")
    return SpectralCoefficients(model, model.basis.T @ (model.grid.weights * f.values))


def _accumulate(c, stop_column):
    basis = c.model.basis
    s = np.zeros(basis.shape[0])
    for j in range(stop_column):
        s = s + c.coeffs[j] * basis[:, j]
    return s


def synthesize(c):
    return GridFunction(c.model.grid, _accumulate(c, c.model.n_functions))


def partial_sum(c, R):
    """S_R(L)f: the sum over eigenvalues lam_k <= R."""
    if R < 0:
        raise DomainError(f"R must be non-negative, got {R}")
    n_groups = int(np.searchsorted(c.model.eigenvalues, R, side="right"))
    return GridFunction(c.model.grid, _accumulate(c, int(c.model.group_offsets[n_groups])))


def apply_multiplier(c, F):
    return SpectralCoefficients(c.model, c.coeffs * F(c.model.column_eigenvalues))


def maximal_function(c, R_max):
    """sup_{0 <= R <= R_max} |S_R(L)f(x)|, evaluated at the eigenvalue jumps."""
    model = c.model
    if R_max < model.eigenvalues[0]:
        raise DomainError(f"R_max={R_max} is below the first eigenvalue {model.eigenvalues[0]}")
    n_groups = int(np.searchsorted(model.eigenvalues, R_max, side="right"))
    off = model.group_offsets
    basis = model.basis
    s = np.zeros(basis.shape[0])
    best = np.zeros_like(s)
    for k in range(n_groups):
        for j in range(off[k], off[k + 1]):
            s = s + c.coeffs[j] * basis[:, j]
        best = np.maximum(best, np.abs(s))
    return GridFunction(model.grid, best)


def band_projector(c, lo, hi):
    """E_L(lo, hi]f: keeps modes with lo < lam <= hi."""
    if lo > hi:
        raise DomainError(f"need lo <= hi, got ({lo}, {hi}]")
    lam = c.model.column_eigenvalues
    keep = (lam > lo) & (lam <= hi)
    return SpectralCoefficients(c.model, np.where(keep, c.coeffs, 0.0))


def log_weighted_norm(c):
    """||log(2 + L) f||_2 computed on coefficients."""
    w = np.log(2.0 + c.model.column_eigenvalues)
    return float(np.sqrt(np.sum((w * c.coeffs) ** 2)))


def random_coefficients(model, seed, decay=1.0, trial=0):
    """Gaussian coefficients scaled by k^-decay, k the 1-based eigenvalue index."""
    g = stream(seed, trial).standard_normal(model.n_functions)
    k = model.column_group + 1.0
    return SpectralCoefficients(model, g * k ** (-float(decay)))


def coefficients_from_modes(model, weights):
    """Coefficients with weights[k] on the first member of eigenspace k."""
    coeffs = np.zeros(model.n_functions)
    for k, w in weights.items():
        coeffs[model.group_offsets[k]] = w
    return SpectralCoefficients(model, coeffs)


# -- CSV ----------------------------------------------------------------------


def coefficients_csv(c):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "i", "lambda", "coefficient"])
    group = c.model.column_group
    off = c.model.group_offsets
    for j, (k, val) in enumerate(zip(group, c.coeffs)):
        w.writerow([int(k) + 1, int(j - off[k]) + 1, repr(float(c.model.eigenvalues[k])), repr(float(val))])
    return buf.getvalue()


def parse_coefficients_csv(text, model):
    rows = list(csv.DictReader(io.StringIO(text)))
    coeffs = np.zeros(model.n_functions)
    off = model.group_offsets
    for row in rows:
        k, i = int(row["k"]) - 1, int(row["i"]) - 1
        if not (0 <= k < model.n_distinct and 0 <= i < model.multiplicities[k]):
            raise StructuralError(f"coefficient index ({k + 1}, {i + 1}) outside the model")
        coeffs[off[k] + i] = float(row["coefficient"])
    return SpectralCoefficients(model, coeffs)


def synthesis_csv(f):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "value"])
    for x, v in zip(f.grid.points, f.values):
        w.writerow([repr(float(x)), repr(float(v))])
    return buf.getvalue()
