"""Spectral models of the operator classes: Dirichlet Laplacian, Hermite
operator and finite-difference Schrodinger operators -u'' + V u."""

import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import DEFAULT_TOLERANCES
from .eigensolve import TridiagonalMatrix, lowest_eigenpairs
from .errors import ConfigurationError, DomainError, StructuralError
from .grid import Grid1D, GridFunction, uniform_grid
from .report import InequalityReport


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """Distinct eigenvalues with an orthonormal eigenbasis sampled on a grid.

    ``basis`` holds one column per eigenfunction, grouped by eigenvalue in
    increasing order; ``multiplicities[k]`` columns belong to ``eigenvalues[k]``.
    """

    grid: Grid1D
    eigenvalues: np.ndarray
    basis: np.ndarray
    multiplicities: np.ndarray
    label: str = "custom"
    metadata: dict = field(default_factory=dict)
    tol: object = DEFAULT_TOLERANCES

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        basis = np.asarray(self.basis, dtype=float)
        mult = np.asarray(self.multiplicities, dtype=np.int64)
        if basis.ndim != 2 or basis.shape[0] != len(self.grid):
            raise StructuralError("basis must have one row per grid point")
        if mult.shape != lam.shape or np.any(mult < 1) or mult.sum() != basis.shape[1]:
            raise StructuralError("multiplicities do not match the basis columns")
        if lam.size == 0:
            raise StructuralError("a spectral model needs at least one eigenvalue")
        if np.any(np.diff(lam) <= 0):
            raise StructuralError("eigenvalues must be strictly increasing")
        if lam[0] < 0:
            raise DomainError(f"operator is not non-negative: smallest eigenvalue {lam[0]}")
        defect = gram_defect(self.grid, basis)
        if defect > self.tol.gram_defect:
            raise StructuralError(f"eigenfunctions not orthonormal: Gram defect {defect:.3e}")
        for arr in (lam, basis, mult):
            arr.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "multiplicities", mult)

    @property
    def n_distinct(self):
        return self.eigenvalues.size

    @property
    def n_functions(self):
        return self.basis.shape[1]

    @property
    def column_group(self):
        """Eigenvalue index of every basis column."""
        return np.repeat(np.arange(self.n_distinct), self.multiplicities)

    @property
    def column_eigenvalues(self):
        return self.eigenvalues[self.column_group]

    @property
    def group_offsets(self):
        return np.concatenate([[0], np.cumsum(self.multiplicities)])

    def eigenspace(self, k):
        """Eigenfunctions (as GridFunctions) of the k-th distinct eigenvalue, 0-based."""
        start, stop = self.group_offsets[k], self.group_offsets[k + 1]
        return [GridFunction(self.grid, self.basis[:, j]) for j in range(start, stop)]

    @property
    def eigenspaces(self):
        return [self.eigenspace(k) for k in range(self.n_distinct)]

    def eigenfunction(self, k, i=0):
        return self.eigenspace(k)[i]

    def truncate(self, n_distinct):
        """Model restricted to the lowest n_distinct eigenvalues."""
        if not 1 <= n_distinct <= self.n_distinct:
            raise ConfigurationError(f"cannot keep {n_distinct} of {self.n_distinct} eigenvalues")
        stop = self.group_offsets[n_distinct]
        return SpectralModel(
            self.grid,
            self.eigenvalues[:n_distinct],
            self.basis[:, :stop],
            self.multiplicities[:n_distinct],
            self.label,
            dict(self.metadata, truncated_from=int(self.n_distinct)),
            self.tol,
        )


def gram_defect(grid, basis):
    G = basis.T @ (grid.weights[:, None] * basis)
    return float(np.max(np.abs(G - np.eye(basis.shape[1])))) if basis.shape[1] else 0.0


# -- potentials ------------------------------------------------------------


@dataclass(frozen=True)
class PotentialSpec:
    """A potential V together with the constants of its growth conditions.

    ``evaluator`` receives an array of points: shape (N,) in one dimension,
    (N, dimension) otherwise.  The growth conditions read
    c (1+|x|)^k <= V(x) for |x| >= growth_radius and |V(x)| <= C (1+|x|)^k.
    """

    evaluator: Callable
    growth_exponent: float | None = None
    lower_const: float | None = None
    upper_const: float | None = None
    growth_radius: float = 0.0
    inverse_square_coeff: float | None = None
    dimension: int = 1
    support_radius: float | None = None
    radial: bool = False
    name: str = "custom"

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigurationError("dimension must be >= 1")
        c = self.inverse_square_coeff
        if c is not None:
            bound = -((self.dimension - 2) ** 2) / 4
            if not c > bound:
                raise ConfigurationError(
                    f"inverse-square coefficient {c} must exceed -(n-2)^2/4 = {bound} for n={self.dimension}"
                )

    def __call__(self, x):
        return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)

    @property
    def sigma(self):
        """max((n-2)/2 - sqrt((n-2)^2/4 + c), 0) for inverse-square potentials."""
        c = self.inverse_square_coeff
        if c is None:
            return None
        n = self.dimension
        return max((n - 2) / 2 - math.sqrt((n - 2) ** 2 / 4 + c), 0.0)

    @property
    def p_star(self):
        s = self.sigma
        if s is None:
            return None
        return math.inf if s == 0 else self.dimension / s

    @classmethod
    def from_radial(cls, profile, dimension=1, **kwargs):
        def evaluator(x):
            r = np.abs(x) if dimension == 1 else np.linalg.norm(x, axis=-1)
            return profile(r)

        return cls(evaluator=evaluator, dimension=dimension, radial=True, **kwargs)


def zero_potential(dimension=1):
    return PotentialSpec.from_radial(np.zeros_like, dimension, name="zero")


def constant_potential(value, dimension=1, growth_exponent=2.0, lower_const=0.5, upper_const=1.0):
    return PotentialSpec.from_radial(
        lambda r: np.full_like(r, float(value)),
        dimension,
        growth_exponent=growth_exponent,
        lower_const=lower_const,
        upper_const=upper_const,
        growth_radius=3.0,
        name=f"constant({value})",
    )


def harmonic_potential(dimension=1):
    # (1+r)^2 / 2 <= r^2 once r >= 1 + sqrt(2)
    return PotentialSpec.from_radial(
        lambda r: r ** 2,
        dimension,
        growth_exponent=2.0,
        lower_const=0.5,
        upper_const=1.0,
        growth_radius=3.0,
        name="harmonic",
    )


def power_potential(k, dimension=1):
    """V = |x|^k; the lower bound (1+r)^k / 2^k <= r^k holds for r >= 1."""
    return PotentialSpec.from_radial(
        lambda r: r ** k,
        dimension,
        growth_exponent=float(k),
        lower_const=0.5 ** k,
        upper_const=1.0,
        growth_radius=1.0,
        name=f"power({k})",
    )


def inverse_square_potential(c, dimension=3):
    return PotentialSpec.from_radial(
        lambda r: c / r ** 2,
        dimension,
        inverse_square_coeff=float(c),
        name=f"inverse-square({c})",
    )


def ball_potential(c, radius=1.0, dimension=3):
    return PotentialSpec.from_radial(
        lambda r: np.where(r <= radius, float(c), 0.0),
        dimension,
        support_radius=float(radius),
        name=f"ball({c},{radius})",
    )


# -- builders --------------------------------------------------------------


def build_dirichlet_1d(length, n_modes, n_points=None, tol=DEFAULT_TOLERANCES):
    """-u'' on [0, length] with Dirichlet ends, eigenpairs in closed form."""
    if not length > 0:
        raise ConfigurationError("length must be positive")
    if n_modes < 1:
        raise ConfigurationError("need at least one mode")
    if n_points is None:
        n_points = max(8 * n_modes + 1, 1025)
    if n_points < 8 * n_modes:
        raise ConfigurationError(
            f"{n_points} points cannot resolve {n_modes} modes (need >= {8 * n_modes})"
        )
    grid = uniform_grid(0.0, length, n_points)
    freq = math.pi / length
    k = np.arange(1, n_modes + 1, dtype=float)
    eigenvalues = (k * freq) ** 2
    basis = math.sqrt(2.0 / length) * np.sin(np.outer(grid.points, k * freq))
    return SpectralModel(
        grid, eigenvalues, basis, np.ones(n_modes, dtype=np.int64), "dirichlet",
        {"length": float(length), "n_modes": n_modes, "n_points": n_points}, tol,
    )


def hermite_box(n_modes):
    return math.sqrt(2 * (2 * n_modes + 1)) + 8.0


def hermite_functions(x, n_modes):
    """Normalized Hermite functions h_0..h_{n-1} at x, one column each."""
    x = np.asarray(x, dtype=float)
    out = np.empty((x.size, n_modes))
    out[:, 0] = math.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    if n_modes > 1:
        out[:, 1] = math.sqrt(2.0) * x * out[:, 0]
    for k in range(1, n_modes - 1):
        out[:, k + 1] = (
            math.sqrt(2.0 / (k + 1)) * x * out[:, k] - math.sqrt(k / (k + 1)) * out[:, k - 1]
        )
    return out


def build_hermite_1d(n_modes, n_points=None, tol=DEFAULT_TOLERANCES):
    """-u'' + x^2 u on the line, truncated to the box [-T, T]."""
    if n_modes < 1:
        raise ConfigurationError("need at least one mode")
    if n_points is None:
        n_points = max(16 * n_modes + 1, 1025)
    if n_points < 16 * n_modes:
        raise ConfigurationError(
            f"{n_points} points cannot resolve {n_modes} Hermite modes (need >= {16 * n_modes})"
        )
    box = hermite_box(n_modes)
    grid = uniform_grid(-box, box, n_points)
    eigenvalues = 2.0 * np.arange(n_modes) + 1.0
    basis = hermite_functions(grid.points, n_modes)
    return SpectralModel(
        grid, eigenvalues, basis, np.ones(n_modes, dtype=np.int64), "hermite",
        {"box": box, "n_modes": n_modes, "n_points": n_points}, tol,
    )


def schrodinger_matrix(V, lo, hi, n_points):
    """Central-difference matrix of -u'' + V u on the interior nodes of [lo, hi]."""
    grid = uniform_grid(lo, hi, n_points)
    h = grid.spacing
    interior = grid.points[1:-1]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        values = V(interior)
    if not np.all(np.isfinite(values)):
        bad = interior[~np.isfinite(values)][0]
        raise DomainError(f"potential is not finite at interior node x={bad}")
    diag = 2.0 / h ** 2 + values
    off = np.full(interior.size - 1, -1.0 / h ** 2)
    return grid, TridiagonalMatrix(diag, off)


def merge_eigenvalues(values, rel):
    """Group sorted eigenvalues closer than rel*(1+|lam|); returns (distinct, multiplicities)."""
    groups = [[values[0]]]
    for v in values[1:]:
        if v - groups[-1][-1] < rel * (1.0 + abs(v)):
            groups[-1].append(v)
        else:
            groups.append([v])
    distinct = np.array([float(np.mean(g)) for g in groups])
    mult = np.array([len(g) for g in groups], dtype=np.int64)
    return distinct, mult


def build_schrodinger_fd(V, domain, n_points, n_modes, tol=DEFAULT_TOLERANCES):
    """Lowest n_modes eigenpairs of the finite-difference Schrodinger operator.

    Dirichlet conditions are imposed at both ends of ``domain``; eigenvectors are
    normalized in the grid quadrature and vanish at the end points.
    """
    lo, hi = domain
    if V.dimension != 1:
        raise ConfigurationError(f"finite differences are one-dimensional; V has dimension {V.dimension}")
    if n_modes < 1 or not n_modes < n_points / 4:
        raise ConfigurationError(f"need 1 <= n_modes < n_points/4, got {n_modes} and {n_points}")
    grid, T = schrodinger_matrix(V, lo, hi, n_points)
    pairs = lowest_eigenpairs(T, n_modes, tol)
    basis = np.zeros((n_points, n_modes))
    basis[1:-1] = pairs.vectors / math.sqrt(grid.spacing)
    distinct, mult = merge_eigenvalues(pairs.values, tol.merge_rel)
    return SpectralModel(
        grid, distinct, basis, mult, "schrodinger",
        {
            "potential": V.name,
            "domain": [float(lo), float(hi)],
            "n_points": n_points,
            "n_modes": n_modes,
            "inverse_square_coeff": V.inverse_square_coeff,
            "sigma": V.sigma,
            "p_star": V.p_star,
        },
        tol,
    )


def validate_growth_conditions(
    V, domain, samples, growth_exponent=None, lower_const=None, upper_const=None,
    growth_radius=None, tol=DEFAULT_TOLERANCES,
):
    """Sample c (1+|x|)^k <= V(x) (for |x| >= R) and |V(x)| <= C (1+|x|)^k.

    k, c, C and R default to the constants declared on ``V``.  Reports the
    tightest constants the samples admit; passes when the declared ones are
    admissible (with no declared c, when some c > 0 works).  Derivative
    bounds are not examined.
    """
    if samples < 100:
        raise ConfigurationError("need at least 100 samples")
    k = V.growth_exponent if growth_exponent is None else float(growth_exponent)
    c_decl = V.lower_const if lower_const is None else float(lower_const)
    C_decl = V.upper_const if upper_const is None else float(upper_const)
    R = V.growth_radius if growth_radius is None else float(growth_radius)
    if k is None:
        raise ConfigurationError("no growth exponent declared or given")
    lo, hi = domain
    x = np.linspace(lo, hi, samples)
    pts = x if V.dimension == 1 else np.column_stack([x] + [np.zeros_like(x)] * (V.dimension - 1))
    v = V(pts)
    if not np.all(np.isfinite(v)):
        raise DomainError("potential is not finite on the sample set")
    scale = (1.0 + np.abs(x)) ** k
    ratio = v / scale
    far = np.abs(x) >= R
    tight_c = float(np.min(ratio[far])) if far.any() else math.inf
    tight_C = float(np.max(np.abs(ratio)))
    lower_ok = far.any() and tight_c > 0 and (c_decl is None or c_decl <= tight_c)
    upper_ok = C_decl is None or tight_C <= C_decl
    required_c = c_decl if c_decl is not None else 0.0
    return InequalityReport(
        name="growth",
        lhs=required_c,
        rhs=max(tight_c, 0.0),
        passed=bool(lower_ok and upper_ok),
        fitted_constant=tight_c,
        sizes={"samples": samples},
        tolerances={},
        metadata={
            "potential": V.name,
            "growth_exponent": k,
            "growth_radius": R,
            "domain": [float(lo), float(hi)],
            "tightest_lower_const": tight_c,
            "tightest_upper_const": tight_C,
            "declared_lower_const": c_decl,
            "declared_upper_const": C_decl,
            "lower_ok": bool(lower_ok),
            "upper_ok": bool(upper_ok),
        },
    )


# -- text export -------------------------------------------------------------


def export_model(model):
    """Text form: one header line, then CSV blocks for grid, eigenvalues and eigenfunctions."""
    buf = io.StringIO()
    buf.write(
        f"# spectral-model label={model.label} n_points={len(model.grid)} "
        f"n_modes={model.n_functions} n_distinct={model.n_distinct}\n"
    )
    buf.write("[grid]\nx,weight\n")
    for x, w in zip(model.grid.points, model.grid.weights):
        buf.write(f"{float(x)!r},{float(w)!r}\n")
    buf.write("[eigenvalues]\nk,lambda,multiplicity\n")
    for k, (lam, m) in enumerate(zip(model.eigenvalues, model.multiplicities), start=1):
        buf.write(f"{k},{float(lam)!r},{int(m)}\n")
    buf.write("[eigenfunctions]\n")
    group = model.column_group
    within = np.concatenate([np.arange(m) for m in model.multiplicities])
    buf.write("x," + ",".join(f"phi_{g + 1}_{i + 1}" for g, i in zip(group, within)) + "\n")
    for x, row in zip(model.grid.points, model.basis):
        buf.write(f"{float(x)!r}," + ",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def import_model(text, tol=DEFAULT_TOLERANCES):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# spectral-model"):
        raise StructuralError("missing spectral-model header")
    header = dict(item.split("=", 1) for item in lines[0].split()[2:])
    sections = {}
    current = None
    for line in lines[1:]:
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif line:
            sections[current].append(line)
    try:
        grid_rows = [tuple(map(float, r.split(","))) for r in sections["grid"][1:]]
        eig_rows = [r.split(",") for r in sections["eigenvalues"][1:]]
        fn_rows = [list(map(float, r.split(","))) for r in sections["eigenfunctions"][1:]]
    except KeyError as exc:
        raise StructuralError(f"missing section {exc}") from None
    pts, wts = map(np.array, zip(*grid_rows))
    grid = Grid1D(pts, wts)
    eigenvalues = np.array([float(r[1]) for r in eig_rows])
    mult = np.array([int(r[2]) for r in eig_rows], dtype=np.int64)
    basis = np.array(fn_rows)[:, 1:].reshape(len(grid), -1)
    if int(header["n_points"]) != len(grid) or int(header["n_modes"]) != basis.shape[1]:
        raise StructuralError("header sizes disagree with the data blocks")
    return SpectralModel(grid, eigenvalues, basis, mult, header["label"], {}, tol)
