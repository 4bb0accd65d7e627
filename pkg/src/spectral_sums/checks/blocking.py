"""The k^{1/(2a)} partition of the spectral axis and the estimates built on it."""

import math
from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT_TOLERANCES, run_trials
from ..errors import ConfigurationError
from ..report import InequalityReport
from ..spectral import random_coefficients


@dataclass(frozen=True, eq=False)
class DyadicBlocking:
    a: float
    boundaries: np.ndarray  # lambda_k = k^{1/(2a)}, k = 0..K_max

    @property
    def K_max(self):
        return self.boundaries.size - 1

    def block_of(self, eigenvalues):
        """Index k with lambda_{k-1} < lam <= lambda_k (0 for lam = 0)."""
        return np.searchsorted(self.boundaries, np.asarray(eigenvalues, dtype=float), side="left")

    def covers(self, eigenvalues):
        return float(np.max(eigenvalues)) <= self.boundaries[-1]


def make_dyadic_blocking(a, K_max):
    if not a > 0:
        raise ConfigurationError(f"exponent a must be positive, got {a}")
    if K_max < 1:
        raise ConfigurationError("K_max must be >= 1")
    k = np.arange(K_max + 1, dtype=float)
    return DyadicBlocking(float(a), k ** (1.0 / (2.0 * a)))


def blocking_constants(a, K_max):
    """lambda_{k+1}^{2a-1} (lambda_{k+1} - lambda_k) for k = 0..K_max-1."""
    lam = make_dyadic_blocking(a, K_max).boundaries
    return lam[1:] ** (2.0 * a - 1.0) * (lam[1:] - lam[:-1])


def blocking_constant_check(a, K_max, tol=DEFAULT_TOLERANCES):
    q = blocking_constants(a, K_max)
    running = np.maximum.accumulate(q)
    cut = max(K_max // 10, 1)
    sup = float(running[-1])
    increment = sup - float(running[cut - 1])
    tail = float(q[-1])
    return InequalityReport(
        name="blocking",
        lhs=sup,
        rhs=sup,
        passed=bool(math.isfinite(sup) and increment < tol.blocking_increment),
        fitted_constant=sup,
        sizes={"K_max": K_max},
        tolerances={"blocking_increment": tol.blocking_increment},
        metadata={
            "a": a,
            "argmax_k": int(np.argmax(q)),
            "last_decade_increment": increment,
            "tail_value": tail,
            "tail_limit": 1.0 / (2.0 * a),
            "min_value": float(np.min(q)),
        },
    )


def intrablock_sum(c, blocking, K):
    """sum_k || sup_{lambda_k <= r < lambda_{k+1}} |E_L(lambda_k, r] f| ||^2_{L2(K)}.

    Only eigenvalues strictly inside a block produce jumps of r -> E_L(lambda_k, r]f,
    so the supremum is taken over the running sums at those eigenvalues.
    """
    model = c.model
    lam = model.eigenvalues
    idx = np.searchsorted(blocking.boundaries, lam, side="right") - 1
    on_boundary = blocking.boundaries[idx] == lam
    w = model.grid.weights[K.mask]
    basis = model.basis[K.mask]
    off = model.group_offsets
    total = 0.0
    current = -1
    s = best = None
    for g in range(model.n_distinct):
        if on_boundary[g]:
            continue
        if idx[g] != current:
            if best is not None:
                total += float(np.dot(w, best ** 2))
            current = idx[g]
            s = np.zeros(basis.shape[0])
            best = np.zeros_like(s)
        for j in range(off[g], off[g + 1]):
            s = s + c.coeffs[j] * basis[:, j]
        best = np.maximum(best, np.abs(s))
    if best is not None:
        total += float(np.dot(w, best ** 2))
    return total


def intrablock_maximal_check(
    model, blocking, K, trials, seed, decay=1.0, tol=DEFAULT_TOLERANCES, workers=1
):
    """Largest observed intrablock_sum / ||f||^2 over random trials."""
    if not blocking.covers(model.eigenvalues):
        raise ConfigurationError(
            f"blocking ends at {blocking.boundaries[-1]:.6g}, below the top eigenvalue "
            f"{model.eigenvalues[-1]:.6g}"
        )
    if len(K) != len(model.grid):
        raise ConfigurationError("window does not match the model grid")

    def one(t):
        c = random_coefficients(model, seed, decay, trial=t)
        rhs = c.norm() ** 2
        if rhs == 0.0:
            return None
        return intrablock_sum(c, blocking, K), rhs

    rows = []
    for t, pair in enumerate(run_trials(one, trials, workers)):
        if pair is not None:
            rows.append({"trial": t, "lhs": pair[0], "rhs": pair[1], "ratio": pair[0] / pair[1]})
    if not rows:
        raise ConfigurationError("every trial drew the zero function")
    worst = max(rows, key=lambda r: r["ratio"])
    occupied = np.unique(blocking.block_of(model.eigenvalues))
    return InequalityReport(
        name="intrablock",
        lhs=worst["lhs"],
        rhs=worst["rhs"],
        passed=bool(worst["ratio"] <= tol.intrablock_ceiling),
        fitted_constant=worst["ratio"],
        seed=seed,
        sizes={"n_modes": model.n_distinct, "trials": trials, "K_max": blocking.K_max},
        tolerances={"intrablock_ceiling": tol.intrablock_ceiling},
        metadata={
            "a": blocking.a,
            "label": model.label,
            "decay": decay,
            "occupied_blocks": int(occupied.size),
            "max_eigenvalues_per_block": int(np.max(np.bincount(blocking.block_of(model.eigenvalues)))),
        },
        rows=rows,
    )
