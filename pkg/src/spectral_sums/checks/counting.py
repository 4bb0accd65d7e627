"""Eigenvalue counting: N(lambda), the k <= A lambda_k^a condition and the
phase-space volume |{(xi, x) : |xi|^2 + V(x) <= lambda}|."""

import math

import numpy as np

from ..config import DEFAULT_TOLERANCES, stream
from ..errors import ConfigurationError, DomainError
from ..report import InequalityReport, fit_power_law

_CHUNK = 1 << 16


def weyl_count(model, lam):
    """Number of eigenvalues <= lam, counted with multiplicity."""
    if lam < 0:
        raise DomainError(f"lam must be non-negative, got {lam}")
    n = int(np.searchsorted(model.eigenvalues, lam, side="right"))
    return int(model.group_offsets[n])


def eigencount_condition_check(model, tol=DEFAULT_TOLERANCES):
    """Fit k ~ A lambda_k^a over the distinct eigenvalues and test k <= A' lambda_k^a.

    A' is the fitted constant inflated by ``tol.count_inflation``.  The bound
    is required for all sufficiently large k, taken here as the upper half of
    the modeled spectrum; the first index from which it holds is reported.
    """
    lam = model.eigenvalues
    k = np.arange(1, lam.size + 1, dtype=float)
    N = model.group_offsets[1:].astype(float)
    sizes = {"n_distinct": int(lam.size), "n_functions": model.n_functions}
    tols = {"count_inflation": tol.count_inflation}
    positive = lam > 0
    if np.count_nonzero(positive) < 2:
        return InequalityReport(
            name="eigencount", lhs=float(lam.size), rhs=float(lam.size), passed=True,
            sizes=sizes, tolerances=tols,
            metadata={"label": model.label, "note": "fewer than two positive eigenvalues"},
        )
    a, A, r2 = fit_power_law(lam[positive], k[positive])
    a_N, A_N, _ = fit_power_law(lam[positive], N[positive])
    bound = A * (1.0 + tol.count_inflation) * np.where(positive, lam, 0.0) ** a
    holds = k <= bound
    failing = np.flatnonzero(~holds)
    holds_from = int(failing[-1]) + 2 if failing.size else 1
    tail_start = (lam.size + 1) // 2 + 1 if lam.size > 1 else 1
    ratio = k / np.where(bound > 0, bound, np.inf)
    tail = ratio[tail_start - 1:]
    worst_tail = float(np.max(tail))
    j = tail_start - 1 + int(np.argmax(tail))
    bound_N = A_N * (1.0 + tol.count_inflation) * np.where(positive, lam, 0.0) ** a_N
    return InequalityReport(
        name="eigencount",
        lhs=float(k[j]),
        rhs=float(bound[j]),
        passed=bool(holds_from <= tail_start),
        fitted_constant=A,
        fitted_exponent=a,
        sizes=sizes,
        tolerances=tols,
        metadata={
            "label": model.label,
            "r2": r2,
            "holds_from_k": holds_from,
            "tail_start_k": tail_start,
            "worst_tail_ratio": worst_tail,
            "multiplicity_count_exponent": a_N,
            "multiplicity_count_constant": A_N,
            "multiplicity_bound_holds_from": int(np.flatnonzero(N > bound_N)[-1]) + 2
            if np.any(N > bound_N) else 1,
            "below_recommended_size": bool(lam.size < 8),
        },
        rows=[{"k": int(kk), "lambda": float(ll), "N": int(nn)} for kk, ll, nn in zip(k, lam, N)],
    )


def phase_space_box(V, lam):
    """Half-widths (X, Xi) of a box in (x, xi) containing {|xi|^2 + V(x) <= lam}.

    Uses c (1+|x|)^k <= V(x) for |x| >= R, so V(x) <= lam forces
    |x| <= max(R, (lam/c)^{1/k} - 1); and V >= 0 gives |xi| <= sqrt(lam).
    """
    if V.growth_exponent is None or V.lower_const is None or not V.lower_const > 0:
        raise ConfigurationError("phase-space volume needs the growth constants c > 0 and k")
    X = max(V.growth_radius, (lam / V.lower_const) ** (1.0 / V.growth_exponent) - 1.0)
    return X, math.sqrt(lam)


def phase_space_volume(V, lam, n, n_samples, seed):
    """Monte Carlo estimate of the 2n-dimensional phase-space volume.

    Returns (estimate, standard_error).  Samples are drawn in fixed-size chunks,
    each from its own (seed, chunk) stream.
    """
    if not lam > 0:
        raise DomainError(f"lam must be positive, got {lam}")
    if n not in (1, 2, 3):
        raise ConfigurationError(f"dimension must be 1, 2 or 3, got {n}")
    if V.dimension != n:
        raise ConfigurationError(f"potential is {V.dimension}-dimensional, expected {n}")
    if n_samples < 1:
        raise ConfigurationError("need at least one sample")
    X, Xi = phase_space_box(V, lam)
    volume = (2 * X) ** n * (2 * Xi) ** n
    hits = 0
    done = 0
    chunk_id = 0
    while done < n_samples:
        size = min(_CHUNK, n_samples - done)
        rng = stream(seed, chunk_id)
        x = rng.uniform(-X, X, size=(size, n))
        xi = rng.uniform(-Xi, Xi, size=(size, n))
        v = V(x[:, 0] if n == 1 else x)
        if np.any(v < 0):
            raise DomainError("phase-space bounding box assumes V >= 0")
        hits += int(np.count_nonzero(np.sum(xi ** 2, axis=1) + v <= lam))
        done += size
        chunk_id += 1
    p = hits / n_samples
    return volume * p, volume * math.sqrt(p * (1 - p) / n_samples)


def weyl_check(model, tol=DEFAULT_TOLERANCES):
    """Fit N(lambda) ~ A lambda^a at the eigenvalues and test N <= A' lambda^a on the upper half."""
    lam = model.eigenvalues
    positive = lam > 0
    if np.count_nonzero(positive) < 2:
        raise ConfigurationError("need at least two positive eigenvalues to fit N(lambda)")
    N = np.array([weyl_count(model, float(x)) for x in lam], dtype=float)
    a, A, r2 = fit_power_law(lam[positive], N[positive])
    bound = A * (1.0 + tol.count_inflation) * np.where(positive, lam, 0.0) ** a
    start = lam.size // 2
    ok = N[start:] <= bound[start:]
    j = start + int(np.argmax(N[start:] / np.where(bound[start:] > 0, bound[start:], np.inf)))
    return InequalityReport(
        name="weyl",
        lhs=float(N[j]),
        rhs=float(bound[j]),
        passed=bool(np.all(ok)),
        fitted_constant=A,
        fitted_exponent=a,
        sizes={"n_distinct": int(lam.size), "n_functions": model.n_functions},
        tolerances={"count_inflation": tol.count_inflation},
        metadata={"label": model.label, "r2": r2},
        rows=[{"lambda": float(x), "N": int(n)} for x, n in zip(lam, N)],
    )


def phase_space_check(V, lams, n, n_samples, seed, tol=DEFAULT_TOLERANCES):
    """Phase-space volumes at several lambda; the growth exponent is compared with n/2 + n/k."""
    if len(lams) < 2:
        raise ConfigurationError("need at least two values of lambda")
    rows = []
    for j, lam in enumerate(lams):
        vol, se = phase_space_volume(V, float(lam), n, n_samples, seed + j)
        rows.append({"lambda": float(lam), "volume": vol, "se": se})
    vols = np.array([r["volume"] for r in rows])
    predicted = n / 2 + n / V.growth_exponent
    if np.all(vols > 0):
        a, C, r2 = fit_power_law([r["lambda"] for r in rows], vols)
    else:
        a, C, r2 = math.nan, math.nan, math.nan
    return InequalityReport(
        name="phasespace",
        lhs=a,
        rhs=predicted,
        passed=bool(np.isfinite(a) and abs(a - predicted) <= tol.phase_exponent_abs),
        fitted_constant=C,
        fitted_exponent=a,
        seed=seed,
        sizes={"n": n, "n_samples": n_samples, "n_lambda": len(lams)},
        tolerances={"phase_exponent_abs": tol.phase_exponent_abs},
        metadata={"potential": V.name, "predicted_exponent": predicted, "r2": r2},
        rows=rows,
    )
