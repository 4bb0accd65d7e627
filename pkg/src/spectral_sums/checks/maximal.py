import math

import numpy as np

from ..config import DEFAULT_TOLERANCES, run_trials
from ..errors import ConfigurationError
from ..grid import Window, norm_on_window
from ..report import InequalityReport
from ..spectral import log_weighted_norm, maximal_function, random_coefficients


def maximal_ratio(c, K):
    """(||sup_R |S_R f| ||^2_{L2(K)}, ||log(2+L) f||^2), or None for f = 0."""
    rhs = log_weighted_norm(c) ** 2
    if rhs == 0.0:
        return None
    lhs = norm_on_window(maximal_function(c, float(c.model.eigenvalues[-1])), K) ** 2
    return lhs, rhs


def _empirical_constant(model, K, trials, seed, decay, workers):
    def one(t):
        return maximal_ratio(random_coefficients(model, seed, decay, trial=t), K)

    out = run_trials(one, trials, workers)
    rows = []
    for t, pair in enumerate(out):
        if pair is None:
            continue
        lhs, rhs = pair
        rows.append({"trial": t, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs})
    return rows


def maximal_inequality_check(
    model, K, trials, seed, decay=1.0, compare_model=None, compare_window=None,
    tol=DEFAULT_TOLERANCES, workers=1,
):
    """Empirical C_K in  int_K |sup_R |S_R f||^2 <= C_K ||log(2+L) f||^2.

    The constant measured on ``model`` is compared with the one measured on
    ``compare_model`` (default: ``model`` truncated to half its eigenvalues)
    on ``compare_window`` (default: K, or the full grid when K is full); the
    check passes when the two agree within ``tol.stability_rel``.
    """
    if model.n_distinct < 8:
        raise ConfigurationError("maximal inequality check needs at least 8 eigenvalues")
    if len(K) != len(model.grid):
        raise ConfigurationError("window does not match the model grid")
    if compare_model is None:
        compare_model = model.truncate(model.n_distinct // 2)
        K_small = K
    elif compare_window is not None:
        K_small = compare_window
    elif compare_model.grid.same_as(model.grid):
        K_small = K
    elif K.mask.all():
        K_small = Window.full(compare_model.grid)
    else:
        raise ConfigurationError("comparison model is on another grid; pass compare_window")
    if len(K_small) != len(compare_model.grid):
        raise ConfigurationError("window does not match the comparison model grid")

    rows = _empirical_constant(model, K, trials, seed, decay, workers)
    rows_small = _empirical_constant(compare_model, K_small, trials, seed, decay, workers)
    if not rows or not rows_small:
        raise ConfigurationError("every trial drew the zero function")
    worst = max(rows, key=lambda r: r["ratio"])
    c_big = worst["ratio"]
    c_small = max(r["ratio"] for r in rows_small)
    drift = abs(c_big / c_small - 1.0)
    return InequalityReport(
        name="maximal-ineq",
        lhs=worst["lhs"],
        rhs=worst["rhs"],
        passed=bool(math.isfinite(c_big) and drift <= tol.stability_rel),
        fitted_constant=c_big,
        seed=seed,
        sizes={
            "n_modes": model.n_distinct,
            "compare_modes": compare_model.n_distinct,
            "trials": trials,
            "n_points": len(model.grid),
        },
        tolerances={"stability_rel": tol.stability_rel},
        metadata={
            "label": model.label,
            "decay": decay,
            "constant_compare": c_small,
            "relative_drift": drift,
            "skipped_trials": trials - len(rows),
            "window_points": int(np.count_nonzero(K.mask)),
        },
        rows=rows,
    )
