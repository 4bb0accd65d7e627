import math

import numpy as np

from ..config import DEFAULT_TOLERANCES, run_trials, stream
from ..errors import ConfigurationError
from ..report import InequalityReport


def rm_ratio(family):
    """||F*||^2 / sum_k log(2+k)^2 ||f_k||^2 for the columns f_k of ``family``.

    Coordinates carry counting measure; F* is the pointwise maximum of the
    prefix sums |f_0 + ... + f_N| over all N.
    """
    family = np.asarray(family, dtype=float)
    if family.ndim == 1:
        family = family[:, None]
    prefix = np.cumsum(family, axis=1)
    f_star = np.max(np.abs(prefix), axis=1)
    weights = np.log(2.0 + np.arange(family.shape[1])) ** 2
    denom = float(np.dot(weights, np.sum(family ** 2, axis=0)))
    num = float(np.dot(f_star, f_star))
    return num / denom if denom > 0 else math.nan


def random_orthogonal_family(n_funcs, dim, rng):
    q, _ = np.linalg.qr(rng.standard_normal((dim, n_funcs)))
    return q * rng.standard_normal(n_funcs)


def rm_check(n_funcs, dim, trials, seed, tol=DEFAULT_TOLERANCES, workers=1, scale=1.0):
    """Largest observed ratio for random orthogonal families (Rademacher-Menshov)."""
    if n_funcs < 1 or n_funcs > dim:
        raise ConfigurationError(f"need 1 <= n_funcs <= dim, got n_funcs={n_funcs}, dim={dim}")
    if trials < 1:
        raise ConfigurationError("need at least one trial")

    def one(t):
        family = random_orthogonal_family(n_funcs, dim, stream(seed, t))
        return rm_ratio(scale * family)

    ratios = np.array(run_trials(one, trials, workers))
    worst = int(np.argmax(ratios))
    best = float(ratios[worst])
    return InequalityReport(
        name="rm",
        lhs=best,
        rhs=tol.rm_ceiling,
        passed=bool(np.isfinite(best) and best <= tol.rm_ceiling),
        fitted_constant=best,
        seed=seed,
        sizes={"n_funcs": n_funcs, "dim": dim, "trials": trials},
        tolerances={"rm_ceiling": tol.rm_ceiling},
        metadata={"worst_trial": worst, "mean_ratio": float(np.mean(ratios))},
        rows=[{"trial": t, "ratio": float(r)} for t, r in enumerate(ratios)],
    )
