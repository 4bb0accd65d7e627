"""Hardy's inequality for radial functions and the 3-D scattering conditions
int int |V(x)||V(y)| / |x-y|^2 < (4 pi)^2,  sup_x int |V(y)| / |x-y| < 4 pi."""

import math

import numpy as np
from scipy.integrate import quad, trapezoid

from ..config import DEFAULT_TOLERANCES, run_trials, stream
from ..errors import ConfigurationError, NumericalError
from ..report import InequalityReport

_CHUNK = 1 << 18
_DOMINANCE_SHARE = 0.05
_MIN_DOMINANCE_SAMPLES = 10000


# -- Hardy -------------------------------------------------------------------


def hardy_constant(n):
    return (n - 2) ** 2 / 4


def radial_rayleigh_quotient(u, du, n):
    """int_0^inf |u'(r)|^2 r^{n-1} dr / int_0^inf u(r)^2 r^{n-3} dr.

    For radial u on R^n this is the ratio of the Dirichlet form to the Hardy
    weight.  Each integral is split at r = 1 so the adaptive rule sees the
    (integrable) endpoint behaviour at 0 and the tail separately.
    """

    def integral(g):
        near, _ = quad(g, 0.0, 1.0, limit=500, epsabs=0, epsrel=1e-11)
        far, _ = quad(g, 1.0, math.inf, limit=500, epsabs=0, epsrel=1e-11)
        return near + far

    bottom = integral(lambda r: u(r) ** 2 * r ** (n - 3))
    if bottom == 0.0:
        return None
    return integral(lambda r: du(r) ** 2 * r ** (n - 1)) / bottom


def near_extremal_family(delta, n=3):
    """u(r) = r^{-(n-2)/2 + delta} exp(-sqrt r) and its derivative.

    The quotient is exactly (n-2)^2/4 + delta/4, so it decreases to the Hardy
    constant as delta -> 0.  The slowly decaying cutoff keeps the excess small.
    """
    if not delta > 0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    beta = -(n - 2) / 2 + delta

    def u(r):
        return r ** beta * math.exp(-math.sqrt(r))

    def du(r):
        return (beta / r - 0.5 / math.sqrt(r)) * u(r)

    return u, du


def bump_quotient(amps, centers, widths, n, points=4001):
    """Rayleigh quotient of u(r) = sum_j a_j exp(-(log r - mu_j)^2 / (2 s_j^2)).

    Bumps in log r vanish at 0 and infinity faster than any power; the
    integrals in t = log r are smooth and Gaussian-decaying, so a dense
    trapezoid rule is accurate to rounding.
    """
    s_max = float(np.max(widths))
    lo = float(np.min(centers)) - 12 * s_max
    hi = float(np.max(centers)) + 12 * s_max + (n - 2) * s_max ** 2
    t = np.linspace(lo, hi, points)
    z = (t[:, None] - centers[None, :]) / widths[None, :]
    g = amps[None, :] * np.exp(-0.5 * z ** 2)
    u = g.sum(axis=1)
    du = (-g * z / widths[None, :]).sum(axis=1)
    weight = np.exp((n - 2) * (t - hi))  # common factor e^{(n-2)hi} cancels
    bottom = trapezoid(u ** 2 * weight, t)
    if bottom == 0.0:
        return None
    return trapezoid(du ** 2 * weight, t) / bottom


def hardy_check(n, trials, seed, tol=DEFAULT_TOLERANCES, workers=1, deltas=(0.4, 0.2, 0.1, 0.05)):
    """Minimum radial Rayleigh quotient over random bump combinations."""
    if n < 3:
        raise ConfigurationError(f"Hardy check needs n >= 3, got {n}")
    if trials < 1:
        raise ConfigurationError("need at least one trial")
    bound = hardy_constant(n)

    def one(t):
        rng = stream(seed, t)
        J = int(rng.integers(1, 5))
        amps = rng.standard_normal(J)
        centers = rng.uniform(-3.0, 3.0, J)
        widths = rng.uniform(0.3, 2.0, J)
        return bump_quotient(amps, centers, widths, n)

    quotients = run_trials(one, trials, workers)
    rows = [{"trial": t, "quotient": q} for t, q in enumerate(quotients) if q is not None]
    if not rows:
        raise ConfigurationError("every trial had a zero denominator")
    worst = min(rows, key=lambda r: r["quotient"])
    family = {str(d): radial_rayleigh_quotient(*near_extremal_family(d, n), n) for d in deltas}
    return InequalityReport(
        name="hardy",
        lhs=bound,
        rhs=worst["quotient"],
        passed=bool(worst["quotient"] >= bound * (1 - tol.hardy_rel)),
        fitted_constant=worst["quotient"],
        seed=seed,
        sizes={"n": n, "trials": trials},
        tolerances={"hardy_rel": tol.hardy_rel},
        metadata={
            "hardy_constant": bound,
            "worst_trial": worst["trial"],
            "skipped_trials": trials - len(rows),
            "near_extremal_quotients": family,
        },
        rows=rows,
    )


# -- scattering ----------------------------------------------------------------


def _unit_vectors(rng, size):
    v = rng.standard_normal((size, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]


def _ball_points(rng, size, radius):
    return _unit_vectors(rng, size) * (radius * rng.uniform(0.0, 1.0, size) ** (1 / 3))[:, None]


def _mean_and_se(total, total_sq, n):
    mean = total / n
    var = max(total_sq / n - mean ** 2, 0.0)
    return mean, math.sqrt(var / n)


def _check_finite(samples, what):
    if not np.all(np.isfinite(samples)):
        raise NumericalError(f"non-finite samples while estimating {what}; V may not be integrable")


def _check_dominance(largest, total, n, what):
    # for an integrable V the largest sample's share decays with n; when it stays
    # at a few percent the estimate is driven by the singularity, not the mean
    if n >= _MIN_DOMINANCE_SAMPLES and total > 0 and largest > _DOMINANCE_SHARE * total:
        raise NumericalError(
            f"a single sample carries {largest / total:.1%} of the estimate of {what}; "
            "V may not be integrable, or increase n_samples",
            share=largest / total,
            n_samples=n,
        )


def coulomb_integral(V, x, n_samples, seed, key=0):
    """Monte Carlo int |V(y)| / |x - y| dy with (estimate, standard error).

    y = x + rho*omega with rho uniform on [0, |x| + R] and omega uniform on the
    sphere: the volume element rho^2 cancels the singularity, leaving the
    bounded integrand 4 pi rho_max rho |V(y)|.
    """
    x = np.asarray(x, dtype=float)
    rho_max = float(np.linalg.norm(x)) + V.support_radius
    total = total_sq = largest = 0.0
    done = chunk = 0
    while done < n_samples:
        size = min(_CHUNK, n_samples - done)
        rng = stream(seed, 2, key, chunk)
        rho = rng.uniform(0.0, rho_max, size)
        y = x + rho[:, None] * _unit_vectors(rng, size)
        s = 4 * math.pi * rho_max * rho * np.abs(V(y))
        total += float(s.sum())
        total_sq += float(np.dot(s, s))
        _check_finite(s, "sup_x int |V(y)|/|x-y| dy")
        largest = max(largest, float(np.max(s)))
        done += size
        chunk += 1
    _check_dominance(largest, total, n_samples, "sup_x int |V(y)|/|x-y| dy")
    return _mean_and_se(total, total_sq, n_samples)


def rollnik_integral(V, n_samples, seed):
    """Monte Carlo int int |V(x)||V(y)| / |x-y|^2 dx dy with (estimate, standard error).

    x is uniform in the support ball; y = x + rho*omega as in coulomb_integral,
    where the volume element rho^2 exactly cancels |x-y|^{-2}.
    """
    R = V.support_radius
    vol = 4 / 3 * math.pi * R ** 3
    total = total_sq = largest = 0.0
    done = chunk = 0
    while done < n_samples:
        size = min(_CHUNK, n_samples - done)
        rng = stream(seed, 1, chunk)
        x = _ball_points(rng, size, R)
        rho_max = np.linalg.norm(x, axis=1) + R
        rho = rng.uniform(0.0, 1.0, size) * rho_max
        y = x + rho[:, None] * _unit_vectors(rng, size)
        s = vol * 4 * math.pi * rho_max * np.abs(V(x)) * np.abs(V(y))
        total += float(s.sum())
        total_sq += float(np.dot(s, s))
        _check_finite(s, "int int |V(x)||V(y)|/|x-y|^2")
        largest = max(largest, float(np.max(s)))
        done += size
        chunk += 1
    _check_dominance(largest, total, n_samples, "int int |V(x)||V(y)|/|x-y|^2")
    return _mean_and_se(total, total_sq, n_samples)


def default_candidates(V, count=9):
    R = V.support_radius
    if V.radial:
        r = np.linspace(0.0, R, count)
        return np.column_stack([r, np.zeros_like(r), np.zeros_like(r)])
    s = np.linspace(-R, R, 5)
    return np.array(np.meshgrid(s, s, s, indexing="ij")).reshape(3, -1).T


def scattering_condition_check(V, n_samples, seed, candidates=None, tol=DEFAULT_TOLERANCES):
    """Both 3-D scattering conditions, each required to hold by tol.mc_sigmas standard errors."""
    if V.dimension != 3:
        raise ConfigurationError("scattering conditions are stated in dimension 3")
    if V.support_radius is None or not V.support_radius > 0:
        raise ConfigurationError("potential needs a finite support radius")
    if n_samples < 1:
        raise ConfigurationError("need at least one sample")
    cands = default_candidates(V) if candidates is None else np.atleast_2d(np.asarray(candidates, float))
    i1, se1 = rollnik_integral(V, n_samples, seed)
    i2 = [coulomb_integral(V, x, n_samples, seed, key=j) for j, x in enumerate(cands)]
    j = int(np.argmax([est for est, _ in i2]))
    sup_i2, se2 = i2[j]
    b1, b2 = (4 * math.pi) ** 2, 4 * math.pi
    k = tol.mc_sigmas
    cond1 = i1 + k * se1 < b1
    cond2 = sup_i2 + k * se2 < b2
    return InequalityReport(
        name="scattering",
        lhs=max(i1 / b1, sup_i2 / b2),
        rhs=1.0,
        passed=bool(cond1 and cond2),
        seed=seed,
        sizes={"n_samples": n_samples, "n_candidates": int(cands.shape[0])},
        tolerances={"mc_sigmas": k},
        metadata={
            "potential": V.name,
            "rollnik": i1,
            "rollnik_se": se1,
            "rollnik_bound": b1,
            "condition1": bool(cond1),
            "sup_coulomb": sup_i2,
            "sup_coulomb_se": se2,
            "sup_coulomb_at": cands[j].tolist(),
            "coulomb_bound": b2,
            "condition2": bool(cond2),
        },
        rows=[
            {"x": float(c[0]), "y": float(c[1]), "z": float(c[2]), "estimate": e, "se": s}
            for c, (e, s) in zip(cands, i2)
        ],
    )
