"""Central tolerance record and seeded random streams."""

from dataclasses import dataclass, fields, replace, asdict

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Tolerances:
    # eigensolver
    bisection_rel_width: float = 1e-12
    bisection_max_iter: int = 200
    cluster_rel_gap: float = 1e-8
    zero_pivot: float = 1e-300
    # spectral models
    gram_defect: float = 5e-7
    merge_rel: float = 1e-9
    # checks
    rm_ceiling: float = 10.0
    intrablock_ceiling: float = 10.0
    stability_rel: float = 0.25
    r2_min: float = 0.9
    flat_exponent: float = 0.1
    count_inflation: float = 0.05
    blocking_increment: float = 1e-6
    hardy_rel: float = 1e-3
    power_tol: float = 1e-10
    power_max_iter: int = 10000
    mc_sigmas: float = 3.0
    phase_exponent_abs: float = 0.1

    def override(self, **changes):
        known = {f.name: f.type for f in fields(self)}
        bad = sorted(set(changes) - set(known))
        if bad:
            raise ConfigurationError(f"unknown tolerance keys: {', '.join(bad)}")
        cast = {}
        for key, value in changes.items():
            default = getattr(self, key)
            cast[key] = type(default)(value)
        return replace(self, **cast)

    def as_dict(self):
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()


def stream(seed, *keys):
    """Counter-based generator for the substream identified by ``(seed, *keys)``.

    Streams for different keys are independent, so per-trial draws do not
    depend on how trials are scheduled.
    """
    if seed < 0 or any(k < 0 for k in keys):
        raise ConfigurationError("seed and stream keys must be non-negative")
    ss = np.random.SeedSequence([int(seed), *(int(k) for k in keys)])
    return np.random.Generator(np.random.Philox(ss))


def run_trials(fn, n, workers=1):
    """Evaluate ``fn(0), ..., fn(n-1)`` and return results in index order."""
    if workers is None or workers <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n)))
