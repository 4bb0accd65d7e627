"""InequalityReport: the record every check returns, with JSON/CSV output."""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__


def _clean(value):
    """Convert numpy scalars/arrays to JSON-safe builtins; non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


@dataclass
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    passed: bool
    fitted_constant: float | None = None
    fitted_exponent: float | None = None
    seed: int | None = None
    sizes: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    @property
    def ratio(self):
        if self.rhs > 0:
            return self.lhs / self.rhs
        if self.lhs == 0:
            return 0.0
        return math.inf

    def to_dict(self):
        return _clean(
            {
                "name": self.name,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "ratio": self.ratio,
                "fitted_constant": self.fitted_constant,
                "fitted_exponent": self.fitted_exponent,
                "pass": bool(self.passed),
                "seed": self.seed,
                "sizes": self.sizes,
                "tolerances": self.tolerances,
                "metadata": self.metadata,
                "tool_version": __version__,
            }
        )

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def rows_csv(self):
        if not self.rows:
            return ""
        buf = io.StringIO()
        columns = list(self.rows[0])
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt(row[k]) for k in columns})
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def fit_power_law(x, y):
    """Least-squares fit of log y = log C + p log x.

    Returns (p, C, r2). r2 is 1.0 when y is exactly constant.
    """
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 2:
        raise ValueError("need at least two points for a fit")
    A = np.column_stack([lx, np.ones_like(lx)])
    (p, logc), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (p * lx + logc)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(p), float(np.exp(logc)), r2
