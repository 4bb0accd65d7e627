"""Operator norms of band-limited multipliers localized to a window."""

import math

import numpy as np

from ..config import DEFAULT_TOLERANCES, stream
from ..errors import ConfigurationError, NumericalError
from ..grid import Window
from ..report import InequalityReport, fit_power_law
from ..spectral import BandFilter

MODES = ("band", "ball")


def power_iteration(A, tol=DEFAULT_TOLERANCES, seed=0):
    """Largest eigenvalue of the symmetric positive semi-definite matrix A.

    Iterates until the Rayleigh quotient changes by less than ``tol.power_tol``
    (relative); raises NumericalError if that does not happen within
    ``tol.power_max_iter`` steps.
    """
    n = A.shape[0]
    if n == 0:
        return 0.0
    x = np.abs(stream(seed, n).standard_normal(n)) + 1.0
    x /= np.linalg.norm(x)
    prev = None
    for _ in range(tol.power_max_iter):
        y = A @ x
        rq = float(np.dot(x, y))
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            return 0.0
        x = y / nrm
        if prev is not None and abs(rq - prev) <= tol.power_tol * max(abs(rq), np.finfo(float).tiny):
            return float(np.dot(x, A @ x))
        prev = rq
    raise NumericalError(
        "power iteration stagnated", iterations=tol.power_max_iter, last_estimate=prev
    )


def top_eigenvalue(N, tol=DEFAULT_TOLERANCES, max_squarings=8):
    """Largest eigenvalue of the PSD matrix N by power iteration.

    When the top of the spectrum is clustered the iteration can stall; it is
    then rerun on (N/s)^2, which squares the eigenvalue ratios, and the result
    is mapped back through lambda(N) = s * sqrt(lambda((N/s)^2)).
    """
    try:
        return power_iteration(N, tol)
    except NumericalError:
        if max_squarings == 0:
            raise
    s = float(np.max(np.sum(np.abs(N), axis=1)))
    if s == 0.0:
        return 0.0
    B = N / s
    return s * math.sqrt(max(top_eigenvalue(B @ B, tol, max_squarings - 1), 0.0))


def window_gram(model, K):
    """G[i, j] = <chi_K phi_i, phi_j> on the modeled span."""
    w = np.where(K.mask, model.grid.weights, 0.0)
    return model.basis.T @ (w[:, None] * model.basis)


def localized_multiplier_norm(model, K, F, tol=DEFAULT_TOLERANCES):
    """||F(L) chi_K|| with F(L) chi_K realized on the modeled span.

    A = D_F G_K (mask, synthesize, re-analyze, multiply); only rows in the band
    of F are non-zero, so the norm is sqrt of the top eigenvalue of A_b A_b^T.
    """
    d = F(model.column_eigenvalues)
    band = np.flatnonzero(d)
    if band.size == 0:
        return 0.0, 0
    G = window_gram(model, K)
    A_b = d[band, None] * G[band, :]
    top = top_eigenvalue(A_b @ A_b.T, tol)
    return math.sqrt(max(top, 0.0)), int(band.size)


def plancherel_check(model, K, M_list, m=1, mode="band", fn=None, center=None, tol=DEFAULT_TOLERANCES):
    """Measure ||F(L^{1/m}) chi_K|| / ||F(M .)||_2 across M and fit a power law in M.

    mode "band": supp F in [M/4, M], fixed window K.
    mode "ball": supp F in [0, M], window the ball of radius 1/M around ``center``.
    F defaults to the indicator of its support.

    Passes when the log-log fit has R^2 >= tol.r2_min, or when the norms are
    flat: the exponent fitted over the upper half of the M values is below
    tol.flat_exponent in magnitude.
    """
    if mode not in MODES:
        raise ConfigurationError(f"unknown plancherel mode {mode!r}; choose from {MODES}")
    if m < 1:
        raise ConfigurationError("root order m must be >= 1")
    if not M_list:
        raise ConfigurationError("M_list is empty")
    fn = np.ones_like if fn is None else fn
    x = model.grid.points
    if center is None:
        sel = x[K.mask]
        center = 0.5 * (sel[0] + sel[-1])
    top = float(model.eigenvalues[-1]) ** (1.0 / m)
    rows, empty, truncated = [], [], []
    for M in M_list:
        M = float(M)
        if not M > 1:
            raise ConfigurationError(f"every M must exceed 1, got {M}")
        if mode == "band":
            F = BandFilter(fn, (M / 4, M), m)
            window = K
        else:
            F = BandFilter(fn, (0.0, M), m)
            ball = np.abs(x - center) < 1.0 / M
            if not ball.any():
                empty.append(M)
                continue
            window = Window(ball)
        if M > top:
            truncated.append(M)
        lhs, n_band = localized_multiplier_norm(model, window, F, tol)
        rhs = F.scaled_l2_norm(M)
        if n_band == 0 or lhs == 0.0:
            empty.append(M)
            continue
        rows.append({"M": M, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs, "band_modes": n_band})
    if not rows:
        raise ConfigurationError("no value of M produced a band containing an eigenvalue")
    Ms = np.array([r["M"] for r in rows])
    ratios = np.array([r["ratio"] for r in rows])
    if len(rows) >= 2:
        a, C, r2 = fit_power_law(Ms, ratios)
    else:
        a, C, r2 = 0.0, float(ratios[0]), 1.0
    # flatness is judged where M is large: the upper half of the usable M values
    upper = slice(len(rows) // 2, None) if len(rows) >= 4 else slice(None)
    a_upper = fit_power_law(Ms[upper], ratios[upper])[0] if len(rows) >= 2 else 0.0
    flat = abs(a_upper) < tol.flat_exponent
    worst = max(rows, key=lambda r: r["ratio"])
    return InequalityReport(
        name="plancherel",
        lhs=worst["lhs"],
        rhs=worst["rhs"],
        passed=bool(r2 >= tol.r2_min or flat),
        fitted_constant=C,
        fitted_exponent=a,
        sizes={"n_modes": model.n_functions, "n_M": len(M_list), "n_points": len(model.grid)},
        tolerances={"r2_min": tol.r2_min, "flat_exponent": tol.flat_exponent, "power_tol": tol.power_tol},
        metadata={
            "label": model.label,
            "mode": mode,
            "m": m,
            "r2": r2,
            "flat": bool(flat),
            "upper_half_exponent": a_upper,
            "empty_bands": empty,
            "beyond_modeled_spectrum": truncated,
            "window_points": int(np.count_nonzero(K.mask)),
            "center": float(center),
        },
        rows=[{k: r[k] for k in ("M", "lhs", "rhs", "ratio")} for r in rows],
    )
