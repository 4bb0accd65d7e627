"""Symmetric tridiagonal eigensolver.

Eigenvalues are located by bisection on Sturm-sequence counts and then
refined with a Rayleigh quotient; eigenvectors come from inverse iteration,
with Gram-Schmidt inside clusters of (nearly) equal eigenvalues.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, stream
from .errors import DomainError, NumericalError, StructuralError

_START_VECTOR_KEY = 0x5EED


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float).copy()
        offdiag = np.asarray(self.offdiag, dtype=float).copy()
        if diag.ndim != 1 or diag.size < 1:
            raise StructuralError("diagonal must be a non-empty 1-D array")
        if offdiag.shape != (diag.size - 1,):
            raise StructuralError(
                f"off-diagonal must have length {diag.size - 1}, got {offdiag.size}"
            )
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
            raise DomainError("tridiagonal entries must be finite")
        diag.setflags(write=False)
        offdiag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def size(self):
        return self.diag.size

    def gershgorin(self):
        r = np.zeros(self.size)
        r[:-1] += np.abs(self.offdiag)
        r[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))

    def radius(self):
        lo, hi = self.gershgorin()
        return max(abs(lo), abs(hi))

    def matvec(self, v):
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self):
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def leading(self, k):
        """Leading k x k principal submatrix."""
        return TridiagonalMatrix(self.diag[:k], self.offdiag[: k - 1])


@dataclass(frozen=True, eq=False)
class EigenPairs:
    values: np.ndarray
    vectors: np.ndarray  # columns

    def __len__(self):
        return self.values.size

    def residuals(self, T):
        if len(self) == 0:
            return np.zeros(0)
        return np.array(
            [np.linalg.norm(T.matvec(self.vectors[:, j]) - self.values[j] * self.vectors[:, j])
             for j in range(len(self))]
        )

    def orthogonality_defect(self):
        if len(self) == 0:
            return 0.0
        G = self.vectors.T @ self.vectors
        return float(np.max(np.abs(G - np.eye(len(self)))))


def _counts(T, shifts, tiny):
    """Number of eigenvalues strictly below each shift (vectorized over shifts).

    Pivots that are exactly zero are replaced by +tiny; a positive pivot
    treats the shift as lying just below an eigenvalue, so ties are not counted.
    """
    shifts = np.asarray(shifts, dtype=float)
    a = T.diag
    b2 = T.offdiag ** 2
    d = a[0] - shifts
    d = np.where(d == 0.0, tiny, d)
    count = (d < 0).astype(np.int64)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        for i in range(1, a.size):
            d = (a[i] - shifts) - b2[i - 1] / d
            d = np.where(d == 0.0, tiny, d)
            # a pivot of -inf is followed by b2 / -inf = -0, which is harmless
            d = np.where(np.isnan(d), tiny, d)
            count += d < 0
    return count


def sturm_count(T, t, tol=DEFAULT_TOLERANCES):
    """Number of eigenvalues of T strictly less than t."""
    if not np.isfinite(t):
        raise DomainError(f"shift must be finite, got {t}")
    return int(_counts(T, np.array([float(t)]), tol.zero_pivot)[0])


def _bisect(T, indices, tol):
    """Brackets [lo_j, hi_j] around the eigenvalues with the given 0-based indices."""
    glo, ghi = T.gershgorin()
    radius = max(abs(glo), abs(ghi), np.finfo(float).tiny)
    pad = 2 * np.finfo(float).eps * radius + np.finfo(float).tiny
    target = tol.bisection_rel_width * radius
    idx = np.asarray(indices, dtype=np.int64)
    lo = np.full(idx.size, glo - pad)
    hi = np.full(idx.size, ghi + pad)
    active = np.ones(idx.size, dtype=bool)
    for _ in range(tol.bisection_max_iter):
        active &= hi - lo > target
        if not active.any():
            return lo, hi
        mid = 0.5 * (lo + hi)
        # stop where the interval cannot be split any further in floating point
        stuck = (mid <= lo) | (mid >= hi)
        active &= ~stuck
        if not active.any():
            return lo, hi
        c = _counts(T, mid[active], tol.zero_pivot)
        up = c >= idx[active] + 1
        act = np.flatnonzero(active)
        hi[act[up]] = mid[active][up]
        lo[act[~up]] = mid[active][~up]
    if np.any((hi - lo > target) & active):
        raise NumericalError(
            "bisection did not converge",
            iterations=tol.bisection_max_iter,
            worst_width=float(np.max(hi - lo)),
            target_width=target,
        )
    return lo, hi


class _ShiftedLU:
    """LU factorization with partial pivoting of T - sigma*I (tridiagonal)."""

    def __init__(self, T, sigma, guard):
        m = T.size
        d = list(T.diag - sigma)
        dl = list(T.offdiag)
        du = list(T.offdiag)
        du2 = [0.0] * max(m - 2, 0)
        swap = [False] * max(m - 1, 0)
        for i in range(m - 1):
            if abs(d[i]) >= abs(dl[i]):
                if d[i] == 0.0:
                    d[i] = guard
                fact = dl[i] / d[i]
                dl[i] = fact
                d[i + 1] -= fact * du[i]
            else:
                fact = d[i] / dl[i]
                d[i] = dl[i]
                dl[i] = fact
                temp = du[i]
                du[i] = d[i + 1]
                d[i + 1] = temp - fact * d[i + 1]
                if i < m - 2:
                    du2[i] = du[i + 1]
                    du[i + 1] = -fact * du[i + 1]
                swap[i] = True
        if d[m - 1] == 0.0:
            d[m - 1] = guard
        self.d, self.dl, self.du, self.du2, self.swap = d, dl, du, du2, swap
        self.m = m

    def solve(self, rhs):
        b = [float(v) for v in rhs]
        m, d, dl, du, du2 = self.m, self.d, self.dl, self.du, self.du2
        for i in range(m - 1):
            if self.swap[i]:
                b[i], b[i + 1] = b[i + 1], b[i] - dl[i] * b[i + 1]
            else:
                b[i + 1] -= dl[i] * b[i]
        b[m - 1] /= d[m - 1]
        if m > 1:
            b[m - 2] = (b[m - 2] - du[m - 2] * b[m - 1]) / d[m - 2]
        for i in range(m - 3, -1, -1):
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i]
        return np.array(b)


def _start_vector(index, m):
    return stream(_START_VECTOR_KEY, int(index)).standard_normal(m)


def _inverse_iteration(T, indices, lo, hi, tol, sweeps=3):
    m = T.size
    radius = max(T.radius(), np.finfo(float).tiny)
    guard = np.finfo(float).eps * radius
    values = np.empty(len(indices))
    vectors = np.empty((m, len(indices)))
    cluster_start = 0
    for j, index in enumerate(indices):
        sigma = 0.5 * (lo[j] + hi[j])
        if j > 0 and sigma - values[j - 1] >= tol.cluster_rel_gap * max(1.0, abs(sigma)):
            cluster_start = j
        if m == 1:
            values[j] = T.diag[0]
            vectors[:, j] = 1.0
            continue
        lu = _ShiftedLU(T, sigma, guard)
        x = _start_vector(index, m)
        for _ in range(sweeps):
            x = lu.solve(x)
            for p in range(cluster_start, j):
                x -= np.dot(vectors[:, p], x) * vectors[:, p]
            nrm = np.linalg.norm(x)
            if not np.isfinite(nrm) or nrm == 0.0:
                raise NumericalError("inverse iteration broke down", index=int(index), shift=sigma)
            x /= nrm
        # one more Gram-Schmidt pass keeps cluster members orthogonal to working precision
        for p in range(cluster_start, j):
            x -= np.dot(vectors[:, p], x) * vectors[:, p]
        x /= np.linalg.norm(x)
        vectors[:, j] = x
        rq = float(np.dot(x, T.matvec(x)))
        values[j] = min(max(rq, lo[j]), hi[j])
    return values, vectors


def _pairs_for_indices(T, indices, tol):
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        return EigenPairs(np.zeros(0), np.zeros((T.size, 0)))
    lo, hi = _bisect(T, indices, tol)
    values, vectors = _inverse_iteration(T, indices, lo, hi, tol)
    order = np.argsort(values, kind="stable")
    pairs = EigenPairs(values[order], vectors[:, order])
    _validate(T, pairs)
    return pairs


def _validate(T, pairs):
    res = pairs.residuals(T)
    bound = 1e-8 * (1.0 + np.abs(pairs.values))
    if np.any(res > bound):
        j = int(np.argmax(res / bound))
        raise NumericalError(
            "eigenpair residual above tolerance",
            index=j, residual=float(res[j]), bound=float(bound[j]),
        )
    defect = pairs.orthogonality_defect()
    if defect > 1e-8:
        raise NumericalError("eigenvectors lost orthogonality", defect=defect)


def eigen_range(T, lo, hi, tol=DEFAULT_TOLERANCES):
    """All eigenpairs of T with eigenvalue in [lo, hi)."""
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi})")
    first = sturm_count(T, lo, tol)
    last = sturm_count(T, hi, tol)
    return _pairs_for_indices(T, range(first, last), tol)


def lowest_eigenpairs(T, n, tol=DEFAULT_TOLERANCES):
    """The n smallest eigenpairs of T."""
    if not 0 <= n <= T.size:
        raise DomainError(f"cannot take {n} eigenpairs of a {T.size}x{T.size} matrix")
    return _pairs_for_indices(T, range(n), tol)
