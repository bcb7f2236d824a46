"""Small dense symmetric-matrix kernel for branch correlation matrices.

A correlation matrix holds the square roots of the pairwise power
correlation coefficients (unit diagonal, entries in [0, 1], positive
semidefinite).  The module provides a cyclic-Jacobi eigensolver, inverses
of principal submatrices, a semidefinite Cholesky factorization used by
the sampler, and a Markov-product ("Green's matrix") approximation of an
arbitrary correlation matrix, under which every principal-submatrix
inverse is tridiagonal.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import FitClampWarning, SingularMatrixError, ValidationError

__all__ = [
    "CorrelationMatrix",
    "EigenSpectrum",
    "eigenvalues_sym",
    "principal_submatrix_inverse",
    "greens_fit",
    "cholesky_psd",
]

_PSD_SLACK = -1e-10
_SYM_TOL = 1e-12


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric PSD matrix of sqrt power-correlation coefficients."""

    entries: NDArray[np.float64]

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"correlation matrix must be square, got {m.shape}")
        if m.shape[0] < 1:
            raise ValidationError("correlation matrix must be at least 1x1")
        if not np.all(np.abs(m - m.T) <= _SYM_TOL):
            raise ValidationError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(m), 1.0, rtol=0, atol=_SYM_TOL):
            raise ValidationError("correlation matrix must have unit diagonal")
        if m.min() < -_SYM_TOL or m.max() > 1.0 + _SYM_TOL:
            raise ValidationError("correlation entries must lie in [0, 1]")
        m = 0.5 * (m + m.T)
        np.fill_diagonal(m, 1.0)
        np.clip(m, 0.0, 1.0, out=m)
        if np.linalg.eigvalsh(m).min() < _PSD_SLACK * max(1.0, m.shape[0]):
            raise ValidationError("correlation matrix is not positive semidefinite")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "CorrelationMatrix":
        return cls(np.eye(dim))

    @classmethod
    def equal(cls, rho: float, dim: int) -> "CorrelationMatrix":
        if not 0.0 <= rho <= 1.0:
            raise ValidationError(f"rho must lie in [0, 1], got {rho}")
        m = np.full((dim, dim), math.sqrt(rho))
        np.fill_diagonal(m, 1.0)
        return cls(m)

    @classmethod
    def exponential(cls, rho: float, dim: int) -> "CorrelationMatrix":
        if not 0.0 <= rho <= 1.0:
            raise ValidationError(f"rho must lie in [0, 1], got {rho}")
        idx = np.arange(dim)
        m = math.sqrt(rho) ** np.abs(idx[:, None] - idx[None, :])
        return cls(m)

    @classmethod
    def from_markov_links(cls, links: NDArray[np.float64]) -> "CorrelationMatrix":
        """Build the Markov-product matrix c_ij = prod(links[i:j])."""
        t = np.asarray(links, dtype=float)
        dim = t.size + 1
        m = np.eye(dim)
        for i in range(dim):
            acc = 1.0
            for j in range(i + 1, dim):
                acc *= t[j - 1]
                m[i, j] = m[j, i] = acc
        return cls(m)

    def is_markov_product(self, tol: float = 1e-12) -> bool:
        m = self.entries
        for i in range(self.dim):
            for j in range(i + 2, self.dim):
                prod = np.prod(np.diag(m, 1)[i:j])
                if abs(m[i, j] - prod) > tol:
                    return False
        return True


@dataclass(frozen=True)
class EigenSpectrum:
    """Eigenvalues of a correlation matrix, descending order."""

    values: tuple[float, ...] = field(default=())

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(v < _PSD_SLACK for v in vals):
            raise ValidationError("spectrum has a significantly negative eigenvalue")
        if list(vals) != sorted(vals, reverse=True):
            raise ValidationError("spectrum must be sorted descending")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def sum_squares(self) -> float:
        return math.fsum(v * v for v in self.values)


def _jacobi_eigenvalues(a: NDArray[np.float64], max_sweeps: int = 100) -> NDArray[np.float64]:
    """Cyclic Jacobi rotations; returns unsorted eigenvalues."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if n == 1:
        return np.diag(a).copy()
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, np.sum(a * a) - np.sum(np.diag(a) ** 2)))
        if off <= 1e-14 * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
    return np.diag(a).copy()


def eigenvalues_sym(m: CorrelationMatrix) -> EigenSpectrum:
    """Eigenvalues of a correlation matrix by cyclic Jacobi rotation.

    Tiny negative values inside the PSD slack are clamped to zero.
    """
    vals = _jacobi_eigenvalues(m.entries)
    vals[(vals < 0.0) & (vals >= _PSD_SLACK * max(1.0, m.dim))] = 0.0
    vals = np.sort(vals)[::-1]
    return EigenSpectrum(tuple(vals))


def principal_submatrix_inverse(m: CorrelationMatrix,
                                idx: tuple[int, ...]) -> NDArray[np.float64]:
    """Inverse of the principal submatrix selected by a strictly increasing
    3- or 4-element index set.

    When the source matrix carries the Markov product structure the result
    is tridiagonal to within roundoff.
    """
    idx = tuple(int(i) for i in idx)
    if len(idx) not in (3, 4):
        raise ValidationError(f"index set must have size 3 or 4, got {len(idx)}")
    if any(idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
        raise ValidationError("index set must be strictly increasing")
    if idx[0] < 0 or idx[-1] >= m.dim:
        raise ValidationError(f"index set {idx} out of range for dim {m.dim}")
    sub = m.entries[np.ix_(idx, idx)]
    try:
        inv = np.linalg.inv(sub)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"principal submatrix {idx} is singular") from exc
    residual = np.abs(sub @ inv - np.eye(len(idx))).max()
    if not residual < 1e-8:
        raise SingularMatrixError(
            f"principal submatrix {idx} is numerically singular "
            f"(inverse residual {residual:.2e})")
    return 0.5 * (inv + inv.T)


def greens_fit(m: CorrelationMatrix) -> CorrelationMatrix:
    """Approximate a correlation matrix by the nearest Markov-product matrix.

    The fitted matrix has c_ij = prod(t_k, k=i..j-1) with link weights
    t_k in [0, 1], chosen by coordinate descent on the Frobenius misfit,
    initialized at the first superdiagonal.  Exact Markov-product inputs
    (exponential correlation in particular) are returned unchanged, which
    makes the fit idempotent.
    """
    n = m.dim
    if n <= 2:
        return m
    target = m.entries
    t = np.diag(target, 1).copy()
    clamped = False

    def objective(links: NDArray[np.float64]) -> float:
        total = 0.0
        for i in range(n):
            acc = 1.0
            for j in range(i + 1, n):
                acc *= links[j - 1]
                total += (acc - target[i, j]) ** 2
        return total

    prev_obj = objective(t)
    for _ in range(100):
        for k in range(n - 1):
            # pairs (i, j) spanning link k: i <= k < j; misfit is quadratic in t_k
            num = 0.0
            den = 0.0
            for i in range(k + 1):
                for j in range(k + 1, n):
                    other = 1.0
                    for l in range(i, j):
                        if l != k:
                            other *= t[l]
                    num += other * target[i, j]
                    den += other * other
            if den <= 0.0:
                continue
            tk = num / den
            if tk < 0.0 or tk > 1.0:
                clamped = True
                tk = min(1.0, max(0.0, tk))
            t[k] = tk
        obj = objective(t)
        if prev_obj - obj <= 1e-10 * max(prev_obj, 1e-300):
            break
        prev_obj = obj

    if clamped:
        warnings.warn(
            "Markov link weights were clamped into [0, 1] during the fit",
            FitClampWarning,
            stacklevel=2,
        )
    return CorrelationMatrix.from_markov_links(t)


def cholesky_psd(m: CorrelationMatrix) -> NDArray[np.float64]:
    """Lower-triangular factor L with L @ L.T equal to the matrix.

    Rank-deficient inputs (for example maximal correlation) are handled by
    zeroing the columns whose pivot vanishes, which is exact for positive
    semidefinite matrices.
    """
    a = m.entries
    n = m.dim
    low = np.zeros((n, n))
    tol = 1e-12
    for k in range(n):
        d = a[k, k] - float(low[k, :k] @ low[k, :k])
        if d <= tol:
            if d < _PSD_SLACK * max(1.0, n):
                raise ValidationError(
                    f"matrix is indefinite (pivot {d:.2e} at column {k})")
            continue
        low[k, k] = math.sqrt(d)
        if k + 1 < n:
            low[k + 1:, k] = (a[k + 1:, k] - low[k + 1:, :k] @ low[k, :k]) / low[k, k]
    return low
