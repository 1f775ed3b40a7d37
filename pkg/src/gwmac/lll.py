"""Lattice basis reduction and a small brute-force enumeration oracle.

The integer equation coefficients of the decoder are the columns of the
unimodular transform returned by :func:`lll_reduce`.  The reduction runs on a
floating-point Gram-Schmidt orthogonalisation (recomputed by QR after swaps,
with a re-orthogonalisation pass if size-reduction drifts past 1e-6) and
tracks the integer transform exactly.  :func:`shortest_vectors_bruteforce`
enumerates a box of integer vectors and is the test oracle for shortest-vector
quality claims.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "Basis",
    "ReductionResult",
    "lll_reduce",
    "is_lll_reduced",
    "shortest_vectors_bruteforce",
    "integer_det",
]

_DEPENDENCE_RTOL = 1e-12
_CHECK_TOL = 1e-9
_DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class Basis:
    """Square generator matrix whose columns span the lattice."""

    columns: np.ndarray

    def __post_init__(self):
        cols = np.array(self.columns, dtype=float)
        cols.flags.writeable = False
        object.__setattr__(self, "columns", cols)
        if cols.ndim != 2 or cols.shape[0] != cols.shape[1] or cols.shape[0] < 1:
            raise ValueError("basis must be a square matrix of n >= 1 columns")
        if not np.all(np.isfinite(cols)):
            raise ValueError("basis entries must be finite")
        norms = np.linalg.norm(cols, axis=0)
        scale = float(np.prod(norms))
        if not (abs(float(np.linalg.det(cols))) > _DEPENDENCE_RTOL * scale):
            raise ValueError("basis columns are numerically dependent")

    @property
    def dimension(self) -> int:
        return self.columns.shape[0]


@dataclass(frozen=True)
class ReductionResult:
    """A reduced basis together with the exact integer change of basis.

    ``reduced.columns == original.columns @ transform`` up to float rounding,
    and ``transform`` has determinant +-1 (verified in exact arithmetic), so
    the generated lattice is unchanged.
    """

    reduced_basis: Basis
    transform: np.ndarray
    delta: float

    def __post_init__(self):
        t = np.array(self.transform, dtype=np.int64)
        t.flags.writeable = False
        object.__setattr__(self, "transform", t)
        if integer_det(t) not in (1, -1):
            raise ValueError("transform is not unimodular")


def integer_det(m: np.ndarray) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [[int(v) for v in row] for row in np.asarray(m)]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                a[r][c] = (a[r][c] * a[k][k] - a[r][k] * a[k][c]) // prev
            a[r][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _check_delta(delta: float) -> None:
    if not (0.25 < delta <= 1.0):
        raise ValueError(f"delta must lie in (1/4, 1], got {delta!r}")


def _gso(w: np.ndarray):
    """Gram-Schmidt data via QR: mu[i, j] = <b_i, b*_j>/|b*_j|^2 and |b*_i|^2."""
    r = np.linalg.qr(w, mode="r")
    d = np.diag(r).copy()
    mu = (r / d[:, None]).T
    return mu, d * d


def lll_reduce(basis: Basis, delta: float = 0.75) -> ReductionResult:
    """Reduce a lattice basis, returning the new basis and the unimodular
    transform that produces it.

    The working copy is scaled so the largest column norm is 1 (conditioning
    only; the integer transform is scale-free and returned unscaled).
    """
    _check_delta(delta)
    b = np.array(basis.columns, dtype=float)
    n = b.shape[1]
    w = b / float(np.max(np.linalg.norm(b, axis=0)))
    u = np.eye(n, dtype=np.int64)

    mu, c = _gso(w)
    k = 1
    guard = 10_000 * n * n
    while k < n:
        guard -= 1
        if guard < 0:
            raise RuntimeError("lattice reduction failed to terminate")
        for _ in range(2):
            for j in range(k - 1, -1, -1):
                q = np.rint(mu[k, j])
                if q != 0.0:
                    w[:, k] -= q * w[:, j]
                    u[:, k] -= np.int64(q) * u[:, j]
                    mu[k, :j] -= q * mu[j, :j]
                    mu[k, j] -= q
            if np.max(np.abs(mu[k, :k])) <= 0.5 + _DRIFT_TOL:
                break
            # incremental mu drifted; re-orthogonalise and reduce again
            mu, c = _gso(w)
        if k == 0 or c[k] >= (delta - mu[k, k - 1] ** 2) * c[k - 1]:
            k += 1
        else:
            w[:, [k - 1, k]] = w[:, [k, k - 1]]
            u[:, [k - 1, k]] = u[:, [k, k - 1]]
            mu, c = _gso(w)
            k = max(k - 1, 1)

    reduced = Basis(b @ u)
    result = ReductionResult(reduced, u, delta)
    if not is_lll_reduced(reduced, delta):
        raise RuntimeError("reduction postcondition failed (ill-conditioned basis)")
    return result


def is_lll_reduced(basis: Basis, delta: float, tol: float = _CHECK_TOL) -> bool:
    """Check size-reduction (|mu| <= 1/2) and the Lovasz condition at ``tol``."""
    _check_delta(delta)
    w = basis.columns / float(np.max(np.linalg.norm(basis.columns, axis=0)))
    mu, c = _gso(w)
    n = w.shape[1]
    for k in range(1, n):
        if np.max(np.abs(mu[k, :k])) > 0.5 + tol:
            return False
        if c[k] < (delta - mu[k, k - 1] ** 2) * c[k - 1] - tol * c[k - 1]:
            return False
    return True


def shortest_vectors_bruteforce(
    gram: np.ndarray, box: int
) -> list[tuple[np.ndarray, float]]:
    """All nonzero integer vectors with max-norm <= ``box``, sorted by the
    quadratic value a' * gram * a ascending, ties in lexicographic order.

    Desk-scale oracle: refuses n > 5 or box > 10 (the enumeration grows as
    (2 box + 1)^n).
    """
    gram = np.asarray(gram, dtype=float)
    n = gram.shape[0]
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise ValueError("gram matrix must be square")
    if not np.allclose(gram, gram.T, rtol=1e-12, atol=0.0):
        raise ValueError("gram matrix must be symmetric")
    if n > 5:
        raise ValueError(f"n={n} exceeds the brute-force limit of 5")
    if not (1 <= box <= 10):
        raise ValueError(f"box={box} outside the brute-force limit [1, 10]")
    np.linalg.cholesky(gram)  # positive definiteness guard

    side = np.arange(-box, box + 1, dtype=np.int64)
    grids = np.meshgrid(*([side] * n), indexing="ij")
    vectors = np.stack([g.ravel() for g in grids], axis=1)
    vectors = vectors[np.any(vectors != 0, axis=1)]
    values = np.einsum("ij,jk,ik->i", vectors, gram, vectors)
    keys = tuple(vectors[:, col] for col in range(n - 1, -1, -1)) + (values,)
    order = np.lexsort(keys)
    return [(vectors[i].copy(), float(values[i])) for i in order]
