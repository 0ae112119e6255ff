"""Dense and tridiagonal linear algebra kernel.

Everything here is a pure function of its inputs.  Matrices are plain
``numpy.ndarray`` objects (or ``scipy.sparse`` arrays where only
matrix-vector products are needed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import InvalidInput, NotSymmetric, NumericalFailure

EPS = np.finfo(float).eps
BREAKDOWN = 1e-12
SYMMETRY_TOL = 1e-12
_MAX_QL_SWEEPS = 60


@dataclass(frozen=True, eq=False)
class SymTridiag:
    """Symmetric tridiagonal matrix stored by its two diagonals."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).ravel()
        e = np.asarray(self.offdiag, dtype=float).ravel()
        if d.size < 1:
            raise InvalidInput("tridiagonal matrix needs at least one row")
        if e.size != d.size - 1:
            raise InvalidInput(f"offdiag has length {e.size}, expected {d.size - 1}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise InvalidInput("non-finite entry in tridiagonal matrix")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        if self.n > 1:
            out += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return out


def _as_tridiag(t) -> SymTridiag:
    if isinstance(t, SymTridiag):
        return t
    diag, offdiag = t
    return SymTridiag(diag, offdiag)


def _implicit_ql(d: list, e: list, on_rotation) -> None:
    """Implicit-shift QL sweeps in place on ``d`` (diagonal) and ``e``.

    ``e[i]`` couples rows i and i+1; ``e[-1]`` is scratch.  ``on_rotation(i, s, c)``
    is called for every plane rotation acting on columns i, i+1 so callers can
    track as many eigenvector rows as they need.
    """
    n = len(d)
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > _MAX_QL_SWEEPS:
                raise NumericalFailure(f"QL failed to converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                on_rotation(i, s, c)
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def sym_tridiag_eigen(t, vectors: bool = False):
    """Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.

    Parameters
    ----------
    t : SymTridiag or (diag, offdiag)
    vectors : bool
        Also return the full orthogonal eigenvector matrix (columns).

    Returns
    -------
    eigenvalues : (n,) ndarray, ascending
    first_components : (n,) ndarray
        First entry of each normalized eigenvector, sign-fixed to be >= 0.
    Q : (n, n) ndarray, only when ``vectors`` is true
    """
    t = _as_tridiag(t)
    n = t.n
    d = t.diag.tolist()
    e = t.offdiag.tolist() + [0.0]

    if vectors:
        z = np.eye(n)

        def rotate(i, s, c):
            f = z[:, i + 1].copy()
            z[:, i + 1] = s * z[:, i] + c * f
            z[:, i] = c * z[:, i] - s * f

    else:
        row = [0.0] * n
        row[0] = 1.0

        def rotate(i, s, c):
            f = row[i + 1]
            row[i + 1] = s * row[i] + c * f
            row[i] = c * row[i] - s * f

    _implicit_ql(d, e, rotate)

    order = np.argsort(np.asarray(d), kind="stable")
    evals = np.asarray(d)[order]
    if vectors:
        z = z[:, order]
        signs = np.where(z[0] < 0, -1.0, 1.0)
        z = z * signs
        return evals, z[0].copy(), z
    first = np.abs(np.asarray(row)[order])
    return evals, first


def householder_tridiagonalize(m: np.ndarray, accumulate: bool = False):
    """Reduce a symmetric matrix to tridiagonal form by Householder reflections.

    The reflections never touch coordinate 0, so ``Q e_0 = e_0``: the first
    components of the tridiagonal eigenvectors are those of ``m`` itself.

    Returns ``(diag, offdiag)`` or ``(diag, offdiag, Q)`` with ``m = Q T Q^T``.
    """
    a = np.array(m, dtype=float, copy=True)
    n = a.shape[0]
    q = np.eye(n) if accumulate else None
    for k in range(n - 2):
        x = a[k + 1 :, k]
        sigma = float(np.linalg.norm(x))
        if sigma == 0.0:
            continue
        alpha = -math.copysign(sigma, x[0])
        v = x.copy()
        v[0] -= alpha
        vnorm2 = float(v @ v)
        if vnorm2 == 0.0:
            continue
        sub = a[k + 1 :, k + 1 :]
        # H sub H with H = I - 2 v v^T / (v^T v), as a rank-2 update
        w = sub @ v * (2.0 / vnorm2)
        kcoef = float(v @ w) / vnorm2
        w -= kcoef * v
        sub -= np.outer(v, w) + np.outer(w, v)
        a[k + 1 :, k + 1 :] = sub
        a[k + 1, k] = a[k, k + 1] = alpha
        a[k + 2 :, k] = 0.0
        a[k, k + 2 :] = 0.0
        if q is not None:
            qs = q[:, k + 1 :]
            q[:, k + 1 :] = qs - np.outer(qs @ v, v) * (2.0 / vnorm2)
    diag = np.diag(a).copy()
    offdiag = np.diag(a, 1).copy() if n > 1 else np.zeros(0)
    if accumulate:
        return diag, offdiag, q
    return diag, offdiag


def check_symmetric(m, tol: float = SYMMETRY_TOL) -> None:
    if sp.issparse(m):
        diff = abs(m - m.T)
        worst = diff.max() if diff.nnz else 0.0
    else:
        arr = np.asarray(m, dtype=float)
        worst = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
    if worst > tol:
        raise NotSymmetric(f"matrix asymmetric by {worst:.3e} (tolerance {tol:.0e})")


def _check_finite_square(m) -> None:
    shape = m.shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {shape}")
    data = m.data if sp.issparse(m) else np.asarray(m)
    if not np.all(np.isfinite(data)):
        raise InvalidInput("non-finite matrix entry")


def sym_eigen(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a dense symmetric matrix.

    Householder reduction followed by implicit QL.  Returns ascending
    eigenvalues and the matching orthonormal eigenvectors as columns.
    """
    arr = np.asarray(m, dtype=float)
    _check_finite_square(arr)
    check_symmetric(arr, tol=1e-9 * max(1.0, float(np.max(np.abs(arr)))))
    arr = (arr + arr.T) / 2.0
    diag, offdiag, q = householder_tridiagonalize(arr, accumulate=True)
    evals, _, z = sym_tridiag_eigen(SymTridiag(diag, offdiag), vectors=True)
    return evals, q @ z


def mat_power_apply(m, v, k: int) -> np.ndarray:
    """Return ``m^k v`` by ``k`` successive matrix-vector products."""
    if k < 0:
        raise InvalidInput("power must be nonnegative")
    shape = m.shape
    vec = np.asarray(v, dtype=float)
    if len(shape) != 2 or shape[0] != shape[1] or vec.shape != (shape[1],):
        raise InvalidInput(f"dimension mismatch: matrix {shape}, vector {vec.shape}")
    out = vec.copy()
    for _ in range(k):
        out = m @ out
    return np.asarray(out, dtype=float)


def lanczos(m, v0, depth: int, breakdown: float = BREAKDOWN):
    """Lanczos tridiagonalization with full reorthogonalization.

    Parameters
    ----------
    m : symmetric (n, n) matrix, dense or sparse
    v0 : (n,) unit starting vector
    depth : int
        Maximum number of Krylov vectors, ``1 <= depth <= n``.

    Returns
    -------
    alpha : (k,) ndarray
    beta : (k-1,) ndarray, all entries > 0
        ``k < depth`` when the Krylov space is exhausted (``beta < breakdown``).
    """
    _check_finite_square(m)
    n = m.shape[0]
    check_symmetric(m)
    q = np.asarray(v0, dtype=float).ravel()
    if q.shape != (n,):
        raise InvalidInput(f"start vector has shape {q.shape}, expected ({n},)")
    if abs(float(np.linalg.norm(q)) - 1.0) > 1e-12:
        raise InvalidInput("start vector must have unit norm")
    if not 1 <= depth <= n:
        raise InvalidInput(f"depth must lie in [1, {n}], got {depth}")

    basis = np.zeros((n, depth))
    basis[:, 0] = q
    alpha = []
    beta = []
    for j in range(depth):
        w = np.asarray(m @ basis[:, j], dtype=float)
        a = float(basis[:, j] @ w)
        alpha.append(a)
        if j == depth - 1:
            break
        w -= a * basis[:, j]
        if j > 0:
            w -= beta[-1] * basis[:, j - 1]
        # two passes of classical Gram-Schmidt against every previous vector
        for _ in range(2):
            w -= basis[:, : j + 1] @ (basis[:, : j + 1].T @ w)
        b = float(np.linalg.norm(w))
        if b < breakdown:
            break
        beta.append(b)
        basis[:, j + 1] = w / b
    return np.asarray(alpha), np.asarray(beta)


def tridiag_moments(alpha, beta, count: int, lower: Optional[np.ndarray] = None) -> np.ndarray:
    """Moments ``<e_0, T^k e_0>`` for ``k < count`` of a tridiagonal ``T``.

    With ``lower`` given, ``beta`` is read as the superdiagonal and ``lower``
    as the subdiagonal of a non-symmetric tridiagonal matrix.
    """
    alpha = np.asarray(alpha, dtype=float)
    upper = np.asarray(beta, dtype=float)
    low = upper if lower is None else np.asarray(lower, dtype=float)
    n = alpha.size
    vec = np.zeros(n)
    vec[0] = 1.0
    out = np.empty(count)
    for k in range(count):
        out[k] = vec[0]
        nxt = alpha * vec
        if n > 1:
            nxt[:-1] += upper * vec[1:]
            nxt[1:] += low * vec[:-1]
        vec = nxt
    return out
