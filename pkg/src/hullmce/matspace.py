"""Dense linear algebra over a FieldCtx.

Matrices are field arrays of shape ``(rows, cols, d)``.  Matrix spaces are
identified with row vectors through row-major flattening: the entry (i, j)
of an m x n matrix is coordinate ``i * n + j``.  Every dual, kernel and
dictionary key in the package goes through that one isomorphism.

A subspace is stored as the nonzero rows of its reduced row echelon form,
so two subspaces are equal iff their basis arrays are equal.
"""

from __future__ import annotations

import numpy as np

from . import poly
from .errors import DimensionMismatch, RetryExhausted, Singular
from .field import FieldCtx

INVERTIBLE_RETRIES = 256


def rref(F: FieldCtx, M):
    """Reduced row echelon form: returns ``(R, rank, pivot_columns)``."""
    R = np.array(M, dtype=np.int64, copy=True)
    rows, cols = R.shape[:2]
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c].any(axis=-1))
        if not nz.size:
            continue
        p = r + nz[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = F.mul(F.inv(R[r, c]), R[r])
        col = R[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col.any(axis=-1))
        if hit.size:
            R[hit] = F.sub(R[hit], F.mul(col[hit][:, None, :], R[r][None, :, :]))
        pivots.append(c)
        r += 1
    return R, r, pivots


def rank(F: FieldCtx, M) -> int:
    return rref(F, M)[1]


def row_space(F: FieldCtx, M):
    """Canonical basis (RREF without zero rows) of the span of the rows of M."""
    R, r, _ = rref(F, M)
    return R[:r]


def kernel(F: FieldCtx, M):
    """RREF basis of the right kernel {x : M x = 0}, shape (dim, cols, d)."""
    M = np.asarray(M)
    cols = M.shape[1]
    R, r, pivots = rref(F, M)
    piv = set(pivots)
    free = [c for c in range(cols) if c not in piv]
    K = F.zeros((len(free), cols))
    for i, f in enumerate(free):
        K[i, f] = F.one()
        for row, p in enumerate(pivots):
            K[i, p] = F.neg(R[row, f])
    return row_space(F, K) if len(free) else K


def mat_inverse(F: FieldCtx, M):
    M = np.asarray(M)
    m = M.shape[0]
    if M.shape[1] != m:
        raise DimensionMismatch("inverse of a non-square matrix")
    R, r, pivots = rref(F, np.concatenate([M, F.eye(m)], axis=1))
    if r < m or pivots[m - 1] != m - 1:
        raise Singular("matrix is not invertible")
    return R[:, m:]


def is_invertible(F: FieldCtx, M) -> bool:
    M = np.asarray(M)
    return M.shape[0] == M.shape[1] and rank(F, M) == M.shape[0]


def solve(F: FieldCtx, A, B):
    """One solution X of A X = B (B may be a vector or a matrix)."""
    A = np.asarray(A)
    B = np.asarray(B)
    vec = B.ndim == 2
    if vec:
        B = B[:, None, :]
    n = A.shape[1]
    R, r, pivots = rref(F, np.concatenate([A, B], axis=1))
    if pivots and pivots[-1] >= n:
        raise Singular("inconsistent linear system")
    X = F.zeros((n, B.shape[1]))
    for row, p in enumerate(pivots):
        X[p] = R[row, n:]
    return X[:, 0] if vec else X


def transpose(M):
    return np.swapaxes(M, 0, 1)


def flatten(M):
    """vec(M), row-major."""
    M = np.asarray(M)
    return M.reshape(M.shape[:-3] + (M.shape[-3] * M.shape[-2], M.shape[-1]))


def trace(F: FieldCtx, M):
    M = np.asarray(M)
    idx = np.arange(M.shape[0])
    return F.sum(M[idx, idx], axis=0)


def trace_pairing(F: FieldCtx, X, Y, form: str = "transpose"):
    """Tr(X^T Y) (``form='transpose'``) or Tr(X Y) (``form='plain'``) in O(size)."""
    X, Y = np.asarray(X), np.asarray(Y)
    if form == "transpose":
        if X.shape != Y.shape:
            raise DimensionMismatch("Tr(X^T Y) needs equal shapes")
        return F.sum(F.mul(X, Y).reshape(-1, F.d), axis=0)
    if form == "plain":
        if X.shape[0] != Y.shape[1] or X.shape[1] != Y.shape[0]:
            raise DimensionMismatch("Tr(X Y) needs X m x n and Y n x m")
        return F.sum(F.mul(X, transpose(Y)).reshape(-1, F.d), axis=0)
    raise ValueError(f"unknown form {form!r}")


def hessenberg(F: FieldCtx, M):
    """Upper Hessenberg matrix similar to M."""
    H = np.array(M, dtype=np.int64, copy=True)
    n = H.shape[0]
    for j in range(n - 2):
        nz = np.flatnonzero(H[j + 1 :, j].any(axis=-1))
        if not nz.size:
            continue
        i = j + 1 + nz[0]
        if i != j + 1:
            H[[i, j + 1]] = H[[j + 1, i]]
            H[:, [i, j + 1]] = H[:, [j + 1, i]]
        piv_inv = F.inv(H[j + 1, j])
        for k in range(j + 2, n):
            if not H[k, j].any():
                continue
            u = F.mul(H[k, j], piv_inv)
            H[k] = F.sub(H[k], F.mul(u, H[j + 1]))
            H[:, j + 1] = F.add(H[:, j + 1], F.mul(u, H[:, k]))
    return H


def charpoly(F: FieldCtx, M):
    """det(tI - M) as a monic polynomial, via Hessenberg reduction."""
    H = hessenberg(F, M)
    n = H.shape[0]
    t = poly.monomial(F, 1)
    p = [poly.const(F, F.one())]
    for k in range(1, n + 1):
        cur = poly.mul(F, poly.sub(F, t, poly.const(F, H[k - 1, k - 1])), p[k - 1])
        prod = F.one()
        for i in range(k - 1, 0, -1):
            prod = F.mul(prod, H[i, i - 1])
            coef = F.mul(H[i - 1, k - 1], prod)
            if coef.any():
                cur = poly.sub(F, cur, poly.scale(F, coef, p[i - 1]))
        p.append(cur)
    out = F.zeros(n + 1)
    out[: len(p[n])] = p[n]
    return out


def poly_of_matrix(F: FieldCtx, f, M):
    """f(M) by Horner's rule."""
    m = M.shape[0]
    acc = F.zeros((m, m))
    I = F.eye(m)
    for c in poly.trim(f)[::-1]:
        acc = F.add(F.matmul(acc, M), F.mul(c, I))
    return acc


def kron(F: FieldCtx, A, B):
    a0, a1 = A.shape[:2]
    b0, b1 = B.shape[:2]
    K = F.mul(A[:, None, :, None], B[None, :, None, :])
    return K.reshape(a0 * b0, a1 * b1, F.d)


def solve_sylvester_commutant(F: FieldCtx, U, V):
    """Basis of {X : V X = X U}, shape (dim, m, m, d)."""
    m = U.shape[0]
    if U.shape[:2] != (m, m) or V.shape[:2] != (m, m):
        raise DimensionMismatch("U and V must be square of equal size")
    I = F.eye(m)
    # row-major: vec(V X) = (V kron I) vec X, vec(X U) = (I kron U^T) vec X
    L = F.sub(kron(F, V, I), kron(F, I, transpose(U)))
    return kernel(F, L).reshape(-1, m, m, F.d)


def random_invertible(F: FieldCtx, m: int, rng: np.random.Generator):
    for _ in range(INVERTIBLE_RETRIES):
        M = F.random(rng, (m, m))
        if rank(F, M) == m:
            return M
    raise RetryExhausted("no invertible matrix sampled")


def random_combination(F: FieldCtx, basis, rng: np.random.Generator):
    """Uniform element of the span of ``basis`` (leading axis indexes vectors)."""
    basis = np.asarray(basis)
    coeffs = F.random(rng, (1, basis.shape[0]))
    v = F.matmul(coeffs, basis.reshape(basis.shape[0], -1, F.d))
    return v.reshape(basis.shape[1:])


def to_int_matrix(M):
    """Nested lists for JSON: ints over F_q, coefficient lists over F_{q^d}."""
    M = np.asarray(M)
    if M.shape[-1] == 1:
        return M[..., 0].tolist()
    return M.tolist()
