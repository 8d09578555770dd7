"""Matrix codes: k-dimensional subspaces of F^{m x n}."""

from __future__ import annotations

import numpy as np

from . import matspace as ms
from .errors import DimensionDrop, DimensionMismatch, NotSquare, RetryExhausted, Singular, ValidationError
from .field import FieldCtx, prime_field

CODE_RETRIES = 256


class MatrixCode:
    """An immutable matrix code with a canonical (RREF) basis.

    ``MatrixCode(F, m, n, generators)`` spans the given matrices; the
    dimension k is the rank of their flattenings.  Equality and hashing are
    structural because the basis is canonical.
    """

    __slots__ = ("field", "m", "n", "basis", "_flat")

    def __init__(self, field: FieldCtx, m: int, n: int, generators):
        gens = np.asarray(generators, dtype=np.int64).reshape(-1, m * n, field.d)
        flat = ms.row_space(field, gens) if len(gens) else gens
        flat.setflags(write=False)
        self.field = field
        self.m = m
        self.n = n
        self._flat = flat
        self.basis = flat.reshape(-1, m, n, field.d)

    @classmethod
    def _from_rref(cls, field, m, n, flat):
        self = object.__new__(cls)
        flat = np.ascontiguousarray(flat)
        flat.setflags(write=False)
        self.field, self.m, self.n, self._flat = field, m, n, flat
        self.basis = flat.reshape(-1, m, n, field.d)
        return self

    @property
    def k(self) -> int:
        return self._flat.shape[0]

    @property
    def flat(self):
        """Basis as a k x mn matrix (row-major flattening)."""
        return self._flat

    @property
    def shape(self):
        return (self.m, self.n)

    def __len__(self):
        return self.k

    def __eq__(self, other):
        return (
            isinstance(other, MatrixCode)
            and self.field == other.field
            and self.shape == other.shape
            and np.array_equal(self._flat, other._flat)
        )

    def __hash__(self):
        return hash((self.field, self.m, self.n, self._flat.tobytes()))

    def __repr__(self):
        return f"MatrixCode(q={self.field.q}, d={self.field.d}, m={self.m}, n={self.n}, k={self.k})"

    def transpose(self) -> "MatrixCode":
        return MatrixCode(self.field, self.n, self.m, np.swapaxes(self.basis, 1, 2))

    def element(self, coeffs):
        """The codeword sum_i coeffs[i] * basis[i]."""
        F = self.field
        coeffs = np.asarray(coeffs, dtype=np.int64).reshape(1, self.k, F.d)
        return F.matmul(coeffs, self._flat)[0].reshape(self.m, self.n, F.d)

    def random_element(self, rng):
        return self.element(self.field.random(rng, self.k))

    def to_json(self) -> dict:
        out = {"q": self.field.q, "m": self.m, "n": self.n, "k": self.k}
        if self.field.d > 1:
            out["d"] = self.field.d
            out["modulus"] = list(self.field.modulus)
        out["basis"] = [ms.to_int_matrix(B) for B in self.basis]
        return out

    @classmethod
    def from_json(cls, obj: dict, field: FieldCtx | None = None) -> "MatrixCode":
        q, m, n, k = (int(obj[key]) for key in ("q", "m", "n", "k"))
        if field is None:
            if obj.get("d", 1) > 1:
                field = FieldCtx(q, int(obj["d"]), modulus=obj["modulus"])
            else:
                field = prime_field(q)
        raw = np.asarray(obj["basis"], dtype=np.int64)
        if field.d == 1:
            raw = raw[..., None]
        if raw.shape[1:] != (m, n, field.d):
            raise ValidationError(f"basis matrices must be {m} x {n}, got shape {raw.shape}")
        code = cls(field, m, n, raw % q)
        if code.k != k:
            raise ValidationError(f"basis has rank {code.k}, declared k = {k}")
        return code


def zero_code(F: FieldCtx, m: int, n: int) -> MatrixCode:
    return MatrixCode(F, m, n, F.zeros((0, m, n)))


def full_space(F: FieldCtx, m: int, n: int) -> MatrixCode:
    return MatrixCode._from_rref(F, m, n, F.eye(m * n))


def _check_shapes(C: MatrixCode, D: MatrixCode):
    if C.shape != D.shape or C.field != D.field:
        raise DimensionMismatch(f"codes live in different spaces: {C!r} vs {D!r}")


def dual(C: MatrixCode) -> MatrixCode:
    """{M : Tr(M^T C') = 0 for all C' in C}; the dot product of flattenings."""
    F = C.field
    if C.k == 0:
        return full_space(F, C.m, C.n)
    return MatrixCode._from_rref(F, C.m, C.n, ms.kernel(F, C.flat))


def gram_matrix(C: MatrixCode):
    """(Tr(C_i C_j))_{ij} for the basis of a square code."""
    F = C.field
    if C.m != C.n:
        raise NotSquare("the hull is defined for square matrix codes")
    flat_t = np.swapaxes(C.basis, 1, 2).reshape(C.k, -1, F.d)
    return F.matmul(C.flat, ms.transpose(flat_t))


def hull_basis(C: MatrixCode):
    """Basis (h, m, m, d) of the hull, not canonicalized."""
    F = C.field
    if C.k == 0:
        return F.zeros((0, C.m, C.m))
    K = ms.kernel(F, gram_matrix(C))
    if not len(K):
        return F.zeros((0, C.m, C.m))
    return F.matmul(K, C.flat).reshape(-1, C.m, C.m, F.d)


def hull(C: MatrixCode) -> MatrixCode:
    """{M in C : Tr(M C') = 0 for all C' in C}."""
    return MatrixCode(C.field, C.m, C.n, hull_basis(C))


def apply_equivalence(C: MatrixCode, P, Q) -> MatrixCode:
    """The code P C Q^{-1}."""
    F = C.field
    Qinv = ms.mat_inverse(F, Q)
    if not ms.is_invertible(F, P):
        raise Singular("P is not invertible")
    return MatrixCode(F, C.m, C.n, F.matmul(F.matmul(P, C.basis), Qinv))


def conjugate(C: MatrixCode, P) -> MatrixCode:
    """The code P C P^{-1}."""
    if C.m != C.n:
        raise NotSquare("conjugation needs square matrices")
    return apply_equivalence(C, P, P)


def map_by_A(C: MatrixCode, A) -> MatrixCode:
    """C A^T, a code in F^{m x m}.

    Raises :class:`DimensionDrop` when the image has dimension < k, which
    the dictionary and probe loops treat as "skip this A".
    """
    F = C.field
    A = np.asarray(A)
    if A.shape[:2] != (C.m, C.n):
        raise DimensionMismatch(f"A must be {C.m} x {C.n}")
    prod = F.matmul(C.basis, ms.transpose(A))
    image = MatrixCode(F, C.m, C.m, prod)
    if image.k < C.k:
        raise DimensionDrop(f"dim C A^T = {image.k} < {C.k}")
    return image


def contains(C: MatrixCode, M) -> bool:
    F = C.field
    M = np.asarray(M)
    if M.shape[:2] != C.shape:
        raise DimensionMismatch("matrix shape differs from the code's")
    v = M.reshape(1, -1, F.d)
    if not v.any():
        return True
    return ms.rank(F, np.concatenate([C.flat, v])) == C.k


def code_equal(C: MatrixCode, D: MatrixCode) -> bool:
    _check_shapes(C, D)
    return C == D


def kernel_trace_basis(F: FieldCtx, m: int):
    """Basis of the traceless m x m matrices, shape (m^2 - 1, m, m, d)."""
    out = []
    for i in range(m):
        for j in range(m):
            if i != j:
                E = F.zeros((m, m))
                E[i, j] = F.one()
                out.append(E)
    for i in range(1, m):
        E = F.zeros((m, m))
        E[0, 0] = F.one()
        E[i, i] = F.neg(F.one())
        out.append(E)
    return np.stack(out) if out else F.zeros((0, m, m))


def random_code(F: FieldCtx, m: int, n: int, k: int, rng, inside_ker_trace: bool = False) -> MatrixCode:
    """Uniform k-dimensional code in F^{m x n}, or in ker(Tr) when asked."""
    if inside_ker_trace:
        if m != n:
            raise NotSquare("ker(Tr) needs square matrices")
        ambient = kernel_trace_basis(F, m).reshape(m * m - 1, -1, F.d)
    else:
        ambient = F.eye(m * n)
    N = ambient.shape[0]
    if not 0 <= k <= N:
        raise ValueError(f"k = {k} out of range for an ambient space of dimension {N}")
    if k == 0:
        return zero_code(F, m, n)
    for _ in range(CODE_RETRIES):
        coeffs = F.random(rng, (k, N))
        if ms.rank(F, coeffs) == k:
            return MatrixCode(F, m, n, F.matmul(coeffs, ambient))
    raise RetryExhausted("no full-rank basis sampled")
