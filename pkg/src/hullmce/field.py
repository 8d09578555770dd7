"""Arithmetic in F_q (q an odd prime) and its extensions F_{q^d}.

Elements are numpy ``int64`` arrays whose *last* axis holds the d
coordinates of the element in the power basis 1, x, ..., x^{d-1} of
F_q[x]/(modulus).  A scalar is an array of shape ``(d,)``, an r x c matrix
has shape ``(r, c, d)``.  The prime field is the case d = 1, so every
algorithm in the package is written once for both.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ZeroInverse

# Keeps every intermediate sum of the vectorized products inside int64.
MAX_Q = 1 << 26


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FieldCtx:
    """The finite field F_{q^d} = F_q[x]/(modulus).

    ``modulus`` is a monic irreducible polynomial given as its d+1
    coefficients, constant term first.  When omitted for d > 1 one is
    chosen by :func:`hullmce.poly.find_irreducible` from ``seed``.
    """

    def __init__(self, q: int, d: int = 1, modulus=None, seed: int = 0):
        if q % 2 == 0 or not is_prime(q):
            raise ValueError(f"q must be an odd prime, got {q}")
        if q >= MAX_Q:
            raise ValueError(f"q must be below 2^26, got {q}")
        if d < 1:
            raise ValueError("extension degree must be >= 1")
        self.q = q
        self.d = d
        self.order = q**d
        if d == 1:
            self.modulus = None
        else:
            from . import poly

            if modulus is None:
                modulus = poly.find_irreducible(q, d, seed=seed)
            modulus = [int(c) % q for c in modulus]
            if len(modulus) != d + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree d")
            if not poly.is_irreducible(prime_field(q), np.array(modulus)[:, None]):
                raise ValueError("modulus is reducible over F_q")
            self.modulus = tuple(modulus)
            # conv[i, j, s] = [i + j == s]; red[s] = x^s mod modulus
            self._conv = np.zeros((d, d, 2 * d - 1), dtype=np.int64)
            for i in range(d):
                for j in range(d):
                    self._conv[i, j, i + j] = 1
            red = np.zeros((2 * d - 1, d), dtype=np.int64)
            cur = np.zeros(d, dtype=np.int64)
            cur[0] = 1
            for s in range(2 * d - 1):
                red[s] = cur
                top = cur[-1]
                cur = np.roll(cur, 1)
                cur[0] = 0
                cur = (cur - top * np.array(modulus[:d])) % q
            self._red = red
        self._inv_table = None
        if d == 1 and q <= 1 << 20:
            t = np.zeros(q, dtype=np.int64)
            t[1:] = [pow(a, q - 2, q) for a in range(1, q)]
            self._inv_table = t

    # -- identity ----------------------------------------------------------

    def __repr__(self):
        if self.d == 1:
            return f"FieldCtx(q={self.q})"
        return f"FieldCtx(q={self.q}, d={self.d}, modulus={list(self.modulus)})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx)
            and (self.q, self.d, self.modulus) == (other.q, other.d, other.modulus)
        )

    def __hash__(self):
        return hash((self.q, self.d, self.modulus))

    @property
    def base(self) -> "FieldCtx":
        return prime_field(self.q)

    # -- construction ------------------------------------------------------

    def zeros(self, shape=()) -> np.ndarray:
        if isinstance(shape, int):
            shape = (shape,)
        return np.zeros(tuple(shape) + (self.d,), dtype=np.int64)

    def one(self) -> np.ndarray:
        x = self.zeros()
        x[0] = 1
        return x

    def eye(self, m: int) -> np.ndarray:
        out = self.zeros((m, m))
        out[np.arange(m), np.arange(m), 0] = 1
        return out

    def elem(self, value) -> np.ndarray:
        """An element from an int (prime-field part) or a coefficient list."""
        x = self.zeros()
        if isinstance(value, (int, np.integer)):
            x[0] = int(value) % self.q
        else:
            coeffs = [int(c) % self.q for c in value]
            if len(coeffs) > self.d:
                raise ValueError("too many coefficients for this field")
            x[: len(coeffs)] = coeffs
        return x

    def from_ints(self, a) -> np.ndarray:
        """Prime-field integers of any shape -> field array (embedded)."""
        a = np.asarray(a, dtype=np.int64) % self.q
        out = np.zeros(a.shape + (self.d,), dtype=np.int64)
        out[..., 0] = a
        return out

    def random(self, rng: np.random.Generator, shape=()) -> np.ndarray:
        if isinstance(shape, int):
            shape = (shape,)
        return rng.integers(0, self.q, size=tuple(shape) + (self.d,), dtype=np.int64)

    def random_nonzero(self, rng: np.random.Generator) -> np.ndarray:
        while True:
            x = self.random(rng)
            if x.any():
                return x

    def elements(self):
        """Iterate over all field elements (small fields only)."""
        for v in range(self.order):
            yield self.from_index(v)

    def from_index(self, v: int) -> np.ndarray:
        x = self.zeros()
        for i in range(self.d):
            v, x[i] = divmod(v, self.q)
        return x

    def index(self, x) -> int:
        """Integer encoding sum c_i q^i of a single element."""
        return int(sum(int(c) * self.q**i for i, c in enumerate(np.asarray(x))))

    # -- embedding between F_q and F_{q^d} -----------------------------------

    def embed(self, x) -> np.ndarray:
        """Lift an array over the prime field (last axis 1) into this field."""
        x = np.asarray(x, dtype=np.int64)
        if x.shape[-1] == self.d:
            return x.copy()
        out = np.zeros(x.shape[:-1] + (self.d,), dtype=np.int64)
        out[..., 0] = x[..., 0]
        return out

    def in_base(self, x) -> bool:
        return not np.asarray(x)[..., 1:].any()

    @staticmethod
    def descend(x) -> np.ndarray:
        return np.ascontiguousarray(np.asarray(x)[..., :1])

    # -- arithmetic --------------------------------------------------------

    def add(self, a, b):
        return (a + b) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def neg(self, a):
        return (-a) % self.q

    def mul(self, a, b):
        """Elementwise product with numpy broadcasting over leading axes."""
        if self.d == 1:
            return a * b % self.q
        c = np.einsum("...i,...j,ijs->...s", a, b, self._conv) % self.q
        return c @ self._red % self.q

    def is_zero(self, a):
        return ~np.asarray(a).any(axis=-1)

    def equal(self, a, b) -> bool:
        return bool(np.array_equal(np.asarray(a) % self.q, np.asarray(b) % self.q))

    def pow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e < 0:
            a, e = self.inv(a), -e
        result = np.broadcast_to(self.one(), a.shape).copy()
        if self.d == 1 and a.ndim == 1:
            result[0] = pow(int(a[0]), e, self.q)
            return result
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.is_zero(a).any():
            raise ZeroInverse("inverse of zero")
        if self._inv_table is not None:
            return self._inv_table[a]
        return self.pow(a, self.order - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def scale(self, c, a):
        """Multiply every entry of the array ``a`` by the scalar ``c``."""
        return self.mul(np.asarray(c), a)

    def matmul(self, A, B):
        """Matrix product over the field; leading axes broadcast like ``@``."""
        if self.d == 1:
            return ((A[..., 0] @ B[..., 0]) % self.q)[..., None]
        outer = np.einsum("...rsx,...sty->...rtxy", A, B) % self.q
        c = np.einsum("...xy,xys->...s", outer, self._conv) % self.q
        return c @ self._red % self.q

    def sum(self, a, axis):
        ax = axis if axis >= 0 else axis - 1
        return np.sum(a, axis=ax) % self.q


@lru_cache(maxsize=None)
def prime_field(q: int) -> FieldCtx:
    return FieldCtx(q)


@lru_cache(maxsize=None)
def extension_field(q: int, d: int, seed: int = 0) -> FieldCtx:
    """Cached F_{q^d}; d = 1 gives the prime field itself."""
    if d == 1:
        return prime_field(q)
    return FieldCtx(q, d, seed=seed)


def field_inv(ctx: FieldCtx, a) -> np.ndarray:
    return ctx.inv(np.asarray(a, dtype=np.int64))
