"""Canonical forms of characteristic polynomials under lambda -> lambda U.

A hull generator U of a code inside ker(Tr) has Tr(U) = Tr(U^2) = 0, so in
odd characteristic its characteristic polynomial is
t^m + a_{m-3} t^{m-3} + ... + a_0.  We keep the tuple
``(a_{m-3}, ..., a_0)``; scaling U by lambda multiplies the entry at
position j by lambda^(j + 3) (the "diamond" action).  Dictionary keys are
canonical representatives of the orbits of that action.

Two canonicalizers are provided.  ``canonicalize_bruteforce`` returns the
lexicographically smallest tuple of the orbit.  ``canonicalize_fast``
returns the orbit element whose discrete logarithms, read in order of
increasing weight over the nonzero entries, are lexicographically
smallest; it walks the coefficients once, shrinking the set of admissible
scalars by a gcd at each step.  Both are valid canonical forms but they
pick different representatives, so keys must never mix the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import gcd

import numpy as np

from . import matspace as ms
from . import poly
from .code import MatrixCode, hull_basis
from .errors import HullNotOneDim, TooLarge, UnexpectedCoefficient, ZeroScalar, ZeroTuple
from .field import prime_field

MAX_LOG_TABLE = 1 << 22
MAX_ENUMERATION = 10**7

CharTuple = tuple  # (a_{m-3}, ..., a_0) as ints in [0, q)


@dataclass(frozen=True)
class NormCharPoly:
    tuple: tuple
    scalar: int

    @property
    def eligible(self) -> bool:
        """Usable as a dictionary key: nonzero constant coefficient."""
        return bool(self.tuple) and self.tuple[-1] != 0


def diamond(q: int, lam: int, chi) -> tuple:
    """lambda . (a_{m-3}, ..., a_0) = (lambda^3 a_{m-3}, ..., lambda^m a_0)."""
    lam %= q
    if lam == 0:
        raise ZeroScalar("the scalar must be nonzero")
    return tuple(pow(lam, j + 3, q) * a % q for j, a in enumerate(chi))


def tuple_to_poly(q: int, chi) -> list[int]:
    """Coefficients (constant first) of t^m + a_{m-3} t^{m-3} + ... + a_0."""
    return [int(a) % q for a in reversed(chi)] + [0, 0, 1]


def is_separable_tuple(q: int, chi) -> bool:
    F = prime_field(q)
    return poly.is_separable(F, poly.from_ints(F, tuple_to_poly(q, chi)))


@lru_cache(maxsize=64)
def _power_table(q: int, length: int):
    lam = np.arange(1, q, dtype=np.int64)
    cols = []
    cur = lam**3 % q
    for _ in range(length):
        cols.append(cur)
        cur = cur * lam % q
    return np.stack(cols, axis=1)


def orbit(q: int, chi) -> np.ndarray:
    """All lambda . chi for lambda = 1..q-1, as a (q-1) x len(chi) array."""
    return _power_table(q, len(chi)) * np.asarray(chi, dtype=np.int64) % q


def canonicalize_bruteforce(q: int, chi) -> tuple[tuple, int]:
    """Lexicographically least orbit element and the least lambda reaching it."""
    chi = tuple(int(a) % q for a in chi)
    if not any(chi):
        raise ZeroTuple("the zero tuple has no normalizing scalar")
    images = orbit(q, chi)
    best = np.lexsort(images.T[::-1])[0]
    return tuple(int(a) for a in images[best]), int(best) + 1


@lru_cache(maxsize=None)
def primitive_root(q: int) -> int:
    n = q - 1
    primes = []
    x, p = n, 2
    while p * p <= x:
        if x % p == 0:
            primes.append(p)
            while x % p == 0:
                x //= p
        p += 1
    if x > 1:
        primes.append(x)
    for g in range(2, q):
        if all(pow(g, n // p, q) != 1 for p in primes):
            return g
    return 1  # q = 2 is excluded upstream


@lru_cache(maxsize=8)
def _log_table(q: int):
    if q > MAX_LOG_TABLE:
        raise TooLarge(f"discrete-log table for q = {q} is too large")
    g = primitive_root(q)
    log = np.zeros(q, dtype=np.int64)
    x = 1
    for e in range(q - 1):
        log[x] = e
        x = x * g % q
    return log


def canonicalize_fast(q: int, chi) -> tuple[tuple, int]:
    """Canonical orbit element by gcd descent over discrete logarithms."""
    chi = tuple(int(a) % q for a in chi)
    if not any(chi):
        raise ZeroTuple("the zero tuple has no normalizing scalar")
    log = _log_table(q)
    n = q - 1
    e, step = 0, 1  # admissible exponents: e + step * Z (mod n)
    for j, a in enumerate(chi):
        if step == n:
            break
        if a == 0:
            continue
        w = j + 3
        cur = (int(log[a]) + w * e) % n
        g = gcd(w * step, n)
        target = cur % g
        n_red = n // g
        if n_red > 1:
            t = ((target - cur) // g) * pow(w * step // g, -1, n_red) % n_red
            e = (e + step * t) % n
        step = gcd(step * n_red, n)
    lam = pow(primitive_root(q), e, q)
    return diamond(q, lam, chi), lam


class Normalizer:
    """Callable ``chi -> (canonical tuple, lambda)`` with an optional memo.

    With ``memo=True`` the scalar is cached under (a_{m-3}, a_{m-4}) when
    both are nonzero: weights 3 and 4 are coprime, so those two entries
    already pin down lambda for either canonicalizer.
    """

    def __init__(self, q: int, method: str = "bruteforce", memo: bool = False):
        if method not in ("bruteforce", "fast"):
            raise ValueError(f"unknown normalization method {method!r}")
        self.q = q
        self.method = method
        self._canon = canonicalize_bruteforce if method == "bruteforce" else canonicalize_fast
        self.memo = {} if memo else None
        self.hits = 0

    def __call__(self, chi) -> tuple[tuple, int]:
        q = self.q
        chi = tuple(int(a) % q for a in chi)
        if self.memo is not None and len(chi) >= 2 and chi[0] and chi[1]:
            lam = self.memo.get(chi[:2])
            if lam is not None:
                self.hits += 1
                return diamond(q, lam, chi), lam
            out, lam = self._canon(q, chi)
            self.memo[chi[:2]] = lam
            return out, lam
        return self._canon(q, chi)

    def __getstate__(self):
        return {"q": self.q, "method": self.method, "memo": self.memo is not None}

    def __setstate__(self, state):
        self.__init__(state["q"], state["method"], state["memo"])


def char_tuple(F, U) -> tuple:
    """(a_{m-3}, ..., a_0) of a traceless U with Tr(U^2) = 0."""
    m = U.shape[0]
    coeffs = poly.to_ints(ms.charpoly(F, U))
    if coeffs[m - 1] or coeffs[m - 2]:
        raise UnexpectedCoefficient("t^{m-1} or t^{m-2} coefficient is nonzero")
    return tuple(coeffs[m - 3 :: -1]) if m >= 3 else ()


def compute_normalized_charpoly(C: MatrixCode, normalizer: Normalizer | None = None):
    """Normalized generator of a one-dimensional hull.

    Returns ``(NormCharPoly, U)`` where U spans the hull of C and its
    characteristic polynomial has the canonical coefficient tuple.  The
    zero tuple (nilpotent U) is returned unscaled.
    """
    F = C.field
    H = hull_basis(C)
    if len(H) != 1:
        raise HullNotOneDim(f"hull has dimension {len(H)}")
    U = H[0]
    chi = char_tuple(F, U)
    if not any(chi):
        return NormCharPoly(chi, 1), U
    if normalizer is None:
        normalizer = Normalizer(F.q)
    canon, lam = normalizer(chi)
    return NormCharPoly(canon, lam), F.mul(F.elem(lam), U)


def stabilizer(q: int, chi) -> list[int]:
    """Scalars c with c . chi = chi (chi nonzero): the c^w = 1 for every used weight w."""
    n = q - 1
    g = n
    for j, a in enumerate(chi):
        if a:
            g = gcd(g, j + 3)
    root = pow(primitive_root(q), n // g, q)
    return sorted(pow(root, i, q) for i in range(g))


def encode_key(q: int, chi) -> bytes:
    """Fixed-width big-endian encoding of a canonical tuple."""
    width = max(1, ((q - 1).bit_length() + 7) // 8)
    return b"".join(int(a).to_bytes(width, "big") for a in chi)


def decode_key(q: int, key: bytes) -> tuple:
    width = max(1, ((q - 1).bit_length() + 7) // 8)
    return tuple(int.from_bytes(key[i : i + width], "big") for i in range(0, len(key), width))


def count_sep_classes(q: int, m: int) -> int:
    """Number of orbits of separable tuples with a_0 != 0, by enumeration."""
    size = q ** (m - 2)
    if size > MAX_ENUMERATION:
        raise TooLarge(f"q^(m-2) = {size} tuples is too many to enumerate")
    seen = set()
    count = 0
    for chi in product(range(q), repeat=m - 2):
        if chi[-1] == 0 or chi in seen:
            continue
        seen.update(map(tuple, orbit(q, chi).tolist()))
        if is_separable_tuple(q, chi):
            count += 1
    return count


def count_nonzero_constant_classes(q: int, m: int) -> int:
    """Orbits of tuples with a_0 != 0, with no separability filter."""
    size = q ** (m - 2)
    if size > MAX_ENUMERATION:
        raise TooLarge(f"q^(m-2) = {size} tuples is too many to enumerate")
    seen = set()
    count = 0
    for chi in product(range(q), repeat=m - 2):
        if chi[-1] == 0 or chi in seen:
            continue
        seen.update(map(tuple, orbit(q, chi).tolist()))
        count += 1
    return count
