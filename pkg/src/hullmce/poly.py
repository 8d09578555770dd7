"""Univariate polynomials over a :class:`~hullmce.field.FieldCtx`.

A polynomial is an array of shape ``(len, d)``: row i is the coefficient
of t^i.  Results are always trimmed, so the zero polynomial has length 0
and ``degree(p) == len(p) - 1``.

Factorization is the classical pipeline: squarefree decomposition,
distinct-degree factorization, then Cantor-Zassenhaus equal-degree
splitting (q odd).
"""

from __future__ import annotations

from math import lcm

import numpy as np

from .errors import DuplicateAbscissa, RetryExhausted
from .field import FieldCtx, prime_field

SPLIT_RETRIES = 64


def trim(p):
    p = np.asarray(p, dtype=np.int64)
    nz = np.flatnonzero(p.any(axis=-1))
    return p[: nz[-1] + 1] if nz.size else p[:0]


def degree(p) -> int:
    return len(trim(p)) - 1


def from_ints(F: FieldCtx, coeffs) -> np.ndarray:
    """Polynomial with prime-field coefficients, constant term first."""
    return trim(F.from_ints(list(coeffs)))


def to_ints(p) -> list[int]:
    """Prime-field coefficients of a polynomial (the first coordinate)."""
    return [int(c) for c in np.asarray(p)[:, 0]]


def const(F: FieldCtx, c) -> np.ndarray:
    return trim(np.asarray(c, dtype=np.int64).reshape(1, F.d))


def monomial(F: FieldCtx, k: int) -> np.ndarray:
    p = F.zeros(k + 1)
    p[k, 0] = 1
    return p


def is_one(p) -> bool:
    p = trim(p)
    return len(p) == 1 and p[0, 0] == 1 and not p[0, 1:].any()


def add(F, a, b):
    n = max(len(a), len(b))
    out = F.zeros(n)
    out[: len(a)] += a
    out[: len(b)] += b
    return trim(out % F.q)


def sub(F, a, b):
    n = max(len(a), len(b))
    out = F.zeros(n)
    out[: len(a)] += a
    out[: len(b)] -= b
    return trim(out % F.q)


def scale(F, c, a):
    return trim(F.mul(np.asarray(c), a))


def mul(F, a, b):
    a, b = trim(a), trim(b)
    if not len(a) or not len(b):
        return F.zeros(0)
    outer = F.mul(a[:, None, :], b[None, :, :])
    out = F.zeros(len(a) + len(b) - 1)
    for i in range(len(a)):
        out[i : i + len(b)] += outer[i]
    return trim(out % F.q)


def divmod_(F, a, b):
    """Quotient and remainder of a by b (b nonzero)."""
    a, b = trim(a), trim(b)
    if not len(b):
        raise ZeroDivisionError("polynomial division by zero")
    db = len(b) - 1
    if len(a) - 1 < db:
        return F.zeros(0), a
    inv_lead = F.inv(b[-1])
    r = a.copy()
    quo = F.zeros(len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = r[i]
        if not c.any():
            continue
        c = F.mul(c, inv_lead)
        quo[i - db] = c
        r[i - db : i + 1] = F.sub(r[i - db : i + 1], F.mul(c, b))
    return trim(quo), trim(r[:db])


def rem(F, a, b):
    return divmod_(F, a, b)[1]


def quo(F, a, b):
    return divmod_(F, a, b)[0]


def monic(F, p):
    p = trim(p)
    if not len(p):
        return p
    return F.mul(F.inv(p[-1]), p)


def gcd(F, a, b):
    """Monic gcd (zero if both inputs are zero)."""
    a, b = trim(a), trim(b)
    while len(b):
        a, b = b, rem(F, a, b)
    return monic(F, a)


def deriv(F, p):
    p = trim(p)
    if len(p) <= 1:
        return F.zeros(0)
    k = np.arange(1, len(p), dtype=np.int64) % F.q
    return trim(p[1:] * k[:, None] % F.q)


def evaluate(F, p, x):
    """Horner evaluation; ``x`` may be any array of elements."""
    x = np.asarray(x, dtype=np.int64)
    acc = np.zeros_like(x)
    for c in trim(p)[::-1]:
        acc = F.add(F.mul(acc, x), c)
    return acc


def powmod(F, base, e: int, mod):
    result = const(F, F.one())
    base = rem(F, base, mod)
    while e:
        if e & 1:
            result = rem(F, mul(F, result, base), mod)
        e >>= 1
        if e:
            base = rem(F, mul(F, base, base), mod)
    return rem(F, result, mod)


def is_separable(F, chi) -> bool:
    """gcd(chi, chi') == 1."""
    g = gcd(F, chi, deriv(F, chi))
    return len(g) == 1


poly_is_separable = is_separable


def _pth_root(F, p):
    # coefficients sit on exponents divisible by q; a^(1/q) = a^(Q/q)
    q = F.q
    out = p[::q]
    return trim(F.pow(out, F.order // q))


def squarefree_decomposition(F, f):
    """Pairs (g, i) with f = prod g^i, each g squarefree and monic."""
    f = monic(F, f)
    if len(f) <= 1:
        return []
    out = []
    fp = deriv(F, f)
    if len(fp):
        c = gcd(F, f, fp)
        w = quo(F, f, c)
        i = 1
        while len(w) > 1:
            y = gcd(F, w, c)
            z = quo(F, w, y)
            if len(z) > 1:
                out.append((monic(F, z), i))
            i += 1
            w = y
            c = quo(F, c, y)
        if len(c) > 1:
            out += [(g, j * F.q) for g, j in squarefree_decomposition(F, _pth_root(F, c))]
    else:
        out += [(g, j * F.q) for g, j in squarefree_decomposition(F, _pth_root(F, f))]
    return out


def distinct_degree(F, f):
    """Split a squarefree monic f into products of equal-degree irreducibles."""
    t = monomial(F, 1)
    h = t
    out = []
    i = 1
    while len(f) - 1 >= 2 * i:
        h = powmod(F, h, F.order, f)
        g = gcd(F, f, sub(F, h, t))
        if len(g) > 1:
            out.append((g, i))
            f = quo(F, f, g)
            h = rem(F, h, f)
        i += 1
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def equal_degree(F, f, r: int, rng: np.random.Generator):
    """Split f, a product of distinct irreducibles of degree r, into them."""
    n = len(f) - 1
    if n == r:
        return [f]
    e = (F.order**r - 1) // 2
    for _ in range(SPLIT_RETRIES):
        a = trim(F.random(rng, n))
        if len(a) <= 1:
            continue
        g = gcd(F, a, f)
        if 1 < len(g) <= n:
            return equal_degree(F, g, r, rng) + equal_degree(F, quo(F, f, g), r, rng)
        b = sub(F, powmod(F, a, e, f), const(F, F.one()))
        g = gcd(F, b, f)
        if 1 < len(g) <= n:
            return equal_degree(F, g, r, rng) + equal_degree(F, quo(F, f, g), r, rng)
    raise RetryExhausted(f"equal-degree splitting failed after {SPLIT_RETRIES} tries")


def _key(F, p):
    return (len(p), tuple(F.index(c) for c in p[::-1]))


def factor(F, chi, rng=None):
    """Irreducible factorization of a monic polynomial as (factor, multiplicity) pairs."""
    chi = trim(chi)
    if len(chi) < 2:
        raise ValueError("need a polynomial of degree >= 1")
    if rng is None:
        rng = np.random.default_rng(0x5EED)
    out = []
    for g, mult in squarefree_decomposition(F, chi):
        for h, r in distinct_degree(F, g):
            out += [(monic(F, p), mult) for p in equal_degree(F, h, r, rng)]
    out.sort(key=lambda pm: _key(F, pm[0]))
    return out


poly_factor = factor


def is_irreducible(F, f) -> bool:
    f = trim(f)
    if len(f) < 2:
        return False
    fs = factor(F, monic(F, f))
    return len(fs) == 1 and fs[0][1] == 1


def splitting_degree(F, chi) -> int:
    """Degree over F of the splitting field of chi: lcm of the factor degrees."""
    return lcm(*(len(g) - 1 for g, _ in factor(F, chi)))


def roots(F, chi, rng=None):
    """All roots of chi lying in F, with multiplicity, sorted by encoding."""
    chi = monic(F, chi)
    if len(chi) < 2:
        return []
    if rng is None:
        rng = np.random.default_rng(0x5EED)
    t = monomial(F, 1)
    out = []
    for g, mult in squarefree_decomposition(F, chi):
        lin = gcd(F, g, sub(F, powmod(F, t, F.order, g), t))
        if len(lin) < 2:
            continue
        for p in equal_degree(F, lin, 1, rng):
            p = monic(F, p)
            out += [F.neg(p[0])] * mult
    out.sort(key=F.index)
    return out


poly_roots = roots


def from_roots(F, rts):
    p = const(F, F.one())
    for r in rts:
        p = mul(F, p, np.stack([F.neg(r), F.one()]))
    return p


def lagrange_interpolate(F, points):
    """Unique polynomial of degree < len(points) through (x_i, y_i)."""
    if not points:
        raise ValueError("need at least one point")
    xs = [np.asarray(x, dtype=np.int64) for x, _ in points]
    ys = [np.asarray(y, dtype=np.int64) for _, y in points]
    keys = [F.index(x) for x in xs]
    if len(set(keys)) != len(keys):
        raise DuplicateAbscissa("abscissae must be pairwise distinct")
    result = F.zeros(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        num = const(F, F.one())
        den = F.one()
        for j, xj in enumerate(xs):
            if j != i:
                num = mul(F, num, np.stack([F.neg(xj), F.one()]))
                den = F.mul(den, F.sub(xi, xj))
        result = add(F, result, scale(F, F.mul(yi, F.inv(den)), num))
    return result


def find_irreducible(q: int, d: int, seed: int = 0) -> np.ndarray:
    """A monic irreducible polynomial of degree d over F_q, as int coefficients."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    if d == 1:
        return np.array([0, 1], dtype=np.int64)
    F = prime_field(q)
    rng = np.random.default_rng([q, d, seed])
    while True:
        c = rng.integers(0, q, size=d)
        if c[0] == 0:
            continue
        p = np.append(c, 1)
        if is_irreducible(F, F.from_ints(p)):
            return p
