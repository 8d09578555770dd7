import numpy as np
import pytest

import oracles
from hullmce import code as cd
from hullmce import matspace as ms
from hullmce.errors import DimensionDrop, DimensionMismatch, NotSquare, ValidationError
from hullmce.field import prime_field


def flat_words(C):
    return {tuple(int(x) for x in w.reshape(-1)) for w in _all_words(C)}


def _all_words(C):
    F = C.field
    from itertools import product

    for coeffs in product(range(F.q), repeat=C.k):
        yield C.element(F.from_ints(list(coeffs)))[..., 0]


def basis_ints(C):
    return [B[..., 0].tolist() for B in C.basis]


def test_canonical_basis_equality(rng):
    F = prime_field(7)
    C = cd.random_code(F, 3, 3, 4, rng)
    G = ms.random_invertible(F, 4, rng)
    mixed = F.matmul(G, C.flat).reshape(4, 3, 3, 1)
    assert cd.MatrixCode(F, 3, 3, mixed) == C
    assert hash(cd.MatrixCode(F, 3, 3, mixed)) == hash(C)


def test_dual_matches_bruteforce(rng):
    F = prime_field(3)
    for k in (1, 2, 3):
        C = cd.random_code(F, 2, 2, k, rng)
        D = cd.dual(C)
        assert D.k == 4 - k
        assert flat_words(D) == oracles.dual_bruteforce(3, basis_ints(C), 2, 2)


def test_hull_matches_bruteforce(rng):
    for q, m, k in [(3, 2, 2), (3, 2, 3), (5, 2, 2), (3, 3, 3)]:
        F = prime_field(q)
        for _ in range(5):
            C = cd.random_code(F, m, m, k, rng)
            assert flat_words(cd.hull(C)) == oracles.hull_bruteforce(q, basis_ints(C), m)


def test_dual_involution(rng):
    F = prime_field(7)
    for k in range(0, 10):
        C = cd.random_code(F, 3, 3, k, rng)
        assert cd.dual(cd.dual(C)) == C


def test_dual_rectangular(rng):
    F = prime_field(5)
    C = cd.random_code(F, 2, 3, 2, rng)
    D = cd.dual(C)
    assert D.shape == (2, 3) and D.k == 4
    for X in C.basis:
        for Y in D.basis:
            assert not ms.trace_pairing(F, X, Y).any()


def test_dual_equivalence_transport(rng):
    F = prime_field(7)
    C = cd.random_code(F, 3, 4, 5, rng)
    P, Q = ms.random_invertible(F, 3, rng), ms.random_invertible(F, 4, rng)
    D = cd.apply_equivalence(C, P, Q)
    PiT = ms.transpose(ms.mat_inverse(F, P))
    QiT = ms.transpose(ms.mat_inverse(F, Q))
    assert cd.dual(D) == cd.apply_equivalence(cd.dual(C), PiT, QiT)


def test_hull_conjugation(rng):
    F = prime_field(7)
    C = cd.random_code(F, 4, 4, 9, rng, inside_ker_trace=True)
    P = ms.random_invertible(F, 4, rng)
    assert cd.hull(cd.conjugate(C, P)) == cd.conjugate(cd.hull(C), P)


def test_hull_not_square():
    F = prime_field(5)
    with pytest.raises(NotSquare):
        cd.hull(cd.full_space(F, 2, 3))


def test_ker_trace_basis():
    F = prime_field(5)
    B = cd.kernel_trace_basis(F, 3)
    assert B.shape == (8, 3, 3, 1)
    assert ms.rank(F, B.reshape(8, 9, 1)) == 8
    assert all(ms.trace(F, X)[0] == 0 for X in B)


def test_random_code_in_ker_trace(rng):
    F = prime_field(11)
    C = cd.random_code(F, 4, 4, 12, rng, inside_ker_trace=True)
    assert C.k == 12
    assert all(ms.trace(F, X)[0] == 0 for X in C.basis)


def test_map_by_A_drop():
    F = prime_field(5)
    C = cd.full_space(F, 2, 2)
    with pytest.raises(DimensionDrop):
        cd.map_by_A(C, F.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        cd.map_by_A(C, F.zeros((3, 2)))


def test_contains(rng):
    F = prime_field(7)
    C = cd.random_code(F, 3, 3, 4, rng)
    assert cd.contains(C, C.random_element(rng))
    assert cd.contains(C, F.zeros((3, 3)))
    assert not cd.contains(C, cd.dual(C).basis[0])


def test_json_roundtrip(rng):
    F = prime_field(11)
    C = cd.random_code(F, 3, 4, 5, rng)
    assert cd.MatrixCode.from_json(C.to_json()) == C
    bad = C.to_json()
    bad["k"] = 6
    with pytest.raises(ValidationError):
        cd.MatrixCode.from_json(bad)


def test_equality_across_fields(rng):
    C = cd.zero_code(prime_field(5), 2, 2)
    D = cd.zero_code(prime_field(7), 2, 2)
    assert C != D
    with pytest.raises(DimensionMismatch):
        cd.code_equal(C, D)
