"""Acceptance suite: eight end-to-end criteria at their stated tolerances.

Each test prints a ``criterion N: PASS|FAIL - ...`` line; the lines are
repeated in the terminal summary.
"""

import statistics
import time
from collections import Counter

import numpy as np
import pytest

from hullmce import matspace as ms
from hullmce.attack import AttackConfig, attack, construct_dict, preprocess
from hullmce.canon import canonicalize_bruteforce, canonicalize_fast, char_tuple, count_sep_classes, diamond
from hullmce.code import apply_equivalence, code_equal, conjugate, dual, hull, hull_basis, map_by_A, random_code
from hullmce.conjugacy import ConjugacyInstance, find_conjugator, find_P_diag, solve_conjugacy, solve_linearized
from hullmce.errors import AttackFailure, DimensionDrop, Indeterminate, MCEError, NoSolution
from hullmce.field import prime_field
from hullmce.instances import (
    charpoly_class_stats,
    gen_conjugacy_pair,
    gen_instance,
    gen_negative_instance,
    histogram_fraction,
    hull_dim_stats,
    verify_solution,
)

pytestmark = pytest.mark.acceptance


def _run_attacks(q, m, k, count, seed0):
    ok, times = 0, []
    for i in range(count):
        inst, _ = gen_instance(q, m, m, k, seed0 + i)
        t = time.perf_counter()
        try:
            P, Q, _ = attack(inst.C, inst.D, AttackConfig(seed=seed0 + i, deterministic=True))
            ok += verify_solution(inst, P, Q)
        except AttackFailure:
            pass
        times.append(time.perf_counter() - t)
    return ok, times


def test_criterion_1_attack_case_i(record):
    ok, times = _run_attacks(11, 4, 12, 20, 1000)
    med = statistics.median(times)
    passed = ok >= 16 and med < 60
    record(1, passed, f"{ok}/20 verified (need >= 16), median {med:.2f} s (need < 60 s)")
    assert passed


def test_criterion_2_attack_dual_swap(record):
    ok, times = _run_attacks(11, 4, 4, 10, 2000)
    passed = ok >= 8
    record(2, passed, f"{ok}/10 verified via dual swap (need >= 8), median {statistics.median(times):.2f} s")
    assert passed


def test_criterion_3_hull_dimension(record):
    f11 = histogram_fraction(hull_dim_stats(11, 4, 8, 5000, seed=11, workers=4), 1)
    f7 = histogram_fraction(hull_dim_stats(7, 4, 8, 5000, seed=7, workers=4), 1)
    passed = 0.061 <= f11 <= 0.121 and abs(f7 - 1 / 7) <= 0.035 and f7 > f11
    record(3, passed, f"dim-1 fraction q=11: {f11:.4f} in [0.061, 0.121]; q=7: {f7:.4f} in 1/7 +- 0.035; q=7 > q=11")
    assert passed


def test_criterion_4_conjugacy_solvers(record):
    auto = diag = 0
    kernel_hist = Counter()
    for seed in range(50):
        C, D, P0 = gen_conjugacy_pair(11, 4, 12, 4000 + seed)
        F = C.field
        U = hull_basis(C)[0]
        V = F.matmul(F.matmul(P0, U), ms.mat_inverse(F, P0))
        rng = np.random.default_rng(seed)
        inst = ConjugacyInstance(C, D, U, V, find_conjugator(F, U, V, rng))
        try:
            solve_linearized(inst)
            kernel_hist[1] += 1
        except Indeterminate as exc:
            kernel_hist[getattr(exc, "kernel_dim", 1)] += 1
        except NoSolution:
            kernel_hist[0] += 1
        for strategy in ("auto", "diagonal"):
            try:
                if strategy == "auto":
                    P = solve_conjugacy(inst, "auto", rng)
                else:
                    P = find_P_diag(inst, rng)
            except MCEError:
                continue
            if code_equal(D, conjugate(C, P)):
                if strategy == "auto":
                    auto += 1
                else:
                    diag += 1
    passed = auto >= 48 and diag >= 45
    hist = ", ".join(f"dim {d}: {c}" for d, c in sorted(kernel_hist.items()))
    record(4, passed, f"auto {auto}/50 (need >= 48), diagonal {diag}/50 (need >= 45); linearized kernel {{{hist}}}")
    assert passed


def _partition(q, m, fn):
    from itertools import product

    groups = {}
    for chi in product(range(q), repeat=m - 2):
        if any(chi):
            groups.setdefault(fn(q, chi)[0], set()).add(chi)
    return sorted(sorted(g) for g in groups.values())


def test_criterion_5_normalization(record):
    rng = np.random.default_rng(5)
    violations = 0
    pairs = 0
    for q in (11, 101):
        for m in (4, 5, 6):
            chis = rng.integers(0, q, size=(100_000, m - 2))
            lams = rng.integers(1, q, size=100_000)
            for chi, lam in zip(map(tuple, chis.tolist()), lams.tolist()):
                if not any(chi):
                    continue
                pairs += 1
                if canonicalize_fast(q, chi)[0] != canonicalize_fast(q, diamond(q, lam, chi))[0]:
                    violations += 1
    agree = all(
        _partition(q, m, canonicalize_fast) == _partition(q, m, canonicalize_bruteforce)
        for q, m in [(5, 4), (5, 5), (7, 4)]
    )
    st = charpoly_class_stats(7, 5, 5, 19, 20_000, seed=5)
    bound = count_sep_classes(7, 5)
    passed = violations == 0 and agree and st.distinct <= bound
    record(
        5,
        passed,
        f"(a) {violations} violations over {pairs} pairs; (b) partitions agree: {agree}; "
        f"(c) {st.distinct} distinct keys <= {bound}",
    )
    assert passed


def _dual_transport(F, rng, m, n, k):
    C = random_code(F, m, n, k, rng)
    P, Q = ms.random_invertible(F, m, rng), ms.random_invertible(F, n, rng)
    D = apply_equivalence(C, P, Q)
    PiT, QiT = ms.transpose(ms.mat_inverse(F, P)), ms.transpose(ms.mat_inverse(F, Q))
    return dual(D) == apply_equivalence(dual(C), PiT, QiT)


def _hull_conj(F, rng, m, k):
    C = random_code(F, m, m, k, rng)
    P = ms.random_invertible(F, m, rng)
    return hull(conjugate(C, P)) == conjugate(hull(C), P)


def _key_identity(F, rng, m, k):
    C = random_code(F, m, m, k, rng)
    P, Q = ms.random_invertible(F, m, rng), ms.random_invertible(F, m, rng)
    D = apply_equivalence(C, P, Q)
    A = dual(C).random_element(rng)
    B = F.matmul(F.matmul(ms.transpose(ms.mat_inverse(F, P)), A), ms.transpose(Q))
    if not _in(dual(D), B):
        return False
    try:
        CA, DB = map_by_A(C, A), map_by_A(D, B)
    except DimensionDrop:
        return True
    return DB == conjugate(CA, P)


def _in(code, M):
    from hullmce.code import contains

    return contains(code, M)


def _involution(F, rng, m, k):
    C = random_code(F, m, m, k, rng)
    return dual(dual(C)) == C


def _trace_zero(F, rng, m, k):
    C = random_code(F, m, m, k, rng)
    A = dual(C).random_element(rng)
    try:
        CA = map_by_A(C, A)
    except DimensionDrop:
        return True
    for U in hull_basis(CA):
        if ms.trace(F, U).any() or ms.trace(F, F.matmul(U, U)).any():
            return False
    return True


def test_criterion_6_transport_identities(record):
    F = prime_field(7)
    rng = np.random.default_rng(6)
    checks = {
        "dual transport": lambda m, k: _dual_transport(F, rng, m, m, k),
        "hull conjugation": lambda m, k: _hull_conj(F, rng, m, k),
        "key identity": lambda m, k: _key_identity(F, rng, m, k),
        "dual involution": lambda m, k: _involution(F, rng, m, k),
        "Tr(U)=Tr(U^2)=0": lambda m, k: _trace_zero(F, rng, m, k),
    }
    failures = {}
    for name, check in checks.items():
        bad = 0
        for _ in range(1000):
            m = int(rng.integers(3, 5))
            k = int(rng.integers(1, m * m))
            bad += not check(m, k)
        failures[name] = bad
    passed = not any(failures.values())
    record(6, passed, "violations over 1000 trials each: " + ", ".join(f"{n} {b}" for n, b in failures.items()))
    assert passed


def test_criterion_7_coupon_collector(record):
    q, L = 11, 11
    draws = []
    for seed in range(10):
        rng = np.random.default_rng(7000 + seed)
        C = random_code(prime_field(q), 5, 5, 19, rng)
        C, _, _ = preprocess(C, C)
        hd = construct_dict(C, L, rng, max_wall_samples=100 * q * L)
        draws.append(hd.samples_drawn)
    mean = statistics.mean(draws)
    passed = 0.5 * q * L <= mean <= 2 * q * L
    record(7, passed, f"mean draws {mean:.1f} for L={L} in [{0.5 * q * L}, {2 * q * L}]")
    assert passed


def test_criterion_8_negative_soundness(record):
    failures = 0
    for seed in range(20):
        inst = gen_negative_instance(11, 4, 4, 12, 8000 + seed)
        try:
            P, Q, _ = attack(inst.C, inst.D, AttackConfig(seed=seed))
        except AttackFailure:
            failures += 1
            continue
        assert not verify_solution(inst, P, Q)
    passed = failures == 20
    record(8, passed, f"{failures}/20 inequivalent pairs rejected")
    assert passed
