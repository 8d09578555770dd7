"""The hull attack on matrix code equivalence.

Pipeline: normalize the instance (transpose so that m <= n, pass to duals
when that gives the larger dimension), fill a dictionary keyed by
normalized characteristic polynomials of hull generators of C A^T for
random A in the dual of C, probe with random B in the dual of D until a
key collides and the conjugacy solver confirms it, then recover Q by
linear algebra and map the solution back to the original instance.
"""

from __future__ import annotations

import logging
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from multiprocessing import Manager
from typing import NamedTuple

import numpy as np

from . import matspace as ms
from .canon import (
    Normalizer,
    char_tuple,
    count_sep_classes,
    encode_key,
    is_separable_tuple,
)
from .code import MatrixCode, apply_equivalence, code_equal, dual, hull_basis, map_by_A
from .conjugacy import solve_hull_conjugacy
from .errors import (
    AttackFailure,
    DimensionDrop,
    DimensionMismatch,
    Exhausted,
    NoInvertibleElement,
    NoSolution,
    OutOfRange,
    RetryExhausted,
)

log = logging.getLogger(__name__)

RECOVER_RETRIES = 64
CLASS_CAP_ENUMERATION = 20_000
DIM1 = frozenset({"a0", "sep", "ok"})


@dataclass
class Transform:
    transposed: bool = False
    dual_swapped: bool = False


@dataclass
class AttackConfig:
    L: int | None = None  # None: from choose_budgets
    N: int | None = None
    max_wall_samples: int | None = None  # default 8 q L
    max_probe_samples: int | None = None  # default 8 q N
    strategy: str = "auto"
    seed: int = 0
    threads: int = 1
    deterministic: bool = True
    normalizer: str = "bruteforce"

    def __post_init__(self):
        if self.L is not None and self.L < 1:
            raise ValueError("L must be >= 1")
        if self.N is not None and self.N < 0:
            raise ValueError("N must be >= 0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


class AttackResult(NamedTuple):
    P: np.ndarray
    Q: np.ndarray
    stats: dict


def preprocess(C: MatrixCode, D: MatrixCode):
    """Transpose to m <= n, then pick the orientation (code or dual) of larger dimension."""
    if C.shape != D.shape or C.field != D.field:
        raise DimensionMismatch("C and D must live in the same matrix space")
    if C.k != D.k:
        raise DimensionMismatch(f"dim C = {C.k} but dim D = {D.k}")
    tr = Transform()
    if C.m > C.n:
        C, D = C.transpose(), D.transpose()
        tr.transposed = True
    m, n, k = C.m, C.n, C.k
    if m < 3:
        raise OutOfRange(f"need min(m, n) >= 3, got {m}")
    options = sorted([(k, False), (m * n - k, True)], key=lambda o: -o[0])
    for kk, swap in options:
        if 2 <= kk <= m * m - 2:
            if swap:
                C, D = dual(C), dual(D)
                tr.dual_swapped = True
            return C, D, tr
    raise OutOfRange(f"neither k = {k} nor k_perp = {m * n - k} lies in [2, {m * m - 2}]")


def undo_transform(P, Q, tr: Transform, F):
    """Map a solution of the preprocessed instance back to the original one."""
    if tr.dual_swapped:
        P = ms.transpose(ms.mat_inverse(F, P))
        Q = ms.transpose(ms.mat_inverse(F, Q))
    if tr.transposed:
        P, Q = ms.transpose(ms.mat_inverse(F, Q)), ms.transpose(ms.mat_inverse(F, P))
    return np.ascontiguousarray(P), np.ascontiguousarray(Q)


def _ceil_root_power(q: int, e2: int) -> int:
    """ceil(q^(e2 / 2)) for an integer e2, exactly."""
    if e2 <= 0:
        return 1
    x = q**e2
    r = math.isqrt(x)
    return r if r * r == x else r + 1


@lru_cache(maxsize=64)
def class_cap(q: int, m: int) -> int | None:
    """Exact number of key classes when cheap to enumerate, else None."""
    if m < 3 or q ** (m - 2) > CLASS_CAP_ENUMERATION:
        return None
    return count_sep_classes(q, m)


def choose_budgets(q: int, m: int, kperp: int, c: int = 4) -> tuple[int, int]:
    """Dictionary size L and probe budget N (counted in dimension-1 hull events)."""
    if kperp - 2 <= 2 * (m - 3):
        L = _ceil_root_power(q, kperp - 2)
        N = c * L if kperp % 2 == 0 else math.ceil(c * math.sqrt(q) ** (kperp - 2))
    else:
        L = q ** (m - 3)
        N = c * q ** (kperp - m + 1)
    cap = class_cap(q, m)
    if cap:
        L = min(L, cap)
    return max(L, 1), max(N, 1)


@lru_cache(maxsize=1 << 16)
def _separable(q: int, chi: tuple) -> bool:
    return is_separable_tuple(q, chi)


def examine(C: MatrixCode, A, normalizer: Normalizer):
    """Apply the dictionary guards to A in the dual of C.

    Returns ``(status, payload)``; status is one of ``rank``, ``dim``,
    ``hull`` (hull dimension != 1), ``a0`` (zero constant coefficient),
    ``sep`` (not separable) or ``ok``, in which case the payload is
    ``(canonical tuple, normalized U, C A^T)``.
    """
    F = C.field
    if ms.rank(F, A) < C.m:
        return "rank", None
    try:
        CA = map_by_A(C, A)
    except DimensionDrop:
        return "dim", None
    H = hull_basis(CA)
    if len(H) != 1:
        return "hull", None
    U = H[0]
    chi = char_tuple(F, U)
    if not chi or chi[-1] == 0:
        return "a0", None
    canon, lam = normalizer(chi)
    if not _separable(F.q, canon):
        return "sep", None
    return "ok", (canon, F.mul(F.elem(lam), U), CA)


@dataclass
class HullDict:
    """Canonical tuple key -> coordinates of A in the dual basis of C (first wins).

    U is not stored; :meth:`get` re-derives it from A, which is
    deterministic, so the stored and recomputed generators agree.
    """

    C: MatrixCode
    normalizer: Normalizer
    entries: dict = field(default_factory=dict)
    samples_drawn: int = 0
    hulls_dim1_seen: int = 0
    rejects: Counter = field(default_factory=Counter)
    saturated: bool = False

    def __post_init__(self):
        self.dual_flat = dual(self.C).flat

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return key in self.entries

    def matrix(self, coords):
        F = self.C.field
        flat = F.matmul(np.asarray(coords)[None], self.dual_flat)[0]
        return flat.reshape(self.C.m, self.C.n, F.d)

    def draw(self, rng):
        """Sample one A and insert it if it qualifies; returns the status."""
        F = self.C.field
        coords = F.random(rng, len(self.dual_flat))
        status, payload = examine(self.C, self.matrix(coords), self.normalizer)
        self.samples_drawn += 1
        if status in DIM1:
            self.hulls_dim1_seen += 1
        if status != "ok":
            self.rejects[status] += 1
            return status
        key = encode_key(F.q, payload[0])
        if key in self.entries:
            self.rejects["duplicate"] += 1
            return "duplicate"
        self.entries[key] = (coords, payload[0])
        return status

    def get(self, key):
        """(A, normalized U, C A^T) for a stored key."""
        coords, _ = self.entries[key]
        A = self.matrix(coords)
        status, payload = examine(self.C, A, self.normalizer)
        if status != "ok":  # pragma: no cover - entries passed the same check
            raise RuntimeError("stored dictionary entry no longer qualifies")
        return A, payload[1], payload[2]

    def items(self):
        return list(self.entries.items())


def construct_dict(C: MatrixCode, L: int, rng, max_wall_samples: int | None = None, normalizer=None) -> HullDict:
    """Sample A until L distinct keys are stored or the sample cap is reached.

    Hitting the cap sets ``saturated``; the partial dictionary is still usable.
    """
    F = C.field
    if normalizer is None:
        normalizer = Normalizer(F.q)
    hd = HullDict(C, normalizer)
    cap = max_wall_samples if max_wall_samples is not None else 8 * F.q * L
    while len(hd) < L and hd.samples_drawn < cap:
        hd.draw(rng)
    if len(hd) < L:
        hd.saturated = True
        log.info("dictionary saturated: %d/%d keys after %d samples", len(hd), L, hd.samples_drawn)
    return hd


def _new_stats():
    return {"draws": 0, "dim1_hulls": 0, "keys": 0, "collisions": 0, "false_positives": 0}


def probe(D: MatrixCode, hd: HullDict, N: int, rng, strategy="auto", max_samples=None, stats=None, stop=None):
    """Yield (A, B, P) for every confirmed collision, within N hull events."""
    F = D.field
    if stats is None:
        stats = _new_stats()
    if max_samples is None:
        max_samples = 8 * F.q * N
    Dd = dual(D).flat
    events = samples = 0
    while events < N and samples < max_samples:
        if stop is not None and stop.is_set():
            return
        coords = F.random(rng, len(Dd))
        B = F.matmul(coords[None], Dd)[0].reshape(D.m, D.n, F.d)
        samples += 1
        stats["draws"] += 1
        status, payload = examine(D, B, hd.normalizer)
        if status in DIM1:
            events += 1
            stats["dim1_hulls"] += 1
        if status != "ok":
            continue
        key = encode_key(F.q, payload[0])
        if key not in hd:
            continue
        stats["collisions"] += 1
        A, U, CA = hd.get(key)
        try:
            P = solve_hull_conjugacy(CA, payload[2], U, payload[1], strategy, rng)
        except (NoSolution, RetryExhausted):
            stats["false_positives"] += 1
            continue
        yield A, B, P


def find_collision(D: MatrixCode, hd: HullDict, N: int, rng, strategy="auto", max_samples=None, stats=None):
    """First (A, B, P) with D B^T = P (C A^T) P^{-1}; raises Exhausted."""
    for hit in probe(D, hd, N, rng, strategy, max_samples, stats):
        return hit
    raise Exhausted(f"no confirmed collision within {N} hull events")


def recover_Q(C: MatrixCode, D: MatrixCode, P) -> np.ndarray:
    """Q with D = P C Q^{-1}, from the linear system (P C) X in D."""
    F = C.field
    n = C.n
    PC = F.matmul(P, C.basis)
    Bd = dual(D).basis
    if not len(Bd):
        return F.eye(n)
    rows = F.matmul(np.swapaxes(PC, 1, 2)[:, None], Bd[None])  # C_i^T B_j, n x n
    K = ms.kernel(F, rows.reshape(-1, n * n, F.d))
    if len(K):
        rng = np.random.default_rng(0)
        basis = K.reshape(-1, n, n, F.d)
        for _ in range(RECOVER_RETRIES):
            X = ms.random_combination(F, basis, rng)
            if ms.is_invertible(F, X):
                if code_equal(D, MatrixCode(F, C.m, n, F.matmul(PC, X))):
                    return ms.mat_inverse(F, X)
                break
    raise NoInvertibleElement("no invertible X with (P C) X = D")


def _probe_and_recover(C, D, hd, N, rng, strategy, max_samples, stats, stop=None):
    for _, _, P in probe(D, hd, N, rng, strategy, max_samples, stats, stop):
        try:
            return P, recover_Q(C, D, P)
        except NoInvertibleElement:
            stats["recover_failures"] = stats.get("recover_failures", 0) + 1
            continue
    return None


def _dict_worker(C, L, cap, seed, method):
    hd = construct_dict(C, L, np.random.default_rng(seed), cap, Normalizer(C.field.q, method))
    return hd.items(), hd.samples_drawn, hd.hulls_dim1_seen


def _probe_worker(C, D, entries, N, max_samples, seed, strategy, method, stop):
    hd = HullDict(C, Normalizer(C.field.q, method), dict(entries))
    stats = _new_stats()
    found = _probe_and_recover(C, D, hd, N, np.random.default_rng(seed), strategy, max_samples, stats, stop)
    if found is not None:
        stop.set()
    return found, stats


def _split(total, parts):
    base, extra = divmod(total, parts)
    return [base + (i < extra) for i in range(parts)]


def attack(C: MatrixCode, D: MatrixCode, cfg: AttackConfig | None = None) -> AttackResult:
    """Solve D = P C Q^{-1}; raises :class:`AttackFailure` with a phase tag."""
    cfg = cfg or AttackConfig()
    stats = _new_stats()
    times = {}
    stats["phase_times_ms"] = times
    stats["success"] = False
    t0 = time.perf_counter()

    try:
        Cp, Dp, tr = preprocess(C, D)
    except OutOfRange as exc:
        raise AttackFailure("OutOfRange", str(exc), stats) from exc
    F = Cp.field
    q, m = F.q, Cp.m
    kperp = m * Cp.n - Cp.k
    L0, N0 = choose_budgets(q, m, kperp)
    L = cfg.L if cfg.L is not None else L0
    N = cfg.N if cfg.N is not None else N0
    stats.update(L=L, N=N, transposed=tr.transposed, dual_swapped=tr.dual_swapped)
    t1 = time.perf_counter()
    times["preprocess"] = (t1 - t0) * 1e3

    threads = 1 if cfg.deterministic else cfg.threads
    seeds = np.random.SeedSequence(cfg.seed)
    cap = cfg.max_wall_samples if cfg.max_wall_samples is not None else 8 * q * L
    probe_cap = cfg.max_probe_samples if cfg.max_probe_samples is not None else 8 * q * N

    if threads == 1:
        rng = np.random.default_rng(seeds)
        hd = construct_dict(Cp, L, rng, cap, Normalizer(q, cfg.normalizer))
        stats["draws"] += hd.samples_drawn
        stats["dim1_hulls"] += hd.hulls_dim1_seen
        stats["keys"] = len(hd)
        stats["saturated"] = hd.saturated
        t2 = time.perf_counter()
        times["dict"] = (t2 - t1) * 1e3
        found = _probe_and_recover(Cp, Dp, hd, N, rng, cfg.strategy, probe_cap, stats)
    else:
        found, t2 = _attack_parallel(Cp, Dp, L, N, cap, probe_cap, cfg, threads, seeds, stats, t1)
        times["dict"] = (t2 - t1) * 1e3
    t3 = time.perf_counter()
    times["probe"] = (t3 - t2) * 1e3

    if found is None:
        phase = "Saturated+Exhausted" if stats.get("saturated") else "Exhausted"
        raise AttackFailure(phase, f"no solution within {N} hull events", stats)
    P, Q = undo_transform(*found, tr, F)
    if not code_equal(D, apply_equivalence(C, P, Q)):  # pragma: no cover - guarded above
        raise AttackFailure("Verification", "recovered (P, Q) does not map C to D", stats)
    stats["success"] = True
    times["total"] = (time.perf_counter() - t0) * 1e3
    return AttackResult(P, Q, stats)


def _attack_parallel(Cp, Dp, L, N, cap, probe_cap, cfg, threads, seeds, stats, t1):
    q = Cp.field.q
    dict_seeds, probe_seeds = seeds.spawn(2)
    with ProcessPoolExecutor(max_workers=threads) as pool, Manager() as mgr:
        jobs = [
            pool.submit(_dict_worker, Cp, L, c, s, cfg.normalizer)
            for c, s in zip(_split(cap, threads), dict_seeds.spawn(threads))
        ]
        entries = {}
        for job in jobs:
            items, drawn, dim1 = job.result()
            stats["draws"] += drawn
            stats["dim1_hulls"] += dim1
            for key, val in items:
                if len(entries) < L:
                    entries.setdefault(key, val)
        stats["keys"] = len(entries)
        stats["saturated"] = len(entries) < L
        t2 = time.perf_counter()
        stop = mgr.Event()
        jobs = [
            pool.submit(_probe_worker, Cp, Dp, list(entries.items()), n, c, s, cfg.strategy, cfg.normalizer, stop)
            for n, c, s in zip(_split(N, threads), _split(probe_cap, threads), probe_seeds.spawn(threads))
        ]
        found = None
        for job in jobs:
            res, wstats = job.result()
            for key in ("draws", "dim1_hulls", "collisions", "false_positives"):
                stats[key] += wstats[key]
            if found is None and res is not None:
                found = res
    return found, t2
