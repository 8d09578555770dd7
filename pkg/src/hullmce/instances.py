"""Planted instances, solution checks, file formats and sampling statistics.

Instance files are JSON documents::

    {"schema": "mce-instance/1", "q": 11, "m": 4, "n": 4, "k": 12,
     "C": [[[...], ...], ...], "D": [...],
     "solution": {"P": [[...]], "Q": [[...]]}}      # optional

Matrices are nested lists of integers in [0, q).  Solution files use
``{"schema": "mce-solution/1", "P": ..., "Q": ..., "stats": {...}}``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import matspace as ms
from . import poly
from .attack import examine, preprocess
from .canon import Normalizer
from .code import MatrixCode, apply_equivalence, code_equal, conjugate, hull_basis, random_code
from .errors import MCEError, ParseError, ValidationError
from .field import prime_field

INSTANCE_SCHEMA = "mce-instance/1"
SOLUTION_SCHEMA = "mce-solution/1"
STATS_CHUNK = 500


@dataclass
class Instance:
    q: int
    m: int
    n: int
    k: int
    C: MatrixCode
    D: MatrixCode

    def __post_init__(self):
        for code in (self.C, self.D):
            if code.shape != (self.m, self.n) or code.k != self.k or code.field.q != self.q:
                raise ValidationError(f"{code!r} does not match q={self.q}, {self.m}x{self.n}, k={self.k}")

    @property
    def field(self):
        return self.C.field

    def __eq__(self, other):
        return isinstance(other, Instance) and (self.C, self.D) == (other.C, other.D)


@dataclass
class PlantedSolution:
    P: np.ndarray
    Q: np.ndarray


def _check_params(q, m, n, k):
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if not 1 <= k <= m * n:
        raise ValueError(f"k = {k} must lie in [1, {m * n}]")
    return prime_field(q)


def gen_instance(q: int, m: int, n: int, k: int, seed: int):
    """A random C, random invertible P, Q and D = P C Q^{-1}."""
    F = _check_params(q, m, n, k)
    rng = np.random.default_rng(seed)
    C = random_code(F, m, n, k, rng)
    P = ms.random_invertible(F, m, rng)
    Q = ms.random_invertible(F, n, rng)
    D = apply_equivalence(C, P, Q)
    return Instance(q, m, n, k, C, D), PlantedSolution(P, Q)


def gen_negative_instance(q: int, m: int, n: int, k: int, seed: int) -> Instance:
    """Two independent random codes (inequivalent with overwhelming probability)."""
    F = _check_params(q, m, n, k)
    rng = np.random.default_rng(seed)
    return Instance(q, m, n, k, random_code(F, m, n, k, rng), random_code(F, m, n, k, rng))


def gen_conjugacy_pair(q: int, m: int, k: int, seed: int, max_tries: int = 10_000):
    """(C, D, P0) with C in ker(Tr), a one-dimensional hull with separable charpoly, D = P0 C P0^{-1}."""
    F = _check_params(q, m, m, k)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        C = random_code(F, m, m, k, rng, inside_ker_trace=True)
        H = hull_basis(C)
        if len(H) != 1 or not poly.is_separable(F, ms.charpoly(F, H[0])):
            continue
        P0 = ms.random_invertible(F, m, rng)
        return C, conjugate(C, P0), P0
    raise MCEError(f"no code with a separable one-dimensional hull in {max_tries} tries")


def verify_solution(inst: Instance, P, Q) -> bool:
    """D = P C Q^{-1} with P, Q invertible; False on any malformed input."""
    F = inst.field
    try:
        P = np.asarray(P, dtype=np.int64)
        Q = np.asarray(Q, dtype=np.int64)
        if P.shape != (inst.m, inst.m, F.d) or Q.shape != (inst.n, inst.n, F.d):
            return False
        if not (ms.is_invertible(F, P) and ms.is_invertible(F, Q)):
            return False
        return code_equal(inst.D, apply_equivalence(inst.C, P % F.q, Q % F.q))
    except (MCEError, ValueError):
        return False


# serialization ---------------------------------------------------------------


def _matrix_list(M):
    return ms.to_int_matrix(M)


def instance_to_json(inst: Instance, sol: PlantedSolution | None = None) -> dict:
    out = {
        "schema": INSTANCE_SCHEMA,
        "q": inst.q,
        "m": inst.m,
        "n": inst.n,
        "k": inst.k,
        "C": [_matrix_list(B) for B in inst.C.basis],
        "D": [_matrix_list(B) for B in inst.D.basis],
    }
    if sol is not None:
        out["solution"] = {"P": _matrix_list(sol.P), "Q": _matrix_list(sol.Q)}
    return out


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _field(obj, key, kind, what):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{what}: missing field '{key}'")
    val = obj[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise ParseError(f"{what}: field '{key}' must be an integer")
    if kind is str and not isinstance(val, str):
        raise ParseError(f"{what}: field '{key}' must be a string")
    if kind is list and not isinstance(val, list):
        raise ParseError(f"{what}: field '{key}' must be a list")
    return val


def _matrix(F, raw, rows, cols, what):
    try:
        M = np.asarray(raw, dtype=np.int64)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{what}: not a rectangular integer matrix") from exc
    if M.shape != (rows, cols):
        raise ValidationError(f"{what}: expected a {rows} x {cols} matrix, got shape {M.shape}")
    return (M % F.q)[..., None]


def _code(F, raw, m, n, k, what):
    gens = [_matrix(F, B, m, n, f"{what}[{i}]") for i, B in enumerate(raw)]
    code = MatrixCode(F, m, n, np.stack(gens) if gens else F.zeros((0, m, n)))
    if code.k != k:
        raise ValidationError(f"{what}: basis has rank {code.k}, declared k = {k}")
    return code


def instance_from_json(obj, what: str = "instance"):
    schema = _field(obj, "schema", str, what)
    if schema != INSTANCE_SCHEMA:
        raise ParseError(f"{what}: unsupported schema {schema!r}")
    q, m, n, k = (_field(obj, key, int, what) for key in ("q", "m", "n", "k"))
    try:
        F = _check_params(q, m, n, k)
    except (MCEError, ValueError) as exc:
        raise ValidationError(f"{what}: {exc}") from exc
    C = _code(F, _field(obj, "C", list, what), m, n, k, f"{what}.C")
    D = _code(F, _field(obj, "D", list, what), m, n, k, f"{what}.D")
    inst = Instance(q, m, n, k, C, D)
    sol = None
    if "solution" in obj:
        s = obj["solution"]
        sol = PlantedSolution(
            _matrix(F, _field(s, "P", list, f"{what}.solution"), m, m, f"{what}.solution.P"),
            _matrix(F, _field(s, "Q", list, f"{what}.solution"), n, n, f"{what}.solution.Q"),
        )
    return inst, sol


def _open_text(path_or_stream, mode):
    if hasattr(path_or_stream, "read" if mode == "r" else "write"):
        return path_or_stream, False
    return open(path_or_stream, mode, encoding="utf-8"), True


def write_instance(path_or_stream, inst: Instance, sol: PlantedSolution | None = None):
    fh, close = _open_text(path_or_stream, "w")
    try:
        json.dump(instance_to_json(inst, sol), fh)
        fh.write("\n")
    finally:
        if close:
            fh.close()


def read_instance(path_or_stream):
    """(Instance, PlantedSolution or None); raises ParseError / ValidationError."""
    fh, close = _open_text(path_or_stream, "r")
    try:
        text = fh.read()
    finally:
        if close:
            fh.close()
    return instance_from_json(_load_json(text, "instance"))


def write_solution(path_or_stream, P, Q, stats: dict | None = None):
    obj = {"schema": SOLUTION_SCHEMA, "P": _matrix_list(P), "Q": _matrix_list(Q)}
    if stats is not None:
        obj["stats"] = stats
    fh, close = _open_text(path_or_stream, "w")
    try:
        json.dump(obj, fh)
        fh.write("\n")
    finally:
        if close:
            fh.close()


def read_solution(path_or_stream, inst: Instance):
    """(P, Q) shaped for ``inst``."""
    fh, close = _open_text(path_or_stream, "r")
    try:
        text = fh.read()
    finally:
        if close:
            fh.close()
    obj = _load_json(text, "solution")
    schema = _field(obj, "schema", str, "solution")
    if schema != SOLUTION_SCHEMA:
        raise ParseError(f"solution: unsupported schema {schema!r}")
    F = inst.field
    P = _matrix(F, _field(obj, "P", list, "solution"), inst.m, inst.m, "solution.P")
    Q = _matrix(F, _field(obj, "Q", list, "solution"), inst.n, inst.n, "solution.Q")
    return P, Q


# statistics ------------------------------------------------------------------


def _chunks(samples: int, seed: int):
    """Fixed split of the work, independent of the number of workers."""
    count = max(1, math.ceil(samples / STATS_CHUNK))
    sizes = [STATS_CHUNK] * (count - 1) + [samples - STATS_CHUNK * (count - 1)]
    return list(zip(sizes, np.random.SeedSequence(seed).spawn(count)))


def _run_chunks(fn, jobs, workers):
    if workers <= 1 or len(jobs) == 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*jobs)))


def _hull_chunk(q, m, k, size, seed):
    F = prime_field(q)
    rng = np.random.default_rng(seed)
    hist = Counter()
    for _ in range(size):
        hist[len(hull_basis(random_code(F, m, m, k, rng, inside_ker_trace=True)))] += 1
    return hist


def hull_dim_stats(q: int, m: int, k: int, samples: int, seed: int = 0, workers: int = 1) -> dict[int, int]:
    """Histogram {hull dimension: count} over random k-dimensional codes in ker(Tr)."""
    if not 1 <= k <= m * m - 2:
        raise ValueError(f"k = {k} must lie in [1, {m * m - 2}]")
    jobs = [(q, m, k, size, s) for size, s in _chunks(samples, seed)]
    total = Counter()
    for hist in _run_chunks(_hull_chunk, jobs, workers):
        total.update(hist)
    return dict(sorted(total.items()))


def histogram_fraction(hist: dict, dim: int) -> float:
    total = sum(hist.values())
    return hist.get(dim, 0) / total if total else 0.0


def write_histogram_csv(hist: dict, stream=None) -> str:
    """CSV with columns dim, count, fraction; returns the text when no stream is given."""
    out = stream if stream is not None else io.StringIO()
    total = sum(hist.values())
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["dim", "count", "fraction"])
    for dim, count in sorted(hist.items()):
        w.writerow([dim, count, f"{count / total:.6f}" if total else "0"])
    return out.getvalue() if stream is None else ""


@dataclass
class ClassStats:
    frequencies: dict  # canonical tuple -> count
    qualifying: int
    samples: int

    @property
    def distinct(self) -> int:
        return len(self.frequencies)

    @property
    def max_min_ratio(self) -> float:
        if not self.frequencies:
            return float("nan")
        vals = self.frequencies.values()
        return max(vals) / min(vals)


def charpoly_class_stats(q: int, m: int, n: int, k: int, samples: int, seed: int = 0, method="bruteforce") -> ClassStats:
    """Frequencies of canonical keys over ``samples`` draws of the dictionary loop."""
    F = _check_params(q, m, n, k)
    rng = np.random.default_rng(seed)
    C = random_code(F, m, n, k, rng)
    C, _, _ = preprocess(C, C)
    dual_flat = MatrixCode(F, C.m, C.n, ms.kernel(F, C.flat)).flat
    normalizer = Normalizer(q, method)
    freq = Counter()
    for _ in range(samples):
        coeffs = F.random(rng, len(dual_flat))
        A = F.matmul(coeffs[None], dual_flat)[0].reshape(C.m, C.n, F.d)
        status, payload = examine(C, A, normalizer)
        if status == "ok":
            freq[payload[0]] += 1
    return ClassStats(dict(freq), sum(freq.values()), samples)
