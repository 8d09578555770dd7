"""Solving D = P C P^{-1} for codes with conjugate one-dimensional hulls.

Setting: hull(C) = <U>, hull(D) = <V>, V = R U R^{-1} with a separable
characteristic polynomial.  Any solution has the form P = R f(U) with
deg f < m, and two routes find f:

* ``solve_linearized`` writes R f(U) C g(U) R^{-1} in D as a linear system
  in the m^2 products of the coefficients of f and g, and reads f off a
  rank-one kernel vector.
* ``find_P_diag`` diagonalizes V over the splitting field of its
  characteristic polynomial; f(Delta) is then diagonal and its entries come
  from a ratio system on a one-dimensional slice of the codes, after which
  f is interpolated.
"""

from __future__ import annotations

from collections import deque
from itertools import product
from dataclasses import dataclass

import numpy as np

from . import matspace as ms
from . import poly
from .canon import canonicalize_bruteforce, canonicalize_fast, char_tuple, stabilizer
from .code import MatrixCode, code_equal, conjugate, dual
from .errors import BaseFieldDescentFailed, Indeterminate, NoSolution, NotConjugate
from .field import FieldCtx, extension_field

CONJUGATOR_RETRIES = 64
STRATEGIES = ("linearized", "diagonal", "auto")


@dataclass
class ConjugacyInstance:
    C: MatrixCode
    D: MatrixCode
    U: np.ndarray
    V: np.ndarray
    R: np.ndarray


@dataclass
class DiagonalizedPair:
    Cp: MatrixCode
    Dp: MatrixCode
    delta: np.ndarray  # (m, d) diagonal of Delta
    S: np.ndarray
    field: FieldCtx

    @property
    def Delta(self):
        E = self.field
        m = len(self.delta)
        out = E.zeros((m, m))
        out[np.arange(m), np.arange(m)] = self.delta
        return out


def find_conjugator(F: FieldCtx, U, V, rng) -> np.ndarray:
    """An invertible R with V R = R U."""
    if not np.array_equal(ms.charpoly(F, U), ms.charpoly(F, V)):
        raise NotConjugate("characteristic polynomials differ")
    basis = ms.solve_sylvester_commutant(F, U, V)
    if not len(basis):
        raise NotConjugate("no intertwiner")
    for _ in range(CONJUGATOR_RETRIES):
        R = ms.random_combination(F, basis, rng)
        if ms.is_invertible(F, R):
            return R
    raise NotConjugate("no invertible intertwiner found")


def _powers(F, U, m):
    out = [F.eye(m)]
    for _ in range(m - 1):
        out.append(F.matmul(out[-1], U))
    return np.stack(out)


def linearized_system(inst: ConjugacyInstance):
    """Rows (l, r): sum_ij Tr(B_r^T R U^i C_l U^j R^{-1}) t_ij, shape (k k_perp, m^2, d)."""
    C, D = inst.C, inst.D
    F = C.field
    m, k = C.m, C.k
    Ui = _powers(F, inst.U, m)
    left = F.matmul(inst.R[None], Ui)
    right = F.matmul(Ui, ms.mat_inverse(F, inst.R)[None])
    LC = F.matmul(left[None, :], C.basis[:, None])  # (k, i, m, m)
    M = F.matmul(LC[:, :, None], right[None, None, :])  # (k, i, j, m, m)
    M = M.reshape(k, m * m, m * m, F.d)
    Bd = dual(D).flat
    rows = F.matmul(Bd[None], np.swapaxes(M, 1, 2))  # (k, k_perp, m^2)
    return rows.reshape(-1, m * m, F.d)


def solve_linearized(inst: ConjugacyInstance) -> np.ndarray:
    """P = R f(U) from a one-dimensional kernel of the linearized system.

    Raises :class:`Indeterminate` when the kernel (or its vector) does not
    single out f, and :class:`NoSolution` when there is no valid P.
    """
    C, D, U, R = inst.C, inst.D, inst.U, inst.R
    F = C.field
    m = C.m
    if C.k != D.k:
        raise NoSolution("codes of different dimensions")
    K = ms.kernel(F, linearized_system(inst))
    if not len(K):
        raise NoSolution("linearized system has only the zero solution")
    if len(K) > 1:
        err = Indeterminate(f"solution space has dimension {len(K)}")
        err.kernel_dim = len(K)
        raise err
    T = K[0].reshape(m, m, F.d)
    i0, j0 = divmod(int(np.flatnonzero(T.any(axis=-1))[0]), m)
    beta = T[i0]
    alpha = F.mul(T[:, j0], F.inv(T[i0, j0]))
    if not np.array_equal(F.mul(alpha[:, None], beta[None, :]), T):
        raise Indeterminate("kernel vector is not rank one")
    fU = ms.poly_of_matrix(F, alpha, U)
    gU = ms.poly_of_matrix(F, beta, U)
    prod = F.matmul(fU, gU)
    c = prod[0, 0]
    if not c.any() or not np.array_equal(prod, F.mul(c, F.eye(m))):
        raise NoSolution("f(U) g(U) is not a nonzero scalar")
    P = F.matmul(R, fU)
    if not code_equal(D, conjugate(C, P)):
        raise NoSolution("candidate P does not conjugate C onto D")
    return P


def reduce_to_diagonal(inst: ConjugacyInstance) -> DiagonalizedPair:
    """Diagonalize V = S Delta S^{-1} over the splitting field of its charpoly."""
    F = inst.C.field
    m = inst.C.m
    chi = ms.charpoly(F, inst.V)
    d = poly.splitting_degree(F, chi)
    E = extension_field(F.q, d)
    delta = poly.roots(E, E.embed(chi))
    if len(delta) != m or len({E.index(x) for x in delta}) != m:
        raise NoSolution("characteristic polynomial is not separable")
    V = E.embed(inst.V)
    I = E.eye(m)
    cols = []
    for x in delta:
        ker = ms.kernel(E, E.sub(V, E.mul(x, I)))
        cols.append(ker[0])
    S = np.stack(cols, axis=1)
    Sinv = ms.mat_inverse(E, S)
    R = E.embed(inst.R)
    Rinv = ms.mat_inverse(E, R)
    left = E.matmul(Sinv, R)
    right = E.matmul(Rinv, S)
    Cp = MatrixCode(E, m, m, E.matmul(E.matmul(left, E.embed(inst.C.basis)), right))
    Dp = MatrixCode(E, m, m, E.matmul(E.matmul(Sinv, E.embed(inst.D.basis)), S))
    return DiagonalizedPair(Cp, Dp, np.stack(delta), S, E)


def _slice(code: MatrixCode, positions):
    """code cap {x_ij = 0 for (i, j) in positions}, as a basis array."""
    E = code.field
    m = code.m
    idx = [i * m + j for i, j in positions]
    A = np.swapaxes(code.flat[:, idx], 0, 1)  # |positions| x k
    K = ms.kernel(E, A)
    if not len(K):
        return K
    return E.matmul(K, code.flat).reshape(-1, m, m, E.d)


def _random_slice_positions(m, size, rng):
    """``size`` distinct off-diagonal positions."""
    off = [(i, j) for i in range(m) for j in range(m) if i != j]
    pick = rng.choice(len(off), size=size, replace=False)
    return [off[p] for p in pick]


def _scalar_candidates(E, C0, D0):
    """All mu with charpoly(mu D0) = charpoly(C0); None when both are nilpotent."""
    m = C0.shape[0]
    cc = ms.charpoly(E, C0)
    cd = ms.charpoly(E, D0)
    for i in range(1, m + 1):
        a, b = cc[m - i], cd[m - i]
        if a.any() != b.any():
            return []
        if a.any():
            break
    else:
        return None
    eq = E.zeros(i + 1)
    eq[0] = E.neg(E.mul(a, E.inv(b)))
    eq[i] = E.one()
    out = []
    for mu in poly.roots(E, eq):
        if any(
            not np.array_equal(E.mul(E.pow(mu, j), cd[m - j]), cc[m - j]) for j in range(1, m + 1)
        ):
            continue
        if not any(np.array_equal(mu, x) for x in out):
            out.append(mu)
    return out


class _RatioGraph:
    """Constraints u_i = r u_j accumulated over slices, checked for consistency."""

    def __init__(self, E, m):
        self.E = E
        self.m = m
        self.adj = [[] for _ in range(m)]

    def add(self, i, j, ratio):
        self.adj[j].append((i, ratio))
        self.adj[i].append((j, self.E.inv(ratio)))

    def solve(self):
        """u with u_0 = 1; None if disconnected; raises NoSolution on a cycle conflict."""
        E = self.E
        u = [None] * self.m
        u[0] = E.one()
        todo = deque([0])
        while todo:
            a = todo.popleft()
            for b, ratio in self.adj[a]:
                val = E.mul(ratio, u[a])
                if u[b] is None:
                    u[b] = val
                    todo.append(b)
                elif not np.array_equal(u[b], val):
                    raise NoSolution("inconsistent ratio system")
        if any(x is None for x in u):
            return None
        return np.stack(u)


def diagonal_matrix(E, values):
    m = len(values)
    out = E.zeros((m, m))
    out[np.arange(m), np.arange(m)] = values
    return out


def _diagonal_part(code: MatrixCode):
    """RREF basis (flattened) of the diagonal matrices in the code, and its pivot columns."""
    E = code.field
    m = code.m
    off = [i * m + j for i in range(m) for j in range(m) if i != j]
    K = ms.kernel(E, np.swapaxes(code.flat[:, off], 0, 1))
    if not len(K):
        return K, []
    Z, _, pivots = ms.rref(E, E.matmul(K, code.flat))
    return Z[: len(pivots)], pivots


def _reduce_mod(E, X, Z, pivots):
    """Representative of X modulo span(Z) vanishing on the pivot slots of Z."""
    x = X.reshape(-1, E.d)
    for row, p in zip(Z, pivots):
        if x[p].any():
            x = E.sub(x, E.mul(x[p], row))
    return x.reshape(X.shape)


def find_polynomial_diagonal(Cp: MatrixCode, Dp: MatrixCode, Delta, rng, max_rounds=None):
    """Monic f with Dp = f(Delta) Cp f(Delta)^{-1}.

    Let Z be the space of diagonal matrices in Cp (it contains Delta when
    Delta comes from the hull); conjugation by f(Delta) fixes Z pointwise,
    so Dp must contain the same Z.  Each round zeroes k - dim Z - 1 random
    off-diagonal coordinates; a generic slice is Z + <C0>.  Taking C0, D0
    modulo Z (zero on the pivot slots of Z), diag(u) C0 diag(u)^{-1} = mu D0
    for a scalar mu with charpoly(mu D0) = charpoly(C0), and every nonzero
    off-diagonal entry gives u_i / u_j = mu d_ij / c_ij.  Slices are kept
    while they join components of the ratio graph; once it is connected,
    the few candidate scalars per slice are searched and the final
    conjugation check decides.  ``Delta`` may be the diagonal matrix or the
    vector of its entries.
    """
    E = Cp.field
    m, k = Cp.m, Cp.k
    if Dp.k != k:
        raise NoSolution("codes of different dimensions")
    idx = np.arange(m)
    Delta = np.asarray(Delta)
    delta = Delta[idx, idx] if Delta.ndim == 3 else Delta
    if max_rounds is None:
        max_rounds = 8 * m
    Z, pivots = _diagonal_part(Cp)
    Zd, _ = _diagonal_part(Dp)
    if not np.array_equal(Z, Zd):
        raise NoSolution("the codes contain different diagonal matrices")
    h = len(Z)
    size = k - h - 1
    if size >= m * (m - 1) or size < 0:
        raise NoSolution("no off-diagonal coordinates left to compare")
    comp = list(range(m))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    slices = []  # (edges [(i, j, d_ij / c_ij)], candidate scalars)
    for _ in range(max_rounds):
        positions = _random_slice_positions(m, size, rng)
        Cl = _slice(Cp, positions)
        Dl = _slice(Dp, positions)
        if len(Cl) != len(Dl):
            raise NoSolution("slices of different dimensions")
        if len(Cl) != h + 1:
            continue
        C0 = next(X for X in (_reduce_mod(E, B, Z, pivots) for B in Cl) if X.any())
        D0 = next(X for X in (_reduce_mod(E, B, Z, pivots) for B in Dl) if X.any())
        cz, dz = E.is_zero(C0), E.is_zero(D0)
        if (cz != dz).any():
            raise NoSolution("zero patterns differ")
        edges = [
            (i, j, E.mul(D0[i, j], E.inv(C0[i, j])))
            for i in range(m)
            for j in range(m)
            if i != j and not cz[i, j]
        ]
        if all(find(i) == find(j) for i, j, _ in edges):
            continue
        mus = _scalar_candidates(E, C0, D0)
        if mus is None:
            continue
        mus = [mu for mu in mus if np.array_equal(C0[idx, idx], E.mul(mu, D0[idx, idx]))]
        if not mus:
            raise NoSolution("no scalar matches the slice characteristic polynomials")
        for i, j, _ in edges:
            comp[find(i)] = find(j)
        slices.append((edges, mus))
        if len({find(i) for i in range(m)}) == 1:
            break
    else:
        raise NoSolution(f"ratio system still underdetermined after {max_rounds} rounds")

    for choice in product(*(mus for _, mus in slices)):
        graph = _RatioGraph(E, m)
        for (edges, _), mu in zip(slices, choice):
            for i, j, r in edges:
                graph.add(i, j, E.mul(mu, r))
        try:
            u = graph.solve()
        except NoSolution:
            continue
        if code_equal(Dp, conjugate(Cp, diagonal_matrix(E, u))):
            f = poly.lagrange_interpolate(E, list(zip(delta, u)))
            return poly.monic(E, f)
    raise NoSolution("no diagonal conjugation maps Cp onto Dp")


def find_P_diag(inst: ConjugacyInstance, rng, max_rounds=None) -> np.ndarray:
    """P = S f(Delta) S^{-1} R, rescaled and brought back to the base field."""
    F = inst.C.field
    pair = reduce_to_diagonal(inst)
    E = pair.field
    Sinv = ms.mat_inverse(E, pair.S)
    R = E.embed(inst.R)
    last = None
    for _ in range(2):
        f = find_polynomial_diagonal(pair.Cp, pair.Dp, pair.Delta, rng, max_rounds)
        fd = diagonal_matrix(E, poly.evaluate(E, f, pair.delta))
        P = E.matmul(E.matmul(E.matmul(pair.S, fd), Sinv), R)
        flat = P.reshape(-1, E.d)
        first = flat[np.flatnonzero(flat.any(axis=-1))[0]]
        P = E.mul(E.inv(first), P)
        if not E.in_base(P):
            last = BaseFieldDescentFailed("P has entries outside the base field")
            continue
        P = E.descend(P)
        if code_equal(inst.D, conjugate(inst.C, P)):
            return P
        last = NoSolution("descended P does not conjugate C onto D")
    raise NoSolution(str(last))


def solve_conjugacy(inst: ConjugacyInstance, strategy: str = "auto", rng=None) -> np.ndarray:
    """Dispatch between the two solvers; 'auto' falls back to diagonalization."""
    if rng is None:
        rng = np.random.default_rng()
    if strategy == "linearized":
        try:
            return solve_linearized(inst)
        except Indeterminate as exc:
            raise NoSolution(str(exc)) from exc
    if strategy == "diagonal":
        return find_P_diag(inst, rng)
    if strategy == "auto":
        try:
            return solve_linearized(inst)
        except Indeterminate:
            return find_P_diag(inst, rng)
    raise ValueError(f"unknown strategy {strategy!r}")


def admissible_scalars(q: int, chi_u, chi_v) -> list[int]:
    """All c with c . chi_v = chi_u, in increasing order."""
    chi_u, chi_v = tuple(chi_u), tuple(chi_v)
    if not any(chi_u) or not any(chi_v):
        return [1] if chi_u == chi_v else []
    canon = canonicalize_fast if q > 1 << 16 else canonicalize_bruteforce
    cu, lu = canon(q, chi_u)
    cv, lv = canon(q, chi_v)
    if cu != cv:
        return []
    base = lv * pow(lu, -1, q) % q
    return sorted(base * s % q for s in stabilizer(q, cu))


def solve_hull_conjugacy(C, D, U, V, strategy="auto", rng=None) -> np.ndarray:
    """Find P with D = P C P^{-1} given generators U, V of the two hulls.

    A solution maps U to c V for a scalar c with charpoly(c V) = charpoly(U);
    every such c is tried, smallest first.
    """
    F = C.field
    if rng is None:
        rng = np.random.default_rng()
    for c in admissible_scalars(F.q, char_tuple(F, U), char_tuple(F, V)):
        Vc = F.mul(F.elem(c), V)
        try:
            R = find_conjugator(F, U, Vc, rng)
        except NotConjugate:
            continue
        inst = ConjugacyInstance(C, D, U, Vc, R)
        try:
            return solve_conjugacy(inst, strategy, rng)
        except NoSolution:
            continue
    raise NoSolution("no conjugating matrix for any admissible scaling of V")
