"""Finite-dimensional commuting operator tuples and polynomial calculus.

Shift operators live on the window ``{0, ..., m-1}^n`` of ``N^n`` and are
compressions: mass pushed outside the window is dropped.  Axes are 0-based
throughout; basis vectors are ordered lexicographically (C order).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import pnorm
from .poly import (SparsePolynomial, coefficient_l1, multiplier_upper_bound,
                   sup_norm_torus)
from .steiner import PartialSteinerSystem, validate

COMMUTATION_TOL = 1e-10
CONTRACTION_TOL = 1e-9


@dataclass
class OperatorTuple:
    ops: list
    labels: list = None
    norm_p: float = 2.0
    basis: list = field(default=None, repr=False)

    def __post_init__(self):
        self.ops = [np.asarray(T) for T in self.ops]
        if not self.ops:
            raise ValueError("empty operator tuple")
        d = self.ops[0].shape[0]
        for T in self.ops:
            if T.shape != (d, d):
                raise ValueError(f"operator of shape {T.shape}, expected ({d}, {d})")
        if self.labels is None:
            self.labels = [f"T{i + 1}" for i in range(len(self.ops))]

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    @property
    def arity(self) -> int:
        return len(self.ops)

    def commutation_residual(self) -> float:
        res = 0.0
        for A, B in itertools.combinations(self.ops, 2):
            C = A @ B - B @ A
            if np.any(C):
                res = max(res, pnorm.opnorm_exact(C, 2))
        return res

    def contraction_brackets(self, p: float | None = None) -> list:
        p = self.norm_p if p is None else p
        return [pnorm.opnorm_bracket(T, p) for T in self.ops]

    def certify(self, p: float | None = None) -> dict:
        """Commutation residual and contraction margin ``1 - max ||T_i||``.

        The margin uses the bracket lower bounds, so a negative value is a
        proven failure at p in {1, 2, inf} and evidence of one otherwise.
        """
        brackets = self.contraction_brackets(p)
        comm = self.commutation_residual()
        worst_upper = max(b.upper for b in brackets)
        worst_lower = max(b.lower for b in brackets)
        return {
            "commutation_residual": comm,
            "commuting": comm <= COMMUTATION_TOL * self.dim,
            "max_norm_lower": worst_lower,
            "max_norm_upper": worst_upper,
            "contraction_margin": 1.0 - worst_lower,
            "contractive": worst_upper <= 1 + CONTRACTION_TOL,
        }


@dataclass
class WeightedGrid:
    """Window ``{0..m-1}^n`` with weights ``w >= 1`` for ``l_p(w)``."""

    n: int
    m: int
    p: float = 2.0
    w: np.ndarray = None

    def __post_init__(self):
        shape = (self.m,) * self.n
        self.w = np.ones(shape) if self.w is None else np.asarray(self.w, dtype=float).reshape(shape)
        if np.any(self.w < 1):
            raise ValueError("weights must be >= 1")

    @property
    def size(self) -> int:
        return self.m ** self.n

    def ratio_bound(self, axis: int) -> float:
        """``M_j = max w(i + e_j) / w(i)`` over in-window pairs."""
        if self.m < 2:
            return 1.0
        hi = np.take(self.w, range(1, self.m), axis=axis)
        lo = np.take(self.w, range(0, self.m - 1), axis=axis)
        return float(np.max(hi / lo))


def _as_grid(grid) -> WeightedGrid:
    if isinstance(grid, WeightedGrid):
        return grid
    n, m = grid
    return WeightedGrid(n, m)


def truncated_right_shift(grid, axis: int) -> np.ndarray:
    """0/1 matrix of ``x_i -> x_{i - e_axis}`` compressed to the window."""
    g = _as_grid(grid)
    if not 0 <= axis < g.n:
        raise ValueError(f"axis {axis} out of range for n={g.n}")
    shape = (g.m,) * g.n
    R = np.zeros((g.size, g.size))
    for src in itertools.product(range(g.m), repeat=g.n):
        if src[axis] + 1 < g.m:
            dst = list(src)
            dst[axis] += 1
            R[np.ravel_multi_index(dst, shape), np.ravel_multi_index(src, shape)] = 1.0
    return R


def truncated_left_shift(grid, axis: int) -> np.ndarray:
    return truncated_right_shift(grid, axis).T.copy()


def shift_tuple(n: int, m: int) -> OperatorTuple:
    ops = [truncated_right_shift((n, m), j) for j in range(n)]
    return OperatorTuple(ops, [f"R{j + 1}" for j in range(n)], basis=list(np.ndindex(*(m,) * n)))


def weighted_shift_matrix(grid: WeightedGrid, axis: int, p: float | None = None) -> np.ndarray:
    """The right shift on ``l_p(w)`` conjugated onto plain ``l_p``."""
    p = grid.p if p is None else p
    d = grid.w.ravel() ** (1.0 / p)
    R = truncated_right_shift(grid, axis)
    return (d[:, None] * R) / d[None, :]


@dataclass
class ShiftBoundCheck:
    norm: pnorm.PNormBracket
    bound: float
    holds: bool


def weighted_shift_bound_check(grid: WeightedGrid, axis: int, p_dual: float) -> ShiftBoundCheck:
    """Compare ``||R_j||`` on ``l_{p'}(w)`` with ``M_j^(1/p')``."""
    A = weighted_shift_matrix(grid, axis, p_dual)
    br = pnorm.opnorm_bracket(A, p_dual)
    bound = grid.ratio_bound(axis) ** (1.0 / p_dual)
    return ShiftBoundCheck(br, bound, br.lower <= bound + 1e-9)


def convolution_operator(P: SparsePolynomial, m: int, centered: bool = True) -> np.ndarray:
    """Convolution by the coefficient sequence of ``P``, compressed to a box.

    ``centered=True`` uses the box ``{-m..m}^n`` of ``Z^n``; otherwise the
    box ``{0..m-1}^n``.  Built directly from index arithmetic on the
    coefficient sequence, not from shift matrices.
    """
    if m < P.degree:
        raise ValueError(f"window {m} smaller than degree {P.degree}")
    side = 2 * m + 1 if centered else m
    shape = (side,) * P.n
    size = side ** P.n
    dtype = float if all(c.imag == 0 for c in P.terms.values()) else complex
    C = np.zeros((size, size), dtype=dtype)
    pts = np.array(list(np.ndindex(*shape)), dtype=np.int64).reshape(size, P.n)
    src = np.ravel_multi_index(pts.T, shape) if P.n else np.zeros(1, dtype=np.int64)
    for alpha, c in P.terms.items():
        tgt = pts + np.array(alpha, dtype=np.int64)
        ok = np.all(tgt < side, axis=1)
        rows = np.ravel_multi_index(tgt[ok].T, shape) if P.n else src
        C[rows, src[ok]] += c.real if dtype is float else c
    return C


def apply_polynomial(P: SparsePolynomial, tup) -> np.ndarray:
    """``P(T_1, ..., T_n)`` for a commuting tuple, via memoized monomials."""
    ops = tup.ops if isinstance(tup, OperatorTuple) else [np.asarray(T) for T in tup]
    if len(ops) != P.n:
        raise ValueError(f"polynomial in {P.n} variables applied to {len(ops)} operators")
    d = ops[0].shape[0] if ops else 1
    real_coeffs = all(c.imag == 0 for c in P.terms.values())
    dtype = np.result_type(float, *ops) if real_coeffs else np.result_type(complex, *ops)
    cache: dict[tuple, np.ndarray] = {(0,) * P.n: np.eye(d, dtype=dtype)}

    def mono(alpha):
        if alpha not in cache:
            j = next(i for i, a in enumerate(alpha) if a)
            prev = list(alpha)
            prev[j] -= 1
            cache[alpha] = ops[j] @ mono(tuple(prev))
        return cache[alpha]

    out = np.zeros((d, d), dtype=dtype)
    for alpha in sorted(P.terms, key=sum):
        c = P.terms[alpha]
        out = out + (c.real if real_coeffs else c) * mono(alpha)
    return out


# -- Dixon tuples --------------------------------------------------------------


def dixon_basis(n: int, k: int) -> list:
    basis = [("e",)]
    for m in range(1, k - 1):
        basis += [("e", J) for J in itertools.combinations_with_replacement(range(1, n + 1), m)]
    basis += [("f", i) for i in range(1, n + 1)]
    basis.append(("g",))
    return basis


def dixon_tuple(S: PartialSteinerSystem, signs=None) -> OperatorTuple:
    """Commuting tuple on the graded space ``e, e(J), f_i, g``.

    ``e(J)`` runs over multisets of size 1..k-2; the last level maps to the
    ``f_i`` through the block coefficients ``gamma``, which vanish on
    multisets with repeated entries and on non-blocks.
    """
    k, n = S.k, S.n
    if k < 3:
        raise ValueError("Dixon tuples need k >= 3")
    if S.t != k - 1:
        raise ValueError(f"need t = k-1, got t={S.t}")
    ok, witness = validate(S)
    if not ok:
        raise ValueError(f"not a partial Steiner system: {witness} covered twice")
    if signs is None:
        signs = {b: 1.0 for b in S.blocks}
    elif not isinstance(signs, dict):
        signs = dict(zip(S.blocks, signs))
    gamma = {tuple(sorted(b)): float(signs[b]) for b in S.blocks}

    basis = dixon_basis(n, k)
    index = {b: i for i, b in enumerate(basis)}
    dim = len(basis)
    ops = []
    for l in range(1, n + 1):
        T = np.zeros((dim, dim))
        T[index[("e", (l,))], index[("e",)]] = 1.0
        for b in basis:
            if b[0] == "e" and len(b) == 2:
                J = b[1]
                if len(J) < k - 2:
                    T[index[("e", tuple(sorted(J + (l,))))], index[b]] = 1.0
                else:
                    for i in range(1, n + 1):
                        key = tuple(sorted(J + (l, i)))
                        if len(set(key)) == k and key in gamma:
                            T[index[("f", i)], index[b]] += gamma[key]
        T[index[("g",)], index[("f", l)]] = 1.0
        ops.append(T)
    return OperatorTuple(ops, [f"T{l}" for l in range(1, n + 1)], 2.0, basis)


def steiner_polynomial(S: PartialSteinerSystem, signs=None) -> SparsePolynomial:
    if isinstance(signs, dict):
        coeffs = [signs[b] for b in S.blocks]
    else:
        coeffs = signs
    return SparsePolynomial.from_support(S.n, S.multi_indices(), coeffs)


# -- Varopoulos operators ------------------------------------------------------


def varopoulos_operator(x, y) -> np.ndarray:
    """Block matrix ``[[0, x^#, 0], [0, 0, y], [0, 0, 0]]`` on ``C + C^d + C``.

    ``x^#(v) = sum_j x_j v_j`` is bilinear, not conjugated.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be vectors of equal length")
    d = x.size
    T = np.zeros((d + 2, d + 2), dtype=np.result_type(x, y, float))
    T[0, 1:d + 1] = x
    T[1:d + 1, d + 1] = y
    return T


def varopoulos_tuple(X) -> OperatorTuple:
    X = np.asarray(X)
    return OperatorTuple([varopoulos_operator(x, x) for x in X],
                         [f"T_X{i + 1}" for i in range(len(X))])


def gram_value(A, X) -> float:
    X = np.asarray(X)
    return float(np.sum(np.asarray(A) * (X @ X.T)))


@dataclass
class VaropoulosNorm:
    opnorm: float
    gram_value: float
    polynomial: SparsePolynomial
    tuple: OperatorTuple


def varopoulos_tuple_norm(A, X) -> VaropoulosNorm:
    """Exact ``||P_A(T_X)||_2`` for unit vectors ``X_i``."""
    A = np.asarray(A, dtype=float)
    X = np.asarray(X, dtype=float)
    if not np.allclose(np.linalg.norm(X, axis=1), 1.0, atol=1e-12):
        raise ValueError("rows of X must be unit vectors")
    tup = varopoulos_tuple(X)
    P = SparsePolynomial.from_quadratic_form(A)
    M = apply_polynomial(P, tup)
    val = gram_value(A, X)
    nrm = pnorm.opnorm_exact(M, 2)
    assert nrm >= abs(val) - 1e-9
    return VaropoulosNorm(nrm, val, P, tup)


def a3_matrix() -> np.ndarray:
    """3x3 matrix with unit diagonal and -1 off the diagonal."""
    return 2.0 * np.eye(3) - np.ones((3, 3))


def planar_120() -> np.ndarray:
    ang = 2 * np.pi * np.arange(3) / 3
    return np.column_stack([np.cos(ang), np.sin(ang)])


# -- nilpotents and isometries -------------------------------------------------


def nilpotent_triple(U1, U2, U3) -> OperatorTuple:
    """``T_i(f1, f2) = (0, U_i f1)``; all pairwise products vanish."""
    ops = []
    for U in (U1, U2, U3):
        U = np.asarray(U)
        d = U.shape[0]
        if U.shape != (d, d) or not np.allclose(U.conj().T @ U, np.eye(d), atol=1e-10):
            raise ValueError("inputs must be square isometries")
        T = np.zeros((2 * d, 2 * d), dtype=U.dtype)
        T[d:, :d] = U
        ops.append(T)
    return OperatorTuple(ops, ["T1", "T2", "T3"])


def commuting_isometries(n: int, dim: int, seed: int = 0) -> OperatorTuple:
    """Commuting signed permutation matrices.

    ``U_i = D_i U_0^{k_i}`` where ``U_0`` is a random signed permutation and
    ``D_i`` is a sign pattern constant on each cycle of its permutation, so
    that ``D_i`` commutes with ``U_0``.  Isometric for every p.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(dim)
    U0 = np.zeros((dim, dim))
    U0[perm, np.arange(dim)] = rng.choice([-1.0, 1.0], size=dim)
    cycle_of = np.full(dim, -1)
    ncyc = 0
    for s in range(dim):
        if cycle_of[s] < 0:
            j = s
            while cycle_of[j] < 0:
                cycle_of[j] = ncyc
                j = perm[j]
            ncyc += 1
    ops = []
    for _ in range(n):
        power = int(rng.integers(0, 4))
        D = rng.choice([-1.0, 1.0], size=ncyc)[cycle_of]
        ops.append(D[:, None] * np.linalg.matrix_power(U0, power))
    return OperatorTuple(ops, [f"U{i + 1}" for i in range(n)], norm_p=math.inf)


# -- Matsaev check -------------------------------------------------------------


@dataclass
class MatsaevVerdict:
    verdict: str
    p: float
    lhs: pnorm.PNormBracket
    rhs_lower: float
    rhs_upper: float
    rhs_lower_method: str
    window_lowers: dict


def matsaev_check(tup: OperatorTuple, P: SparsePolynomial, p: float, windows=(2, 4, 8),
                  tol: float = 1e-9, seed: int = 0, torus_budget: int = 4096,
                  restarts: int = pnorm.DEFAULT_RESTARTS,
                  m2_upper: float | None = None) -> MatsaevVerdict:
    """Three-valued test of ``||P(T)||_p <= ||P(R)||_p``.

    The right side is bracketed below by compressions of ``P(R)`` to the
    given windows and by the sampled torus supremum (multiplier norms are
    at least the ``M_2`` norm), and above by the interpolated multiplier
    bound.  ``violated`` and ``holds`` are only returned when the brackets
    separate by more than ``tol``.  ``m2_upper`` may pass in a precomputed
    certified torus bound to skip the grid search.
    """
    lhs = pnorm.opnorm_bracket(apply_polynomial(P, tup), p, restarts=restarts, seed=seed)
    window_lowers = {}
    for m in windows:
        M = apply_polynomial(P, shift_tuple(P.n, m))
        window_lowers[m] = pnorm.opnorm_bracket(M, p, restarts=restarts, seed=seed).lower
    torus = sup_norm_torus(P, budget=torus_budget, seed=seed).lower
    best_window = max(window_lowers.values(), default=0.0)
    rhs_lower = max(best_window, torus)
    method = "window-compression" if best_window >= torus else "torus-sampling"
    if p == 1 or p == math.inf:
        rhs_upper = coefficient_l1(P)
    else:
        rhs_upper = multiplier_upper_bound(P, p, m2_upper)
    rhs_upper = max(rhs_upper, rhs_lower)
    if lhs.lower > rhs_upper + tol:
        verdict = "violated"
    elif lhs.upper <= rhs_lower + tol:
        verdict = "holds"
    else:
        verdict = "undecided"
    return MatsaevVerdict(verdict, p, lhs, rhs_lower, rhs_upper, method, window_lowers)


# -- Schur multipliers and non-commutative shifts ------------------------------


@dataclass
class SchurMultiplier:
    A: np.ndarray
    certified: bool
    u: np.ndarray | None = None
    v: np.ndarray | None = None

    def __call__(self, X):
        return self.A * np.asarray(X)

    def superoperator(self) -> np.ndarray:
        return np.diag(self.A.ravel())


def schur_multiplier(A, tol: float = 1e-10) -> SchurMultiplier:
    """``X -> A o X`` with a contraction certificate when one is found.

    For PSD ``A`` with diagonal at most 1 the rows of a square-root factor
    give ``a_ij = <u_i, u_j>`` with ``||u_i|| <= 1``.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return SchurMultiplier(A, False)
    H = (A + A.conj().T) / 2
    if np.max(np.abs(A - H)) > tol:
        return SchurMultiplier(A, False)
    lam, Q = np.linalg.eigh(H)
    if lam.min() < -tol * max(1.0, abs(lam).max()) or np.real(np.diag(A)).max() > 1 + tol:
        return SchurMultiplier(A, False)
    L = Q * np.sqrt(np.clip(lam, 0, None))
    # a_ij = <u_i, u_j> = sum_k u_ik conj(u_jk)
    ok = np.max(np.abs(L @ L.conj().T - A)) <= 1e-9 and np.linalg.norm(L, axis=1).max() <= 1 + 1e-9
    return SchurMultiplier(A, bool(ok), L, L)


@dataclass
class NCShift:
    """``a -> sigma a sigma^*`` with ``sigma`` the block right shift."""

    sigma: np.ndarray

    def __call__(self, a):
        return self.sigma @ np.asarray(a) @ self.sigma.conj().T

    def superoperator(self) -> np.ndarray:
        # row-major vec(s a s^*) = (s kron conj(s)) vec(a)
        return np.kron(self.sigma, self.sigma.conj())


def nc_right_shift(m: int, h: int, axis: int, n: int = 1) -> NCShift:
    R = truncated_right_shift((n, m), axis)
    return NCShift(np.kron(R, np.eye(h)))


def nc_shift_tuple(m: int, h: int, n: int) -> OperatorTuple:
    ops = [nc_right_shift(m, h, j, n).superoperator() for j in range(n)]
    return OperatorTuple(ops, [f"NCR{j + 1}" for j in range(n)])


def diagonal_embedding(alpha, h: int = 1) -> np.ndarray:
    """``alpha -> sum_i alpha_i e_ii`` (with ``h``-dimensional fibres)."""
    return np.kron(np.diag(np.asarray(alpha).ravel()), np.eye(h))
