"""Quadratic forms maximized over unit vectors and over sign patterns."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .poly import SparsePolynomial, conjugate_exponent, sup_norm_torus
from .randpoly import gaussian_moment, moment_exact
from .steiner import PartialSteinerSystem

DEFAULT_RESTARTS = 32
MAX_SIGN_SIZE = 24
MAX_ITER = 5000
_SIGN_CHUNK = 1 << 16


def _symmetric(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if np.any(A != A.T):
        raise ValueError("matrix is not symmetric")
    return A


def default_rank(l: int) -> int:
    return min(l, math.ceil(math.sqrt(2 * l)) + 1)


@dataclass
class GramResult:
    value: float
    witness: np.ndarray = field(repr=False)
    rank: int
    restarts: int


def _normalize_rows(V):
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def _ascend(A, V, max_iter):
    f = float(np.sum(A * (V @ V.T)))
    scale = 1e-7 * max(1.0, float(np.abs(A).sum()))
    step = 1.0
    for _ in range(max_iter):
        G = 2.0 * A @ V
        # tangent part of the gradient on the product of spheres
        T = G - np.sum(G * V, axis=1, keepdims=True) * V
        if np.linalg.norm(T) <= scale:
            break
        while True:
            W = _normalize_rows(V + step * T)
            g = float(np.sum(A * (W @ W.T)))
            if g >= f or step < 1e-14:
                break
            step *= 0.5
        if g < f:
            break
        V, f = W, g
        step *= 2.0
    return f, V


def gram_max(A, r: int | None = None, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
             max_iter: int = MAX_ITER) -> GramResult:
    """Lower bound on ``max sum a_ij <X_i, X_j>`` over unit vectors in R^r.

    Projected gradient ascent on the rows of an ``l x r`` factor with
    backtracking, best over random restarts.  The value is attained by the
    returned witness, so it is always a valid lower bound.  Rank 1 is solved
    exactly by sign enumeration.
    """
    A = _symmetric(A)
    l = A.shape[0]
    r = default_rank(l) if r is None else int(r)
    if r < 1:
        raise ValueError("rank must be >= 1")
    if r == 1 and l <= MAX_SIGN_SIZE:
        # real unit vectors in R^1 are exactly the sign patterns
        value, s = sign_argmax(A)
        return GramResult(value, s[:, None], 1, 0)
    best, best_V = -math.inf, None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        V = _normalize_rows(rng.standard_normal((l, r)))
        f, V = _ascend(A, V, max_iter)
        if f > best:
            best, best_V = f, V
    return GramResult(best, best_V, r, restarts)


def sign_argmax(A) -> tuple[float, np.ndarray]:
    """Exact ``max s^T A s`` over ``s in {-1, 1}^l`` with its maximizer."""
    A = _symmetric(A)
    l = A.shape[0]
    if l > MAX_SIGN_SIZE:
        raise ValueError(f"l = {l} exceeds brute-force limit {MAX_SIGN_SIZE}")
    if l == 0:
        return 0.0, np.zeros(0)
    total = 1 << (l - 1)
    bits = np.arange(l - 1, dtype=np.int64)
    best, best_s = -math.inf, None
    # the first sign is fixed to +1 since s and -s give the same value
    for start in range(0, total, _SIGN_CHUNK):
        codes = np.arange(start, min(start + _SIGN_CHUNK, total), dtype=np.int64)
        S = np.ones((codes.size, l))
        S[:, 1:] = 1.0 - 2.0 * ((codes[:, None] >> bits) & 1)
        vals = np.einsum("ci,ci->c", S @ A, S)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_s = float(vals[i]), S[i].copy()
    return best, best_s


def sign_max(A) -> float:
    return sign_argmax(A)[0]


@dataclass
class TorusSignCheck:
    torus_lower: float
    sign_max: float
    residual: float


def torus_vs_sign_check(A, budget: int = 100_000, seed: int = 0) -> TorusSignCheck:
    """Compare the torus supremum of ``P_A`` with the sign maximum.

    Only the symmetric part ``(A + A^T)/2`` matters; it must be positive or
    negative semidefinite.
    """
    A = np.asarray(A, dtype=float)
    if budget < 100_000:
        raise ValueError("torus budget must be at least 1e5")
    S = (A + A.T) / 2
    lam = np.linalg.eigvalsh(S)
    tol = 1e-10 * max(1.0, np.abs(lam).max())
    if lam.min() >= -tol:
        sm = sign_max(S)
    elif lam.max() <= tol:
        sm = sign_max(-S)
    else:
        raise ValueError("symmetric part is indefinite")
    torus = sup_norm_torus(SparsePolynomial.from_quadratic_form(S), budget=budget, seed=seed).lower
    return TorusSignCheck(torus, sm, abs(torus - sm))


# -- closed forms ---------------------------------------------------------------


@dataclass(frozen=True)
class RFQuantities:
    k: int
    l: int
    gram: int
    sign: int
    l1: int


def rf_quantities(k: int) -> RFQuantities:
    """Gram value, sign maximum and l1 norm of the size ``k(k-1)`` family."""
    if k < 2:
        raise ValueError("k must be >= 2")
    return RFQuantities(k, k * (k - 1), 2 * k * (k - 1) ** 2,
                        2 * k * (k - 1) * (2 * k - 1) // 3, 2 * k * (k - 1) * (2 * k - 3))


def degree2_limit(p: float) -> float:
    """``(1/2) 9^(1/p')``."""
    return 0.5 * 9.0 ** (1.0 / conjugate_exponent(p))


def degree2_limit_printed(p: float) -> float:
    """``(1/2) 9^(p')``, the variant with the exponent inverted."""
    return 0.5 * 9.0 ** conjugate_exponent(p)


@dataclass
class Degree2Ratio:
    p: float
    k: int
    ratio: float
    limit: float
    limit_printed: float
    moment: float
    moment_exact: float
    net_ratio: float
    net_ratio_exact: float


def degree2_ratio(p: float, k: int, trials: int = 10**6, seed: int = 0) -> Degree2Ratio:
    """``gram / (l1^(1 - 2/p') sign^(2/p'))`` and its Gaussian-adjusted limit.

    The net ratio divides the limit by the squared ``p'``-th Gaussian moment,
    once with the Monte Carlo estimate and once with the Gamma closed form.
    """
    if not (1 < p < 2):
        raise ValueError("need 1 < p < 2")
    q = rf_quantities(k)
    pd = conjugate_exponent(p)
    ratio = q.gram / (q.l1 ** (1 - 2 / pd) * q.sign ** (2 / pd))
    lim = degree2_limit(p)
    mc = gaussian_moment(pd, trials=trials, seed=seed).monte_carlo
    ex = float(moment_exact(pd))
    return Degree2Ratio(p, k, ratio, lim, degree2_limit_printed(p), mc, ex,
                        lim / mc ** 2, lim / ex ** 2)


def theoremF_closed_form(size: float, n: int, k: int, p: float, D: float = 8.0) -> float:
    """``|S|^(1-1/p) / (D sqrt(n ln k))^(2(1-1/p))``."""
    e = 1.0 - 1.0 / p
    return size ** e / (D * math.sqrt(n * math.log(k))) ** (2 * e)


def theoremF_ratio(S: PartialSteinerSystem, p: float, D: float = 8.0) -> float:
    if not (1 < p < 2):
        raise ValueError("need 1 < p < 2")
    if S.t != S.k - 1:
        raise ValueError(f"need t = k-1, got t={S.t}")
    return theoremF_closed_form(len(S), S.n, S.k, p, D)
