"""Truncated q-deformed Fock spaces and a finite model of a Schur multiplier dilation.

Words over ``{0..d-1}`` of length ``m <= N`` span the level-``m`` space.  The
q-inner product of two words follows the recursion

    <w, v> = sum_j q^(j-1) K[w_1, v_j] <w_2..w_m, v without v_j>

where ``K`` is the Gram matrix of the ground vectors.  Each level is
quotiented by the kernel of its Gram matrix and all operators are returned
in an orthonormal basis of the quotient, so adjoints are plain conjugate
transposes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

MAX_LEVEL = 8
MAX_WORDS = 10**5
# eigendecomposition of a level Gram matrix beyond this size is impractical
MAX_LEVEL_WORDS = 4096
KERNEL_TOL = 1e-12


def _level_gram(prev: np.ndarray, K: np.ndarray, q: float, d: int, m: int) -> np.ndarray:
    """Level-``m`` Gram matrix from level ``m - 1`` via the first-letter recursion."""
    size = d ** m
    digits = np.array(list(itertools.product(range(d), repeat=m)), dtype=np.int64).reshape(size, m)
    place = d ** np.arange(m - 2, -1, -1, dtype=np.int64)  # weights for length m-1 words
    first = digits[:, 0]
    tail = digits[:, 1:] @ place if m > 1 else np.zeros(size, dtype=np.int64)
    G = np.zeros((size, size))
    for j in range(m):
        rest = np.delete(digits, j, axis=1) @ place if m > 1 else np.zeros(size, dtype=np.int64)
        G += q ** j * K[np.ix_(first, digits[:, j])] * prev[np.ix_(tail, rest)]
    return G


@dataclass
class QFockSpace:
    d: int
    q: float
    N: int
    K: np.ndarray = field(repr=False)
    grams: list = field(repr=False)
    frames: list = field(repr=False)

    @property
    def level_dims(self) -> list:
        return [V.shape[1] for V in self.frames]

    @property
    def dim(self) -> int:
        return sum(self.level_dims)

    @property
    def offsets(self) -> list:
        return [0] + list(np.cumsum(self.level_dims))

    def level_slice(self, m: int) -> slice:
        off = self.offsets
        return slice(off[m], off[m + 1])

    def inner(self, e, f) -> float:
        """Ground inner product ``<e, f>`` in the coordinates of the e_i."""
        return float(np.asarray(e) @ self.K @ np.asarray(f))

    def creation(self, e) -> np.ndarray:
        """``l(e)`` in the orthonormal basis; words past level N are dropped."""
        e = np.asarray(e, dtype=float)
        if e.shape != (self.d,):
            raise ValueError(f"ground vector must have length {self.d}")
        out = np.zeros((self.dim, self.dim))
        for m in range(self.N):
            # prepending letter i maps word index w to i * d^m + w
            size = self.d ** m
            L = np.zeros((self.d ** (m + 1), size))
            for i in range(self.d):
                if e[i]:
                    L[i * size + np.arange(size), np.arange(size)] = e[i]
            block = self.frames[m + 1].T @ self.grams[m + 1] @ L @ self.frames[m]
            out[self.level_slice(m + 1), self.level_slice(m)] = block
        return out

    def annihilation(self, e) -> np.ndarray:
        return self.creation(e).T.copy()

    def field_operator(self, e) -> np.ndarray:
        """``w(e) = l(e) + l(e)^*``."""
        C = self.creation(e)
        return C + C.T

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.d)
        e[i] = 1.0
        return e


def build_fock(d: int, q: float, N: int | None = None, K=None) -> QFockSpace:
    """q-Fock space over a ground space with Gram matrix ``K`` (default identity).

    For ``q = -1`` the level cap is set to ``d``: higher levels vanish in the
    quotient.  Kernel directions (eigenvalues below ``1e-12`` relative) are
    removed level by level; frames ``V_m = Q Lambda^{-1/2}`` map orthonormal
    coordinates back to word coefficients.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if not (-1 <= q <= 1):
        raise ValueError("q must lie in [-1, 1]")
    if q == -1:
        N = d
    if N is None:
        raise ValueError("level cap N required for q != -1")
    if N < 0 or N > MAX_LEVEL:
        raise ValueError(f"level cap {N} outside [0, {MAX_LEVEL}]")
    if d ** N > MAX_WORDS:
        raise ValueError(f"d^N = {d ** N} exceeds word cap {MAX_WORDS}")
    if d ** N > MAX_LEVEL_WORDS:
        raise ValueError(f"level {N} has {d ** N} words, above {MAX_LEVEL_WORDS}")
    K = np.eye(d) if K is None else np.asarray(K, dtype=float)
    if K.shape != (d, d) or np.any(K != K.T):
        raise ValueError("ground Gram matrix must be real symmetric d x d")
    if np.linalg.eigvalsh(K).min() < -1e-10:
        raise ValueError("ground Gram matrix must be positive semidefinite")
    grams = [np.ones((1, 1))]
    for m in range(1, N + 1):
        grams.append(_level_gram(grams[-1], K, q, d, m))
    frames = []
    for G in grams:
        lam, Q = np.linalg.eigh(G)
        keep = lam > KERNEL_TOL * max(1.0, lam.max())
        frames.append(Q[:, keep] / np.sqrt(lam[keep]))
    return QFockSpace(d, q, N, K, grams, frames)


def q_relation_check(F: QFockSpace, e, f) -> float:
    """Norm of ``l(f)^* l(e) - q l(e) l(f)^* - <f, e> I`` below the cap.

    For ``q = -1`` the truncation is exact and all levels are included.
    """
    le = F.creation(e)
    lf = F.creation(f)
    R = lf.T @ le - F.q * le @ lf.T - F.inner(f, e) * np.eye(F.dim)
    top = F.dim if F.q == -1 else F.offsets[F.N]
    R = R[:top, :top]
    if R.size == 0:
        return 0.0
    return float(np.linalg.norm(R, 2))


def vacuum_trace(F: QFockSpace, x) -> float:
    """``<x Omega, Omega>``; the vacuum is the first orthonormal basis vector."""
    return float(np.asarray(x)[0, 0])


# -- Schur multiplier dilation --------------------------------------------------


def _check_symbol(A, name: str) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or np.any(A != A.T):
        raise ValueError(f"{name} must be real symmetric")
    if np.linalg.eigvalsh(A).min() < -1e-10:
        raise ValueError(f"{name} is not positive semidefinite")
    if not np.allclose(np.diag(A), 1.0, atol=1e-12):
        raise ValueError(f"{name} must have unit diagonal")
    return A


@dataclass
class DilationModel:
    """Fermionic factors for the two symbols.

    An element of the dilation algebra is stored as a dict
    ``(i, j) -> (coef, a_factors, b_factors)``: the matrix unit ``e_ij``
    tensored with one (A, B) factor pair per tensor position ``0, 1, ...``.
    ``None`` stands for the identity; positions beyond the lists are identity.
    """

    A: np.ndarray
    B: np.ndarray
    FA: QFockSpace = field(repr=False)
    FB: QFockSpace = field(repr=False)
    wA: list = field(repr=False)
    wB: list = field(repr=False)

    @property
    def size(self) -> int:
        return self.A.shape[0]

    def embed(self, x) -> dict:
        x = np.asarray(x)
        return {(i, j): (x[i, j], [], []) for i in range(self.size) for j in range(self.size)}

    def apply_U1(self, elem: dict) -> dict:
        """Shift A factors one position right, then conjugate by ``w_A(e_i)`` at 0."""
        return {(i, j): (c, [self.wA[i] @ self.wA[j]] + list(a), list(b))
                for (i, j), (c, a, b) in elem.items()}

    def apply_U2(self, elem: dict) -> dict:
        return {(i, j): (c, list(a), [self.wB[i] @ self.wB[j]] + list(b))
                for (i, j), (c, a, b) in elem.items()}

    def closed_form(self, x, k: int, l: int) -> dict:
        """``U_1^k U_2^l J(x)`` written out: k A-factors and l B-factors from position 0."""
        x = np.asarray(x)
        out = {}
        for i in range(self.size):
            for j in range(self.size):
                WA = self.wA[i] @ self.wA[j]
                WB = self.wB[i] @ self.wB[j]
                out[(i, j)] = (x[i, j], [WA] * k, [WB] * l)
        return out

    def expectation(self, elem: dict) -> np.ndarray:
        """Trace out every tensor position with the vacuum states."""
        out = np.zeros((self.size, self.size))
        for (i, j), (c, a, b) in elem.items():
            val = c
            for M in a:
                val *= vacuum_trace(self.FA, M)
            for M in b:
                val *= vacuum_trace(self.FB, M)
            out[i, j] = val
        return out


def dilation_model(A, B) -> DilationModel:
    A = _check_symbol(A, "A")
    B = _check_symbol(B, "B")
    if A.shape != B.shape:
        raise ValueError("A and B must have the same size")
    n = A.shape[0]
    if n > 6:
        raise ValueError("index set limited to 6 elements")
    FA = build_fock(n, -1.0, K=A)
    FB = build_fock(n, -1.0, K=B)
    wA = [FA.field_operator(FA.basis_vector(i)) for i in range(n)]
    wB = [FB.field_operator(FB.basis_vector(i)) for i in range(n)]
    return DilationModel(A, B, FA, FB, wA, wB)


def element_residual(e1: dict, e2: dict) -> float:
    """Factor-wise distance between two elements in the stored form."""
    if e1.keys() != e2.keys():
        return float("inf")
    res = 0.0
    for key in e1:
        c1, a1, b1 = e1[key]
        c2, a2, b2 = e2[key]
        if len(a1) != len(a2) or len(b1) != len(b2):
            return float("inf")
        res = max(res, abs(c1 - c2))
        for M1, M2 in zip(a1 + b1, a2 + b2):
            res = max(res, float(np.abs(M1 - M2).max(initial=0.0)))
    return res


@dataclass
class DilationCheck:
    residual: float
    closed_form_residual: float
    expected: np.ndarray = field(repr=False)
    computed: np.ndarray = field(repr=False)


def schur_dilation_check(A, B, k: int, l: int, x, model: DilationModel | None = None) -> DilationCheck:
    """Compare ``E U_1^k U_2^l J(x)`` with ``A^k o B^l o x`` entrywise.

    ``U_1`` and ``U_2`` are applied step by step; the result is also compared
    against the closed form.
    """
    if not (0 <= k <= 3 and 0 <= l <= 3):
        raise ValueError("k and l must lie in 0..3")
    model = dilation_model(A, B) if model is None else model
    x = np.asarray(x, dtype=float)
    elem = model.embed(x)
    for _ in range(l):
        elem = model.apply_U2(elem)
    for _ in range(k):
        elem = model.apply_U1(elem)
    computed = model.expectation(elem)
    expected = model.A ** k * model.B ** l * x
    return DilationCheck(float(np.abs(computed - expected).max()),
                         element_residual(elem, model.closed_form(x, k, l)), expected, computed)


def induction_check(A, B, k: int, l: int, x, model: DilationModel | None = None) -> float:
    """Apply ``U_1`` to the closed form at ``(k, l)``, ``k >= l``; compare with ``(k+1, l)``."""
    if k < l:
        raise ValueError("induction step needs k >= l")
    model = dilation_model(A, B) if model is None else model
    stepped = model.apply_U1(model.closed_form(x, k, l))
    return element_residual(stepped, model.closed_form(x, k + 1, l))
