"""Operator norms of matrices acting on l_p.

Exact formulas exist only for p in {1, 2, inf}.  For other p we return a
lower bound from the nonlinear power method (Boyd / Higham), which is always
attained by an explicit witness vector, and an upper bound from Riesz-Thorin
interpolation between the exact endpoints.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

DEFAULT_RESTARTS = 16
MAX_ITER = 500
RATIO_TOL = 1e-10
# dense SVD above this size gets slow; switch to Lanczos
_DENSE_SVD_LIMIT = 2500


@dataclass
class PNormBracket:
    p: float
    lower: float
    upper: float
    restarts_used: int
    method_lower: str = "power-method"
    method_upper: str = "riesz-thorin"
    converged: bool = True
    witness: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.lower > self.upper + 1e-9 * max(1.0, self.upper):
            raise ValueError(f"inverted p-norm bracket {self.lower} > {self.upper}")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _dense(A):
    if scipy.sparse.issparse(A):
        return A.toarray()
    return np.asarray(A)


def vector_norm(x, p: float) -> float:
    x = np.abs(np.asarray(x))
    if p == math.inf:
        return float(x.max(initial=0.0))
    if p == 1:
        return float(x.sum())
    m = x.max(initial=0.0)
    if m == 0:
        return 0.0
    # scaling guards against overflow for large p
    return float(m * np.sum((x / m) ** p) ** (1.0 / p))


def _conj(p: float) -> float:
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


def opnorm_exact(A, p: float) -> float:
    """Exact ``||A||_{p->p}`` for ``p`` in ``{1, 2, inf}``."""
    if p == 1:
        return float(abs(A).sum(axis=0).max()) if A.shape[1] else 0.0
    if p == math.inf:
        return float(abs(A).sum(axis=1).max()) if A.shape[0] else 0.0
    if p != 2:
        raise ValueError(f"no exact formula for p={p}")
    if min(A.shape) == 0:
        return 0.0
    if scipy.sparse.issparse(A) and min(A.shape) > _DENSE_SVD_LIMIT:
        s = scipy.sparse.linalg.svds(A, k=1, tol=0, return_singular_vectors=False)
        return float(s[0])
    return float(scipy.linalg.svdvals(_dense(A))[0])


def opnorm_upper_interp(A, p: float) -> float:
    """Riesz-Thorin bound ``||A||_1^(1/p) * ||A||_inf^(1-1/p)``."""
    n1 = opnorm_exact(A, 1)
    ninf = opnorm_exact(A, math.inf)
    if p == 1:
        return n1
    if p == math.inf or n1 == ninf:
        return ninf
    return n1 ** (1.0 / p) * ninf ** (1.0 - 1.0 / p)


def opnorm_upper(A, p: float) -> float:
    """Best available certified upper bound: also interpolates through p = 2."""
    if p in (1, 2, math.inf):
        return opnorm_exact(A, p)
    up = opnorm_upper_interp(A, p)
    # interpolate through p = 2: from p = 1 when p < 2, from p = inf when p > 2
    r = min(p, _conj(p))
    theta = 2.0 * (1.0 - 1.0 / r)
    end = opnorm_exact(A, 1) if p < 2 else opnorm_exact(A, math.inf)
    two = opnorm_exact(A, 2)
    return min(up, end ** (1.0 - theta) * two ** theta)


def _dual(v: np.ndarray, p: float) -> np.ndarray:
    # |v|^(p-1) * v/|v|, with 0 -> 0; homogeneous, so rescale first to avoid
    # overflow on subnormal entries
    a = np.abs(v)
    out = np.zeros_like(v)
    top = a.max(initial=0.0)
    if top == 0:
        return out
    v, a = v / top, a / top
    nz = a > np.finfo(float).tiny
    out[nz] = a[nz] ** (p - 1.0) * (v[nz] / a[nz])
    return out


def _power_method(A, AH, x, p, pd, max_iter):
    x = x / vector_norm(x, p)
    best = vector_norm(A @ x, p)
    best_x = x
    converged = False
    prev = best
    for _ in range(max_iter):
        y = A @ x
        z = AH @ _dual(y, p)
        if not np.any(z):
            converged = True
            break
        x = _dual(z, pd)
        x = x / vector_norm(x, p)
        ratio = vector_norm(A @ x, p)
        if ratio > best:
            best, best_x = ratio, x
        if abs(ratio - prev) <= RATIO_TOL * max(1.0, ratio):
            converged = True
            break
        prev = ratio
    return best, best_x, converged


def opnorm_lower(A, p: float, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                 max_iter: int = MAX_ITER) -> PNormBracket:
    """Lower bound on ``||A||_{p->p}`` by the nonlinear power method.

    Starts from the column of largest p-norm, the all-ones vector and
    ``restarts`` random vectors drawn from independent child seeds.  The
    returned ``upper`` field is the certified interpolation bound.
    """
    if not (1 < p < math.inf):
        raise ValueError("power method needs 1 < p < inf")
    A = A.tocsr() if scipy.sparse.issparse(A) else np.asarray(A)
    m, n = A.shape
    AH = A.conj().T
    pd = _conj(p)
    is_complex = np.iscomplexobj(A)
    dtype = complex if is_complex else float

    starts = []
    if scipy.sparse.issparse(A):
        col_norms = np.asarray(abs(A).power(p).sum(axis=0)).ravel()
    else:
        col_norms = np.sum(np.abs(A) ** p, axis=0)
    e = np.zeros(n, dtype=dtype)
    e[int(np.argmax(col_norms))] = 1
    starts.append(e)
    starts.append(np.ones(n, dtype=dtype))
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        x = rng.standard_normal(n)
        if is_complex:
            x = x + 1j * rng.standard_normal(n)
        starts.append(x.astype(dtype))

    best, best_x, all_conv = -1.0, None, True
    for x0 in starts:
        val, x, conv = _power_method(A, AH, x0, p, pd, max_iter)
        all_conv &= conv
        if val > best:
            best, best_x = val, x
    upper = opnorm_upper(A, p)
    method = "power-method" if all_conv else "power-method(unconverged)"
    return PNormBracket(p, min(best, upper), upper, len(starts), method, "riesz-thorin",
                        all_conv, best_x)


def opnorm_bracket(A, p: float, restarts: int = DEFAULT_RESTARTS, seed: int = 0) -> PNormBracket:
    """Exact value at p in {1, 2, inf}; power-method bracket otherwise."""
    if p in (1, 2, math.inf):
        v = opnorm_exact(A, p)
        return PNormBracket(p, v, v, 0, "exact", "exact")
    return opnorm_lower(A, p, restarts=restarts, seed=seed)


def duality_check(A, p: float, restarts: int = DEFAULT_RESTARTS, seed: int = 0) -> float:
    """``| ||A||_p - ||A^T||_{p'} |`` from power-method lower bounds."""
    A = _dense(A)
    a = opnorm_lower(A, p, restarts=restarts, seed=seed).lower
    b = opnorm_lower(A.T, _conj(p), restarts=restarts, seed=seed).lower
    return abs(a - b)


# -- interchange ------------------------------------------------------------


def dumps_csv(A) -> str:
    A = _dense(A)
    buf = io.StringIO()
    if np.iscomplexobj(A):
        for row in A:
            buf.write(",".join(_fmt_complex(v) for v in row) + "\n")
    else:
        np.savetxt(buf, A, delimiter=",", fmt="%.17g")
    return buf.getvalue()


def _fmt_complex(v: complex) -> str:
    return f"{v.real:.17g}{v.imag:+.17g}j"


def loads_csv(text: str) -> np.ndarray:
    rows = [ln.split(",") for ln in text.strip().splitlines() if ln.strip()]
    cells = [[complex(c.strip()) for c in r] for r in rows]
    A = np.array(cells, dtype=complex)
    if not np.any(A.imag):
        A = A.real
    return A


def dumps_coo(A) -> str:
    """Coordinate triples ``i j re im`` (0-based), header ``rows cols``."""
    C = scipy.sparse.coo_matrix(A)
    lines = [f"{C.shape[0]} {C.shape[1]}"]
    for i, j, v in zip(C.row, C.col, C.data):
        v = complex(v)
        lines.append(f"{i} {j} {v.real:.17g} {v.imag:.17g}")
    return "\n".join(lines) + "\n"


def loads_coo(text: str) -> scipy.sparse.csr_matrix:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    rows, cols = map(int, lines[0])
    body = np.array(lines[1:], dtype=float).reshape(-1, 4)
    data = body[:, 2] + 1j * body[:, 3]
    if not np.any(body[:, 3]):
        data = body[:, 2]
    return scipy.sparse.csr_matrix((data, (body[:, 0].astype(int), body[:, 1].astype(int))),
                                   shape=(rows, cols))
