"""Sparse multivariate polynomials over the complex numbers.

A polynomial in ``n`` variables is stored as a map from exponent tuples to
non-zero complex coefficients.  Besides evaluation and arithmetic this module
provides the norms that bound Fourier-multiplier norms of a polynomial:

* the coefficient l1 norm, equal to the multiplier norm on l_1,
* the supremum over the torus, equal to the multiplier norm on l_2,
* the Riesz-Thorin interpolant between the two for 1 < p < infinity.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

MultiIndex = tuple  # tuple[int, ...] of non-negative exponents


@dataclass(frozen=True)
class NormEstimate:
    """Two-sided bracket ``lower <= norm <= upper`` with provenance labels."""

    lower: float
    upper: float
    method_lower: str
    method_upper: str
    witness: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("norm bracket must be finite")
        if self.lower < 0 or self.upper < 0:
            raise ValueError("norm bracket must be non-negative")
        if self.lower > self.upper + 1e-9 * max(1.0, self.upper):
            raise ValueError(f"inverted bracket: {self.lower} > {self.upper}")


class SparsePolynomial:
    """Polynomial ``sum_alpha a_alpha z^alpha`` in ``n`` complex variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Sequence[int], complex] | None = None):
        if n < 0:
            raise ValueError("variable count must be non-negative")
        self.n = int(n)
        self.terms: dict[MultiIndex, complex] = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n:
                raise ValueError(f"multi-index {alpha} has length != {self.n}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            c = complex(c)
            if c == 0:
                continue
            total = self.terms.get(alpha, 0) + c
            if total == 0:
                self.terms.pop(alpha, None)
            else:
                self.terms[alpha] = total

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, n: int, c: complex = 1.0) -> "SparsePolynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, j: int) -> "SparsePolynomial":
        """The coordinate ``z_j`` (0-based ``j``)."""
        alpha = [0] * n
        alpha[j] = 1
        return cls(n, {tuple(alpha): 1.0})

    @classmethod
    def from_quadratic_form(cls, A) -> "SparsePolynomial":
        """``P_A(z) = sum_{i,j} a_ij z_i z_j``."""
        A = np.asarray(A)
        n = A.shape[0]
        terms: dict[MultiIndex, complex] = {}
        for i in range(n):
            for j in range(n):
                if A[i, j] == 0:
                    continue
                alpha = [0] * n
                alpha[i] += 1
                alpha[j] += 1
                alpha = tuple(alpha)
                terms[alpha] = terms.get(alpha, 0) + A[i, j]
        return cls(n, terms)

    @classmethod
    def from_support(cls, n: int, support: Iterable[Sequence[int]], coeffs=None) -> "SparsePolynomial":
        support = [tuple(a) for a in support]
        if coeffs is None:
            coeffs = [1.0] * len(support)
        return cls(n, dict(zip(support, coeffs)))

    # -- basic queries ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __repr__(self) -> str:
        return f"SparsePolynomial(n={self.n}, terms={self.terms!r})"

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def max_partial_degree(self) -> int:
        return max((max(a, default=0) for a in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({sum(a) for a in self.terms}) <= 1

    def exponents(self) -> np.ndarray:
        """``(terms, n)`` integer array of exponents, in insertion order."""
        if not self.terms:
            return np.zeros((0, self.n), dtype=np.int64)
        return np.array(list(self.terms), dtype=np.int64).reshape(len(self.terms), self.n)

    def coefficients(self) -> np.ndarray:
        return np.array(list(self.terms.values()), dtype=complex)

    # -- arithmetic -------------------------------------------------------

    def _check_same(self, other: "SparsePolynomial"):
        if self.n != other.n:
            raise ValueError(f"variable counts differ: {self.n} vs {other.n}")

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        self._check_same(other)
        out = SparsePolynomial(self.n, self.terms)
        return SparsePolynomial(self.n, _merge(out.terms, other.terms, 1))

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        self._check_same(other)
        return SparsePolynomial(self.n, _merge(dict(self.terms), other.terms, -1))

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(self.n, {a: -c for a, c in self.terms.items()})

    def scale(self, c: complex) -> "SparsePolynomial":
        return SparsePolynomial(self.n, {a: c * v for a, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SparsePolynomial):
            return self.scale(other)
        # coefficient convolution
        self._check_same(other)
        out: dict[MultiIndex, complex] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0) + ca * cb
        return SparsePolynomial(self.n, out)

    __rmul__ = scale


def _merge(base: dict, extra: Mapping, sign: int) -> dict:
    for a, c in extra.items():
        base[a] = base.get(a, 0) + sign * c
    return base


def evaluate(P: SparsePolynomial, z) -> complex:
    z = np.asarray(z, dtype=complex)
    if z.shape != (P.n,):
        raise ValueError(f"point has shape {z.shape}, expected ({P.n},)")
    total = 0j
    for alpha, c in P.terms.items():
        term = c
        for zj, a in zip(z, alpha):
            if a:
                term *= zj ** a
        total += term
    return total


def evaluate_torus(P: SparsePolynomial, theta: np.ndarray) -> np.ndarray:
    """Vectorized ``P(exp(i*theta))`` for an ``(m, n)`` array of phases."""
    theta = np.atleast_2d(theta)
    E = P.exponents().astype(float)
    if not len(E):
        return np.zeros(theta.shape[0], dtype=complex)
    return np.exp(1j * (theta @ E.T)) @ P.coefficients()


def coefficient_l1(P: SparsePolynomial) -> float:
    """Sum of coefficient moduli; this is the multiplier norm on ``l_1(Z^n)``."""
    return float(sum(abs(c) for c in P.terms.values()))


# -- torus supremum ---------------------------------------------------------


def _value_and_grad(E: np.ndarray, coef: np.ndarray, theta: np.ndarray):
    # f(theta) = |P(e^{i theta})|^2 and its gradient in theta
    mono = np.exp(1j * (E @ theta)) * coef
    val = mono.sum()
    grad = 2.0 * np.real(np.conj(val) * 1j * (E.T @ mono))
    return abs(val) ** 2, grad


def polish_phases(P: SparsePolynomial, theta0, iterations: int = 100) -> tuple[float, np.ndarray]:
    """Gradient ascent of ``|P(e^{i theta})|`` from ``theta0``.

    The step is halved until the squared modulus increases by at least
    ``step/2 * |grad|^2`` and doubled after each accepted move; the result is
    never worse than the start.
    """
    E = P.exponents().astype(float)
    coef = P.coefficients()
    theta = np.array(theta0, dtype=float)
    f, g = _value_and_grad(E, coef, theta)
    lip = max(1.0, float(np.sum(np.abs(coef) * np.sum(E, axis=1))) ** 2)
    step = 1.0 / lip
    for _ in range(iterations):
        gn = float(g @ g)
        if gn < 1e-28:
            break
        while step > 1e-16:
            cand = theta + step * g
            fc, gc = _value_and_grad(E, coef, cand)
            # sufficient increase; plain increase lets the iterate zigzag across the peak
            if fc > f and fc - f >= 0.5 * step * gn:
                theta, f, g = cand, fc, gc
                step *= 2.0
                break
            step *= 0.5
        else:
            break
    return math.sqrt(f), theta


def sup_norm_torus(P: SparsePolynomial, budget: int = 4096, seed: int = 0,
                   chunk: int = 16384) -> NormEstimate:
    """Bracket the supremum of ``|P|`` over the torus ``T^n``.

    Phases are drawn from a seeded stream; every sample that sets a new
    running record is polished by :func:`polish_phases`.  Because the records
    of a prefix do not depend on later samples, the lower bound is
    non-decreasing in ``budget`` for a fixed seed.  The upper bound is the
    coefficient l1 norm.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    upper = coefficient_l1(P)
    if P.n == 0 or not P.terms:
        val = abs(P.terms.get((), 0)) if P.n == 0 else 0.0
        return NormEstimate(val, max(val, upper), "exact", "coefficient-l1")
    rng = np.random.default_rng(seed)
    best = -1.0
    best_theta = None
    record = -1.0
    done = 0
    while done < budget:
        size = min(chunk, budget - done)
        theta = rng.uniform(0.0, 2 * np.pi, size=(size, P.n))
        vals = np.abs(evaluate_torus(P, theta))
        # samples that beat every earlier sample, in stream order
        prev = np.maximum.accumulate(np.concatenate(([record], vals)))[:-1]
        for idx in np.flatnonzero(vals > prev):
            polished, th = polish_phases(P, theta[idx])
            if polished > best:
                best, best_theta = polished, th
        record = max(record, float(vals.max()))
        done += size
    best = min(best, upper)
    return NormEstimate(best, upper, f"torus-sampling[{budget}]+ascent", "coefficient-l1",
                        witness=np.mod(best_theta, 2 * np.pi))


def sup_norm_torus_upper(P: SparsePolynomial, max_points: int = 2_000_000) -> float:
    """Certified upper bound on the torus supremum.

    Evaluates ``P`` on a uniform phase grid of spacing ``h`` and adds the
    Lipschitz slack ``h/2 * sum |a_alpha| |alpha|``.  Homogeneous polynomials
    satisfy ``|P(e^{i phi} z)| = |P(z)|``, so the first phase is pinned to 0
    and only ``n - 1`` axes are gridded.  Returns ``min(l1, grid bound)``.
    """
    l1 = coefficient_l1(P)
    if not P.terms or P.degree == 0:
        return l1
    E = P.exponents()
    coef = P.coefficients()
    free = list(range(P.n))
    if P.is_homogeneous():
        free = free[1:]
    free = [j for j in free if E[:, j].any()]
    if not free:
        return l1
    per_axis = int(max_points ** (1.0 / len(free)))
    if per_axis < 8:
        return l1
    h = 2 * np.pi / per_axis
    lip = float(np.sum(np.abs(coef) * E[:, free].sum(axis=1)))
    grid = np.arange(per_axis) * h
    Ef = E[:, free].astype(float)
    shape = (per_axis,) * len(free)
    total = per_axis ** len(free)
    best = 0.0
    # chunked over the flattened grid to bound memory
    for start in range(0, total, 65536):
        idx = np.unravel_index(np.arange(start, min(start + 65536, total)), shape)
        theta = np.column_stack(idx) * h
        vals = np.abs(np.exp(1j * (theta @ Ef.T)) @ coef)
        best = max(best, float(vals.max()))
    return min(l1, best + 0.5 * h * lip)


def multiplier_upper_bound(P: SparsePolynomial, p: float, m2_upper: float | None = None) -> float:
    """Riesz-Thorin bound on ``||P||_{M_p(Z^n)}``.

    With ``r = min(p, p')`` and ``theta = 2(1 - 1/r)`` returns
    ``l1^(1-theta) * m2^theta`` where ``m2`` bounds the torus supremum.  If
    ``m2_upper`` is omitted a certified grid bound is computed.
    """
    if not (1 < p < math.inf):
        raise ValueError("p must lie in (1, inf)")
    r = min(p, conjugate_exponent(p))
    theta = 2.0 * (1.0 - 1.0 / r)
    l1 = coefficient_l1(P)
    m2 = sup_norm_torus_upper(P) if m2_upper is None else float(m2_upper)
    if l1 == 0:
        return 0.0
    return l1 ** (1.0 - theta) * m2 ** theta


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


def homogenize_matrix(P: SparsePolynomial) -> np.ndarray:
    """Symmetric ``(n+1) x (n+1)`` matrix of a polynomial of degree <= 2.

    Entry (0, 0) is the constant term, the border row/column holds half the
    linear coefficients and the lower-right block is the symmetrized
    quadratic part, so that ``P(z) = (1, z) A (1, z)^T``.
    """
    if P.degree > 2:
        raise ValueError(f"degree {P.degree} > 2")
    n = P.n
    A = np.zeros((n + 1, n + 1), dtype=complex)
    for alpha, c in P.terms.items():
        idx = [j for j, a in enumerate(alpha) for _ in range(a)]
        if not idx:
            A[0, 0] += c
        elif len(idx) == 1:
            A[0, idx[0] + 1] += c / 2
            A[idx[0] + 1, 0] += c / 2
        elif idx[0] == idx[1]:
            A[idx[0] + 1, idx[0] + 1] += c
        else:
            i, j = idx[0] + 1, idx[1] + 1
            A[i, j] += c / 2
            A[j, i] += c / 2
    return A


# -- text interchange ---------------------------------------------------------

_TERM_RE = re.compile(r"([+-]?)([^+-]+)")


def parse(text: str, n: int | None = None) -> SparsePolynomial:
    """Parse expressions such as ``"z1^2 - 2*z1*z2 + 3"`` (1-based variables)."""
    src = text.replace(" ", "").replace("**", "^")
    if not src:
        raise ValueError("empty polynomial expression")
    # protect exponents/coeffs like 1e-3 from the term splitter
    src = re.sub(r"(\d[eE])([+-])", lambda m: m.group(1) + ("P" if m.group(2) == "+" else "M"), src)
    raw = []
    highest = 0
    for sign, body in _TERM_RE.findall(src):
        coef = -1.0 if sign == "-" else 1.0
        powers: dict[int, int] = {}
        for factor in filter(None, body.split("*")):
            factor = factor.replace("P", "+").replace("M", "-")
            m = re.fullmatch(r"(\d*\.?\d*(?:[eE][+-]?\d+)?)?z(\d+)(?:\^(\d+))?", factor)
            if m:
                if m.group(1):
                    coef *= float(m.group(1))
                j = int(m.group(2))
                if j < 1:
                    raise ValueError("variables are 1-based: z1, z2, ...")
                powers[j] = powers.get(j, 0) + int(m.group(3) or 1)
                highest = max(highest, j)
            else:
                try:
                    coef *= complex(factor.replace("i", "j")) if ("i" in factor or "j" in factor) else float(factor)
                except ValueError:
                    raise ValueError(f"cannot parse factor {factor!r}") from None
        raw.append((coef, powers))
    n = highest if n is None else n
    if highest > n:
        raise ValueError(f"expression uses z{highest} but n={n}")
    terms: dict[MultiIndex, complex] = {}
    for coef, powers in raw:
        alpha = tuple(powers.get(j + 1, 0) for j in range(n))
        terms[alpha] = terms.get(alpha, 0) + coef
    return SparsePolynomial(n, terms)


def dumps(P: SparsePolynomial) -> str:
    lines = [f"n={P.n}"]
    for alpha, c in sorted(P.terms.items()):
        lines.append(" ".join([repr(c.real), repr(c.imag), *map(str, alpha)]))
    return "\n".join(lines) + "\n"


def loads(text: str) -> SparsePolynomial:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("missing 'n=<varcount>' header")
    n = int(lines[0][2:])
    terms: dict[MultiIndex, complex] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != n + 2:
            raise ValueError(f"term line {ln!r} has {len(parts)} fields, expected {n + 2}")
        alpha = tuple(int(a) for a in parts[2:])
        terms[alpha] = terms.get(alpha, 0) + complex(float(parts[0]), float(parts[1]))
    return SparsePolynomial(n, terms)
