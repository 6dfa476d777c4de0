"""Random unimodular polynomials and complex Gaussian constants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from . import pnorm
from .poly import SparsePolynomial, coefficient_l1, conjugate_exponent, sup_norm_torus

KSZ_CONSTANT = 8.0
MAX_REDRAWS = 16


@dataclass
class KSZSample:
    polynomial: SparsePolynomial
    bound: float
    certified: bool
    rigorous: bool
    lower: float
    draws: int
    exceeded_first: bool


def ksz_bound(n: int, k: int, size: int, D: float = KSZ_CONSTANT) -> float:
    """``D * sqrt(n * ln(k) * |C|)``."""
    return D * math.sqrt(n * math.log(k) * size)


def ksz_sample(support, seed: int = 0, budget: int = 512, D: float = KSZ_CONSTANT) -> KSZSample:
    """Draw a +-1 polynomial on ``support`` and check it against the KSZ bound.

    ``certified`` means the sampled torus lower bound does not exceed the
    bound; ``rigorous`` additionally holds when the l1 norm (a true upper
    bound on the supremum) is below it.  A draw whose sampled lower bound
    exceeds the bound is redrawn, up to 16 times.
    """
    support = [tuple(int(a) for a in alpha) for alpha in support]
    if not support:
        raise ValueError("empty support")
    n = len(support[0])
    if any(len(a) != n for a in support):
        raise ValueError("multi-indices of unequal length")
    degrees = {sum(a) for a in support}
    if len(degrees) != 1:
        raise ValueError(f"support is not homogeneous: degrees {sorted(degrees)}")
    (k,) = degrees
    if k < 2:
        raise ValueError("degree must be >= 2 so that log k > 0")
    if len(set(support)) != len(support):
        raise ValueError("repeated multi-index in support")
    bound = ksz_bound(n, k, len(support), D)
    rng = np.random.default_rng(seed)
    exceeded_first = False
    for draw in range(1, MAX_REDRAWS + 1):
        signs = rng.choice([-1.0, 1.0], size=len(support))
        P = SparsePolynomial.from_support(n, support, signs)
        est = sup_norm_torus(P, budget=budget, seed=int(rng.integers(2**32)))
        ok = est.lower <= bound
        if draw == 1:
            exceeded_first = not ok
        if ok:
            break
    return KSZSample(P, bound, ok, ok and coefficient_l1(P) <= bound, est.lower, draw,
                     exceeded_first)


def ksm_bound(size: int, n: int, k: int, p: float, D: float = KSZ_CONSTANT) -> float:
    """Interpolated multiplier bound ``|C|^(-1+2/r) (D sqrt(n ln k |C|))^(2(1-1/r))``.

    Here ``r = min(p, p')``: the ``M_1`` norm ``|C|`` of a +-1 polynomial on
    ``C`` interpolated against the KSZ bound on its ``M_2`` norm.
    """
    if not (1 < p < math.inf):
        raise ValueError("p must lie in (1, inf)")
    r = min(p, conjugate_exponent(p))
    return size ** (-1.0 + 2.0 / r) * ksz_bound(n, k, size, D) ** (2.0 * (1.0 - 1.0 / r))


def ksz_failure_probability(k: int, n: int) -> float:
    return 1.0 / (k * k * math.e ** n)


# -- Gaussian moments --------------------------------------------------------


def complex_gaussian(rng: np.random.Generator, size) -> np.ndarray:
    """Standard complex Gaussian with ``E|G|^2 = 1``."""
    s = math.sqrt(0.5)
    return s * rng.standard_normal(size) + 1j * s * rng.standard_normal(size)


def moment_exact(p: float) -> float:
    """``(E|G|^p)^(1/p) = Gamma(p/2 + 1)^(1/p)`` since ``|G|^2`` is Exp(1)."""
    return gamma(p / 2 + 1) ** (1.0 / p)


def moment_as_printed(p: float) -> float:
    """The closed form ``2^(p/2 - 1) Gamma(p/2 + 1)^(1/p)``."""
    return 2.0 ** (p / 2 - 1) * gamma(p / 2 + 1) ** (1.0 / p)


@dataclass
class MomentReport:
    p: float
    monte_carlo: float
    std_error: float
    closed_form_candidates: dict
    supported: str
    discrepancy: dict = field(default_factory=dict)


def gaussian_moment(p: float, trials: int = 10**6, seed: int = 0) -> MomentReport:
    """Monte Carlo ``(E|G|^p)^(1/p)`` compared with two closed forms.

    ``supported`` names the candidate closest to the estimate in units of
    its standard error (delta method).
    """
    if not (1 < p < math.inf):
        raise ValueError("p must lie in (1, inf)")
    if trials < 10**4:
        raise ValueError("need at least 10^4 trials")
    rng = np.random.default_rng(seed)
    g = np.abs(complex_gaussian(rng, trials)) ** p
    m = math.fsum(g) / trials
    est = m ** (1.0 / p)
    se_m = float(np.std(g, ddof=1)) / math.sqrt(trials)
    se = est / (p * m) * se_m
    cands = {"gamma": float(moment_exact(p)), "printed": float(moment_as_printed(p))}
    supported = min(cands, key=lambda c: abs(cands[c] - est))
    disc = {name: float((val - est) / se) for name, val in cands.items()}
    return MomentReport(p, est, se, cands, supported, disc)


@dataclass
class ProjectionReport:
    n: int
    p: float
    grid_size: int
    empirical_norms: list
    empirical_norm: float
    bound: float
    bound_printed: float


def projection_matrix(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """``f -> sum_j <f, G_j> G_j`` on step functions over ``m`` cells of [0,1]."""
    G = complex_gaussian(rng, (n, m))
    # <f, G_j> = (1/m) sum_i f_i conj(G_ji)
    return (G.T @ G.conj()) / m


def gaussian_projection_check(n: int, p: float, m: int, trials: int = 4, seed: int = 0,
                              restarts: int = 8) -> ProjectionReport:
    """Empirical ``p -> p`` norm of the Gaussian projection versus the moment bound.

    The cell measure ``1/m`` cancels in the operator norm, so the matrix is
    measured on plain ``l_p^m``.  Nothing is asserted: the bound is stated for
    a random operator without saying in which sense it holds.
    """
    if m < 64 * n:
        raise ValueError(f"grid size {m} < 64 n = {64 * n}")
    if not (1 < p < math.inf):
        raise ValueError("p must lie in (1, inf)")
    r = max(p, conjugate_exponent(p))
    norms = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        M = projection_matrix(n, m, rng)
        if p == 2:
            norms.append(pnorm.opnorm_exact(M, 2))
        else:
            norms.append(pnorm.opnorm_lower(M, p, restarts=restarts,
                                             seed=int(rng.integers(2**32))).lower)
    return ProjectionReport(n, p, m, norms, float(np.mean(norms)),
                            float(moment_exact(r)), float(moment_as_printed(r)))
