"""Slow, independent reference computations used only by the tests."""
import itertools
import math

import numpy as np


def torus_grid_max(P, per_axis):
    """Max |P| over a uniform phase grid, one point at a time."""
    best = 0.0
    phases = np.arange(per_axis) * 2 * np.pi / per_axis
    for theta in itertools.product(phases, repeat=P.n):
        z = np.exp(1j * np.array(theta))
        val = sum(c * np.prod(z ** np.array(a)) for a, c in P.terms.items())
        best = max(best, abs(val))
    return best


def sign_max_bruteforce(A):
    A = np.asarray(A, dtype=float)
    best = -math.inf
    for s in itertools.product([-1.0, 1.0], repeat=A.shape[0]):
        s = np.array(s)
        best = max(best, float(s @ A @ s))
    return best


def inversions(perm):
    return sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])


def q_inner_permutation_sum(w, v, q, K):
    """sum over permutations sigma of q^inv(sigma) prod K[w_i, v_sigma(i)]."""
    total = 0.0
    for sigma in itertools.permutations(range(len(w))):
        term = q ** inversions(sigma)
        for i, s in enumerate(sigma):
            term *= K[w[i], v[s]]
        total += term
    return total


def dixon_dim(n, k):
    return 1 + sum(math.comb(n + m - 1, m) for m in range(1, k - 1)) + n + 1


def rank_one_norm(u, v, p):
    pd = p / (p - 1)
    return np.sum(np.abs(u) ** p) ** (1 / p) * np.sum(np.abs(v) ** pd) ** (1 / pd)


def nonnegative_2x2_pnorm(A, p, samples=200001):
    """Scan the positive quarter of the l_p unit circle (optimal for A >= 0)."""
    t = np.linspace(0, np.pi / 2, samples)
    X = np.stack([np.cos(t), np.sin(t)])
    X = X / (np.sum(X ** p, axis=0) ** (1 / p))
    Y = np.asarray(A) @ X
    return float(np.max(np.sum(np.abs(Y) ** p, axis=0) ** (1 / p)))


def toeplitz_convolution(coeffs, m):
    """One-variable truncated convolution on {0..m-1} via scipy.linalg.toeplitz."""
    import scipy.linalg
    col = np.zeros(m)
    col[:min(m, len(coeffs))] = coeffs[:m]
    return scipy.linalg.toeplitz(col, np.zeros(m))


def random_psd(rng, l, rank=None):
    X = rng.standard_normal((l, rank or l))
    return X @ X.T


def random_correlation(rng, l, rank=None):
    A = random_psd(rng, l, rank)
    s = np.sqrt(np.diag(A))
    A = A / np.outer(s, s)
    A = (A + A.T) / 2
    np.fill_diagonal(A, 1.0)
    return A


def correlation_grid_max_3x3(A, step=0.01):
    """max <A, X> over 3x3 correlation matrices, scanning the off-diagonals.

    X is PSD iff 1 + 2abc - a^2 - b^2 - c^2 >= 0 (given |a|,|b|,|c| <= 1).
    """
    t = np.arange(-1.0, 1.0 + step / 2, step)
    a, b, c = np.meshgrid(t, t, t, indexing="ij")
    feasible = 1 + 2 * a * b * c - a * a - b * b - c * c >= -1e-12
    vals = np.trace(A) + 2 * (A[0, 1] * a + A[0, 2] * b + A[1, 2] * c)
    return float(vals[feasible].max())
