"""Partial Steiner systems: construction, validation and density."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

MAX_CANDIDATES = 10**7

FANO_BLOCKS = (
    (1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6),
)


@dataclass(frozen=True)
class PartialSteinerSystem:
    """``k``-subsets of ``{1..n}`` with every ``t``-subset in at most one block."""

    n: int
    k: int
    t: int
    blocks: tuple

    def __post_init__(self):
        if not (1 <= self.t <= self.k <= self.n):
            raise ValueError(f"need 1 <= t <= k <= n, got t={self.t} k={self.k} n={self.n}")
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        for b in blocks:
            if len(b) != self.k or len(set(b)) != self.k:
                raise ValueError(f"block {b} is not a {self.k}-subset")
            if b[0] < 1 or b[-1] > self.n:
                raise ValueError(f"block {b} leaves {{1..{self.n}}}")
        object.__setattr__(self, "blocks", blocks)

    def __len__(self):
        return len(self.blocks)

    def multi_indices(self) -> list[tuple[int, ...]]:
        """Blocks as 0/1 exponent vectors of length ``n``."""
        out = []
        for b in self.blocks:
            alpha = [0] * self.n
            for i in b:
                alpha[i - 1] = 1
            out.append(tuple(alpha))
        return out


def validate(S: PartialSteinerSystem) -> tuple[bool, tuple | None]:
    """Check the at-most-one-block property.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is the
    first ``t``-subset found in two blocks (or a duplicated block).
    """
    if len(set(S.blocks)) != len(S.blocks):
        seen = set()
        for b in S.blocks:
            if b in seen:
                return False, b
            seen.add(b)
    covered = set()
    for b in S.blocks:
        for sub in itertools.combinations(b, S.t):
            if sub in covered:
                return False, sub
            covered.add(sub)
    return True, None


def greedy_construct(n: int, k: int, t: int, seed: int = 0) -> PartialSteinerSystem:
    """Random-order greedy packing.

    All ``k``-subsets are shuffled with ``seed``; a subset becomes a block
    iff none of its ``t``-subsets is covered yet.
    """
    if not (1 <= t <= k <= n):
        raise ValueError(f"need 1 <= t <= k <= n, got t={t} k={k} n={n}")
    total = comb(n, k)
    if total > MAX_CANDIDATES:
        raise ValueError(f"C({n},{k}) = {total} exceeds enumeration cap {MAX_CANDIDATES}")
    candidates = list(itertools.combinations(range(1, n + 1), k))
    order = np.random.default_rng(seed).permutation(total)
    covered = set()
    blocks = []
    for idx in order:
        b = candidates[idx]
        subs = list(itertools.combinations(b, t))
        if any(s in covered for s in subs):
            continue
        covered.update(subs)
        blocks.append(b)
    S = PartialSteinerSystem(n, k, t, tuple(blocks))
    assert len(S) <= comb(n, t) // comb(k, t)
    return S


def fano_plane() -> PartialSteinerSystem:
    return PartialSteinerSystem(7, 3, 2, FANO_BLOCKS)


@dataclass(frozen=True)
class DensityReport:
    count: int
    ideal: float
    ratio: float
    packing_ideal: float
    packing_ratio: float


def density_report(S: PartialSteinerSystem) -> DensityReport:
    """Block count against the asymptotic existence count ``C(n,k)/k``.

    ``packing_ideal = C(n, k-1)/k`` is the double-counting maximum for
    ``t = k-1``; ``packing_ratio`` is therefore always in ``[0, 1]``.
    """
    if S.t != S.k - 1:
        raise ValueError(f"density report needs t = k-1 (got t={S.t}, k={S.k})")
    ideal = comb(S.n, S.k) / S.k
    packing = comb(S.n, S.k - 1) / S.k
    return DensityReport(len(S), ideal, len(S) / ideal, packing, len(S) / packing)


def dumps(S: PartialSteinerSystem) -> str:
    lines = [f"{S.n} {S.k} {S.t}"]
    lines += [" ".join(map(str, b)) for b in S.blocks]
    return "\n".join(lines) + "\n"


def loads(text: str) -> PartialSteinerSystem:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 3:
        raise ValueError("block file needs an 'n k t' header")
    n, k, t = map(int, rows[0])
    return PartialSteinerSystem(n, k, t, tuple(tuple(map(int, r)) for r in rows[1:]))
