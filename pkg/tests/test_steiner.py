import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matsaevlab import steiner
from matsaevlab.steiner import PartialSteinerSystem


def test_fano_is_steiner_triple_system():
    S = steiner.fano_plane()
    assert len(S) == 7 == comb(7, 2) // comb(3, 2)
    assert steiner.validate(S) == (True, None)
    pairs = [p for b in S.blocks for p in itertools.combinations(b, 2)]
    assert sorted(pairs) == list(itertools.combinations(range(1, 8), 2))


def test_validate_examples():
    assert steiner.validate(PartialSteinerSystem(5, 3, 2, ())) == (True, None)
    ok, witness = steiner.validate(PartialSteinerSystem(5, 3, 2, ((1, 2, 3), (1, 2, 4))))
    assert not ok and witness == (1, 2)
    ok, witness = steiner.validate(PartialSteinerSystem(5, 3, 2, ((1, 2, 3), (3, 2, 1))))
    assert not ok


def test_bad_blocks_rejected():
    with pytest.raises(ValueError):
        PartialSteinerSystem(4, 3, 2, ((1, 2, 5),))
    with pytest.raises(ValueError):
        PartialSteinerSystem(4, 3, 2, ((1, 1, 2),))
    with pytest.raises(ValueError):
        PartialSteinerSystem(4, 5, 2, ())


def test_greedy_examples():
    S = steiner.greedy_construct(4, 4, 4, seed=0)
    assert S.blocks == ((1, 2, 3, 4),)
    S = steiner.greedy_construct(7, 3, 2, seed=1)
    assert steiner.validate(S)[0] and len(S) <= 7
    S = steiner.greedy_construct(15, 4, 3, seed=2)
    assert steiner.validate(S)[0]
    rep = steiner.density_report(S)
    assert 0 < rep.packing_ratio <= 1


def test_greedy_deterministic():
    assert steiner.greedy_construct(12, 3, 2, 9) == steiner.greedy_construct(12, 3, 2, 9)


def test_enumeration_cap():
    with pytest.raises(ValueError):
        steiner.greedy_construct(60, 10, 9)


def test_density_fano():
    rep = steiner.density_report(steiner.fano_plane())
    assert rep.count == 7
    assert rep.ideal == pytest.approx(35 / 3)
    assert rep.ratio == pytest.approx(0.6)
    assert rep.packing_ratio == 1.0


def test_density_single_block_packing_ratio():
    for k in (3, 4, 5):
        rep = steiner.density_report(PartialSteinerSystem(k, k, k - 1, (tuple(range(1, k + 1)),)))
        assert rep.packing_ratio == 1.0
        assert rep.ratio == k


def test_density_greedy_25():
    rep = steiner.density_report(steiner.greedy_construct(25, 3, 2, seed=0))
    assert rep.packing_ratio > 0.5
    # the count C(n,k)/k overshoots the t = k-1 packing maximum by (n-k+1)/k
    assert rep.ratio < 0.15


def test_density_requires_t_k_minus_1():
    with pytest.raises(ValueError):
        steiner.density_report(PartialSteinerSystem(6, 3, 1, ((1, 2, 3),)))


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 11), st.integers(2, 4), st.integers(0, 10**6))
def test_greedy_valid_and_bounded(n, k, seed):
    k = min(k, n)
    for t in range(1, k + 1):
        S = steiner.greedy_construct(n, k, t, seed)
        assert steiner.validate(S)[0]
        assert len(S) <= comb(n, t) // comb(k, t)


def test_block_file_roundtrip():
    S = steiner.greedy_construct(9, 3, 2, 4)
    assert steiner.loads(steiner.dumps(S)) == S
    with pytest.raises(ValueError):
        steiner.loads("1 2 3 4\n")


def test_multi_indices():
    S = PartialSteinerSystem(4, 2, 1, ((1, 3), (2, 4)))
    assert S.multi_indices() == [(1, 0, 1, 0), (0, 1, 0, 1)]
