import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dicycles.core import PreconditionError, build, is_cycle
from dicycles.gen import gen_F
from dicycles.trains import (KTrain, find_k_train, is_train, pairwise_disjoint, select_distinct,
                             select_from_menus, train_cycles)

from conftest import bidirected_complete, directed_cycle, min_out_degree_digraphs


def test_five_cycle_one_train():
    T = find_k_train(directed_cycle(5), 1)
    assert [len(c) for c in train_cycles(T)] == [5]


def test_k3_two_train():
    T = find_k_train(bidirected_complete(3), 2)
    assert sorted(len(c) for c in train_cycles(T)) == [2, 3]


def test_F2_two_train():
    D, _ = gen_F(2)
    assert is_train(D, find_k_train(D, 2))


def test_train_cycle_lengths_follow_indices():
    T = KTrain((0, 1, 2, 3, 4), (0, 2))
    assert [len(c) for c in train_cycles(T)] == [5, 3]


def test_is_train_reports_violations():
    D = bidirected_complete(4)
    assert is_train(D, find_k_train(D, 3))
    dup = is_train(D, KTrain((0, 1, 0, 2), (0,)))
    assert not dup and "not a path" in dup.reason
    P = build(3, [(0, 1), (1, 2)])
    miss = is_train(P, KTrain((0, 1, 2), (0,)))
    assert not miss and "missing arc" in miss.reason


def test_find_k_train_needs_degree():
    with pytest.raises(PreconditionError):
        find_k_train(directed_cycle(4), 2)


def _train_family(lengths_per_train, k):
    """Disjoint bidirected cliques, one train each."""
    trains, arcs, base = [], [], 0
    for size in lengths_per_train:
        arcs += [(base + a, base + b) for a in range(size) for b in range(size) if a != b]
        spine = tuple(range(base, base + size))
        trains.append(KTrain(spine, tuple(range(k))))
        base += size
    return build(base, arcs), trains


def test_select_distinct_examples():
    D, trains = _train_family([5], 1)
    assert [len(c) for c in select_distinct(trains, D)] == [5]
    D, trains = _train_family([3, 3], 2)
    assert [len(c) for c in select_distinct(trains, D)] == [2, 3]
    D, trains = _train_family([5, 5, 5], 3)
    assert [len(c) for c in select_distinct(trains, D)] == [3, 4, 5]


def test_select_from_menus_reports_exhaustion():
    with pytest.raises(PreconditionError):
        select_from_menus([[(0, 1)], [(2, 3)]])


@settings(max_examples=60)
@given(st.integers(1, 4).flatmap(lambda k: st.tuples(st.just(k), min_out_degree_digraphs(k))))
def test_train_found_whenever_degree_allows(kd):
    k, D = kd
    T = find_k_train(D, k)
    assert T.k == k and is_train(D, T)
    cycles = train_cycles(T)
    assert all(is_cycle(D, c) for c in cycles)
    lengths = [len(c) for c in cycles]
    assert lengths == sorted(set(lengths), reverse=True)


@given(st.integers(1, 4), st.integers(0, 10**6))
def test_select_distinct_on_random_families(k, seed):
    rng = random.Random(seed)
    sizes = [rng.randint(k + 1, k + 4) for _ in range(k + rng.randint(0, 2))]
    D, trains = _train_family(sizes, k)
    rng.shuffle(trains)
    cycles = select_distinct(trains, D)
    assert len(cycles) == k
    assert len({len(c) for c in cycles}) == k
    assert pairwise_disjoint(cycles) is None
