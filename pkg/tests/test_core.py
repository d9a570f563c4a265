import pytest
from hypothesis import given

from dicycles.core import (DigraphError, PreconditionError, build, find_path, induced, is_path,
                           reach_set, reverse, strong_components)
from dicycles.gen import gen_F

from conftest import bidirected_complete, digraphs, directed_cycle


def test_build_digon_and_triangle():
    D = build(2, [(0, 1), (1, 0)])
    assert D.arcs == ((0, 1), (1, 0))
    T = directed_cycle(3)
    assert T.out == ((1,), (2,), (0,))


@pytest.mark.parametrize("n, arcs", [(1, [(0, 0)]), (2, [(0, 1), (0, 1)]), (2, [(0, 2)])])
def test_build_rejects_bad_arcs(n, arcs):
    with pytest.raises(DigraphError):
        build(n, arcs)


def test_reverse_examples():
    assert reverse(directed_cycle(3)).arcs == ((0, 2), (1, 0), (2, 1))
    digon = build(2, [(0, 1), (1, 0)])
    assert reverse(digon) == digon
    F2, _ = gen_F(2)
    leaves = [v for v in F2.vertices if F2.labels[v] == "depth 2"]
    R = reverse(F2)
    assert all(R.in_degree(v) == 2 for v in leaves)


def test_induced_examples():
    H, keep = induced(directed_cycle(3), {0, 1})
    assert H.arcs == ((0, 1),) and keep == (0, 1)
    K4 = bidirected_complete(4)
    assert induced(K4, range(4))[0] == K4
    assert len(induced(K4, {0, 2, 3})[0].arcs) == 6


def test_strong_components_examples():
    assert strong_components(build(3, [(0, 1), (1, 2)])) == [(0,), (1,), (2,)]
    assert [set(c) for c in strong_components(directed_cycle(3))] == [{0, 1, 2}]
    D = build(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    assert [set(c) for c in strong_components(D)] == [{0, 1, 2}, {3}]


def test_reach_set_examples():
    P = build(3, [(0, 1), (1, 2)])
    assert reach_set(P, {0}) == {1, 2}
    assert reach_set(P, {0}, {1}) == set()
    assert reach_set(build(2, [(0, 1), (1, 0)]), {0}) == {0, 1}


def test_find_path_examples():
    T = directed_cycle(3)
    assert find_path(T, 0, 2) == (0, 1, 2)
    assert find_path(T, 0, 2, {1}) is None
    with pytest.raises(PreconditionError):
        find_path(T, 1, 1)


@given(digraphs())
def test_reverse_is_an_involution(D):
    assert reverse(reverse(D)) == D


@given(digraphs())
def test_components_partition_and_condense_acyclically(D):
    comps = strong_components(D)
    flat = [v for c in comps for v in c]
    assert sorted(flat) == list(D.vertices)
    index = {v: i for i, c in enumerate(comps) for v in c}
    # topological order: every arc between classes goes forward
    assert all(index[u] <= index[v] for u, v in D.arcs)
    cond = build(len(comps), {(index[u], index[v]) for u, v in D.arcs if index[u] != index[v]})
    assert all(len(c) == 1 for c in strong_components(cond))


@given(digraphs())
def test_reach_forward_matches_backward_on_reverse(D):
    R = reverse(D)
    for v in D.vertices:
        blocked = {(v + 1) % D.n} - {v}
        assert reach_set(D, {v}, blocked, "forward") == reach_set(R, {v}, blocked, "backward")


@given(digraphs(min_n=2))
def test_find_path_is_a_path_avoiding_forbidden(D):
    forbidden = {v for v in D.vertices if v % 3 == 2} - {0, 1}
    P = find_path(D, 0, 1, forbidden)
    if P is None:
        assert 1 not in reach_set(D, {0}, forbidden)
    else:
        assert is_path(D, P) and P[0] == 0 and P[-1] == 1
        assert not set(P[1:-1]) & forbidden
