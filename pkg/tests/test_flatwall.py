from itertools import product

import pytest

from dicycles.core import (PreconditionError, build, disjoint_union, is_strongly_connected, reach_set,
                           reverse)
from dicycles.flatwall import (DtdCertificate, FlatCertificate, FlatContext, Local, MinorCertificate,
                               NONSTRONG_W1, NONSTRONG_W2, brick_distance, in_or_out,
                               intersection_violations, nonstrong_case_pack, strip,
                               strong_case_pack, strong_positions, technical_train,
                               theorem_dispatch, wall_reach, weak_flat_check)
from dicycles.gen import CASES, gen_flat_instance, gen_layered, gen_nonstrong_instance
from dicycles.minors import expansion_model, identity_model
from dicycles.oracle import CyclePacking, verify_packing
from dicycles.trains import is_train, select_from_menus
from dicycles.walls import gen_wall, reverse_wall

from conftest import bidirected_complete


def extended(W, extra_arcs, extra=1):
    """Host of W plus ``extra`` new vertices and the given arcs."""
    D = build(W.host.n + extra, list(W.host.arcs) + extra_arcs)
    return FlatContext(D, W.with_host(D))


def deep(W):
    """Interior branch vertices whose every neighbour is interior too."""
    return [v for c, v in sorted(W.coord.items()) if v in W.interior
            and all(u in W.interior for u in W.host.out[v] + W.host.inn[v])]


def far_pair(ctx, dist):
    vs = deep(ctx.W)
    return next((a, b) for a in vs for b in vs if brick_distance(ctx, a, b) == dist)


def test_wall_reach_examples():
    W = gen_wall(4)
    ctx = FlatContext(W.host, W)
    w = deep(W)[0]
    assert wall_reach(ctx, w, "+") == frozenset()
    x = W.host.n
    assert wall_reach(extended(W, [(w, x)]), w, "+") == {x}
    y = W.coord[(1, 1)]
    assert y in W.perimeter
    ctx = extended(W, [(w, x), (x, y)])
    # the walk carries on along the perimeter, which lies outside the interior
    got = wall_reach(ctx, w, "+")
    assert {x, y} <= got <= {x} | W.perimeter
    assert got == {x, y} | reach_set(ctx.D, {y}, W.interior)


def test_brick_distance_examples():
    W = gen_wall(8)
    ctx = FlatContext(W.host, W)
    w1, w2 = W.coord[NONSTRONG_W1], W.coord[NONSTRONG_W2]
    assert brick_distance(ctx, w1, w1) == 0
    brick = sorted(W.bricks[W.bricks_of[w1][0]] & W.interior)
    other = next(v for v in brick if v != w1)
    assert brick_distance(ctx, w1, other) == 1
    assert brick_distance(ctx, w1, w2) == 3


def test_weak_flat_examples():
    W = gen_wall(5)
    bare = FlatContext(W.host, W)
    assert weak_flat_check(bare)
    brick = sorted(W.bricks[W.bricks_of[deep(W)[0]][0]] & W.interior)
    a, b = brick[0], brick[-1]
    assert not W.host.has_arc(a, b)
    assert weak_flat_check(extended(W, [(a, b)], extra=0))
    w1, w2 = far_pair(bare, 3)
    x = W.host.n
    ctx = extended(W, [(w1, x), (x, w2)])
    assert brick_distance(ctx, w1, w2) == 3
    chk = weak_flat_check(ctx)
    assert not chk and chk.pair == (w1, w2)


def test_literal_flatness_fails_on_bare_wall():
    W = gen_wall(3)
    assert not weak_flat_check(FlatContext(W.host, W), literal=True)


def test_in_or_out_trivial_branch():
    W = gen_wall(4)
    ctx = FlatContext(W.host, W)
    w = next(v for v in deep(W) if W.host.out_degree(v) == 2)
    res = in_or_out(ctx, w, 1, 1)
    assert res.branch == 1 and res.x == w and res.path == (w,)


@pytest.mark.parametrize("k, case", list(product([1, 2, 3], CASES)))
def test_technical_train_stays_in_region(k, case):
    inst = gen_flat_instance(k, case, seed=2)
    for w in inst.ws:
        tr = technical_train(inst.ctx, w, k)
        assert is_train(inst.D, tr.train) and tr.train.k == k
        assert tr.train.vertices <= tr.region


def test_case_four_spine_detours():
    inst = gen_flat_instance(3, "4", seed=0)
    w = inst.ws[0]
    tr = technical_train(inst.ctx, w, 3)
    loc = Local(inst.W, *inst.W.pos[w])
    assert tr.case == 4
    assert {loc.u[12], loc.u[13], loc.u[14]} <= tr.train.vertices


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_strips_disjoint_and_inside(k):
    W = gen_wall(3 * k + 2)
    strips = [strip(W, c) for c, _ in strong_positions(k)]
    for i, s in enumerate(strips):
        assert not s & W.perimeter
        for t in strips[i + 1:]:
            assert not s & t
    assert max(c for c, _ in strong_positions(k)) + 3 == 6 * k + 2 < 2 * W.m


@pytest.mark.parametrize("c1, c2", [("1", "dense"), ("4", "6"), ("dense", "2")])
def test_reverse_mode_matches_forward_on_reversal(c1, c2):
    inst = gen_nonstrong_instance(c1, c2, seed=4)
    w2 = inst.ws[1]
    got = technical_train(inst.ctx, w2, 3, "reverse")
    fwd = technical_train(FlatContext(reverse(inst.D), reverse_wall(inst.W)), w2, 3)
    assert got.train.reversed and not fwd.train.reversed
    assert (got.train.spine, got.train.back) == (fwd.train.spine, fwd.train.back)
    assert is_train(reverse(inst.D), fwd.train) and is_train(inst.D, got.train)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_strong_case_pack(k):
    inst = gen_flat_instance(k, "dense" if k == 4 else "3", seed=k)
    res = strong_case_pack(inst.ctx, k)
    assert len(res.cycles) == k
    assert verify_packing(inst.D, CyclePacking(tuple(res.cycles)))


def test_strong_case_pack_rejects_wrong_order():
    inst = gen_flat_instance(2, "1", seed=0)
    with pytest.raises(PreconditionError):
        strong_case_pack(inst.ctx, 3)


@pytest.mark.parametrize("c1, c2", list(product(["1", "5", "dense"], ["2", "6", "dense"])))
def test_nonstrong_case_pack(c1, c2):
    inst = gen_nonstrong_instance(c1, c2, seed=9)
    res = nonstrong_case_pack(inst.ctx)
    assert len(res.cycles) == 3
    assert verify_packing(inst.D, CyclePacking(tuple(res.cycles)))


def test_nonstrong_missing_gadget_fails_at_w1():
    inst = gen_nonstrong_instance("1", "1", seed=0, gadgets=(False, True))
    with pytest.raises(PreconditionError):
        nonstrong_case_pack(inst.ctx)


def test_menu_collision_takes_later_entries():
    q = [tuple(range(4))]
    m1 = [tuple(range(10, 16)), tuple(range(10, 14))]
    m2 = [tuple(range(20, 25)), tuple(range(20, 24))]
    got = select_from_menus([q, m1, m2])
    assert [len(c) for c in got] == [4, 6, 5]


def test_dispatch_dtd_route():
    D, dec = gen_layered(7)
    cycles = theorem_dispatch(D, DtdCertificate(dec), "mainsem")
    assert len(cycles) == 3 and verify_packing(D, CyclePacking(tuple(cycles)))


def test_dispatch_minor_route():
    M = expansion_model(9, 12)
    cycles = theorem_dispatch(M.source, MinorCertificate(M), "mainsem")
    assert len(cycles) == 3 and verify_packing(M.source, CyclePacking(tuple(cycles)))
    K5 = bidirected_complete(5)
    with pytest.raises(PreconditionError):
        theorem_dispatch(K5, MinorCertificate(identity_model(K5)), "mainsem")


def test_dispatch_flat_route_deletes_X():
    inst = gen_flat_instance(4, "2", seed=5)
    assert inst.W.m == 14
    junk = bidirected_complete(3)
    U, offsets = disjoint_union(inst.D, junk)
    o = offsets[1]
    w = inst.ws[0]
    D = build(U.n, list(U.arcs) + [(o, w), (w, o), (o + 1, inst.ws[1])])
    X = frozenset(range(o, o + 3))
    assert not weak_flat_check(FlatContext(D, inst.W.with_host(D)))
    cycles = theorem_dispatch(D, FlatCertificate(X, inst.W.with_host(D)), "mainconn", 4)
    assert len(cycles) == 4 and not X & {v for c in cycles for v in c}
    assert verify_packing(D, CyclePacking(tuple(cycles)))


def test_dispatch_rejects_unknown_mode():
    D, dec = gen_layered(4)
    with pytest.raises(PreconditionError):
        theorem_dispatch(D, DtdCertificate(dec), "other")


def test_intersection_checker_finds_planted_violation():
    W = gen_wall(5)
    w1, w2 = far_pair(FlatContext(W.host, W), 2)
    x = W.host.n
    ctx = extended(W, [(w1, x), (x, w2)])
    assert ("plus-minus", w1, w2) in intersection_violations(ctx, strong=False)


def test_intersection_properties_on_fixtures():
    fixtures = [gen_flat_instance(k, c, seed=k).ctx for k in (1, 2) for c in CASES]
    fixtures += [gen_nonstrong_instance("3", "4", seed=0).ctx]
    for ctx in fixtures:
        assert intersection_violations(ctx, strong=is_strongly_connected(ctx.D)) == []
