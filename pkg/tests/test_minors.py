import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dicycles.core import PreconditionError, build, cycle_weight
from dicycles.minors import (MinorModel, Op, State, complete_base_cycles, contract, contract_state,
                             distinct_length_pack_via_minor, expansion_model, identity_model,
                             lift_pack, random_weights, validate_model)
from dicycles.oracle import CyclePacking, verify_packing

from conftest import bidirected_complete, digraphs


def test_contract_path():
    D, _, keep, rec = contract(build(3, [(0, 1), (1, 2)]), (0, 1))
    assert D.n == 2 and len(D.arcs) == 1
    assert rec.removed == 0 and keep == (1, 2)


def test_contract_synthesizes_and_adds_weights():
    u, v, x = 0, 1, 2
    D = build(3, [(u, v), (v, u), (x, u)])
    w = {(u, v): Fraction(2), (v, u): Fraction(5), (x, u): Fraction(1)}
    H, weights, keep, rec = contract(D, (u, v), w)
    assert rec.synthesized == {(x, v): (x, u, v)}
    index = {old: new for new, old in enumerate(keep)}
    assert weights[(index[x], index[v])] == 3


def test_contract_collision_keeps_existing_arc():
    # (2,1) already exists; contracting (0,1) as a tail would create it again
    D = build(3, [(0, 1), (2, 0), (2, 1)])
    w = {(0, 1): Fraction(1), (2, 0): Fraction(1), (2, 1): Fraction(7)}
    S = State.of(D, w)
    rec = contract_state(S, (0, 1), "tail")
    assert rec.collisions == [(2, 1)] and S.weights[(2, 1)] == 7


def test_contract_rejects_butterfly_violation():
    D = build(4, [(0, 1), (0, 2), (3, 1)])
    with pytest.raises(PreconditionError):
        contract(D, (0, 1))


def test_validate_model_examples():
    assert validate_model(identity_model(bidirected_complete(3)))
    D = build(4, [(0, 1), (0, 2), (3, 1), (1, 0), (2, 0), (1, 3)])
    bad = MinorModel(D, (Op("ca", (0, 1)),), {0: 0, 2: 1, 3: 2})
    chk = validate_model(bad)
    assert not chk and "step 0" in chk.reason
    assert validate_model(expansion_model(5, 1))


def test_model_json_roundtrip():
    M = expansion_model(5, 4)
    again = MinorModel.from_json(M.to_json(), M.source)
    assert again.ops == M.ops and dict(again.iso) == dict(M.iso)


def test_complete_base_examples():
    assert complete_base_cycles(2, {(0, 1): 3, (1, 0): 4}, 1) == [(0, 1)]
    K5 = bidirected_complete(5)
    ones = {a: Fraction(1) for a in K5.arcs}
    got = complete_base_cycles(5, ones, 2)
    assert [cycle_weight(c, ones) for c in got] == [2, 3]
    with pytest.raises(PreconditionError):
        complete_base_cycles(4, ones, 2)


def test_lift_identity_matches_base():
    K5 = bidirected_complete(5)
    w = random_weights(K5, 2)
    assert lift_pack(identity_model(K5), w, 2) == complete_base_cycles(5, w, 2)


def test_lift_through_one_subdivision():
    K5 = bidirected_complete(5)
    arcs = [a for a in K5.arcs if a != (0, 1)] + [(0, 5), (5, 1)]
    D = build(6, arcs)
    M = MinorModel(D, (Op("ca", (5, 1), "tail"),), {v: v for v in range(5)})
    w = {a: Fraction(1) for a in D.arcs}
    w[(0, 5)], w[(5, 1)] = Fraction(1, 2), Fraction(1, 2)
    cycles = lift_pack(M, w, 2, audit=True)
    through = [c for c in cycles if 5 in c]
    assert through and all(cycle_weight(c, w) in (2, 3) for c in cycles)
    assert len(through[0]) == 3  # the digon 0,1 became 0,5,1


def test_lift_unit_weights_changes_lengths_not_weights():
    M = expansion_model(5, 8)
    cycles = lift_pack(M, None, 2, audit=True)
    assert verify_packing(M.source, CyclePacking(tuple(cycles), "distinct-weights",
                                                 {a: Fraction(1) for a in M.source.arcs}))


def test_distinct_length_examples():
    K5 = bidirected_complete(5)
    assert sorted(map(len, distinct_length_pack_via_minor(K5, identity_model(K5), 2))) == [2, 3]
    K9 = bidirected_complete(9)
    cycles = distinct_length_pack_via_minor(K9, identity_model(K9), 3)
    assert verify_packing(K9, CyclePacking(tuple(cycles)))
    M = expansion_model(9, 3)
    cycles = distinct_length_pack_via_minor(M.source, M, 3)
    assert verify_packing(M.source, CyclePacking(tuple(cycles))) and len(cycles) == 3


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(5, 7))
def test_lift_is_weight_exact(seed, t):
    M = expansion_model(t, seed, 30)
    w = random_weights(M.source, seed)
    cycles = lift_pack(M, w, 2, audit=True)
    assert verify_packing(M.source, CyclePacking(tuple(cycles), "distinct-weights", w))


@settings(max_examples=80)
@given(digraphs(min_n=3), st.integers(0, 10**6))
def test_contract_preserves_walk_weights(D, seed):
    rng = random.Random(seed)
    ok = [(u, v) for u, v in D.arcs if D.out_degree(u) == 1 or D.in_degree(v) == 1]
    if not ok:
        return
    e = rng.choice(ok)
    w = {a: Fraction(rng.randint(1, 9), rng.randint(1, 4)) for a in D.arcs}
    S = State.of(D, w)
    rec = contract_state(S, e)
    for a, x in S.weights.items():
        if a in rec.synthesized:
            p = rec.synthesized[a]
            assert x == w[(p[0], p[1])] + w[(p[1], p[2])]
        else:
            assert x == w[a]
    # a random walk in the contracted digraph expands to a walk of equal weight in D
    if not S.weights:
        return
    v = rng.choice(sorted({a[0] for a in S.weights}))
    walk, total = [v], Fraction(0)
    for _ in range(6):
        outs = [b for (a, b) in S.weights if a == walk[-1]]
        if not outs:
            break
        nxt = rng.choice(sorted(outs))
        total += S.weights[(walk[-1], nxt)]
        walk.append(nxt)
    expanded = []
    for a, b in zip(walk, walk[1:]):
        expanded += list(rec.synthesized.get((a, b), (a, b)))[:-1]
    expanded.append(walk[-1])
    assert total == sum(w[(a, b)] for a, b in zip(expanded, expanded[1:]))
    assert rec.removed not in walk
