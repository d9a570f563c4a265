"""The ten acceptance checks, shared by ``dicycles selftest`` and the test suite.

Each check returns a :class:`Result`; none of them raises on a failed
property, so a run always reports every criterion.
"""

from __future__ import annotations

import random
import time
import traceback
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable

from .core import (Digraph, build, canonical_cycle, cycle_arcs, cycle_weight, delete,
                   is_strongly_connected)
from .dtd import (DirectedTreeDecomposition, ExactOracle, bounded_width_pack, ep_pack_or_hit,
                  validate_dtd)
from .flatwall import (FlatContext, intersection_violations, nonstrong_case_pack,
                       strong_case_pack, weak_flat_check)
from .gen import CASES, gen_complete, gen_D, gen_F, gen_flat_instance, gen_layered, gen_nonstrong_instance
from .minors import complete_base_cycles, expansion_model, lift_pack, random_weights
from .oracle import (CyclePacking, brute_train_exists, enum_cycles, no_equal_length_arcdisjoint,
                     sample_cycles, vertex_connectivity, verify_packing)
from .trains import find_k_train, is_train, pairwise_disjoint, train_cycles
from .walls import (equal_length_dag_check, gen_equal_length_wall, gen_wall, validate_wall,
                    wrap_paths)


@dataclass
class Result:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "ok": self.ok,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


class _Fail(Exception):
    pass


def _need(cond: bool, msg: str):
    if not cond:
        raise _Fail(msg)


# --- 1 ---------------------------------------------------------------------


def equal_length_wall() -> str:
    W, L = gen_equal_length_wall(2)
    _need(L == 16, f"k=2 gave L={L}")
    _need(bool(validate_wall(W)), "k=2 wall invalid")
    first_arcs = {(p[0], p[1]) for p in wrap_paths(W)}
    cycles = enum_cycles(W.host)
    for c in cycles:
        _need(len(c) == 16, f"cycle of length {len(c)}")
        used = sum(1 for a in cycle_arcs(c) if a in first_arcs)
        _need(used == 1, f"cycle {c} uses {used} wrap paths")
    W3, L3 = gen_equal_length_wall(3)
    _need(L3 == 36, f"k=3 gave L={L3}")
    _need(bool(validate_wall(W3)), "k=3 wall invalid")
    chk = equal_length_dag_check(W3, L3)
    _need(bool(chk), f"k=3: {chk.reason}")
    return f"k=2: {len(cycles)} cycles all of length 16; k=3: DAG check L=36"


# --- 2 ---------------------------------------------------------------------


def dk_construction() -> str:
    D1, t1 = gen_D(1, 2)
    rep = no_equal_length_arcdisjoint(D1, table=t1)
    _need(rep.exhaustive == "verified", f"gen_D(1,2) exhaustive: {rep.exhaustive}")
    _need(vertex_connectivity(D1, 1) >= 1, "gen_D(1,2) not strongly connected")
    D2, t2 = gen_D(2, 256)
    _need(D2.n == 1024, f"gen_D(2,256) has {D2.n} vertices")
    _need(is_strongly_connected(D2), "gen_D(2,256) not strongly connected")
    for v in D2.vertices:
        _need(is_strongly_connected(D2, {v}), f"deleting {v} breaks strong connectivity")
    _need(t2.subset_sums_distinct(), "forward lengths have a repeated subset sum")
    lengths = t2.lengths()
    _need(len(lengths) == 8, f"{len(lengths)} forward arcs")
    cycles = sample_cycles(D2, 1000, seed=0)
    _need(len(cycles) == 1000, f"only {len(cycles)} cycles sampled")
    for c in cycles:
        total = sum(lengths.get(a, 0) for a in cycle_arcs(c))
        _need(total == len(c), f"cycle of length {len(c)} has forward sum {total}")
    return (f"D(1,2): {rep.cycles_checked} cycles exhaustive; D(2,256): 1024 deletions strong, "
            f"2^8 sums distinct, 1000 cycles audited")


# --- 3 ---------------------------------------------------------------------


def fk_width() -> str:
    for k in (1, 2, 3):
        D, dec = gen_F(k)
        _need(D.min_out_degree() == k, f"F_{k} has min out-degree {D.min_out_degree()}")
        chk = validate_dtd(D, dec)
        _need(bool(chk), f"F_{k} decomposition: {chk.reason}")
        _need(chk.width == 1, f"F_{k} width {chk.width}")
    return "k=1,2,3: min out-degree k, width 1"


# --- 4 ---------------------------------------------------------------------


def _random_rational_weights(D: Digraph, rng: random.Random) -> dict:
    return {a: Fraction(rng.randint(1, 50), rng.randint(1, 12)) for a in D.arcs}


def complete_minor() -> str:
    K5 = gen_complete(5)
    all_cycles = {canonical_cycle(c) for c in enum_cycles(K5)}
    for seed in range(100):
        w = _random_rational_weights(K5, random.Random(seed))
        got = complete_base_cycles(5, w, 2)
        _need(len(got) == 2, f"seed {seed}: {len(got)} cycles")
        good = {
            frozenset((a, b)) for a, b in combinations(sorted(all_cycles), 2)
            if not set(a) & set(b) and cycle_weight(a, w) != cycle_weight(b, w)
        }
        pair = frozenset(canonical_cycle(c) for c in got)
        _need(pair in good, f"seed {seed}: {got} not among {len(good)} valid pairs")
    K9 = gen_complete(9)
    ones = {a: Fraction(1) for a in K9.arcs}
    got = complete_base_cycles(9, ones, 3)
    chk = verify_packing(K9, CyclePacking(tuple(got)))
    _need(bool(chk) and len(got) == 3, f"K_9: {chk.reason or got}")
    return f"K_5: 100 weightings match brute force ({len(all_cycles)} cycles); K_9: lengths {sorted(map(len, got))}"


# --- 5 ---------------------------------------------------------------------


def butterfly_lifting() -> str:
    ops = 0
    for seed in range(50):
        M = expansion_model(5, seed, 30)
        ops += len(M.ops)
        w = random_weights(M.source, seed)
        cycles = lift_pack(M, w, 2, audit=True)
        chk = verify_packing(M.source, CyclePacking(tuple(cycles), "distinct-weights", w))
        _need(bool(chk), f"seed {seed}: {chk.reason}")
    return f"50 models ({ops} ops) lifted with per-step weight audit"


# --- 6 ---------------------------------------------------------------------


def _chain_instance(rng: random.Random):
    sizes = [rng.randint(1, 3) for _ in range(rng.randint(2, 5))]
    blocks, n = [], 0
    for s in sizes:
        blocks.append(list(range(n, n + s)))
        n += s
    arcs = set()
    for b in blocks:
        if len(b) > 1:
            arcs.update(zip(b, b[1:] + b[:1]))
            if len(b) == 3 and rng.random() < 0.5:
                arcs.update(zip(b[1:] + b[:1], b))
    for i, j in combinations(range(len(blocks)), 2):
        if rng.random() < 0.5:
            arcs.add((rng.choice(blocks[i]), rng.choice(blocks[j])))
    D = build(n, sorted(arcs))
    parent = {0: None, **{i: i - 1 for i in range(1, len(blocks))}}
    dec = DirectedTreeDecomposition(parent, {i: frozenset(b) for i, b in enumerate(blocks)},
                                    {(i - 1, i): frozenset() for i in range(1, len(blocks))})
    return D, dec


def _tree_instance(rng: random.Random):
    n = rng.randint(3, 14)
    parent = {0: None}
    anc = {0: ()}
    for v in range(1, n):
        p = rng.randrange(v)
        parent[v] = p
        anc[v] = anc[p] + (p,)
    arcs = {(p, c) for c, p in parent.items() if p is not None}
    for v in range(1, n):
        for a in anc[v]:
            if rng.random() < 0.6:
                arcs.add((v, a))
    D = build(n, sorted(arcs))
    dec = DirectedTreeDecomposition(parent, {v: frozenset({v}) for v in range(n)},
                                    {(p, c): frozenset({p}) for c, p in parent.items() if p is not None})
    return D, dec


def _guarded_instance(rng: random.Random):
    n = rng.randint(4, 12)
    arcs = {(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 2.5 / n}
    D = build(n, sorted(arcs))
    nodes = rng.randint(2, n)
    parent = {0: None, **{t: rng.randrange(t) for t in range(1, nodes)}}
    order = list(range(n))
    rng.shuffle(order)
    bags = {t: set() for t in range(nodes)}
    for i, v in enumerate(order):
        bags[i if i < nodes else rng.randrange(nodes)].add(v)
    bags = {t: frozenset(b) for t, b in bags.items()}
    proto = DirectedTreeDecomposition(parent, bags, {})
    guards = {}
    for c, p in parent.items():
        if p is None:
            continue
        below = proto.below(c)
        guards[(p, c)] = frozenset(u for v in below for u in D.inn[v] if u not in below)
    return D, DirectedTreeDecomposition(parent, bags, guards)


def ep_corpus(seed: int = 0, size: int = 60) -> list[tuple[str, Digraph, DirectedTreeDecomposition, int]]:
    """Small digraphs with decompositions of width <= 2, each validated."""
    rng = random.Random(seed)
    corpus = []
    digons = build(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
    fixed = [("two-digons", digons, DirectedTreeDecomposition(
        {0: None, 1: 0}, {0: frozenset({0, 1}), 1: frozenset({2, 3})}, {(0, 1): frozenset()}))]
    five = build(5, [(i, (i + 1) % 5) for i in range(5)])
    fixed.append(("five-cycle", five, DirectedTreeDecomposition(
        {0: None, **{i: i - 1 for i in range(1, 5)}}, {i: frozenset({i}) for i in range(5)},
        {(i - 1, i): frozenset({0}) for i in range(1, 5)})))
    for name, D, dec in fixed:
        corpus.append((name, D, dec, validate_dtd(D, dec).width))
    makers = [("chain", _chain_instance), ("tree", _tree_instance), ("guarded", _guarded_instance)]
    attempts = 0
    while len(corpus) < size and attempts < 100 * size:
        attempts += 1
        name, make = makers[len(corpus) % 3]
        D, dec = make(rng)
        chk = validate_dtd(D, dec)
        if chk and chk.width <= 2 and D.n <= 14:
            corpus.append((f"{name}-{attempts}", D, dec, chk.width))
    return corpus


def erdos_posa() -> str:
    oracle = ExactOracle()
    runs = packs = 0
    for name, D, dec, d in ep_corpus():
        _need(bool(validate_dtd(D, dec)), f"{name}: decomposition invalid")
        for k in (1, 2):
            for ell in (1, 2, 3):
                runs += 1
                res = ep_pack_or_hit(D, dec, k, ell, oracle)
                tag = f"{name} k={k} l={ell}"
                if res.kind == "pack":
                    packs += 1
                    _need(len(res.trains) == ell, f"{tag}: {len(res.trains)} trains")
                    for T in res.trains:
                        _need(T.k == k and bool(is_train(D, T)), f"{tag}: invalid train")
                    _need(pairwise_disjoint(T.vertices for T in res.trains) is None, f"{tag}: overlap")
                else:
                    X = res.hitting_set
                    _need(len(X) <= (d + 1) * (ell - 1), f"{tag}: |X|={len(X)} > {(d + 1) * (ell - 1)}")
                    H, _ = delete(D, X)
                    _need(brute_train_exists(H, k) is False, f"{tag}: D-X still has a {k}-train")
    return f"{runs} runs, {packs} packs, {runs - packs} hits, all satisfy the dichotomy"


# --- 7 ---------------------------------------------------------------------


def bounded_width() -> str:
    parts = []
    for k, delta in ((2, 4), (3, 7)):
        D, dec = gen_layered(delta)
        _need(D.min_out_degree() > 3 * (k - 1), f"k={k}: min out-degree too small")
        chk = validate_dtd(D, dec)
        _need(bool(chk) and chk.width == 1, f"k={k}: decomposition {chk.reason or chk.width}")
        cycles = bounded_width_pack(D, dec, k)
        v = verify_packing(D, CyclePacking(tuple(cycles)))
        _need(bool(v) and len(cycles) == k, f"k={k}: {v.reason or len(cycles)}")
        parts.append(f"k={k} on {D.n} vertices lengths {sorted(map(len, cycles))}")
    return "; ".join(parts)


# --- 8 ---------------------------------------------------------------------


def flat_pipelines() -> str:
    times = []
    for k in (1, 2, 3):
        start = time.perf_counter()
        for case in CASES:
            inst = gen_flat_instance(k, case, seed=k)
            ctx = inst.ctx
            _need(inst.W.m == 3 * k + 2, f"k={k}: wall order {inst.W.m}")
            fc = weak_flat_check(ctx)
            _need(bool(fc), f"k={k} case {case}: {fc.reason}")
            res = strong_case_pack(ctx, k)
            v = verify_packing(inst.D, CyclePacking(tuple(res.cycles)))
            _need(bool(v) and len(res.cycles) == k, f"k={k} case {case}: {v.reason or len(res.cycles)}")
        took = time.perf_counter() - start
        _need(took < 60, f"k={k} took {took:.0f}s")
        times.append(took)
    inst = gen_nonstrong_instance("2", "5", seed=3)
    _need(bool(weak_flat_check(inst.ctx)), "nonstrong fixture not weakly flat")
    res = nonstrong_case_pack(inst.ctx)
    v = verify_packing(inst.D, CyclePacking(tuple(res.cycles)))
    _need(bool(v) and len(res.cycles) == 3, f"nonstrong: {v.reason or len(res.cycles)}")
    return f"k=1,2,3 x {len(CASES)} cases packed (max {max(times):.1f}s per k); order-8 nonstrong packed"


# --- 9 ---------------------------------------------------------------------


def intersection_fixtures():
    for k in (1, 2, 3):
        for case in CASES:
            yield f"flat k={k} case {case}", gen_flat_instance(k, case, seed=k).ctx
    for c1, c2 in (("1", "1"), ("2", "5"), ("dense", "3"), ("6", "dense")):
        yield f"nonstrong {c1}/{c2}", gen_nonstrong_instance(c1, c2, seed=1).ctx
    for m in (3, 5, 8):
        W = gen_wall(m)
        yield f"bare wall {m}", FlatContext(W.host, W)


def intersection_properties() -> str:
    count = 0
    for name, ctx in intersection_fixtures():
        bad = intersection_violations(ctx)
        _need(not bad, f"{name}: {bad[:3]}")
        count += 1
    return f"{count} fixtures, zero violations"


# --- 10 --------------------------------------------------------------------


def random_min_degree_digraph(k: int, rng: random.Random) -> Digraph:
    n = rng.randint(k + 1, 30)
    arcs = set()
    for v in range(n):
        others = [u for u in range(n) if u != v]
        for u in rng.sample(others, min(len(others), rng.randint(k, k + 3))):
            arcs.add((v, u))
    return build(n, sorted(arcs))


def train_extraction() -> str:
    for k in range(1, 6):
        rng = random.Random(1000 + k)
        for i in range(200):
            D = random_min_degree_digraph(k, rng)
            _need(D.min_out_degree() >= k, f"k={k} #{i}: generator broke the degree bound")
            T = find_k_train(D, k)
            _need(T.k == k, f"k={k} #{i}: train has {T.k} back arcs")
            chk = is_train(D, T)
            _need(bool(chk), f"k={k} #{i}: {chk.reason}")
            lengths = [len(c) for c in train_cycles(T)]
            _need(len(set(lengths)) == k, f"k={k} #{i}: lengths {lengths}")
    return "1000 digraphs, every train valid with distinct cycle lengths"


CRITERIA: list[tuple[int, str, Callable[[], str]]] = [
    (1, "equal-length wall", equal_length_wall),
    (2, "D_k construction", dk_construction),
    (3, "F_k degree and width", fk_width),
    (4, "complete-minor packing", complete_minor),
    (5, "butterfly lifting", butterfly_lifting),
    (6, "pack-or-hit dichotomy", erdos_posa),
    (7, "bounded-width packing", bounded_width),
    (8, "flat-wall pipelines", flat_pipelines),
    (9, "intersection properties", intersection_properties),
    (10, "train extraction", train_extraction),
]


# wall-clock limits in seconds; criterion 8 checks its per-k limit itself
TIME_LIMITS = {1: 30.0, 2: 120.0}


def run_one(number: int) -> Result:
    _, name, fn = next(c for c in CRITERIA if c[0] == number)
    start = time.perf_counter()
    try:
        detail, ok = fn(), True
    except _Fail as exc:
        detail, ok = str(exc), False
    except Exception as exc:  # a crash counts as a failure, with its location
        tb = traceback.extract_tb(exc.__traceback__)[-1]
        detail, ok = f"{type(exc).__name__}: {exc} at {tb.name}:{tb.lineno}", False
    took = time.perf_counter() - start
    limit = TIME_LIMITS.get(number)
    if ok and limit is not None and took > limit:
        detail, ok = f"took {took:.1f}s, limit {limit:.0f}s", False
    return Result(number, name, ok, detail, took)


def run_all(numbers=None) -> list[Result]:
    return [run_one(n) for n, _, _ in CRITERIA if numbers is None or n in numbers]
