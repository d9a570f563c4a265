"""Deterministic constructors for the digraph families, each with its certificate."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .core import Digraph, PreconditionError, build
from .dtd import DirectedTreeDecomposition
from .flatwall import (NONSTRONG_W1, NONSTRONG_W2, FlatContext, Local, strong_positions,
                       technical_train)
from .oracle import distinct_subset_sums
from .walls import (WallModel, brick_corners, gen_equal_length_wall, gen_grid, gen_wall,
                    reverse_wall)


def gen_complete(t: int) -> Digraph:
    if t < 1:
        raise PreconditionError("complete digraph needs t >= 1")
    return build(t, [(a, b) for a in range(t) for b in range(t) if a != b])


def _tree_with_back_arcs(fanout: Sequence[int], internal_back: bool):
    """Out-arborescence where nodes at depth d have fanout[d] children; back arcs go to all ancestors.

    Leaves always send back arcs; internal nodes only when ``internal_back``.
    Returns the digraph and its width-1 decomposition (singleton bags, parent guards).
    """
    parent: dict[int, int | None] = {0: None}
    ancestors = {0: ()}
    level = [0]
    n = 1
    for f in fanout:
        nxt = []
        for p in level:
            for _ in range(f):
                parent[n] = p
                ancestors[n] = ancestors[p] + (p,)
                nxt.append(n)
                n += 1
        level = nxt
    leaves = set(level)
    arcs = [(p, c) for c, p in parent.items() if p is not None]
    for v, anc in ancestors.items():
        if v in leaves or internal_back:
            arcs.extend((v, a) for a in anc)
    labels = {v: f"depth {len(a)}" for v, a in ancestors.items()}
    D = build(n, arcs, labels)
    dec = DirectedTreeDecomposition(
        dict(parent),
        {v: frozenset({v}) for v in range(n)},
        {(p, c): frozenset({p}) for c, p in parent.items() if p is not None},
    )
    return D, dec


def gen_F(k: int) -> tuple[Digraph, DirectedTreeDecomposition]:
    """k-ary out-arborescence of depth k plus arcs from every leaf to all its ancestors."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    return _tree_with_back_arcs([k] * k, internal_back=False)


def gen_layered(delta: int) -> tuple[Digraph, DirectedTreeDecomposition]:
    """Width-1 digraph with out-degree exactly delta everywhere.

    A node at depth d < delta has max(1, delta - d) children and every node
    sends arcs to all its ancestors.
    """
    if delta < 1:
        raise PreconditionError("delta must be >= 1")
    return _tree_with_back_arcs([max(1, delta - d) for d in range(delta)], internal_back=True)


# --- layered digraphs without equal-length arc-disjoint cycles ------------


@dataclass(frozen=True)
class ForwardArcTable:
    k: int
    N: int
    e: dict  # (i, j) -> arc from u_i
    f: dict  # (i, j) -> arc into w_i

    def a(self, ell: int) -> int:
        return self.N + 2 ** (ell - 1)

    def b(self, ell: int) -> int:
        return self.N + 2 ** (self.k ** 2 + ell - 1)

    def lengths(self) -> dict:
        k = self.k
        out = {arc: self.a(k * (i - 1) + j) for (i, j), arc in self.e.items()}
        out.update({arc: self.b(k * (i - 1) + j) for (i, j), arc in self.f.items()})
        return out

    def symbolic_distinct(self) -> bool:
        """Subset sums differ when N exceeds every sum of distinct powers 2^0..2^(2k^2-1)."""
        return self.N >= 2 ** (2 * self.k ** 2)

    def subset_sums_distinct(self, exhaustive_limit: int = 20) -> bool:
        exact = distinct_subset_sums(sorted(self.lengths().values()), exhaustive_limit)
        return self.symbolic_distinct() if exact is None else exact

    def to_json(self) -> dict:
        return {"k": self.k, "N": self.N,
                "e": [[i, j, *arc] for (i, j), arc in sorted(self.e.items())],
                "f": [[i, j, *arc] for (i, j), arc in sorted(self.f.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "ForwardArcTable":
        return cls(int(data["k"]), int(data["N"]),
                   {(i, j): (u, v) for i, j, u, v in data["e"]},
                   {(i, j): (u, v) for i, j, u, v in data["f"]})


def gen_D(k: int, N: int | None = None) -> tuple[Digraph, ForwardArcTable]:
    """Layers V_1..V_2N of k vertices each, all arcs from V_l to V_(l-1), plus forward arcs.

    Vertex j (0-based) of layer l has id (l-1)k + j.  A forward arc from layer
    s to layer t has length t - s + 1, the length of the cycle it closes.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if N is None:
        N = 4 ** (k * k)
    if N < 2 ** (2 * k * k - 1):
        raise PreconditionError(f"N={N} is below 2^(2k^2-1) = {2 ** (2 * k * k - 1)}")
    layers = 2 * N
    vid = lambda layer, j: (layer - 1) * k + j
    arcs = []
    for layer in range(2, layers + 1):
        arcs.extend((vid(layer, x), vid(layer - 1, y)) for x in range(k) for y in range(k))
    table = ForwardArcTable(k, N, {}, {})
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            ell = k * (i - 1) + j
            e = (vid(1, i - 1), vid(table.a(ell), 0))
            f = (vid(layers - table.b(ell) + 1, 0), vid(layers, i - 1))
            table.e[(i, j)] = e
            table.f[(i, j)] = f
            arcs += [e, f]
    labels = {vid(layer, j): f"V{layer}.{j}" for layer in (1, layers) for j in range(k)}
    return build(layers * k, arcs, labels), table


# --- flat-wall fixtures ---------------------------------------------------

CASES = ("1", "2", "3", "4", "5", "6", "dense")


@dataclass(frozen=True)
class FlatInstance:
    D: Digraph
    W: WallModel
    ws: tuple[int, ...]
    k: int
    case: str

    @property
    def ctx(self) -> FlatContext:
        return FlatContext(self.D, self.W)


def _brick_arcs(m: int, spots: Sequence[tuple[int, int]]) -> set:
    out = set()
    for corners in brick_corners(m):
        cs = set(corners)
        if not any(s in cs for s in spots):
            continue
        for a in cs:
            for b in cs:
                out.add((a, b))
    return out


def _wall_for(m: int, spots, k: int) -> WallModel:
    near = _brick_arcs(m, spots)
    s = max(2, 6 * k - 4)
    return gen_wall(m, lambda a: s if a in near else 1)


class _Builder:
    def __init__(self, W: WallModel):
        self.n = W.host.n
        self.arcs = set(W.host.arcs)
        self.labels = dict(W.host.labels)

    def vertex(self, label: str) -> int:
        v = self.n
        self.labels[v] = label
        self.n += 1
        return v

    def add(self, a, b, flip: bool):
        self.arcs.add((b, a) if flip else (a, b))


def _gadget(B: _Builder, view: WallModel, coord, k: int, case: str, rng: random.Random,
            flip: bool, tag: str):
    """Attach a case gadget at the branch vertex ``coord`` of ``view``.

    Arcs are produced in the orientation of ``view`` and reversed when ``flip``.
    """
    loc = Local(view, *coord)
    w = loc.u[0]
    paths = {j: loc.path(j) for j in range(1, 7)}
    pool = sorted(set().union(*paths.values()) - {w})
    out_of = lambda v: {b for a, b in B.arcs if a == v} if not flip else {a for a, b in B.arcs if b == v}
    if case == "dense":
        size = 2 * k + 1
        gs = [B.vertex(f"{tag}g{i}") for i in range(size)]
        for g in gs:
            for h in gs:
                if g != h:
                    B.add(g, h, flip)
            for v in rng.sample(pool, max(5 * k - 5, 1)):
                B.add(g, v, flip)
        B.add(w, gs[0], flip)
    else:
        j = int(case)
        earlier = set().union(*(paths[i] for i in range(1, j))) if j > 1 else set()
        exclusive = [v for v in paths[j] if v != w and v not in earlier]
        if len(exclusive) < 6 * k - 5:
            raise PreconditionError(f"path {j} has only {len(exclusive)} exclusive vertices")
        x = B.vertex(f"{tag}x")
        B.add(w, x, flip)
        B.add(x, w, flip)
        for v in rng.sample(exclusive, 6 * k - 5):
            B.add(x, v, flip)
        if k >= 2:
            zs = [B.vertex(f"{tag}z{i}") for i in range(k + 1)]
            for z in zs:
                for h in zs:
                    if z != h:
                        B.add(z, h, flip)
                for v in rng.sample(pool, 6 * k - 5):
                    B.add(z, v, flip)
            for z in zs[:k - 1]:
                B.add(x, z, flip)
    have = out_of(w)
    spare = [v for v in pool if v not in have]
    need = 7 * k - 5 - len(have)
    for v in rng.sample(spare, max(0, need)):
        B.add(w, v, flip)
    return w


def _expect(trace, case: str):
    got = "dense" if trace.branch == 2 else str(trace.case)
    if got != case:
        raise PreconditionError(f"fixture resolved to case {got}, wanted {case}")


def gen_flat_instance(k: int, case: str = "1", seed: int = 0) -> FlatInstance:
    """Wall of order 3k+2 with a gadget at each (6i-1, 2) forcing the requested train case."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    case = str(case)
    if case not in CASES:
        raise PreconditionError(f"unknown case {case!r}")
    m = 3 * k + 2
    spots = strong_positions(k)
    W = _wall_for(m, spots, k)
    B = _Builder(W)
    rng = random.Random(seed)
    ws = tuple(_gadget(B, W, c, k, case, rng, False, f"w{i + 1}.") for i, c in enumerate(spots))
    D = build(B.n, sorted(B.arcs), B.labels)
    inst = FlatInstance(D, W.with_host(D), ws, k, case)
    ctx = inst.ctx
    for w in ws:
        _expect(technical_train(ctx, w, k), case)
    return inst


def gen_nonstrong_instance(case1: str = "1", case2: str = "1", seed: int = 0,
                           gadgets: tuple[bool, bool] = (True, True)) -> FlatInstance:
    """Order-8 wall with a forward gadget at (5,2) and a reverse gadget at (11,3), both for k=3."""
    k, m = 3, 8
    W = _wall_for(m, [NONSTRONG_W1, NONSTRONG_W2], k)
    R = reverse_wall(W)
    B = _Builder(W)
    rng = random.Random(seed)
    ws = [W.coord[NONSTRONG_W1], W.coord[NONSTRONG_W2]]
    if gadgets[0]:
        _gadget(B, W, NONSTRONG_W1, k, str(case1), rng, False, "w1.")
    if gadgets[1]:
        c, r = NONSTRONG_W2
        _gadget(B, R, (c, 2 * m + 1 - r), k, str(case2), rng, True, "w2.")
    D = build(B.n, sorted(B.arcs), B.labels)
    inst = FlatInstance(D, W.with_host(D), tuple(ws), k, f"{case1}/{case2}")
    ctx = inst.ctx
    if gadgets[0]:
        _expect(technical_train(ctx, ws[0], k), str(case1))
    if gadgets[1]:
        _expect(technical_train(ctx, ws[1], k, "reverse"), str(case2))
    return inst


__all__ = [
    "gen_complete", "gen_grid", "gen_wall", "gen_F", "gen_layered", "gen_D", "ForwardArcTable",
    "gen_equal_length_wall", "gen_flat_instance", "gen_nonstrong_instance", "FlatInstance", "CASES",
]
