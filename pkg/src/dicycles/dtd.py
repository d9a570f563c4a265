"""Directed tree decompositions, havens, and the pack-or-hit recursion for k-trains."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Mapping, Protocol

from .core import (Check, Cycle, DefectError, Digraph, PreconditionError,
                   induced, reach_set)
from .oracle import brute_find_train
from .trains import KTrain, find_k_train, is_train, pairwise_disjoint, select_distinct

TreeArc = tuple[int, int]


@dataclass(frozen=True)
class DirectedTreeDecomposition:
    """Out-arborescence given by ``parent`` (root maps to None), bags and guards.

    ``guards`` is keyed by tree arcs ``(parent, child)``; missing arcs mean an
    empty guard.
    """

    parent: Mapping[int, int | None]
    bags: Mapping[int, frozenset[int]]
    guards: Mapping[TreeArc, frozenset[int]] = field(default_factory=dict)

    @property
    def nodes(self) -> list[int]:
        return sorted(self.bags)

    @property
    def root(self) -> int:
        roots = [t for t in self.nodes if self.parent.get(t) is None]
        if len(roots) != 1:
            raise PreconditionError(f"decomposition has {len(roots)} roots")
        return roots[0]

    def children(self, t: int) -> list[int]:
        return sorted(c for c, p in self.parent.items() if p == t)

    def tree_arcs(self) -> list[TreeArc]:
        return sorted((p, c) for c, p in self.parent.items() if p is not None)

    def guard(self, arc: TreeArc) -> frozenset[int]:
        return self.guards.get(arc, frozenset())

    def subtree(self, t: int) -> list[int]:
        out, stack = [], [t]
        kids = self._kids()
        while stack:
            s = stack.pop()
            out.append(s)
            stack.extend(kids.get(s, ()))
        return sorted(out)

    def below(self, t: int) -> frozenset[int]:
        """beta(>= t): union of the bags in the subtree at t."""
        return frozenset().union(*(self.bags[s] for s in self.subtree(t)))

    def depth(self, t: int) -> int:
        d = 0
        while self.parent.get(t) is not None:
            t = self.parent[t]
            d += 1
        return d

    def gamma(self, t: int) -> frozenset[int]:
        out = set(self.bags[t])
        p = self.parent.get(t)
        if p is not None:
            out |= self.guard((p, t))
        for c in self._kids().get(t, ()):
            out |= self.guard((t, c))
        return frozenset(out)

    def width(self) -> int:
        return max(len(self.gamma(t)) for t in self.nodes) - 1

    @cached_property
    def _kid_map(self) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {}
        for c, p in self.parent.items():
            if p is not None:
                kids.setdefault(p, []).append(c)
        return kids

    def _kids(self) -> dict[int, list[int]]:
        return self._kid_map

    def to_json(self) -> dict:
        nodes = []
        for t in self.nodes:
            entry = {"id": t, "bag": sorted(self.bags[t])}
            if self.parent.get(t) is not None:
                entry["parent"] = self.parent[t]
            nodes.append(entry)
        guards = [{"arc": list(a), "set": sorted(self.guard(a))} for a in self.tree_arcs()]
        return {"nodes": nodes, "guards": guards}

    @classmethod
    def from_json(cls, data: dict) -> "DirectedTreeDecomposition":
        parent = {int(n["id"]): n.get("parent") for n in data["nodes"]}
        bags = {int(n["id"]): frozenset(n["bag"]) for n in data["nodes"]}
        guards = {tuple(g["arc"]): frozenset(g["set"]) for g in data.get("guards", [])}
        return cls(parent, bags, guards)


def trivial_decomposition(D: Digraph) -> DirectedTreeDecomposition:
    return DirectedTreeDecomposition({0: None}, {0: frozenset(D.vertices)}, {})


@dataclass(frozen=True)
class DtdCheck(Check):
    width: int | None = None


def z_normal(D: Digraph, S: Iterable[int], Z: Iterable[int]) -> bool:
    """No walk in D - Z leaves S and comes back."""
    S, Z = set(S), set(Z)
    if S & Z:
        raise PreconditionError("S and Z overlap")
    # A walk leaving S and returning first exits S at an out-neighbour that
    # can reach S again, so it suffices to test out-neighbours of S.
    bwd = reach_set(D, S, Z, "backward") - S
    if not bwd:
        return True
    return not any(w in bwd for v in S for w in D.out[v])


def validate_dtd(D: Digraph, dec: DirectedTreeDecomposition) -> DtdCheck:
    nodes = dec.nodes
    if not nodes:
        return DtdCheck(False, "decomposition has no nodes")
    if set(dec.parent) != set(nodes):
        return DtdCheck(False, "parent map and bags disagree on the node set")
    roots = [t for t in nodes if dec.parent[t] is None]
    if len(roots) != 1:
        return DtdCheck(False, f"expected one root, found {len(roots)}")
    for t in nodes:
        seen = {t}
        s = t
        while dec.parent[s] is not None:
            s = dec.parent[s]
            if s not in dec.bags:
                return DtdCheck(False, f"node {t} has unknown ancestor {s}")
            if s in seen:
                return DtdCheck(False, f"parent map has a cycle through {t}")
            seen.add(s)
    owner: dict[int, int] = {}
    for t in nodes:
        if not dec.bags[t]:
            return DtdCheck(False, f"bag of node {t} is empty")
        for v in dec.bags[t]:
            if not 0 <= v < D.n:
                return DtdCheck(False, f"bag of node {t} holds unknown vertex {v}")
            if v in owner:
                return DtdCheck(False, f"vertex {v} lies in bags {owner[v]} and {t}")
            owner[v] = t
    if len(owner) != D.n:
        missing = min(set(D.vertices) - set(owner))
        return DtdCheck(False, f"vertex {missing} is in no bag")
    arcs = set(dec.tree_arcs())
    for a in dec.guards:
        if a not in arcs:
            return DtdCheck(False, f"guard on {a}, which is not a tree arc")
    for a in sorted(arcs):
        S = dec.below(a[1])
        Z = dec.guard(a)
        if S & Z:
            return DtdCheck(False, f"guard of arc {a} meets the subtree below it")
        if not z_normal(D, S, Z):
            return DtdCheck(False, f"subtree below arc {a} is not normal for its guard")
    return DtdCheck(True, "", dec.width())


def restrict_subtree(dec: DirectedTreeDecomposition, t0: int) -> DirectedTreeDecomposition | None:
    """Drop the subtree at t0 and strip its vertices from the remaining guards."""
    gone_nodes = set(dec.subtree(t0))
    if dec.parent.get(t0) is None:
        return None
    gone = dec.below(t0)
    parent = {t: p for t, p in dec.parent.items() if t not in gone_nodes}
    bags = {t: b for t, b in dec.bags.items() if t not in gone_nodes}
    guards = {a: g - gone for a, g in dec.guards.items() if a[1] not in gone_nodes}
    return DirectedTreeDecomposition(parent, bags, guards)


def restrict(dec: DirectedTreeDecomposition, keep: Iterable[int]) -> DirectedTreeDecomposition | None:
    """Decomposition of D[keep]: intersect bags and guards, contract empty-bag nodes upward.

    Validity is preserved; the width may grow when an empty internal node is
    contracted (its child guards move to the parent).
    """
    keep = set(keep)
    parent = dict(dec.parent)
    bags = {t: frozenset(b & keep) for t, b in dec.bags.items()}
    guards = {a: frozenset(g & keep) for a, g in dec.guards.items()}
    for t in sorted(bags, key=lambda s: -dec.depth(s)):
        if bags[t]:
            continue
        p = parent[t]
        kids = [c for c, q in parent.items() if q == t]
        if p is None:
            if not kids:
                del bags[t], parent[t]
                continue
            # promote the first child; its siblings hang below it
            new_root = kids[0]
            parent[new_root] = None
            guards.pop((t, new_root), None)
            for c in kids[1:]:
                parent[c] = new_root
                guards[(new_root, c)] = guards.pop((t, c), frozenset())
        else:
            for c in kids:
                parent[c] = p
                guards[(p, c)] = guards.pop((t, c), frozenset())
            guards.pop((p, t), None)
        del bags[t], parent[t]
    if not bags:
        return None
    return DirectedTreeDecomposition(parent, bags, {a: g for a, g in guards.items() if g})


# --- havens ---------------------------------------------------------------


@dataclass(frozen=True)
class HavenCertificate:
    order: int
    h: Mapping[frozenset[int], frozenset[int]]


@dataclass(frozen=True)
class HavenCheck(Check):
    lower_bound: int | None = None


def verify_haven(D: Digraph, cert: HavenCertificate, limit: int = 10**6) -> HavenCheck:
    """Check both haven axioms exhaustively; success certifies dtw(D) >= order - 1."""
    k = cert.order
    if k < 1:
        return HavenCheck(False, "order must be positive")
    if sum(comb(D.n, i) for i in range(k)) > limit:
        raise PreconditionError(f"too many sets of size < {k} on {D.n} vertices")
    for size in range(k):
        for X in combinations(D.vertices, size):
            X = frozenset(X)
            hx = cert.h.get(X)
            if hx is None:
                return HavenCheck(False, f"h undefined at {sorted(X)}")
            if not hx or hx & X:
                return HavenCheck(False, f"h({sorted(X)}) is empty or meets X")
            comp = _component_of(D, X, min(hx))
            if comp != hx:
                return HavenCheck(False, f"h({sorted(X)}) is not a strong component of D - X")
            if size + 1 < k:
                for v in D.vertices:
                    if v in X:
                        continue
                    hy = cert.h.get(X | {v})
                    if hy is not None and not hy <= hx:
                        return HavenCheck(False, f"monotonicity fails at {sorted(X)} + {v}")
    return HavenCheck(True, "", k - 1)


def _component_of(D: Digraph, X: frozenset[int], v: int) -> frozenset[int]:
    fwd = reach_set(D, {v}, X, "forward") | {v}
    bwd = reach_set(D, {v}, X, "backward") | {v}
    return frozenset(fwd & bwd)


def connectivity_haven(D: Digraph, k: int) -> HavenCertificate:
    """Order-(k+1) haven of a strongly k-connected digraph: V - X below k, one component at k."""
    h = {}
    for size in range(k + 1):
        for X in combinations(D.vertices, size):
            X = frozenset(X)
            rest = [v for v in D.vertices if v not in X]
            if not rest:
                continue
            h[X] = frozenset(rest) if size < k else _component_of(D, X, rest[0])
    return HavenCertificate(k + 1, h)


# --- k-train oracles ------------------------------------------------------


class TrainOracle(Protocol):
    complete: bool

    def exists(self, D: Digraph, X: Iterable[int], k: int) -> bool: ...

    def find(self, D: Digraph, X: Iterable[int], k: int) -> KTrain: ...


def peel(D: Digraph, X: Iterable[int], k: int) -> frozenset[int]:
    """Largest subset of X inducing minimum out-degree >= k."""
    alive = set(X)
    deg = {v: sum(1 for w in D.out[v] if w in alive) for v in alive}
    queue = [v for v, d in deg.items() if d < k]
    while queue:
        v = queue.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for u in D.inn[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] == k - 1:
                    queue.append(u)
    return frozenset(alive)


class PeelingOracle:
    """Sound only: a nonempty out-degree-k core certainly holds a k-train."""

    complete = False

    def exists(self, D, X, k):
        return bool(peel(D, X, k))

    def find(self, D, X, k):
        core = peel(D, X, k)
        if not core:
            raise PreconditionError("no out-degree core to extract a train from")
        H, keep = induced(D, core)
        return find_k_train(H, k).relabel(keep)


class ExactOracle:
    """Exhaustive search; raises Inconclusive past its caps."""

    complete = True

    def __init__(self, max_vertices: int = 14, max_steps: int = 10**7):
        self.max_vertices = max_vertices
        self.max_steps = max_steps

    def exists(self, D, X, k):
        return self._search(D, X, k) is not None

    def find(self, D, X, k):
        T = self._search(D, X, k)
        if T is None:
            raise PreconditionError("no k-train present")
        return T

    def _search(self, D, X, k):
        H, keep = induced(D, X)
        T = brute_find_train(H, k, self.max_vertices, self.max_steps)
        return None if T is None else T.relabel(keep)


# --- pack or hit ----------------------------------------------------------


@dataclass
class PackOrHit:
    kind: str  # "pack" | "hit"
    trains: list[KTrain] = field(default_factory=list)
    hitting_set: frozenset[int] = frozenset()
    certified: bool = True  # False when the hit rests on a sound-only oracle


def deepest_bag_subtree_with_train(D: Digraph, dec: DirectedTreeDecomposition, k: int,
                                   oracle: TrainOracle) -> int | None:
    """Deepest node whose subtree union holds a k-train (lowest id among ties).

    Train containment is monotone, so subtrees without a train are not explored.
    """
    best: tuple[int, int] | None = None
    kids = dec._kids()
    stack = [(dec.root, 0)]
    while stack:
        t, d = stack.pop()
        if not oracle.exists(D, dec.below(t), k):
            continue
        if best is None or (-d, t) < (-best[1], best[0]):
            best = (t, d)
        stack.extend((c, d + 1) for c in kids.get(t, ()))
    return None if best is None else best[0]


def ep_pack_or_hit(D: Digraph, dec: DirectedTreeDecomposition, k: int, ell: int,
                   oracle: TrainOracle, check: bool = True) -> PackOrHit:
    """ell disjoint k-trains, or a set X with |X| <= (width+1)(ell-1) meeting every k-train."""
    if check:
        v = validate_dtd(D, dec)
        if not v:
            raise PreconditionError(f"invalid decomposition: {v.reason}")
    result = _ep(D, dec, k, ell, oracle)
    result.certified = oracle.complete
    if result.kind == "pack":
        for T in result.trains:
            if not (chk := is_train(D, T)):
                raise DefectError(f"returned train invalid: {chk.reason}")
        if pairwise_disjoint(T.vertices for T in result.trains) is not None:
            raise DefectError("returned trains overlap")
    else:
        rest = set(D.vertices) - result.hitting_set
        if oracle.exists(D, rest, k):
            raise DefectError("D - X still contains a k-train")
    return result


def _ep(D, dec, k, ell, oracle) -> PackOrHit:
    if ell <= 0:
        return PackOrHit("pack")
    if dec is None:
        return PackOrHit("hit")
    t0 = deepest_bag_subtree_with_train(D, dec, k, oracle)
    if t0 is None:
        return PackOrHit("hit")
    rest = restrict_subtree(dec, t0)
    inner = _ep(D, rest, k, ell - 1, oracle)
    if inner.kind == "pack":
        return PackOrHit("pack", inner.trains + [oracle.find(D, dec.below(t0), k)])
    return PackOrHit("hit", hitting_set=inner.hitting_set | dec.gamma(t0))


def bounded_width_pack(D: Digraph, dec: DirectedTreeDecomposition, k: int) -> list[Cycle]:
    """k disjoint cycles of distinct lengths when delta+ > (width + 2)(k - 1)."""
    v = validate_dtd(D, dec)
    if not v:
        raise PreconditionError(f"invalid decomposition: {v.reason}")
    d = v.width
    need = (d + 2) * (k - 1)
    if D.min_out_degree() <= need:
        raise PreconditionError(f"min out-degree {D.min_out_degree()} <= (d+2)(k-1) = {need} with d={d}")
    res = ep_pack_or_hit(D, dec, k, k, PeelingOracle(), check=False)
    if res.kind != "pack":
        raise DefectError("hit branch reached although the degree bound forces a train")
    return select_distinct(res.trains, D)


__all__ = [
    "DirectedTreeDecomposition", "DtdCheck", "HavenCertificate", "HavenCheck", "PackOrHit",
    "ExactOracle", "PeelingOracle", "z_normal", "validate_dtd", "restrict", "restrict_subtree",
    "verify_haven", "connectivity_haven", "peel", "deepest_bag_subtree_with_train",
    "ep_pack_or_hit", "bounded_width_pack", "trivial_decomposition",
]
