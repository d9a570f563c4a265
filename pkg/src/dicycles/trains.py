"""k-trains: a dipath u_0..u_l plus k back-arcs from u_l.

A k-train with back-arc indices ``0 = l_1 < ... < l_k < l`` contains the
cycles ``u_{l_j} .. u_l`` of pairwise distinct lengths ``l - l_j + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (PASS, Check, Cycle, Digraph, PreconditionError, is_cycle,
                   is_path, reverse)


@dataclass(frozen=True)
class KTrain:
    spine: tuple[int, ...]
    back: tuple[int, ...]
    reversed: bool = False

    @property
    def k(self) -> int:
        return len(self.back)

    @property
    def end(self) -> int:
        return self.spine[-1]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.spine)

    def back_arcs(self) -> list[tuple[int, int]]:
        return [(self.end, self.spine[i]) for i in self.back]

    def relabel(self, mapping: Sequence[int]) -> "KTrain":
        return KTrain(tuple(mapping[v] for v in self.spine), self.back, self.reversed)

    def to_json(self) -> dict:
        return {"spine": list(self.spine), "back": list(self.back), "reversed": self.reversed}

    @classmethod
    def from_json(cls, data: dict) -> "KTrain":
        return cls(tuple(data["spine"]), tuple(data["back"]), bool(data.get("reversed", False)))


def degree_deficit(D: Digraph, k: int) -> int | None:
    """Lowest-id vertex of out-degree below ``k``, if any."""
    for v in D.vertices:
        if D.out_degree(v) < k:
            return v
    return None


def find_k_train(D: Digraph, k: int) -> KTrain:
    """Extract a k-train from a digraph with minimum out-degree at least k.

    Greedily grows a maximal path from vertex 0, always stepping to the
    lowest-id unused out-neighbour.  At the end every out-neighbour of the
    endpoint lies on the path.
    """
    if k < 1:
        raise PreconditionError("k must be positive")
    if D.n == 0:
        raise PreconditionError("empty digraph has no k-train")
    bad = degree_deficit(D, k)
    if bad is not None:
        raise PreconditionError(f"vertex {bad} has out-degree {D.out_degree(bad)} < {k}")
    path = [0]
    pos = {0: 0}
    while True:
        nxt = next((w for w in D.out[path[-1]] if w not in pos), None)
        if nxt is None:
            break
        pos[nxt] = len(path)
        path.append(nxt)
    hits = sorted(pos[w] for w in D.out[path[-1]])[:k]
    root = hits[0]
    return KTrain(tuple(path[root:]), tuple(h - root for h in hits))


def is_train(D: Digraph, T: KTrain) -> Check:
    host = reverse(D) if T.reversed else D
    spine = T.spine
    if len(spine) < 2:
        return Check.fail("spine too short")
    ok = is_path(host, spine)
    if not ok:
        return Check.fail(f"spine not a path: {ok.reason}")
    if not T.back:
        return Check.fail("no back-arcs")
    if T.back[0] != 0:
        return Check.fail("first back-arc index must be 0")
    if any(a >= b for a, b in zip(T.back, T.back[1:])):
        return Check.fail("back-arc indices not strictly increasing")
    if T.back[-1] >= len(spine) - 1:
        return Check.fail("back-arc index reaches the endpoint")
    for u, v in T.back_arcs():
        if not host.has_arc(u, v):
            return Check.fail(f"missing arc {(u, v)}")
    return PASS


def train_cycles(T: KTrain) -> list[Cycle]:
    """The k designated cycles, longest first, oriented for the original host."""
    cycles = []
    for i in T.back:
        c = T.spine[i:]
        if T.reversed:
            c = tuple(reversed(c))
        cycles.append(tuple(c))
    return cycles


def select_from_menus(menus: Sequence[Sequence[Cycle]]) -> list[Cycle]:
    """Pick one cycle per menu, the shortest whose length is still unused."""
    taken: set[int] = set()
    chosen = []
    for i, menu in enumerate(menus):
        pick = min((c for c in menu if len(c) not in taken), key=len, default=None)
        if pick is None:
            raise PreconditionError(f"menu {i} offers no unused length (taken {sorted(taken)})")
        taken.add(len(pick))
        chosen.append(pick)
    return chosen


def select_distinct(trains: Sequence[KTrain], D: Digraph | None = None) -> list[Cycle]:
    """k disjoint cycles of pairwise distinct lengths from >= k disjoint k-trains."""
    if not trains:
        raise PreconditionError("no trains given")
    k = trains[0].k
    if len(trains) < k:
        raise PreconditionError(f"need {k} trains, got {len(trains)}")
    used: set[int] = set()
    for T in trains:
        if T.k != k:
            raise PreconditionError("trains differ in k")
        if D is not None and not (chk := is_train(D, T)):
            raise PreconditionError(f"invalid train: {chk.reason}")
        if used & T.vertices:
            raise PreconditionError(f"trains overlap at {min(used & T.vertices)}")
        used |= T.vertices
    return select_from_menus([train_cycles(T) for T in trains[:k]])


def pairwise_disjoint(vertex_sets: Iterable[Iterable[int]]) -> tuple[int, int] | None:
    """Indices of the first overlapping pair, or None."""
    seen: dict[int, int] = {}
    for i, vs in enumerate(vertex_sets):
        for v in vs:
            if v in seen and seen[v] != i:
                return seen[v], i
            seen[v] = i
    return None


def cycles_valid(D: Digraph, cycles: Iterable[Cycle]) -> Check:
    for c in cycles:
        chk = is_cycle(D, c)
        if not chk:
            return chk
    return PASS
