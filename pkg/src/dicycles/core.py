"""Digraph representation and elementary reachability operations.

Digraphs are immutable: loopless, no parallel arcs, digons allowed.  Vertex ids
are the dense range ``0..n-1``.  Paths are vertex tuples; a cycle is a vertex
tuple ``(v0, ..., v_{l-1})`` closed by the arc ``(v_{l-1}, v0)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Arc = tuple[int, int]
Path = tuple[int, ...]
Cycle = tuple[int, ...]


class DigraphError(ValueError):
    """Invalid digraph input (loop, duplicate arc, bad vertex id)."""


class PreconditionError(ValueError):
    """An operation was called outside its domain."""


class DefectError(RuntimeError):
    """An internal post-condition failed; indicates a bug or a bad oracle."""


@dataclass(frozen=True)
class Check:
    """Boolean verdict carrying a human-readable reason when it fails."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def fail(cls, reason: str) -> "Check":
        return cls(False, reason)


PASS = Check(True)


@dataclass(frozen=True, eq=False)
class Digraph:
    n: int
    arcs: tuple[Arc, ...]
    labels: Mapping[int, str] = field(default_factory=dict)
    out: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    inn: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    _arcset: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 0:
            raise DigraphError(f"negative vertex count {self.n}")
        arcs = []
        seen = set()
        for arc in self.arcs:
            u, v = int(arc[0]), int(arc[1])
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DigraphError(f"arc {(u, v)} has an endpoint outside [0, {self.n})")
            if u == v:
                raise DigraphError(f"arc {(u, v)} is a loop")
            if (u, v) in seen:
                raise DigraphError(f"arc {(u, v)} appears twice")
            seen.add((u, v))
            arcs.append((u, v))
        arcs.sort()
        out = [[] for _ in range(self.n)]
        inn = [[] for _ in range(self.n)]
        for u, v in arcs:
            out[u].append(v)
            inn[v].append(u)
        object.__setattr__(self, "arcs", tuple(arcs))
        object.__setattr__(self, "out", tuple(map(tuple, out)))
        object.__setattr__(self, "inn", tuple(tuple(sorted(x)) for x in inn))
        object.__setattr__(self, "_arcset", frozenset(seen))
        object.__setattr__(self, "labels", dict(self.labels))

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.n, self.arcs))

    def __repr__(self):
        return f"Digraph(n={self.n}, arcs={len(self.arcs)})"

    @property
    def vertices(self) -> range:
        return range(self.n)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self._arcset

    def out_degree(self, v: int) -> int:
        return len(self.out[v])

    def in_degree(self, v: int) -> int:
        return len(self.inn[v])

    def min_out_degree(self) -> int:
        return min((len(o) for o in self.out), default=0)

    def min_in_degree(self) -> int:
        return min((len(i) for i in self.inn), default=0)


def build(n: int, arcs: Iterable[Sequence[int]], labels: Mapping[int, str] | None = None) -> Digraph:
    return Digraph(n, tuple(tuple(a) for a in arcs), labels or {})


def reverse(D: Digraph) -> Digraph:
    return Digraph(D.n, tuple((v, u) for u, v in D.arcs), D.labels)


def induced(D: Digraph, X: Iterable[int]) -> tuple[Digraph, tuple[int, ...]]:
    """Return ``D[X]`` and the tuple ``keep`` with ``keep[new_id] = old_id``."""
    keep = tuple(sorted(set(X)))
    for v in keep:
        if not 0 <= v < D.n:
            raise DigraphError(f"vertex {v} outside [0, {D.n})")
    index = {v: i for i, v in enumerate(keep)}
    arcs = [(index[u], index[v]) for u, v in D.arcs if u in index and v in index]
    labels = {index[v]: s for v, s in D.labels.items() if v in index}
    return Digraph(len(keep), tuple(arcs), labels), keep


def delete(D: Digraph, X: Iterable[int]) -> tuple[Digraph, tuple[int, ...]]:
    X = set(X)
    return induced(D, (v for v in D.vertices if v not in X))


def disjoint_union(*graphs: Digraph) -> tuple[Digraph, list[int]]:
    """Disjoint union; returns the id offset of each operand."""
    arcs, offsets, labels = [], [], {}
    base = 0
    for G in graphs:
        offsets.append(base)
        arcs.extend((u + base, v + base) for u, v in G.arcs)
        labels.update({v + base: s for v, s in G.labels.items()})
        base += G.n
    return Digraph(base, tuple(arcs), labels), offsets


def strong_components(D: Digraph) -> list[tuple[int, ...]]:
    """Strong components, listed in a topological order of the condensation."""
    index = [-1] * D.n
    low = [0] * D.n
    on_stack = [False] * D.n
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = 0
    for root in D.vertices:
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            nbrs = D.out[v]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
    # Tarjan emits sinks first.
    comps.reverse()
    return comps


def is_strongly_connected(D: Digraph, removed: Iterable[int] = ()) -> bool:
    removed = set(removed)
    alive = [v for v in D.vertices if v not in removed]
    if not alive:
        return True
    start = alive[0]
    fwd = reach_set(D, {start}, removed, "forward") | {start}
    if len(fwd) != len(alive):
        return False
    bwd = reach_set(D, {start}, removed, "backward") | {start}
    return len(bwd) == len(alive)


def reach_set(D: Digraph, sources: Iterable[int], forbidden: Iterable[int] = (),
              direction: str = "forward") -> set[int]:
    """Vertices reachable from ``sources`` by walks of length >= 1 avoiding ``forbidden``.

    A source appears in the result only if some walk re-enters it.
    """
    sources = set(sources)
    forbidden = set(forbidden)
    if sources & forbidden:
        raise PreconditionError("sources and forbidden set overlap")
    if direction == "forward":
        adj = D.out
    elif direction == "backward":
        adj = D.inn
    else:
        raise ValueError(f"unknown direction {direction!r}")
    seen: set[int] = set()
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen and w not in forbidden:
                seen.add(w)
                queue.append(w)
    return seen


def find_path(D: Digraph, source: int, target: int, forbidden: Iterable[int] = ()) -> Path | None:
    """Shortest ``source``-``target`` dipath whose internal vertices avoid ``forbidden``."""
    if source == target:
        raise PreconditionError("path endpoints must differ")
    forbidden = set(forbidden)
    if source in forbidden or target in forbidden:
        raise PreconditionError("path endpoint lies in the forbidden set")
    parent = {source: None}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in D.out[v]:
            if w in parent or w in forbidden:
                continue
            parent[w] = v
            if w == target:
                path = [w]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return tuple(reversed(path))
            queue.append(w)
    return None


def is_path(D: Digraph, path: Sequence[int]) -> Check:
    if len(path) == 0:
        return Check.fail("empty path")
    if len(set(path)) != len(path):
        return Check.fail("path repeats a vertex")
    for u, v in zip(path, path[1:]):
        if not (0 <= u < D.n and 0 <= v < D.n) or not D.has_arc(u, v):
            return Check.fail(f"missing arc {(u, v)}")
    return PASS


def is_cycle(D: Digraph, cycle: Sequence[int]) -> Check:
    if len(cycle) < 2:
        return Check.fail("cycle shorter than 2")
    if len(set(cycle)) != len(cycle):
        return Check.fail("cycle repeats a vertex")
    for i, u in enumerate(cycle):
        v = cycle[(i + 1) % len(cycle)]
        if not (0 <= u < D.n and 0 <= v < D.n) or not D.has_arc(u, v):
            return Check.fail(f"missing arc {(u, v)}")
    return PASS


def cycle_arcs(cycle: Sequence[int]) -> list[Arc]:
    return [(u, cycle[(i + 1) % len(cycle)]) for i, u in enumerate(cycle)]


def canonical_cycle(cycle: Sequence[int]) -> Cycle:
    """Rotate so the minimum vertex comes first."""
    i = min(range(len(cycle)), key=cycle.__getitem__)
    return tuple(cycle[i:]) + tuple(cycle[:i])


def cycle_weight(cycle: Sequence[int], weights: Mapping[Arc, Fraction]) -> Fraction:
    return sum((Fraction(weights[a]) for a in cycle_arcs(cycle)), Fraction(0))
