"""Cylindrical grids and walls with their canonical coordinates.

Branch vertices of a wall of order m carry coordinates (col, row) with
col, row in 1..2m.  Odd rows run left to right, even rows right to left,
and every vertical arc runs from row r to row r+1 (row 2m wraps to row 1):
between an odd row and the next at even columns, between an even row and
the next at odd columns.  Columns 2c-1 and 2c form the vertical cycle Q_c.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping

from .core import PASS, Check, Cycle, Digraph, Path, PreconditionError, build, reverse

Coord = tuple[int, int]
CoordArc = tuple[Coord, Coord]


def next_row(r: int, m: int) -> int:
    return r % (2 * m) + 1


def elementary_arcs(m: int) -> list[CoordArc]:
    """Arcs of the elementary cylindrical wall W_m, in coordinates."""
    arcs = []
    for r in range(1, 2 * m + 1):
        for c in range(1, 2 * m):
            if r % 2:
                arcs.append(((c, r), (c + 1, r)))
            else:
                arcs.append(((c + 1, r), (c, r)))
        cols = range(2, 2 * m + 1, 2) if r % 2 else range(1, 2 * m, 2)
        for c in cols:
            arcs.append(((c, r), (c, next_row(r, m))))
    return sorted(arcs)


def is_wrap_arc(arc: CoordArc, m: int) -> bool:
    """Arcs from the last row back to the first (the set R)."""
    return arc[0][1] == 2 * m and arc[1][1] == 1


def brick_corners(m: int) -> list[tuple[Coord, ...]]:
    """The six branch coordinates of every brick."""
    bricks = []
    for p in range(1, 2 * m + 1):
        q = next_row(p, m)
        for c in range(1, m):
            x0 = 2 * c if p % 2 else 2 * c - 1
            cols = (x0, x0 + 1, x0 + 2)
            bricks.append(tuple((x, p) for x in cols) + tuple((x, q) for x in cols))
    return bricks


@dataclass(frozen=True, eq=False)
class WallModel:
    """A cylindrical wall of order ``m`` embedded in ``host``.

    ``coord`` maps branch coordinates to host vertices; ``subdiv`` maps every
    elementary arc (in coordinates) to the host path realising it.
    """

    host: Digraph
    m: int
    coord: Mapping[Coord, int]
    subdiv: Mapping[CoordArc, Path]
    pos: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pos", {v: c for c, v in self.coord.items()})

    def __repr__(self):
        return f"WallModel(m={self.m}, vertices={len(self.vertices)})"

    def branch(self, c: int, r: int) -> int:
        return self.coord[(c, r)]

    def segment(self, s: Coord, t: Coord) -> Path:
        """The subdivision path W[s, t] (in whichever direction it exists)."""
        if (s, t) in self.subdiv:
            return self.subdiv[(s, t)]
        if (t, s) in self.subdiv:
            return self.subdiv[(t, s)]
        raise KeyError(f"no wall arc between {s} and {t}")

    def chain(self, coords: Iterable[Coord]) -> Path:
        """Concatenate directed segments through the listed branch coordinates."""
        coords = list(coords)
        out = [self.coord[coords[0]]]
        for s, t in zip(coords, coords[1:]):
            if (s, t) not in self.subdiv:
                raise KeyError(f"wall arc {s}->{t} does not exist")
            out.extend(self.subdiv[(s, t)][1:])
        return tuple(out)

    @cached_property
    def vertices(self) -> frozenset[int]:
        vs = set(self.coord.values())
        for p in self.subdiv.values():
            vs.update(p)
        return frozenset(vs)

    @cached_property
    def cycles(self) -> list[Cycle]:
        """Vertical cycles Q_1..Q_m, each starting at its branch vertex (2c-1, 1)."""
        out = []
        for c in range(1, self.m + 1):
            seq = []
            for r in range(1, 2 * self.m + 1):
                pair = [(2 * c - 1, r), (2 * c, r)]
                seq.extend(pair if r % 2 else pair[::-1])
            seq.append(seq[0])
            out.append(self.chain(seq)[:-1])
        return out

    @cached_property
    def rows(self) -> list[Path]:
        """Horizontal paths, one per row (P_i^1 is row 2i-1, P_i^2 is row 2i)."""
        out = []
        for r in range(1, 2 * self.m + 1):
            cols = range(1, 2 * self.m + 1) if r % 2 else range(2 * self.m, 0, -1)
            out.append(self.chain((c, r) for c in cols))
        return out

    @cached_property
    def perimeter(self) -> frozenset[int]:
        return frozenset(self.cycles[0]) | frozenset(self.cycles[-1])

    @cached_property
    def interior(self) -> frozenset[int]:
        return self.vertices - self.perimeter

    @cached_property
    def bricks(self) -> list[frozenset[int]]:
        out = []
        for corners in brick_corners(self.m):
            cs = set(corners)
            vs: set[int] = set()
            for (s, t), path in self.subdiv.items():
                if s in cs and t in cs:
                    vs.update(path)
            out.append(frozenset(vs))
        return out

    @cached_property
    def bricks_of(self) -> dict[int, list[int]]:
        index: dict[int, list[int]] = {}
        for i, b in enumerate(self.bricks):
            for v in b:
                index.setdefault(v, []).append(i)
        return index

    def share_brick(self, x: int, y: int) -> bool:
        return x == y or bool(set(self.bricks_of.get(x, ())) & set(self.bricks_of.get(y, ())))

    def strip(self, cols: Iterable[int]) -> frozenset[int]:
        """Branch vertices in the given columns plus subdivision paths between them."""
        cols = set(cols)
        vs = {v for (c, _), v in self.coord.items() if c in cols}
        for (s, t), path in self.subdiv.items():
            if s[0] in cols and t[0] in cols:
                vs.update(path)
        return frozenset(vs)

    def with_host(self, host: Digraph) -> "WallModel":
        return WallModel(host, self.m, self.coord, self.subdiv)

    def relabel(self, mapping: Mapping[int, int], host: Digraph) -> "WallModel":
        coord = {c: mapping[v] for c, v in self.coord.items()}
        subdiv = {a: tuple(mapping[v] for v in p) for a, p in self.subdiv.items()}
        return WallModel(host, self.m, coord, subdiv)

    def to_json(self) -> dict:
        return {
            "order": self.m,
            "coords": [[c, r, v] for (c, r), v in sorted(self.coord.items())],
            "paths": [[list(s), list(t), list(p)] for (s, t), p in sorted(self.subdiv.items())],
        }

    @classmethod
    def from_json(cls, data: dict, host: Digraph) -> "WallModel":
        coord = {(c, r): v for c, r, v in data["coords"]}
        subdiv = {(tuple(s), tuple(t)): tuple(p) for s, t, p in data["paths"]}
        return cls(host, int(data["order"]), coord, subdiv)


def reverse_wall(W: WallModel) -> WallModel:
    """The same wall inside the reversed host, recoordinatised (c, r) -> (c, 2m+1-r)."""
    flip = lambda x: (x[0], 2 * W.m + 1 - x[1])
    coord = {flip(c): v for c, v in W.coord.items()}
    subdiv = {(flip(t), flip(s)): tuple(reversed(p)) for (s, t), p in W.subdiv.items()}
    return WallModel(reverse(W.host), W.m, coord, subdiv)


def validate_wall(W: WallModel) -> Check:
    m = W.m
    expected = set(elementary_arcs(m))
    if set(W.subdiv) != expected:
        return Check.fail("subdivision table does not match the elementary wall")
    coords = {(c, r) for c in range(1, 2 * m + 1) for r in range(1, 2 * m + 1)}
    if set(W.coord) != coords or len(set(W.coord.values())) != len(coords):
        return Check.fail("coordinates are not a bijection onto the branch vertices")
    branch = set(W.coord.values())
    inner_seen: set[int] = set()
    for (s, t), path in W.subdiv.items():
        if path[0] != W.coord[s] or path[-1] != W.coord[t] or len(path) < 2:
            return Check.fail(f"path for {s}->{t} has wrong endpoints")
        inner = path[1:-1]
        if set(inner) & branch:
            return Check.fail(f"path for {s}->{t} passes a branch vertex")
        if set(inner) & inner_seen or len(set(inner)) != len(inner):
            return Check.fail(f"path for {s}->{t} is not internally disjoint")
        inner_seen.update(inner)
        for u, v in zip(path, path[1:]):
            if not W.host.has_arc(u, v):
                return Check.fail(f"host lacks wall arc {(u, v)}")
    if W.perimeter | W.interior != W.vertices or W.perimeter & W.interior:
        return Check.fail("perimeter and interior do not partition the wall")
    for i, b in enumerate(W.bricks):
        if len(b & branch) != 6:
            return Check.fail(f"brick {i} has {len(b & branch)} branch vertices")
    if m >= 2 and set(_six_cycles(W)) != {frozenset(b & branch) for b in W.bricks}:
        return Check.fail("bricks differ from the 6-faces of the branch graph")
    return PASS


def _six_cycles(W: WallModel) -> set[frozenset[int]]:
    """Branch sets of all 6-cycles of the underlying undirected branch graph.

    In a cylindrical wall of order >= 2 these are exactly the bricks.
    """
    adj: dict[int, set[int]] = {v: set() for v in W.coord.values()}
    for s, t in W.subdiv:
        a, b = W.coord[s], W.coord[t]
        adj[a].add(b)
        adj[b].add(a)
    found = set()

    def extend(path):
        if len(path) == 6:
            if path[0] in adj[path[-1]]:
                found.add(frozenset(path))
            return
        for w in adj[path[-1]]:
            if w > path[0] and w not in path:
                extend(path + [w])

    for v in adj:
        extend([v])
    return found


def gen_grid(k: int) -> tuple[Digraph, list[Cycle], list[Path]]:
    """Cylindrical grid G_k with its cycles C_1..C_k and paths P_1..P_2k."""
    if k < 1:
        raise PreconditionError("grid order must be >= 1")
    vid = lambda i, p: (p - 1) * k + (i - 1)
    arcs = []
    cycles = []
    for i in range(1, k + 1):
        cyc = tuple(vid(i, p) for p in range(1, 2 * k + 1))
        cycles.append(cyc)
        arcs.extend((cyc[j], cyc[(j + 1) % len(cyc)]) for j in range(len(cyc)))
    paths = []
    for p in range(1, 2 * k + 1):
        order = range(1, k + 1) if p % 2 else range(k, 0, -1)
        path = tuple(vid(i, p) for i in order)
        paths.append(path)
        arcs.extend(zip(path, path[1:]))
    labels = {vid(i, p): f"g({i},{p})" for i in range(1, k + 1) for p in range(1, 2 * k + 1)}
    return build(2 * k * k, arcs, labels), cycles, paths


def gen_wall(k: int, subdiv_lengths: Mapping[CoordArc, int] | Callable[[CoordArc], int] | None = None) -> WallModel:
    """Cylindrical wall of order k; each elementary arc becomes a path of the given length."""
    if k < 2:
        raise PreconditionError("wall order must be >= 2")
    arcs_c = elementary_arcs(k)
    if subdiv_lengths is None:
        length = lambda a: 1
    elif callable(subdiv_lengths):
        length = subdiv_lengths
    else:
        length = lambda a: subdiv_lengths.get(a, 1)
    side = 2 * k
    coord = {(c, r): (r - 1) * side + (c - 1) for r in range(1, side + 1) for c in range(1, side + 1)}
    labels = {v: f"({c},{r})" for (c, r), v in coord.items()}
    nxt = side * side
    arcs = []
    subdiv = {}
    for a in arcs_c:
        L = int(length(a))
        if L < 1:
            raise PreconditionError(f"subdivision length {L} for {a} must be >= 1")
        inner = list(range(nxt, nxt + L - 1))
        for j, v in enumerate(inner):
            labels[v] = f"{a[0]}>{a[1]}:{j + 1}"
        nxt += L - 1
        path = (coord[a[0]], *inner, coord[a[1]])
        subdiv[a] = path
        arcs.extend(zip(path, path[1:]))
    return WallModel(build(nxt, arcs, labels), k, coord, subdiv)


def topological_positions(k: int) -> dict[Coord, int]:
    """A topological order of W_k minus its wrap arcs: row by row along each row's direction."""
    pos = {}
    i = 1
    for r in range(1, 2 * k + 1):
        cols = range(1, 2 * k + 1) if r % 2 else range(2 * k, 0, -1)
        for c in cols:
            pos[(c, r)] = i
            i += 1
    return pos


def equal_length_weights(k: int) -> tuple[dict[CoordArc, int], int]:
    """Positive arc weights on W_k under which every directed cycle weighs 4k^2."""
    pos = topological_positions(k)
    L = 4 * k * k
    weights = {}
    for a in elementary_arcs(k):
        s, t = pos[a[0]], pos[a[1]]
        weights[a] = L - (s - t) if is_wrap_arc(a, k) else t - s
    return weights, L


def gen_equal_length_wall(k: int) -> tuple[WallModel, int]:
    weights, L = equal_length_weights(k)
    return gen_wall(k, weights), L


def wrap_paths(W: WallModel) -> list[Path]:
    return [p for a, p in sorted(W.subdiv.items()) if is_wrap_arc(a, W.m)]


def equal_length_dag_check(W: WallModel, L: int) -> Check:
    """Every cycle through a wrap path has length L.

    Removing the wrap paths leaves a DAG; for each wrap path u..v the DAG's
    shortest and longest v-u path lengths must both equal L - |wrap path|.
    """
    D = W.host
    removed = set()
    for p in wrap_paths(W):
        removed.update(zip(p, p[1:]))
    out = {v: [w for w in D.out[v] if (v, w) not in removed] for v in D.vertices}
    indeg = {v: 0 for v in D.vertices}
    for v in D.vertices:
        for w in out[v]:
            indeg[w] += 1
    order = [v for v in D.vertices if indeg[v] == 0]
    for v in order:
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
    if len(order) != D.n:
        return Check.fail("wall minus wrap paths is not acyclic")
    rank = {v: i for i, v in enumerate(order)}
    for p in wrap_paths(W):
        u, v = p[0], p[-1]
        lo = {v: 0}
        hi = {v: 0}
        for x in order[rank[v]:]:
            if x not in lo:
                continue
            for y in out[x]:
                lo[y] = min(lo.get(y, lo[x] + 1), lo[x] + 1)
                hi[y] = max(hi.get(y, hi[x] + 1), hi[x] + 1)
        if u not in lo:
            continue
        need = L - (len(p) - 1)
        if lo[u] != need or hi[u] != need:
            return Check.fail(f"paths {v}->{u} have lengths in [{lo[u]}, {hi[u]}], need {need}")
    return PASS


def branch_arc_count(k: int) -> int:
    return len(elementary_arcs(k))


__all__ = [
    "WallModel", "gen_grid", "gen_wall", "gen_equal_length_wall", "reverse_wall",
    "validate_wall", "elementary_arcs", "brick_corners", "equal_length_dag_check",
    "equal_length_weights", "wrap_paths", "is_wrap_arc", "topological_positions",
]
