"""k-trains next to weakly flat walls, and the packing pipelines built on them.

Weak flatness is checked in its wall-external form: every path whose
interior avoids V(W) joins two vertices of a common brick.  The form
quantifying over int(W) alone fails on every bare wall of order >= 3,
because the perimeter cycles connect far-apart interior vertices
(``weak_flat_check(ctx, literal=True)`` reports such a pair).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .core import (Check, Cycle, DefectError, Digraph, Path, PreconditionError,
                   delete, find_path, induced, is_strongly_connected, reach_set, reverse)
from .trains import (KTrain, find_k_train, is_train, pairwise_disjoint, select_distinct,
                     select_from_menus, train_cycles)
from .walls import Coord, WallModel, reverse_wall

INF = float("inf")


@dataclass(frozen=True, eq=False)
class FlatContext:
    D: Digraph
    W: WallModel

    def __post_init__(self):
        for path in self.W.subdiv.values():
            for u, v in zip(path, path[1:]):
                if not self.D.has_arc(u, v):
                    raise PreconditionError(f"wall arc {(u, v)} missing from the host")

    @property
    def interior(self) -> frozenset[int]:
        return self.W.interior

    @cached_property
    def brick_graph(self) -> dict[int, frozenset[int]]:
        """Interior vertices adjacent when they share a brick."""
        inner = self.W.interior
        adj: dict[int, set[int]] = {v: set() for v in inner}
        for b in self.W.bricks:
            members = b & inner
            for v in members:
                adj[v] |= members
        return {v: frozenset(s - {v}) for v, s in adj.items()}


def _require_interior(ctx: FlatContext, *vs: int):
    for v in vs:
        if v not in ctx.interior:
            raise PreconditionError(f"vertex {v} is not in the wall interior")


def wall_reach(ctx: FlatContext, w: int, sign: str = "+") -> frozenset[int]:
    """Vertices outside int(W) reachable from w (sign '+') or reaching w ('-') avoiding the rest of int(W)."""
    _require_interior(ctx, w)
    direction = {"+": "forward", "-": "backward"}[sign]
    blocked = ctx.interior - {w}
    return frozenset(reach_set(ctx.D, {w}, blocked, direction) - ctx.interior)


def brick_distance(ctx: FlatContext, x: int, y: int) -> float:
    _require_interior(ctx, x, y)
    if x == y:
        return 0
    adj = ctx.brick_graph
    dist = {x: 0}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                if u == y:
                    return dist[u]
                queue.append(u)
    return INF


@dataclass(frozen=True)
class FlatCheck(Check):
    pair: tuple[int, int] | None = None


def weak_flat_check(ctx: FlatContext, literal: bool = False) -> FlatCheck:
    """Every path with interior outside the wall joins vertices of a common brick.

    With ``literal=True`` the quantification is over paths avoiding int(W)
    and endpoint pairs are tested by brick distance <= 1.
    """
    D, W = ctx.D, ctx.W
    zone = W.interior if literal else W.vertices
    for x in sorted(zone):
        hit = set()
        outside = []
        for y in D.out[x]:
            (hit.add(y) if y in zone else outside.append(y))
        seen = set(outside)
        queue = deque(outside)
        while queue:
            v = queue.popleft()
            for y in D.out[v]:
                if y in zone:
                    hit.add(y)
                elif y not in seen:
                    seen.add(y)
                    queue.append(y)
        for y in sorted(hit):
            ok = brick_distance(ctx, x, y) <= 1 if literal else W.share_brick(x, y)
            if not ok:
                return FlatCheck(False, f"path from {x} to {y} leaves the wall between non-adjacent bricks", (x, y))
    return FlatCheck(True)


@dataclass
class InOrOut:
    branch: int
    x: int | None = None
    path: Path = ()
    nbrs: tuple[int, ...] = ()
    core: frozenset[int] = frozenset()


def in_or_out(ctx: FlatContext, w: int, a: int, b: int) -> InOrOut:
    """Either a w-x path leaving int(W) only at w where x sends a arcs back into int(W) - w,
    or the outside region reachable from w has minimum out-degree >= b."""
    D = ctx.D
    reach = wall_reach(ctx, w, "+")
    for v in sorted(reach | {w}):
        if D.out_degree(v) < a + b:
            raise PreconditionError(f"vertex {v} has out-degree {D.out_degree(v)} < a+b = {a + b}")
    inner = ctx.interior
    if not reach:
        x = w
    else:
        x = next((v for v in sorted(reach) if sum(1 for u in D.out[v] if u not in inner) < b), None)
        if x is None:
            return InOrOut(2, core=reach)
    nbrs = tuple(u for u in D.out[x] if u in inner and u != w)
    if len(nbrs) < a:
        raise DefectError(f"vertex {x} has only {len(nbrs)} interior out-neighbours")
    if x == w:
        path = (w,)
    else:
        path = find_path(D, w, x, inner - {w})
        if path is None:
            raise DefectError(f"no path from {w} to {x} outside the interior")
    return InOrOut(1, x, path, nbrs[:a])


def intersection_violations(ctx: FlatContext, strong: bool | None = None) -> list[tuple]:
    """Pairs contradicting the reach-set intersection properties.

    Only vertices whose reach sets avoid the whole wall are considered; for
    the others the reach sets run along the perimeter and the properties do
    not apply.  ``strong`` defaults to testing strong connectivity of the host.
    """
    W = ctx.W
    plus, minus = {}, {}
    for w in sorted(ctx.interior):
        rp, rm = wall_reach(ctx, w, "+"), wall_reach(ctx, w, "-")
        if rp & W.vertices or rm & W.vertices:
            continue
        plus[w], minus[w] = rp, rm
    if strong is None:
        strong = is_strongly_connected(ctx.D)
    by_plus: dict[int, list[int]] = {}
    by_minus: dict[int, list[int]] = {}
    for w, r in plus.items():
        for x in r:
            by_plus.setdefault(x, []).append(w)
    for w, r in minus.items():
        for x in r:
            by_minus.setdefault(x, []).append(w)
    bad = set()
    for x, sources in by_plus.items():
        for w1 in sources:
            for w2 in by_minus.get(x, ()):
                if w1 != w2 and brick_distance(ctx, w1, w2) >= 2:
                    bad.add(("plus-minus", w1, w2))
            if strong:
                for w2 in sources:
                    if w1 < w2 and brick_distance(ctx, w1, w2) >= 3:
                        bad.add(("plus-plus", w1, w2))
    return sorted(bad)


# --- local geometry around a vertex at (c1, c2) ---------------------------

ANCHORS = [(-1, 1), (0, 1), (1, 1), (-2, 2), (-1, 2), (1, 2), (2, 2),
           (-2, 3), (-1, 3), (0, 3), (1, 3), (2, 3), (3, 3), (1, 4), (2, 4), (3, 4)]

# chains of anchor indices (0 = w) forming the six paths
SIX_PATHS = {
    1: (1, 2, 3, 6, 0),
    2: (1, 5),
    3: (0, 5, 4, 8, 9, 10),
    4: (0, 10, 11, 12),
    5: (7, 6),
    6: (7, 12),
}
DETOUR = (12, 13, 16, 15, 14)


class Local:
    """Anchor vertices u1..u16 and paths P1..P6 for w at (c1, c2) with c1 odd, c2 even."""

    def __init__(self, W: WallModel, c1: int, c2: int):
        self.W = W
        self.c1, self.c2 = c1, c2
        m = W.m
        shift = c2 - 2
        self.coords: dict[int, Coord] = {0: (c1, c2)}
        for i, (dc, r) in enumerate(ANCHORS, start=1):
            self.coords[i] = (c1 + dc, (r - 1 + shift) % (2 * m) + 1)
        self.u = {i: W.coord[c] for i, c in self.coords.items()}
        self.ell = (c1 + 1) // 2

    def chain(self, idx: Sequence[int]) -> Path:
        return self.W.chain(self.coords[i] for i in idx)

    def path(self, j: int) -> Path:
        return self.chain(SIX_PATHS[j])

    def q_segment(self, start: int, end: int) -> Path:
        """Subpath of the vertical cycle through w from anchor ``start`` to anchor ``end``."""
        cyc = self.W.cycles[self.ell - 1]
        i, j = cyc.index(self.u[start]), cyc.index(self.u[end])
        return cyc[i:j + 1] if i <= j else cyc[i:] + cyc[:j + 1]

    def spine_prefix(self, j: int, y1: int) -> Path:
        """Path from y1 to w per case j."""
        P = self.path(j)
        tail = P[P.index(y1):]
        if j == 1:
            return tail
        if j == 2:
            return _cat(tail, self.chain((5, 4, 8, 9, 10)), self.q_segment(10, 0))
        if j == 3:
            return _cat(tail, self.q_segment(10, 0))
        if j == 5:
            return _cat(tail, self.chain((6, 0)))
        # j in (4, 6): end at u12, detour through u13, u16, u15, u14, then down the cycle
        return _cat(tail, self.chain(DETOUR), self.q_segment(14, 0))


def _cat(*parts: Path) -> Path:
    out = list(parts[0])
    for p in parts[1:]:
        if out[-1] != p[0]:
            raise DefectError(f"cannot join paths at {out[-1]} and {p[0]}")
        out.extend(p[1:])
    return tuple(out)


def strip(W: WallModel, c1: int) -> frozenset[int]:
    return W.strip(range(c1 - 2, c1 + 4))


@dataclass
class TrainTrace:
    train: KTrain
    branch: int
    case: int | None
    x: int | None
    region: frozenset[int]


def technical_train(ctx: FlatContext, w: int, k: int, orientation: str = "forward") -> TrainTrace:
    """A k-train (reverse k-train) inside the strip around w plus the outside region
    reachable from (reaching) w."""
    if orientation == "reverse":
        c1, c2 = ctx.W.pos[w]
        if c1 % 2 == 0 or c2 % 2 == 0:
            raise PreconditionError(f"reverse mode needs both coordinates odd, got {(c1, c2)}")
        rctx = FlatContext(reverse(ctx.D), reverse_wall(ctx.W))
        tr = technical_train(rctx, w, k, "forward")
        tr.train = KTrain(tr.train.spine, tr.train.back, True)
        if not (chk := is_train(ctx.D, tr.train)):
            raise DefectError(f"reverse train invalid: {chk.reason}")
        return tr
    if orientation != "forward":
        raise ValueError(f"unknown orientation {orientation!r}")
    W, D = ctx.W, ctx.D
    if w not in W.pos:
        raise PreconditionError(f"vertex {w} is not a branch vertex")
    c1, c2 = W.pos[w]
    if c1 % 2 == 0 or c2 % 2 == 1:
        raise PreconditionError(f"forward mode needs c1 odd and c2 even, got {(c1, c2)}")
    if c1 - 2 < 1 or c1 + 3 > 2 * W.m:
        raise PreconditionError("strip leaves the wall")
    S = strip(W, c1)
    if S & W.perimeter:
        raise PreconditionError("strip meets the perimeter")
    reach = wall_reach(ctx, w, "+")
    region = S | reach
    res = in_or_out(ctx, w, 6 * k - 5, k)
    if res.branch == 2:
        H, keep = induced(D, res.core)
        T = find_k_train(H, k).relabel(keep)
        trace = TrainTrace(T, 2, None, None, region)
    else:
        loc = Local(W, c1, c2)
        nbrs = set(res.nbrs)
        for j in range(1, 7):
            ys = [v for v in loc.path(j) if v in nbrs and v != w]
            if len(ys) >= k:
                break
        else:
            raise DefectError(f"no path P_j holds {k} interior out-neighbours of {res.x}")
        ys = ys[:k]
        spine = _cat(loc.spine_prefix(j, ys[0]), res.path)
        pos = {v: i for i, v in enumerate(spine)}
        T = KTrain(spine, tuple(pos[y] for y in ys))
        trace = TrainTrace(T, 1, j, res.x, region)
    if not (chk := is_train(D, trace.train)):
        raise DefectError(f"constructed train invalid: {chk.reason}")
    if not trace.train.vertices <= region:
        raise DefectError("train leaves the strip and reach region")
    return trace


# --- packing pipelines ----------------------------------------------------


def strong_positions(k: int) -> list[Coord]:
    return [(6 * i - 1, 2) for i in range(1, k + 1)]


@dataclass
class PackResult:
    cycles: list[Cycle]
    traces: list[TrainTrace] = field(default_factory=list)


def strong_case_pack(ctx: FlatContext, k: int) -> PackResult:
    W, D = ctx.W, ctx.D
    if W.m != 3 * k + 2:
        raise PreconditionError(f"wall order {W.m} != 3k+2 = {3 * k + 2}")
    if not is_strongly_connected(D):
        raise PreconditionError("host is not strongly connected")
    if not (chk := weak_flat_check(ctx)):
        raise PreconditionError(f"wall not weakly flat: {chk.reason}")
    ws = [W.coord[c] for c in strong_positions(k)]
    for i in range(k):
        for j in range(i + 1, k):
            if brick_distance(ctx, ws[i], ws[j]) < 3:
                raise DefectError(f"placements {i + 1} and {j + 1} are within brick distance 2")
    reaches = [wall_reach(ctx, w, "+") for w in ws]
    strips = [strip(W, 6 * i - 1) for i in range(1, k + 1)]
    if (p := pairwise_disjoint(reaches)) is not None:
        raise DefectError(f"reach sets {p} intersect")
    if (p := pairwise_disjoint(strips)) is not None:
        raise DefectError(f"strips {p} intersect")
    traces = [technical_train(ctx, w, k) for w in ws]
    regions = [strips[i] | reaches[i] for i in range(k)]
    if (p := pairwise_disjoint(regions)) is not None:
        raise DefectError(f"train regions {p} intersect")
    cycles = select_distinct([t.train for t in traces], D)
    return PackResult(cycles, traces)


NONSTRONG_W1 = (5, 2)
NONSTRONG_W2 = (11, 3)


def nonstrong_case_pack(ctx: FlatContext) -> PackResult:
    W = ctx.W
    if W.m != 8:
        raise PreconditionError(f"wall order {W.m} != 8")
    if not (chk := weak_flat_check(ctx)):
        raise PreconditionError(f"wall not weakly flat: {chk.reason}")
    w1, w2 = W.coord[NONSTRONG_W1], W.coord[NONSTRONG_W2]
    if brick_distance(ctx, w1, w2) < 2:
        raise DefectError("placements share a brick")
    r1, r2 = wall_reach(ctx, w1, "+"), wall_reach(ctx, w2, "-")
    if r1 & r2:
        raise DefectError("forward and backward reach sets intersect")
    t1 = technical_train(ctx, w1, 3, "forward")
    t2 = technical_train(ctx, w2, 3, "reverse")
    q1 = W.cycles[0]
    regions = [frozenset(q1), strip(W, 5) | r1, strip(W, 11) | r2]
    if (p := pairwise_disjoint(regions)) is not None:
        raise DefectError(f"regions {p} intersect")
    cycles = select_from_menus([[q1], train_cycles(t1.train), train_cycles(t2.train)])
    return PackResult(cycles, [t1, t2])


# --- dispatch over the three structural outcomes --------------------------


@dataclass(frozen=True)
class DtdCertificate:
    dec: object  # DirectedTreeDecomposition


@dataclass(frozen=True)
class MinorCertificate:
    model: object  # MinorModel


@dataclass(frozen=True)
class FlatCertificate:
    X: frozenset[int]
    wall: WallModel  # embedded in D, avoiding X


def theorem_dispatch(D: Digraph, cert, mode: str, k: int = 3) -> list[Cycle]:
    """Route a case certificate to the matching packing procedure.

    mode 'mainconn' packs k cycles (flat walls of order 3k+2); mode 'mainsem'
    packs 3 cycles (flat walls of order 8, complete minors on 9 vertices).
    """
    from .dtd import bounded_width_pack
    from .minors import distinct_length_pack_via_minor

    if mode == "mainsem":
        k = 3
    elif mode != "mainconn":
        raise PreconditionError(f"unknown mode {mode!r}")
    if isinstance(cert, DtdCertificate):
        return bounded_width_pack(D, cert.dec, k)
    if isinstance(cert, MinorCertificate):
        if mode == "mainsem" and cert.model.t < 9:
            raise PreconditionError("mainsem needs a complete minor on >= 9 vertices")
        return distinct_length_pack_via_minor(D, cert.model, k)
    if isinstance(cert, FlatCertificate):
        X = set(cert.X)
        if X & cert.wall.vertices:
            raise PreconditionError("wall meets the deleted set")
        H, keep = delete(D, X)
        index = {v: i for i, v in enumerate(keep)}
        ctx = FlatContext(H, cert.wall.relabel(index, H))
        if mode == "mainconn":
            res = strong_case_pack(ctx, k)
        else:
            res = nonstrong_case_pack(ctx)
        return [tuple(keep[v] for v in c) for c in res.cycles]
    raise PreconditionError(f"unsupported certificate {type(cert).__name__}")


__all__ = [
    "FlatContext", "FlatCheck", "InOrOut", "TrainTrace", "PackResult", "Local",
    "wall_reach", "brick_distance", "weak_flat_check", "in_or_out", "technical_train",
    "strong_case_pack", "nonstrong_case_pack", "theorem_dispatch", "strip",
    "DtdCertificate", "MinorCertificate", "FlatCertificate", "strong_positions",
    "NONSTRONG_W1", "NONSTRONG_W2", "intersection_violations",
]
