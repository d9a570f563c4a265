"""Brute-force ground truth: cycle enumeration, connectivity, packing checks."""

from __future__ import annotations

import random
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .core import (PASS, Arc, Check, Cycle, Digraph, canonical_cycle,
                   cycle_arcs, cycle_weight, is_cycle, is_strongly_connected,
                   reach_set)
from .trains import KTrain


class CycleLimitExceeded(RuntimeError):
    def __init__(self, limit: int):
        super().__init__(f"more than {limit} cycles")
        self.limit = limit


class Inconclusive(RuntimeError):
    """A brute-force search hit its caps."""


def enum_cycles(D: Digraph, limit: int = 10**6) -> list[Cycle]:
    """All simple cycles, each rooted at its minimum vertex, in lexicographic order."""
    cycles: list[Cycle] = []
    for s in D.vertices:
        # vertices > s that can still return to s
        allowed = {v for v in reach_set(D, {s}, set(range(s)), "backward") if v > s}
        if not allowed:
            continue
        path = [s]
        on_path = {s}
        stack = [iter(D.out[s])]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if nxt == s:
                if len(path) >= 2:
                    cycles.append(tuple(path))
                    if len(cycles) > limit:
                        raise CycleLimitExceeded(limit)
                continue
            if nxt in on_path or nxt not in allowed:
                continue
            path.append(nxt)
            on_path.add(nxt)
            stack.append(iter(D.out[nxt]))
    return cycles


def _local_connectivity(D: Digraph, s: int, t: int, cap: int) -> int:
    """Max number of internally disjoint s-t dipaths, stopping at ``cap``."""
    # split node v into v_in=2v, v_out=2v+1 with capacity 1 (inf for s, t)
    big = cap + 1
    residual: dict[int, dict[int, int]] = defaultdict(dict)

    def add(u, v, c):
        residual[u][v] = residual[u].get(v, 0) + c
        residual[v].setdefault(u, 0)

    for v in D.vertices:
        add(2 * v, 2 * v + 1, big if v in (s, t) else 1)
    for u, v in D.arcs:
        add(2 * u + 1, 2 * v, big)
    source, sink = 2 * s + 1, 2 * t
    flow = 0
    while flow < cap:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v, c in residual[u].items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            break
        v = sink
        while parent[v] is not None:
            u = parent[v]
            residual[u][v] -= 1
            residual[v][u] += 1
            v = u
        flow += 1
    return flow


def vertex_connectivity(D: Digraph, upto: int) -> int:
    """Largest c <= upto with |V| >= c+1 and D - Z strong for every |Z| < c."""
    if D.n <= 1 or not is_strongly_connected(D):
        return 0
    best = min(upto, D.n - 1)
    for s in D.vertices:
        for t in D.vertices:
            if s == t or D.has_arc(s, t):
                continue
            best = min(best, _local_connectivity(D, s, t, best))
            if best == 0:
                return 0
    return best


def vertex_connectivity_brute(D: Digraph, upto: int) -> int:
    """Subset enumeration; only for tiny digraphs."""
    best = 0
    for c in range(1, upto + 1):
        if D.n < c + 1:
            break
        if not all(is_strongly_connected(D, Z) for Z in combinations(D.vertices, c - 1)):
            break
        best = c
    return best


@dataclass(frozen=True)
class CyclePacking:
    cycles: tuple[Cycle, ...]
    claim: str = "distinct-lengths"
    weights: Mapping[Arc, Fraction] | None = None

    def to_json(self) -> dict:
        data = {"cycles": [list(c) for c in self.cycles], "claim": self.claim}
        if self.weights is not None:
            data["weights"] = [[u, v, w.numerator, w.denominator]
                               for (u, v), w in sorted(self.weights.items())]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "CyclePacking":
        weights = None
        if "weights" in data:
            weights = {(u, v): Fraction(a, b) for u, v, a, b in data["weights"]}
        return cls(tuple(tuple(c) for c in data["cycles"]), data.get("claim", "distinct-lengths"), weights)


def verify_packing(D: Digraph, P: CyclePacking) -> Check:
    owner: dict[int, int] = {}
    for i, c in enumerate(P.cycles):
        chk = is_cycle(D, c)
        if not chk:
            return Check.fail(f"cycle {i}: {chk.reason}")
        if P.claim == "equal-length-forbidden":
            continue
        for v in c:
            if v in owner:
                return Check.fail(f"overlap at {v} (cycles {owner[v]} and {i})")
            owner[v] = i
    if P.claim == "distinct-lengths":
        lengths = [len(c) for c in P.cycles]
        dup = _first_duplicate(lengths)
        if dup is not None:
            return Check.fail(f"length collision at {dup}")
    elif P.claim == "distinct-weights":
        if P.weights is None:
            return Check.fail("distinct-weights claim without weights")
        ws = [cycle_weight(c, P.weights) for c in P.cycles]
        dup = _first_duplicate(ws)
        if dup is not None:
            return Check.fail(f"weight collision at {dup}")
    elif P.claim == "equal-length-forbidden":
        for a, b in combinations(P.cycles, 2):
            if len(a) == len(b) and not set(cycle_arcs(a)) & set(cycle_arcs(b)):
                return Check.fail(f"arc-disjoint cycles of equal length {len(a)}")
    else:
        return Check.fail(f"unknown claim {P.claim!r}")
    return PASS


def _first_duplicate(values):
    seen = set()
    for x in values:
        if x in seen:
            return x
        seen.add(x)
    return None


def equal_length_arcdisjoint_pair(cycles: Iterable[Cycle]) -> tuple[Cycle, Cycle] | None:
    by_len: dict[int, list[Cycle]] = defaultdict(list)
    for c in cycles:
        by_len[len(c)].append(c)
    for group in by_len.values():
        arcsets = [(c, set(cycle_arcs(c))) for c in group]
        for (a, sa), (b, sb) in combinations(arcsets, 2):
            if not sa & sb:
                return a, b
    return None


def sample_cycles(D: Digraph, count: int, seed: int = 0, max_steps: int = 10**7) -> list[Cycle]:
    """Cycles found by loop-erasing uniform random walks (deterministic per seed)."""
    rng = random.Random(seed)
    starts = [v for v in D.vertices if D.out[v]]
    found: list[Cycle] = []
    steps = 0
    while len(found) < count and steps < max_steps:
        v = rng.choice(starts)
        walk = [v]
        pos = {v: 0}
        while True:
            steps += 1
            if not D.out[v]:
                break
            v = rng.choice(D.out[v])
            if v in pos:
                found.append(canonical_cycle(walk[pos[v]:]))
                break
            pos[v] = len(walk)
            walk.append(v)
    return found


def distinct_subset_sums(values: Sequence[int], exhaustive_limit: int = 20) -> bool | None:
    """Whether all 2^m subset sums differ.  None when too many values to enumerate."""
    m = len(values)
    if m > exhaustive_limit:
        return None
    sums = {0}
    for x in values:
        shifted = {s + x for s in sums}
        if shifted & sums:
            return False
        sums |= shifted
    return len(sums) == 2 ** m


@dataclass
class EqualLengthReport:
    status: str
    exhaustive: str
    structural: str | None = None
    pair: tuple[Cycle, Cycle] | None = None
    cycles_checked: int = 0
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "exhaustive": self.exhaustive,
                "structural": self.structural, "cycles_checked": self.cycles_checked,
                "pair": [list(c) for c in self.pair] if self.pair else None,
                **self.details}


def no_equal_length_arcdisjoint(D: Digraph, budget: int = 10**5, table=None,
                                samples: int = 1000, seed: int = 0) -> EqualLengthReport:
    """Search for two arc-disjoint cycles of equal length.

    ``table`` is an optional forward-arc table of a layered counterexample
    digraph; when given, the structural argument (cycle length equals the sum
    of forward-arc lengths, forward lengths have distinct subset sums) is
    checked as well, on sampled cycles.
    """
    try:
        cycles = enum_cycles(D, budget)
    except CycleLimitExceeded:
        cycles = None
    report = EqualLengthReport(status="inconclusive", exhaustive="inconclusive")
    if cycles is not None:
        report.cycles_checked = len(cycles)
        pair = equal_length_arcdisjoint_pair(cycles)
        if pair is not None:
            report.status = report.exhaustive = "refuted"
            report.pair = pair
            return report
        report.status = report.exhaustive = "verified"
    if table is not None:
        report.structural = _structural_check(D, table, cycles, samples, seed, report.details)
        if report.status == "inconclusive":
            report.status = "verified" if report.structural == "verified" else "inconclusive"
        elif report.structural == "failed":
            report.status = "inconclusive"
    return report


def _structural_check(D, table, cycles, samples, seed, details) -> str:
    lengths = table.lengths()
    distinct = distinct_subset_sums(sorted(lengths.values()))
    if distinct is None:
        distinct = table.symbolic_distinct()
    details["subset_sums_distinct"] = distinct
    if not distinct:
        return "failed"
    pool = cycles if cycles is not None else sample_cycles(D, samples, seed)
    details["cycles_audited"] = len(pool)
    for c in pool:
        used = [a for a in cycle_arcs(c) if a in lengths]
        if len(c) != sum(lengths[a] for a in used):
            details["bad_cycle"] = list(c)
            return "failed"
    return "verified"


def brute_find_train(D: Digraph, k: int, max_vertices: int = 14,
                     max_steps: int = 10**7) -> KTrain | None:
    """Exhaustive k-train search; raises Inconclusive beyond the caps."""
    if D.n > max_vertices:
        raise Inconclusive(f"{D.n} vertices exceeds cap {max_vertices}")
    from .core import strong_components

    steps = 0
    for comp in strong_components(D):
        if len(comp) < k + 1:
            continue
        inside = set(comp)
        for u0 in comp:
            if not any(w in inside for w in D.inn[u0]):
                continue
            path = [u0]
            pos = {u0: 0}
            stack = [iter(w for w in D.out[u0] if w in inside)]
            while stack:
                steps += 1
                if steps > max_steps:
                    raise Inconclusive(f"step cap {max_steps} reached")
                nxt = next(stack[-1], None)
                if nxt is None:
                    stack.pop()
                    del pos[path.pop()]
                    continue
                if nxt in pos:
                    continue
                pos[nxt] = len(path)
                path.append(nxt)
                if D.has_arc(nxt, u0):
                    inner = sorted(pos[w] for w in D.out[nxt] if 0 < pos.get(w, 0) < len(path) - 1)
                    if len(inner) >= k - 1:
                        return KTrain(tuple(path), tuple([0] + inner[:k - 1]))
                stack.append(iter(w for w in D.out[nxt] if w in inside))
    return None


def brute_train_exists(D: Digraph, k: int, max_vertices: int = 14,
                       max_steps: int = 10**7) -> bool | None:
    """True/False when exact, None when the caps were exceeded."""
    try:
        return brute_find_train(D, k, max_vertices, max_steps) is not None
    except Inconclusive:
        return None
