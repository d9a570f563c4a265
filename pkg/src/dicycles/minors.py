"""Butterfly-minor models as replayable traces, and cycle lifting through them."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import (PASS, Arc, Check, Cycle, DefectError, Digraph, PreconditionError,
                   build, cycle_arcs, cycle_weight)

Weights = dict[Arc, Fraction]


@dataclass(frozen=True)
class Op:
    kind: str  # "dv" | "da" | "ca"
    args: tuple[int, ...]
    witness: str | None = None  # "tail": d+(u) = 1, "head": d-(v) = 1

    def to_json(self) -> dict:
        data = {"op": self.kind, "args": list(self.args)}
        if self.witness:
            data["witness"] = self.witness
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Op":
        return cls(data["op"], tuple(data["args"]), data.get("witness"))


@dataclass(frozen=True)
class MinorModel:
    source: Digraph
    ops: tuple[Op, ...]
    iso: Mapping[int, int]

    @property
    def t(self) -> int:
        return len(self.iso)

    def to_json(self) -> dict:
        return {"ops": [op.to_json() for op in self.ops],
                "iso": {str(k): v for k, v in sorted(self.iso.items())}}

    @classmethod
    def from_json(cls, data: dict, source: Digraph) -> "MinorModel":
        ops = tuple(Op.from_json(o) for o in data["ops"])
        return cls(source, ops, {int(k): int(v) for k, v in data["iso"].items()})


@dataclass
class State:
    """A digraph on an arbitrary vertex subset with arc weights."""

    vertices: set[int]
    weights: Weights

    @classmethod
    def of(cls, D: Digraph, w: Mapping[Arc, Fraction] | None = None) -> "State":
        if w is None:
            w = {a: Fraction(1) for a in D.arcs}
        return cls(set(D.vertices), {a: Fraction(w[a]) for a in D.arcs})

    def out(self, v: int) -> list[int]:
        return sorted(h for (t, h) in self.weights if t == v)

    def inn(self, v: int) -> list[int]:
        return sorted(t for (t, h) in self.weights if h == v)

    def copy(self) -> "State":
        return State(set(self.vertices), dict(self.weights))


@dataclass
class StepRecord:
    op: Op
    removed: int | None = None
    synthesized: dict[Arc, tuple[int, int, int]] = field(default_factory=dict)
    collisions: list[Arc] = field(default_factory=list)


def contract_state(S: State, e: Arc, witness: str | None = None) -> StepRecord:
    """Contract e in place; arcs that would become parallel keep the existing arc and weight."""
    u, v = e
    if e not in S.weights:
        raise PreconditionError(f"arc {e} not present")
    tail_ok = len(S.out(u)) == 1
    head_ok = len(S.inn(v)) == 1
    if witness is None:
        witness = "tail" if tail_ok else "head" if head_ok else None
    if witness == "tail" and not tail_ok or witness == "head" and not head_ok or witness is None:
        raise PreconditionError(f"arc {e} is not contractible as {witness or 'either'}")
    rec = StepRecord(Op("ca", e, witness))
    if witness == "tail":
        gone = u
        new = {(x, v): (x, u, v) for x in S.inn(u) if x != v}
        base = lambda a: S.weights[(a[0], u)] + S.weights[(u, v)]
    else:
        gone = v
        new = {(u, x): (u, v, x) for x in S.out(v) if x != u}
        base = lambda a: S.weights[(u, v)] + S.weights[(v, a[1])]
    added = {}
    for a, path in new.items():
        if a in S.weights:
            rec.collisions.append(a)
        else:
            added[a] = base(a)
            rec.synthesized[a] = path
    S.weights = {a: w for a, w in S.weights.items() if gone not in a}
    S.weights.update(added)
    S.vertices.discard(gone)
    rec.removed = gone
    return rec


def contract(D: Digraph, e: Arc, w: Mapping[Arc, Fraction] | None = None):
    """Contract a butterfly-contractible arc of D.

    Returns the contracted digraph (vertices renumbered densely), its weights,
    the id map ``keep[new] = old`` and the step record.
    """
    S = State.of(D, w)
    rec = contract_state(S, e)
    keep = sorted(S.vertices)
    idx = {v: i for i, v in enumerate(keep)}
    arcs = [(idx[a], idx[b]) for a, b in S.weights]
    weights = {(idx[a], idx[b]): x for (a, b), x in S.weights.items()}
    return build(len(keep), arcs), weights, tuple(keep), rec


def apply_op(S: State, op: Op) -> StepRecord:
    if op.kind == "dv":
        (v,) = op.args
        if v not in S.vertices:
            raise PreconditionError(f"vertex {v} not present")
        S.vertices.discard(v)
        S.weights = {a: w for a, w in S.weights.items() if v not in a}
        return StepRecord(op, removed=v)
    if op.kind == "da":
        a = tuple(op.args)
        if a not in S.weights:
            raise PreconditionError(f"arc {a} not present")
        del S.weights[a]
        return StepRecord(op)
    if op.kind == "ca":
        return contract_state(S, tuple(op.args), op.witness)
    raise PreconditionError(f"unknown op {op.kind!r}")


def replay(M: MinorModel, w: Mapping[Arc, Fraction] | None = None,
           snapshots: list[State] | None = None) -> tuple[State, list[StepRecord]]:
    """Apply the ops in order; ``snapshots`` (if given) collects the state before each op."""
    S = State.of(M.source, w)
    records = []
    for i, op in enumerate(M.ops):
        if snapshots is not None:
            snapshots.append(S.copy())
        try:
            records.append(apply_op(S, op))
        except PreconditionError as exc:
            raise PreconditionError(f"step {i}: {exc}") from None
    return S, records


def validate_model(M: MinorModel) -> Check:
    try:
        S, _ = replay(M)
    except PreconditionError as exc:
        return Check.fail(str(exc))
    if set(M.iso) != S.vertices:
        return Check.fail("terminal vertices differ from the iso domain")
    t = len(M.iso)
    if sorted(M.iso.values()) != list(range(t)):
        return Check.fail("iso is not onto 0..t-1")
    want = {(a, b) for a in M.iso for b in M.iso if a != b}
    if set(S.weights) != want:
        return Check.fail(f"terminal digraph is not the complete digraph on {t} vertices")
    return PASS


def complete_base_cycles(t: int, w: Mapping[Arc, Fraction], k: int) -> list[Cycle]:
    """k disjoint cycles of pairwise distinct weight in the complete digraph on 0..t-1."""
    if 2 * t < k * k + 3 * k:
        raise PreconditionError(f"t={t} is below (k^2+3k)/2 for k={k}")
    chosen: list[Cycle] = []
    taken: set[Fraction] = set()
    start = 0
    for i in range(1, k + 1):
        block = list(range(start, start + i + 1))
        start += i + 1
        pivot = block[0]
        others = sorted(block[1:], key=lambda v: (Fraction(w[(v, pivot)]), v))
        for j in range(1, i + 1):
            c = (pivot, *others[:j])
            cw = cycle_weight(c, w)
            if cw not in taken:
                taken.add(cw)
                chosen.append(c)
                break
        else:
            raise DefectError(f"block {i} offers no unused weight")
    return chosen


def lift_pack(M: MinorModel, w: Mapping[Arc, Fraction] | None, k: int,
              audit: bool = False) -> list[Cycle]:
    """Push weights through the model, pack in the terminal, lift the cycles back.

    With ``audit`` every intermediate lift is checked against the weights of
    the digraph at that step.
    """
    chk = validate_model(M)
    if not chk:
        raise PreconditionError(f"invalid model: {chk.reason}")
    if w is None:
        w = {a: Fraction(1) for a in M.source.arcs}
    for a in M.source.arcs:
        if a not in w or Fraction(w[a]) <= 0:
            raise PreconditionError(f"weight of {a} missing or not positive")
    states: list[State] | None = [] if audit else None
    final, records = replay(M, w, states)
    inv = {kt: v for v, kt in M.iso.items()}
    kt_w = {(M.iso[a], M.iso[b]): x for (a, b), x in final.weights.items()}
    base = complete_base_cycles(M.t, kt_w, k)
    cycles = [tuple(inv[v] for v in c) for c in base]
    target = [cycle_weight(c, final.weights) for c in cycles]
    for step in range(len(records) - 1, -1, -1):
        rec = records[step]
        if rec.op.kind == "ca":
            _lift_step(cycles, rec)
        if states is not None:
            for c, tw in zip(cycles, target):
                here = states[step]
                if any(a not in here.weights for a in cycle_arcs(c)) or cycle_weight(c, here.weights) != tw:
                    raise DefectError(f"weight drift at step {step} on cycle {c}")
    src = {a: Fraction(w[a]) for a in M.source.arcs}
    for c, tw in zip(cycles, target):
        if cycle_weight(c, src) != tw:
            raise DefectError(f"lifted cycle {c} changed weight")
    return cycles


def _lift_step(cycles: list[Cycle], rec: StepRecord) -> None:
    """Undo one contraction on the cycle list, in place."""
    changed = 0
    for i, c in enumerate(cycles):
        hits = [a for a in cycle_arcs(c) if a in rec.synthesized]
        if not hits:
            continue
        if len(hits) > 1 or changed:
            raise DefectError(f"two synthesized arcs through contracted vertex {rec.removed}")
        changed += 1
        cycles[i] = _splice(c, hits[0], rec.synthesized[hits[0]])


def _splice(c: Cycle, arc: Arc, path: tuple[int, int, int]) -> Cycle:
    i = c.index(arc[0])
    return c[:i + 1] + (path[1],) + c[i + 1:]


def distinct_length_pack_via_minor(D: Digraph, M: MinorModel, k: int) -> list[Cycle]:
    if M.source != D:
        raise PreconditionError("model source differs from D")
    cycles = lift_pack(M, None, k)
    if len({len(c) for c in cycles}) != len(cycles):
        raise DefectError("unit-weight lift produced equal lengths")
    return cycles


def identity_model(D: Digraph) -> MinorModel:
    return MinorModel(D, (), {v: v for v in D.vertices})


def expansion_model(t: int, seed: int, max_ops: int = 30) -> MinorModel:
    """Random expansion of the complete digraph on t vertices, returned as a contraction model.

    Every expansion step is undone by one op (subdivisions and splits by a
    contraction, junk by a deletion), so the model is valid by construction.
    A bypass step subdivides a copy of an arc while keeping the arc, which
    exercises contraction collisions.
    """
    rng = random.Random(seed)
    arcs = {(a, b) for a in range(t) for b in range(t) if a != b}
    n = t
    inverse: list[Op] = []
    steps = rng.randint(1, max_ops)
    for _ in range(steps):
        kind = rng.choice(["sub", "sub", "tsplit", "hsplit", "bypass", "jv", "ja"])
        s = n
        if kind in ("sub", "bypass"):
            a, b = rng.choice(sorted(arcs))
            if kind == "sub":
                arcs.discard((a, b))
            arcs |= {(a, s), (s, b)}
            inverse.append(Op("ca", (s, b), "tail"))
        elif kind == "tsplit":
            v = rng.randrange(n)
            ins = sorted(x for x, y in arcs if y == v)
            moved = rng.sample(ins, rng.randint(1, len(ins))) if ins else []
            for x in moved:
                arcs.discard((x, v))
                arcs.add((x, s))
            arcs.add((s, v))
            inverse.append(Op("ca", (s, v), "tail"))
        elif kind == "hsplit":
            v = rng.randrange(n)
            outs = sorted(y for x, y in arcs if x == v)
            moved = rng.sample(outs, rng.randint(1, len(outs))) if outs else []
            for y in moved:
                arcs.discard((v, y))
                arcs.add((s, y))
            arcs.add((v, s))
            inverse.append(Op("ca", (v, s), "head"))
        elif kind == "jv":
            for x in rng.sample(range(n), min(n, 3)):
                arcs.add((x, s) if rng.random() < 0.5 else (s, x))
            inverse.append(Op("dv", (s,)))
        else:
            free = [(a, b) for a in range(n) for b in range(n) if a != b and (a, b) not in arcs]
            if not free:
                continue
            a = rng.choice(free)
            arcs.add(a)
            inverse.append(Op("da", a))
            continue
        n += 1
    D = build(n, sorted(arcs))
    return MinorModel(D, tuple(reversed(inverse)), {v: v for v in range(t)})


def random_weights(D: Digraph, seed: int) -> Weights:
    rng = random.Random(seed)
    return {a: Fraction(rng.randint(1, 20), rng.randint(1, 10)) for a in D.arcs}


__all__ = [
    "Op", "MinorModel", "State", "StepRecord", "contract", "contract_state", "apply_op",
    "replay", "validate_model", "complete_base_cycles", "lift_pack",
    "distinct_length_pack_via_minor", "identity_model", "expansion_model", "random_weights",
]
