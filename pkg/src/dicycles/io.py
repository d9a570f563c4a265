"""JSON and DOT serialization for digraphs and certificates."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path as FsPath
from typing import Any, Mapping

from .core import Arc, Digraph, DigraphError, build


def digraph_to_json(D: Digraph, weights: Mapping[Arc, Fraction] | None = None) -> dict:
    data: dict[str, Any] = {"n": D.n, "arcs": [list(a) for a in D.arcs]}
    if D.labels:
        data["labels"] = {str(v): s for v, s in sorted(D.labels.items())}
    if weights is not None:
        data["weights"] = [[u, v, Fraction(w).numerator, Fraction(w).denominator]
                           for (u, v), w in sorted(weights.items())]
    return data


def digraph_from_json(data: Mapping) -> tuple[Digraph, dict[Arc, Fraction] | None]:
    try:
        n = int(data["n"])
        arcs = [tuple(a) for a in data["arcs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DigraphError(f"malformed digraph JSON: {exc}") from None
    labels = {int(k): str(v) for k, v in data.get("labels", {}).items()}
    weights = None
    if "weights" in data:
        weights = {(u, v): Fraction(a, b) for u, v, a, b in data["weights"]}
    return build(n, arcs, labels), weights


def to_dot(D: Digraph, highlight: list[tuple[int, ...]] | None = None, name: str = "D") -> str:
    """Graphviz source; arcs on the highlighted cycles are drawn bold."""
    bold = set()
    for c in highlight or []:
        bold.update((c[i], c[(i + 1) % len(c)]) for i in range(len(c)))
    lines = [f"digraph {name} {{"]
    for v in D.vertices:
        label = D.labels.get(v)
        lines.append(f'  {v} [label="{label}"];' if label else f"  {v};")
    for u, v in D.arcs:
        lines.append(f"  {u} -> {v}{' [style=bold]' if (u, v) in bold else ''};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(data: Any) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def write_json(path: str | FsPath, data: Any) -> None:
    FsPath(path).write_text(dumps(data))


def read_json(path: str | FsPath) -> Any:
    return json.loads(FsPath(path).read_text())
