import random

from hypothesis import strategies as st

from dicycles.core import build


def bidirected_complete(t):
    return build(t, [(a, b) for a in range(t) for b in range(t) if a != b])


def directed_cycle(n):
    return build(n, [(i, (i + 1) % n) for i in range(n)])


@st.composite
def digraphs(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    arcs = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return build(n, arcs)


@st.composite
def min_out_degree_digraphs(draw, k, max_n=16):
    """Random digraph in which every vertex has out-degree at least k."""
    n = draw(st.integers(k + 1, max_n))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    arcs = set()
    for v in range(n):
        others = [u for u in range(n) if u != v]
        for u in rng.sample(others, rng.randint(k, min(len(others), k + 3))):
            arcs.add((v, u))
    return build(n, sorted(arcs))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(RESULTS, key=lambda r: r.number):
        terminalreporter.write_line(r.line())
