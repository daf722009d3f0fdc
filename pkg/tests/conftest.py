import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from twincsp.graph import Graph  # noqa: E402

# 500 random graphs per property, n <= 8, each edge present with probability 1/2.
settings.register_profile(
    "default",
    max_examples=500,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    derandomize=True,
)
settings.register_profile("quick", max_examples=60, deadline=None, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def graphs(draw, min_n=0, max_n=8):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    bits = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    adj = [0] * n
    for (i, j), b in zip(pairs, bits):
        if b:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return Graph(adj)



@st.composite
def planted_twin_graphs(draw, max_n=8):
    """A random graph plus a copy of one of its vertex sets with the same external neighbours.

    The set and its copy are F-twins by construction, so properties about
    proper twins get exercised on every draw.
    """
    base = draw(graphs(min_n=2, max_n=max_n - 3))
    n = base.order
    k = draw(st.integers(2, 3))
    # grow a connected set so the planted twins have order above one when possible
    chosen = [draw(st.integers(0, n - 1))]
    for _ in range(k - 1):
        frontier = sorted({w for v in chosen for w in range(n) if base.has_edge(v, w)} - set(chosen))
        if not frontier:
            break
        chosen.append(draw(st.sampled_from(frontier)))
    chosen.sort()
    total = n + len(chosen)
    adj = list(base.adjacency) + [0] * len(chosen)
    copy = {v: n + i for i, v in enumerate(chosen)}
    inside = set(chosen)
    for v, c in copy.items():
        for w in range(n):
            if base.has_edge(v, w):
                target = copy[w] if w in inside else w
                adj[c] |= 1 << target
                adj[target] |= 1 << c
    assert total <= max_n
    return Graph(adj)


# (number, passed, detail) rows filled in by test_acceptance
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
