import numpy as np
import pytest

from modlayout.graph import Network, build_network
from modlayout.netgen import two_triangles


def random_network(rng, n, p=0.5, weighted=False, self_edges=False, vertex_weights="degree"):
    """Seeded G(n, p) network; at least one edge is always present."""
    iu, ju = np.triu_indices(n, 0 if self_edges else 1)
    keep = rng.random(iu.size) < p
    if not keep.any():
        keep[int(rng.integers(iu.size))] = True
    w = rng.uniform(0.1, 3.0, keep.sum()) if weighted else np.ones(keep.sum())
    labels = [str(i) for i in range(n)]
    net = Network.from_arrays(labels, np.zeros(n), iu[keep], ju[keep], w)
    if vertex_weights == "degree":
        return net.with_vertex_weights(net.degrees())
    if vertex_weights == "unit":
        return net.with_vertex_weights(np.ones(n))
    return net.with_vertex_weights(rng.uniform(0.0, 2.0, n))


@pytest.fixture
def triangles():
    """Two unit triangles joined by a unit bridge, degree vertex weights."""
    return two_triangles("degree")


@pytest.fixture
def dumbbell():
    return build_network([("u", "v", 1.0)], "unit")


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::test_criterion_" not in getattr(rep, "nodeid", ""):
                continue
            if rep.when != "call" and outcome == "passed":
                continue
            name = rep.nodeid.split("::test_criterion_")[1]
            num, _, title = name.partition("_")
            detail = dict(rep.user_properties).get("detail", "")
            status = "PASS" if outcome == "passed" else "FAIL"
            lines.append((int(num), f"criterion {int(num):2d} {status}  {title}: {detail}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
