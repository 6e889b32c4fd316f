import numpy as np
import pytest

from dsrfilter.dsrcell import CmCellParams, DsrCellParams

# reference element values of the fitted DM and CM unit cells
DM_REF = dict(l_line=7.4e-9, c_gap=0.9e-12, c_coup=217.5e-12, l_strip_half=0.8e-9, c_patch=13e-12)
CM_REF = dict(l_line=6e-9, c_gap=1e-12, c1=12e-12)


@pytest.fixture
def dm_ref():
    return DsrCellParams(**DM_REF)


@pytest.fixture
def cm_ref():
    return CmCellParams(**CM_REF)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def ladder_s21_s11(arms, z0=50.0):
    """Independent nodal-analysis oracle for a two-port ladder.

    ``arms`` is a list of ("series", Z) / ("shunt", Z) items from port 1 to
    port 2. Port 1 is driven by a 2 V source behind z0, port 2 is loaded by
    z0; then S21 = V2 and S11 = V1 - 1.
    """
    nodes = 1 + sum(1 for kind, _ in arms if kind == "series")
    Y = np.zeros((nodes, nodes), dtype=complex)
    I = np.zeros(nodes, dtype=complex)
    Y[0, 0] += 1 / z0
    I[0] = 2 / z0
    node = 0
    for kind, z in arms:
        if kind == "series":
            y = 1 / z
            Y[node, node] += y
            Y[node + 1, node + 1] += y
            Y[node, node + 1] -= y
            Y[node + 1, node] -= y
            node += 1
        else:
            if np.isinf(z):
                continue
            Y[node, node] += 1 / z
    Y[node, node] += 1 / z0
    v = np.linalg.solve(Y, I)
    return v[-1], v[0] - 1


def random_reactive_arms(rng, n_max=6):
    """Random ladder of reactive series/shunt L, C, series-LC and parallel-LC items."""
    n = rng.integers(1, n_max + 1)
    arms = []
    for _ in range(n):
        kind = "series" if rng.random() < 0.5 else "shunt"
        L = 10 ** rng.uniform(-10, -7.5)
        C = 10 ** rng.uniform(-13, -10.5)
        arms.append((kind, rng.choice(["L", "C", "LC", "L|C"]), L, C))
    return arms


def arm_impedance(shape, L, C, w):
    if shape == "L":
        return 1j * w * L
    if shape == "C":
        return 1 / (1j * w * C)
    if shape == "LC":
        return 1j * w * L + 1 / (1j * w * C)
    return 1 / (1 / (1j * w * L) + 1j * w * C)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
