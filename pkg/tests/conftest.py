"""Shared builders for the test suite.

All randomness flows through numpy Generators with fixed seeds so the
suite is reproducible run to run.
"""

import numpy as np
import pytest

from qgspec import build_space, parse_graph

C3_TEXT = """\
vertices 3
edge 0 0 1 1.0
edge 1 1 2 1.0
edge 2 2 0 1.0
"""

EDGE_TEXT = """\
vertices 2
edge 0 0 1 1.0
"""

PATH12_TEXT = """\
vertices 3
edge 0 0 1 1.0
edge 1 1 2 2.0
"""

LOOP_TEXT = """\
vertices 1
edge 0 0 0 1.0
"""

DIRICHLET_EDGE_TEXT = """\
vertices 2
edge 0 0 1 1.0
space 0 dirichlet
space 1 dirichlet
"""

MIXED_EDGE_TEXT = """\
vertices 2
edge 0 0 1 1.0
space 1 dirichlet
"""


def make(text):
    doc = parse_graph(text)
    vs = build_space(doc.graph, doc.spaces)
    return doc.graph, vs, doc


def zero_coupling(vs):
    return np.zeros((vs.dim, vs.dim), dtype=complex)


@pytest.fixture
def c3():
    return make(C3_TEXT)


@pytest.fixture
def unit_edge():
    return make(EDGE_TEXT)


@pytest.fixture
def path12():
    return make(PATH12_TEXT)


@pytest.fixture
def loop():
    return make(LOOP_TEXT)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
