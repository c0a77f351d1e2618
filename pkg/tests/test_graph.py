import numpy as np
import pytest

from qgspec import (GraphFormatError, MetricGraph, ValidationError,
                    opposite_slot, parse_graph, serialize_graph, vertex_slots)
from qgspec.graph import HEAD, TAIL, Edge, parse_complex_token
from qgspec.random_data import random_graph

from conftest import C3_TEXT, LOOP_TEXT, PATH12_TEXT


def test_minimal_document():
    doc = parse_graph("vertices 2\nedge 0 0 1 1.0\n")
    g = doc.graph
    assert g.vertex_count == 2
    assert len(g.edges) == 1
    assert g.edges[0].length == 1.0


def test_triangle_document():
    g = parse_graph(C3_TEXT).graph
    assert g.vertex_count == 3
    assert all(g.degree(v) == 2 for v in range(3))


def test_dangling_endpoint_rejected():
    with pytest.raises(ValidationError, match="endpoint 5"):
        parse_graph("vertices 3\nedge 0 0 1 1.0\nedge 1 0 5 1.0\n")


def test_bad_length_rejected():
    for bad in ("0.0", "-1.0", "inf", "nan"):
        with pytest.raises(ValidationError):
            parse_graph(f"vertices 2\nedge 0 0 1 {bad}\n")


def test_duplicate_edge_id_rejected():
    with pytest.raises(ValidationError, match="duplicate edge_id"):
        parse_graph("vertices 2\nedge 0 0 1 1.0\nedge 0 1 0 1.0\n")


def test_isolated_vertex_rejected():
    with pytest.raises(ValidationError, match="isolated"):
        parse_graph("vertices 3\nedge 0 0 1 1.0\n")


def test_syntax_error_carries_line_number():
    with pytest.raises(GraphFormatError, match="line 3"):
        parse_graph("vertices 2\nedge 0 0 1 1.0\nbogus directive\n")


def test_single_edge_slots():
    g = parse_graph("vertices 2\nedge 0 0 1 1.0\n").graph
    idx = vertex_slots(g)
    assert idx.degrees == (1, 1)
    assert idx.slots[0].end == TAIL and idx.slots[0].vertex == 0
    assert idx.slots[1].end == HEAD and idx.slots[1].vertex == 1


def test_self_loop_slots():
    g = parse_graph(LOOP_TEXT).graph
    idx = vertex_slots(g)
    assert idx.degrees == (2,)
    assert [s.end for s in idx.slots] == [TAIL, HEAD]


def test_c3_canonical_slot_order():
    g = parse_graph(C3_TEXT).graph
    idx = vertex_slots(g)
    v1 = [idx.slots[i] for i in idx.by_vertex[1]]
    assert [(s.edge, s.end) for s in v1] == [(0, HEAD), (1, TAIL)]
    assert idx.degrees == (2, 2, 2)


def test_opposite_slot_examples():
    g = parse_graph(C3_TEXT).graph
    s = g.slots.slots[g.slot_index(0, HEAD)]
    assert opposite_slot(g, s).end == TAIL
    assert opposite_slot(g, s).vertex == 0
    loop = parse_graph(LOOP_TEXT).graph
    sl = loop.slots.slots[0]
    assert opposite_slot(loop, sl).vertex == 0
    assert opposite_slot(loop, sl).end == HEAD


def test_opposite_is_involutive_on_c3():
    g = parse_graph(C3_TEXT).graph
    for s in g.slots.slots:
        assert opposite_slot(g, opposite_slot(g, s)) == s


def test_slot_enumeration_bijective():
    g = parse_graph(PATH12_TEXT).graph
    pairs = {(s.edge, s.end) for s in g.slots.slots}
    expected = {(e.edge_id, end) for e in g.edges for end in (TAIL, HEAD)}
    assert pairs == expected
    assert len(g.slots.slots) == 2 * len(g.edges)


def test_degree_sum_property():
    rng = np.random.default_rng(7)
    for _ in range(25):
        g = random_graph(rng, max_vertices=8, unit=False)
        assert sum(g.slots.degrees) == 2 * len(g.edges)


def test_roundtrip_identity():
    text = """\
vertices 3
edge 0 0 1 0.75
edge 1 1 2 1.0
space 0 neumann
space 1 custom 1
0.5+0.5i 0.5-0.5i
space 2 dirichlet
coupling dense 3
1.0 0.0+1.0i 0.0
0.0-1.0i 2.0 0.0
0.0 0.0 -1.0
mass 0.5
"""
    doc1 = parse_graph(text)
    canon = serialize_graph(doc1)
    doc2 = parse_graph(canon)
    assert serialize_graph(doc2) == canon
    assert doc2.graph.edges == doc1.graph.edges
    assert doc2.spaces == doc1.spaces
    assert doc2.coupling == doc1.coupling
    assert doc2.mass == doc1.mass


def test_complex_token_grammar():
    assert parse_complex_token("1.5") == 1.5
    assert parse_complex_token("2+3i") == 2 + 3j
    assert parse_complex_token("-1.2-0.5i") == -1.2 - 0.5j
    assert parse_complex_token("1e-3+2e-4i") == 1e-3 + 2e-4j
    with pytest.raises(ValueError):
        parse_complex_token("3i")
    with pytest.raises(ValueError):
        parse_complex_token("pi")


def test_edges_sorted_by_id():
    g = MetricGraph(2, [Edge(5, 0, 1, 1.0), Edge(1, 1, 0, 0.5)])
    assert [e.edge_id for e in g.edges] == [1, 5]


def test_multi_edges_supported():
    g = parse_graph("vertices 2\nedge 0 0 1 1.0\nedge 1 0 1 1.0\n").graph
    assert g.degree(0) == 2 and g.degree(1) == 2
