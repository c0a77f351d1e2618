import numpy as np
import pytest

from qgspec import (ValidationError, build_space, dual_space, oriented_dual,
                    parse_graph, projection, sign_vector)
from qgspec.graph import SpaceDecl
from qgspec.linalg import max_abs
from qgspec.random_data import random_graph, random_space
from qgspec.vertex_space import projection_blocks

from conftest import C3_TEXT, make


def test_standard_space_deg2():
    g = parse_graph(C3_TEXT).graph
    vs = build_space(g, {})
    for b in vs.bases:
        assert np.allclose(b, np.full((1, 2), 1.0 / np.sqrt(2)))
    assert vs.dim == 3


def test_dirichlet_space_is_zero_dimensional():
    g = parse_graph("vertices 4\nedge 0 0 1 1.0\nedge 1 0 2 1.0\nedge 2 0 3 1.0\n").graph
    vs = build_space(g, {0: SpaceDecl("dirichlet")})
    assert vs.dims[0] == 0
    assert vs.dims[1] == 1


def test_custom_rows_gram_schmidt():
    g = parse_graph("vertices 2\nedge 0 0 1 1.0\nedge 1 1 0 1.0\n").graph
    rows = ((1.0 + 0j, 0.0 + 0j), (1.0 + 0j, 1.0 + 0j))
    vs = build_space(g, {0: SpaceDecl("custom", rows)})
    assert vs.dims[0] == 2
    assert np.allclose(vs.bases[0], np.eye(2))


def test_dependent_custom_rows_drop_to_rank():
    g = parse_graph("vertices 2\nedge 0 0 1 1.0\nedge 1 1 0 1.0\n").graph
    rows = ((1.0, 1.0), (2.0, 2.0), (1.0, 0.0))
    vs = build_space(g, {0: SpaceDecl("custom", rows)})
    assert vs.dims[0] == 2


def test_all_rows_dropped_is_reported():
    g = parse_graph("vertices 2\nedge 0 0 1 1.0\n").graph
    with pytest.raises(ValidationError, match="dependent or zero"):
        build_space(g, {0: SpaceDecl("custom", ((0.0,),))})


def test_projection_examples():
    g, vs, _ = make(C3_TEXT)
    blocks = projection_blocks(vs)
    assert np.allclose(blocks[0], np.full((2, 2), 0.5))
    g2 = parse_graph("vertices 2\nedge 0 0 1 1.0\n").graph
    p_dir = projection_blocks(build_space(g2, {0: SpaceDecl("dirichlet"),
                                               1: SpaceDecl("dirichlet")}))
    assert np.allclose(p_dir[0], np.zeros((1, 1)))
    p_neu = projection_blocks(build_space(g2, {0: SpaceDecl("neumann"),
                                               1: SpaceDecl("neumann")}))
    assert np.allclose(p_neu[0], np.eye(1))


def test_projection_idempotent_hermitian():
    rng = np.random.default_rng(2)
    for _ in range(8):
        g = random_graph(rng, max_vertices=6)
        vs = random_space(rng, g)
        p = projection(vs)
        assert max_abs(p @ p - p) <= 1e-10
        assert max_abs(p - p.conj().T) <= 1e-12


def test_dual_space_examples():
    g = parse_graph("vertices 2\nedge 0 0 1 1.0\n").graph
    vs = build_space(g, {})
    dual = dual_space(vs)
    assert dual.dim == 0

    g3, vs3, _ = make(C3_TEXT)
    d3 = dual_space(vs3)
    assert np.allclose(np.abs(d3.bases[0]), np.full((1, 2), 1.0 / np.sqrt(2)))
    assert np.allclose(d3.bases[0] @ vs3.bases[0].conj().T, 0.0)


def test_dual_dual_spans_original():
    rng = np.random.default_rng(6)
    for _ in range(6):
        g = random_graph(rng, max_vertices=6)
        vs = random_space(rng, g)
        dd = dual_space(dual_space(vs))
        assert max_abs(projection(dd) - projection(vs)) <= 1e-10


def test_dims_complement():
    rng = np.random.default_rng(8)
    for _ in range(6):
        g = random_graph(rng, max_vertices=7)
        vs = random_space(rng, g)
        dual = dual_space(vs)
        for v in range(g.vertex_count):
            assert vs.dims[v] + dual.dims[v] == g.degree(v)
        assert max_abs(projection(vs) + projection(dual)
                       - np.eye(vs.n_slots)) <= 1e-12


def test_projection_is_block_local():
    rng = np.random.default_rng(4)
    g = random_graph(rng, max_vertices=6)
    vs = random_space(rng, g)
    p = projection(vs)
    for v in range(g.vertex_count):
        for w in range(g.vertex_count):
            if v == w:
                continue
            rows = np.asarray(g.slots.by_vertex[v])
            cols = np.asarray(g.slots.by_vertex[w])
            assert max_abs(p[np.ix_(rows, cols)]) == 0.0


def test_oriented_dual_examples():
    # vertex 0 carries slots [(e0,+), (e1,-)]
    g = parse_graph("vertices 3\nedge 0 1 0 1.0\nedge 1 0 2 1.0\n").graph
    vs = build_space(g, {})
    od = oriented_dual(vs)
    assert np.allclose(od.bases[0], np.full((1, 2), 1.0 / np.sqrt(2)))

    g2 = parse_graph("vertices 2\nedge 0 0 1 1.0\n").graph
    neu = build_space(g2, {0: SpaceDecl("neumann"), 1: SpaceDecl("neumann")})
    assert oriented_dual(neu).dim == 0


def test_oriented_dual_with_trivial_signs_is_dual():
    g, vs, _ = make(C3_TEXT)
    od = oriented_dual(vs, signs=np.ones(vs.n_slots))
    assert max_abs(projection(od) - projection(dual_space(vs))) <= 1e-12


def test_sign_vector_pattern():
    g = parse_graph("vertices 2\nedge 0 0 1 1.0\n").graph
    s = sign_vector(g)
    assert s.tolist() == [-1.0, 1.0]
