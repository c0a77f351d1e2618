import numpy as np
import pytest

from qgspec import (ValidationError, assemble_d, assemble_delta0,
                    assemble_delta1, build_space, check_norm_bounds,
                    check_supersymmetry, parse_graph)
from qgspec.graph import HEAD, TAIL, Edge, MetricGraph, SpaceDecl
from qgspec.linalg import eigenvalues, max_abs, operator_norm
from qgspec.random_data import random_graph, random_space

from conftest import C3_TEXT, LOOP_TEXT, make


def test_single_edge_standard_d_and_delta():
    g, vs, _ = make("vertices 2\nedge 0 0 1 1.0\n")
    d = assemble_d(g, vs)
    assert np.allclose(d, np.array([[-1.0, 1.0]]))
    delta = assemble_delta0(g, vs)
    assert np.allclose(delta, np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert np.allclose(eigenvalues(delta), [0.0, 2.0])


def test_dirichlet_gives_empty_operator():
    g = parse_graph("vertices 2\nedge 0 0 1 1.0\n").graph
    vs = build_space(g, {0: SpaceDecl("dirichlet"), 1: SpaceDecl("dirichlet")})
    d = assemble_d(g, vs)
    assert d.shape == (1, 0)
    assert assemble_delta0(g, vs).shape == (0, 0)
    assert np.allclose(assemble_delta1(g, vs), np.zeros((1, 1)))


def test_self_loop_standard_derivative_vanishes():
    g, vs, _ = make(LOOP_TEXT)
    d = assemble_d(g, vs)
    assert d.shape == (1, 1)
    assert max_abs(d) == 0.0


def test_c3_standard_spectrum():
    g, vs, _ = make(C3_TEXT)
    w = eigenvalues(assemble_delta0(g, vs))
    assert np.allclose(np.sort(w), [0.0, 1.5, 1.5], atol=1e-12)


def test_length_two_neumann_block():
    g = MetricGraph(2, [Edge(0, 0, 1, 2.0)])
    vs = build_space(g, {0: SpaceDecl("neumann"), 1: SpaceDecl("neumann")})
    delta = assemble_delta0(g, vs)
    assert np.allclose(delta, 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert np.allclose(eigenvalues(delta), [0.0, 1.0])


def test_delta1_examples():
    g, vs, _ = make("vertices 2\nedge 0 0 1 1.0\n")
    assert np.allclose(assemble_delta1(g, vs), [[2.0]])
    g3, vs3, _ = make(C3_TEXT)
    w = eigenvalues(assemble_delta1(g3, vs3))
    assert np.allclose(np.sort(w), [0.0, 1.5, 1.5], atol=1e-12)


def test_supersymmetric_partner_spectra_agree():
    rng = np.random.default_rng(17)
    for _ in range(10):
        g = random_graph(rng, max_vertices=7, unit=False)
        vs = random_space(rng, g)
        w0 = [x for x in eigenvalues(assemble_delta0(g, vs)) if x > 1e-8]
        w1 = [x for x in eigenvalues(assemble_delta1(g, vs)) if x > 1e-8]
        assert len(w0) == len(w1)
        assert np.allclose(np.sort(w0), np.sort(w1), atol=1e-8)


def test_equilateral_spectrum_in_unit_band():
    rng = np.random.default_rng(23)
    for _ in range(10):
        g = random_graph(rng, max_vertices=8, unit=True)
        vs = random_space(rng, g)
        w = eigenvalues(assemble_delta0(g, vs))
        if w.size:
            assert w.min() >= -1e-10
            assert w.max() <= 2.0 + 1e-10


def test_supersymmetry_reflection_examples():
    g, vs, _ = make("vertices 2\nedge 0 0 1 1.0\n")
    rep = check_supersymmetry(g, vs)
    assert rep.passed and rep.paired == ()

    g3, vs3, _ = make(C3_TEXT)
    rep3 = check_supersymmetry(g3, vs3)
    assert rep3.passed
    stripped = sorted(x for x, _ in rep3.paired)
    assert np.allclose(stripped, [1.5, 1.5])


def test_supersymmetry_requires_unit_lengths():
    g, vs, _ = make("vertices 2\nedge 0 0 1 0.5\n")
    with pytest.raises(ValidationError, match="unit"):
        check_supersymmetry(g, vs)


def test_supersymmetry_random_spaces():
    rng = np.random.default_rng(31)
    for _ in range(20):
        g = random_graph(rng, max_vertices=8, unit=True)
        vs = random_space(rng, g)
        assert check_supersymmetry(g, vs).passed


def test_norm_bounds():
    rng = np.random.default_rng(37)
    for _ in range(12):
        g = random_graph(rng, max_vertices=7, unit=False)
        vs = random_space(rng, g)
        nd, ndelta, ok = check_norm_bounds(g, vs)
        assert ok, (nd, ndelta, g.length_min)


def test_standard_equivalence_with_weighted_combinatorial_laplacian():
    # conjugating by the degree isometry must reproduce the classical
    # difference operator with 1/length weights
    rng = np.random.default_rng(41)
    graphs = [parse_graph(C3_TEXT).graph,
              parse_graph("vertices 3\nedge 0 0 1 1.0\nedge 1 1 2 2.0\n").graph]
    graphs += [random_graph(rng, max_vertices=6, unit=False) for _ in range(6)]
    for g in graphs:
        vs = build_space(g, {})
        delta = assemble_delta0(g, vs).real
        n = g.vertex_count
        weighted = np.zeros((n, n))
        for e in g.edges:
            if e.tail == e.head:
                continue
            weighted[e.tail, e.tail] += 1.0 / e.length
            weighted[e.head, e.head] += 1.0 / e.length
            weighted[e.tail, e.head] -= 1.0 / e.length
            weighted[e.head, e.tail] -= 1.0 / e.length
        deg = np.array([g.degree(v) for v in range(n)], dtype=float)
        weighted = weighted / deg[:, None]
        conj = np.diag(np.sqrt(deg)) @ weighted @ np.diag(1.0 / np.sqrt(deg))
        assert max_abs(delta - conj) <= 1e-12


def test_adjoint_formula_entrywise():
    rng = np.random.default_rng(43)
    for _ in range(5):
        g = random_graph(rng, max_vertices=6, unit=False)
        vs = random_space(rng, g)
        d = assemble_d(g, vs)
        adj = d.conj().T
        # apply the projection formula to each rescaled edge indicator
        for i, e in enumerate(g.edges):
            eta = np.zeros(vs.n_slots, dtype=complex)
            w = np.sqrt(e.length) / e.length  # oriented 1/length weight
            eta[g.slot_index(e.edge_id, HEAD)] = w
            eta[g.slot_index(e.edge_id, TAIL)] = -w
            assert max_abs(vs.coordinates(eta) - adj[:, i]) <= 1e-12


def test_orientation_independence():
    base = parse_graph(C3_TEXT).graph
    flipped = MetricGraph(3, [Edge(0, 1, 0, 1.0), Edge(1, 1, 2, 1.0),
                              Edge(2, 2, 0, 1.0)])
    w_base = eigenvalues(assemble_delta0(base, build_space(base, {})))
    w_flip = eigenvalues(assemble_delta0(flipped, build_space(flipped, {})))
    assert np.allclose(np.sort(w_base), np.sort(w_flip), atol=1e-10)


def test_derivative_norm_bound_singular_value():
    rng = np.random.default_rng(47)
    for _ in range(8):
        g = random_graph(rng, max_vertices=6, unit=False)
        vs = random_space(rng, g)
        assert operator_norm(assemble_d(g, vs)) \
            <= np.sqrt(2.0 / g.length_min) + 1e-8
