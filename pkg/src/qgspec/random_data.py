"""Seeded random graphs, vertex spaces and couplings.

Used by the command-line checks and the property tests.  Everything is
driven by a numpy Generator so fixed seeds reproduce byte-identical
inputs across runs.
"""

from __future__ import annotations

import numpy as np

from .graph import Edge, MetricGraph
from .vertex_space import VertexSpace


def random_graph(rng: np.random.Generator, max_vertices: int = 8,
                 unit: bool = True, extra_edges: int | None = None) -> MetricGraph:
    """Connected-by-construction random multigraph, loops allowed."""
    nv = int(rng.integers(2, max_vertices + 1))
    edges = []
    eid = 0
    for v in range(1, nv):
        u = int(rng.integers(0, v))
        edges.append((eid, u, v, _length(rng, unit)))
        eid += 1
    if extra_edges is None:
        extra_edges = int(rng.integers(0, nv))
    for _ in range(extra_edges):
        u = int(rng.integers(0, nv))
        v = int(rng.integers(0, nv))
        edges.append((eid, u, v, _length(rng, unit)))
        eid += 1
    return MetricGraph(nv, [Edge(*e) for e in edges])


def _length(rng, unit):
    return 1.0 if unit else float(rng.uniform(0.2, 1.0))


def random_space(rng: np.random.Generator, g: MetricGraph,
                 allow_empty: bool = True) -> VertexSpace:
    """Random local vertex space with Haar-like orthonormal bases."""
    bases = []
    for v in range(g.vertex_count):
        deg = g.degree(v)
        low = 0 if allow_empty else 1
        dim = int(rng.integers(low, deg + 1))
        z = rng.normal(size=(deg, deg)) + 1j * rng.normal(size=(deg, deg))
        q, _ = np.linalg.qr(z)
        bases.append(q[:, :dim].T)
    return VertexSpace(g, bases)


def random_hermitian(rng: np.random.Generator, n: int,
                     scale: float = 1.0) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (z + z.conj().T) / 2.0


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_coords(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    norm = np.linalg.norm(z)
    return z / norm if norm else z
