"""Spectra of Laplace and Dirac operators on metric graphs.

Builds generalized discrete Laplacians on vertex spaces, evaluates the
associated Dirichlet-to-Neumann families, transfers spectra between the
metric and combinatorial levels, and cross-validates everything against
a conforming finite-element discretization.
"""

from .discrete import (assemble_d, assemble_delta0, assemble_delta1,
                       check_norm_bounds, check_supersymmetry)
from .errors import (GraphFormatError, InputError, NotAnEigenvalueError,
                     NumericalError, PoleWindowError, QgspecError,
                     ValidationError)
from .fem import (ConvergenceReport, FemSystem, assemble_fem,
                  fem_eigenvalues, fem_resolvent_apply, fem_spectrum,
                  sample_function)
from .graph import (Edge, GraphDocument, MetricGraph, SlotIndexing,
                    VertexSlot, opposite_slot, parse_complex_token,
                    parse_graph, serialize_graph, vertex_slots)
from .krein import (DiracSample, EigenfunctionSample, QEvaluation,
                    ab_parameters, beta_apply, beta_apply_dirac, eval_cs,
                    gram_beta, pole_flags, q_dirac, q_equilateral, q_general,
                    scattering_matrix)
from .linalg import (EigenDecomposition, eigenvalues, hermitian_eig,
                     hermitize, inertia, solve_hermitian)
from .spectral import (PairRoot, SpectralPoint, TransferRoot, cluster_values,
                       dirac_spectrum, dirac_sym_spectrum, discrete_spectrum,
                       dirichlet_points, eigenfunction,
                       metric_spectrum_equilateral, metric_spectrum_scan,
                       transfer_forward, transfer_inverse)
from .vertex_space import (VertexSpace, build_space, dual_space,
                           oriented_dual, projection, projection_blocks,
                           sign_vector)

__version__ = "0.1.0"
