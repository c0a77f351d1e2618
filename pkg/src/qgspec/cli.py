"""Command-line front end.

All numeric output is CSV on standard output with a schema version in a
leading comment line and 12 significant digits.  Exit codes: 0 success,
1 input error (bad document, bad flags), 2 numerical failure
(non-convergence, singular solve, pole window, failing check).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import checks as checks_mod
from .discrete import assemble_delta0
from .errors import InputError, NumericalError, QgspecError, ValidationError
from .fem import assemble_fem, fem_resolvent_apply, fem_spectrum
from .graph import GraphDocument, parse_complex_token, parse_graph
from .krein import q_general, scattering_matrix
from .linalg import eigenvalues
from .spectral import (SOURCE_ORACLE, SpectralPoint, cluster_values,
                       dirac_spectrum, dirac_sym_spectrum, discrete_spectrum,
                       eigenfunction, metric_spectrum_equilateral,
                       metric_spectrum_scan)
from .vertex_space import build_space

SIG = ".12g"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _fmt(x: float) -> str:
    return format(float(x), SIG)


def _print_spectra(points):
    print("# qgspec spectra v1")
    print("value,multiplicity,source,residual")
    for p in points:
        print(f"{_fmt(p.value)},{p.multiplicity},{p.source},{_fmt(p.residual)}")


def _print_matrix(m: np.ndarray):
    rows, cols = m.shape
    print(f"# qgspec matrix v1 rows={rows} cols={cols}")
    for i in range(rows):
        cells = []
        for j in range(cols):
            z = complex(m[i, j])
            cells.append(f"{_fmt(z.real)},{_fmt(z.imag)}")
        print(",".join(cells))


def _print_checks(results):
    print("# qgspec checks v1")
    print("name,status,detail")
    for r in results:
        detail = r.detail.replace(",", ";")
        print(f"{r.name},{r.status},{detail}")


def _print_samples(named_samples, graph):
    print("# qgspec samples v1")
    print("function,edge,x,re,im")
    for fi, sample in enumerate(named_samples):
        for ei, e in enumerate(graph.edges):
            xs = np.linspace(0.0, e.length, sample.n + 1)
            vals = sample.samples[ei]
            for x, v in zip(xs, vals):
                print(f"{fi},{e.edge_id},{_fmt(x)},{_fmt(v.real)},{_fmt(v.imag)}")


def load_document(path: str) -> GraphDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parse_graph(text)


def coupling_matrix(doc: GraphDocument, dim: int,
                    override_scalar: float | None = None) -> np.ndarray:
    if override_scalar is not None:
        return override_scalar * np.eye(dim, dtype=complex)
    decl = doc.coupling
    if decl.kind == "zero":
        return np.zeros((dim, dim), dtype=complex)
    if decl.kind == "scalar":
        return decl.scalar * np.eye(dim, dtype=complex)
    rows = np.array(decl.rows, dtype=complex).reshape(len(decl.rows), -1)
    if rows.shape != (dim, dim):
        raise ValidationError(
            f"dense coupling is {rows.shape[0]}x{rows.shape[1]} but the "
            f"vertex space has dimension {dim}")
    defect = np.abs(rows - rows.conj().T).max() if rows.size else 0.0
    if defect > 1e-12 * (1.0 + np.abs(rows).max(initial=0.0)):
        raise ValidationError("dense coupling matrix must be Hermitian")
    return (rows + rows.conj().T) / 2.0


def scalar_coupling_value(doc: GraphDocument,
                          override: float | None) -> float:
    if override is not None:
        return override
    if doc.coupling.kind == "zero":
        return 0.0
    if doc.coupling.kind == "scalar":
        return doc.coupling.scalar
    raise InputError("this command needs a scalar coupling; the document "
                     "declares a dense one (use `scan` instead)")


def build_parser() -> _Parser:
    p = _Parser(prog="qgspec",
                description="Spectra of Laplace and Dirac operators on "
                            "metric graphs")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("graph", help="graph description file")
        return sp

    sp = add("discrete", "spectrum (or matrix) of the discrete Laplacian")
    sp.add_argument("--matrix", action="store_true",
                    help="print the matrix instead of its spectrum")

    sp = add("spectrum", "metric Laplace spectrum by the transfer map "
                         "(unit lengths, scalar coupling)")
    sp.add_argument("--range", nargs=2, type=float, default=(0.0, 20.0),
                    metavar=("A", "B"))
    sp.add_argument("--coupling-scalar", type=float, default=None)

    sp = add("scan", "metric Laplace spectrum by spectral flow")
    sp.add_argument("--range", nargs=2, type=float, required=True,
                    metavar=("A", "B"))
    sp.add_argument("--grid", type=int, default=64,
                    help="grid points per unit interval")
    sp.add_argument("--coupling-scalar", type=float, default=None)

    sp = add("qfunction", "print Q(z)")
    sp.add_argument("--z", required=True,
                    help="complex token, e.g. 2.5 or 1.0+0.5i")

    sp = add("scattering", "print the vertex scattering matrix S(mu)")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--coupling-scalar", type=float, default=None)

    sp = add("dirac", "Dirac spectrum (unit lengths, scalar coupling)")
    sp.add_argument("--range", nargs=2, type=float, default=(-10.0, 10.0),
                    metavar=("A", "B"))
    sp.add_argument("--mass", type=float, default=None)
    sp.add_argument("--coupling-scalar", type=float, default=None)
    sp.add_argument("--check-mu", type=float, default=None,
                    help="membership check at one spectral point "
                         "(works for dense couplings)")

    sp = add("dirac-sym", "symmetric-component Dirac pair-condition roots")
    sp.add_argument("--range", nargs=2, type=float, required=True,
                    metavar=("A", "B"))
    sp.add_argument("--mass", type=float, default=None)
    sp.add_argument("--grid", type=int, default=512)

    sp = add("eigenfunction", "sample an eigenspace basis")
    sp.add_argument("--lam", type=float, required=True)
    sp.add_argument("--samples", type=int, default=400)
    sp.add_argument("--coupling-scalar", type=float, default=None)

    sp = add("oracle", "finite-element reference eigenvalues / resolvent")
    sp.add_argument("--h", type=float, default=1.0 / 128)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--coupling-scalar", type=float, default=None)
    sp.add_argument("--resolve", default=None, metavar="Z",
                    help="apply (K - zM)^{-1}M to the constant 1 instead")

    spc = sub.add_parser("check", help="run numerical invariant checks")
    spc.add_argument("name_or_graph")
    spc.add_argument("graph", nargs="?")
    spc.add_argument("--seed", type=int, default=0)
    return p


def _cmd_check(args) -> int:
    if args.graph is None:
        name, path = None, args.name_or_graph
    else:
        name, path = args.name_or_graph, args.graph
        if name not in checks_mod.CHECK_NAMES:
            raise InputError(
                f"unknown check {name!r}; choose from "
                f"{', '.join(checks_mod.CHECK_NAMES)}")
    doc = load_document(path)
    vs = build_space(doc.graph, doc.spaces)
    coupling = coupling_matrix(doc, vs.dim)
    names = [name] if name else None
    results = checks_mod.run_all(doc.graph, vs, coupling, seed=args.seed,
                                 names=names)
    _print_checks(results)
    return 2 if any(r.status == "FAIL" for r in results) else 0


def run(argv) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return _cmd_check(args)

    doc = load_document(args.graph)
    g = doc.graph
    vs = build_space(g, doc.spaces)

    if args.command == "discrete":
        delta = assemble_delta0(g, vs)
        if args.matrix:
            _print_matrix(delta)
        else:
            _print_spectra(discrete_spectrum(delta))
    elif args.command == "spectrum":
        lo, hi = args.range
        c = scalar_coupling_value(doc, args.coupling_scalar)
        points = [p for p in metric_spectrum_equilateral(g, vs, c, hi)
                  if p.value >= lo]
        _print_spectra(points)
    elif args.command == "scan":
        lo, hi = args.range
        coupling = coupling_matrix(doc, vs.dim, args.coupling_scalar)
        _print_spectra(metric_spectrum_scan(g, vs, coupling, lo, hi,
                                            args.grid))
    elif args.command == "qfunction":
        try:
            z = parse_complex_token(args.z)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        _print_matrix(q_general(g, vs, z).matrix)
    elif args.command == "scattering":
        coupling = coupling_matrix(doc, vs.dim, args.coupling_scalar)
        _print_matrix(scattering_matrix(vs, coupling, args.mu))
    elif args.command == "dirac":
        m = doc.mass if args.mass is None else args.mass
        if args.check_mu is not None:
            _dirac_membership(doc, g, vs, m, args.check_mu,
                              args.coupling_scalar)
        else:
            c = scalar_coupling_value(doc, args.coupling_scalar)
            lo, hi = args.range
            _print_spectra(dirac_spectrum(g, vs, c, m, lo, hi))
    elif args.command == "dirac-sym":
        m = doc.mass if args.mass is None else args.mass
        lo, hi = args.range
        roots = dirac_sym_spectrum(g, vs, m, lo, hi, args.grid)
        _print_spectra([r.point for r in roots])
    elif args.command == "eigenfunction":
        coupling = coupling_matrix(doc, vs.dim, args.coupling_scalar)
        samples = eigenfunction(g, vs, coupling, args.lam, args.samples)
        _print_samples(samples, g)
    elif args.command == "oracle":
        coupling = coupling_matrix(doc, vs.dim, args.coupling_scalar)
        if args.resolve is not None:
            try:
                z = parse_complex_token(args.resolve)
            except ValueError as exc:
                raise InputError(str(exc)) from None
            sys_fem = assemble_fem(g, vs, coupling, args.h)
            ones = [np.ones(257, dtype=complex) for _ in g.edges]
            _print_samples([fem_resolvent_apply(sys_fem, z, ones)], g)
        else:
            reports = fem_spectrum(g, vs, coupling, args.h, args.count)
            points = []
            for rep, mult in cluster_values(
                    [r.extrapolated for r in reports], 1e-3):
                resid = min(abs(r.coarse - r.fine) for r in reports
                            if abs(r.extrapolated - rep) <= 1e-3 * (1 + abs(rep)))
                points.append(SpectralPoint(rep, mult, SOURCE_ORACLE, resid))
            _print_spectra(points)
    else:  # pragma: no cover - argparse enforces the choices
        raise InputError(f"unknown command {args.command!r}")
    return 0


def _dirac_membership(doc, g, vs, m, mu, override_scalar):
    """Pointwise membership check 0 in spec(Q(mu^2-m^2) - (mu+m) M)."""
    coupling = coupling_matrix(doc, vs.dim, override_scalar)
    q = q_general(g, vs, mu * mu - m * m).matrix
    w = eigenvalues(q - (mu + m) * coupling)
    smallest = float(np.abs(w).min()) if w.size else float("inf")
    member = smallest <= 1e-8 * (1.0 + float(np.abs(w).max(initial=0.0)))
    _print_checks([checks_mod.CheckResult(
        "dirac-membership", "PASS" if member else "FAIL",
        f"smallest |eigenvalue| of Q - (mu+m)M at mu={mu:g}: {smallest:.6e}")])


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except QgspecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
