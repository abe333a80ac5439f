"""Command line: derive / verify / report / list-models.

Exit codes: 0 all requested checks pass, 1 some check failed or errored,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys

from ..forms import Form
from ..poisson import DegenerateSingleTime, hamiltonian, single_time_brackets
from .expr import ParseError
from .modelfile import BUNDLED, CHECKS, bundled_path, load_model
from .pipeline import ModelContext, emit_report, run_pipeline


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="covariant-rmatrix", description=__doc__.splitlines()[0])
    p.add_argument("--oracle-samples", type=int, default=20,
                   help="random rational points used to confirm exact verdicts (0 disables)")
    p.add_argument("--timings", action="store_true",
                   help="record per-check wall time (makes reports non-reproducible)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    d = sub.add_parser("derive", help="print EL expressions, ω, Ω, H and X_H")
    d.add_argument("model")
    v = sub.add_parser("verify", help="run checks and print a short summary")
    v.add_argument("model")
    v.add_argument("--check", action="append", choices=CHECKS, dest="checks")
    r = sub.add_parser("report", help="run checks and emit the full report")
    r.add_argument("model")
    r.add_argument("--format", choices=("text", "json", "structured"), default="text")
    r.add_argument("--check", action="append", choices=CHECKS, dest="checks")
    sub.add_parser("list-models", help="list the bundled models")
    return p


def _load(ref: str):
    try:
        return load_model(ref)
    except FileNotFoundError:
        print(f"error: no such model file or bundled model: {ref}", file=sys.stderr)
        raise SystemExit(2)
    except ParseError as e:
        print(f"error: {ref}: {e}", file=sys.stderr)
        raise SystemExit(2)


def _derive(spec) -> int:
    ctx = ModelContext(spec)
    M, em = ctx.data, ctx.energy
    out = [f"model: {spec.name}"]
    for k, A in M.euler_lagrange.items():
        out.append(f"A_{k} = {A}")
    out.append(f"omega^(1,1) = {M.boundary_form}")
    out.append(f"Omega = {M.omega}")
    out.append(f"Omega_x = {M.omega_x}")
    out.append(f"Omega_t = {M.omega_t}")
    out.append(f"S_Omega = {', '.join(str(v) for v in M.coordinates)}")
    out.append(f"T_xx = {em.T_xx}")
    out.append(f"T_tt = {em.T_tt}")
    out.append(f"H = {em.hamiltonian}")
    out.append(f"X_H = {hamiltonian(Form.scalar(em.hamiltonian), M).vector_field}")
    try:
        st = single_time_brackets(M)
        out.append("pi_S on (" + ", ".join(map(str, st.coords_S)) + "): "
                   + str([[str(x) for x in row] for row in st.pi_S]))
        out.append("pi_T on (" + ", ".join(map(str, st.coords_T)) + "): "
                   + str([[str(x) for x in row] for row in st.pi_T]))
    except DegenerateSingleTime as e:
        out.append(str(e))
    print("\n".join(out))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-models":
        for name in BUNDLED:
            print(f"{name}\t{bundled_path(name)}")
        return 0
    spec = _load(args.model)
    if args.command == "derive":
        return _derive(spec)
    report = run_pipeline(spec, only=args.checks, oracle_samples=args.oracle_samples,
                          timings=args.timings)
    if args.command == "verify":
        for c in report.checks:
            print(f"{c.status:8} {c.name}")
    else:
        fmt = "json" if args.format == "structured" else args.format
        sys.stdout.write(emit_report(report, fmt).decode())
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
