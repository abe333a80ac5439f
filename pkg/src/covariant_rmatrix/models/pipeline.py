"""Run the requested checks on a ModelSpec and serialize the report."""

from __future__ import annotations

import json
import random
import time
import zlib
from dataclasses import dataclass, field
from functools import cached_property

from .. import __version__
from ..forms import Form, horizontal_diff, vertical_diff
from ..lax import (CheckResult, NotOrientable, cybe_terms, maurer_cartan, verify_cybe,
                   verify_single_time, verify_sklyanin, zero_curvature_check)
from ..linalg import NoInvertiblePivot
from ..oracle import confirm
from ..poisson import (DegenerateSingleTime, NotHamiltonian, energy_momentum,
                       hamilton_field_equations_check, hamiltonian)
from ..scalar import ZERO, Scalar, T, X, jet
from ..variational import (IBPResidualError, Lagrangian, multisymplectic,
                           quasisymmetry_check)
from .modelfile import CHECKS, ModelSpec

SCHEMA_VERSION = 1
CANONICAL_ORDER_VERSION = 1

# failures of the mathematics, reported as "fail" rather than "error"
MATH_ERRORS = (NotHamiltonian, DegenerateSingleTime, NotOrientable,
               IBPResidualError, NoInvertiblePivot)


@dataclass
class CheckRecord:
    name: str
    status: str  # pass | fail | skipped | error
    witness: dict = field(default_factory=dict)
    millis: float | None = None


@dataclass
class VerificationReport:
    model: str
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.status in ("pass", "skipped") for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "engine_version": __version__,
            "schema_version": SCHEMA_VERSION,
            "canonical_order_version": CANONICAL_ORDER_VERSION,
            "checks": [{"name": c.name, "status": c.status, "witness": c.witness,
                        "millis": c.millis} for c in self.checks],
        }


class ModelContext:
    """Lazily computed derived data shared between checks."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec

    @cached_property
    def lagrangian(self) -> Lagrangian:
        return Lagrangian(self.spec.lagrangian, self.spec.fields)

    @cached_property
    def data(self):
        return multisymplectic(self.lagrangian)

    @cached_property
    def energy(self):
        return energy_momentum(self.lagrangian, self.data)

    @cached_property
    def lax(self):
        return self.spec.lax_pair()

    @cached_property
    def r(self):
        return self.spec.r_matrix()


def _s(x) -> str:
    return str(x)


def _el_combination(factors: dict, EL: dict) -> Scalar:
    out = ZERO
    for k, c in factors.items():
        out = out + c * EL[k]
    return out


# each check returns (holds, witness, oracle pairs, expected verdict for the pairs)

def check_derive(ctx: ModelContext):
    L, M = ctx.lagrangian, ctx.data
    em = ctx.energy
    XH = hamiltonian(Form.scalar(em.hamiltonian), M)
    lhs = vertical_diff(L.volume_form()) + horizontal_diff(M.boundary_form)
    rhs = Form()
    for k in L.fields:
        rhs = rhs + Form.monomial(M.euler_lagrange[k], (jet(k),), (X, T))
    pairs = [(lhs, rhs), (M.omega, M.reassemble()), (em.hamiltonian, em.T_xx + em.T_tt + L.density)]
    holds = (lhs - rhs).is_zero and (M.omega - M.reassemble()).is_zero
    witness = {
        "euler_lagrange": {k: _s(v) for k, v in M.euler_lagrange.items()},
        "boundary_form": _s(M.boundary_form),
        "omega": _s(M.omega),
        "omega_x": _s(M.omega_x),
        "omega_t": _s(M.omega_t),
        "coordinates": [str(v) for v in M.coordinates],
        "nondegenerate": {"omega_x": M.nondegenerate_x, "omega_t": M.nondegenerate_t},
        "energy_momentum": {"T_xx": _s(em.T_xx), "T_xt": _s(em.T_xt),
                            "T_tx": _s(em.T_tx), "T_tt": _s(em.T_tt)},
        "hamiltonian": _s(em.hamiltonian),
        "X_H": _s(XH.vector_field),
        "X_H_kernel_dimension": len(XH.kernel_basis),
    }
    return holds, witness, pairs, True


def check_quasisymmetry(ctx: ModelContext):
    rep = quasisymmetry_check(ctx.lagrangian, ctx.data.boundary_form)
    witness = {"vacuous": rep.vacuous,
               "comparisons": [{"field": k, "mu": list(mu), "dx_coefficient": _s(a), "dt_coefficient": _s(b)}
                               for k, mu, a, b in rep.comparisons]}
    pairs = [(a, b) for _, _, a, b in rep.comparisons if (a == b) == rep.holds]
    return rep.holds, witness, pairs, rep.holds


def _diff_witness(diff: dict) -> list:
    return [{"entry": "⊗".join(k) if all(isinstance(x, str) for x in k) else str(k),
             "lhs": _s(a), "rhs": _s(b)} for k, (a, b) in sorted(diff.items())]


def _tensor_pairs(res: CheckResult, lhs, rhs):
    if res.holds:
        keys = set(lhs.entries) | set(rhs.entries)
        return [(lhs.entries.get(k, ZERO), rhs.entries.get(k, ZERO)) for k in sorted(keys)]
    return [v for _, v in sorted(res.diff.items())]


def check_sklyanin(ctx: ModelContext):
    res = verify_sklyanin(ctx.lax, ctx.r, ctx.data)
    lhs, rhs = res.detail["bracket"], res.detail["commutator"].in_basis(ctx.lax.kind)
    witness = {"r_matrix": ctx.r.name,
               "bracket": lhs.render(),
               "differences": _diff_witness(res.diff)}
    return res.holds, witness, _tensor_pairs(res, lhs, rhs), res.holds


def check_single_time(ctx: ModelContext):
    res = verify_single_time(ctx.lax, ctx.r, ctx.data)
    pairs = []
    for which in ("U", "V"):
        lhs, rhs = res.detail[which]
        pairs += _tensor_pairs(CheckResult(True), lhs, rhs) if res.holds else []
    if not res.holds:
        pairs = [v for _, v in sorted(res.diff.items())]
    witness = {"r_matrix": ctx.r.name, "signs": {"U": -1, "V": 1},
               "differences": _diff_witness(res.diff)}
    return res.holds, witness, pairs, res.holds


def check_cybe(ctx: ModelContext):
    holds, s = verify_cybe(ctx.r)
    pairs = [(c, ZERO) for _, c in sorted(s.entries.items())]
    if holds:
        # an all-zero sum gives nothing to sample; check the raw commutator terms instead
        a, b, c = cybe_terms(ctx.r)
        keys = set(a.entries) | set(b.entries) | set(c.entries)
        pairs = [(a.entries.get(k, ZERO) + b.entries.get(k, ZERO), -c.entries.get(k, ZERO))
                 for k in sorted(keys)]
    witness = {"r_matrix": ctx.r.name, "skew_symmetric": ctx.r.skew_symmetric(),
               "nonzero_entries": [{"entry": "⊗".join(k), "value": _s(v)} for k, v in sorted(s.entries.items())]}
    return holds, witness, pairs, holds


def _factor_witness(factors: dict) -> dict:
    out = {}
    for lbl, f in sorted(factors.items()):
        out[lbl] = None if f is None else {k: _s(c) for k, c in sorted(f.items())}
    return out


def check_zero_curvature(ctx: ModelContext):
    EL = ctx.data.euler_lagrange
    res = zero_curvature_check(ctx.lax, EL)
    R = res.detail["residual"]
    pairs = []
    for (lbl,), c in sorted(R.entries.items()):
        f = res.detail["factors"].get(lbl)
        if f is not None:
            pairs.append((c, _el_combination(f, EL)))
    witness = {"residual": R.render(),
               "el_factors": _factor_witness(res.detail["factors"]),
               "on_shell": _diff_witness(res.diff)}
    return res.holds, witness, pairs, True


def check_maurer_cartan(ctx: ModelContext):
    M = ctx.data
    res = maurer_cartan(ctx.lax, M, ctx.energy.hamiltonian)
    HW, UV = res.detail["HW"], res.detail["UV"]
    pairs = [(HW.entries.get(k, ZERO), UV.entries.get(k, ZERO))
             for k in sorted(set(HW.entries) | set(UV.entries))]
    for lbl, R in sorted(res.detail["residuals"].items()):
        f = res.detail["factors"].get(lbl)
        if R and f is not None:
            pairs.append((R, _el_combination(f, M.euler_lagrange)))
    witness = {"H_W": HW.render(), "U_V": UV.render(),
               "residual": {k: _s(v) for k, v in sorted(res.detail["residuals"].items())},
               "el_factors": _factor_witness(res.detail["factors"]),
               "on_shell": {k: _s(v) for k, v in sorted(res.detail["on_shell"].items())},
               "differences": _diff_witness(res.diff)}
    return res.holds, witness, pairs, not res.diff


def check_hamilton_field_equations(ctx: ModelContext):
    L, M = ctx.lagrangian, ctx.data
    res = hamilton_field_equations_check(L, M, ctx.energy.hamiltonian)
    pairs = []
    for k in L.fields:
        eps = res.signs.get(k)
        c = res.residual.coefficient((jet(k),), (X, T))
        if eps is not None:
            pairs.append((c, M.euler_lagrange[k] * eps))
    witness = {"residual": _s(res.residual),
               "signs": {k: v for k, v in sorted(res.signs.items())}}
    return res.holds, witness, pairs, True


CHECK_FUNCTIONS = {
    "derive": check_derive,
    "quasisymmetry": check_quasisymmetry,
    "sklyanin": check_sklyanin,
    "single-time": check_single_time,
    "cybe": check_cybe,
    "zero-curvature": check_zero_curvature,
    "maurer-cartan": check_maurer_cartan,
    "hamilton-field-equations": check_hamilton_field_equations,
}


def check_seed(model: str, check: str) -> int:
    return zlib.crc32(f"{model}:{check}".encode())


def run_check(name: str, ctx: ModelContext, oracle_samples: int = 20) -> CheckRecord:
    try:
        holds, witness, pairs, expect = CHECK_FUNCTIONS[name](ctx)
    except MATH_ERRORS as e:
        return CheckRecord(name, "fail", {"error": type(e).__name__, "message": str(e)})
    except Exception as e:  # infrastructure problem: record, keep going
        return CheckRecord(name, "error", {"error": type(e).__name__, "message": str(e)})
    if oracle_samples > 0 and pairs:
        rng = random.Random(check_seed(ctx.spec.name, name))
        try:
            agreed = confirm(pairs, expect, rng, oracle_samples)
        except Exception as e:
            return CheckRecord(name, "error", {"error": type(e).__name__, "message": str(e)})
        if not agreed:
            witness["oracle"] = "DISAGREEMENT between canonical verdict and rational evaluation"
            return CheckRecord(name, "error", witness)
        witness["oracle"] = f"confirmed at {oracle_samples} rational points"
    elif oracle_samples > 0:
        witness["oracle"] = "no identities to confirm"
    return CheckRecord(name, "pass" if holds else "fail", witness)


def run_pipeline(spec: ModelSpec, only: list | None = None, oracle_samples: int = 20,
                 timings: bool = False) -> VerificationReport:
    ctx = ModelContext(spec)
    wanted = set(only) if only else set(spec.checks)
    records = []
    for name in CHECKS:
        if name not in wanted:
            records.append(CheckRecord(name, "skipped"))
            continue
        t0 = time.perf_counter()
        rec = run_check(name, ctx, oracle_samples)
        if timings:
            rec.millis = round((time.perf_counter() - t0) * 1000, 1)
        records.append(rec)
    return VerificationReport(spec.name, records)


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    if fmt in ("json", "structured"):
        return (json.dumps(report.as_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"model: {report.model}  (engine {__version__})"]
    for c in report.checks:
        t = f"  {c.millis} ms" if c.millis is not None else ""
        lines.append(f"[{c.status.upper():7}] {c.name}{t}")
        for k, v in c.witness.items():
            lines.extend(_text_lines(k, v, 4))
    return ("\n".join(lines) + "\n").encode()


def _text_lines(key, value, indent: int) -> list:
    pad = " " * indent
    if isinstance(value, dict):
        if not value:
            return [f"{pad}{key}: {{}}"]
        out = [f"{pad}{key}:"]
        for k, v in value.items():
            out.extend(_text_lines(k, v, indent + 2))
        return out
    if isinstance(value, list):
        if not value:
            return [f"{pad}{key}: []"]
        out = [f"{pad}{key}:"]
        for i, v in enumerate(value):
            out.extend(_text_lines(f"- {i}", v, indent + 2) if isinstance(v, (dict, list))
                       else [f"{pad}  - {v}"])
        return out
    return [f"{pad}{key}: {value}"]
