"""Model files: INI-like sections of ``key = expression`` lines.

A hand-rolled reader (rather than configparser) so that every value keeps
its line and column for error messages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..lax import BASES, BUILTIN_R, PAULI, LaxPair, RMatrix, TensorObject
from ..scalar import Scalar, to_text
from .expr import SPECTRAL, Context, ParseError, parse_scalar

CHECKS = ("derive", "quasisymmetry", "sklyanin", "single-time", "cybe",
          "zero-curvature", "maurer-cartan", "hamilton-field-equations")


@dataclass
class _Entry:
    key: str
    value: str
    line: int
    col: int  # column where the value starts


@dataclass
class ModelSpec:
    name: str
    fields: tuple
    parameters: tuple
    lagrangian: Scalar
    lax_U: dict
    lax_V: dict
    basis: str
    rmatrix: str  # built-in name or "explicit"
    rmatrix_entries: dict = field(default_factory=dict)  # (a, b) -> Scalar
    rmatrix_basis: str = ""
    checks: tuple = CHECKS

    def lax_pair(self) -> LaxPair:
        return LaxPair(self.basis, dict(self.lax_U), dict(self.lax_V))

    def r_matrix(self) -> RMatrix:
        if self.rmatrix == "explicit":
            return RMatrix(f"{self.name}-explicit",
                           TensorObject(self.rmatrix_basis or self.basis, dict(self.rmatrix_entries)))
        if self.rmatrix not in BUILTIN_R:
            raise KeyError(self.rmatrix)
        return BUILTIN_R[self.rmatrix]()


def _read_sections(text: str) -> dict:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        s = line.strip()
        if s.startswith("["):
            if not s.endswith("]"):
                raise ParseError("unterminated section header", lineno, raw.index("[") + 1)
            current = s[1:-1].strip()
            if current in sections:
                raise ParseError(f"duplicate section [{current}]", lineno, 1)
            sections[current] = []
            continue
        if current is None:
            raise ParseError("entry outside of a section", lineno, 1)
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, len(raw) - len(raw.lstrip()) + 1)
        k, v = line.split("=", 1)
        col = len(k) + 2 + (len(v) - len(v.lstrip()))
        sections[current].append(_Entry(k.strip(), v.strip(), lineno, col))
    return sections


def _listing(v: str) -> tuple:
    return tuple(x.strip() for x in v.split(",") if x.strip())


def parse_model(text: str) -> ModelSpec:
    sec = _read_sections(text)
    for required in ("model", "lagrangian", "lax"):
        if required not in sec:
            raise ParseError(f"missing section [{required}]", 1, 1)
    meta = {e.key: e for e in sec["model"]}
    for key in ("name", "fields"):
        if key not in meta:
            raise ParseError(f"[model] is missing '{key}'", 1, 1)
    fields = _listing(meta["fields"].value)
    params = _listing(meta["parameters"].value) if "parameters" in meta else ()
    for p in params:
        if p in SPECTRAL:
            e = meta["parameters"]
            raise ParseError(f"'{p}' is reserved for spectral parameters", e.line, e.col)
    basis = meta["basis"].value if "basis" in meta else PAULI
    if basis not in BASES:
        e = meta["basis"]
        raise ParseError(f"unknown basis {basis!r}", e.line, e.col)
    rname = meta["rmatrix"].value if "rmatrix" in meta else "rational"
    if rname != "explicit" and rname not in BUILTIN_R:
        e = meta["rmatrix"]
        raise ParseError(f"unknown r-matrix {rname!r}", e.line, e.col)
    checks = _listing(meta["checks"].value) if "checks" in meta else CHECKS
    for c in checks:
        if c not in CHECKS:
            e = meta["checks"]
            raise ParseError(f"unknown check {c!r}", e.line, e.col)

    def scalar(e: _Entry, allowed: tuple, forbidden: tuple) -> Scalar:
        ctx = Context(fields, tuple(params) + allowed, e.line, e.col, forbidden)
        return parse_scalar(e.value, ctx)

    lag = [e for e in sec["lagrangian"] if e.key == "density"]
    if len(lag) != 1:
        raise ParseError("[lagrangian] needs exactly one 'density' entry", 1, 1)
    density = scalar(lag[0], (), SPECTRAL)

    U, V = {}, {}
    for e in sec["lax"]:
        which, _, lbl = e.key.partition(".")
        if which not in ("U", "V") or lbl not in BASES[basis]:
            raise ParseError(f"bad Lax key {e.key!r} for basis {basis}", e.line, 1)
        (U if which == "U" else V)[lbl] = scalar(e, ("lambda",), ("mu", "nu"))

    r_entries, r_basis = {}, ""
    if rname == "explicit":
        if "rmatrix" not in sec:
            raise ParseError("rmatrix = explicit needs an [rmatrix] section", 1, 1)
        r_basis = basis
        for e in sec["rmatrix"]:
            if e.key == "basis":
                r_basis = e.value
                if r_basis not in BASES:
                    raise ParseError(f"unknown basis {r_basis!r}", e.line, e.col)
        for e in sec["rmatrix"]:
            if e.key == "basis":
                continue
            a, _, b = e.key.partition(".")
            if a not in BASES[r_basis] or b not in BASES[r_basis]:
                raise ParseError(f"bad r-matrix key {e.key!r}", e.line, 1)
            r_entries[(a, b)] = scalar(e, ("lambda", "mu"), ("nu",))

    return ModelSpec(meta["name"].value, fields, tuple(params), density, U, V, basis,
                     rname, r_entries, r_basis, tuple(checks))


def render(spec: ModelSpec) -> str:
    """Canonical text; ``parse_model(render(s)) == s``."""
    out = ["[model]",
           f"name = {spec.name}",
           f"fields = {', '.join(spec.fields)}"]
    if spec.parameters:
        out.append(f"parameters = {', '.join(spec.parameters)}")
    out += [f"basis = {spec.basis}",
            f"rmatrix = {spec.rmatrix}",
            f"checks = {', '.join(spec.checks)}",
            "",
            "[lagrangian]",
            f"density = {to_text(spec.lagrangian)}",
            "",
            "[lax]"]
    order = BASES[spec.basis]
    for which, comps in (("U", spec.lax_U), ("V", spec.lax_V)):
        for lbl in order:
            if lbl in comps:
                out.append(f"{which}.{lbl} = {to_text(comps[lbl])}")
    if spec.rmatrix == "explicit":
        out += ["", "[rmatrix]", f"basis = {spec.rmatrix_basis}"]
        rb = BASES[spec.rmatrix_basis]
        for (a, b) in sorted(spec.rmatrix_entries, key=lambda k: (rb.index(k[0]), rb.index(k[1]))):
            out.append(f"{a}.{b} = {to_text(spec.rmatrix_entries[(a, b)])}")
    return "\n".join(out) + "\n"


BUNDLED = {"sine-gordon": "sine-gordon.model", "nls": "nls.model", "mkdv": "mkdv.model"}


def bundled_path(name: str) -> Path:
    return Path(__file__).parent / "data" / BUNDLED[name]


def load_model(ref: str) -> ModelSpec:
    """Load from a path, or by bundled model name."""
    p = Path(ref)
    if not p.exists() and ref in BUNDLED:
        p = bundled_path(ref)
    return parse_model(p.read_text(encoding="utf-8"))
