"""sl(2)-valued forms, auxiliary-space tensors, r-matrices and the
verification routines built on top of the covariant bracket."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .forms import Form, horizontal_diff, wedge
from .poisson import (bracket_with_field, covariant_bracket, hamiltonian,
                      single_time_brackets)
from .scalar import (GQ, ONE, ZERO, JetVar, Scalar, T, X, partial_jet,
                     substitute_jet, symbol, total_derivative)
from .variational import MultisymplecticData

PAULI = "pauli"
RAISING_LOWERING = "raising-lowering"
BASES = {
    PAULI: ("1", "sigma1", "sigma2", "sigma3"),
    RAISING_LOWERING: ("1", "sigma+", "sigma-", "sigma3"),
}

_i = GQ(0, 1)
_MATRICES = {
    "1": ((GQ(1), GQ(0)), (GQ(0), GQ(1))),
    "sigma1": ((GQ(0), GQ(1)), (GQ(1), GQ(0))),
    "sigma2": ((GQ(0), -_i), (_i, GQ(0))),
    "sigma3": ((GQ(1), GQ(0)), (GQ(0), GQ(-1))),
    "sigma+": ((GQ(0), GQ(1)), (GQ(0), GQ(0))),
    "sigma-": ((GQ(0), GQ(0)), (GQ(1), GQ(0))),
}


def basis_of(label: str) -> str:
    if label in ("sigma1", "sigma2"):
        return PAULI
    if label in ("sigma+", "sigma-"):
        return RAISING_LOWERING
    return "any"


def _mat_mul(a, b):
    return tuple(tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)) for i in range(2))


def _decompose(m, kind: str) -> dict:
    """2×2 GQ matrix -> {label: GQ} in the given basis."""
    half = GQ(Fraction(1, 2))
    tr = lambda s: sum((_mat_mul(_MATRICES[s], m)[k][k] for k in range(2)), GQ(0))
    out = {"1": (m[0][0] + m[1][1]) * half, "sigma3": (m[0][0] - m[1][1]) * half}
    if kind == PAULI:
        out["sigma1"] = tr("sigma1") * half
        out["sigma2"] = tr("sigma2") * half
    else:
        out["sigma+"] = m[0][1]
        out["sigma-"] = m[1][0]
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def product_table(kind: str) -> dict:
    """(a, b) -> {label: GQ} with σ_a σ_b = Σ c σ_c."""
    labels = BASES[kind]
    return {(a, b): _decompose(_mat_mul(_MATRICES[a], _MATRICES[b]), kind)
            for a in labels for b in labels}


@lru_cache(maxsize=None)
def change_of_basis(src: str, dst: str) -> dict:
    """label in ``src`` -> {label in ``dst``: GQ}."""
    return {a: _decompose(_MATRICES[a], dst) for a in BASES[src]}


# ---------------------------------------------------------------------------
# coefficient helpers (Scalar or Form)


def _cmul(a, b):
    if isinstance(a, Form) and isinstance(b, Form):
        return wedge(a, b)
    if isinstance(a, Form):
        return a.scale(b)
    if isinstance(b, Form):
        return b.scale(a)
    return a * b


def _is_zero(c) -> bool:
    return not c


def _add(acc: dict, key, c):
    if _is_zero(c):
        return
    prev = acc.get(key)
    if prev is None:
        acc[key] = c
    else:
        s = prev + c
        if _is_zero(s):
            del acc[key]
        else:
            acc[key] = s


# ---------------------------------------------------------------------------
# tensor objects


@dataclass
class TensorObject:
    """Σ c_{a1…an} σ_{a1}⊗…⊗σ_{an}; coefficients are Scalars or Forms."""

    kind: str
    entries: dict = field(default_factory=dict)
    rank: int = 2

    def __post_init__(self):
        self.entries = {tuple(k): v for k, v in self.entries.items() if not _is_zero(v)}

    @staticmethod
    def from_matrix(kind: str, comps: dict) -> "TensorObject":
        return TensorObject(kind, {(k,): v for k, v in comps.items()}, rank=1)

    def get(self, *labels):
        return self.entries.get(tuple(labels), ZERO)

    def __add__(self, other: "TensorObject") -> "TensorObject":
        other = other.in_basis(self.kind)
        out = dict(self.entries)
        for k, c in other.entries.items():
            _add(out, k, c)
        return TensorObject(self.kind, out, self.rank)

    def __neg__(self):
        return TensorObject(self.kind, {k: -c for k, c in self.entries.items()}, self.rank)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "TensorObject":
        out = {}
        for k, c in self.entries.items():
            _add(out, k, _cmul(c, Scalar.of(s)))
        return TensorObject(self.kind, out, self.rank)

    def __matmul__(self, other: "TensorObject") -> "TensorObject":
        """Slotwise product (A⊗B)(C⊗D) = AC⊗BD."""
        other = other.in_basis(self.kind)
        table = product_table(self.kind)
        out: dict = {}
        for ka, ca in self.entries.items():
            for kb, cb in other.entries.items():
                c = _cmul(ca, cb)
                if _is_zero(c):
                    continue
                slots = [table[(a, b)] for a, b in zip(ka, kb)]
                for combo in product(*(s.items() for s in slots)):
                    coeff = GQ(1)
                    for _, g in combo:
                        coeff = coeff * g
                    _add(out, tuple(lbl for lbl, _ in combo), _cmul(c, Scalar(coeff)))
        return TensorObject(self.kind, out, self.rank)

    def commutator(self, other: "TensorObject") -> "TensorObject":
        return (self @ other) - (other.in_basis(self.kind) @ self)

    def in_basis(self, kind: str) -> "TensorObject":
        if kind == self.kind:
            return self
        cb = change_of_basis(self.kind, kind)
        out: dict = {}
        for k, c in self.entries.items():
            for combo in product(*(cb[a].items() for a in k)):
                coeff = GQ(1)
                for _, g in combo:
                    coeff = coeff * g
                _add(out, tuple(lbl for lbl, _ in combo), _cmul(c, Scalar(coeff)))
        return TensorObject(kind, out, self.rank)

    def embed(self, slots: tuple, rank: int) -> "TensorObject":
        """Place this object's factors at ``slots`` of a rank-``rank`` tensor."""
        out = {}
        for k, c in self.entries.items():
            key = ["1"] * rank
            for s, lbl in zip(slots, k):
                key[s] = lbl
            out[tuple(key)] = c
        return TensorObject(self.kind, out, rank)

    def map(self, fn) -> "TensorObject":
        out = {}
        for k, c in self.entries.items():
            _add(out, k, fn(c))
        return TensorObject(self.kind, out, self.rank)

    def map_params(self, mapping: dict) -> "TensorObject":
        def sub(c):
            if isinstance(c, Form):
                return c.map_coefficients(lambda s: s.map_params(mapping))
            return c.map_params(mapping)
        return self.map(sub)

    def swap(self) -> "TensorObject":
        return TensorObject(self.kind, {k[::-1]: c for k, c in self.entries.items()}, self.rank)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, TensorObject):
            return NotImplemented
        return (self - other).is_zero

    def render(self) -> str:
        if not self.entries:
            return "0"
        parts = []
        for k in sorted(self.entries):
            parts.append(f"[{'⊗'.join(k)}] {self.entries[k]}")
        return "; ".join(parts)


# ---------------------------------------------------------------------------
# matrix forms (Lax forms)


@dataclass
class LaxPair:
    kind: str
    U: dict  # label -> Scalar
    V: dict
    spectral: str = "lambda"

    def matrix(self, which: str) -> TensorObject:
        return TensorObject.from_matrix(self.kind, self.U if which == "U" else self.V)

    def form(self) -> "MatrixForm":
        comps = {}
        for lbl in set(self.U) | set(self.V):
            f = Form.monomial(self.U.get(lbl, ZERO), (), (X,)) + Form.monomial(self.V.get(lbl, ZERO), (), (T,))
            if f:
                comps[lbl] = f
        return MatrixForm(self.kind, comps, self.spectral)

    def at(self, name: str) -> "LaxPair":
        m = {self.spectral: name}
        return LaxPair(self.kind, {k: v.map_params(m) for k, v in self.U.items()},
                       {k: v.map_params(m) for k, v in self.V.items()}, name)

    def in_basis(self, kind: str) -> "LaxPair":
        U = self.matrix("U").in_basis(kind)
        V = self.matrix("V").in_basis(kind)
        return LaxPair(kind, {k[0]: c for k, c in U.entries.items()},
                       {k[0]: c for k, c in V.entries.items()}, self.spectral)


@dataclass
class MatrixForm:
    kind: str
    components: dict  # label -> Form of degree (0,q)
    spectral: str = "lambda"

    def tensor(self) -> TensorObject:
        return TensorObject.from_matrix(self.kind, self.components)

    def in_basis(self, kind: str) -> "MatrixForm":
        t = self.tensor().in_basis(kind)
        return MatrixForm(kind, {k[0]: c for k, c in t.entries.items()}, self.spectral)


# ---------------------------------------------------------------------------
# r-matrices


@dataclass
class RMatrix:
    name: str
    tensor: TensorObject  # rank 2, Scalars in (lambda, mu)

    def r12(self) -> TensorObject:
        return self.tensor

    def r21_swapped(self) -> TensorObject:
        """r₂₁(μ,λ): swap the factors and the spectral parameters."""
        return self.tensor.swap().map_params({"lambda": "mu", "mu": "lambda"})

    def skew_symmetric(self) -> bool:
        return (self.tensor + self.r21_swapped()).is_zero

    def in_basis(self, kind: str) -> "RMatrix":
        return RMatrix(self.name, self.tensor.in_basis(kind))


def rational_r() -> RMatrix:
    lam, mu = symbol("lambda"), symbol("mu")
    d = ONE / (mu - lam)
    half = Fraction(1, 2)
    ent = {("sigma+", "sigma-"): d, ("sigma-", "sigma+"): d,
           ("sigma3", "sigma3"): d * half, ("1", "1"): d * half}
    return RMatrix("rational", TensorObject(RAISING_LOWERING, ent))


def trigonometric_sg_r() -> RMatrix:
    lam, mu, beta = symbol("lambda"), symbol("mu"), symbol("beta")
    den = lam ** 2 - mu ** 2
    f = -(beta ** 2) * (lam ** 2 + mu ** 2) / (16 * den)
    g = (beta ** 2) * lam * mu / (8 * den)
    ent = {("1", "1"): f, ("sigma3", "sigma3"): -f, ("sigma1", "sigma1"): g, ("sigma2", "sigma2"): g}
    return RMatrix("trigonometric-sg", TensorObject(PAULI, ent))


BUILTIN_R = {"rational": rational_r, "trigonometric-sg": trigonometric_sg_r}


def builtin_r(name: str) -> RMatrix:
    try:
        return BUILTIN_R[name]()
    except KeyError:
        raise KeyError(f"unknown built-in r-matrix {name!r}; known: {sorted(BUILTIN_R)}") from None


def perturb_r(r: RMatrix, rng: random.Random) -> tuple:
    """r + c σ_a⊗σ_b/(μ−λ) with random rational c and a non-identity pair."""
    labels = [l for l in BASES[r.tensor.kind] if l != "1"]
    a, b = rng.choice(labels), rng.choice(labels)
    c = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 5))
    lam, mu = symbol("lambda"), symbol("mu")
    extra = TensorObject(r.tensor.kind, {(a, b): Scalar(c) / (mu - lam)})
    return RMatrix(f"{r.name}+perturbation", r.tensor + extra), (a, b, c)


# ---------------------------------------------------------------------------
# CYBE


def cybe_terms(r: RMatrix) -> tuple:
    """[r13(λ,ν), r23(μ,ν)], [r12(λ,μ), r13(λ,ν)], [r12(λ,μ), r23(μ,ν)]."""
    base = r.tensor
    r12 = base.embed((0, 1), 3)
    r13 = base.map_params({"mu": "nu"}).embed((0, 2), 3)
    r23 = base.map_params({"lambda": "mu", "mu": "nu"}).embed((1, 2), 3)
    return r13.commutator(r23), r12.commutator(r13), r12.commutator(r23)


def cybe_sum(r: RMatrix) -> TensorObject:
    a, b, c = cybe_terms(r)
    return a + b + c


def verify_cybe(r: RMatrix) -> tuple:
    s = cybe_sum(r)
    return s.is_zero, s


# ---------------------------------------------------------------------------
# brackets of Lax forms


def tensor_bracket(W: MatrixForm, Wp: MatrixForm, M: MultisymplecticData) -> TensorObject:
    """Entry (a,b) = {{W^a(λ), W'^b(μ)}}."""
    fields = {}
    for a, F in W.components.items():
        try:
            fields[a] = hamiltonian(F, M)
        except Exception as e:
            raise type(e)(f"component {a} of the Lax form: {e}") from e
    for b, G in Wp.components.items():
        try:
            hamiltonian(G, M)
        except Exception as e:
            raise type(e)(f"component {b} of the Lax form: {e}") from e
    out = {}
    for a, h in fields.items():
        for b, G in Wp.components.items():
            v = bracket_with_field(h.vector_field, h.degree, G)
            if v:
                out[(a, b)] = v
    return TensorObject(W.kind, out)


def r_commutator(r: RMatrix, W: MatrixForm, Wp: MatrixForm) -> TensorObject:
    """[r₁₂(λ,μ), W₁(λ) + W₂(μ)]."""
    kind = W.kind
    rt = r.tensor.in_basis(kind)
    s = W.tensor().embed((0,), 2) + Wp.in_basis(kind).tensor().embed((1,), 2)
    return rt.commutator(s)


@dataclass
class CheckResult:
    holds: bool
    diff: dict = field(default_factory=dict)  # label -> (lhs, rhs)
    detail: dict = field(default_factory=dict)


def _entry_diff(lhs: TensorObject, rhs: TensorObject) -> dict:
    rhs = rhs.in_basis(lhs.kind)
    out = {}
    for k in sorted(set(lhs.entries) | set(rhs.entries)):
        a, b = lhs.entries.get(k, ZERO), rhs.entries.get(k, ZERO)
        if isinstance(a, Form) or isinstance(b, Form):
            a = a if isinstance(a, Form) else Form.scalar(a)
            b = b if isinstance(b, Form) else Form.scalar(b)
        if not (a - b).is_zero:
            out[k] = (a, b)
    return out


def verify_sklyanin(lax: LaxPair, r: RMatrix, M: MultisymplecticData) -> CheckResult:
    W = lax.form()
    Wp = lax.at("mu").form()
    lhs = tensor_bracket(W, Wp, M)
    rhs = r_commutator(r, W, Wp)
    diff = _entry_diff(lhs, rhs)
    return CheckResult(not diff, diff, {"bracket": lhs, "commutator": rhs})


def verify_single_time(lax: LaxPair, r: RMatrix, M: MultisymplecticData,
                       sign_U: int = -1, sign_V: int = 1) -> CheckResult:
    """{U₁,U₂}_S = −[r, U₁+U₂] and {V₁,V₂}_T = +[r, V₁+V₂]."""
    st = single_time_brackets(M)
    lm = lax.at("mu")
    rt = r.tensor.in_basis(lax.kind)
    diffs, detail = {}, {}
    for which, br, sign in (("U", st.bracket_S, sign_U), ("V", st.bracket_T, sign_V)):
        A = lax.U if which == "U" else lax.V
        B = lm.U if which == "U" else lm.V
        lhs = TensorObject(lax.kind, {(a, b): br(ca, cb) for a, ca in A.items() for b, cb in B.items()})
        s = lax.matrix(which).embed((0,), 2) + lm.matrix(which).embed((1,), 2)
        rhs = rt.commutator(s).scale(sign)
        detail[which] = (lhs, rhs)
        for k, v in _entry_diff(lhs, rhs).items():
            diffs[(which,) + k] = v
    return CheckResult(not diffs, diffs, detail)


# ---------------------------------------------------------------------------
# dynamics


def zero_curvature_residual(U: TensorObject, V: TensorObject) -> TensorObject:
    """∂_t U − ∂_x V + [U, V] (off shell)."""
    dU = U.map(lambda c: total_derivative(c, T))
    dV = V.map(lambda c: total_derivative(c, X))
    return dU - dV + U.commutator(V)


class NotOrientable(ValueError):
    pass


@dataclass
class _Rule:
    field: str
    target: JetVar
    rhs: Scalar


class OnShellReducer:
    """Rewrite modulo the Euler-Lagrange equations, solved for their
    highest t-derivatives; prolongations are generated on demand."""

    def __init__(self, EL: dict):
        self.rules = []
        self.EL = dict(EL)
        for k in sorted(EL):
            A = EL[k]
            if not A:
                continue
            jets = [j for j in A.jets() if j.mt > 0]
            if not jets:
                raise NotOrientable(f"EL not orientable as evolution system: A_{k} has no t-derivative")
            top = max(jets, key=lambda j: (j.mt, j.mx))
            if A.degree_in(top) != 1:
                raise NotOrientable(f"EL not orientable as evolution system: A_{k} not linear in {top}")
            c = partial_jet(A, top)
            if not c.is_jet_free:
                raise NotOrientable(f"EL not orientable as evolution system: coefficient of {top} in A_{k} depends on jets")
            if top.mx == 0 and top.mt == 0:
                raise NotOrientable("EL not orientable as evolution system")
            rest = substitute_jet(A, top, ZERO)
            self.rules.append(_Rule(k, top, -rest / c))
        targets = [r.target for r in self.rules]
        if len(set(targets)) != len(targets):
            raise NotOrientable("EL not orientable as evolution system: repeated target")
        self._cache: dict = {}

    def _replacement(self, w: JetVar):
        for rule in self.rules:
            t = rule.target
            if w.field == t.field and w.mx >= t.mx and w.mt >= t.mt:
                key = w
                hit = self._cache.get(key)
                if hit is None:
                    hit = rule.rhs
                    for _ in range(w.mx - t.mx):
                        hit = total_derivative(hit, X)
                    for _ in range(w.mt - t.mt):
                        hit = total_derivative(hit, T)
                    self._cache[key] = hit
                return hit
        return None

    def reduce_scalar(self, a: Scalar, max_steps: int = 500) -> Scalar:
        for _ in range(max_steps):
            todo = None
            for w in sorted(a.jets(), key=lambda j: (-j.mt, -j.mx, j)):
                rep = self._replacement(w)
                if rep is not None:
                    todo = (w, rep)
                    break
            if todo is None:
                return a
            a = substitute_jet(a, *todo)
        raise RuntimeError("on-shell reduction did not terminate")

    def reduce(self, a):
        if isinstance(a, Scalar):
            return self.reduce_scalar(a)
        if isinstance(a, Form):
            return a.map_coefficients(self.reduce_scalar)
        if isinstance(a, TensorObject):
            return a.map(self.reduce)
        raise TypeError(type(a))

    def __call__(self, a):
        return self.reduce(a)


def on_shell_reduce(a, EL: dict):
    return OnShellReducer(EL).reduce(a)


def el_proportionality(R: Scalar, EL: dict, reducer: OnShellReducer) -> dict | None:
    """Constants c_k with R = Σ c_k A_k (parameter-only c_k), else None."""
    coeffs = {}
    total = ZERO
    for rule in reducer.rules:
        k = rule.field
        A = EL[k]
        cA = partial_jet(A, rule.target)
        cR = partial_jet(R, rule.target)
        if not cR.is_jet_free:
            return None
        c = cR / cA
        if c:
            coeffs[k] = c
            total = total + c * A
    return coeffs if total == R else None


def maurer_cartan(lax: LaxPair, M: MultisymplecticData, H: Scalar) -> CheckResult:
    """(a) {{H,W^i}}σ_i = [U,V]; (b) dW − {{H,W}}dx∧dt vanishes on shell and
    is componentwise a constant combination of the EL expressions."""
    hH = hamiltonian(Form.scalar(H), M)
    W = lax.form()
    HW = {}
    for a, F in W.components.items():
        hamiltonian(F, M)
        v = bracket_with_field(hH.vector_field, 0, F).scalar_part()
        if v:
            HW[a] = v
    lhs = TensorObject.from_matrix(lax.kind, HW)
    UV = lax.matrix("U").commutator(lax.matrix("V"))
    diff = _entry_diff(lhs, UV)
    reducer = OnShellReducer(M.euler_lagrange)
    residuals, factors, onshell = {}, {}, {}
    ok_b = True
    for a in sorted(set(W.components) | set(HW)):
        dW = horizontal_diff(W.components.get(a, Form()))
        R = (dW - Form.monomial(HW.get(a, ZERO), (), (X, T))).coefficient((), (X, T))
        residuals[a] = R
        red = reducer.reduce_scalar(R)
        onshell[a] = red
        if red:
            ok_b = False
        if R:
            c = el_proportionality(R, M.euler_lagrange, reducer)
            if c is None:
                ok_b = False
            factors[a] = c
    holds = not diff and ok_b
    return CheckResult(holds, {("MC",) + k: v for k, v in diff.items()},
                       {"HW": lhs, "UV": UV, "residuals": residuals, "factors": factors,
                        "on_shell": onshell})


def zero_curvature_check(lax: LaxPair, EL: dict) -> CheckResult:
    R = zero_curvature_residual(lax.matrix("U"), lax.matrix("V"))
    reducer = OnShellReducer(EL)
    red = R.map(reducer.reduce_scalar)
    factors = {}
    ok = red.is_zero
    for k, c in R.entries.items():
        f = el_proportionality(c, EL, reducer)
        factors[k[0]] = f
        if f is None:
            ok = False
    return CheckResult(ok, {k: (v, ZERO) for k, v in red.entries.items()},
                       {"residual": R, "factors": factors})


def hamilton_equation_check(H: Scalar, F: Form, M: MultisymplecticData) -> tuple:
    """dF − {{H,F}} dx∧dt, reduced on shell: (holds, off-shell residual)."""
    br = covariant_bracket(Form.scalar(H), F, M)
    res = horizontal_diff(F) - wedge(br, Form.monomial(ONE, (), (X, T)))
    return OnShellReducer(M.euler_lagrange).reduce(res).is_zero, res
