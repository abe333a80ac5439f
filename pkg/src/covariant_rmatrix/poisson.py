"""Hamiltonian forms, the covariant Poisson bracket and derived structures."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .forms import (Form, MultiVectorField, contract_prolonged, dt, dx,
                    interior, vertical_diff, wedge)
from .scalar import ZERO, ONE, Scalar, T, X, jet, partial_jet, DIRECTION_NAMES
from .variational import Lagrangian, MultisymplecticData


class NotHamiltonian(ValueError):
    def __init__(self, report: "ObstructionReport"):
        super().__init__(report.summary())
        self.report = report


class DegenerateSingleTime(ArithmeticError):
    pass


@dataclass
class ObstructionReport:
    dependencies: list = field(default_factory=list)  # human-readable lines
    unmatched: list = field(default_factory=list)  # (generator text, residual Scalar)

    def summary(self) -> str:
        lines = list(self.dependencies)
        lines += [f"unmatched equation at {g}: {c} = 0" for g, c in self.unmatched]
        return "; ".join(lines) or "not Hamiltonian"


@dataclass
class HamiltonianForm:
    form: Form
    vector_field: MultiVectorField
    kernel_basis: list
    degree: int  # horizontal degree p (0 or 1)


def _form_degree(F: Form) -> int:
    degs = F.degrees()
    if not degs:
        return -1
    if len(degs) != 1 or next(iter(degs))[0] != 0 or next(iter(degs))[1] > 1:
        raise ValueError(f"expected a homogeneous (0,0) or (0,1) form, got degrees {sorted(degs)}")
    return next(iter(degs))[1]


def _ansatz(M: MultisymplecticData, degree: int) -> list:
    """Basis multivectors for X_F: ∂_v for one-forms, ∂_v∧∂_ν for zero-forms."""
    if degree == 1:
        return [MultiVectorField.monomial(ONE, (v,)) for v in M.coordinates]
    return [MultiVectorField.monomial(ONE, (v,), (nu,)) for v in M.coordinates for nu in (X, T)]


def _label_text(key) -> str:
    V, H = key
    return "∧".join([f"δ{v}" for v in V] + [f"d{DIRECTION_NAMES[h]}" for h in H]) or "1"


def _dependency_obstructions(F: Form, M: MultisymplecticData, degree: int) -> list:
    out = []
    if degree != 1:
        return out
    # ι_XΩ's dx-part only involves δ of Ω_t coordinates; its dt-part those of Ω_x
    for h, coords, name in (((X,), M.coords_t, "dx"), ((T,), M.coords_x, "dt")):
        comp = F.horizontal_component(h).scalar_part()
        allowed = set(coords)
        for v in sorted(comp.jets()):
            if v not in allowed and partial_jet(comp, v):
                names = ", ".join(str(c) for c in coords)
                out.append(f"{name}-component depends on {v} ∉ {{{names}}}")
    return out


def solve_hamiltonian(F: Form, M: MultisymplecticData) -> tuple:
    """Return (HamiltonianForm or None, ObstructionReport)."""
    degree = _form_degree(F)
    if degree < 0:
        return HamiltonianForm(F, MultiVectorField(), [], 1), ObstructionReport()
    basis = _ansatz(M, degree)
    images = [interior(Y, M.omega) for Y in basis]
    target = vertical_diff(F)
    keys = set(target.terms)
    for im in images:
        keys |= set(im.terms)
    rows = []
    for k in sorted(keys):
        row = {i: im.terms[k] for i, im in enumerate(images) if k in im.terms}
        row["rhs"] = target.terms.get(k, ZERO)
        rows.append((k, row))
    sol = linalg.solve([r for _, r in rows], list(range(len(basis))),
                       tags=[_label_text(k) for k, _ in rows])
    report = ObstructionReport(_dependency_obstructions(F, M, degree))
    if not sol.consistent:
        report.unmatched = list(sol.inconsistent)
        return None, report
    X_F = MultiVectorField()
    for i, c in sol.particular.items():
        if c:
            X_F = X_F + basis[i].scale(c)
    kernel = []
    for vec in sol.kernel:
        K = MultiVectorField()
        for i, c in vec.items():
            K = K + basis[i].scale(c)
        kernel.append(K)
    return HamiltonianForm(F, X_F, kernel, degree), report


def is_hamiltonian(F: Form, M: MultisymplecticData) -> tuple:
    """(bool, ObstructionReport)."""
    h, rep = solve_hamiltonian(F, M)
    ok = h is not None and not rep.dependencies
    return ok, rep


def hamiltonian(F: Form, M: MultisymplecticData) -> HamiltonianForm:
    h, rep = solve_hamiltonian(F, M)
    if h is None:
        raise NotHamiltonian(rep)
    return h


def hamiltonian_vector_field(F: Form, M: MultisymplecticData) -> MultiVectorField:
    return hamiltonian(F, M).vector_field


def bracket_with_field(XF: MultiVectorField, p: int, G: Form) -> Form:
    out = interior(XF, vertical_diff(G))
    return out if p == 0 else -out


def covariant_bracket(F: Form, G: Form, M: MultisymplecticData, check_second: bool = True) -> Form:
    """{{F,G}} = (−1)^(2−p) ι_{X_F} δG, p the horizontal degree of F."""
    hF = hamiltonian(F, M)
    if check_second:
        hamiltonian(G, M)
    return bracket_with_field(hF.vector_field, hF.degree, G)


# ---------------------------------------------------------------------------
# single-time brackets


@dataclass
class SingleTimeBrackets:
    coords_S: list
    pi_S: list
    coords_T: list
    pi_T: list

    def bracket_S(self, A: Scalar, C: Scalar) -> Scalar:
        return _pi_bracket(self.pi_S, self.coords_S, A, C)

    def bracket_T(self, B: Scalar, D: Scalar) -> Scalar:
        return _pi_bracket(self.pi_T, self.coords_T, B, D)


def _pi_bracket(pi, coords, A, C) -> Scalar:
    """{A,C} = −Σ π_ij ∂_iA ∂_jC."""
    dA = [partial_jet(A, v) for v in coords]
    dC = [partial_jet(C, v) for v in coords]
    out = ZERO
    for i, a in enumerate(dA):
        if not a:
            continue
        for j, c in enumerate(dC):
            if c and pi[i][j]:
                out = out - pi[i][j] * a * c
    return out


def single_time_brackets(M: MultisymplecticData) -> SingleTimeBrackets:
    try:
        pS = linalg.inverse(M.matrix_t) if M.matrix_t else None
    except (linalg.SingularMatrix, linalg.NoInvertiblePivot):
        pS = None
    if pS is None:
        raise DegenerateSingleTime("single-time structure degenerate: block Ω_t (dx part)")
    try:
        pT = linalg.inverse(M.matrix_x) if M.matrix_x else None
    except (linalg.SingularMatrix, linalg.NoInvertiblePivot):
        pT = None
    if pT is None:
        raise DegenerateSingleTime("single-time structure degenerate: block Ω_x (dt part)")
    return SingleTimeBrackets(list(M.coords_t), pS, list(M.coords_x), pT)


def splitting(F: Form, G: Form, M: MultisymplecticData, st: SingleTimeBrackets | None = None) -> Form:
    """{B,D}_T dt − {A,C}_S dx for F = A dx + B dt, G = C dx + D dt."""
    hamiltonian(F, M)
    hamiltonian(G, M)
    st = st or single_time_brackets(M)
    A, B = F.coefficient((), (X,)), F.coefficient((), (T,))
    C, D = G.coefficient((), (X,)), G.coefficient((), (T,))
    return Form.monomial(st.bracket_T(B, D), (), (T,)) - Form.monomial(st.bracket_S(A, C), (), (X,))


# ---------------------------------------------------------------------------
# energy-momentum and the covariant Hamiltonian


@dataclass
class EnergyMomentum:
    T_x: Form
    T_t: Form
    T_xx: Scalar
    T_xt: Scalar
    T_tx: Scalar
    T_tt: Scalar
    hamiltonian: Scalar


def energy_momentum(L: Lagrangian, M: MultisymplecticData) -> EnergyMomentum:
    Lam = L.volume_form()
    w = M.boundary_form
    Tn = {}
    for nu in (X, T):
        d_nu = MultiVectorField.vector({nu: ONE})
        Tn[nu] = -interior(d_nu, Lam) + contract_prolonged(nu, w)
    T_x, T_t = Tn[X], Tn[T]
    T_xx = T_x.coefficient((), (T,))
    T_xt = -T_x.coefficient((), (X,))
    T_tx = T_t.coefficient((), (T,))
    T_tt = -T_t.coefficient((), (X,))
    calH = (wedge(dx(), contract_prolonged(X, w)) + wedge(dt(), contract_prolonged(T, w)) - Lam)
    H = calH.coefficient((), (X, T))
    if H != T_xx + T_tt + L.density:
        raise AssertionError("covariant Hamiltonian disagrees with T_xx + T_tt + ℒ")
    return EnergyMomentum(T_x, T_t, T_xx, T_xt, T_tx, T_tt, H)


@dataclass
class FieldEquationsResult:
    holds: bool
    residual: Form
    signs: dict  # field -> ±1 (or None when undetermined)


def hamilton_field_equations_check(L: Lagrangian, M: MultisymplecticData,
                                   H: Scalar | None = None) -> FieldEquationsResult:
    """δℋ − dx∧ι_{∂̃x}Ω − dt∧ι_{∂̃t}Ω against Σ ε_k A_k δu_k∧dx∧dt."""
    if H is None:
        H = energy_momentum(L, M).hamiltonian
    calH = Form.monomial(H, (), (X, T))
    res = (vertical_diff(calH) - wedge(dx(), contract_prolonged(X, M.omega))
           - wedge(dt(), contract_prolonged(T, M.omega)))
    signs = {}
    ok = True
    expected_keys = set()
    for k in L.fields:
        key = ((jet(k),), (X, T))
        expected_keys.add(key)
        c = res.terms.get(key, ZERO)
        A = M.euler_lagrange[k]
        if not A and not c:
            signs[k] = 1
        elif c == A:
            signs[k] = 1
        elif c == -A:
            signs[k] = -1
        else:
            signs[k] = None
            ok = False
    if any(k not in expected_keys for k in res.terms):
        ok = False
    return FieldEquationsResult(ok, res, signs)
