"""Euler-Lagrange expressions, the boundary form and the multisymplectic form."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .forms import (Form, dt, dvar, dx, horizontal_diff, vertical_diff, wedge)
from .scalar import (ZERO, JetVar, MultiIndex, Scalar, T, X, jet, partial_jet,
                     total_derivative)


class IBPResidualError(AssertionError):
    """The boundary form failed its exactness identity (a kernel bug)."""


@dataclass(frozen=True)
class Lagrangian:
    density: Scalar
    fields: tuple
    max_jet_order: int = -1

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        jets = self.density.jets()
        unknown = {j.field for j in jets} - set(self.fields)
        if unknown:
            raise ValueError(f"density depends on undeclared fields {sorted(unknown)}")
        order = max((j.order for j in jets), default=0)
        if self.max_jet_order < 0:
            object.__setattr__(self, "max_jet_order", order)
        elif order > self.max_jet_order:
            raise ValueError(f"density has jet order {order} > declared {self.max_jet_order}")

    def volume_form(self) -> Form:
        return Form.monomial(self.density, (), (X, T))


def iterated_derivative(a: Scalar, mu: MultiIndex) -> Scalar:
    for _ in range(mu.mx):
        a = total_derivative(a, X)
    for _ in range(mu.mt):
        a = total_derivative(a, T)
    return a


def euler_lagrange(L: Lagrangian) -> dict:
    """A_k = Σ_μ (−1)^|μ| D^μ ∂ℒ/∂u_k^(μ)."""
    out = {}
    jets = L.density.jets()
    for k in L.fields:
        A = ZERO
        for v in sorted(j for j in jets if j.field == k):
            term = iterated_derivative(partial_jet(L.density, v), v.index)
            A = A + (term if v.order % 2 == 0 else -term)
        out[k] = A
    return out


def _canonical_ibp(L: Lagrangian):
    """Reduce Σ ∂ℒ/∂u^(μ) δu^(μ) to Σ A_k δu_k modulo d-exact terms.

    Highest |μ| first; x-derivatives are peeled before t-derivatives.
    Returns (remainders at δu_k, B) with δΛ = Σ A_k δu_k dxdt + dB.
    """
    coeffs: dict = {}
    for v in L.density.jets():
        c = partial_jet(L.density, v)
        if c:
            coeffs[v] = c
    B = Form()
    while True:
        pending = [v for v, c in coeffs.items() if v.order > 0 and c]
        if not pending:
            break
        top = max(v.order for v in pending)
        for v in sorted(w for w in pending if w.order == top):
            P = coeffs.pop(v)
            if v.mx > 0:
                w = jet(v.field, v.mx - 1, v.mt)
                coeffs[w] = coeffs.get(w, ZERO) - total_derivative(P, X)
                B = B + Form.monomial(-P, (w,), (T,))
            else:
                w = jet(v.field, v.mx, v.mt - 1)
                coeffs[w] = coeffs.get(w, ZERO) - total_derivative(P, T)
                B = B + Form.monomial(P, (w,), (X,))
    remainders = {k: coeffs.get(jet(k), ZERO) for k in L.fields}
    return remainders, B


def boundary_form(L: Lagrangian, check: bool = True) -> Form:
    """ω^(1,1) with δΛ = Σ A_k δu_k∧dx∧dt − dω^(1,1), canonical IBP order."""
    rem, B = _canonical_ibp(L)
    omega = -B
    if check:
        EL = euler_lagrange(L)
        for k in L.fields:
            if rem[k] != EL[k]:
                raise IBPResidualError(f"IBP remainder for {k} differs from the Euler-Lagrange expression")
        residual = vertical_diff(L.volume_form()) + horizontal_diff(omega)
        for k in L.fields:
            residual = residual - Form.monomial(EL[k], (jet(k),), (X, T))
        if residual:
            raise IBPResidualError(f"IBP residual nonzero: {residual}")
    return omega


@dataclass
class MultisymplecticData:
    lagrangian: Lagrangian
    euler_lagrange: dict
    boundary_form: Form
    omega: Form
    omega_x: Form  # vertical 2-form, dt part
    omega_t: Form  # vertical 2-form, minus the dx part
    coordinates: list  # S_Ω, ordered by the generator order
    coords_x: list  # generators occurring in Ω_x
    coords_t: list  # generators occurring in Ω_t
    matrix_x: list = field(repr=False, default_factory=list)
    matrix_t: list = field(repr=False, default_factory=list)
    nondegenerate_x: bool = False
    nondegenerate_t: bool = False

    @property
    def fields(self):
        return self.lagrangian.fields

    def reassemble(self) -> Form:
        return wedge(self.omega_x, dt()) - wedge(self.omega_t, dx())


def _coords_of(f: Form) -> list:
    out = set()
    for (V, _), _c in f.terms.items():
        out.update(V)
    return sorted(out)


def coefficient_matrix(two_form: Form, coords: list) -> list:
    """ω^{ij} = coefficient of δv_i∧δv_j (i<j), extended antisymmetrically,
    so that the 2-form equals Σ_{i<j} ω^{ij} δv_i∧δv_j."""
    n = len(coords)
    M = [[ZERO] * n for _ in range(n)]
    pos = {v: i for i, v in enumerate(coords)}
    for (V, H), c in two_form.terms.items():
        if len(V) != 2 or H:
            raise ValueError("expected a vertical 2-form")
        i, j = pos[V[0]], pos[V[1]]
        M[i][j] = M[i][j] + c
        M[j][i] = M[j][i] - c
    return M


def _nondegenerate(M: list) -> bool:
    if not M:
        return False
    try:
        linalg.inverse(M)
        return True
    except (linalg.SingularMatrix, linalg.NoInvertiblePivot):
        return False


def multisymplectic(L: Lagrangian) -> MultisymplecticData:
    EL = euler_lagrange(L)
    w = boundary_form(L)
    Om = vertical_diff(w)
    om_x = Om.horizontal_component((T,))
    om_t = -Om.horizontal_component((X,))
    cx, ct = _coords_of(om_x), _coords_of(om_t)
    Mx, Mt = coefficient_matrix(om_x, cx), coefficient_matrix(om_t, ct)
    return MultisymplecticData(
        lagrangian=L, euler_lagrange=EL, boundary_form=w, omega=Om,
        omega_x=om_x, omega_t=om_t, coordinates=_coords_of(Om),
        coords_x=cx, coords_t=ct, matrix_x=Mx, matrix_t=Mt,
        nondegenerate_x=_nondegenerate(Mx), nondegenerate_t=_nondegenerate(Mt))


@dataclass
class QuasisymmetryReport:
    holds: bool
    comparisons: list  # (field, μ, coeff of δu^(μ+e_x)∧dx, coeff of δu^(μ+e_t)∧dt)
    vacuous: bool = False


def quasisymmetry_check(L: Lagrangian, omega: Form | None = None) -> QuasisymmetryReport:
    """Cross coefficients of ω^(1,1): δu^(μ+e_x)∧dx against δu^(μ+e_t)∧dt."""
    m = L.max_jet_order
    if m <= 1:
        return QuasisymmetryReport(True, [], vacuous=True)
    w = boundary_form(L) if omega is None else omega
    comps = []
    ok = True
    for k in L.fields:
        for n in range(m - 1):
            for mt in range(n + 1):
                mu = MultiIndex(n - mt, mt)
                a = w.coefficient((jet(k, mu.mx + 1, mu.mt),), (X,))
                b = w.coefficient((jet(k, mu.mx, mu.mt + 1),), (T,))
                comps.append((k, tuple(mu), a, b))
                ok = ok and a == b
    return QuasisymmetryReport(ok, comps)


def gauge_shift(L: Lagrangian, theta: Form) -> Lagrangian:
    """ℒ + coefficient of d(θ) for a (0,1)-form θ."""
    extra = horizontal_diff(theta).coefficient((), (X, T))
    fields = set(L.fields) | {j.field for j in extra.jets()}
    return Lagrangian(L.density + extra, tuple(f for f in L.fields if f in fields))


@dataclass
class GaugeComparison:
    exact: bool        # Ω' == Ω on the nose
    correction: Form   # ω' − ω − δθ, a d-closed (1,1)-form
    closed: bool       # d(correction) == 0
    accounted: bool    # Ω' − Ω == δ(correction)

    @property
    def modulo_exact(self) -> bool:
        return self.closed and self.accounted


def gauge_comparison(L: Lagrangian, theta: Form, M: MultisymplecticData | None = None) -> GaugeComparison:
    """Compare Ω for ℒ and ℒ + dθ.

    The canonical IBP hands back δθ only up to a d-exact piece, so Ω can move by
    a δd-exact term when θ involves derivatives; that term is reported.
    """
    M = M or multisymplectic(L)
    M2 = multisymplectic(gauge_shift(L, theta))
    corr = M2.boundary_form - M.boundary_form - vertical_diff(theta)
    return GaugeComparison((M2.omega - M.omega).is_zero, corr,
                           horizontal_diff(corr).is_zero,
                           (M2.omega - M.omega - vertical_diff(corr)).is_zero)
