import random
from fractions import Fraction

import pytest

from covariant_rmatrix.forms import Form, MultiVectorField, dt, dx, interior, vertical_diff
from covariant_rmatrix.poisson import (NotHamiltonian, bracket_with_field, covariant_bracket,
                                       energy_momentum, hamilton_field_equations_check, hamiltonian,
                                       is_hamiltonian, single_time_brackets, splitting)
from covariant_rmatrix.lax import hamilton_equation_check
from covariant_rmatrix.randomgen import (nls_hamiltonian_one_form, sg_hamiltonian_one_form,
                                         zero_form_on)
from covariant_rmatrix.scalar import (I, ONE, T, X, ZERO, Scalar, cos_of, field_jet, jet,
                                      partial_jet, symbol)
from covariant_rmatrix.variational import Lagrangian, multisymplectic
from conftest import mkdv_lax, nls_lax, sg_lax

J = field_jet
m, beta, lam = symbol("m"), symbol("beta"), symbol("lambda")
phi, phi_x, phi_t = jet("phi"), jet("phi", 1), jet("phi", 0, 1)
q, r, qx, rx = jet("q"), jet("r"), jet("q", 1), jet("r", 1)


def parts(F):
    return F.coefficient((), (X,)), F.coefficient((), (T,))


def in_kernel(Y, M):
    return interior(Y, M.omega).is_zero


def random_pair(name, rng):
    gen = {"sine-gordon": sg_hamiltonian_one_form, "nls": nls_hamiltonian_one_form}[name]
    return gen(rng), gen(rng)


# --- recognition -----------------------------------------------------------

def test_zero_form_is_hamiltonian(contexts):
    h = hamiltonian(Form(), contexts["nls"].data)
    assert h.vector_field.is_zero


def test_nls_obstruction(contexts):
    M = contexts["nls"].data
    ok, rep = is_hamiltonian(Form.monomial(J("q", 1), [], [X]), M)
    assert not ok
    assert any("dx-component depends on q_x" in d for d in rep.dependencies)
    with pytest.raises(NotHamiltonian) as exc:
        hamiltonian(Form.monomial(J("q", 1), [], [X]), M)
    assert exc.value.report.dependencies


def test_nls_q_dx_needs_dt_partner(contexts):
    M = contexts["nls"].data
    assert not is_hamiltonian(Form.monomial(J("q"), [], [X]), M)[0]
    assert is_hamiltonian(Form.monomial(J("q"), [], [X]) + Form.monomial(I * J("q", 1), [], [T]), M)[0]


# --- X_F against the closed-form component formulas -------------------------

@pytest.mark.parametrize("seed", range(5))
def test_sg_generic_vector_field(contexts, seed):
    M = contexts["sine-gordon"].data
    F = sg_hamiltonian_one_form(random.Random(seed))
    F1, F2 = parts(F)
    Xf = hamiltonian(F, M).vector_field
    formula = MultiVectorField.vector({phi: partial_jet(F1, phi_t), phi_x: -partial_jet(F2, phi),
                                       phi_t: -partial_jet(F1, phi)})
    assert interior(Xf, M.omega) == vertical_diff(F)
    assert in_kernel(Xf - formula, M)


@pytest.mark.parametrize("seed", range(5))
def test_nls_generic_vector_field(contexts, seed):
    M = contexts["nls"].data
    F = nls_hamiltonian_one_form(random.Random(seed))
    _, F2 = parts(F)
    Xf = hamiltonian(F, M).vector_field
    formula = MultiVectorField.vector({q: partial_jet(F2, rx), r: partial_jet(F2, qx),
                                       qx: -partial_jet(F2, r), rx: -partial_jet(F2, q)})
    assert in_kernel(Xf - formula, M)


@pytest.mark.parametrize("name,lax", [("sine-gordon", sg_lax), ("nls", nls_lax), ("mkdv", mkdv_lax)])
def test_lax_components_are_hamiltonian(contexts, name, lax):
    M = contexts[name].data
    for comp in lax().form().components.values():
        h = hamiltonian(comp, M)
        assert interior(h.vector_field, M.omega) == vertical_diff(comp)


def test_sg_vector_field_of_h_modulo_kernel(contexts):
    ctx = contexts["sine-gordon"]
    M = ctx.data
    H = ctx.energy.hamiltonian
    h = hamiltonian(Form.scalar(H), M)
    assert interior(h.vector_field, M.omega) == vertical_diff(Form.scalar(H))
    assert h.kernel_basis
    for K in h.kernel_basis:
        assert in_kernel(K, M)


# --- bracket goldens --------------------------------------------------------

def test_sg_w1_w3_bracket(contexts):
    M = contexts["sine-gordon"].data
    W, Wm = sg_lax().form().components, sg_lax().at("mu").form().components
    k0 = m * (lam + 1 / lam) / 4
    k1 = m * (lam - 1 / lam) / 4
    c = -beta ** 2 / 8 * cos_of("phi", (("beta", 1),), Fraction(1, 2))
    assert covariant_bracket(W["sigma1"], Wm["sigma3"], M) == Form.monomial(c * k0, [], [X]) + Form.monomial(c * k1, [], [T])


def test_nls_wplus_wminus(contexts):
    M = contexts["nls"].data
    W, Wm = nls_lax().form().components, nls_lax().at("mu").form().components
    mu = symbol("mu")
    expect = Form.monomial(-I, [], [X]) + Form.monomial(-I * (lam + mu), [], [T])
    assert covariant_bracket(W["sigma+"], Wm["sigma-"], M) == expect
    assert splitting(W["sigma+"], Wm["sigma-"], M) == expect


def test_nls_pi_s(contexts):
    st = single_time_brackets(contexts["nls"].data)
    assert st.coords_S == [q, r]
    assert st.pi_S == [[ZERO, -I], [I, ZERO]]
    A, C = J("q") ** 2 * J("r"), J("r") ** 3
    dA = [partial_jet(A, v) for v in (q, r)]
    dC = [partial_jet(C, v) for v in (q, r)]
    assert st.bracket_S(A, C) == I * (dA[0] * dC[1] - dC[0] * dA[1])


def test_sg_single_time(contexts):
    st = single_time_brackets(contexts["sine-gordon"].data)
    A, C = J("phi") * J("phi", 0, 1) ** 2, J("phi") ** 3 + J("phi", 0, 1)
    d = partial_jet
    assert st.bracket_S(A, C) == d(A, phi_t) * d(C, phi) - d(A, phi) * d(C, phi_t)
    B, D = J("phi", 1) * J("phi"), J("phi", 1) ** 2
    assert st.bracket_T(B, D) == d(B, phi) * d(D, phi_x) - d(D, phi) * d(B, phi_x)


def test_self_bracket_vanishes(contexts, rng):
    M = contexts["sine-gordon"].data
    F = sg_hamiltonian_one_form(rng)
    assert covariant_bracket(F, F, M).is_zero
    assert splitting(F, F, M).is_zero


# --- randomized structure ----------------------------------------------------

MODELS_WITH_GENERATORS = ("sine-gordon", "nls")


@pytest.mark.parametrize("name", MODELS_WITH_GENERATORS)
def test_antisymmetry_one_forms(contexts, name, rng):
    M = contexts[name].data
    for _ in range(10):
        F, G = random_pair(name, rng)
        assert covariant_bracket(F, G, M) + covariant_bracket(G, F, M) == Form()


@pytest.mark.parametrize("name", MODELS_WITH_GENERATORS)
def test_antisymmetry_mixed_degree(contexts, name, rng):
    M = contexts[name].data
    for _ in range(10):
        F, _ = random_pair(name, rng)
        H = zero_form_on(rng, M.coordinates)
        # g(H) = 1, g(F) = 0: {{H,F}} + {{F,H}} = 0
        assert covariant_bracket(H, F, M) + covariant_bracket(F, H, M) == Form()


@pytest.mark.parametrize("name", MODELS_WITH_GENERATORS)
def test_jacobi(contexts, name, rng):
    M = contexts[name].data
    for _ in range(5):
        F, G = random_pair(name, rng)
        K, _ = random_pair(name, rng)
        br = lambda a, b: covariant_bracket(a, b, M)
        total = br(F, br(G, K)) + br(G, br(K, F)) + br(K, br(F, G))
        assert total.is_zero


@pytest.mark.parametrize("name", MODELS_WITH_GENERATORS)
def test_closure(contexts, name, rng):
    M = contexts[name].data
    for _ in range(10):
        F, G = random_pair(name, rng)
        assert is_hamiltonian(covariant_bracket(F, G, M), M)[0]
        H = zero_form_on(rng, M.coordinates)
        assert is_hamiltonian(covariant_bracket(H, F, M), M)[0]


@pytest.mark.parametrize("name", MODELS_WITH_GENERATORS)
def test_kernel_independence(contexts, name, rng):
    M = contexts[name].data
    for _ in range(5):
        F, G = random_pair(name, rng)
        H = zero_form_on(rng, M.coordinates)
        for src, p in ((F, 1), (H, 0)):
            h = hamiltonian(src, M)
            base = bracket_with_field(h.vector_field, p, G)
            for K in h.kernel_basis:
                shifted = h.vector_field + K.scale(Scalar(rng.randint(1, 5)) * J(M.coordinates[0].field))
                assert bracket_with_field(shifted, p, G) == base


@pytest.mark.parametrize("name", MODELS_WITH_GENERATORS)
def test_splitting_matches_bracket(contexts, name, rng):
    M = contexts[name].data
    st = single_time_brackets(M)
    for _ in range(20):
        F, G = random_pair(name, rng)
        assert splitting(F, G, M, st) == covariant_bracket(F, G, M)


# --- energy-momentum and Hamilton's equations -------------------------------

def test_energy_momentum_goldens(contexts):
    em = contexts["sine-gordon"].energy
    pot = m ** 2 / beta ** 2 * (1 - cos_of("phi", (("beta", 1),)))
    Pt, Px = J("phi", 0, 1), J("phi", 1)
    assert em.T_xx == -Pt ** 2 / 2 - Px ** 2 / 2 + pot
    assert em.T_tt == Pt ** 2 / 2 + Px ** 2 / 2 + pot
    assert em.hamiltonian == (Pt ** 2 - Px ** 2) / 2 + pot
    Q, R = J("q"), J("r")
    assert contexts["nls"].energy.hamiltonian == Q ** 2 * R ** 2 - J("q", 1) * J("r", 1)
    assert contexts["mkdv"].energy.hamiltonian == I * (J("q", 2) * J("r", 1) - J("r", 2) * J("q", 1))


@pytest.mark.parametrize("name", ["sine-gordon", "nls", "mkdv"])
def test_field_equations(contexts, name):
    ctx = contexts[name]
    res = hamilton_field_equations_check(ctx.lagrangian, ctx.data)
    assert res.holds
    assert set(res.signs.values()) == {-1}


def test_field_equations_free_and_trivial():
    free = Lagrangian((J("phi", 0, 1) ** 2 - J("phi", 1) ** 2) / 2, ("phi",))
    res = hamilton_field_equations_check(free, multisymplectic(free))
    assert res.holds
    assert res.residual.coefficient((phi,), (X, T)) == J("phi", 0, 2) - J("phi", 2)
    zero = Lagrangian(ZERO, ("phi",))
    assert hamilton_field_equations_check(zero, multisymplectic(zero)).residual.is_zero


@pytest.mark.parametrize("name,lax", [("sine-gordon", sg_lax), ("nls", nls_lax), ("mkdv", mkdv_lax)])
def test_hamilton_equation_on_lax_components(contexts, name, lax):
    ctx = contexts[name]
    H = ctx.energy.hamiltonian
    for comp in lax().form().components.values():
        ok, _ = hamilton_equation_check(H, comp, ctx.data)
        assert ok


def test_hamilton_equation_constant_form(contexts):
    ctx = contexts["nls"]
    F = Form.monomial(Scalar(3), [], [X]) + Form.monomial(I, [], [T])
    ok, residual = hamilton_equation_check(ctx.energy.hamiltonian, F, ctx.data)
    assert ok and residual.is_zero
