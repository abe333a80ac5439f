import pytest
from hypothesis import given
from hypothesis import strategies as st

from covariant_rmatrix.forms import (DegreeOverflow, Form, MultiVectorField, contract_prolonged,
                                     dt, dvar, dx, horizontal_diff, interior, prolonged_field,
                                     vertical_diff, wedge, wedge_all)
from covariant_rmatrix.scalar import ONE, T, X, cos_of, field_jet, jet, sin_of, symbol, total_derivative
from strategies import JETS, forms

phi, phi_x, phi_t = jet("phi"), jet("phi", 1), jet("phi", 0, 1)
J = field_jet


def test_repeated_generator_vanishes():
    assert wedge_all(dvar(phi), dx(), dx()).is_zero
    assert wedge(dvar(phi), dvar(phi)).is_zero


def test_odd_generators_anticommute():
    assert wedge(dvar(phi_t), dvar(phi)) == -wedge(dvar(phi), dvar(phi_t))


def test_mixed_wedge_sign():
    q, r = jet("q"), jet("r")
    lhs = wedge(wedge(dvar(q), dx()), wedge(dvar(r), dt()))
    assert lhs == -wedge_all(dvar(q), dvar(r), dx(), dt())


def test_vertical_cap():
    gens = [dvar(jet("u", k)) for k in range(7)]
    with pytest.raises(DegreeOverflow):
        wedge_all(*gens)


def test_delta_examples():
    f = Form.monomial(J("phi", 0, 1), [phi], [X])
    assert vertical_diff(f) == Form.monomial(ONE, [phi_t, phi], [X])
    beta = symbol("beta")
    g = Form.monomial(cos_of("phi", (("beta", 1),)), [], [X, T])
    assert vertical_diff(g) == Form.monomial(-beta * sin_of("phi", (("beta", 1),)), [phi], [X, T])


def test_d_examples():
    assert horizontal_diff(dvar(phi)) == -wedge(dvar(phi_x), dx()) - wedge(dvar(phi_t), dt())
    f = Form.monomial(J("phi", 0, 1), [phi], [X])
    expect = Form.monomial(J("phi", 0, 2), [phi], [X, T]) + Form.monomial(J("phi", 0, 1), [phi_t], [X, T])
    assert horizontal_diff(f) == expect


def test_d_on_scalars():
    a = J("phi") ** 2 * J("phi", 1)
    assert horizontal_diff(Form.scalar(a)) == (Form.monomial(total_derivative(a, X), [], [X])
                                               + Form.monomial(total_derivative(a, T), [], [T]))


def test_interior_examples():
    u = jet("u", 1, 1)
    assert interior(MultiVectorField.vector({X: ONE}), Form.monomial(ONE, [u], [X, T])) \
        == -Form.monomial(ONE, [u], [T])
    v = jet("v", 2)
    assert interior(MultiVectorField.vector({u: ONE}), Form.monomial(ONE, [v, u], [X])) \
        == -Form.monomial(ONE, [v], [X])
    # rightmost factor contracts first
    biv = MultiVectorField.monomial(ONE, [phi], [X])
    assert interior(biv, wedge(dvar(phi), dx())) == Form.scalar(-ONE)


def test_prolonged_field():
    P = prolonged_field(X, 1, ["phi"])
    assert P == MultiVectorField.vector({phi: J("phi", 1), phi_x: J("phi", 2), phi_t: J("phi", 1, 1)})
    assert interior(prolonged_field(T, 0, ["phi"]), wedge(dvar(phi), dx())) == Form.monomial(J("phi", 0, 1), [], [X])


def test_sg_boundary_contraction():
    # ω^(1,1) for sine-Gordon: −φ_t δφ∧dx − φ_x δφ∧dt
    w = -Form.monomial(J("phi", 0, 1), [phi], [X]) - Form.monomial(J("phi", 1), [phi], [T])
    expect = Form.monomial(-J("phi", 0, 1) * J("phi", 1), [], [X]) - Form.monomial(J("phi", 1) ** 2, [], [T])
    assert contract_prolonged(X, w) == expect


@given(forms())
def test_d_squared(a):
    assert horizontal_diff(horizontal_diff(a)).is_zero


@given(forms())
def test_delta_squared(a):
    assert vertical_diff(vertical_diff(a)).is_zero


@given(forms(trig=True))
def test_d_delta_anticommute(a):
    assert (horizontal_diff(vertical_diff(a)) + vertical_diff(horizontal_diff(a))).is_zero


@given(st.integers(0, 2), st.integers(0, 1), st.integers(0, 2), st.integers(0, 1), st.data())
def test_graded_commutativity_any_degree(p1, q1, p2, q2, data):
    a = data.draw(forms(p=p1, q=q1, max_terms=1))
    b = data.draw(forms(p=p2, q=q2, max_terms=1))
    assert wedge(a, b) == wedge(b, a).scale((-1) ** ((p1 + q1) * (p2 + q2)))


@given(st.data())
def test_interior_leibniz(data):
    a = data.draw(forms(p=1, q=1, max_terms=1))
    b = data.draw(forms(p=1, q=0, max_terms=1))
    comps = data.draw(st.dictionaries(st.sampled_from(JETS + [X, T]), st.just(ONE), min_size=1, max_size=3))
    Xf = MultiVectorField.vector(comps)
    lhs = interior(Xf, wedge(a, b))
    rhs = wedge(interior(Xf, a), b) + wedge(a, interior(Xf, b))  # deg a = 2
    assert lhs == rhs


@given(forms())
def test_normalisation_idempotent(a):
    again = Form()
    for (V, H), c in a.terms.items():
        again = again + Form.monomial(c, V, H)
    assert again == a
