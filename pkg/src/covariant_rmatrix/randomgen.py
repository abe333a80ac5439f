"""Seeded random inputs for the property suites and experiment scripts."""

from __future__ import annotations

import random
from fractions import Fraction

from .forms import Form
from .scalar import (GQ, ONE, ZERO, Scalar, T, X, cos_of, field_jet, jet,
                     partial_jet, sin_of, symbol)


def coeff(rng: random.Random, complex_ok: bool = True) -> GQ:
    re = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    im = Fraction(rng.randint(-3, 3), rng.randint(1, 3)) if complex_ok and rng.random() < 0.3 else 0
    if not re and not im:
        re = Fraction(1)
    return GQ(re, im)


def jets_upto(fields, order: int) -> list:
    return [jet(k, n - mt, mt) for k in fields for n in range(order + 1) for mt in range(n + 1)]


def random_scalar(rng: random.Random, fields=("u", "v"), order: int = 2, terms: int = 3,
                  degree: int = 2, params=("m",), trig: bool = False) -> Scalar:
    """Sparse random polynomial in jets (and optionally parameters / one trig atom)."""
    pool = [Scalar.gen(j) for j in jets_upto(fields, order)]
    if trig:
        pool.append(sin_of(fields[0], (("beta", 1),), Fraction(1, 2)))
        pool.append(cos_of(fields[0], (("beta", 1),), Fraction(1, 2)))
    ppool = [symbol(p) for p in params]
    out = ZERO
    for _ in range(terms):
        t = Scalar(coeff(rng))
        for _ in range(rng.randint(0, degree)):
            t = t * rng.choice(pool)
        if ppool and rng.random() < 0.3:
            t = t * rng.choice(ppool)
        out = out + t
    return out


def random_form(rng: random.Random, p: int, q: int, fields=("u", "v"), order: int = 3,
                terms: int = 2, **kw) -> Form:
    gens = jets_upto(fields, order)
    out = Form()
    for _ in range(terms):
        V = rng.sample(gens, p)
        H = rng.sample([X, T], q)
        c = random_scalar(rng, fields, order, terms=2, degree=2, **kw)
        out = out + Form.monomial(c, V, H)
    return out


def _poly1(rng: random.Random, var: Scalar, degree: int = 2, extra=()) -> Scalar:
    out = ZERO
    for k in range(degree + 1):
        if rng.random() < 0.7:
            out = out + Scalar(coeff(rng, complex_ok=False)) * var ** k
    for e in extra:
        if rng.random() < 0.5:
            out = out + Scalar(coeff(rng, complex_ok=False)) * e
    return out


def sg_hamiltonian_one_form(rng: random.Random) -> Form:
    """F = (A φ_t + B) dx + (A φ_x + C) dt with A, B, C functions of φ."""
    phi = field_jet("phi")
    trig = (sin_of("phi", (("beta", 1),), Fraction(1, 2)), cos_of("phi", (("beta", 1),), Fraction(1, 2)))
    A, B, C = (_poly1(rng, phi, 2, trig) for _ in range(3))
    F1 = A * field_jet("phi", 0, 1) + B
    F2 = A * field_jet("phi", 1, 0) + C
    return Form.monomial(F1, (), (X,)) + Form.monomial(F2, (), (T,))


def nls_hamiltonian_one_form(rng: random.Random) -> Form:
    """F¹(q,r) dx + (i F¹_q q_x − i F¹_r r_x + C(q,r)) dt."""
    q, r = field_jet("q"), field_jet("r")
    i = Scalar(GQ(0, 1))

    def poly():
        out = ZERO
        for a in range(3):
            for b in range(3 - a):
                if rng.random() < 0.4:
                    out = out + Scalar(coeff(rng)) * q ** a * r ** b
        return out

    F1, C = poly(), poly()
    F2 = (i * partial_jet(F1, jet("q")) * field_jet("q", 1)
          - i * partial_jet(F1, jet("r")) * field_jet("r", 1) + C)
    return Form.monomial(F1, (), (X,)) + Form.monomial(F2, (), (T,))


def zero_form_on(rng: random.Random, coords: list, degree: int = 2, terms: int = 3) -> Form:
    pool = [Scalar.gen(v) for v in coords]
    out = ZERO
    for _ in range(terms):
        t = Scalar(coeff(rng))
        for _ in range(rng.randint(1, degree)):
            t = t * rng.choice(pool)
        out = out + t
    return Form.scalar(out)


def random_theta(rng: random.Random, fields, order: int = 1, params=()) -> Form:
    """A random (0,1)-form θ = a dx + b dt."""
    a = random_scalar(rng, fields, order, terms=2, degree=2, params=params)
    b = random_scalar(rng, fields, order, terms=2, degree=2, params=params)
    return Form.monomial(a, (), (X,)) + Form.monomial(b, (), (T,))
