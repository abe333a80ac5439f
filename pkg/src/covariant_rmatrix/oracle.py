"""Randomized rational-point oracle.

Independent of the canonicalizer except for reading stored terms: every
exact verdict can be re-checked by evaluating both sides at random
admissible points (consistent trig pairs, nonvanishing denominators).
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import lcm
from typing import Iterable

from .forms import Form
from .scalar import (Assignment, GQ, Scalar, SingularEvaluation, eval_rational,
                     is_jet, is_param, is_trig, param)


def _small_rational(rng: random.Random) -> Fraction:
    while True:
        v = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
        if v:
            return v


def _value(rng: random.Random, complex_values: bool) -> GQ:
    if complex_values and rng.random() < 0.5:
        return GQ(_small_rational(rng), _small_rational(rng))
    return GQ(_small_rational(rng))


def pythagorean_pair(rng: random.Random):
    """(s, c) with s² + c² = 1 from a random rational tangent half-angle."""
    t = _small_rational(rng)
    d = 1 + t * t
    return (2 * t / d, (1 - t * t) / d)


def random_assignment(scalars: Iterable[Scalar], rng: random.Random,
                      complex_values: bool = True) -> Assignment:
    gens = set()
    classes: dict = {}
    for s in scalars:
        for g in s.generators():
            if is_trig(g):
                cls = g.angle_class
                classes[cls] = lcm(classes.get(cls, 1), g.ratio.denominator)
                for n, _ in g.pmono:
                    gens.add(param(n))
            else:
                gens.add(g)
    values = {}
    for g in sorted(gens):
        if is_param(g):
            values[g] = GQ(_small_rational(rng))
        else:
            values[g] = _value(rng, complex_values)
    angles = {cls: (L,) + pythagorean_pair(rng) for cls, L in sorted(classes.items())}
    return Assignment(values, angles)


def _pairs_of(a, b) -> list:
    """Flatten two Scalars, Forms or coefficient dicts into aligned Scalar pairs."""
    if isinstance(a, Scalar) or isinstance(b, Scalar):
        return [(Scalar.of(a), Scalar.of(b))]
    if isinstance(a, Form) or isinstance(b, Form):
        ta = a.terms if isinstance(a, Form) else {}
        tb = b.terms if isinstance(b, Form) else {}
        zero = Scalar(0)
        return [(ta.get(k, zero), tb.get(k, zero)) for k in sorted(set(ta) | set(tb))]
    raise TypeError(f"cannot compare {type(a).__name__} and {type(b).__name__}")


def sample_agreement(pairs: list, rng: random.Random, samples: int = 20,
                     max_tries: int = 200) -> list:
    """Evaluate each pair at ``samples`` points; returns per-point booleans
    (True when every pair agrees at that point)."""
    flat = []
    for a, b in pairs:
        flat.extend(_pairs_of(a, b))
    scalars = [s for p in flat for s in p]
    results = []
    tries = 0
    while len(results) < samples:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not find enough admissible evaluation points")
        point = random_assignment(scalars, rng)
        try:
            vals = [(eval_rational(x, point), eval_rational(y, point)) for x, y in flat]
        except SingularEvaluation:
            continue
        results.append(all(u == v for u, v in vals))
    return results


def confirm(pairs: list, expect_equal: bool, rng: random.Random, samples: int = 20) -> bool:
    """True when sampling agrees with the exact verdict ``expect_equal``."""
    agree = sample_agreement(pairs, rng, samples)
    return all(agree) if expect_equal else not all(agree)
