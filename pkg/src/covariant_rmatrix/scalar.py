"""Coefficient algebra for the variational bicomplex.

A :class:`Scalar` is an exact fraction ``num / den`` over the Gaussian
rationals.  The numerator is a polynomial in jet variables, trigonometric
atoms and parameter symbols; the denominator involves parameters only, so
jets and trig atoms always occur polynomially.

Trigonometric atoms ``sin(c*u)``, ``cos(c*u)`` are kept in the normal form
where no ``sin`` carries an exponent above one (``s^2 -> 1 - c^2``).  All
atoms of one angle class (same field, same parameter monomial) inside a
Scalar share a single base angle; combining Scalars with different bases
re-expresses both over the gcd of the two rational multiples.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Iterable, Mapping, NamedTuple

from gmpy2 import mpq
from sympy import QQ_I, ring

X, T = 0, 1
DIRECTIONS = (X, T)
DIRECTION_NAMES = ("x", "t")

STANDARD_PARAMS = ("m", "beta", "lambda", "mu", "nu")

_CAT_JET, _CAT_TRIG, _CAT_PARAM = 0, 1, 2
COS, SIN = 0, 1


class SingularEvaluation(ZeroDivisionError):
    pass


class UnboundGenerator(KeyError):
    pass


class NonPolynomialDivision(ArithmeticError):
    """Division by a Scalar whose numerator involves jets or trig atoms."""


# ---------------------------------------------------------------------------
# Gaussian rationals


class GQ:
    """Exact Gaussian rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def _raw(re, im):
        o = object.__new__(GQ)
        o.re = re
        o.im = im
        return o

    @staticmethod
    def coerce(v) -> "GQ":
        if isinstance(v, GQ):
            return v
        if isinstance(v, complex):
            return GQ(Fraction(v.real), Fraction(v.imag))
        return GQ(v)

    def __add__(self, o):
        if not isinstance(o, GQ):
            o = GQ.coerce(o)
        return GQ._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        if not isinstance(o, GQ):
            o = GQ.coerce(o)
        return GQ._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GQ.coerce(o) - self

    def __neg__(self):
        return GQ._raw(-self.re, -self.im)

    def __mul__(self, o):
        if not isinstance(o, GQ):
            o = GQ.coerce(o)
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return GQ._raw(a * c, b)
        return GQ._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = GQ.coerce(o)
        n = o.re * o.re + o.im * o.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b, c, d = self.re, self.im, o.re, o.im
        return GQ._raw((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, o):
        return GQ.coerce(o) / self

    def __pow__(self, n: int):
        if n < 0:
            return (GQ(1) / self) ** (-n)
        out, base = GQ(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return GQ._raw(self.re, -self.im)

    def __eq__(self, o):
        if isinstance(o, GQ):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return not self.im and self.re == o
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    @property
    def is_real(self):
        return not self.im

    def __repr__(self):
        return f"GQ({self})"

    def __str__(self):
        if not self.im:
            return _fmt_q(self.re)
        if not self.re:
            return _fmt_imag(self.im)
        im = _fmt_imag(abs(self.im))
        return f"({_fmt_q(self.re)} {'-' if self.im < 0 else '+'} {im})"


def _fmt_q(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _fmt_imag(q) -> str:
    if q == 1:
        return "i"
    if q == -1:
        return "-i"
    return f"{_fmt_q(q)}*i"


ONE_GQ = GQ(1)
I_GQ = GQ(0, 1)


# ---------------------------------------------------------------------------
# generators


class MultiIndex(NamedTuple):
    mx: int
    mt: int

    @property
    def order(self) -> int:
        return self.mx + self.mt

    def shift(self, direction: int, by: int = 1) -> "MultiIndex":
        if direction == X:
            return MultiIndex(self.mx + by, self.mt)
        return MultiIndex(self.mx, self.mt + by)


class JetVar(NamedTuple):
    """``u_k^(mx, mt)``; ``cat`` only pins the category order."""

    cat: int
    field: str
    mx: int
    mt: int

    @property
    def index(self) -> MultiIndex:
        return MultiIndex(self.mx, self.mt)

    @property
    def order(self) -> int:
        return self.mx + self.mt

    def shift(self, direction: int, by: int = 1) -> "JetVar":
        if direction == X:
            return JetVar(_CAT_JET, self.field, self.mx + by, self.mt)
        return JetVar(_CAT_JET, self.field, self.mx, self.mt + by)

    @property
    def base(self) -> "JetVar":
        return JetVar(_CAT_JET, self.field, 0, 0)

    def __str__(self):
        if not self.mx and not self.mt:
            return self.field
        return f"{self.field}_{'x' * self.mx}{'t' * self.mt}"


class Param(NamedTuple):
    cat: int
    name: str

    def __str__(self):
        return self.name


class TrigAtom(NamedTuple):
    """``sin`` or ``cos`` of ``ratio * pmono * field``."""

    cat: int
    field: str
    pmono: tuple  # ((param name, exponent), ...) sorted
    ratio: Fraction
    kind: int

    @property
    def angle_class(self):
        return (self.field, self.pmono)

    def with_ratio(self, ratio: Fraction, kind: int | None = None) -> "TrigAtom":
        return TrigAtom(_CAT_TRIG, self.field, self.pmono, ratio,
                        self.kind if kind is None else kind)

    def __str__(self):
        return f"{'sin' if self.kind == SIN else 'cos'}({angle_text(self.field, self.pmono, self.ratio)})"


def angle_text(field: str, pmono: tuple, ratio: Fraction) -> str:
    parts = []
    if ratio.numerator != 1:
        parts.append(str(ratio.numerator))
    for name, e in pmono:
        parts.append(name if e == 1 else f"{name}^{e}")
    parts.append(field)
    out = "*".join(parts)
    if ratio.denominator != 1:
        out += f"/{ratio.denominator}"
    return out


def jet(field: str, mx: int = 0, mt: int = 0) -> JetVar:
    return JetVar(_CAT_JET, field, mx, mt)


def param(name: str) -> Param:
    return Param(_CAT_PARAM, name)


def trig_atom(kind: int, field: str, pmono: tuple = (), ratio=Fraction(1)) -> TrigAtom:
    ratio = Fraction(ratio)
    if ratio <= 0:
        raise ValueError("trig atoms carry a positive angle ratio")
    return TrigAtom(_CAT_TRIG, field, tuple(sorted(pmono)), ratio, kind)


def is_jet(g) -> bool:
    return g[0] == _CAT_JET


def is_trig(g) -> bool:
    return g[0] == _CAT_TRIG


def is_param(g) -> bool:
    return g[0] == _CAT_PARAM


# ---------------------------------------------------------------------------
# sparse polynomials: dict[monomial, GQ]; monomial = sorted ((gen, exp), ...)

_ONE_MONO: tuple = ()


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        g1, e1 = m1[i]
        g2, e2 = m2[j]
        if g1 == g2:
            out.append((g1, e1 + e2))
            i += 1
            j += 1
        elif g1 < g2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _needs_trig_reduce(m: tuple) -> bool:
    for g, e in m:
        if g[0] == _CAT_TRIG and g[4] == SIN and e >= 2:
            return True
    return False


def _p_add_into(acc: dict, p: Mapping, scale: GQ | None = None):
    for m, c in p.items():
        if scale is not None:
            c = c * scale
        v = acc.get(m)
        if v is None:
            acc[m] = c
        else:
            v = v + c
            if v:
                acc[m] = v
            else:
                del acc[m]


def _p_mul(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    reduce = False
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            c = c1 * c2
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
    for m in out:
        if _needs_trig_reduce(m):
            reduce = True
            break
    return _trig_reduce(out) if reduce else out


def _p_scale(a: Mapping, c: GQ) -> dict:
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


def _p_pow(a: Mapping, n: int) -> dict:
    out: dict = {_ONE_MONO: ONE_GQ}
    base = dict(a)
    while n:
        if n & 1:
            out = _p_mul(out, base)
        n >>= 1
        if n:
            base = _p_mul(base, base)
    return out


def _trig_reduce(p: Mapping) -> dict:
    out: dict = {}
    for m, c in p.items():
        if not _needs_trig_reduce(m):
            _p_add_into(out, {m: c})
            continue
        rest = []
        factors = []
        for g, e in m:
            if g[0] == _CAT_TRIG and g[4] == SIN and e >= 2:
                cosg = g.with_ratio(g.ratio, COS)
                f = _p_pow({((cosg, 2),): -ONE_GQ, _ONE_MONO: ONE_GQ}, e // 2)
                if e % 2:
                    f = {_mono_mul(k, ((g, 1),)): v for k, v in f.items()}
                factors.append(f)
            else:
                rest.append((g, e))
        term = {tuple(rest): c}
        for f in factors:
            term = _p_mul(term, f)
        _p_add_into(out, term)
    return out


def _split_params(m: tuple):
    """Split a monomial into (non-parameter part, parameter part)."""
    k = len(m)
    for idx, (g, _) in enumerate(m):
        if g[0] == _CAT_PARAM:
            k = idx
            break
    return m[:k], m[k:]


# ---------------------------------------------------------------------------
# multiple angles


@lru_cache(maxsize=None)
def _multiple_angle(k: int):
    """cos(k t), sin(k t) as dicts {(cos_exp, sin_exp): int}, reduced."""
    cos_p: dict = {}
    sin_p: dict = {}
    for j in range(k + 1):
        coeff = comb(k, j)
        # i^j
        if j % 2 == 0:
            target, sign = cos_p, (-1) ** (j // 2)
        else:
            target, sign = sin_p, (-1) ** ((j - 1) // 2)
        # c^(k-j) s^j with s^2 = 1 - c^2
        se, q = j % 2, j // 2
        for r in range(q + 1):
            term = comb(q, r) * (-1) ** r
            key = (k - j + 2 * r, se)
            target[key] = target.get(key, 0) + sign * coeff * term
    return ({a: v for a, v in cos_p.items() if v}, {a: v for a, v in sin_p.items() if v})


def _atom_poly(shape: Mapping, cosg: TrigAtom, sing: TrigAtom) -> dict:
    out = {}
    for (ce, se), v in shape.items():
        mono = []
        if ce:
            mono.append((cosg, ce))
        if se:
            mono.append((sing, se))
        out[tuple(mono)] = GQ(v)
    return out


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    num = gcd(a.numerator, b.numerator)
    den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def _rebase(num: Mapping, targets: Mapping) -> dict:
    """Re-express atoms of the given angle classes over new base ratios."""
    out: dict = {}
    for m, c in num.items():
        if not any(g[0] == _CAT_TRIG and g.angle_class in targets for g, _ in m):
            _p_add_into(out, {m: c})
            continue
        rest = []
        term = None
        for g, e in m:
            if g[0] == _CAT_TRIG and g.angle_class in targets:
                base = targets[g.angle_class]
                k = g.ratio / base
                if k.denominator != 1:
                    raise ValueError("trig rebase target does not divide the angle")
                cos_s, sin_s = _multiple_angle(int(k))
                cosg = g.with_ratio(base, COS)
                sing = g.with_ratio(base, SIN)
                f = _p_pow(_atom_poly(cos_s if g.kind == COS else sin_s, cosg, sing), e)
                term = f if term is None else _p_mul(term, f)
            else:
                rest.append((g, e))
        _p_add_into(out, _p_mul({tuple(rest): c}, term))
    return out


def _bases_of(num: Mapping) -> dict:
    out: dict = {}
    for m in num:
        for g, _ in m:
            if g[0] == _CAT_TRIG:
                out[g.angle_class] = g.ratio
    return out


# ---------------------------------------------------------------------------
# gcd of parameter polynomials (delegated to sympy over QQ_I)


@lru_cache(maxsize=64)
def _param_ring(names: tuple):
    return ring(",".join(f"p{i}" for i in range(len(names))) or "p0", QQ_I)[0]


def _to_ring(p: Mapping, names: tuple):
    R = _param_ring(names)
    index = {n: i for i, n in enumerate(names)}
    width = max(len(names), 1)
    d = {}
    for m, c in p.items():
        exps = [0] * width
        for g, e in m:
            exps[index[g.name]] = e
        d[tuple(exps)] = QQ_I(c.re, c.im)
    return R.from_dict(d)


def _from_ring(e, names: tuple) -> dict:
    out = {}
    for exps, c in e.items():
        mono = tuple((param(names[i]), k) for i, k in enumerate(exps) if k)
        out[mono] = GQ._raw(mpq(c.x), mpq(c.y))
    return out


def _leading(p: Mapping):
    def key(m):
        return (sum(e for _, e in m), tuple((g, e) for g, e in m))
    # graded lex: higher degree first, then earliest generator with larger exponent
    best = None
    for m in p:
        deg = sum(e for _, e in m)
        if best is None or deg > best[0] or (deg == best[0] and _lex_greater(m, best[1])):
            best = (deg, m)
    return best[1]


def _lex_greater(m1: tuple, m2: tuple) -> bool:
    for (g1, e1), (g2, e2) in zip(m1, m2):
        if g1 != g2:
            return g1 < g2
        if e1 != e2:
            return e1 > e2
    return len(m1) > len(m2)


_ONE_POLY = {_ONE_MONO: ONE_GQ}


def _canonical(num: dict, den: dict):
    if not num:
        return {}, _ONE_POLY
    if len(den) == 1 and _ONE_MONO in den:
        c = den[_ONE_MONO]
        if c == ONE_GQ:
            return num, _ONE_POLY
        inv = ONE_GQ / c
        return _p_scale(num, inv), _ONE_POLY
    groups: dict = {}
    for m, c in num.items():
        rest, pm = _split_params(m)
        groups.setdefault(rest, {})[pm] = c
    names = set()
    for m in den:
        names.update(g.name for g, _ in m)
    for grp in groups.values():
        for m in grp:
            names.update(g.name for g, _ in m)
    names = tuple(sorted(names))
    g = _to_ring(den, names)
    for grp in groups.values():
        if g.is_ground:
            break
        g = g.gcd(_to_ring(grp, names))
    if not g.is_ground:
        den = _from_ring(_to_ring(den, names).exquo(g), names)
        num = {}
        for rest, grp in groups.items():
            q = _from_ring(_to_ring(grp, names).exquo(g), names)
            for pm, c in q.items():
                num[_mono_mul(rest, pm)] = c
    lc = den[_leading(den)]
    if len(den) == 1 and _ONE_MONO in den:
        return _p_scale(num, ONE_GQ / lc), _ONE_POLY
    if lc != ONE_GQ:
        inv = ONE_GQ / lc
        num = _p_scale(num, inv)
        den = _p_scale(den, inv)
    return num, den


# ---------------------------------------------------------------------------
# Scalar


class Scalar:
    """Immutable canonical element of the coefficient algebra."""

    __slots__ = ("num", "den", "_trig")

    def __init__(self, value=0):
        c = GQ.coerce(value)
        self.num = {_ONE_MONO: c} if c else {}
        self.den = _ONE_POLY
        self._trig = False

    @staticmethod
    def _raw(num: dict, den: dict) -> "Scalar":
        o = object.__new__(Scalar)
        o.num = num
        o.den = den
        o._trig = any(g[0] == _CAT_TRIG for m in num for g, _ in m)
        return o

    @staticmethod
    def _make(num: dict, den: dict) -> "Scalar":
        num, den = _canonical(num, den)
        return Scalar._raw(num, den)

    @staticmethod
    def gen(g) -> "Scalar":
        return Scalar._raw({((g, 1),): ONE_GQ}, _ONE_POLY)

    @staticmethod
    def of(value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (JetVar, Param, TrigAtom)):
            return Scalar.gen(value)
        return Scalar(value)

    # -- predicates -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    @property
    def is_constant(self) -> bool:
        return not self.num or (len(self.num) == 1 and _ONE_MONO in self.num and len(self.den) == 1)

    @property
    def is_jet_free(self) -> bool:
        """True when the numerator involves parameters only."""
        return all(g[0] == _CAT_PARAM for m in self.num for g, _ in m)

    def constant_value(self) -> GQ:
        if not self.num:
            return GQ(0)
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        return self.num[_ONE_MONO]

    def generators(self) -> set:
        out = set()
        for m in self.num:
            out.update(g for g, _ in m)
        for m in self.den:
            out.update(g for g, _ in m)
        return out

    def jets(self) -> set:
        """Jet variables the value depends on (trig atoms count via their field)."""
        out = set()
        for m in self.num:
            for g, _ in m:
                if g[0] == _CAT_JET:
                    out.add(g)
                elif g[0] == _CAT_TRIG:
                    out.add(jet(g.field))
        return out

    def params(self) -> set:
        out = set()
        for g in self.generators():
            if g[0] == _CAT_PARAM:
                out.add(g.name)
            elif g[0] == _CAT_TRIG:
                out.update(n for n, _ in g.pmono)
        return out

    def trig_bases(self) -> dict:
        return _bases_of(self.num) if self._trig else {}

    def max_jet_order(self) -> int:
        return max((j.order for j in self.jets()), default=-1)

    def degree_in(self, v) -> int:
        return max((e for m in self.num for g, e in m if g == v), default=0)

    # -- arithmetic -------------------------------------------------------
    def _aligned(self, other: "Scalar"):
        if not (self._trig and other._trig):
            return self.num, other.num
        ba, bb = _bases_of(self.num), _bases_of(other.num)
        targets = {}
        for cls in ba.keys() & bb.keys():
            if ba[cls] != bb[cls]:
                targets[cls] = _frac_gcd(ba[cls], bb[cls])
        if not targets:
            return self.num, other.num
        na = _rebase(self.num, {c: r for c, r in targets.items() if ba[c] != r})
        nb = _rebase(other.num, {c: r for c, r in targets.items() if bb[c] != r})
        return na, nb

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        na, nb = self._aligned(other)
        if self.den == other.den:
            out = dict(na)
            _p_add_into(out, nb)
            if self.den is _ONE_POLY or (len(self.den) == 1 and _ONE_MONO in self.den):
                return Scalar._raw(out, _ONE_POLY) if out else ZERO
            return Scalar._make(out, self.den)
        out = _p_mul(na, other.den)
        _p_add_into(out, _p_mul(nb, self.den))
        return Scalar._make(out, _p_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw({m: -c for m, c in self.num.items()}, self.den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num or not other.num:
            return ZERO
        na, nb = self._aligned(other)
        num = _p_mul(na, nb)
        if self.den is _ONE_POLY and other.den is _ONE_POLY:
            return Scalar._raw(num, _ONE_POLY) if num else ZERO
        return Scalar._make(num, _p_mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            raise ZeroDivisionError("division by the zero Scalar")
        if not other.is_jet_free:
            raise NonPolynomialDivision(f"cannot divide by {other}: jet variables may only occur polynomially")
        if not self.num:
            return ZERO
        return Scalar._make(_p_mul(self.num, other.den), _p_mul(self.den, other.num))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ONE / self ** (-n)
        if n == 0:
            return ONE
        if self.den is _ONE_POLY:
            return Scalar._raw(_p_pow(self.num, n), _ONE_POLY)
        return Scalar._make(_p_pow(self.num, n), _p_pow(self.den, n))

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den and self.num == other.num:
            return True
        return (self - other).is_zero

    def __hash__(self):
        # invariant under trig rebasing: non-trig monomial parts and denominator
        parts = frozenset(tuple((g, e) for g, e in m if g[0] != _CAT_TRIG) for m in self.num)
        return hash((parts, tuple(sorted(self.den.items()))))

    # -- structure --------------------------------------------------------
    def terms(self):
        """Numerator terms in display order (graded lex, descending)."""
        return sorted(self.num.items(), key=_display_key)

    def coefficient_groups(self) -> dict:
        """Map non-parameter monomial -> parameter-only Scalar coefficient."""
        groups: dict = {}
        for m, c in self.num.items():
            rest, pm = _split_params(m)
            groups.setdefault(rest, {})[pm] = c
        return {rest: Scalar._make(grp, self.den) for rest, grp in groups.items()}

    def map_params(self, mapping: Mapping[str, str]) -> "Scalar":
        """Simultaneously rename parameter symbols (e.g. lambda -> mu)."""
        if not mapping:
            return self

        def sub_mono(m):
            out = {}
            for g, e in m:
                if g[0] == _CAT_PARAM and g.name in mapping:
                    g = param(mapping[g.name])
                elif g[0] == _CAT_TRIG and any(n in mapping for n, _ in g.pmono):
                    pm = tuple(sorted((mapping.get(n, n), k) for n, k in g.pmono))
                    g = TrigAtom(_CAT_TRIG, g.field, pm, g.ratio, g.kind)
                out[g] = out.get(g, 0) + e
            return tuple(sorted(out.items()))

        num: dict = {}
        for m, c in self.num.items():
            _p_add_into(num, {sub_mono(m): c})
        den: dict = {}
        for m, c in self.den.items():
            _p_add_into(den, {sub_mono(m): c})
        return Scalar._make(num, den)

    def conjugate_i(self) -> "Scalar":
        """Complex-conjugate every coefficient (generators untouched)."""
        return Scalar._make({m: c.conjugate() for m, c in self.num.items()},
                            {m: c.conjugate() for m, c in self.den.items()})

    # -- text -------------------------------------------------------------
    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Scalar({to_text(self)!r})"


def _coerce(v):
    if isinstance(v, Scalar):
        return v
    if isinstance(v, (int, Fraction, GQ)):
        return Scalar(v)
    if isinstance(v, (JetVar, Param, TrigAtom)):
        return Scalar.gen(v)
    return NotImplemented


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(GQ(0, 1))


def _display_key(item):
    m, _ = item
    return (-sum(e for _, e in m), tuple((g, -e) for g, e in m))


def _mono_text(m: tuple) -> str:
    parts = []
    for g, e in m:
        s = str(g)
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


def _poly_text(p: Mapping) -> str:
    if not p:
        return "0"
    out = []
    for m, c in sorted(p.items(), key=_display_key):
        mono = _mono_text(m)
        neg = False
        if c.is_real:
            neg = c.re < 0
            mag = GQ(abs(c.re))
            coef = "" if mag == 1 and mono else str(mag)
        elif not c.re:
            neg = c.im < 0
            mag = GQ(0, abs(c.im))
            coef = str(mag)
        else:
            coef = str(c)
        term = coef + ("*" if coef and mono else "") + mono
        if not out:
            out.append(("-" if neg else "") + term)
        else:
            out.append(("- " if neg else "+ ") + term)
    return " ".join(out)


def to_text(a: Scalar) -> str:
    """Deterministic, re-parseable text form."""
    num = _poly_text(a.num)
    if len(a.den) == 1 and _ONE_MONO in a.den:
        return num
    return f"({num})/({_poly_text(a.den)})"


# ---------------------------------------------------------------------------
# differentiation


def _gen_total_derivative(g, direction: int) -> dict:
    if g[0] == _CAT_JET:
        return {((g.shift(direction), 1),): ONE_GQ}
    if g[0] == _CAT_PARAM:
        return {}
    # d/dx sin(c u) = c u_x cos(c u);  d/dx cos(c u) = -c u_x sin(c u)
    u_dir = jet(g.field).shift(direction)
    other = g.with_ratio(g.ratio, COS if g.kind == SIN else SIN)
    coeff = GQ(mpq(g.ratio.numerator, g.ratio.denominator))
    if g.kind == COS:
        coeff = -coeff
    pm = tuple((param(n), e) for n, e in g.pmono)
    mono = _mono_mul(_mono_mul(pm, ((u_dir, 1),)), ((other, 1),))
    return {mono: coeff}


def _poly_derivation(num: Mapping, gen_derivative) -> dict:
    out: dict = {}
    for m, c in num.items():
        for idx, (g, e) in enumerate(m):
            dg = gen_derivative(g)
            if not dg:
                continue
            rest = m[:idx] + ((m[idx][0], e - 1),) + m[idx + 1:] if e > 1 else m[:idx] + m[idx + 1:]
            _p_add_into(out, _p_mul({rest: c * GQ(e)}, dg))
    return _trig_reduce(out) if any(_needs_trig_reduce(m) for m in out) else out


def total_derivative(a: Scalar, direction: int) -> Scalar:
    """Total derivative D_x (direction 0) or D_t (direction 1)."""
    if not a.num:
        return ZERO
    num = _poly_derivation(a.num, lambda g: _gen_total_derivative(g, direction))
    if not num:
        return ZERO
    if a.den is _ONE_POLY:
        return Scalar._raw(num, _ONE_POLY)
    return Scalar._make(num, a.den)


def partial_jet(a: Scalar, v: JetVar) -> Scalar:
    """Formal partial derivative with respect to one jet variable."""
    base = v.mx == 0 and v.mt == 0

    def dgen(g):
        if g == v:
            return {_ONE_MONO: ONE_GQ}
        if base and g[0] == _CAT_TRIG and g.field == v.field:
            other = g.with_ratio(g.ratio, COS if g.kind == SIN else SIN)
            coeff = GQ(mpq(g.ratio.numerator, g.ratio.denominator))
            if g.kind == COS:
                coeff = -coeff
            pm = tuple((param(n), e) for n, e in g.pmono)
            return {_mono_mul(pm, ((other, 1),)): coeff}
        return {}

    if not a.num:
        return ZERO
    num = _poly_derivation(a.num, dgen)
    if not num:
        return ZERO
    if a.den is _ONE_POLY:
        return Scalar._raw(num, _ONE_POLY)
    return Scalar._make(num, a.den)


def substitute_jet(a: Scalar, v: JetVar, value: Scalar) -> Scalar:
    """Replace the jet variable ``v`` by ``value`` (``v`` must not be a trig base)."""
    if a._trig and v.mx == 0 and v.mt == 0 and any(
            g[0] == _CAT_TRIG and g.field == v.field for m in a.num for g, _ in m):
        raise ValueError(f"cannot substitute {v}: it is the argument of a trig atom")
    by_power: dict = {}
    for m, c in a.num.items():
        e = 0
        rest = []
        for g, k in m:
            if g == v:
                e = k
            else:
                rest.append((g, k))
        by_power.setdefault(e, {})[tuple(rest)] = c
    if set(by_power) == {0}:
        return a
    out = ZERO
    for e, p in sorted(by_power.items()):
        term = Scalar._make(p, a.den)
        out = out + (term * value ** e if e else term)
    return out


# ---------------------------------------------------------------------------
# rational evaluation (test oracle)


class Assignment:
    """A point: values for parameters and jets, plus trig unit angles.

    ``angles`` maps an angle class ``(field, pmono)`` to ``(L, s, c)``:
    the unit angle is ``pmono*field/L`` with ``sin = s``, ``cos = c`` and
    ``s^2 + c^2 = 1``.  An atom with ratio ``p/q`` evaluates through
    ``(c + i s)^(L p/q)``, which must be an integer power.
    """

    def __init__(self, values: Mapping, angles: Mapping | None = None):
        self.values = {k: GQ.coerce(v) for k, v in values.items()}
        self.angles = dict(angles or {})
        self._cache: dict = {}

    def value(self, g) -> GQ:
        if g[0] == _CAT_TRIG:
            return self._trig(g)
        try:
            return self.values[g]
        except KeyError:
            raise UnboundGenerator(f"unbound generator {g}") from None

    def _trig(self, g: TrigAtom) -> GQ:
        hit = self._cache.get(g)
        if hit is not None:
            return hit
        try:
            L, s, c = self.angles[g.angle_class]
        except KeyError:
            raise UnboundGenerator(f"no angle value for {g}") from None
        k = g.ratio * L
        if k.denominator != 1:
            raise UnboundGenerator(f"angle unit 1/{L} does not divide {g}")
        re, im = mpq(1), mpq(0)
        cr, sr = mpq(c), mpq(s)
        for _ in range(int(k)):
            re, im = re * cr - im * sr, re * sr + im * cr
        out = GQ(im if g.kind == SIN else re)
        self._cache[g] = out
        return out


def _eval_poly(p: Mapping, point: Assignment) -> GQ:
    total = GQ(0)
    for m, c in p.items():
        v = c
        for g, e in m:
            v = v * point.value(g) ** e
        total = total + v
    return total


def eval_rational(a: Scalar, point: Assignment) -> GQ:
    """Evaluate ``a`` at an exact point; raises on a vanishing denominator."""
    den = _eval_poly(a.den, point)
    if not den:
        raise SingularEvaluation("singular evaluation point")
    return _eval_poly(a.num, point) / den


def collect_generators(values: Iterable[Scalar]) -> set:
    out = set()
    for s in values:
        out |= s.generators()
    return out


def symbol(name: str) -> Scalar:
    return Scalar.gen(param(name))


def field_jet(field: str, mx: int = 0, mt: int = 0) -> Scalar:
    return Scalar.gen(jet(field, mx, mt))


def sin_of(field: str, pmono: tuple = (), ratio=1) -> Scalar:
    return Scalar.gen(trig_atom(SIN, field, pmono, ratio))


def cos_of(field: str, pmono: tuple = (), ratio=1) -> Scalar:
    return Scalar.gen(trig_atom(COS, field, pmono, ratio))
