"""(p,q)-forms and multivector fields of the variational bicomplex.

A form is stored fully expanded as ``{(vertical, horizontal): Scalar}``
where ``vertical`` is a strictly increasing tuple of JetVars (the
generators ``δu^(μ)``) and ``horizontal`` a strictly increasing tuple of
directions (0 = dx, 1 = dt).  The monomial is read as
``δv1∧…∧δvp∧dx^a∧dx^b``: vertical factors first.
Multivector fields use the same layout with ``∂`` in place of ``δ``/``d``.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .scalar import (DIRECTION_NAMES, ONE, ZERO, JetVar, Scalar, X, T, jet,
                     partial_jet, total_derivative)

DEFAULT_VERTICAL_CAP = 6


class DegreeOverflow(ValueError):
    """Vertical degree exceeded the configured cap."""


def _merge_sign(a: tuple, b: tuple):
    """Sorted concatenation of two strictly sorted tuples, with the sign of
    the shuffle; ``None`` if they share an element."""
    if not a:
        return b, 1
    if not b:
        return a, 1
    out = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None, 0
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            # b[j] jumps over the remaining elements of a
            if (len(a) - i) % 2:
                sign = -sign
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


def _add_term(acc: dict, key, c: Scalar):
    prev = acc.get(key)
    if prev is None:
        if c:
            acc[key] = c
        return
    s = prev + c
    if s:
        acc[key] = s
    else:
        del acc[key]


class _Graded:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms = {}
        if terms:
            for k, c in terms.items():
                c = Scalar.of(c)
                if c:
                    self.terms[k] = c

    @classmethod
    def _wrap(cls, terms: dict):
        o = object.__new__(cls)
        o.terms = terms
        return o

    def __add__(self, other):
        if isinstance(other, (int, Scalar)) and not other:
            return self
        if type(other) is not type(self):
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_term(out, k, c)
        return self._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "_Graded":
        s = Scalar.of(s)
        if not s:
            return self._wrap({})
        out = {}
        for k, c in self.terms.items():
            p = c * s
            if p:
                out[k] = p
        return self._wrap(out)

    def __mul__(self, s):
        if isinstance(s, _Graded):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def map_coefficients(self, fn):
        out = {}
        for k, c in self.terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return self._wrap(out)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero
        if type(other) is not type(self):
            return NotImplemented
        return (self - other).is_zero

    def __hash__(self):
        return hash(frozenset(self.terms.keys()))

    def degrees(self) -> set:
        return {(len(v), len(h)) for v, h in self.terms}

    def coefficient(self, vertical: Iterable = (), horizontal: Iterable = ()) -> Scalar:
        v = tuple(vertical)
        h = tuple(horizontal)
        sv = tuple(sorted(v))
        sh = tuple(sorted(h))
        sign = _perm_sign(v, sv) * _perm_sign(h, sh)
        c = self.terms.get((sv, sh), ZERO)
        return c if sign > 0 else -c

    def jets(self) -> set:
        out = set()
        for (v, _), c in self.terms.items():
            out.update(v)
            out |= c.jets()
        return out

    def max_jet_order(self) -> int:
        return max((j.order for j in self.jets()), default=-1)


def _perm_sign(seq: tuple, target: tuple) -> int:
    if len(set(seq)) != len(seq):
        return 0
    pos = {g: i for i, g in enumerate(target)}
    p = [pos[g] for g in seq]
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


class Form(_Graded):
    """Scalar-coefficient (p,q)-form; value semantics."""

    __slots__ = ()

    @staticmethod
    def scalar(f) -> "Form":
        f = Scalar.of(f)
        return Form._wrap({((), ()): f} if f else {})

    @staticmethod
    def monomial(coeff, vertical: Iterable[JetVar] = (), horizontal: Iterable[int] = ()) -> "Form":
        v, h = tuple(vertical), tuple(horizontal)
        sv, sh = tuple(sorted(v)), tuple(sorted(h))
        sign = _perm_sign(v, sv) * _perm_sign(h, sh)
        if not sign:
            return Form()
        c = Scalar.of(coeff)
        return Form({(sv, sh): c if sign > 0 else -c})

    def wedge(self, other: "Form", cap: int = DEFAULT_VERTICAL_CAP) -> "Form":
        return wedge(self, other, cap)

    def __xor__(self, other):
        return wedge(self, other)

    def horizontal_split(self) -> dict:
        """Map horizontal tuple -> purely vertical Form."""
        out: dict = {}
        for (v, h), c in self.terms.items():
            out.setdefault(h, {})[(v, ())] = c
        return {h: Form._wrap(t) for h, t in out.items()}

    def horizontal_component(self, h: tuple) -> "Form":
        return Form._wrap({(v, ()): c for (v, hh), c in self.terms.items() if hh == h})

    def scalar_part(self) -> Scalar:
        return self.terms.get(((), ()), ZERO)

    def render(self) -> str:
        return render_graded(self.terms, "δ", "d")

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Form({self.render()!r})"


class MultiVectorField(_Graded):
    """Scalar-coefficient multivector: wedge of vertical ``∂_v`` and ``∂_x, ∂_t``."""

    __slots__ = ()

    @staticmethod
    def monomial(coeff, vertical: Iterable[JetVar] = (), horizontal: Iterable[int] = ()) -> "MultiVectorField":
        v, h = tuple(vertical), tuple(horizontal)
        sv, sh = tuple(sorted(v)), tuple(sorted(h))
        sign = _perm_sign(v, sv) * _perm_sign(h, sh)
        if not sign:
            return MultiVectorField()
        c = Scalar.of(coeff)
        return MultiVectorField({(sv, sh): c if sign > 0 else -c})

    @staticmethod
    def vector(components: Mapping) -> "MultiVectorField":
        """Degree-one field from ``{JetVar or direction: Scalar}``."""
        terms = {}
        for g, c in components.items():
            key = ((), (g,)) if isinstance(g, int) else ((g,), ())
            terms[key] = Scalar.of(c)
        return MultiVectorField(terms)

    def wedge(self, other: "MultiVectorField") -> "MultiVectorField":
        out: dict = {}
        for (v1, h1), c1 in self.terms.items():
            for (v2, h2), c2 in other.terms.items():
                key, sign = _wedge_keys(v1, h1, v2, h2)
                if key is None:
                    continue
                c = c1 * c2
                _add_term(out, key, c if sign > 0 else -c)
        return MultiVectorField._wrap(out)

    def render(self) -> str:
        return render_graded(self.terms, "∂", "∂")

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"MultiVectorField({self.render()!r})"


def _wedge_keys(v1, h1, v2, h2):
    v, s1 = _merge_sign(v1, v2)
    if v is None:
        return None, 0
    h, s2 = _merge_sign(h1, h2)
    if h is None:
        return None, 0
    sign = s1 * s2
    if len(h1) * len(v2) % 2:
        sign = -sign
    return (v, h), sign


def wedge(a: Form, b: Form, cap: int = DEFAULT_VERTICAL_CAP) -> Form:
    out: dict = {}
    for (v1, h1), c1 in a.terms.items():
        for (v2, h2), c2 in b.terms.items():
            key, sign = _wedge_keys(v1, h1, v2, h2)
            if key is None:
                continue
            if len(key[0]) > cap:
                raise DegreeOverflow(f"vertical degree {len(key[0])} exceeds cap {cap}")
            c = c1 * c2
            _add_term(out, key, c if sign > 0 else -c)
    return Form._wrap(out)


def wedge_all(*forms: Form) -> Form:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def dx() -> Form:
    return Form._wrap({((), (X,)): ONE})


def dt() -> Form:
    return Form._wrap({((), (T,)): ONE})


def dvar(v: JetVar) -> Form:
    """The vertical generator ``δv``."""
    return Form._wrap({((v,), ()): ONE})


def horizontal_generator(direction: int) -> Form:
    return dx() if direction == X else dt()


# ---------------------------------------------------------------------------
# differentials


def vertical_diff(a: Form, cap: int = DEFAULT_VERTICAL_CAP) -> Form:
    """δ.  On ``f δV∧H`` it gives ``Σ ∂f/∂v δv∧δV∧H``."""
    out: dict = {}
    for (V, H), f in a.terms.items():
        for v in sorted(f.jets()):
            if v in V:
                continue
            df = partial_jet(f, v)
            if not df:
                continue
            nv, sign = _merge_sign((v,), V)
            if len(nv) > cap:
                raise DegreeOverflow(f"vertical degree {len(nv)} exceeds cap {cap}")
            _add_term(out, (nv, H), df if sign > 0 else -df)
    return Form._wrap(out)


def horizontal_diff(a: Form) -> Form:
    """d, as a graded derivation over the ordered factors of each monomial."""
    out: dict = {}
    for (V, H), f in a.terms.items():
        # d f ∧ V ∧ H : move dx^ν past the p vertical factors
        for nu in (X, T):
            if nu in H:
                continue
            g = total_derivative(f, nu)
            if not g:
                continue
            nh, s2 = _merge_sign((nu,), H)
            sign = s2 * (-1 if len(V) % 2 else 1)
            _add_term(out, (V, nh), g if sign > 0 else -g)
        # f (−1)^j δv1 ∧ … ∧ d(δvj) ∧ … ∧ H with d(δu) = −Σ δu_ν ∧ dx^ν
        for j, v in enumerate(V):
            rest = V[:j] + V[j + 1:]
            for nu in (X, T):
                if nu in H:
                    continue
                w = v.shift(nu)
                if w in rest:
                    continue
                # term: −(−1)^j f δv1…δw…δvp ∧ dx^ν … with δw at slot j and
                # dx^ν right after it; move dx^ν past the p−1−j later factors
                sign = -1 if j % 2 else 1
                sign = -sign
                if (len(V) - 1 - j) % 2:
                    sign = -sign
                slot = rest[:j] + (w,) + rest[j:]
                nv = tuple(sorted(slot))
                sign *= _perm_sign(slot, nv)
                nh, s2 = _merge_sign((nu,), H)
                sign *= s2
                _add_term(out, (nv, nh), f if sign > 0 else -f)
    return Form._wrap(out)


# ---------------------------------------------------------------------------
# interior products


def _contract_generator(g, is_vertical: bool, a: Form) -> Form:
    """ι_{∂g} with graded sign (−1)^(position)."""
    out: dict = {}
    for (V, H), f in a.terms.items():
        if is_vertical:
            if g not in V:
                continue
            j = V.index(g)
            key = (V[:j] + V[j + 1:], H)
        else:
            if g not in H:
                continue
            j = len(V) + H.index(g)
            k = H.index(g)
            key = (V, H[:k] + H[k + 1:])
        _add_term(out, key, -f if j % 2 else f)
    return Form._wrap(out)


def interior(Xf: MultiVectorField, a: Form) -> Form:
    """ι_X a; multivectors contract their rightmost factor first."""
    total: dict = {}
    for (V, H), c in Xf.terms.items():
        res = a
        factors = [(v, True) for v in V] + [(h, False) for h in H]
        for g, vert in reversed(factors):
            res = _contract_generator(g, vert, res)
            if not res:
                break
        if not res:
            continue
        for k, f in res.terms.items():
            _add_term(total, k, f * c)
    return Form._wrap(total)


def prolonged_field(direction: int, max_order: int, fields: Iterable[str]) -> MultiVectorField:
    """∂̃_ν = Σ u^(μ+e_ν) ∂_{u^(μ)} over |μ| ≤ max_order."""
    comps = {}
    for k in fields:
        for n in range(max_order + 1):
            for mt in range(n + 1):
                v = jet(k, n - mt, mt)
                comps[v] = Scalar.gen(v.shift(direction))
    return MultiVectorField.vector(comps)


def contract_prolonged(direction: int, a: Form) -> Form:
    """ι_{∂̃_ν} a, truncated at the jet order of ``a`` (exact)."""
    comps = {}
    for (V, _), _c in a.terms.items():
        for v in V:
            comps[v] = Scalar.gen(v.shift(direction))
    if not comps:
        return Form()
    return interior(MultiVectorField.vector(comps), a)


# ---------------------------------------------------------------------------
# rendering


def _gen_text(g, vert_prefix: str, hor_prefix: str) -> str:
    if isinstance(g, int):
        return f"{hor_prefix}{DIRECTION_NAMES[g]}"
    return f"{vert_prefix}{g}"


def render_graded(terms: Mapping, vp: str, hp: str) -> str:
    if not terms:
        return "0"
    parts = []
    for (V, H), c in sorted(terms.items(), key=lambda kv: (len(kv[0][0]), len(kv[0][1]), kv[0])):
        gens = "∧".join([_gen_text(v, vp, hp) for v in V] + [_gen_text(h, vp, hp) for h in H])
        ctext = str(c)
        if gens:
            parts.append(f"({ctext})·{gens}")
        else:
            parts.append(f"({ctext})")
    return " + ".join(parts)
