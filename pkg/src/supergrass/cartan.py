"""Pseudodifferential and integral forms on the odd tangent bundle of R^{0|n}.

A form is a function of the odd coordinates xi^1..xi^n and of commuting fiber
coordinates y^1..y^n (the differentials d xi^a).  Two kinds are represented:

* :class:`PseudoForm` -- polynomials in y with Grassmann coefficients;
* :class:`IntegralForm` -- finite sums of delta-function derivatives
  ``d^k delta(y)`` with Grassmann coefficients.

A term is ``c * (fiber part) * xi_A`` with the fiber part fully commuting, so
the only sign bookkeeping is the reordering of xi's.  The coefficient algebra
may carry extra generators beyond index n (odd constants, dual-number
parameters); calculus only touches the first n.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .algebra import (
    DimensionMismatch,
    EvenMatrix,
    GrassmannElement,
    GrassmannError,
    ParityError,
    matrix_det,
    matrix_inverse,
    monomial_masks,
    reorder_sign,
    substitute,
)

Key = tuple[tuple[int, ...], int]


class NonNilpotentFlow(GrassmannError):
    pass


def _unit(n: int, a: int) -> tuple[int, ...]:
    e = [0] * n
    e[a] = 1
    return tuple(e)


class _FiberExpansion:
    """Shared storage for both kinds of forms: ``{(exponents, xi-mask): rational}``."""

    __slots__ = ("n", "adim", "terms", "_hash")

    def __init__(self, n: int, terms: dict[Key, Fraction] | None = None, adim: int | None = None):
        self.n = n
        self.adim = n if adim is None else adim
        if self.adim < n:
            raise ValueError("coefficient algebra smaller than the base")
        out = {}
        for (e, m), c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad fiber multi-index {e}")
            if m >> self.adim:
                raise IndexError("monomial outside coefficient algebra")
            c = Fraction(c)
            if c:
                out[(e, m)] = out.get((e, m), 0) + c
        self.terms = {k: v for k, v in out.items() if v}
        self._hash = None

    @classmethod
    def _raw(cls, n, adim, terms):
        obj = cls.__new__(cls)
        obj.n, obj.adim, obj.terms, obj._hash = n, adim, terms, None
        return obj

    @classmethod
    def zero(cls, n: int, adim: int | None = None):
        return cls._raw(n, n if adim is None else adim, {})

    def _like(self, terms):
        return type(self)._raw(self.n, self.adim, terms)

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n != self.n or other.adim != self.adim:
            raise DimensionMismatch(f"({self.n},{self.adim}) vs ({other.n},{other.adim})")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._like(out)

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "_FiberExpansion":
        c = Fraction(c)
        if not c:
            return self._like({})
        return self._like({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and self.n == other.n
            and self.adim == other.adim
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.n, self.adim, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def embed(self, adim: int):
        if adim < self.adim and any(m >> adim for _, m in self.terms):
            raise DimensionMismatch("form uses generators beyond the requested algebra")
        return type(self)._raw(self.n, adim, dict(self.terms))

    def coefficients(self) -> dict[tuple[int, ...], GrassmannElement]:
        """Group terms by fiber multi-index."""
        groups: dict[tuple[int, ...], dict[int, Fraction]] = {}
        for (e, m), c in self.terms.items():
            groups.setdefault(e, {})[m] = c
        return {e: GrassmannElement._raw(self.adim, t) for e, t in groups.items()}

    def coefficient(self, e: Sequence[int]) -> GrassmannElement:
        e = tuple(e)
        return GrassmannElement._raw(self.adim, {m: c for (k, m), c in self.terms.items() if k == e})

    @classmethod
    def from_coefficients(cls, n: int, coeffs: dict, adim: int | None = None):
        terms = {}
        dim = None
        for e, ge in coeffs.items():
            dim = ge.dim
            for m, c in ge.terms.items():
                terms[(tuple(e), m)] = c
        if adim is None:
            adim = dim if dim is not None else n
        return cls._raw(n, adim, terms) if terms else cls.zero(n, adim)

    def xi_parities(self) -> set[int]:
        return {m.bit_count() & 1 for _, m in self.terms}

    @property
    def parity(self) -> int | None:
        """Grassmann parity (0/1) when homogeneous, else ``None``; zero reports 0."""
        ps = self.xi_parities()
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def part(self, parity: int):
        return self._like({k: c for k, c in self.terms.items() if k[1].bit_count() % 2 == parity})

    def lmul(self, a: GrassmannElement):
        """Left multiplication by a function of xi."""
        if a.dim != self.adim:
            raise DimensionMismatch(f"coefficient algebra {a.dim} vs {self.adim}")
        out: dict[Key, Fraction] = {}
        for ma, ca in a.terms.items():
            for (e, m), c in self.terms.items():
                if ma & m:
                    continue
                key = (e, ma | m)
                v = out.get(key, 0) + (ca * c if reorder_sign(ma, m) > 0 else -ca * c)
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return self._like(out)

    def xi_derivative(self, a: int):
        """Left derivative with respect to xi^a (1-based), acting on the xi part."""
        if not 1 <= a <= self.adim:
            raise IndexError(f"generator {a} out of range")
        bit = 1 << (a - 1)
        below = bit - 1
        out = {}
        for (e, m), c in self.terms.items():
            if m & bit:
                out[(e, m ^ bit)] = -c if (m & below).bit_count() & 1 else c
        return self._like(out)

    def substitute_xi(self, images: Sequence[GrassmannElement]):
        """Apply an algebra homomorphism to the Grassmann coefficients only."""
        out = None
        for e, ge in self.coefficients().items():
            piece = type(self).from_coefficients(self.n, {e: substitute(ge, images)})
            out = piece if out is None else out + piece
        if out is None:
            return type(self).zero(self.n, images[0].dim if images else self.adim)
        return out

    def max_fiber_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)


class PseudoForm(_FiberExpansion):
    """Polynomial in the commuting fiber variables y^a with Grassmann coefficients."""

    __slots__ = ()

    @classmethod
    def from_grassmann(cls, a: GrassmannElement, n: int | None = None) -> "PseudoForm":
        n = a.dim if n is None else n
        z = (0,) * n
        return cls._raw(n, a.dim, {(z, m): c for m, c in a.terms.items()})

    @classmethod
    def y(cls, n: int, a: int, adim: int | None = None) -> "PseudoForm":
        return cls._raw(n, n if adim is None else adim, {(_unit(n, a - 1), 0): Fraction(1)})

    @classmethod
    def one(cls, n: int, adim: int | None = None) -> "PseudoForm":
        return cls._raw(n, n if adim is None else adim, {((0,) * n, 0): Fraction(1)})

    @classmethod
    def term(cls, n: int, y: Sequence[int], xi: Iterable[int], c=1, adim: int | None = None):
        """``c * y^y * xi^{i1}...xi^{ik}`` with the xi's multiplied in the given order."""
        ge = GrassmannElement.monomial(n if adim is None else adim, list(xi), c)
        return cls.from_grassmann(ge, n)._shift(tuple(y))

    def _shift(self, e: tuple[int, ...]) -> "PseudoForm":
        return self._like({(tuple(a + b for a, b in zip(k, e)), m): c for (k, m), c in self.terms.items()})

    def degrees(self) -> set[int]:
        return {sum(e) for e, _ in self.terms}

    @property
    def degree(self) -> int | None:
        ds = self.degrees()
        if len(ds) > 1:
            return None
        return ds.pop() if ds else 0

    def degree_part(self, k: int) -> "PseudoForm":
        return self._like({key: c for key, c in self.terms.items() if sum(key[0]) == k})

    def y_derivative(self, a: int) -> "PseudoForm":
        i = a - 1
        out = {}
        for (e, m), c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[(tuple(ne), m)] = c * e[i]
        return self._like(out)

    def y_multiply(self, a: int) -> "PseudoForm":
        return self._shift(_unit(self.n, a - 1))

    def __mul__(self, other):
        if isinstance(other, PseudoForm):
            return form_wedge(self, other)
        if isinstance(other, IntegralForm):
            return _poly_times_integral(self, other)
        if isinstance(other, GrassmannElement):
            return form_wedge(self, PseudoForm.from_grassmann(other, self.n))
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, GrassmannElement):
            return self.lmul(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "PseudoForm":
        out = PseudoForm.one(self.n, self.adim)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        return f"PseudoForm({self.n}, {format_form(self, 'y')})"


class IntegralForm(_FiberExpansion):
    """Finite sum ``c * xi_A * d^k delta(y)`` with ``d^k = prod_a (d/dy^a)^{k_a}``."""

    __slots__ = ()

    @classmethod
    def delta(cls, n: int, k: Sequence[int] | None = None, coeff: GrassmannElement | None = None):
        k = tuple(k) if k is not None else (0,) * n
        if coeff is None:
            coeff = GrassmannElement.scalar(n, 1)
        return cls._raw(n, coeff.dim, {(k, m): c for m, c in coeff.terms.items()})

    def codegrees(self) -> set[int]:
        return {sum(e) for e, _ in self.terms}

    @property
    def codegree(self) -> int | None:
        ds = self.codegrees()
        if len(ds) > 1:
            return None
        return ds.pop() if ds else 0

    def y_derivative(self, a: int) -> "IntegralForm":
        return self._like(
            {(tuple(x + (j == a - 1) for j, x in enumerate(e)), m): c for (e, m), c in self.terms.items()}
        )

    def y_multiply(self, a: int) -> "IntegralForm":
        """``y^a * d^k delta = -k_a d^{k - e_a} delta``."""
        i = a - 1
        out = {}
        for (e, m), c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[(tuple(ne), m)] = -c * e[i]
        return self._like(out)

    def __mul__(self, other):
        if isinstance(other, PseudoForm):
            return _integral_times_poly(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, GrassmannElement):
            return self.lmul(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __repr__(self):
        return f"IntegralForm({self.n}, {format_form(self, 'd')})"


Form = Union[PseudoForm, IntegralForm]


def format_form(f: _FiberExpansion, sym: str) -> str:
    if not f.terms:
        return "0"
    parts = []
    for e, ge in sorted(f.coefficients().items()):
        if sym == "y":
            fib = "".join(f"y{a + 1}" + (f"^{x}" if x > 1 else "") for a, x in enumerate(e) if x)
        else:
            fib = "".join(f"d{a + 1}" + (f"^{x}" if x > 1 else "") for a, x in enumerate(e) if x) + "δ"
        parts.append(f"({ge})" + (f"*{fib}" if fib else ""))
    return " + ".join(parts)


# products -------------------------------------------------------------------


def _check_pair(f, g):
    if f.n != g.n or f.adim != g.adim:
        raise DimensionMismatch(f"({f.n},{f.adim}) vs ({g.n},{g.adim})")


def form_wedge(f: PseudoForm, g: PseudoForm) -> PseudoForm:
    _check_pair(f, g)
    out: dict[Key, Fraction] = {}
    for (e1, m1), c1 in f.terms.items():
        for (e2, m2), c2 in g.terms.items():
            if m1 & m2:
                continue
            key = (tuple(a + b for a, b in zip(e1, e2)), m1 | m2)
            v = out.get(key, 0) + (c1 * c2 if reorder_sign(m1, m2) > 0 else -c1 * c2)
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return PseudoForm._raw(f.n, f.adim, out)


def _falling(k: int, m: int) -> int:
    return math.factorial(k) // math.factorial(k - m)


def _ymono_on_delta(m: tuple[int, ...], k: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """``y^m d^k delta = factor * d^{k-m} delta`` (or zero when some m_a > k_a)."""
    factor = 1
    for ma, ka in zip(m, k):
        if ma > ka:
            return None
        factor *= (-1) ** ma * _falling(ka, ma)
    return factor, tuple(ka - ma for ma, ka in zip(m, k))


def _poly_times_integral(f: PseudoForm, w: IntegralForm, flip: bool = False) -> IntegralForm:
    _check_pair(f, w)
    out: dict[Key, Fraction] = {}
    for (m, a), c1 in f.terms.items():
        for (k, b), c2 in w.terms.items():
            if a & b:
                continue
            r = _ymono_on_delta(m, k)
            if r is None:
                continue
            factor, nk = r
            sign = reorder_sign(b, a) if flip else reorder_sign(a, b)
            key = (nk, a | b)
            v = out.get(key, 0) + c1 * c2 * factor * sign
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return IntegralForm._raw(f.n, f.adim, out)


def _integral_times_poly(w: IntegralForm, f: PseudoForm) -> IntegralForm:
    return _poly_times_integral(f, w, flip=True)


# Berezin pairing --------------------------------------------------------------


def fiber_pairing(m: tuple[int, ...], k: tuple[int, ...]) -> int:
    """``∫ dy y^m d^k delta(y) = (-1)^{|k|} m! [m == k]``."""
    if m != k:
        return 0
    out = 1
    for x in k:
        out *= (-1) ** x * math.factorial(x)
    return out


def pair_element(f: PseudoForm, w: IntegralForm) -> GrassmannElement:
    """I[f ∧ w] with values in the auxiliary generators (if any)."""
    _check_pair(f, w)
    full = (1 << f.n) - 1
    by_k: dict[tuple[int, ...], list[tuple[int, Fraction]]] = {}
    for (k, b), c in w.terms.items():
        by_k.setdefault(k, []).append((b, c))
    out: dict[int, Fraction] = {}
    for (m, a), c1 in f.terms.items():
        entries = by_k.get(m)
        if not entries:
            continue
        fib = fiber_pairing(m, m)
        for b, c2 in entries:
            if a & b or (a | b) & full != full:
                continue
            rest = (a | b) & ~full
            v = out.get(rest, 0) + c1 * c2 * fib * reorder_sign(a, b)
            if v:
                out[rest] = v
            else:
                out.pop(rest, None)
    return GrassmannElement._raw(f.adim, out)


def berezin_pair(f: PseudoForm, w: IntegralForm) -> Fraction:
    """I[f ∧ w] as a rational number."""
    val = pair_element(f, w)
    if val.soul:
        raise ValueError("pairing has auxiliary-generator content; use pair_element")
    return val.body


def integrate_integral_form(w: IntegralForm) -> GrassmannElement:
    """I[w] = I[1 ∧ w]."""
    return pair_element(PseudoForm.one(w.n, w.adim), w)


# Cartan operators ---------------------------------------------------------------


def euler(f: Form) -> Form:
    """E = y^a d/dy^a."""
    if isinstance(f, IntegralForm):
        return f._like({(e, m): -c * (f.n + sum(e)) for (e, m), c in f.terms.items()})
    return f._like({(e, m): c * sum(e) for (e, m), c in f.terms.items() if sum(e)})


def derham(f: Form) -> Form:
    """Q = y^a d/dxi^a (left xi-derivative)."""
    out: dict[Key, Fraction] = {}
    integral = isinstance(f, IntegralForm)
    for (e, m), c in f.terms.items():
        for a in range(f.n):
            bit = 1 << a
            if not m & bit:
                continue
            s = -c if (m & (bit - 1)).bit_count() & 1 else c
            ne = list(e)
            if integral:
                if not e[a]:
                    continue
                s = -s * e[a]
                ne[a] -= 1
            else:
                ne[a] += 1
            key = (tuple(ne), m ^ bit)
            v = out.get(key, 0) + s
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return f._like(out)


class VectorField:
    """``V = V^a(xi) d/dxi^a`` of declared parity; components have parity ``parity + 1``."""

    __slots__ = ("n", "parity", "components")

    def __init__(self, parity: int, components: Sequence[GrassmannElement], n: int | None = None):
        self.parity = parity % 2
        self.components = tuple(components)
        self.n = len(self.components) if n is None else n
        if len(self.components) != self.n:
            raise DimensionMismatch("one component per base generator required")
        want = (self.parity + 1) % 2
        for c in self.components:
            if c and c.parity != want:
                raise ParityError(f"component {c} has wrong parity for a parity-{self.parity} field")
        dims = {c.dim for c in self.components}
        if len(dims) > 1:
            raise DimensionMismatch("components live in different algebras")

    @property
    def adim(self) -> int:
        return self.components[0].dim

    @classmethod
    def zero(cls, n: int, parity: int = 0, adim: int | None = None) -> "VectorField":
        return cls(parity, [GrassmannElement.zero(n if adim is None else adim)] * n, n)

    @classmethod
    def frame(cls, n: int, a: int, adim: int | None = None) -> "VectorField":
        """Coordinate field d/dxi^a (odd)."""
        d = n if adim is None else adim
        comps = [GrassmannElement.scalar(d, int(b == a)) for b in range(1, n + 1)]
        return cls(1, comps, n)

    def __call__(self, f: GrassmannElement) -> GrassmannElement:
        out = GrassmannElement.zero(f.dim)
        for a, v in enumerate(self.components, 1):
            if v:
                out = out + v * f.derivative(a)
        return out

    def apply(self, f: GrassmannElement) -> GrassmannElement:
        return self(f)

    def __add__(self, other: "VectorField") -> "VectorField":
        if other.parity != self.parity and any(other.components) and any(self.components):
            raise ParityError("adding fields of different parity")
        p = self.parity if any(self.components) else other.parity
        return VectorField(p, [a + b for a, b in zip(self.components, other.components)], self.n)

    def __neg__(self):
        return VectorField(self.parity, [-c for c in self.components], self.n)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "VectorField":
        return VectorField(self.parity, [x.scale(c) for x in self.components], self.n)

    def lmul(self, f: GrassmannElement) -> "VectorField":
        """The field f V (parity shifts by that of f)."""
        p = (self.parity + (f.parity or 0)) % 2
        return VectorField(p, [f * c for c in self.components], self.n)

    def bracket(self, other: "VectorField") -> "VectorField":
        """Supercommutator [V, W] = VW - (-1)^{|V||W|} WV."""
        s = -1 if self.parity * other.parity else 1
        comps = [self(w) - other(v).scale(s) for v, w in zip(self.components, other.components)]
        return VectorField((self.parity + other.parity) % 2, comps, self.n)

    def embed(self, adim: int) -> "VectorField":
        return VectorField(self.parity, [c.embed(adim) for c in self.components], self.n)

    def is_zero(self) -> bool:
        return not any(self.components)

    def __eq__(self, other):
        return (
            isinstance(other, VectorField)
            and self.n == other.n
            and self.components == other.components
            and (self.parity == other.parity or self.is_zero())
        )

    def __repr__(self):
        return f"VectorField(parity={self.parity}, [{', '.join(str(c) for c in self.components)}])"


def _check_field(V: VectorField, f: Form):
    if V.n != f.n or V.adim != f.adim:
        raise DimensionMismatch(f"field ({V.n},{V.adim}) vs form ({f.n},{f.adim})")


def lie_derivative(V: VectorField, f: Form) -> Form:
    """V↑ f with V↑ = V^a d/dxi^a + (-1)^{|V|} Q(V^a) d/dy^a."""
    _check_field(V, f)
    out = f._like({})
    sign = -1 if V.parity else 1
    for a, va in enumerate(V.components, 1):
        if not va:
            continue
        out = out + f.xi_derivative(a).lmul(va)
        dy = f.y_derivative(a)
        if not dy:
            continue
        for b in range(1, f.n + 1):
            dva = va.derivative(b)
            if dva:
                out = out + dy.y_multiply(b).lmul(dva).scale(sign)
    return out


def inner_contract(V: VectorField, f: Form) -> Form:
    """V↓ f with V↓ = V^a d/dy^a."""
    _check_field(V, f)
    out = f._like({})
    for a, va in enumerate(V.components, 1):
        if va:
            out = out + f.y_derivative(a).lmul(va)
    return out


# supermaps and pull-backs ----------------------------------------------------------


class Supermap:
    """Map R^{0|n} -> R^{0|m} given by the odd images Xi^a(xi) of the target coordinates."""

    __slots__ = ("n", "m", "components")

    def __init__(self, components: Sequence[GrassmannElement], n: int | None = None):
        self.components = tuple(components)
        self.m = len(self.components)
        if not self.components:
            raise ValueError("supermap needs at least one component")
        self.n = self.components[0].dim if n is None else n
        for c in self.components:
            if c.dim != self.n:
                raise DimensionMismatch("components must live in the source algebra")
            if not c.is_odd():
                raise ParityError("supermap components must be odd")

    @classmethod
    def identity(cls, n: int) -> "Supermap":
        return cls([GrassmannElement.generator(n, a) for a in range(1, n + 1)])

    @classmethod
    def linear(cls, matrix: Sequence[Sequence]) -> "Supermap":
        """Xi^a = sum_b matrix[a][b] xi^b."""
        n = len(matrix[0])
        comps = []
        for row in matrix:
            acc = GrassmannElement.zero(n)
            for b, c in enumerate(row, 1):
                acc = acc + GrassmannElement.generator(n, b).scale(c)
            comps.append(acc)
        return cls(comps, n)

    def compose(self, inner: "Supermap") -> "Supermap":
        """``self ∘ inner`` (inner applied first)."""
        if inner.m != self.n:
            raise DimensionMismatch("cannot compose")
        return Supermap([substitute(c, inner.components) for c in self.components], inner.n)

    def jacobian(self) -> EvenMatrix:
        """J[a][b] = d Xi^a / d xi^b."""
        return EvenMatrix([[c.derivative(b) for b in range(1, self.n + 1)] for c in self.components])

    def images(self, extra: int = 0) -> list[GrassmannElement]:
        """Images of target generators, with ``extra`` auxiliary generators passed through."""
        d = self.n + extra
        imgs = [c.embed(d) for c in self.components]
        imgs += [GrassmannElement.generator(d, self.n + j) for j in range(1, extra + 1)]
        return imgs

    def __repr__(self):
        return f"Supermap({self.n}->{self.m}, [{', '.join(str(c) for c in self.components)}])"


def pullback_function(phi: Supermap, a: GrassmannElement) -> GrassmannElement:
    extra = a.dim - phi.m
    if extra < 0:
        raise DimensionMismatch("function does not live on the target")
    return substitute(a, phi.images(extra))


def _fiber_images(phi: Supermap, extra: int) -> list[PseudoForm]:
    """Y^a = y^b d Xi^a / d xi^b as degree-one forms on the source."""
    d = phi.n + extra
    out = []
    for c in phi.components:
        acc = PseudoForm.zero(phi.n, d)
        for b in range(1, phi.n + 1):
            db = c.derivative(b).embed(d)
            if db:
                acc = acc + PseudoForm.y(phi.n, b, d).lmul(db)
        out.append(acc)
    return out


def pullback(phi: Supermap, f: Form) -> Form:
    """Pull-back along the lift of ``phi`` to the odd tangent bundles."""
    if f.n != phi.m:
        raise DimensionMismatch(f"form lives on R^(0|{f.n}), map targets R^(0|{phi.m})")
    extra = f.adim - f.n
    imgs = phi.images(extra)
    if isinstance(f, IntegralForm):
        return _pullback_integral(phi, f, imgs, extra)
    ys = _fiber_images(phi, extra)
    d = phi.n + extra
    powers: dict[tuple[int, ...], PseudoForm] = {}

    def ypow(e: tuple[int, ...]) -> PseudoForm:
        if e not in powers:
            acc = PseudoForm.one(phi.n, d)
            for a, x in enumerate(e):
                for _ in range(x):
                    acc = acc * ys[a]
            powers[e] = acc
        return powers[e]

    out = PseudoForm.zero(phi.n, d)
    for e, ge in f.coefficients().items():
        out = out + ypow(e) * PseudoForm.from_grassmann(substitute(ge, imgs), phi.n)
    return out


def compose_delta(L: EvenMatrix, k: Sequence[int], n: int) -> IntegralForm:
    """The distribution ``(d^k delta)(L y)`` written in terms of ``d^j delta(y)``.

    With M = L^{-1}:  (d^k delta)(L y) = |det L|^{-1} prod_a (sum_b M[b][a] d/dy^b)^{k_a} delta(y).
    The absolute value uses the sign of the body determinant.
    """
    M = matrix_inverse(L)
    det = matrix_det(L)
    if det.body < 0:
        det = -det
    ops = []
    for a in range(n):
        acc = PseudoForm.zero(n, L.dim)
        for b in range(n):
            if M[b, a]:
                acc = acc + PseudoForm.y(n, b + 1, L.dim).lmul(M[b, a])
        ops.append(acc)
    poly = PseudoForm.one(n, L.dim)
    for a, x in enumerate(k):
        for _ in range(x):
            poly = poly * ops[a]
    poly = poly.lmul(det.__class__.scalar(L.dim, 1) / det)
    return IntegralForm._raw(n, L.dim, dict(poly.terms))


def _pullback_integral(phi, w, imgs, extra):
    if phi.m != phi.n:
        raise DimensionMismatch("integral forms pull back only along maps between equal dimensions")
    d = phi.n + extra
    J = phi.jacobian()
    J = EvenMatrix([[e.embed(d) for e in row] for row in J.entries])
    out = IntegralForm.zero(phi.n, d)
    cache = {}
    for e, ge in w.coefficients().items():
        if e not in cache:
            cache[e] = compose_delta(J, e, phi.n)
        out = out + cache[e].lmul(substitute(ge, imgs))
    return out


# flows ------------------------------------------------------------------------------


def _reachable_dimension(f: PseudoForm) -> int:
    total = 0
    for k in f.degrees():
        total += math.comb(f.n + k - 1, k) * (1 << f.adim)
    return total


def _exp_series(op: Callable[[PseudoForm], PseudoForm], t: Fraction, f: PseudoForm, bound: int) -> PseudoForm:
    out = f
    term = f
    k = 0
    while True:
        k += 1
        term = op(term).scale(Fraction(t) / k)
        if not term:
            return out
        if k > bound:
            raise NonNilpotentFlow("lifted field is not nilpotent on the span of the form")
        out = out + term


def flow_pullback(V: VectorField, t, f: PseudoForm) -> PseudoForm:
    """Pull-back of ``f`` along the (super)flow of ``V`` with time ``t``.

    Even V: exp(t V↑) f.  Odd V: exp(eps V↑ + t/2 [V↑, V↑]) f, where eps is a
    new odd generator appended to the coefficient algebra (index adim + 1).
    """
    t = Fraction(t)
    bound = _reachable_dimension(f) + 1
    if V.parity == 0:
        return _exp_series(lambda g: lie_derivative(V, g), t, f, bound)
    g = _exp_series(lambda h: lie_derivative(V, lie_derivative(V, h)), t, f, bound)
    d = f.adim + 1
    g = g.embed(d)
    Ve = V.embed(d)
    eps = GrassmannElement.generator(d, d)
    return g + lie_derivative(Ve, g).lmul(eps)


# restriction to the spatial slice ---------------------------------------------------


def spatial_restrict_and_integrate(w: IntegralForm, convention: str = "bare") -> GrassmannElement:
    """Integral over the "space" xi^1..xi^{N-1} of w restricted to xi^N = tau, y^N = 0.

    The result is ``c0 + c1 * tau`` in the one-generator algebra Λ(tau).

    ``convention`` fixes how point-supported terms restrict to the slice:

    * ``"normal"`` keeps the component ``d/dy^N delta(y)`` (the normal
      direction), with weight one;
    * ``"bare"`` keeps the component ``delta(y)`` with weight one.

    In both cases the remaining fiber directions are paired against 1.
    """
    if w.adim != w.n:
        raise DimensionMismatch("auxiliary generators are not supported here")
    N = w.n
    want = _unit(N, N - 1) if convention == "normal" else (0,) * N
    if convention not in ("normal", "bare"):
        raise ValueError(f"unknown convention {convention!r}")
    c = w.coefficient(want)
    rest = c.integrate(N - 1)
    c0 = rest.body
    c1 = rest.coefficient(1 << (N - 1))
    return GrassmannElement(1, {0: c0, 1: c1})


# bases ------------------------------------------------------------------------------


def fiber_monomials(n: int, k: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree k in n variables."""
    if n == 0:
        return [()] if k == 0 else []
    if n == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        for rest in fiber_monomials(n - 1, k - first):
            out.append((first,) + rest)
    return out


def form_basis(n: int, degree: int, parity: int | None = None, kind=PseudoForm) -> list:
    """Monomial basis y^e xi_A (or d^e delta xi_A) of a fixed fiber degree."""
    out = []
    for e in fiber_monomials(n, degree):
        for m in monomial_masks(n, parity):
            out.append(kind._raw(n, n, {(e, m): Fraction(1)}))
    return out


def vector_field_basis(n: int, parity: int) -> list[VectorField]:
    out = []
    for a in range(n):
        for m in monomial_masks(n, (parity + 1) % 2):
            comps = [GrassmannElement.zero(n)] * n
            comps[a] = GrassmannElement._raw(n, {m: Fraction(1)})
            out.append(VectorField(parity, comps, n))
    return out
