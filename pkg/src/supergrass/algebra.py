"""Exact exterior algebra over the rationals.

A :class:`GrassmannElement` is a function on the odd space R^{0|n}: a finite
sum of monomials in anticommuting generators xi^1..xi^n with rational
coefficients.  Monomials are stored as bitmasks (bit ``i - 1`` is xi^i) and
are always read in ascending generator order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction, str]


class GrassmannError(ValueError):
    """Base class for algebra errors."""


class DimensionMismatch(GrassmannError):
    pass


class NotInvertible(GrassmannError):
    pass


class UnsupportedBody(GrassmannError):
    pass


class ParityError(GrassmannError):
    pass


def as_fraction(c: Number) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"expected an exact rational, got {type(c).__name__}")


@lru_cache(maxsize=1 << 16)
def reorder_sign(a: int, b: int) -> int:
    """Sign of xi_a * xi_b = sign * xi_{a|b} for disjoint masks ``a``, ``b``."""
    swaps = 0
    while b:
        low = b & -b
        swaps += (a & ~((low << 1) - 1)).bit_count()
        b ^= low
    return -1 if swaps & 1 else 1


def mask_from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        if i < 1:
            raise IndexError(f"generator index {i} out of range")
        bit = 1 << (i - 1)
        if mask & bit:
            raise ValueError(f"repeated generator {i}")
        mask |= bit
    return mask


def indices_from_mask(mask: int) -> list[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def monomial_masks(dim: int, parity: int | None = None) -> list[int]:
    """All monomials of Λ(R^dim), optionally restricted to one parity."""
    masks = range(1 << dim)
    if parity is None:
        return list(masks)
    return [m for m in masks if m.bit_count() % 2 == parity]


class GrassmannElement:
    """Element of the exterior algebra on ``dim`` generators.

    Values are immutable; arithmetic returns new elements.  ``*`` is the wedge
    product; a plain number on either side scales.
    """

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: dict[int, Fraction] | None = None):
        if dim < 0:
            raise ValueError("dimension must be non-negative")
        self.dim = dim
        clean = {}
        top = 1 << dim
        for m, c in (terms or {}).items():
            if m < 0 or m >= top:
                raise IndexError(f"monomial {indices_from_mask(m)} outside dimension {dim}")
            c = as_fraction(c)
            if c:
                clean[m] = c
        self.terms = clean
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def _raw(cls, dim: int, terms: dict[int, Fraction]) -> "GrassmannElement":
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, dim: int) -> "GrassmannElement":
        return cls._raw(dim, {})

    @classmethod
    def scalar(cls, dim: int, c: Number = 1) -> "GrassmannElement":
        return cls(dim, {0: as_fraction(c)})

    @classmethod
    def generator(cls, dim: int, i: int) -> "GrassmannElement":
        if not 1 <= i <= dim:
            raise IndexError(f"generator {i} out of range 1..{dim}")
        return cls._raw(dim, {1 << (i - 1): Fraction(1)})

    @classmethod
    def monomial(cls, dim: int, indices: Sequence[int], c: Number = 1) -> "GrassmannElement":
        """``c * xi^{i1} ... xi^{ik}`` in the given (not necessarily sorted) order."""
        out = cls.scalar(dim, c)
        for i in indices:
            out = out * cls.generator(dim, i)
        return out

    # inspection ---------------------------------------------------------

    @property
    def body(self) -> Fraction:
        return self.terms.get(0, Fraction(0))

    @property
    def soul(self) -> "GrassmannElement":
        return GrassmannElement._raw(self.dim, {m: c for m, c in self.terms.items() if m})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements, ``None`` otherwise (zero counts as both; reported 0)."""
        ps = {m.bit_count() & 1 for m in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def is_even(self) -> bool:
        return all(m.bit_count() % 2 == 0 for m in self.terms)

    def is_odd(self) -> bool:
        return all(m.bit_count() % 2 == 1 for m in self.terms)

    def part(self, parity: int) -> "GrassmannElement":
        return GrassmannElement._raw(
            self.dim, {m: c for m, c in self.terms.items() if m.bit_count() % 2 == parity}
        )

    def coefficient(self, indices: Iterable[int] | int) -> Fraction:
        mask = indices if isinstance(indices, int) else mask_from_indices(indices)
        return self.terms.get(mask, Fraction(0))

    def max_degree(self) -> int:
        return max((m.bit_count() for m in self.terms), default=-1)

    # arithmetic ---------------------------------------------------------

    def _check(self, other: "GrassmannElement") -> None:
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimension {self.dim} vs {other.dim}")

    def __add__(self, other):
        if isinstance(other, GrassmannElement):
            self._check(other)
            out = dict(self.terms)
            for m, c in other.terms.items():
                v = out.get(m, 0) + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
            return GrassmannElement._raw(self.dim, out)
        if isinstance(other, (int, Fraction)):
            return self + GrassmannElement.scalar(self.dim, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement._raw(self.dim, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (GrassmannElement, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> "GrassmannElement":
        c = as_fraction(c)
        if not c:
            return GrassmannElement.zero(self.dim)
        return GrassmannElement._raw(self.dim, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GrassmannElement):
            return wedge(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / other)
        if isinstance(other, GrassmannElement):
            return self * invert_even(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return invert_even(self) ** (-k)
        out = GrassmannElement.scalar(self.dim, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, GrassmannElement):
            return self.dim == other.dim and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # calculus -----------------------------------------------------------

    def derivative(self, i: int) -> "GrassmannElement":
        return left_derivative(self, i)

    def berezin(self) -> Fraction:
        return berezin_full(self)

    def integrate(self, k: int) -> "GrassmannElement":
        """Berezin integral over the first ``k`` generators.

        The generators are integrated from the left, so that
        ``xi^1 ... xi^k * rest`` maps to ``rest``.  The result stays in the
        same algebra and only involves generators ``k+1..dim``.
        """
        full = (1 << k) - 1
        return GrassmannElement._raw(
            self.dim, {m & ~full: c for m, c in self.terms.items() if m & full == full}
        )

    def embed(self, dim: int) -> "GrassmannElement":
        """View the element inside the larger algebra Λ(R^dim) ⊇ Λ(R^self.dim)."""
        if dim < self.dim:
            if any(m >> dim for m in self.terms):
                raise DimensionMismatch(f"element uses generators beyond {dim}")
        return GrassmannElement._raw(dim, dict(self.terms))

    def __repr__(self):
        return f"GrassmannElement({self.dim}, {format_element(self)!r})"

    def __str__(self):
        return format_element(self)


def format_element(a: GrassmannElement) -> str:
    if not a.terms:
        return "0"
    parts = []
    for m in sorted(a.terms, key=lambda m: (m.bit_count(), indices_from_mask(m))):
        c = a.terms[m]
        mono = "".join(f"ξ{i}" for i in indices_from_mask(m))
        if not mono:
            s = str(c)
        elif c == 1:
            s = mono
        elif c == -1:
            s = "-" + mono
        else:
            s = f"{c}{mono}" if c.denominator == 1 else f"({c}){mono}"
        parts.append(s)
    return " + ".join(parts).replace("+ -", "- ")


def wedge(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    """Graded product with the Koszul sign from sorting generators."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension {a.dim} vs {b.dim}")
    out: dict[int, Fraction] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            if ma & mb:
                continue
            m = ma | mb
            v = out.get(m, 0) + (ca * cb if reorder_sign(ma, mb) > 0 else -ca * cb)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return GrassmannElement._raw(a.dim, out)


def left_derivative(a: GrassmannElement, i: int) -> GrassmannElement:
    """Left derivative d/dxi^i: the generator is moved to the front before removal."""
    if not 1 <= i <= a.dim:
        raise IndexError(f"generator {i} out of range 1..{a.dim}")
    bit = 1 << (i - 1)
    below = bit - 1
    out = {}
    for m, c in a.terms.items():
        if m & bit:
            out[m ^ bit] = -c if (m & below).bit_count() & 1 else c
    return GrassmannElement._raw(a.dim, out)


def berezin_full(a: GrassmannElement) -> Fraction:
    """Coefficient of the top monomial xi^1 ... xi^n."""
    return a.terms.get((1 << a.dim) - 1, Fraction(0))


def substitute(a: GrassmannElement, images: Sequence[GrassmannElement]) -> GrassmannElement:
    """Algebra homomorphism xi^i -> images[i-1].

    Images must be odd and may live in an algebra of a different dimension;
    the result lives wherever the images do.
    """
    if len(images) != a.dim:
        raise DimensionMismatch(f"{len(images)} images for {a.dim} generators")
    if not images:
        return a
    target = images[0].dim
    for img in images:
        if img.dim != target:
            raise DimensionMismatch("images live in different algebras")
        if not img.is_odd():
            raise ParityError("substitution images must be odd")
    one = GrassmannElement.scalar(target, 1)
    cache: dict[int, GrassmannElement] = {0: one}

    def mono(m: int) -> GrassmannElement:
        if m in cache:
            return cache[m]
        top = m.bit_length()
        val = mono(m ^ (1 << (top - 1))) * images[top - 1]
        cache[m] = val
        return val

    out = GrassmannElement.zero(target)
    for m, c in a.terms.items():
        out = out + mono(m).scale(c)
    return out


def _nilpotent_series(body: Fraction, soul: GrassmannElement, coeffs) -> GrassmannElement:
    """Sum_k coeffs(k) * (soul/body)^k, terminating because the soul is nilpotent."""
    x = soul.scale(1 / body)
    term = GrassmannElement.scalar(soul.dim, 1)
    out = GrassmannElement.zero(soul.dim)
    k = 0
    while term:
        out = out + term.scale(coeffs(k))
        k += 1
        term = term * x
    return out


def invert_even(a: GrassmannElement) -> GrassmannElement:
    if not a.is_even():
        raise ParityError("only even elements are inverted")
    b = a.body
    if not b:
        raise NotInvertible("element has zero body")
    return _nilpotent_series(b, a.soul, lambda k: (-1) ** k).scale(1 / b)


def _rational_sqrt(q: Fraction) -> Fraction:
    if q <= 0:
        raise UnsupportedBody(f"body {q} is not positive")
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        raise UnsupportedBody(f"body {q} has no rational square root")
    return Fraction(rn, rd)


def _binom_half(k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= (Fraction(1, 2) - j) / (j + 1)
    return out


def sqrt_even(a: GrassmannElement) -> GrassmannElement:
    """Square root with positive body (binomial series in the soul)."""
    if not a.is_even():
        raise ParityError("only even elements have square roots here")
    r = _rational_sqrt(a.body)
    return _nilpotent_series(a.body, a.soul, _binom_half).scale(r)


# matrices over the even subalgebra ---------------------------------------


class EvenMatrix:
    """Square matrix of even Grassmann elements."""

    __slots__ = ("size", "dim", "entries")

    def __init__(self, entries: Sequence[Sequence[GrassmannElement]]):
        self.size = len(entries)
        if any(len(row) != self.size for row in entries):
            raise ValueError("matrix must be square")
        if self.size == 0:
            raise ValueError("empty matrix")
        self.dim = entries[0][0].dim
        for row in entries:
            for e in row:
                if e.dim != self.dim:
                    raise DimensionMismatch("entries live in different algebras")
                if not e.is_even():
                    raise ParityError("EvenMatrix entries must be even")
        self.entries = tuple(tuple(row) for row in entries)

    @classmethod
    def from_rationals(cls, rows, dim: int) -> "EvenMatrix":
        return cls([[GrassmannElement.scalar(dim, c) for c in row] for row in rows])

    @classmethod
    def identity(cls, size: int, dim: int) -> "EvenMatrix":
        return cls.from_rationals([[int(i == j) for j in range(size)] for i in range(size)], dim)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def body(self) -> list[list[Fraction]]:
        return [[e.body for e in row] for row in self.entries]

    def __matmul__(self, other: "EvenMatrix") -> "EvenMatrix":
        n = self.size
        zero = GrassmannElement.zero(self.dim)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return EvenMatrix(out)

    def __add__(self, other: "EvenMatrix") -> "EvenMatrix":
        return EvenMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: "EvenMatrix") -> "EvenMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "EvenMatrix":
        if isinstance(c, GrassmannElement):
            return EvenMatrix([[c * e for e in row] for row in self.entries])
        return EvenMatrix([[e.scale(c) for e in row] for row in self.entries])

    def transpose(self) -> "EvenMatrix":
        return EvenMatrix([list(col) for col in zip(*self.entries)])

    def map(self, fn) -> "EvenMatrix":
        return EvenMatrix([[fn(e) for e in row] for row in self.entries])

    def __eq__(self, other):
        return isinstance(other, EvenMatrix) and self.entries == other.entries

    def __repr__(self):
        rows = "; ".join(", ".join(str(e) for e in row) for row in self.entries)
        return f"EvenMatrix([{rows}])"


def rational_inverse(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise NotInvertible("singular body matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def matrix_inverse(m: EvenMatrix) -> EvenMatrix:
    """Exact inverse: body inverse corrected by the terminating Neumann series."""
    binv = EvenMatrix.from_rationals(rational_inverse(m.body()), m.dim)
    soul = m.map(lambda e: e.soul)
    x = (binv @ soul).scale(-1)
    term = EvenMatrix.identity(m.size, m.dim)
    acc = term
    while True:
        term = term @ x
        if all(e.is_zero() for row in term.entries for e in row):
            break
        acc = acc + term
    return acc @ binv


def matrix_det(m: EvenMatrix) -> GrassmannElement:
    """Determinant by Laplace expansion; entries commute so the classical formula applies."""
    n = m.size
    cache: dict[tuple[int, int], GrassmannElement] = {}

    def minor(row: int, cols: int) -> GrassmannElement:
        if row == n:
            return GrassmannElement.scalar(m.dim, 1)
        key = (row, cols)
        if key in cache:
            return cache[key]
        acc = GrassmannElement.zero(m.dim)
        sign = 1
        for j in range(n):
            if cols & (1 << j):
                continue
            e = m.entries[row][j]
            if e:
                t = e * minor(row + 1, cols | (1 << j))
                acc = acc + (t if sign > 0 else -t)
            sign = -sign
        cache[key] = acc
        return acc

    return minor(0, 0)


def pfaffian(m: EvenMatrix) -> GrassmannElement:
    """Pfaffian of an antisymmetric even matrix, expanded along the first row."""
    def pf(idx: tuple[int, ...]) -> GrassmannElement:
        if not idx:
            return GrassmannElement.scalar(m.dim, 1)
        if len(idx) % 2:
            return GrassmannElement.zero(m.dim)
        first, rest = idx[0], idx[1:]
        acc = GrassmannElement.zero(m.dim)
        for pos, j in enumerate(rest):
            e = m.entries[first][j]
            if e:
                t = e * pf(rest[:pos] + rest[pos + 1:])
                acc = acc + (t if pos % 2 == 0 else -t)
        return acc

    return pf(tuple(range(m.size)))


# dual numbers --------------------------------------------------------------


def dual_unit(dim: int) -> GrassmannElement:
    """The even nilpotent eps = xi^{dim+1} xi^{dim+2} of the algebra Λ(R^{dim+2})."""
    return GrassmannElement._raw(dim + 2, {(1 << dim) | (1 << (dim + 1)): Fraction(1)})


@dataclass(frozen=True)
class DualElement:
    """``primal + eps * tangent`` with an even parameter eps, eps**2 = 0."""

    primal: GrassmannElement
    tangent: GrassmannElement

    def __post_init__(self):
        if self.primal.dim != self.tangent.dim:
            raise DimensionMismatch("primal and tangent dimensions differ")

    @property
    def dim(self) -> int:
        return self.primal.dim

    @classmethod
    def constant(cls, a: GrassmannElement) -> "DualElement":
        return cls(a, GrassmannElement.zero(a.dim))

    def __add__(self, other: "DualElement") -> "DualElement":
        return DualElement(self.primal + other.primal, self.tangent + other.tangent)

    def __sub__(self, other: "DualElement") -> "DualElement":
        return DualElement(self.primal - other.primal, self.tangent - other.tangent)

    def __neg__(self):
        return DualElement(-self.primal, -self.tangent)

    def __mul__(self, other):
        if isinstance(other, DualElement):
            return DualElement(
                self.primal * other.primal,
                self.primal * other.tangent + self.tangent * other.primal,
            )
        return DualElement(self.primal * other, self.tangent * other)

    def derivative(self, i: int) -> "DualElement":
        return DualElement(left_derivative(self.primal, i), left_derivative(self.tangent, i))

    def berezin(self) -> tuple[Fraction, Fraction]:
        return berezin_full(self.primal), berezin_full(self.tangent)

    def inverse(self) -> "DualElement":
        inv = invert_even(self.primal)
        return DualElement(inv, -(inv * self.tangent * inv))

    def sqrt(self) -> "DualElement":
        r = sqrt_even(self.primal)
        return DualElement(r, (invert_even(r) * self.tangent).scale(Fraction(1, 2)))

    def substitute(self, images: Sequence["DualElement"]) -> "DualElement":
        primal_imgs = [d.primal for d in images]
        out = substitute(self.primal, primal_imgs)
        tan = substitute(self.tangent, primal_imgs)
        if not primal_imgs:
            return DualElement(out, tan)
        # chain rule: replace one factor of each monomial by its tangent image
        target = primal_imgs[0].dim
        for m, c in self.primal.terms.items():
            idx = indices_from_mask(m)
            for j in range(len(idx)):
                prod = GrassmannElement.scalar(target, c)
                for pos, i in enumerate(idx):
                    prod = prod * (images[i - 1].tangent if pos == j else primal_imgs[i - 1])
                tan = tan + prod
        return DualElement(out, tan)

    def embed(self) -> GrassmannElement:
        """Realize as ``primal + eps * tangent`` inside Λ(R^{dim+2})."""
        d = self.dim
        return self.primal.embed(d + 2) + dual_unit(d) * self.tangent.embed(d + 2)

    @classmethod
    def from_embedded(cls, a: GrassmannElement, dim: int) -> "DualElement":
        return cls(*dual_split(a, dim))


def dual_split(a: GrassmannElement, dim: int) -> tuple[GrassmannElement, GrassmannElement]:
    """Inverse of :meth:`DualElement.embed` for an element of Λ(R^{dim+2})."""
    if a.dim != dim + 2:
        raise DimensionMismatch(f"expected dimension {dim + 2}, got {a.dim}")
    aux = (1 << dim) | (1 << (dim + 1))
    primal, tangent = {}, {}
    for m, c in a.terms.items():
        hi = m & aux
        if hi == 0:
            primal[m] = c
        elif hi == aux:
            # eps * x = x * eps (eps even); xi_S eps is stored with aux bits last
            tangent[m & ~aux] = c
        else:
            raise ValueError("element is not a dual number (single auxiliary generator present)")
    return GrassmannElement(dim, primal), GrassmannElement(dim, tangent)
