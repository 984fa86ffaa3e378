"""Seeded random generators for property checks.

Everything takes an explicit :class:`random.Random`, so a seed fixes every draw.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .algebra import GrassmannElement, monomial_masks
from .cartan import IntegralForm, PseudoForm, Supermap, VectorField, fiber_monomials
from .riemann import Metric


def rational(rng: random.Random, bound: int = 3, denominators: Sequence[int] = (1, 1, 2)) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.choice(denominators))


def element(rng: random.Random, dim: int, parity: int | None = None, density: float = 0.5,
            bound: int = 3, max_degree: int | None = None) -> GrassmannElement:
    terms = {}
    for m in monomial_masks(dim, parity):
        if max_degree is not None and m.bit_count() > max_degree:
            continue
        if rng.random() < density:
            terms[m] = rational(rng, bound)
    return GrassmannElement(dim, terms)


def _fiber_expansion(kind, rng, n, degrees, parity, density, bound, adim):
    adim = n if adim is None else adim
    out = kind.zero(n, adim)
    for k in degrees:
        for e in fiber_monomials(n, k):
            if rng.random() < density:
                c = element(rng, adim, parity, density, bound)
                out = out + kind.from_coefficients(n, {e: c}, adim)
    return out


def pseudo_form(rng: random.Random, n: int, degrees: Sequence[int] = (0, 1, 2), parity: int | None = None,
                density: float = 0.5, bound: int = 3, adim: int | None = None) -> PseudoForm:
    return _fiber_expansion(PseudoForm, rng, n, degrees, parity, density, bound, adim)


def integral_form(rng: random.Random, n: int, codegrees: Sequence[int] = (0, 1, 2), parity: int | None = None,
                  density: float = 0.5, bound: int = 3, adim: int | None = None) -> IntegralForm:
    return _fiber_expansion(IntegralForm, rng, n, codegrees, parity, density, bound, adim)


def vector_field(rng: random.Random, n: int, parity: int, density: float = 0.5, bound: int = 3) -> VectorField:
    return VectorField(parity, [element(rng, n, (parity + 1) % 2, density, bound) for _ in range(n)], n)


def invertible_matrix(rng: random.Random, n: int, bound: int = 2, positive: bool = True) -> list[list[Fraction]]:
    """Random rational matrix with nonzero determinant (positive when requested)."""
    while True:
        m = [[Fraction(rng.randint(-bound, bound)) for _ in range(n)] for _ in range(n)]
        det = _det(m)
        if not det:
            continue
        if positive and det < 0:
            m[0] = [-x for x in m[0]]
        return m


def _det(m):
    n = len(m)
    a = [row[:] for row in m]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def linear_supermap(rng: random.Random, n: int, bound: int = 2, positive: bool = True) -> Supermap:
    return Supermap.linear(invertible_matrix(rng, n, bound, positive))


def supermap(rng: random.Random, n: int, bound: int = 2, positive: bool = True, density: float = 0.3) -> Supermap:
    """Invertible supermap: invertible linear part plus random higher odd terms."""
    lin = linear_supermap(rng, n, bound, positive)
    comps = []
    for c in lin.components:
        extra = element(rng, n, 1, density, bound)
        extra = GrassmannElement(n, {m: v for m, v in extra.terms.items() if m.bit_count() >= 3})
        comps.append(c + extra)
    return Supermap(comps, n)


def metric_body(dim: int) -> list[list[Fraction]]:
    """Fixed invertible antisymmetric integer body with unit Pfaffian."""
    body = [[Fraction(0)] * dim for _ in range(dim)]
    for k in range(dim // 2):
        body[2 * k][2 * k + 1] = Fraction(1)
        body[2 * k + 1][2 * k] = Fraction(-1)
    for a in range(dim):
        for b in range(a + 1, dim):
            if (a, b) not in [(2 * k, 2 * k + 1) for k in range(dim // 2)] and (a + b) % 3 == 0:
                body[a][b] = Fraction(1)
                body[b][a] = Fraction(-1)
    return body


def metric(rng: random.Random, dim: int, density: float = 0.5, bound: int = 2, orientation: int = 1) -> Metric:
    """Random valid metric: the fixed body plus random even soul terms."""
    body = metric_body(dim)
    upper = {}
    for a in range(dim):
        for b in range(a + 1, dim):
            soul = element(rng, dim, 0, density, bound)
            soul = GrassmannElement(dim, {m: c for m, c in soul.terms.items() if m})
            upper[(a + 1, b + 1)] = soul + body[a][b]
    return Metric.from_upper(dim, upper, orientation=orientation)
