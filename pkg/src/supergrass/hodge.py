"""Hodge star, codifferential, Laplace-DeRham operator and the form pairing.

The star maps polynomial forms to integral forms.  With u = g y it sends

    c(xi) y^m  ->  |g|^{-1/2} c(xi) prod_a L_a^{m_a} delta(y),   L_a = (g^{-1})_{ba} d/dy^b,

and the inverse direction sends

    c(xi) d^k delta(y)  ->  |g|^{1/2} c(xi) prod_a (g_{ab} y^b)^{k_a}.

The Fourier constant is split between the two directions so that both stay
rational.  No degree-dependent phase is applied: that is the choice under which
the round trip ** = (-1)^k, the coordinate formula for the codifferential and
the adjointness of Q and delta hold simultaneously.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import DimensionMismatch, GrassmannElement
from .cartan import IntegralForm, PseudoForm, berezin_pair, derham, pair_element
from .riemann import Metric, require_valid


def _align(f, g: Metric):
    if f.n != g.dim:
        raise DimensionMismatch(f"form on R^(0|{f.n}) vs metric on R^(0|{g.dim})")
    if f.adim == g.adim:
        return f, g
    if f.adim < g.adim:
        return f.embed(g.adim), g
    return f, g.embed(f.adim)


def _linear_forms(rows, n: int, adim: int) -> list[PseudoForm]:
    """sum_b rows[a][b] y^b for each a."""
    out = []
    for row in rows:
        acc = PseudoForm.zero(n, adim)
        for b, c in enumerate(row):
            if c:
                acc = acc + PseudoForm.y(n, b + 1, adim).lmul(c)
        out.append(acc)
    return out


def _monomial_products(ops: list[PseudoForm], n: int, adim: int):
    cache: dict[tuple[int, ...], PseudoForm] = {}

    def power(e: tuple[int, ...]) -> PseudoForm:
        if e not in cache:
            acc = PseudoForm.one(n, adim)
            for a, x in enumerate(e):
                for _ in range(x):
                    acc = acc * ops[a]
            cache[e] = acc
        return cache[e]

    return power


def hodge_star(f: PseudoForm, g: Metric) -> IntegralForm:
    require_valid(g)
    f, g = _align(f, g)
    n, d = g.dim, g.adim
    inv = g.inverse
    ops = _linear_forms([[inv[b, a] for b in range(n)] for a in range(n)], n, d)
    power = _monomial_products(ops, n, d)
    out = PseudoForm.zero(n, d)
    for e, c in f.coefficients().items():
        out = out + power(e).lmul(g.inv_sqrtdet * c)
    return IntegralForm._raw(n, d, dict(out.terms))


def hodge_star_back(w: IntegralForm, g: Metric) -> PseudoForm:
    require_valid(g)
    w, g = _align(w, g)
    n, d = g.dim, g.adim
    ops = _linear_forms([[g[a, b] for b in range(n)] for a in range(n)], n, d)
    power = _monomial_products(ops, n, d)
    out = PseudoForm.zero(n, d)
    for e, c in w.coefficients().items():
        out = out + power(e).lmul(g.sqrtdet * c)
    return out


def codifferential(f: PseudoForm, g: Metric) -> PseudoForm:
    """Coordinate formula

    delta f = [d/dxi^a - (d ln|g|^{1/2}/dxi^a) - y^m (d g_{mn}/dxi^a) g^{nl} d/dy^l] g^{ab} df/dy^b.
    """
    require_valid(g)
    f, g = _align(f, g)
    n, d = g.dim, g.adim
    inv = g.inverse
    dlog = [g.inv_sqrtdet * g.sqrtdet.derivative(a + 1) for a in range(n)]
    dg = [[[g[m, k].derivative(a + 1) for k in range(n)] for m in range(n)] for a in range(n)]
    dy = [f.y_derivative(b + 1) for b in range(n)]
    out = PseudoForm.zero(n, d)
    for a in range(n):
        h = PseudoForm.zero(n, d)
        for b in range(n):
            if inv[a, b] and dy[b]:
                h = h + dy[b].lmul(inv[a, b])
        if not h:
            continue
        out = out + h.xi_derivative(a + 1)
        if dlog[a]:
            out = out - h.lmul(dlog[a])
        for l in range(n):
            hl = h.y_derivative(l + 1)
            if not hl:
                continue
            for m in range(n):
                coeff = GrassmannElement.zero(d)
                for k in range(n):
                    if dg[a][m][k] and inv[k, l]:
                        coeff = coeff + dg[a][m][k] * inv[k, l]
                if coeff:
                    out = out - hl.y_multiply(m + 1).lmul(coeff)
    return out


def codifferential_via_star(f: PseudoForm, g: Metric) -> PseudoForm:
    """(-1)^k * Q * f, applied to each fiber-degree component."""
    require_valid(g)
    out = None
    for k in sorted(f.degrees()) or [0]:
        part = f.degree_part(k)
        piece = hodge_star_back(derham(hodge_star(part, g)), g)
        if k % 2:
            piece = -piece
        out = piece if out is None else out + piece
    return out


def laplace_derham(f: PseudoForm, g: Metric) -> PseudoForm:
    """Delta = -(Q delta + delta Q)."""
    f, g = _align(f, g)
    return -(derham(codifferential(f, g)) + codifferential(derham(f), g))


def laplace_beltrami(f: GrassmannElement, g: Metric) -> GrassmannElement:
    """Coordinate expression d_a(g^{ab} d_b f) - (d_a ln|g|^{1/2}) g^{ab} d_b f on functions.

    This is delta(Q f); the Laplace-DeRham operator on functions is its negative.
    """
    require_valid(g)
    if f.dim < g.adim:
        f = f.embed(g.adim)
    n = g.dim
    inv = g.inverse
    out = GrassmannElement.zero(f.dim)
    dlog = [g.inv_sqrtdet * g.sqrtdet.derivative(a + 1) for a in range(n)]
    for a in range(n):
        acc = GrassmannElement.zero(f.dim)
        for b in range(n):
            if inv[a, b]:
                acc = acc + inv[a, b] * f.derivative(b + 1)
        out = out + acc.derivative(a + 1) - dlog[a] * acc
    return out


def form_inner_product(f: PseudoForm, h: PseudoForm, g: Metric) -> Fraction:
    """<f, h>_g = I[f ∧ *h]."""
    f, g2 = _align(f, g)
    return berezin_pair(f, hodge_star(h, g2))


def form_inner_element(f: PseudoForm, h: PseudoForm, g: Metric) -> GrassmannElement:
    """Like :func:`form_inner_product` but keeps auxiliary-generator content."""
    adim = max(f.adim, h.adim, g.adim)
    f, h, g = f.embed(adim), h.embed(adim), g.embed(adim) if g.adim < adim else g
    return pair_element(f, hodge_star(h, g))
