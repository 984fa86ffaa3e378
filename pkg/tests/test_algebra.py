from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, strategies as st

from supergrass import linalg
from supergrass.algebra import (
    DualElement,
    EvenMatrix,
    GrassmannElement as G,
    DimensionMismatch,
    NotInvertible,
    ParityError,
    UnsupportedBody,
    berezin_full,
    invert_even,
    left_derivative,
    matrix_det,
    matrix_inverse,
    monomial_masks,
    pfaffian,
    sqrt_even,
    substitute,
    wedge,
)

from conftest import elements, even_invertible


def xi(dim, *idx, c=1):
    return G.monomial(dim, idx, c)


def one(dim, c=1):
    return G.scalar(dim, c)


# worked examples -------------------------------------------------------------


def test_wedge_examples():
    assert wedge(xi(2, 1), xi(2, 1)) == G.zero(2)
    assert wedge(xi(2, 1), xi(2, 2)) == xi(2, 1, 2)
    assert wedge(xi(2, 2), xi(2, 1)) == -xi(2, 1, 2)
    assert wedge(one(2) + xi(2, 1), one(2) + xi(2, 2)) == one(2) + xi(2, 1) + xi(2, 2) + xi(2, 1, 2)


def test_wedge_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        wedge(xi(2, 1), xi(3, 1))


def test_left_derivative_examples():
    assert left_derivative(xi(2, 1, 2), 1) == xi(2, 2)
    assert left_derivative(xi(2, 1, 2), 2) == -xi(2, 1)
    assert left_derivative(one(2), 1) == G.zero(2)
    with pytest.raises(IndexError):
        left_derivative(one(2), 3)


def test_berezin_examples():
    assert berezin_full(xi(2, 1, 2)) == 1
    assert berezin_full(one(2) + xi(2, 1, c=3)) == 0
    assert berezin_full(xi(2, 1, 2, c=5) - 2) == 5


def test_substitute_examples():
    assert substitute(xi(2, 1), [xi(2, 2), xi(2, 1)]) == xi(2, 2)
    assert substitute(xi(2, 1, 2), [xi(2, 2), xi(2, 1)]) == -xi(2, 1, 2)
    assert substitute(xi(2, 1, 2), [xi(2, 1) + xi(2, 2), xi(2, 2)]) == xi(2, 1, 2)
    with pytest.raises(ParityError):
        substitute(xi(2, 1), [one(2), xi(2, 1)])


def test_invert_even_examples():
    assert invert_even(one(2) + xi(2, 1, 2)) == one(2) - xi(2, 1, 2)
    assert invert_even(one(2, 2)) == one(2, Fraction(1, 2))
    with pytest.raises(NotInvertible):
        invert_even(xi(2, 1, 2))


def test_sqrt_even_examples():
    assert sqrt_even(one(2) + xi(2, 1, 2)) == one(2) + xi(2, 1, 2, c=Fraction(1, 2))
    assert sqrt_even(one(2, 4)) == one(2, 2)
    with pytest.raises(UnsupportedBody):
        sqrt_even(one(2, 2))


def _eps(s=None):
    s = G.zero(2) if s is None else s
    return EvenMatrix([[G.zero(2), one(2) + s], [-(one(2) + s), G.zero(2)]])


def test_matrix_inverse_examples():
    assert matrix_inverse(_eps()) == _eps().scale(-1)
    assert matrix_inverse(EvenMatrix.identity(2, 2)) == EvenMatrix.identity(2, 2)
    s = xi(2, 1, 2)
    expected = EvenMatrix([[G.zero(2), -one(2) + s], [one(2) - s, G.zero(2)]])
    assert matrix_inverse(_eps(s)) == expected


def test_matrix_inverse_singular():
    with pytest.raises(NotInvertible):
        matrix_inverse(EvenMatrix([[xi(2, 1, 2), G.zero(2)], [G.zero(2), one(2)]]))


def test_matrix_det_examples():
    assert matrix_det(_eps()) == one(2)
    a = one(2, 3) + xi(2, 1, 2)
    assert matrix_det(EvenMatrix([[G.zero(2), a], [-a, G.zero(2)]])) == a * a
    assert matrix_det(_eps(xi(2, 1, 2))) == one(2) + xi(2, 1, 2, c=2)


def test_dual_unit_square_zero():
    from supergrass.algebra import dual_unit

    e = dual_unit(2)
    assert e.is_even() and e * e == G.zero(4)


# exhaustive laws ----------------------------------------------------------------


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_associative_graded_commutative_on_monomials(dim):
    monos = [G(dim, {m: 1}) for m in range(1 << dim)]
    for a, b in product(monos, repeat=2):
        pa, pb = a.parity, b.parity
        assert a * b == (b * a).scale(-1 if pa * pb else 1)
    for a, b, c in product(monos, repeat=3):
        assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_derivatives_anticommute(dim):
    monos = [G(dim, {m: 1}) for m in range(1 << dim)]
    for i, j in product(range(1, dim + 1), repeat=2):
        for a in monos:
            assert left_derivative(left_derivative(a, i), j) == -left_derivative(left_derivative(a, j), i)


# properties -------------------------------------------------------------------------


@given(elements(4), elements(4), st.integers(1, 4))
def test_graded_leibniz(a, b, i):
    for pa in (0, 1):
        ah = a.part(pa)
        lhs = left_derivative(ah * b, i)
        rhs = left_derivative(ah, i) * b + (ah * left_derivative(b, i)).scale(-1 if pa else 1)
        assert lhs == rhs


@given(even_invertible(4))
def test_invert_even_multiplies_back(a):
    assert a * invert_even(a) == one(4)


@given(even_invertible(4))
def test_sqrt_even_squares_back(a):
    r = sqrt_even(a)
    assert r * r == a and r.body > 0


@given(st.lists(elements(4, 0, max_size=4), min_size=6, max_size=6))
def test_det_equals_pfaffian_squared(entries):
    it = iter(entries)
    rows = [[G.zero(4)] * 4 for _ in range(4)]
    for a in range(4):
        for b in range(a + 1, 4):
            v = next(it)
            rows[a][b], rows[b][a] = v, -v
    M = EvenMatrix(rows)
    p = pfaffian(M)
    assert matrix_det(M) == p * p


@given(st.lists(elements(3, 0, max_size=3), min_size=4, max_size=4))
def test_matrix_inverse_multiplies_back(entries):
    a, b, c, d = (e.soul for e in entries)
    M = EvenMatrix([[a + 2, b + 1], [c + 1, d + 1]])
    assert M @ matrix_inverse(M) == EvenMatrix.identity(2, 3)


def _tangent_by_expansion(fn, x: G, v: G):
    """d/dt fn(x + t v) at t = 0 by embedding: fn evaluated on x + eps v."""
    from supergrass.algebra import dual_split, dual_unit

    d = x.dim
    val = fn(x.embed(d + 2) + dual_unit(d) * v.embed(d + 2))
    return dual_split(val, d)[1]


@given(even_invertible(3), elements(3, 0), elements(3))
def test_dual_number_tangents(x, v, w):
    dx = DualElement(x, v)
    dw = DualElement.constant(w)
    wd = w.embed(5)
    cases = [
        (dx * dx, lambda a: a * a),
        (dx * dw, lambda a: a * wd),
        (dx + dw, lambda a: a + wd),
        (dx.inverse(), invert_even),
        (dx.derivative(1), lambda a: left_derivative(a, 1)),
    ]
    for dual, fn in cases:
        assert dual.tangent == _tangent_by_expansion(fn, x, v)
    if x.body in (1, 4, Fraction(1, 4), 9):
        assert dx.sqrt().tangent == _tangent_by_expansion(sqrt_even, x, v)


def test_dual_embed_round_trip():
    x = one(2) + xi(2, 1, 2)
    d = DualElement(x, xi(2, 1, 2, c=3))
    assert DualElement.from_embedded(d.embed(), 2) == d


# exact linear algebra against sympy ------------------------------------------------


@given(st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5), min_size=1, max_size=5))
def test_rank_and_nullspace_match_sympy(rows):
    fr = [[Fraction(x) for x in r] for r in rows]
    M = sympy.Matrix(rows)
    assert linalg.rank(fr, 5) == M.rank()
    ns = linalg.nullspace(fr, 5)
    assert len(ns) == len(M.nullspace())
    for v in ns:
        assert all(x == 0 for x in linalg.matvec(fr, v))


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_solve_consistency_matches_sympy(rows, rhs):
    fr = [[Fraction(x) for x in r] for r in rows]
    x = linalg.solve(fr, [Fraction(v) for v in rhs], 3)
    M = sympy.Matrix(rows)
    aug = M.row_join(sympy.Matrix(rhs))
    assert (x is not None) == (M.rank() == aug.rank())
    if x is not None:
        assert linalg.matvec(fr, x) == [Fraction(v) for v in rhs]


def test_monomial_masks_parity_counts():
    assert len(monomial_masks(4, 0)) == 8 and len(monomial_masks(4, 1)) == 8
