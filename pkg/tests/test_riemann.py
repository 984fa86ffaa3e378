import random
from fractions import Fraction

import pytest
from hypothesis import given

from supergrass import sampling
from supergrass.algebra import EvenMatrix, GrassmannElement as G
from supergrass.cartan import VectorField
from supergrass.riemann import (
    CovariantTwoTensor,
    InvalidMetric,
    Metric,
    horizontal_lift,
    in_field_span,
    killing_bound,
    killing_residual,
    killing_solve,
    metric_validate,
    require_valid,
    vector_inner_product,
    vertical_lift,
)

from conftest import seeds


def xi(dim, *idx, c=1):
    return G.monomial(dim, idx, c)


EPS = Metric.standard(2)


def test_validate_examples():
    assert metric_validate(EPS).ok
    bad = Metric.from_upper(2, {(1, 2): xi(2, 1, 2)})
    rep = metric_validate(bad)
    assert not rep.ok and "body is singular" in rep.violations
    z = G.zero(3)
    odd = Metric(EvenMatrix([[z, G.scalar(3, 1), z], [G.scalar(3, -1), z, z], [z, z, z]]))
    assert "odd dimension 3" in metric_validate(odd).violations
    with pytest.raises(InvalidMetric):
        require_valid(bad)


def test_validate_rejects_odd_and_symmetric_entries():
    from supergrass.algebra import ParityError

    z = G.zero(2)
    with pytest.raises(ParityError):
        Metric(EvenMatrix([[z, xi(2, 1)], [-xi(2, 1), z]]))
    one = G.scalar(2, 1)
    g = Metric(EvenMatrix([[z, one], [one, z]]))
    assert any("antisymmetric" in v for v in metric_validate(g).violations)


def test_inverse_det_sqrtdet_examples():
    assert EPS.inverse == EPS.components.scale(-1)
    assert EPS.det == G.scalar(2, 1)
    assert EPS.sqrtdet == G.scalar(2, 1)
    g = Metric.from_upper(2, {(1, 2): G.scalar(2, 1) + xi(2, 1, 2)})
    assert g.det == G.scalar(2, 1) + xi(2, 1, 2, c=2)
    assert g.sqrtdet == G.scalar(2, 1) + xi(2, 1, 2)
    assert Metric.standard(2, orientation=-1).sqrtdet == G.scalar(2, -1)


@given(seeds)
def test_sqrtdet_squares_to_det(seed):
    g = sampling.metric(random.Random(seed), 4, density=0.5)
    assert g.sqrtdet * g.sqrtdet == g.det
    assert g.components @ g.inverse == EvenMatrix.identity(4, 4)


def test_inner_product_examples():
    one, z = G.scalar(2, 1), G.zero(2)
    V = VectorField(1, [one, z], 2)
    W = VectorField(1, [z, one], 2)
    assert vector_inner_product(V, V, EPS) == z
    assert vector_inner_product(V, W, EPS) == one


@given(seeds)
def test_inner_product_graded_skew(seed):
    rng = random.Random(seed)
    g = sampling.metric(rng, 2, density=0.6)
    V = sampling.vector_field(rng, 2, rng.randint(0, 1))
    W = sampling.vector_field(rng, 2, rng.randint(0, 1))
    s = -1 if (V.parity + 1) * (W.parity + 1) % 2 else 1
    assert vector_inner_product(V, W, g) + vector_inner_product(W, V, g).scale(s) == G.zero(2)


def test_horizontal_lift_zero_field():
    S = CovariantTwoTensor.from_metric(EPS)
    assert horizontal_lift(VectorField.zero(2, 0), S).is_zero()


def test_horizontal_lift_linear_field_on_epsilon():
    a = [[Fraction(2), Fraction(-1)], [Fraction(3), Fraction(1, 2)]]
    comps = [xi(2, 1, c=a[m][0]) + xi(2, 2, c=a[m][1]) for m in range(2)]
    V = VectorField(0, comps, 2)
    e = [[0, 1], [-1, 0]]
    ea = [[sum(e[r][m] * a[m][c] for m in range(2)) for c in range(2)] for r in range(2)]
    lifted = horizontal_lift(V, CovariantTwoTensor.from_metric(EPS))
    for r in range(2):
        for c in range(2):
            assert lifted[r, c] == G.scalar(2, ea[r][c] - ea[c][r])


def test_vertical_lift_contraction():
    V = VectorField(0, [xi(2, 2), G.zero(2)], 2)
    assert vertical_lift(V, CovariantTwoTensor.from_metric(EPS)) == [G.zero(2), xi(2, 2)]


def test_killing_epsilon_dimensions():
    assert len(killing_solve(EPS, parity=0)) == 3
    assert len(killing_solve(EPS, parity=1)) == 2
    assert killing_bound(2) == (3, 2)


def test_killing_standard_dim4_saturates_bound():
    g = Metric.standard(4)
    assert (len(killing_solve(g, parity=0)), len(killing_solve(g, parity=1))) == killing_bound(4)


def test_conformal_killing_epsilon():
    even = killing_solve(EPS, conformal=True, parity=0)
    odd = killing_solve(EPS, conformal=True, parity=1)
    assert (len(even), len(odd)) == (4, 4)
    for k in even + odd:
        assert not any(killing_residual(EPS, k.field, k.chi))


def test_zero_field_is_killing():
    assert not any(killing_residual(EPS, VectorField.zero(2, 0), G.zero(2)))


@pytest.mark.parametrize("dim,seed", [(2, s) for s in range(5)] + [(4, s) for s in range(2)])
def test_killing_residual_bound_closure(dim, seed):
    g = sampling.metric(random.Random(seed), dim, density=0.5)
    fields = []
    for p in (0, 1):
        basis = killing_solve(g, parity=p)
        for k in basis:
            assert not any(killing_residual(g, k.field))
        fields += [k.field for k in basis]
    be, bo = killing_bound(dim)
    assert sum(1 for f in fields if f.parity == 0) <= be
    assert sum(1 for f in fields if f.parity == 1) <= bo
    for V in fields:
        for W in fields:
            assert in_field_span(fields, V.bracket(W))


def test_covariant_tensor_symmetry_flag_checked():
    one = G.scalar(2, 1)
    with pytest.raises(ValueError):
        CovariantTwoTensor(((G.zero(2), one), (one, G.zero(2))), "antisymmetric")
