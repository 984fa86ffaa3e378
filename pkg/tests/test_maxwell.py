import random
from fractions import Fraction

import pytest
from hypothesis import given

from supergrass import linalg, sampling
from supergrass import maxwell as mx
from supergrass.algebra import GrassmannElement as G, ParityError
from supergrass.cartan import PseudoForm, derham
from supergrass.hodge import hodge_star
from supergrass.riemann import Metric, killing_solve

from conftest import seeds

EPS = Metric.standard(2)
CURVED = Metric.from_upper(2, {(1, 2): G.scalar(2, 1) + G.monomial(2, (1, 2))})


def xi(dim, *idx, c=1):
    return G.monomial(dim, idx, c)


def pot(*comps):
    return mx.Potential(tuple(comps))


def random_on_shell(rng, g):
    A = mx.Potential.zero(g.dim)
    for K in mx.maxwell_solve(None, g).kernel:
        A = A + K.scale(sampling.rational(rng))
    return A


def coclosed_basis(g):
    ncols = len(mx.potential_basis(g.dim))
    return [mx.potential_from_vector(g.dim, v) for v in linalg.nullspace(mx.codifferential_operator(g), ncols)]


def test_field_strength_examples():
    assert mx.field_strength(mx.Potential.zero(2)).is_zero()
    A = pot(xi(2, 2), G.zero(2))
    assert mx.field_strength(A) == PseudoForm.term(2, (1, 1), ())
    f = xi(2, 1, 2)
    assert mx.field_strength(mx.gauge_transform(A, f)) == mx.field_strength(A)


def test_gauge_transform_examples():
    A = pot(xi(2, 1), xi(2, 2, c=3))
    assert mx.gauge_transform(A, G.scalar(2, 7)) == A
    shifted = mx.gauge_transform(mx.Potential.zero(2), xi(2, 1, 2))
    assert shifted == pot(xi(2, 2), -xi(2, 1))
    assert mx.gauge_transform(mx.gauge_transform(A, xi(2, 1, 2)), -xi(2, 1, 2)) == A
    with pytest.raises(ParityError):
        mx.gauge_transform(A, xi(2, 1))
    with pytest.raises(ParityError):
        pot(G.scalar(2, 1), G.zero(2))


def test_action_examples():
    assert mx.em_action(mx.Potential.zero(2), mx.Potential.zero(2), EPS) == 0
    # every single-coefficient potential has vanishing action at the flat metric
    assert all(mx.em_action(B, None, EPS) == 0 for B in mx.potential_basis(2))
    assert mx.em_action(pot(xi(2, 2), G.zero(2)), None, CURVED) == Fraction(-3, 2)


@given(seeds)
def test_action_is_quadratic_and_gauge_invariant(seed):
    rng = random.Random(seed)
    g = sampling.metric(rng, 2, 0.6)
    A = mx.Potential(tuple(sampling.element(rng, 2, 1) for _ in range(2)))
    B = mx.Potential(tuple(sampling.element(rng, 2, 1) for _ in range(2)))
    S = lambda X: mx.em_action(X, None, g)
    assert S(A + B) + S(A - B) == 2 * S(A) + 2 * S(B)
    f = sampling.element(rng, 2, 0)
    for J in coclosed_basis(g):
        assert mx.em_action(mx.gauge_transform(A, f), J, g) == mx.em_action(A, J, g)


@pytest.mark.parametrize("g,rank,coclosed,kernel", [(EPS, 0, 3, 4), (CURVED, 3, 3, 1)])
def test_operator_ranks(g, rank, coclosed, kernel):
    ncols = len(mx.potential_basis(2))
    assert linalg.rank(mx.maxwell_operator(g), ncols) == rank
    assert len(coclosed_basis(g)) == coclosed
    assert mx.maxwell_solve(None, g).kernel_dim == kernel


def test_solver_flat_metric_only_trivial_currents():
    sol = mx.maxwell_solve(None, EPS)
    assert sol.solved and sol.particular.is_zero()
    for J in coclosed_basis(EPS):
        assert mx.maxwell_solve(J, EPS).status == "inconsistent"


def test_solver_generic_metric_solves_every_coclosed_current():
    for J in coclosed_basis(CURVED):
        sol = mx.maxwell_solve(J, CURVED)
        assert sol.solved
        assert mx.field_equation_residual(sol.particular, J, CURVED).is_zero()
        assert not any(mx.action_gradient(sol.particular, J, CURVED))
        A = mx.lorentz_gauge(sol, CURVED)
        assert A is not None and mx.lorentz_residual(A, CURVED).is_zero()


@given(seeds)
def test_solvable_implies_coclosed(seed):
    rng = random.Random(seed)
    g = sampling.metric(rng, 2, 0.6)
    for B in mx.potential_basis(2):
        J = B.scale(sampling.rational(rng))
        if mx.maxwell_solve(J, g).solved:
            assert mx.continuity_check(J, g)


@given(seeds)
def test_gauge_kernel_contains_image_of_q(seed):
    g = sampling.metric(random.Random(seed), 2, 0.6)
    sol = mx.maxwell_solve(None, g)
    kern = [mx.potential_vector(K) for K in sol.kernel]
    ncols = len(mx.potential_basis(2))
    for K in sol.kernel:
        assert mx.field_equation_residual(K, None, g).is_zero()
    qf = derham(PseudoForm.from_grassmann(xi(2, 1, 2)))
    assert linalg.in_span(kern, mx.potential_vector(qf), ncols)


def test_continuity_routes_agree():
    rng = random.Random(11)
    for _ in range(40):
        g = sampling.metric(rng, 2, 0.6)
        J = mx.Potential(tuple(sampling.element(rng, 2, 1, 0.5) for _ in range(2)))
        mx.continuity_check(J, g)
    assert mx.continuity_check(mx.Potential.zero(2), EPS)
    assert mx.lorentz_residual(mx.Potential.zero(2), EPS).is_zero()


def test_laplace_beltrami_kernel():
    assert len(mx.laplace_beltrami_kernel(EPS)) == 1
    assert len(mx.laplace_beltrami_kernel(EPS, None)) == 3
    assert mx.laplace_beltrami_kernel(CURVED) == [G.scalar(2, 1)]
    from supergrass.hodge import codifferential

    for f in mx.laplace_beltrami_kernel(EPS, None):
        assert codifferential(derham(PseudoForm.from_grassmann(f)), EPS).is_zero()


@pytest.mark.parametrize("g", [EPS, CURVED, Metric.standard(4)])
def test_charge_conserved_on_coclosed_basis(g):
    normal = []
    for J in coclosed_basis(g):
        assert mx.grassmann_charge(J, g) == (0, 0)
        c0, c1 = mx.grassmann_charge(J, g, "normal")
        assert c1 == 0
        normal.append(c0)
    if g.dim == 2:
        assert sorted(normal) == [0, 0, 1]


def test_charge_edge_cases():
    assert mx.grassmann_charge(mx.Potential.zero(2), EPS) == (0, 0)
    J = pot(G.zero(2), xi(2, 1))
    assert not mx.continuity_check(J, CURVED)
    with pytest.raises(mx.PreconditionViolated):
        mx.grassmann_charge(J, CURVED)


def test_stress_energy_examples():
    assert mx.stress_energy(mx.Potential.zero(2), EPS).is_zero()
    assert mx.stress_energy_explicit(mx.Potential.zero(2), EPS).is_zero()
    T = mx.stress_energy(pot(xi(2, 2), G.zero(2)), EPS)
    assert T[0, 1] == G.scalar(2, Fraction(3, 2)) and T[1, 0] == G.scalar(2, Fraction(-3, 2))
    assert mx.pin_explicit_normalization(pot(xi(2, 2), G.zero(2)), EPS) == mx.EXPLICIT_NORMALIZATION


@given(seeds)
def test_stress_energy_routes_and_round_trip(seed):
    rng = random.Random(seed)
    g = sampling.metric(rng, 2, 0.6)
    A = mx.Potential(tuple(sampling.element(rng, 2, 1) for _ in range(2)))
    T = mx.stress_energy(A, g)
    assert mx.stress_energy_explicit(A, g).antisymmetric_part() == T
    f = sampling.element(rng, 2, 0)
    assert mx.stress_energy(mx.gauge_transform(A, f), g) == T
    up = mx.stress_energy_upper(A, g)
    for a, b, m in mx.metric_perturbation_basis(2):
        h = mx._perturbation(2, 2, a, b, m)
        dS = mx.directional_derivative(lambda gd: mx.em_action_element(A.form().embed(gd.adim), None, gd), g, h)
        assert mx.pair_against(h, up, g) == dS


def test_stress_energy_routes_at_n2():
    rng = random.Random(4)
    g = sampling.metric(rng, 4, 0.3)
    A = mx.Potential(tuple(sampling.element(rng, 4, 1, 0.3) for _ in range(4)))
    assert mx.stress_energy_explicit(A, g).antisymmetric_part() == mx.stress_energy(A, g)


def test_conservation_on_shell():
    rng = random.Random(8)
    nontrivial = 0
    for dim, count in ((2, 20), (4, 5)):
        for _ in range(count):
            g = sampling.metric(rng, dim, 0.5)
            T = mx.stress_energy(random_on_shell(rng, g), g)
            nontrivial += not T.is_zero()
            assert not any(mx.conservation_residual(T, g))
    assert nontrivial > 0
    T = mx.stress_energy(random_on_shell(rng, EPS), EPS)
    assert not T.is_zero() and not any(mx.conservation_residual(T, EPS))


@pytest.mark.parametrize("dim", [2, 4])
def test_noether_currents_coclosed(dim):
    g = Metric.standard(dim)
    rng = random.Random(5)
    T = mx.stress_energy(random_on_shell(rng, g), g)
    assert not T.is_zero()
    for p in (0, 1):
        for K in killing_solve(g, False, p):
            c = mx.noether_current(T, K.field)
            assert derham(hodge_star(c, g)).is_zero()
            assert mx.noether_charge(T, K.field, g, "normal")[1] == 0
    assert mx.noether_current(mx.stress_energy(mx.Potential.zero(dim), g), killing_solve(g, False, 0)[0].field).is_zero()
