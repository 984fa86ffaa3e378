"""Grassmann electrodynamics as an exact finite-dimensional linear system."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (
    DimensionMismatch,
    EvenMatrix,
    GrassmannElement,
    GrassmannError,
    ParityError,
    dual_unit,
    monomial_masks,
    reorder_sign,
)
from .cartan import (
    IntegralForm,
    PseudoForm,
    VectorField,
    derham,
    fiber_pairing,
    spatial_restrict_and_integrate,
)
from .hodge import codifferential, form_inner_element, hodge_star, laplace_derham
from .riemann import CovariantTwoTensor, Metric, one_form, require_valid, vertical_lift
from . import linalg


class PreconditionViolated(GrassmannError):
    pass


@dataclass(frozen=True)
class Potential:
    """Odd 1-form c_a(xi) y^a; used for both potentials and currents."""

    components: tuple[GrassmannElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        for c in self.components:
            if not c.is_odd():
                raise ParityError(f"component {c} is not odd")
        if len({c.dim for c in self.components}) > 1:
            raise DimensionMismatch("components live in different algebras")

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, dim: int) -> "Potential":
        return cls(tuple(GrassmannElement.zero(dim) for _ in range(dim)))

    @classmethod
    def from_form(cls, f: PseudoForm) -> "Potential":
        if f.degrees() - {1}:
            raise ValueError("not a 1-form")
        return cls(tuple(f.coefficient(tuple(int(b == a) for b in range(f.n))) for a in range(f.n)))

    def form(self) -> PseudoForm:
        return one_form(self.components)

    def __add__(self, other: "Potential") -> "Potential":
        return Potential(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "Potential") -> "Potential":
        return Potential(tuple(a - b for a, b in zip(self.components, other.components)))

    def scale(self, c) -> "Potential":
        return Potential(tuple(a.scale(c) for a in self.components))

    def is_zero(self) -> bool:
        return not any(self.components)


Current = Potential


def _as_form(A) -> PseudoForm:
    return A.form() if isinstance(A, Potential) else A


def field_strength(A: Potential | PseudoForm) -> PseudoForm:
    """F = Q A."""
    return derham(_as_form(A))


def gauge_transform(A: Potential, f: GrassmannElement) -> Potential:
    """A + Q f, componentwise a_a + d f / d xi^a."""
    if not f.is_even():
        raise ParityError("gauge functions must be even")
    return Potential(tuple(c + f.derivative(a) for a, c in enumerate(A.components, 1)))


def em_action_element(A, J, g: Metric) -> GrassmannElement:
    """S = -1/2 <QA, QA> + <J, A>, keeping auxiliary content (e.g. a dual unit in g)."""
    A = _as_form(A)
    F = derham(A)
    out = form_inner_element(F, F, g).scale(Fraction(-1, 2))
    if J is not None:
        Jf = _as_form(J)
        if Jf:
            out = out + form_inner_element(Jf, A, g)
    return out


def em_action(A, J, g: Metric) -> Fraction:
    require_valid(g)
    val = em_action_element(A, J, g)
    if val.soul:
        raise ValueError("action has auxiliary-generator content")
    return val.body


# linear structure of the field equations --------------------------------------------


def potential_basis(dim: int) -> list[Potential]:
    """Monomial basis xi_m y^a of odd 1-forms (a-major order)."""
    out = []
    masks = monomial_masks(dim, 1)
    for a in range(dim):
        for m in masks:
            comps = [GrassmannElement.zero(dim)] * dim
            comps[a] = GrassmannElement._raw(dim, {m: Fraction(1)})
            out.append(Potential(tuple(comps)))
    return out


def potential_vector(A: Potential | PseudoForm) -> list[Fraction]:
    if isinstance(A, PseudoForm):
        A = Potential.from_form(A)
    masks = monomial_masks(A.dim, 1)
    return [c.coefficient(m) for c in A.components for m in masks]


def potential_from_vector(dim: int, x: Sequence[Fraction]) -> Potential:
    masks = monomial_masks(dim, 1)
    k = len(masks)
    comps = []
    for a in range(dim):
        comps.append(GrassmannElement._raw(dim, {m: Fraction(c) for m, c in zip(masks, x[a * k:(a + 1) * k]) if c}))
    return Potential(tuple(comps))


def _operator_matrix(op, dim: int) -> list[list[Fraction]]:
    cols = [potential_vector(op(B.form())) for B in potential_basis(dim)]
    return linalg.transpose(cols)


def maxwell_operator(g: Metric) -> list[list[Fraction]]:
    """Matrix of A -> delta Q A on the odd 1-form coefficient space."""
    return _operator_matrix(lambda f: codifferential(derham(f), g), g.dim)


def codifferential_operator(g: Metric) -> list[list[Fraction]]:
    """Matrix of J -> delta J (functions), rows indexed by all monomials."""
    rows_per_col = []
    for B in potential_basis(g.dim):
        d = codifferential(B.form(), g)
        ge = d.coefficient((0,) * g.dim)
        rows_per_col.append([ge.coefficient(m) for m in range(1 << g.dim)])
    return linalg.transpose(rows_per_col)


@dataclass(frozen=True)
class MaxwellSolution:
    status: str
    particular: Potential | None
    kernel: tuple[Potential, ...] = field(default_factory=tuple)

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel)

    @property
    def solved(self) -> bool:
        return self.status == "solved"


def maxwell_solve(J: Current | None, g: Metric) -> MaxwellSolution:
    """Solve delta Q A = -J exactly; return a particular solution and the gauge kernel."""
    require_valid(g)
    dim = g.dim
    if J is None:
        J = Potential.zero(dim)
    M = maxwell_operator(g)
    ncols = len(potential_basis(dim))
    rhs = [-c for c in potential_vector(J)]
    x = linalg.solve(M, rhs, ncols)
    kernel = tuple(potential_from_vector(dim, v) for v in linalg.nullspace(M, ncols))
    if x is None:
        return MaxwellSolution("inconsistent", None, kernel)
    return MaxwellSolution("solved", potential_from_vector(dim, x), kernel)


def field_equation_residual(A: Potential, J: Current | None, g: Metric) -> PseudoForm:
    """delta F + J."""
    r = codifferential(field_strength(A), g)
    if J is not None:
        r = r + J.form()
    return r


def action_gradient(A: Potential, J: Current | None, g: Metric) -> list[Fraction]:
    """Exact gradient of the action over the potential coefficients.

    The action is quadratic, so dS[B] = (S(A + B) - S(A - B)) / 2.
    """
    out = []
    for B in potential_basis(g.dim):
        out.append((em_action(A + B, J, g) - em_action(A - B, J, g)) / 2)
    return out


def continuity_check(J: Current, g: Metric) -> bool:
    """delta J = 0 and Q(*J) = 0 evaluated separately; they must agree."""
    a = codifferential(J.form(), g).is_zero()
    b = derham(hodge_star(J.form(), g)).is_zero()
    if a != b:
        raise AssertionError("continuity routes disagree")
    return a


def lorentz_residual(A: Potential, g: Metric) -> PseudoForm:
    return codifferential(A.form(), g)


def lorentz_gauge(sol: MaxwellSolution, g: Metric) -> Potential | None:
    """Particular solution shifted by a kernel element so that delta A = 0, if possible."""
    if sol.particular is None:
        return None
    A = sol.particular
    base = lorentz_residual(A, g).coefficient((0,) * g.dim)
    cols = []
    for K in sol.kernel:
        r = lorentz_residual(K, g).coefficient((0,) * g.dim)
        cols.append([r.coefficient(m) for m in range(1 << g.dim)])
    rhs = [-base.coefficient(m) for m in range(1 << g.dim)]
    if not cols:
        return A if not any(rhs) else None
    x = linalg.solve(linalg.transpose(cols), rhs, len(cols))
    if x is None:
        return None
    for c, K in zip(x, sol.kernel):
        if c:
            A = A + K.scale(c)
    return A


def laplace_beltrami_kernel(g: Metric, parity: int | None = 0) -> list[GrassmannElement]:
    """Nullspace of the Laplace-DeRham operator on functions of the given parity (None: all)."""
    require_valid(g)
    n = g.dim
    masks = monomial_masks(n, parity)
    cols = []
    for m in masks:
        f = PseudoForm.from_grassmann(GrassmannElement._raw(n, {m: Fraction(1)}))
        r = laplace_derham(f, g).coefficient((0,) * n)
        cols.append([r.coefficient(k) for k in range(1 << n)])
    basis = linalg.nullspace(linalg.transpose(cols), len(masks))
    return [GrassmannElement._raw(n, {m: c for m, c in zip(masks, v) if c}) for v in basis]


def grassmann_charge(J: Current, g: Metric, convention: str = "bare") -> tuple[Fraction, Fraction]:
    """(c0, c1) with Q_Gr(tau) = c0 + c1 tau; the last coordinate is time."""
    if not continuity_check(J, g):
        raise PreconditionViolated("current is not co-closed")
    q = spatial_restrict_and_integrate(hodge_star(J.form(), g), convention)
    return q.body, q.coefficient(1)


# energy-momentum tensor ---------------------------------------------------------------


def metric_perturbation_basis(dim: int) -> list[tuple[int, int, int]]:
    """(a, b, mask) with a < b and even mask: h_{ab} = xi_mask = -h_{ba}."""
    return [(a, b, m) for a in range(dim) for b in range(a + 1, dim) for m in monomial_masks(dim, 0)]


def _perturbation(dim: int, adim: int, a: int, b: int, mask: int) -> CovariantTwoTensor:
    z = GrassmannElement.zero(adim)
    rows = [[z] * dim for _ in range(dim)]
    e = GrassmannElement._raw(adim, {mask: Fraction(1)})
    rows[a][b] = e
    rows[b][a] = -e
    return CovariantTwoTensor(tuple(tuple(r) for r in rows))


def dual_metric(g: Metric, h: CovariantTwoTensor) -> tuple[Metric, int]:
    """g + eps h with eps = xi^{N+1} xi^{N+2}; returns the metric and the eps mask."""
    d = g.adim + 2
    eps = dual_unit(g.adim)
    gd = g.embed(d)
    hd = h.map(lambda x: x.embed(d))
    return gd.perturb(hd, eps), (1 << g.adim) | (1 << (g.adim + 1))


def directional_derivative(fn, g: Metric, h: CovariantTwoTensor) -> Fraction:
    """d/dt fn(g + t h) at t = 0 for a function returning an element of the (dual) algebra."""
    gd, emask = dual_metric(g, h)
    val = fn(gd)
    bad = [m for m in val.terms if m not in (0, emask)]
    if bad:
        raise ValueError("unexpected auxiliary content")
    return val.coefficient(emask)


def upper_from_pairings(g: Metric, dSdt: dict[tuple[int, int, int], Fraction]) -> list[list[GrassmannElement]]:
    """Rebuild W^{ab} = T^{ab}/sqrt|g| from d/dt S = -∫ xi_e W^{ab} for every h = (a, b, e)."""
    n = g.dim
    full = (1 << n) - 1
    W = [[GrassmannElement.zero(n) for _ in range(n)] for _ in range(n)]
    for (a, b, e), v in dSdt.items():
        if not v:
            continue
        comp = full ^ e
        coeff = -v * reorder_sign(e, comp)
        W[a][b] = W[a][b] + GrassmannElement._raw(n, {comp: coeff})
        W[b][a] = W[b][a] - GrassmannElement._raw(n, {comp: coeff})
    return W


def stress_energy_upper(A: Potential, g: Metric) -> list[list[GrassmannElement]]:
    """T^{ab} = -2 sqrt|g| dS/dg_{ab} from exact dual-number variations (skew part)."""
    require_valid(g)
    n = g.dim
    d = {}
    for a, b, m in metric_perturbation_basis(n):
        h = _perturbation(n, n, a, b, m)
        d[(a, b, m)] = directional_derivative(lambda gd: em_action_element(A.form().embed(gd.adim), None, gd), g, h)
    W = upper_from_pairings(g, d)
    return [[g.sqrtdet * W[a][b] for b in range(n)] for a in range(n)]


def lower_indices(g: Metric, T_up) -> CovariantTwoTensor:
    """T_{ab} = g_{am} g_{bn} T^{mn}."""
    G = g.components
    Tm = EvenMatrix([list(r) for r in T_up])
    low = G @ Tm @ G.transpose()
    return CovariantTwoTensor(low.entries, "none")


def raise_indices(g: Metric, T: CovariantTwoTensor) -> list[list[GrassmannElement]]:
    Gi = g.inverse
    low = EvenMatrix([list(r) for r in T.components])
    up = Gi @ low @ Gi.transpose()
    return [list(r) for r in up.entries]


def stress_energy(A: Potential, g: Metric) -> CovariantTwoTensor:
    """Variational energy-momentum tensor T_{ab} (only the skew part is defined)."""
    T = lower_indices(g, stress_energy_upper(A, g))
    return CovariantTwoTensor(T.components, "antisymmetric").antisymmetric_part()


def pair_against(g_h_pairs: CovariantTwoTensor, T_up, g: Metric) -> Fraction:
    """-∫ dxi |g|^{-1/2} 1/2 h_{ab} T^{ab}, the first-order change of the action along h."""
    n = g.dim
    acc = GrassmannElement.zero(g.adim)
    for a in range(n):
        for b in range(n):
            if g_h_pairs[a, b] and T_up[a][b]:
                acc = acc + g_h_pairs[a, b] * T_up[a][b]
    return -(g.inv_sqrtdet * acc).scale(Fraction(1, 2)).berezin()


def _fiber_integral(a: tuple[int, ...], w: IntegralForm) -> GrassmannElement:
    """∫ dy y^a w (no xi integration)."""
    out = GrassmannElement.zero(w.adim)
    fib = fiber_pairing(a, a)
    for (k, m), c in w.terms.items():
        if k == a:
            out = out + GrassmannElement._raw(w.adim, {m: c * fib})
    return out


# Overall constant of the explicit formula, pinned once against the variational route.
EXPLICIT_NORMALIZATION = Fraction(-1)


def _explicit_parts(A: Potential, g: Metric):
    """The two terms of the explicit formula before the overall constant.

    X_{ab} = g_{ab} sum F_p F_q P(p, q) and
    Y_{ab} = sum (g_{am} g_{bn} - g_{bm} g_{an}) F_p F_q P(p + e_n, q + e_m), with
    P(p, q) = ∫ dy y^p prod_c L_c^{q_c} delta(y) and L_c = (g^{-1})_{dc} d/dy^d.
    The z-integral is done by the same delta calculus as the Hodge star.
    """
    n = g.dim
    F = field_strength(A)
    coeffs = F.coefficients()
    inv = g.inverse
    ops = []
    for c in range(n):
        acc = PseudoForm.zero(n, g.adim)
        for dd in range(n):
            if inv[dd, c]:
                acc = acc + PseudoForm.y(n, dd + 1, g.adim).lmul(inv[dd, c])
        ops.append(acc)
    cache: dict[tuple[int, ...], IntegralForm] = {}

    def delta_ops(q: tuple[int, ...]) -> IntegralForm:
        if q not in cache:
            acc = PseudoForm.one(n, g.adim)
            for c, x in enumerate(q):
                for _ in range(x):
                    acc = acc * ops[c]
            cache[q] = IntegralForm._raw(n, g.adim, dict(acc.terms))
        return cache[q]

    def shift(p, c):
        return tuple(x + (i == c) for i, x in enumerate(p))

    scalar_part = GrassmannElement.zero(g.adim)
    mixed = [[GrassmannElement.zero(g.adim) for _ in range(n)] for _ in range(n)]
    for p, Fp in coeffs.items():
        for q, Fq in coeffs.items():
            FF = Fp * Fq
            scalar_part = scalar_part + FF * _fiber_integral(p, delta_ops(q))
            for m in range(n):
                for nu in range(n):
                    val = _fiber_integral(shift(p, nu), delta_ops(shift(q, m)))
                    if val:
                        mixed[m][nu] = mixed[m][nu] + FF * val
    X, Y = [], []
    for a in range(n):
        xr, yr = [], []
        for b in range(n):
            xr.append(g[a, b] * scalar_part)
            acc = GrassmannElement.zero(g.adim)
            for m in range(n):
                for nu in range(n):
                    if mixed[m][nu]:
                        k = g[a, m] * g[b, nu] - g[b, m] * g[a, nu]
                        if k:
                            acc = acc + k * mixed[m][nu]
            yr.append(acc)
        X.append(xr)
        Y.append(yr)
    return X, Y


def stress_energy_explicit(A: Potential, g: Metric, normalization: Fraction | None = None) -> CovariantTwoTensor:
    """T_{ab} = -k/2 (X_{ab} + Y_{ab}), see :func:`_explicit_parts`."""
    require_valid(g)
    kappa = EXPLICIT_NORMALIZATION if normalization is None else Fraction(normalization)
    X, Y = _explicit_parts(A, g)
    n = g.dim
    rows = tuple(tuple((X[a][b] + Y[a][b]).scale(-kappa / 2) for b in range(n)) for a in range(n))
    return CovariantTwoTensor(rows, "none")


def pin_explicit_normalization(A: Potential, g: Metric) -> Fraction | None:
    """The constant k making the explicit skew part equal the variational one, if it exists."""
    Tv = stress_energy(A, g)
    Te = stress_energy_explicit(A, g, 1).antisymmetric_part()
    ratio = None
    for a in range(g.dim):
        for b in range(g.dim):
            for m in set(Tv[a, b].terms) | set(Te[a, b].terms):
                x, y = Tv[a, b].coefficient(m), Te[a, b].coefficient(m)
                if not y:
                    return None
                r = x / y
                if ratio is None:
                    ratio = r
                elif r != ratio:
                    return None
    return ratio


def noether_current(T: CovariantTwoTensor, V: VectorField) -> PseudoForm:
    """T_V: one slot of T contracted with V, fiber symbols renamed to y."""
    return one_form(vertical_lift(V, T))


def conservation_residual(T: CovariantTwoTensor, g: Metric) -> list[GrassmannElement]:
    """Per m: 1/2 (g_{ab})_{,m} T^{ab}/sqrt|g| - (g_{ma} T^{ab}/sqrt|g|)_{,b}."""
    n = g.dim
    up = raise_indices(g, T)
    W = [[g.inv_sqrtdet * up[a][b] for b in range(n)] for a in range(n)]
    out = []
    for m in range(n):
        acc = GrassmannElement.zero(g.adim)
        for a in range(n):
            for b in range(n):
                dg = g[a, b].derivative(m + 1)
                if dg and W[a][b]:
                    acc = acc + (dg * W[a][b]).scale(Fraction(1, 2))
        for b in range(n):
            inner = GrassmannElement.zero(g.adim)
            for a in range(n):
                if g[m, a] and W[a][b]:
                    inner = inner + g[m, a] * W[a][b]
            acc = acc - inner.derivative(b + 1)
        out.append(acc)
    return out


def noether_charge(T: CovariantTwoTensor, V: VectorField, g: Metric, convention: str = "bare") -> tuple[Fraction, Fraction]:
    q = spatial_restrict_and_integrate(hodge_star(noether_current(T, V), g), convention)
    return q.body, q.coefficient(1)
