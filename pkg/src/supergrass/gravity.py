"""Linear connections on R^{0|n}, curvature, and the Grassmann-Hilbert action."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .algebra import (
    DimensionMismatch,
    EvenMatrix,
    GrassmannElement,
    ParityError,
    matrix_inverse,
    monomial_masks,
    substitute,
)
from .cartan import Supermap, VectorField
from .riemann import CovariantTwoTensor, Metric, require_valid, vector_inner_product
from .maxwell import dual_metric, metric_perturbation_basis, raise_indices, _perturbation
from . import linalg


Table3 = tuple[tuple[tuple[GrassmannElement, ...], ...], ...]


@dataclass(frozen=True)
class Connection:
    """Christoffel symbols gamma[c][a][b] = Γ^c_{ab}, the components of ∇_{∂_b} ∂_a."""

    gamma: Table3

    def __post_init__(self):
        g = tuple(tuple(tuple(x) for x in row) for row in self.gamma)
        object.__setattr__(self, "gamma", g)
        n = len(g)
        for c in range(n):
            if len(g[c]) != n or any(len(r) != n for r in g[c]):
                raise DimensionMismatch("Christoffel table must be n x n x n")
            for a in range(n):
                for b in range(n):
                    if not g[c][a][b].is_odd():
                        raise ParityError(f"Γ^{c + 1}_{a + 1}{b + 1} is not odd")

    @property
    def n(self) -> int:
        return len(self.gamma)

    @property
    def adim(self) -> int:
        return self.gamma[0][0][0].dim

    def __call__(self, c: int, a: int, b: int) -> GrassmannElement:
        return self.gamma[c][a][b]

    @classmethod
    def zero(cls, n: int, adim: int | None = None) -> "Connection":
        z = GrassmannElement.zero(n if adim is None else adim)
        return cls(tuple(tuple(tuple(z for _ in range(n)) for _ in range(n)) for _ in range(n)))

    @classmethod
    def from_function(cls, n: int, fn) -> "Connection":
        return cls(tuple(tuple(tuple(fn(c, a, b) for b in range(n)) for a in range(n)) for c in range(n)))

    def __eq__(self, other):
        return isinstance(other, Connection) and self.gamma == other.gamma

    def __hash__(self):
        return hash(self.gamma)


def frame(n: int, a: int, adim: int | None = None) -> VectorField:
    """The coordinate field ∂/∂xi^{a+1} (0-based a)."""
    return VectorField.frame(n, a + 1, adim)


def covariant_derivative(C: Connection, V: VectorField, W: VectorField) -> VectorField:
    """(∇_V W)^c = V(W^c) + (-1)^{|W|+1} V^b W^a Γ^c_{ab}."""
    n = C.n
    if V.n != n or W.n != n:
        raise DimensionMismatch("field and connection dimensions differ")
    sign = 1 if W.parity else -1
    comps = []
    for c in range(n):
        acc = V(W.components[c])
        for a in range(n):
            wa = W.components[a]
            if not wa:
                continue
            for b in range(n):
                vb = V.components[b]
                if vb and C.gamma[c][a][b]:
                    acc = acc + (vb * wa * C.gamma[c][a][b]).scale(sign)
        comps.append(acc)
    return VectorField((V.parity + W.parity) % 2, comps, n)


def torsion_operator(C: Connection, V: VectorField, W: VectorField) -> VectorField:
    """T(V, W) = ∇_V W - (-1)^{|V||W|} ∇_W V - [V, W]."""
    s = -1 if V.parity * W.parity else 1
    return covariant_derivative(C, V, W) - covariant_derivative(C, W, V).scale(s) - V.bracket(W)


def curvature_operator(C: Connection, V: VectorField, W: VectorField, U: VectorField) -> VectorField:
    """[∇_V, ∇_W] U - ∇_{[V, W]} U."""
    s = -1 if V.parity * W.parity else 1
    a = covariant_derivative(C, V, covariant_derivative(C, W, U))
    b = covariant_derivative(C, W, covariant_derivative(C, V, U)).scale(s)
    return a - b - covariant_derivative(C, V.bracket(W), U)


def torsion(C: Connection) -> Table3:
    """T^c_{ab} = Γ^c_{ab} + Γ^c_{ba}."""
    n = C.n
    return tuple(
        tuple(tuple(C.gamma[c][a][b] + C.gamma[c][b][a] for b in range(n)) for a in range(n)) for c in range(n)
    )


@dataclass(frozen=True)
class CurvatureTensor:
    """R[a][b][m][v] = R^a_{bmv}, defined by U(∂_m, ∂_v) ∂_b = R^a_{bmv} ∂_a."""

    components: tuple

    @property
    def n(self) -> int:
        return len(self.components)

    def __call__(self, a, b, m, v) -> GrassmannElement:
        return self.components[a][b][m][v]

    def is_zero(self) -> bool:
        return not any(x for a in self.components for b in a for m in b for x in m)


def curvature(C: Connection) -> CurvatureTensor:
    """R^a_{bmv} = (Γ^a_{bm})_{,v} + (Γ^a_{bv})_{,m} - Γ^l_{bm} Γ^a_{lv} - Γ^l_{bv} Γ^a_{lm}."""
    n = C.n
    G = C.gamma
    d = [[[[G[a][b][m].derivative(v + 1) for v in range(n)] for m in range(n)] for b in range(n)] for a in range(n)]
    out = []
    for a in range(n):
        ra = []
        for b in range(n):
            rb = []
            for m in range(n):
                rm = []
                for v in range(n):
                    acc = d[a][b][m][v] + d[a][b][v][m]
                    for l in range(n):
                        if G[l][b][m] and G[a][l][v]:
                            acc = acc - G[l][b][m] * G[a][l][v]
                        if G[l][b][v] and G[a][l][m]:
                            acc = acc - G[l][b][v] * G[a][l][m]
                    rm.append(acc)
                rb.append(tuple(rm))
            ra.append(tuple(rb))
        out.append(tuple(ra))
    return CurvatureTensor(tuple(out))


def curvature_from_operator(C: Connection) -> CurvatureTensor:
    """Same components obtained by applying the abstract curvature operator to frames."""
    n, d = C.n, C.adim
    fr = [frame(n, a, d) for a in range(n)]
    table = {}
    for b, m, v in product(range(n), repeat=3):
        table[(b, m, v)] = curvature_operator(C, fr[m], fr[v], fr[b]).components
    return CurvatureTensor(
        tuple(
            tuple(tuple(tuple(table[(b, m, v)][a] for v in range(n)) for m in range(n)) for b in range(n))
            for a in range(n)
        )
    )


def torsion_from_operator(C: Connection) -> Table3:
    n, d = C.n, C.adim
    fr = [frame(n, a, d) for a in range(n)]
    return tuple(
        tuple(tuple(torsion_operator(C, fr[a], fr[b]).components[c] for b in range(n)) for a in range(n))
        for c in range(n)
    )


def _cyclic(V, W, U):
    return [(V, W, U), (W, U, V), (U, V, W)]


class _Ops:
    """Connection operators, memoized on field contents (frame sweeps repeat many terms)."""

    def __init__(self, C: Connection, memo: bool = True):
        self.C = C
        self.memo = memo
        self._cache: dict = {}

    @staticmethod
    def _key(V: VectorField):
        return V.parity, tuple(V.components)

    def _get(self, tag, fn, *fields):
        if not self.memo:
            return fn(self.C, *fields)
        k = (tag,) + tuple(self._key(f) for f in fields)
        if k not in self._cache:
            self._cache[k] = fn(self.C, *fields)
        return self._cache[k]

    def nabla(self, V, W):
        return self._get("n", covariant_derivative, V, W)

    def torsion(self, V, W):
        s = -1 if V.parity * W.parity else 1
        return self.nabla(V, W) - self.nabla(W, V).scale(s) - V.bracket(W)

    def curvature(self, V, W, U):
        s = -1 if V.parity * W.parity else 1
        return self.nabla(V, self.nabla(W, U)) - self.nabla(W, self.nabla(V, U)).scale(s) - self.nabla(V.bracket(W), U)


def ricci_identity_residual(C: Connection, V: VectorField, W: VectorField, U: VectorField,
                            ops: _Ops | None = None) -> VectorField:
    """Σ_cycl (-1)^{|V||U|} {U(V,W,U) - ∇_V T(W,U) - T(V,[W,U])}."""
    ops = _Ops(C, memo=False) if ops is None else ops
    out = VectorField.zero(C.n, (V.parity + W.parity + U.parity) % 2, C.adim)
    for a, b, c in _cyclic(V, W, U):
        term = ops.curvature(a, b, c) - ops.nabla(a, ops.torsion(b, c)) - ops.torsion(a, b.bracket(c))
        out = out + (term.scale(-1) if a.parity * c.parity else term)
    return out


def bianchi_residual(C: Connection, V: VectorField, W: VectorField, U: VectorField, X: VectorField,
                     ops: _Ops | None = None) -> VectorField:
    """Σ_cycl (-1)^{|V||U|} {[∇_V, U(W,U,.)] + U(V,[W,U],.)} applied to X."""
    ops = _Ops(C, memo=False) if ops is None else ops
    total = VectorField.zero(C.n, (V.parity + W.parity + U.parity + X.parity) % 2, C.adim)
    for a, b, c in _cyclic(V, W, U):
        s = -1 if a.parity * (b.parity + c.parity) % 2 else 1
        comm = ops.nabla(a, ops.curvature(b, c, X)) - ops.curvature(b, c, ops.nabla(a, X)).scale(s)
        term = comm + ops.curvature(a, b.bracket(c), X)
        total = total + (term.scale(-1) if a.parity * c.parity else term)
    return total


@dataclass(frozen=True)
class IdentityReport:
    ricci_zero: bool
    bianchi_zero: bool
    ricci_failures: int
    bianchi_failures: int


def frame_identity_report(C: Connection) -> IdentityReport:
    """Evaluate the Ricci and Bianchi residuals on every frame triple (and frame X)."""
    n, d = C.n, C.adim
    fr = [frame(n, a, d) for a in range(n)]
    ops = _Ops(C)
    rf = bf = 0
    for i, j, k in product(range(n), repeat=3):
        if not ricci_identity_residual(C, fr[i], fr[j], fr[k], ops).is_zero():
            rf += 1
        for x in range(n):
            if not bianchi_residual(C, fr[i], fr[j], fr[k], fr[x], ops).is_zero():
                bf += 1
    return IdentityReport(rf == 0, bf == 0, rf, bf)


# metric connections --------------------------------------------------------------


def levi_civita(g: Metric) -> Connection:
    """Γ^c_{ab} = 1/2 g^{cm} [(g_{ma})_{,b} - (g_{mb})_{,a} - (g_{ab})_{,m}]."""
    require_valid(g)
    n = g.dim
    inv = g.inverse
    dg = [[[g[a, b].derivative(c + 1) for c in range(n)] for b in range(n)] for a in range(n)]
    low = [[[(dg[m][a][b] - dg[m][b][a] - dg[a][b][m]).scale(Fraction(1, 2)) for b in range(n)] for a in range(n)]
           for m in range(n)]

    def gam(c, a, b):
        acc = GrassmannElement.zero(g.adim)
        for m in range(n):
            if inv[c, m] and low[m][a][b]:
                acc = acc + inv[c, m] * low[m][a][b]
        return acc

    return Connection.from_function(n, gam)


def compatibility_residual(C: Connection, g: Metric) -> list[GrassmannElement]:
    """(g_{ab})_{,c} - g_{am} Γ^m_{bc} + g_{bm} Γ^m_{ac} for a < b and every c."""
    n = g.dim
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(n):
                acc = g[a, b].derivative(c + 1)
                for m in range(n):
                    acc = acc - g[a, m] * C.gamma[m][b][c] + g[b, m] * C.gamma[m][a][c]
                out.append(acc)
    return out


def compatibility_operator_residual(C: Connection, g: Metric, V, W, U) -> GrassmannElement:
    """∇_V (W,U) - (∇_V W, U) - (-1)^{|V|(|W|+1)} (W, ∇_V U)."""
    s = -1 if V.parity * (W.parity + 1) % 2 else 1
    lhs = V(vector_inner_product(W, U, g))
    r1 = vector_inner_product(covariant_derivative(C, V, W), U, g)
    r2 = vector_inner_product(W, covariant_derivative(C, V, U), g)
    return lhs - r1 - r2.scale(s)


def antisymmetric_compatible_space(g: Metric) -> tuple[int, bool]:
    """Dimension of the solution set of compatibility + antisymmetry (as an affine space),
    and whether it is consistent.  Unknowns: all odd coefficients of all Γ^c_{ab}."""
    n = g.dim
    masks = monomial_masks(n, 1)
    k = len(masks)
    nun = n ** 3 * k

    def index(c, a, b, j):
        return ((c * n + a) * n + b) * k + j

    rows, rhs = [], []
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(n):
                const = g[a, b].derivative(c + 1)
                for mask in range(1 << n):
                    row = [Fraction(0)] * nun
                    for m in range(n):
                        for j, mj in enumerate(masks):
                            for sign, gg, bb in ((-1, g[a, m], b), (1, g[b, m], a)):
                                if not gg:
                                    continue
                                prod_ = gg * GrassmannElement._raw(n, {mj: Fraction(1)})
                                v = prod_.coefficient(mask)
                                if v:
                                    row[index(m, bb, c, j)] += sign * v
                    if any(row) or const.coefficient(mask):
                        rows.append([-x for x in row])
                        rhs.append(const.coefficient(mask))
    for c in range(n):
        for a in range(n):
            for b in range(a, n):
                for j in range(k):
                    row = [Fraction(0)] * nun
                    row[index(c, a, b, j)] += 1
                    row[index(c, b, a, j)] += 1
                    rows.append(row)
                    rhs.append(Fraction(0))
    x = linalg.solve(rows, rhs, nun)
    return nun - linalg.rank(rows, nun), x is not None


# symmetries and component count ----------------------------------------------------


def lowered_curvature(R: CurvatureTensor, g: Metric):
    """L[x][y][m][v] = (U(∂_m, ∂_v) ∂_x, ∂_y)_g = R^a_{xmv} g_{ay}."""
    n = R.n
    out = {}
    for x, y, m, v in product(range(n), repeat=4):
        acc = GrassmannElement.zero(g.adim)
        for a in range(n):
            if R(a, x, m, v) and g[a, y]:
                acc = acc + R(a, x, m, v) * g[a, y]
        out[(x, y, m, v)] = acc
    return out


@dataclass(frozen=True)
class SymmetryReport:
    first_holds: bool
    second_holds: bool
    first_violations: int
    second_violations: int


def curvature_symmetries_check(C: Connection, g: Metric) -> SymmetryReport:
    """Frame form of the two curvature symmetries: L_{xymv} = L_{yxmv} and L_{xymv} = L_{mvxy}."""
    L = lowered_curvature(curvature(C), g)
    n = g.dim
    v1 = sum(1 for x, y, m, v in product(range(n), repeat=4) if L[(x, y, m, v)] != L[(y, x, m, v)])
    v2 = sum(1 for x, y, m, v in product(range(n), repeat=4) if L[(x, y, m, v)] != L[(m, v, x, y)])
    return SymmetryReport(v1 == 0, v2 == 0, v1, v2)


def curvature_component_count(n: int) -> int:
    """n^2 (4n^2 - 1)/3 + n (4n^2 + 1) for R^{0|2n}."""
    return n * n * (4 * n * n - 1) // 3 + n * (4 * n * n + 1)


def symmetry_space_dimension(dim: int, cyclic: bool = False) -> int:
    """Dimension of numeric tensors L_{xymv} obeying the curvature symmetries on R^{0|dim}.

    Constraints: L_{xymv} = L_{xyvm}, L_{xymv} = L_{yxmv}, L_{xymv} = L_{mvxy}, and
    (when ``cyclic``) the torsion-free Ricci identity L_{xymv} + L_{myvx} + L_{vyxm} = 0.
    """
    N = dim
    idx = {t: i for i, t in enumerate(product(range(N), repeat=4))}
    ncols = len(idx)
    rows = []

    def eq(pairs):
        row = [Fraction(0)] * ncols
        for c, t in pairs:
            row[idx[t]] += c
        if any(row):
            rows.append(row)

    for x, y, m, v in idx:
        eq([(1, (x, y, m, v)), (-1, (x, y, v, m))])
        eq([(1, (x, y, m, v)), (-1, (y, x, m, v))])
        eq([(1, (x, y, m, v)), (-1, (m, v, x, y))])
        if cyclic:
            eq([(1, (x, y, m, v)), (1, (m, y, v, x)), (1, (v, y, x, m))])
    return ncols - linalg.rank(rows, ncols)


def random_compatible_torsionful(g: Metric, rng) -> Connection | None:
    """A metric-compatible connection with nonzero torsion, if Levi-Civita plus a kernel shift allows one."""
    n = g.dim
    masks = monomial_masks(n, 1)
    k = len(masks)
    nun = n ** 3 * k

    def index(c, a, b, j):
        return ((c * n + a) * n + b) * k + j

    rows = []
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(n):
                for mask in range(1 << n):
                    row = [Fraction(0)] * nun
                    for m in range(n):
                        for j, mj in enumerate(masks):
                            for sign, gg, bb in ((-1, g[a, m], b), (1, g[b, m], a)):
                                if gg:
                                    v = (gg * GrassmannElement._raw(n, {mj: Fraction(1)})).coefficient(mask)
                                    if v:
                                        row[index(m, bb, c, j)] += sign * v
                    if any(row):
                        rows.append(row)
    ker = linalg.nullspace(rows, nun)
    if not ker:
        return None
    x = [Fraction(0)] * nun
    for v in ker:
        c = Fraction(rng.randint(-2, 2))
        x = [a + c * b for a, b in zip(x, v)]
    lc = levi_civita(g)

    def gam(c, a, b):
        extra = GrassmannElement._raw(n, {mj: x[index(c, a, b, j)] for j, mj in enumerate(masks) if x[index(c, a, b, j)]})
        return lc.gamma[c][a][b] + extra

    return Connection.from_function(n, gam)


# transformation law -----------------------------------------------------------------


def transform_connection(C: Connection, phi: Supermap) -> Connection:
    """Christoffel symbols in the source coordinates of Φ.

    Γ'^c_{ab} = (J^{-1})^c_g [ J^p_a J^q_b Φ*(Γ^g_{pq}) + ∂_b J^g_a ].
    """
    n = C.n
    J = phi.jacobian()
    Ji = matrix_inverse(J)
    imgs = phi.images(C.adim - n)
    pulled = [[[substitute(C.gamma[c][a][b], imgs) for b in range(n)] for a in range(n)] for c in range(n)]
    dJ = [[[J[c, a].derivative(b + 1) for b in range(n)] for a in range(n)] for c in range(n)]

    def gam(c, a, b):
        acc = GrassmannElement.zero(phi.n)
        for gg in range(n):
            if not Ji[c, gg]:
                continue
            inner = dJ[gg][a][b]
            for p in range(n):
                if not J[p, a]:
                    continue
                for q in range(n):
                    if J[q, b] and pulled[gg][p][q]:
                        inner = inner + J[p, a] * J[q, b] * pulled[gg][p][q]
            acc = acc + Ji[c, gg] * inner
        return acc

    return Connection.from_function(n, gam)


# actions ------------------------------------------------------------------------------


def ricci_scalar_of(C: Connection, g: Metric) -> GrassmannElement:
    """R = g^{ba} R^m_{amb}."""
    R = curvature(C)
    inv = g.inverse
    n = g.dim
    acc = GrassmannElement.zero(g.adim)
    for a in range(n):
        for b in range(n):
            if not inv[b, a]:
                continue
            s = GrassmannElement.zero(g.adim)
            for m in range(n):
                s = s + R(m, a, m, b)
            acc = acc + inv[b, a] * s
    return acc


def ricci_scalar(g: Metric) -> GrassmannElement:
    return ricci_scalar_of(levi_civita(g), g)


def simplified_density(g: Metric, C: Connection | None = None) -> GrassmannElement:
    """G = g^{ba} { Γ^m_{ab} Γ^l_{ml} + Γ^l_{am} Γ^m_{lb} }."""
    C = levi_civita(g) if C is None else C
    G = C.gamma
    inv = g.inverse
    n = g.dim
    trace = [GrassmannElement.zero(g.adim) for _ in range(n)]
    for m in range(n):
        for l in range(n):
            trace[m] = trace[m] + G[l][m][l]
    acc = GrassmannElement.zero(g.adim)
    for a in range(n):
        for b in range(n):
            if not inv[b, a]:
                continue
            s = GrassmannElement.zero(g.adim)
            for m in range(n):
                if G[m][a][b] and trace[m]:
                    s = s + G[m][a][b] * trace[m]
                for l in range(n):
                    if G[l][a][m] and G[m][l][b]:
                        s = s + G[l][a][m] * G[m][l][b]
            acc = acc + inv[b, a] * s
    return acc


def _measure(g: Metric, density: GrassmannElement) -> GrassmannElement:
    """∫ dxi |g|^{-1/2} density over the geometric generators (aux content kept)."""
    return (g.inv_sqrtdet * density).integrate(g.dim)


def hilbert_action_element(g: Metric) -> GrassmannElement:
    return _measure(g, ricci_scalar(g))


def simplified_action_element(g: Metric) -> GrassmannElement:
    return _measure(g, simplified_density(g))


def _scalar(val: GrassmannElement) -> Fraction:
    if val.soul:
        raise ValueError("value has auxiliary-generator content")
    return val.body


def hilbert_action(g: Metric) -> Fraction:
    require_valid(g)
    return _scalar(hilbert_action_element(g))


def simplified_action(g: Metric) -> Fraction:
    require_valid(g)
    return _scalar(simplified_action_element(g))


# Einstein equations ---------------------------------------------------------------------


def metric_coefficient_basis(dim: int) -> list[tuple[int, int, int]]:
    """Independent metric coefficients: (a, b, even mask) with a < b."""
    return metric_perturbation_basis(dim)


def _derivative_along(fn, g: Metric, h: CovariantTwoTensor) -> Fraction:
    gd, emask = dual_metric(g, h)
    val = fn(gd)
    if any(m not in (0, emask) for m in val.terms):
        raise ValueError("unexpected auxiliary content")
    return val.coefficient(emask)


def hilbert_gradient(g: Metric, action=simplified_action_element) -> list[Fraction]:
    """d/dt S(g + t h_i) for every basis perturbation h_i."""
    require_valid(g)
    n = g.dim
    return [_derivative_along(action, g, _perturbation(n, n, a, b, m)) for a, b, m in metric_coefficient_basis(n)]


def matter_pairing(g: Metric, T: CovariantTwoTensor, h: CovariantTwoTensor) -> Fraction:
    """∫ dxi |g|^{-1/2} 1/2 h_{ab} T^{ab}."""
    up = raise_indices(g, T)
    n = g.dim
    acc = GrassmannElement.zero(g.adim)
    for a in range(n):
        for b in range(n):
            if h[a, b] and up[a][b]:
                acc = acc + h[a, b] * up[a][b]
    return (g.inv_sqrtdet * acc).scale(Fraction(1, 2)).berezin()


def einstein_residual(g: Metric, T: CovariantTwoTensor | None = None,
                      action=simplified_action_element) -> list[Fraction]:
    """dS_GH[h_i] - ∫ dxi |g|^{-1/2} 1/2 h_{ab} T^{ab}; zero iff the Grassmann-Einstein equations hold."""
    grad = hilbert_gradient(g, action)
    if T is None:
        return grad
    n = g.dim
    out = []
    for gi, (a, b, m) in zip(grad, metric_coefficient_basis(n)):
        out.append(gi - matter_pairing(g, T, _perturbation(n, n, a, b, m)))
    return out


def perturbation_pullback(phi: Supermap, h: CovariantTwoTensor) -> CovariantTwoTensor:
    """Linear action of a coordinate change on a metric perturbation."""
    hm = Metric(EvenMatrix([list(r) for r in h.components]))
    J = phi.jacobian()
    imgs = phi.images(0)
    hp = hm.components.map(lambda e: substitute(e, imgs))
    return CovariantTwoTensor((J.transpose() @ hp @ J).entries)


def gradient_along(g: Metric, h: CovariantTwoTensor, action=simplified_action_element) -> Fraction:
    return _derivative_along(action, g, h)
