"""Odd symplectic ("Riemannian") metrics on R^{0|2n} and their Killing fields."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .algebra import (
    DimensionMismatch,
    EvenMatrix,
    GrassmannElement,
    GrassmannError,
    matrix_det,
    matrix_inverse,
    monomial_masks,
    pfaffian,
    rational_inverse,
    substitute,
)
from .cartan import PseudoForm, Supermap, VectorField
from . import linalg


class InvalidMetric(GrassmannError):
    pass


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


class Metric:
    """Antisymmetric even matrix g_{ab}(xi) with invertible body, plus an orientation sign."""

    def __init__(self, components: EvenMatrix | Sequence[Sequence[GrassmannElement]], orientation: int = 1):
        self.components = components if isinstance(components, EvenMatrix) else EvenMatrix(components)
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.orientation = orientation

    @classmethod
    def from_upper(cls, dim: int, upper: dict[tuple[int, int], GrassmannElement], adim: int | None = None,
                   orientation: int = 1) -> "Metric":
        """Build from entries (row, col) with row < col, 1-based; the rest is implied."""
        adim = dim if adim is None else adim
        rows = [[GrassmannElement.zero(adim) for _ in range(dim)] for _ in range(dim)]
        for (r, c), v in upper.items():
            if not 1 <= r < c <= dim:
                raise InvalidMetric(f"entry ({r},{c}) must satisfy 1 <= row < col <= {dim}")
            v = v if isinstance(v, GrassmannElement) else GrassmannElement.scalar(adim, v)
            rows[r - 1][c - 1] = v
            rows[c - 1][r - 1] = -v
        return cls(EvenMatrix(rows), orientation)

    @classmethod
    def standard(cls, dim: int, adim: int | None = None, orientation: int = 1) -> "Metric":
        """Block-diagonal epsilon: g_{2k-1,2k} = 1."""
        return cls.from_upper(dim, {(2 * k + 1, 2 * k + 2): 1 for k in range(dim // 2)}, adim, orientation)

    @property
    def dim(self) -> int:
        return self.components.size

    @property
    def adim(self) -> int:
        return self.components.dim

    def __getitem__(self, ab):
        return self.components[ab]

    def upper(self) -> dict[tuple[int, int], GrassmannElement]:
        return {
            (a + 1, b + 1): self.components[a, b]
            for a in range(self.dim)
            for b in range(a + 1, self.dim)
            if self.components[a, b]
        }

    def embed(self, adim: int) -> "Metric":
        return Metric(self.components.map(lambda e: e.embed(adim)), self.orientation)

    def perturb(self, h: "CovariantTwoTensor", scale: GrassmannElement | Fraction = 1) -> "Metric":
        """g + scale * h (scale may be an even element such as a dual unit)."""
        if isinstance(scale, GrassmannElement):
            return Metric(EvenMatrix([[self[a, b] + scale * h[a, b] for b in range(self.dim)]
                                      for a in range(self.dim)]), self.orientation)
        return Metric(EvenMatrix([[self[a, b] + h[a, b].scale(scale) for b in range(self.dim)]
                                  for a in range(self.dim)]), self.orientation)

    @cached_property
    def inverse(self) -> EvenMatrix:
        return matrix_inverse(self.components)

    @cached_property
    def det(self) -> GrassmannElement:
        return matrix_det(self.components)

    @cached_property
    def sqrtdet(self) -> GrassmannElement:
        return pfaffian(self.components).scale(self.orientation)

    @cached_property
    def inv_sqrtdet(self) -> GrassmannElement:
        return GrassmannElement.scalar(self.adim, 1) / self.sqrtdet

    def __eq__(self, other):
        return isinstance(other, Metric) and self.components == other.components and self.orientation == other.orientation

    def __hash__(self):
        return hash((tuple(tuple(r) for r in self.components.entries), self.orientation))

    def __repr__(self):
        ups = ", ".join(f"g{a}{b}={v}" for (a, b), v in sorted(self.upper().items()))
        return f"Metric(dim={self.dim}, o={self.orientation}, {ups})"


def metric_validate(g: Metric | EvenMatrix, orientation: int = 1) -> ValidationReport:
    comps = g.components if isinstance(g, Metric) else g
    orient = g.orientation if isinstance(g, Metric) else orientation
    bad = []
    n = comps.size
    if n % 2:
        bad.append(f"odd dimension {n}")
    if orient not in (1, -1):
        bad.append("orientation must be +1 or -1")
    for a in range(n):
        for b in range(n):
            e = comps[a, b]
            if not e.is_even():
                bad.append(f"entry ({a + 1},{b + 1}) is not even")
            if e != -comps[b, a]:
                bad.append(f"entries ({a + 1},{b + 1}) and ({b + 1},{a + 1}) are not antisymmetric")
    if not bad:
        try:
            rational_inverse(comps.body())
        except GrassmannError:
            bad.append("body is singular")
    seen = []
    for v in bad:
        if v not in seen:
            seen.append(v)
    return ValidationReport(not seen, tuple(seen))


def require_valid(g: Metric) -> Metric:
    rep = metric_validate(g)
    if not rep.ok:
        raise InvalidMetric("; ".join(rep.violations))
    return g


def metric_inverse(g: Metric) -> EvenMatrix:
    return require_valid(g).inverse


def metric_det(g: Metric) -> GrassmannElement:
    return require_valid(g).det


def metric_sqrtdet(g: Metric) -> GrassmannElement:
    return require_valid(g).sqrtdet


def vector_inner_product(V: VectorField, W: VectorField, g: Metric) -> GrassmannElement:
    """(V, W)_g = V^a g_{ab} W^b."""
    if V.n != g.dim or W.n != g.dim:
        raise DimensionMismatch("field and metric dimensions differ")
    out = GrassmannElement.zero(g.adim)
    for a in range(g.dim):
        if not V.components[a]:
            continue
        for b in range(g.dim):
            if g[a, b] and W.components[b]:
                out = out + V.components[a] * g[a, b] * W.components[b]
    return out


@dataclass(frozen=True)
class CovariantTwoTensor:
    """Components S_{ab}(xi) of S_{ab} sigma^a sigma^b with a declared symmetry."""

    components: tuple[tuple[GrassmannElement, ...], ...]
    symmetry: str = "antisymmetric"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(tuple(r) for r in self.components))
        if self.symmetry not in ("antisymmetric", "symmetric", "none"):
            raise ValueError(f"unknown symmetry {self.symmetry!r}")
        n = len(self.components)
        for a in range(n):
            for b in range(n):
                x, y = self.components[a][b], self.components[b][a]
                if self.symmetry == "antisymmetric" and x != -y:
                    raise ValueError(f"entry ({a + 1},{b + 1}) violates antisymmetry")
                if self.symmetry == "symmetric" and x != y:
                    raise ValueError(f"entry ({a + 1},{b + 1}) violates symmetry")

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def adim(self) -> int:
        return self.components[0][0].dim

    def __getitem__(self, ab):
        a, b = ab
        return self.components[a][b]

    @classmethod
    def zero(cls, dim: int, adim: int | None = None) -> "CovariantTwoTensor":
        z = GrassmannElement.zero(dim if adim is None else adim)
        return cls(tuple(tuple(z for _ in range(dim)) for _ in range(dim)))

    @classmethod
    def from_metric(cls, g: Metric) -> "CovariantTwoTensor":
        return cls(g.components.entries)

    @classmethod
    def from_rows(cls, rows, symmetry: str = "none") -> "CovariantTwoTensor":
        return cls(tuple(tuple(r) for r in rows), symmetry)

    def antisymmetric_part(self) -> "CovariantTwoTensor":
        n = self.dim
        return CovariantTwoTensor(
            tuple(tuple((self[a, b] - self[b, a]).scale(Fraction(1, 2)) for b in range(n)) for a in range(n))
        )

    def symmetric_part(self) -> "CovariantTwoTensor":
        n = self.dim
        return CovariantTwoTensor(
            tuple(tuple((self[a, b] + self[b, a]).scale(Fraction(1, 2)) for b in range(n)) for a in range(n)),
            "symmetric",
        )

    def __add__(self, other):
        sym = self.symmetry if self.symmetry == other.symmetry else "none"
        return CovariantTwoTensor(
            tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(self.components, other.components)), sym
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "CovariantTwoTensor":
        return CovariantTwoTensor(tuple(tuple(x.scale(c) for x in r) for r in self.components), self.symmetry)

    def map(self, fn) -> "CovariantTwoTensor":
        return CovariantTwoTensor(tuple(tuple(fn(x) for x in r) for r in self.components), "none")

    def is_zero(self) -> bool:
        return not any(x for r in self.components for x in r)


def horizontal_lift(V: VectorField, S: CovariantTwoTensor) -> CovariantTwoTensor:
    """(V↑hor S)_{ab} = V(S_{ab}) + (-1)^{|V|} [S_{am} (V^m)_{,b} - S_{bm} (V^m)_{,a}]."""
    n = S.dim
    if V.n != n:
        raise DimensionMismatch("field and tensor dimensions differ")
    sign = -1 if V.parity else 1
    dV = [[V.components[m].derivative(b + 1) for b in range(n)] for m in range(n)]
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            acc = V(S[a, b])
            for m in range(n):
                if S[a, m] and dV[m][b]:
                    acc = acc + (S[a, m] * dV[m][b]).scale(sign)
                if S[b, m] and dV[m][a]:
                    acc = acc - (S[b, m] * dV[m][a]).scale(sign)
            row.append(acc)
        rows.append(row)
    sym = "antisymmetric" if S.symmetry == "antisymmetric" and V.parity == 0 else "none"
    try:
        return CovariantTwoTensor(tuple(tuple(r) for r in rows), sym)
    except ValueError:
        return CovariantTwoTensor(tuple(tuple(r) for r in rows), "none")


def vertical_lift(V: VectorField, T: CovariantTwoTensor) -> list[GrassmannElement]:
    """Contract one slot: c_b = V^a (T_{ab} - T_{ba}) / 2."""
    n = T.dim
    if V.n != n:
        raise DimensionMismatch("field and tensor dimensions differ")
    out = []
    for b in range(n):
        acc = GrassmannElement.zero(T.adim)
        for a in range(n):
            skew = (T[a, b] - T[b, a]).scale(Fraction(1, 2))
            if skew and V.components[a]:
                acc = acc + V.components[a] * skew
        out.append(acc)
    return out


def one_form(components: Sequence[GrassmannElement], n: int | None = None) -> PseudoForm:
    """The degree-one form c_a y^a."""
    n = len(components) if n is None else n
    adim = components[0].dim
    out = PseudoForm.zero(n, adim)
    for a, c in enumerate(components, 1):
        if c:
            out = out + PseudoForm.y(n, a, adim).lmul(c)
    return out


# Killing solver --------------------------------------------------------------------


@dataclass(frozen=True)
class KillingField:
    field: VectorField
    chi: GrassmannElement


def _field_from_vector(n: int, parity: int, x: Sequence[Fraction], masks: list[int]) -> VectorField:
    comps = []
    k = len(masks)
    for a in range(n):
        terms = {m: Fraction(c) for m, c in zip(masks, x[a * k:(a + 1) * k]) if c}
        comps.append(GrassmannElement._raw(n, terms))
    return VectorField(parity, comps, n)


def field_vector(V: VectorField) -> list[Fraction]:
    """Coefficient vector of V in the monomial basis used by the solver."""
    masks = monomial_masks(V.n, (V.parity + 1) % 2)
    return [c.coefficient(m) for c in V.components for m in masks]


def killing_residual(g: Metric, V: VectorField, chi: GrassmannElement | None = None) -> list[GrassmannElement]:
    """chi * g_{ab} - (V↑hor g)_{ab} for a < b."""
    lifted = horizontal_lift(V, CovariantTwoTensor.from_metric(g))
    out = []
    for a in range(g.dim):
        for b in range(a + 1, g.dim):
            r = -lifted[a, b]
            if chi is not None:
                r = r + chi * g[a, b]
            out.append(r)
    return out


def killing_solve(g: Metric, conformal: bool = False, parity: int = 0) -> list[KillingField]:
    """Exact basis of (conformal) Killing fields of the requested parity."""
    require_valid(g)
    if g.adim != g.dim:
        raise DimensionMismatch("Killing solver expects a metric without auxiliary generators")
    n = g.dim
    vmasks = monomial_masks(n, (parity + 1) % 2)
    cmasks = monomial_masks(n, parity) if conformal else []
    nv = n * len(vmasks)
    ncols = nv + len(cmasks)
    eq_masks = list(range(1 << n))
    columns = []
    for j in range(ncols):
        x = [Fraction(0)] * ncols
        x[j] = Fraction(1)
        V = _field_from_vector(n, parity, x[:nv], vmasks)
        chi = GrassmannElement._raw(n, {m: c for m, c in zip(cmasks, x[nv:]) if c}) if conformal else None
        res = killing_residual(g, V, chi)
        columns.append([r.coefficient(m) for r in res for m in eq_masks])
    rows = linalg.transpose(columns) if columns else []
    basis = linalg.nullspace(rows, ncols)
    out = []
    for x in basis:
        V = _field_from_vector(n, parity, x[:nv], vmasks)
        chi = GrassmannElement._raw(n, {m: c for m, c in zip(cmasks, x[nv:]) if c})
        out.append(KillingField(V, chi))
    return out


def killing_bound(dim: int) -> tuple[int, int]:
    """Upper bound (even, odd) on pure Killing dimensions on R^{0|dim}."""
    n = dim // 2
    return n * (2 * n + 1), 2 * n


def in_field_span(basis: Sequence[VectorField], V: VectorField) -> bool:
    if V.is_zero():
        return True
    vecs = [field_vector(B) for B in basis if B.parity == V.parity]
    v = field_vector(V)
    return linalg.in_span(vecs, v, len(v))


def pullback_metric(phi: Supermap, g: Metric) -> Metric:
    """(Φ*g)_{ab} = J^c_a g_{cd}(Ξ) J^d_b with J^c_a = ∂_a Ξ^c."""
    if phi.m != g.dim or phi.n != g.dim:
        raise DimensionMismatch("metric pull-back needs an equal-dimension map")
    extra = g.adim - g.dim
    imgs = phi.images(extra)
    J = phi.jacobian().map(lambda e: e.embed(g.adim))
    gp = g.components.map(lambda e: substitute(e, imgs))
    return Metric(J.transpose() @ gp @ J, g.orientation)
