"""Identity-verification suites over the Cartan calculus and Hodge theory.

Each suite returns a list of :class:`Check` records; a check passes when every
case it covers holds exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Sequence

from .cartan import (
    IntegralForm,
    PseudoForm,
    VectorField,
    berezin_pair,
    derham,
    euler,
    form_basis,
    inner_contract,
    lie_derivative,
    pullback,
    vector_field_basis,
)
from .hodge import (
    codifferential,
    codifferential_via_star,
    form_inner_product,
    hodge_star,
    hodge_star_back,
    laplace_derham,
)
from .riemann import Metric, pullback_metric
from . import sampling


@dataclass
class Check:
    name: str
    passed: bool = True
    cases: int = 0
    detail: str = ""

    def record(self, ok: bool, detail: str = "") -> None:
        self.cases += 1
        if not ok and self.passed:
            self.passed = False
            self.detail = detail or f"case {self.cases}"

    def as_dict(self) -> dict:
        out = {"name": self.name, "status": "pass" if self.passed else "fail", "cases": self.cases}
        if not self.passed:
            out["first_failure"] = self.detail
        return out


@dataclass
class SuiteReport:
    checks: list[Check] = field(default_factory=list)

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        c = Check(name)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def extend(self, other: "SuiteReport") -> "SuiteReport":
        for c in other.checks:
            mine = self.get(c.name)
            if not c.passed and mine.passed:
                mine.passed, mine.detail = False, c.detail
            mine.cases += c.cases
        return self


Operator = Callable[[object], object]


def graded_commutator(A: Operator, pa: int, B: Operator, pb: int) -> Operator:
    s = -1 if (pa * pb) % 2 else 1
    return lambda f: A(B(f)) - (B(A(f)) if s > 0 else -B(A(f)))


def _up(V):
    return lambda f: lie_derivative(V, f)


def _down(V):
    return lambda f: inner_contract(V, f)


# Cartan calculus --------------------------------------------------------------


def nilpotency(forms: Iterable, report: SuiteReport | None = None) -> SuiteReport:
    report = SuiteReport() if report is None else report
    chk = report.get("Q^2 = 0")
    for f in forms:
        chk.record(not derham(derham(f)), repr(f))
    return report


def commutator_table(forms: Sequence, fields: Sequence[VectorField], report: SuiteReport | None = None,
                     pairs: Iterable[tuple[VectorField, VectorField]] | None = None) -> SuiteReport:
    """The eight graded commutators of E, Q, V↑, V↓ applied to every form."""
    report = SuiteReport() if report is None else report
    E, Q = euler, derham
    for V in fields:
        pv = V.parity
        up, down = _up(V), _down(V)
        single = [
            ("[E,Q] = Q", graded_commutator(E, 0, Q, 1), Q),
            ("[E,V_up] = 0", graded_commutator(E, 0, up, pv), None),
            ("[E,V_down] = -V_down", graded_commutator(E, 0, down, pv + 1), lambda f: -down(f)),
            ("[V_up,Q] = 0", graded_commutator(up, pv, Q, 1), None),
            ("[V_down,Q] = V_up", graded_commutator(down, pv + 1, Q, 1), up),
        ]
        for f in forms:
            for name, lhs, rhs in single:
                val = lhs(f)
                report.get(name).record(val == (rhs(f) if rhs else val._like({})), f"V={V!r} f={f!r}")
    pair_iter = product(fields, fields) if pairs is None else pairs
    for V, W in pair_iter:
        pv, pw = V.parity, W.parity
        VW = V.bracket(W)
        table = [
            ("[V_up,W_up] = [V,W]_up", graded_commutator(_up(V), pv, _up(W), pw), _up(VW)),
            ("[V_down,W_down] = 0", graded_commutator(_down(V), pv + 1, _down(W), pw + 1), None),
            ("[V_up,W_down] = [V,W]_down", graded_commutator(_up(V), pv, _down(W), pw + 1), _down(VW)),
        ]
        for f in forms:
            for name, lhs, rhs in table:
                val = lhs(f)
                report.get(name).record(val == (rhs(f) if rhs else val._like({})), f"V={V!r} W={W!r} f={f!r}")
    return report


def stokes(pairs: Iterable[tuple[PseudoForm, IntegralForm]], report: SuiteReport | None = None) -> SuiteReport:
    """I[Q(f w)] = 0 and I[(Qf) w] = (-1)^{|f|+1} I[f Qw] for homogeneous f."""
    report = SuiteReport() if report is None else report
    one_cache: dict = {}
    for f, w in pairs:
        key = (f.n, f.adim)
        if key not in one_cache:
            one_cache[key] = PseudoForm.one(*key)
        total = berezin_pair(one_cache[key], derham(f * w))
        report.get("I[Q(f w)] = 0").record(total == 0, f"f={f!r} w={w!r}")
        p = f.parity
        if p is None:
            continue
        lhs = berezin_pair(derham(f), w)
        rhs = berezin_pair(f, derham(w))
        report.get("per-partes sign").record(lhs == (rhs if p else -rhs), f"f={f!r} w={w!r}")
    return report


# Hodge theory -----------------------------------------------------------------


def _homogeneous_degree_parts(f: PseudoForm):
    for k in sorted(f.degrees()):
        yield k, f.degree_part(k)


def hodge_round_trip(forms: Iterable[PseudoForm], g: Metric, report: SuiteReport | None = None) -> SuiteReport:
    report = SuiteReport() if report is None else report
    chk = report.get("** = (-1)^deg")
    for f in forms:
        for k, part in _homogeneous_degree_parts(f):
            back = hodge_star_back(hodge_star(part, g), g)
            chk.record(back == (-part if k % 2 else part), repr(part))
    return report


def _fhat_parities(w) -> set[tuple[int, int]]:
    return {(sum(e) % 2, m.bit_count() % 2) for e, m in w.terms}


def parity_table(forms: Iterable[PseudoForm], g: Metric, report: SuiteReport | None = None) -> SuiteReport:
    """*: preserves fiber-degree parity and Grassmann parity; Q after * flips both."""
    report = SuiteReport() if report is None else report
    keep = report.get("star preserves parities")
    flip = report.get("Q star flips parities")
    for f in forms:
        for _, part in _homogeneous_degree_parts(f):
            for p in (0, 1):
                piece = part.part(p)
                if not piece:
                    continue
                src = _fhat_parities(piece)
                s = hodge_star(piece, g)
                keep.record(_fhat_parities(s) <= src, repr(piece))
                q = derham(s)
                flipped = {(a ^ 1, b ^ 1) for a, b in src}
                flip.record(_fhat_parities(q) <= flipped, repr(piece))
    return report


def dual_route(forms: Iterable[PseudoForm], g: Metric, report: SuiteReport | None = None) -> SuiteReport:
    report = SuiteReport() if report is None else report
    chk = report.get("codifferential coordinate = (-1)^deg *Q*")
    for f in forms:
        chk.record(codifferential(f, g) == codifferential_via_star(f, g), repr(f))
    return report


def adjointness(pairs: Iterable[tuple[PseudoForm, PseudoForm]], g: Metric,
                report: SuiteReport | None = None) -> SuiteReport:
    """<Qf,h> = (-1)^{|f|} <f, delta h> and <Delta f, h> = <f, Delta h>."""
    report = SuiteReport() if report is None else report
    adj = report.get("<Qf,h> = (-1)^|f| <f,delta h>")
    sa = report.get("<Delta f,h> = <f,Delta h>")
    for f, h in pairs:
        p = f.parity
        if p is not None:
            lhs = form_inner_product(derham(f), h, g)
            rhs = form_inner_product(f, codifferential(h, g), g)
            adj.record(lhs == (-rhs if p else rhs), f"f={f!r} h={h!r}")
        a = form_inner_product(laplace_derham(f, g), h, g)
        b = form_inner_product(f, laplace_derham(h, g), g)
        sa.record(a == b, f"f={f!r} h={h!r}")
    return report


def naturality(cases: Iterable[tuple[object, PseudoForm]], g: Metric, report: SuiteReport | None = None,
               codiff: bool = True) -> SuiteReport:
    """star and delta commute with pull-back along orientation-preserving supermaps."""
    report = SuiteReport() if report is None else report
    st = report.get("star natural")
    cd = report.get("codifferential natural")
    for phi, f in cases:
        gp = pullback_metric(phi, g)
        st.record(hodge_star(pullback(phi, f), gp) == pullback(phi, hodge_star(f, g)), repr(f))
        if codiff:
            cd.record(codifferential(pullback(phi, f), gp) == pullback(phi, codifferential(f, g)), repr(f))
    return report


# assembled suites ---------------------------------------------------------------


def basis_forms(dim: int, degrees: Sequence[int] = (0, 1, 2, 3)) -> list[PseudoForm]:
    return [f for k in degrees for f in form_basis(dim, k)]


def basis_integral_forms(dim: int, degrees: Sequence[int] = (0, 1, 2, 3)) -> list[IntegralForm]:
    return [f for k in degrees for f in form_basis(dim, k, kind=IntegralForm)]


def basis_fields(dim: int) -> list[VectorField]:
    return vector_field_basis(dim, 0) + vector_field_basis(dim, 1)


def random_homogeneous(rng: random.Random, dim: int, degrees=(0, 1, 2), kind=PseudoForm):
    p = rng.randint(0, 1)
    gen = sampling.pseudo_form if kind is PseudoForm else sampling.integral_form
    return gen(rng, dim, degrees, p, density=0.4)


def invariant_suite(dim: int, seed: int, cases: int = 20, metric: Metric | None = None) -> SuiteReport:
    """Randomized Cartan, Stokes and (for even dim) Hodge identities on R^{0|dim}."""
    rng = random.Random(seed)
    rep = SuiteReport()
    forms = [random_homogeneous(rng, dim) for _ in range(cases)]
    iforms = [random_homogeneous(rng, dim, kind=IntegralForm) for _ in range(cases)]
    nilpotency(forms + iforms, rep)
    fields = [sampling.vector_field(rng, dim, i % 2) for i in range(4)]
    commutator_table(forms, [fields[i % 4] for i in range(2)], rep, pairs=[(fields[0], fields[1]), (fields[2], fields[3]), (fields[1], fields[2])])
    stokes(zip(forms, iforms), rep)
    if dim % 2 == 0 and dim > 0:
        g = sampling.metric(rng, dim) if metric is None else metric
        hodge_round_trip(forms, g, rep)
        parity_table(forms, g, rep)
        dual_route(forms, g, rep)
        adjointness(list(zip(forms, forms[1:] + forms[:1])), g, rep)
        naturality([(sampling.linear_supermap(rng, dim), f) for f in forms[: max(1, cases // 4)]], g, rep)
    return rep
