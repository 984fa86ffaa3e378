"""Scenario-driven command-line front end.

Exit codes: 0 success, 2 when an asserted identity fails, 1 on input error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable

from . import gravity as grav
from . import linalg
from . import maxwell as mx
from .algebra import GrassmannError, GrassmannElement
from .cartan import PseudoForm, derham
from .riemann import in_field_span, killing_bound, killing_residual, killing_solve
from .serialize import (
    Scenario,
    ScenarioError,
    canonical_dumps,
    check_dimension,
    connection_to_json,
    curvature_to_json,
    digest,
    element_to_json,
    field_to_json,
    parse_scenario,
    potential_to_json,
    rational_to_json,
    scenario_to_json,
    tensor_to_json,
)
from .suites import SuiteReport, invariant_suite

COMMANDS = ("validate", "invariants", "killing", "maxwell", "charge", "stress-energy", "curvature", "einstein")
EXIT_OK, EXIT_INPUT, EXIT_IDENTITY = 0, 1, 2


class Report:
    def __init__(self, command: str, scenario: dict, seed: int | None):
        self.command = command
        self.seed = seed
        self.input_digest = digest(scenario)
        self.results: dict = {}
        self.checks = SuiteReport()

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.get(name).record(bool(ok), detail)

    @property
    def passed(self) -> bool:
        return self.checks.passed

    def to_json(self) -> dict:
        # a check that covered no cases asserts nothing and is left out
        checks = sorted((c.as_dict() for c in self.checks.checks if c.cases), key=lambda c: c["name"])
        failed = sum(1 for c in checks if c["status"] == "fail")
        return {
            "command": self.command,
            "input_digest": self.input_digest,
            "seed": self.seed,
            "results": self.results,
            "checks": checks,
            "summary": {"checks": len(checks), "passed": len(checks) - failed, "failed": failed},
        }


# commands ---------------------------------------------------------------------------


def _validate(sc: Scenario, rep: Report, args) -> None:
    present = [k for k in ("metric", "potential", "current", "connection") if getattr(sc, k) is not None]
    rep.results.update({"dimension": sc.dimension, "objects": present})
    if sc.metric is not None:
        rep.results["metric_pfaffian"] = element_to_json(sc.metric.sqrtdet)
    rep.check("dimension consistent", True)


def _invariants(sc: Scenario, rep: Report, args) -> None:
    cases = args.cases if args.cases is not None else int(sc.options.get("cases", 20))
    seed = rep.seed if rep.seed is not None else 0
    suite = invariant_suite(sc.dimension, seed, cases, sc.metric)
    rep.results.update({"dimension": sc.dimension, "cases": cases})
    rep.checks.extend(suite)


def _killing(sc: Scenario, rep: Report, args) -> None:
    g = sc.require("metric")
    conformal = bool(sc.options.get("conformal", False))
    out = {"conformal": conformal}
    fields = []
    for parity, label in ((0, "even"), (1, "odd")):
        basis = killing_solve(g, conformal, parity)
        out[f"{label}_dim"] = len(basis)
        out[f"{label}_basis"] = [
            {"field": field_to_json(k.field), "chi": element_to_json(k.chi)} if conformal else field_to_json(k.field)
            for k in basis
        ]
        for k in basis:
            ok = not any(killing_residual(g, k.field, k.chi if conformal else None))
            rep.check("Killing residual = 0", ok, f"{label} field")
        fields.extend(k.field for k in basis)
    be, bo = killing_bound(g.dim)
    out["bound"] = {"even": be, "odd": bo}
    if not conformal:
        rep.check("bound respected", out["even_dim"] <= be and out["odd_dim"] <= bo)
        for V in fields:
            for W in fields:
                rep.check("bracket closure", in_field_span(fields, V.bracket(W)))
    rep.results.update(out)


def _maxwell(sc: Scenario, rep: Report, args) -> None:
    g = sc.require("metric")
    J = sc.current
    sol = mx.maxwell_solve(J, g)
    M = mx.maxwell_operator(g)
    ncols = len(mx.potential_basis(g.dim))
    coclosed = True if J is None else mx.continuity_check(J, g)
    rep.results.update({
        "solution": {
            "status": sol.status,
            "particular": potential_to_json(sol.particular) if sol.particular is not None else None,
            "kernel": [potential_to_json(K) for K in sol.kernel],
            "kernel_dim": sol.kernel_dim,
        },
        "operator_rank": linalg.rank(M, ncols),
        "coclosed_currents_dim": len(linalg.nullspace(mx.codifferential_operator(g), ncols)),
        "current_coclosed": coclosed,
    })
    if sol.solved:
        rep.check("field equations hold", mx.field_equation_residual(sol.particular, J, g).is_zero())
        rep.check("action gradient vanishes", not any(mx.action_gradient(sol.particular, J, g)))
        rep.check("solvable implies co-closed", coclosed)
    kern = [mx.potential_vector(K) for K in sol.kernel]
    for m in range(1 << g.dim):
        if m.bit_count() % 2:
            continue
        qf = derham(PseudoForm.from_grassmann(GrassmannElement(g.dim, {m: 1})))
        if qf:
            v = mx.potential_vector(mx.Potential.from_form(qf))
            rep.check("gauge kernel contains Im Q", linalg.in_span(kern, v, ncols))


def _charge(sc: Scenario, rep: Report, args) -> None:
    g, J = sc.require("metric"), sc.require("current")
    out = {}
    for conv in ("bare", "normal"):
        c0, c1 = mx.grassmann_charge(J, g, conv)
        out[conv] = {"c0": rational_to_json(c0), "c1": rational_to_json(c1)}
        rep.check(f"charge conserved ({conv})", c1 == 0)
    rep.results["charge"] = out


def _stress_energy(sc: Scenario, rep: Report, args) -> None:
    g, A = sc.require("metric"), sc.require("potential")
    T = mx.stress_energy(A, g)
    Te = mx.stress_energy_explicit(A, g)
    on_shell = mx.field_equation_residual(A, None, g).is_zero()
    res = mx.conservation_residual(T, g)
    rep.results.update({
        "variational": tensor_to_json(T),
        "explicit": tensor_to_json(Te.antisymmetric_part()),
        "explicit_symmetric_part": tensor_to_json(Te.symmetric_part()),
        "explicit_normalization": rational_to_json(mx.EXPLICIT_NORMALIZATION),
        "on_shell": on_shell,
        "conservation_residual": [element_to_json(r) for r in res],
    })
    rep.check("explicit = variational (skew part)", Te.antisymmetric_part() == T)
    if on_shell:
        rep.check("conservation on-shell", not any(res))


def _curvature(sc: Scenario, rep: Report, args) -> None:
    g = sc.require("metric")
    lc = grav.levi_civita(g)
    C = sc.connection if sc.connection is not None else lc
    R = grav.curvature(C)
    ids = grav.frame_identity_report(C)
    torsion_free = not any(x for c in grav.torsion(C) for r in c for x in r)
    compatible = not any(grav.compatibility_residual(C, g))
    sym = grav.curvature_symmetries_check(C, g)
    scal = grav.ricci_scalar_of(C, g)
    h = (g.inv_sqrtdet * scal).berezin()
    simp = (g.inv_sqrtdet * grav.simplified_density(g, C)).berezin()
    rep.results.update({
        "christoffel": connection_to_json(C)["entries"],
        "riemann": curvature_to_json(R),
        "ricci_scalar": element_to_json(scal),
        "hilbert_action": rational_to_json(h),
        "simplified_action": rational_to_json(simp),
        "levi_civita": C == lc,
        "identities": {
            "ricci": "pass" if ids.ricci_zero else "fail",
            "bianchi": "pass" if ids.bianchi_zero else "fail",
            "torsion_free": "pass" if torsion_free else "fail",
            "metric_compatible": "pass" if compatible else "fail",
            "symmetry_1": "pass" if sym.first_holds else "fail",
            "symmetry_2": "pass" if sym.second_holds else "fail",
            "actions_agree": "pass" if h == simp else "fail",
        },
    })
    if g.dim <= 4:
        rep.results["symmetry_space"] = {
            "formula": grav.curvature_component_count(g.dim // 2),
            "computed": grav.symmetry_space_dimension(g.dim),
            "with_cyclic": grav.symmetry_space_dimension(g.dim, cyclic=True),
        }
    rep.check("Ricci identity", ids.ricci_zero)
    rep.check("Bianchi identity", ids.bianchi_zero)
    if C == lc:
        rep.check("torsion = 0", torsion_free)
        rep.check("metric compatibility", compatible)
        rep.check("curvature symmetry I", sym.first_holds)
        rep.check("curvature symmetry II", sym.second_holds)
        rep.check("hilbert = simplified action", h == simp)


def _einstein(sc: Scenario, rep: Report, args) -> None:
    g = sc.require("metric")
    T = mx.stress_energy(sc.potential, g) if sc.potential is not None else None
    grad = grav.hilbert_gradient(g)
    res = grav.einstein_residual(g, T)
    rep.results.update({
        "coefficients": [list(c) for c in grav.metric_coefficient_basis(g.dim)],
        "gradient": [rational_to_json(x) for x in grad],
        "residual": [rational_to_json(x) for x in res],
        "satisfied": not any(res),
        "coupled": T is not None,
    })
    if g.dim <= 2 or sc.options.get("cross_check", False):
        rep.check("R-form and G-form gradients agree", grav.hilbert_gradient(g, grav.hilbert_action_element) == grad)


HANDLERS: dict[str, Callable] = {
    "validate": _validate,
    "invariants": _invariants,
    "killing": _killing,
    "maxwell": _maxwell,
    "charge": _charge,
    "stress-energy": _stress_energy,
    "curvature": _curvature,
    "einstein": _einstein,
}


def run(command: str, scenario: Scenario, seed: int | None = None, args=None) -> Report:
    if command not in HANDLERS:
        raise ScenarioError(f"unknown command {command!r}")
    check_dimension(scenario)
    seed = seed if seed is not None else scenario.seed
    rep = Report(command, scenario_to_json(scenario), seed)
    HANDLERS[command](scenario, rep, args or argparse.Namespace(cases=None))
    return rep


# output -----------------------------------------------------------------------------


def _scalars(d: dict, prefix: str = ""):
    for k in sorted(d):
        v = d[k]
        if isinstance(v, (bool, int, str)) or v is None:
            yield f"{prefix}{k}", v
        elif isinstance(v, dict):
            yield from _scalars(v, f"{prefix}{k}.")


def emit_report(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return canonical_dumps(report)
    lines = []
    if "error" in report:
        lines.append(f"error: {report['error']}")
        lines.append(f"at: {report.get('path', '$')}")
        return "\n".join(lines) + "\n"
    lines.append(f"command: {report['command']}")
    lines.append(f"input: {report['input_digest']}")
    if report.get("seed") is not None:
        lines.append(f"seed: {report['seed']}")
    for k, v in _scalars(report["results"]):
        lines.append(f"  {k}: {str(v).lower() if isinstance(v, bool) else v}")
    s = report["summary"]
    if s["checks"] == 0:
        lines.append("0 checks")
    else:
        lines.append(f"{s['checks']} checks: {s['passed']} passed, {s['failed']} failed")
    for c in report["checks"]:
        if c["status"] == "fail":
            lines.append(f"first failure: {c['name']} ({c.get('first_failure', '')})")
            break
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="supergrass", description="Exact calculus on R^{0|n} driven by scenario files.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="scenario JSON file ('-' for stdin)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", choices=("json", "text"), default="json")
    p.add_argument("--cases", type=int)
    p.add_argument("--dim", type=int, help="dimension for 'invariants' without an input file")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.input is None:
            if args.command != "invariants" or args.dim is None:
                raise ScenarioError("--input is required (or --dim for invariants)")
            if args.dim < 1 or args.dim > 8:
                raise ScenarioError("--dim must be between 1 and 8", "--dim")
            sc = Scenario(args.dim)
        else:
            sc = parse_scenario(sys.stdin if args.input == "-" else args.input)
            if args.dim is not None and args.dim != sc.dimension:
                raise ScenarioError(f"--dim {args.dim} disagrees with scenario dimension {sc.dimension}", "--dim")
        rep = run(args.command, sc, args.seed, args)
    except ScenarioError as exc:
        sys.stdout.write(emit_report({"error": exc.reason, "path": exc.path}, args.out))
        print(f"supergrass: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GrassmannError as exc:
        sys.stdout.write(emit_report({"error": str(exc), "path": "$"}, args.out))
        print(f"supergrass: {exc}", file=sys.stderr)
        return EXIT_INPUT
    data = rep.to_json()
    sys.stdout.write(emit_report(data, args.out))
    return EXIT_OK if rep.passed else EXIT_IDENTITY


if __name__ == "__main__":
    sys.exit(main())
