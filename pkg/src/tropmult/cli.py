"""Command line interface: ``tropmult validate|mult|gw|check|gen``.

Exit codes: 0 success, 1 malformed input, 2 precondition failure, 3 internal
invariant violation (including a failed property suite).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__, fixtures
from .checks import DEFAULT_CASES, SUITE_NAMES, run_suites
from .constraints import codim_total, rigidity_dimension_check
from .document import dumps, encode_rational, loads
from .errors import InvariantViolation, MalformedInput, TropMultError
from .fixtures import Problem
from .mult_bracket import mult_bracket
from .mult_index import mult, rank_defect
from .splitting import mult_split
from .trqft import mult_trqft
from .tropical_curve import automorphism_order, expected_dimension, first_betti, psi_check, validate, vertex_multinomial

METHODS = ("det", "trqft", "trqft-tree", "box", "bracket", "split")


def read_problem(path: str) -> Problem:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise MalformedInput(f"{path}: {exc.strerror}") from None
    return loads(text, path)


def compute(problem: Problem, method: str, sink: str | None = None, edge: str | None = None) -> int:
    args = problem.args
    if method == "det":
        return mult(*args)
    if method == "trqft":
        return mult_trqft(*args, mode="midpoint")
    if method == "trqft-tree":
        return mult_trqft(*args, mode="tree", sink=sink)
    if method == "box":
        return mult_trqft(*args, mode="box", sink=sink)
    if method == "bracket":
        return mult_bracket(*args, sink=sink)
    if method == "split":
        return mult_split(*args, edge=edge)
    raise MalformedInput(f"unknown method {method!r}")


def gw_contribution(problem: Problem) -> Fraction:
    """``Mult / |Aut| * prod <V>`` for one rigid curve."""
    c, A, psi = problem.args
    value = Fraction(mult(c, A, psi), automorphism_order(c))
    for v in c.vertex_ids:
        value *= vertex_multinomial(c, psi, v)
    return value


def validation_report(problem: Problem) -> dict:
    c, A, psi = problem.args
    messages = validate(c)
    report: dict = {"valid": not messages, "messages": messages}
    if messages:
        return report
    report["first_betti"] = first_betti(c)
    report["expected_dimension"] = expected_dimension(c)
    try:
        report["constraint_codimension"] = codim_total(c, A)
        report["psi"] = {v: {"overvalence": s.overvalence, "demand": s.demand, "ok": s.ok}
                         for v, s in psi_check(c, psi).items()}
        report["dimension_match"] = rigidity_dimension_check(c, A, psi)
        report["kernel_rank"] = rank_defect(c, A)
        report["rigid"] = report["dimension_match"] and report["kernel_rank"] == 0
    except TropMultError as exc:
        report["valid"] = False
        report["messages"] = [str(exc)]
    return report


# ---------------------------------------------------------------------------
# commands


def cmd_validate(ns: argparse.Namespace) -> int:
    report = validation_report(read_problem(ns.file))
    print(json.dumps(report, indent=2))
    return 0 if report["valid"] else 2


def cmd_mult(ns: argparse.Namespace) -> int:
    print(compute(read_problem(ns.file), ns.method, ns.sink, ns.edge))
    return 0


def cmd_gw(ns: argparse.Namespace) -> int:
    total = Fraction(0)
    for path in ns.files:
        total += gw_contribution(read_problem(path))
    print(encode_rational(total))
    return 0


def cmd_check(ns: argparse.Namespace) -> int:
    results = run_suites(ns.suite, seed=ns.seed, cases=ns.cases)
    if ns.json:
        print(json.dumps([r.to_json() for r in results], indent=2))
    else:
        for r in results:
            print("\n".join(r.lines()))
            print(f"{'PASS' if r.ok else 'FAIL'} {r.name} ({r.seconds:.2f} s)")
    return 0 if all(r.ok for r in results) else InvariantViolation.exit_code


def _generate(ns: argparse.Namespace) -> Problem:
    name = ns.fixture
    if name == "tripod":
        return fixtures.tripod()
    if name == "e1":
        return fixtures.e1()
    if name == "e2":
        return fixtures.e2(ns.w)
    if name == "genus1":
        params = ns.params or [1, 1, 1, 2, 1, 3]
        if len(params) != 6:
            raise MalformedInput("genus1 takes six parameters a b c d e f")
        return fixtures.genus1(*params)
    if name == "genus1-point":
        params = ns.params or [1, 2]
        if len(params) != 2:
            raise MalformedInput("genus1-point takes two parameters c d")
        return fixtures.genus1_point(*params)
    if name == "conic":
        return fixtures.conic()
    rng = random.Random(ns.seed)
    if name == "theta":
        if ns.shape is None:
            return fixtures.random_theta(rng, omega_scale=ns.omega).problem
        try:
            shape = json.loads(ns.shape)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"--shape: {exc.msg}") from None
        return fixtures.random_theta(rng, shape=shape, omega_scale=ns.omega).problem
    if name == "tree":
        return fixtures.random_rigid_tree(rng, ns.rank)
    if name == "planar":
        return fixtures.random_planar_trivalent(rng)
    raise MalformedInput(f"unknown fixture {name!r}")  # pragma: no cover - argparse choices


def cmd_gen(ns: argparse.Namespace) -> int:
    sys.stdout.write(dumps(_generate(ns)))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropmult", description="Exact multiplicities of rigid tropical curves.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a curve document and report rigidity data")
    v.add_argument("file", help="JSON document, or - for stdin")
    v.set_defaults(func=cmd_validate)

    m = sub.add_parser("mult", help="compute the multiplicity of a rigid curve")
    m.add_argument("file")
    m.add_argument("--method", choices=METHODS, default="det")
    m.add_argument("--sink", help="sink vertex for trqft-tree, box and bracket")
    m.add_argument("--edge", help="compact edge for the split method (default: product formula)")
    m.set_defaults(func=cmd_mult)

    g = sub.add_parser("gw", help="sum Mult/|Aut| times the psi multinomials over curves")
    g.add_argument("files", nargs="+")
    g.set_defaults(func=cmd_gw)

    c = sub.add_parser("check", help="run seeded algebraic property suites")
    c.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cases", type=int, default=DEFAULT_CASES)
    c.add_argument("--json", action="store_true", help="machine-readable report")
    c.set_defaults(func=cmd_check)

    f = sub.add_parser("gen", help="emit a named fixture or a random rigid curve as JSON")
    f.add_argument("fixture", choices=("tripod", "e1", "e2", "genus1", "genus1-point", "conic", "theta", "tree", "planar"))
    f.add_argument("--w", type=int, default=2, help="edge weight for e2")
    f.add_argument("--params", type=int, nargs="+", help="integer parameters for genus1 / genus1-point")
    f.add_argument("--omega", type=int, default=1, help="skew form scale for theta")
    f.add_argument("--shape", help='theta subtrees as JSON, e.g. \'[["I","J"],"J"]\'')
    f.add_argument("--rank", type=int, default=2, help="ambient rank for tree")
    f.add_argument("--seed", type=int, default=0)
    f.set_defaults(func=cmd_gen)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except TropMultError as exc:
        print(f"tropmult: error: {exc}", file=sys.stderr)
        return exc.exit_code

