"""Command-line interface.

Exit codes: 0 when every requested check passes, 1 when a checked relation
fails, 2 on input or validation errors, 3 when an exact computation is
refused (budget exceeded) or a required supremum does not exist.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import Optional

from .cones import Cone, DimensionMismatchError, RepresentationError
from .engine import upper_image
from .errors import (
    DeskScaleExceededError,
    DualNotLIError,
    InstanceError,
    SupNotExistsError,
    UnsupportedConeError,
)
from .instance import (
    ParsedInstance,
    _parse_cone,
    _problem_dim,
    parse_document,
)
from .rectangularity import (
    check_preorder_rectangularity,
    is_m_rectangular,
    random_terminal_vectors,
)
from .render import (
    compute_results,
    emit_bellman,
    emit_tables,
    fmt_set,
    fmt_vec,
    results_to_json,
)
from .suprema import NON_UNIQUE, NOT_EXISTS, vsup
from .trees import AdaptedVector
from .exactlp import frac

EXIT_OK = 0
EXIT_RELATION_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_SCALE_OR_SUP = 3

BUDGET_ENV = "ROBUST_VDP_BUDGET"


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise InstanceError(path, f"cannot read file: {e.strerror}") from e


def _effective_budget(args, inst: ParsedInstance) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get(BUDGET_ENV)
    if env is not None:
        try:
            budget = int(env)
        except ValueError:
            raise InstanceError(BUDGET_ENV, f"not an integer: {env!r}")
        if budget < 1:
            raise InstanceError(BUDGET_ENV, "budget must be positive")
        return budget
    return inst.options.budget


def _load_problem(args):
    inst = parse_document(_read(args.instance))
    budget = _effective_budget(args, inst)
    problem = dataclasses.replace(inst.problem, budget=budget)
    return problem, inst


def _print(args, text: str, payload: Optional[dict] = None):
    if args.format == "json":
        print(json.dumps(payload if payload is not None else {"text": text},
                         ensure_ascii=False, indent=2))
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    problem, inst = _load_problem(args)
    prune = args.prune or inst.options.prune
    results = compute_results(problem, prune=prune)
    if args.format == "json":
        _print(args, "", results_to_json(problem, results))
        return EXIT_OK
    if args.time is not None:
        t = args.time
        if not 0 <= t <= problem.tree.horizon:
            raise InstanceError("--time", f"time {t} outside 0..{problem.tree.horizon}")
        lines = []
        for (node, state), vals in results.v[t].items():
            lines.append(f"V{t}({node}|{state}) = {fmt_set(vals)}")
        _print(args, "\n".join(lines) + "\n")
        return EXIT_OK
    _print(args, emit_tables(problem, results))
    return EXIT_OK


def cmd_check_bellman(args) -> int:
    problem, _ = _load_problem(args)
    results = compute_results(problem)
    report = results.report
    if args.format == "json":
        _print(args, "", results_to_json(problem, results)["bellman"])
    else:
        _print(args, emit_bellman(report))
    ok = report.weak_ok and report.strong_ok and report.equality_ok
    return EXIT_OK if ok else EXIT_RELATION_FAILED


def cmd_rect(args) -> int:
    problem, inst = _load_problem(args)
    tree, family, cone = problem.tree, problem.family, problem.cone
    structural = is_m_rectangular(family)
    seed = args.seed if args.seed is not None else (inst.options.seed or 0)
    if args.test_vectors:
        doc = json.loads(_read(args.test_vectors))
        vectors = [
            AdaptedVector(
                tree.horizon,
                {n: tuple(frac(x) for x in v) for n, v in entry.items()},
            )
            for entry in doc
        ]
    else:
        dim = _problem_dim(problem)
        vectors = random_terminal_vectors(tree, dim, args.random, seed)
    report = check_preorder_rectangularity(cone, tree, family, vectors, seed=seed)
    ok = structural and report.rectangular_on_sample and report.reverse_ok
    if args.format == "json":
        _print(args, "", {
            "m_rectangular": structural,
            "rectangular_on_sample": report.rectangular_on_sample,
            "reverse_ok": report.reverse_ok,
            "summary": report.summary(),
        })
    else:
        lines = [
            "marginal-rectangular: " + ("yes" if structural else "no"),
            "empirical check: " + report.summary(),
            "reverse inclusion (always required): "
            + ("holds" if report.reverse_ok else "FAILS"),
        ]
        _print(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_RELATION_FAILED


def cmd_vsup(args) -> int:
    cone_doc = json.loads(_read(args.cone))
    points_doc = json.loads(_read(args.points))
    if not isinstance(points_doc, list) or not points_doc:
        raise InstanceError(args.points, "expected a nonempty list of vectors")
    points = [tuple(frac(x) for x in row) for row in points_doc]
    dim = len(points[0])
    cone = _parse_cone(cone_doc, dim, "/")
    res = vsup(cone, points)
    if args.format == "json":
        payload = {"status": res.status}
        for name in ("value", "alternative", "undominated", "candidate"):
            v = getattr(res, name)
            if v is not None:
                payload[name] = [str(x) for x in v]
        _print(args, "", payload)
    else:
        lines = [f"status: {res.status}"]
        if res.status == NOT_EXISTS:
            lines.append(f"candidate: {fmt_vec(res.candidate)}")
            lines.append(f"undominated point: {fmt_vec(res.undominated)}")
        else:
            lines.append(f"value: {fmt_vec(res.value)}")
            if res.status == NON_UNIQUE:
                lines.append(f"alternative: {fmt_vec(res.alternative)}")
        _print(args, "\n".join(lines) + "\n")
    return EXIT_SCALE_OR_SUP if res.status == NOT_EXISTS else EXIT_OK


def cmd_pareto(args) -> int:
    problem, _ = _load_problem(args)
    t = args.time if args.time is not None else 0
    gens = upper_image(problem, t)
    if args.format == "json":
        _print(args, "", {
            f"{node}|{state}": [[str(x) for x in v] for v in vals]
            for (node, state), vals in gens.items()
        })
    else:
        lines = [
            f"P{t}({node}|{state}) = {fmt_set(vals)}"
            for (node, state), vals in gens.items()
        ]
        _print(args, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robust-vdp",
        description="Set-valued dynamic programming for robust "
        "multi-objective control on scenario trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--time", type=int, default=None)
        p.add_argument("--prune", action="store_true")
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("solve", help="compute and print all value sets")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check-bellman", help="verify the Bellman relations")
    common(p)
    p.set_defaults(func=cmd_check_bellman)

    p = sub.add_parser("rect", help="check rectangularity of the model family")
    common(p)
    p.add_argument("--test-vectors", default=None, help="JSON file of terminal vectors")
    p.add_argument("--random", type=int, default=20, metavar="N")
    p.set_defaults(func=cmd_rect)

    p = sub.add_parser("vsup", help="supremum of a finite vector collection")
    common(p, instance=False)
    p.add_argument("--cone", required=True, help="cone JSON file")
    p.add_argument("--points", required=True, help="JSON file: list of vectors")
    p.set_defaults(func=cmd_vsup)

    p = sub.add_parser("pareto", help="Pareto generators of the upper image")
    common(p)
    p.set_defaults(func=cmd_pareto)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        InstanceError,
        UnsupportedConeError,
        DualNotLIError,
        RepresentationError,
        DimensionMismatchError,
        json.JSONDecodeError,
        ValueError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (DeskScaleExceededError, SupNotExistsError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCALE_OR_SUP


if __name__ == "__main__":
    sys.exit(main())
