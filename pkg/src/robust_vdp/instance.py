"""Instance documents: JSON parsing, validation and serialization.

An instance file bundles everything needed to pose one problem: the
dimension, the ordering cone, the scenario tree, the model family (given
explicitly or as node-wise marginals to expand) and the controlled problem
(tabulated strategies or explicit dynamics).  Rationals are encoded as
``"p/q"`` strings or integers; floating-point literals are rejected so
exactness survives the round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Optional

from .cones import COMPONENTWISE, DUAL, GENERATORS, HALFSPACE, Cone
from .engine import (
    DEFAULT_BUDGET,
    DYNAMICS,
    TABULATED,
    ControlledProblem,
    DynamicsSpec,
)
from .errors import InstanceError
from .exactlp import Vec, frac
from .rectangularity import rectangularize
from .trees import Model, ModelFamily, ScenarioTree

CURRENT_VERSION = 1


@dataclass(frozen=True)
class Options:
    budget: int = DEFAULT_BUDGET
    prune: bool = False
    seed: Optional[int] = None


@dataclass(frozen=True)
class ParsedInstance:
    problem: ControlledProblem
    options: Options


def _reject_float(s: str):
    raise ValueError(
        f"floating-point literal {s!r} is not allowed; use 'p/q' strings"
    )


def _load_json(text: str) -> Any:
    try:
        return json.loads(text, parse_float=_reject_float)
    except ValueError as e:
        raise InstanceError("/", f"not valid JSON: {e}") from e


def _frac_at(value, path: str) -> Fraction:
    try:
        return frac(value)
    except (ValueError, TypeError) as e:
        raise InstanceError(path, str(e)) from e


def _vec_at(value, path: str, dim: Optional[int] = None) -> Vec:
    if not isinstance(value, list):
        raise InstanceError(path, "expected a list of rationals")
    v = tuple(_frac_at(x, f"{path}/{i}") for i, x in enumerate(value))
    if dim is not None and len(v) != dim:
        raise InstanceError(path, f"expected dimension {dim}, got {len(v)}")
    return v


def _require(doc: Mapping, key: str, path: str):
    if key not in doc:
        raise InstanceError(path, f"missing required field {key!r}")
    return doc[key]


def _parse_cone(doc, dim: int, path: str) -> Cone:
    if not isinstance(doc, dict):
        raise InstanceError(path, "cone must be an object")
    kind = _require(doc, "kind", path)
    try:
        if kind == COMPONENTWISE:
            return Cone.componentwise(dim)
        if kind == HALFSPACE:
            return Cone.halfspace(_vec_at(_require(doc, "w", path), f"{path}/w", dim))
        if kind == DUAL:
            rows = _require(doc, "b", path)
            if not isinstance(rows, list) or not rows:
                raise InstanceError(f"{path}/b", "expected a nonempty list of rows")
            return Cone.from_duals(
                [_vec_at(r, f"{path}/b/{i}", dim) for i, r in enumerate(rows)]
            )
        if kind == GENERATORS:
            rows = _require(doc, "g", path)
            if not isinstance(rows, list) or not rows:
                raise InstanceError(f"{path}/g", "expected a nonempty list of rows")
            duals = doc.get("b")
            dual_rows = (
                [_vec_at(r, f"{path}/b/{i}", dim) for i, r in enumerate(duals)]
                if duals
                else None
            )
            return Cone.from_generators(
                [_vec_at(r, f"{path}/g/{i}", dim) for i, r in enumerate(rows)],
                duals=dual_rows,
            )
    except InstanceError:
        raise
    except ValueError as e:
        raise InstanceError(path, str(e)) from e
    raise InstanceError(f"{path}/kind", f"unknown cone kind {kind!r}")


def _parse_tree(doc, path: str) -> ScenarioTree:
    if not isinstance(doc, dict):
        raise InstanceError(path, "tree must be an object")
    horizon = _require(doc, "horizon", path)
    levels = _require(doc, "levels", path)
    children = _require(doc, "children", path)
    if not isinstance(levels, list) or not all(isinstance(l, list) for l in levels):
        raise InstanceError(f"{path}/levels", "expected a list of node-id lists")
    if not isinstance(children, dict):
        raise InstanceError(f"{path}/children", "expected an object")
    labels = doc.get("labels", {})
    if not isinstance(labels, dict):
        raise InstanceError(f"{path}/labels", "expected an object")
    known = {n for level in levels for n in level}
    for n, kids in children.items():
        if n not in known:
            raise InstanceError(f"{path}/children/{n}", "dangling node reference")
        for c in kids:
            if c not in known:
                raise InstanceError(
                    f"{path}/children/{n}", f"dangling node reference {c!r}"
                )
    try:
        return ScenarioTree(
            horizon=horizon,
            levels=tuple(tuple(l) for l in levels),
            children={n: tuple(kids) for n, kids in children.items()},
            labels=dict(labels),
        )
    except (ValueError, TypeError) as e:
        raise InstanceError(path, str(e)) from e


def _parse_transition_row(doc, tree: ScenarioTree, path: str) -> dict[str, Vec]:
    if not isinstance(doc, dict):
        raise InstanceError(path, "expected an object mapping nodes to rows")
    out = {}
    for n, row in doc.items():
        if n not in {x for t in range(tree.horizon) for x in tree.nodes_at(t)}:
            raise InstanceError(f"{path}/{n}", "dangling node reference")
        p = _vec_at(row, f"{path}/{n}", len(tree.children[n]))
        s = sum(p)
        if s != 1:
            raise InstanceError(f"{path}/{n}", f"sum {s} != 1")
        if any(x < 0 for x in p):
            raise InstanceError(f"{path}/{n}", "negative probability")
        out[n] = p
    return out


def _parse_models(doc, tree: ScenarioTree, path: str) -> ModelFamily:
    if not isinstance(doc, dict):
        raise InstanceError(path, "models must be an object")
    if ("explicit" in doc) == ("marginals" in doc):
        raise InstanceError(path, "exactly one of 'explicit' or 'marginals' required")
    if "marginals" in doc:
        marg = doc["marginals"]
        if not isinstance(marg, dict):
            raise InstanceError(f"{path}/marginals", "expected an object")
        parsed = {}
        for n, rows in marg.items():
            if not isinstance(rows, list) or not rows:
                raise InstanceError(
                    f"{path}/marginals/{n}", "expected a nonempty list of rows"
                )
            cand = []
            for i, row in enumerate(rows):
                p = _vec_at(row, f"{path}/marginals/{n}/{i}")
                s = sum(p)
                if s != 1:
                    raise InstanceError(f"{path}/marginals/{n}/{i}", f"sum {s} != 1")
                cand.append(p)
            parsed[n] = cand
        try:
            return rectangularize(tree, parsed)
        except ValueError as e:
            raise InstanceError(f"{path}/marginals", str(e)) from e
    rows = doc["explicit"]
    if not isinstance(rows, list):
        raise InstanceError(f"{path}/explicit", "expected a list of models")
    if not rows:
        raise InstanceError(f"{path}/explicit", "model family must be nonempty")
    models = []
    for i, m in enumerate(rows):
        mpath = f"{path}/explicit/{i}"
        if not isinstance(m, dict):
            raise InstanceError(mpath, "expected a model object")
        mid = _require(m, "id", mpath)
        transition = _parse_transition_row(
            _require(m, "transition", mpath), tree, f"{mpath}/transition"
        )
        models.append(Model(id=mid, transition=transition))
    try:
        return ModelFamily(tree=tree, models=tuple(models))
    except ValueError as e:
        raise InstanceError(f"{path}/explicit", str(e)) from e


def _parse_problem(doc, tree, family, cone, dim, budget, path: str) -> ControlledProblem:
    if not isinstance(doc, dict):
        raise InstanceError(path, "problem must be an object")
    mode = _require(doc, "mode", path)
    try:
        if mode == TABULATED:
            strat_doc = _require(doc, "strategies", path)
            if not isinstance(strat_doc, dict) or not strat_doc:
                raise InstanceError(
                    f"{path}/strategies", "expected a nonempty object"
                )
            strategies = {}
            for name, table in strat_doc.items():
                if not isinstance(table, dict):
                    raise InstanceError(
                        f"{path}/strategies/{name}", "expected leaf-to-loss object"
                    )
                strategies[name] = {
                    leaf: _vec_at(v, f"{path}/strategies/{name}/{leaf}", dim)
                    for leaf, v in table.items()
                }
            return ControlledProblem(
                tree=tree, family=family, cone=cone, mode=TABULATED,
                strategies=strategies, budget=budget,
            )
        if mode == DYNAMICS:
            initial = _require(doc, "initial_state", path)
            adm_doc = _require(doc, "admissible", path)
            if not isinstance(adm_doc, list) or not adm_doc:
                raise InstanceError(f"{path}/admissible", "expected a nonempty list")
            admissible = {}
            for i, row in enumerate(adm_doc):
                rp = f"{path}/admissible/{i}"
                ctrls = tuple(_require(row, "controls", rp))
                if not ctrls:
                    raise InstanceError(rp, "empty control set")
                admissible[(_require(row, "time", rp), _require(row, "state", rp))] = ctrls
            tr_doc = _require(doc, "transition", path)
            if not isinstance(tr_doc, list):
                raise InstanceError(f"{path}/transition", "expected a list")
            transition = {}
            for i, row in enumerate(tr_doc):
                rp = f"{path}/transition/{i}"
                key = (
                    _require(row, "time", rp),
                    _require(row, "state", rp),
                    _require(row, "control", rp),
                    _require(row, "label", rp),
                )
                transition[key] = _require(row, "next", rp)
            loss_doc = _require(doc, "loss", path)
            if not isinstance(loss_doc, dict) or not loss_doc:
                raise InstanceError(f"{path}/loss", "expected a nonempty object")
            loss = {
                s: _vec_at(v, f"{path}/loss/{s}", dim) for s, v in loss_doc.items()
            }
            dyn = DynamicsSpec(
                initial_state=initial, admissible=admissible,
                transition=transition, loss=loss,
            )
            return ControlledProblem(
                tree=tree, family=family, cone=cone, mode=DYNAMICS,
                dynamics=dyn, budget=budget,
            )
    except InstanceError:
        raise
    except ValueError as e:
        raise InstanceError(path, str(e)) from e
    raise InstanceError(f"{path}/mode", f"unknown problem mode {mode!r}")


def parse_document(text: str) -> ParsedInstance:
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise InstanceError("/", "top-level document must be an object")
    version = doc.get("version", CURRENT_VERSION)
    if version != CURRENT_VERSION:
        raise InstanceError("/version", f"unsupported version {version!r}")
    dim = _require(doc, "dimension", "/")
    if not isinstance(dim, int) or dim < 1:
        raise InstanceError("/dimension", "expected a positive integer")
    opts_doc = doc.get("options", {})
    if not isinstance(opts_doc, dict):
        raise InstanceError("/options", "expected an object")
    budget = opts_doc.get("budget", DEFAULT_BUDGET)
    if not isinstance(budget, int) or budget < 1:
        raise InstanceError("/options/budget", "expected a positive integer")
    prune = opts_doc.get("prune", False)
    if not isinstance(prune, bool):
        raise InstanceError("/options/prune", "expected a boolean")
    seed = opts_doc.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise InstanceError("/options/seed", "expected an integer")
    cone = _parse_cone(_require(doc, "cone", "/"), dim, "/cone")
    tree = _parse_tree(_require(doc, "tree", "/"), "/tree")
    family = _parse_models(_require(doc, "models", "/"), tree, "/models")
    try:
        problem = _parse_problem(
            _require(doc, "problem", "/"), tree, family, cone, dim, budget, "/problem"
        )
    except InstanceError:
        raise
    except ValueError as e:
        raise InstanceError("/problem", str(e)) from e
    return ParsedInstance(
        problem=problem, options=Options(budget=budget, prune=prune, seed=seed)
    )


def parse_instance(text: str) -> ControlledProblem:
    """Parse an instance document and return the validated problem."""
    return parse_document(text).problem


# ---------------------------------------------------------------------------
# serialization


def _rat(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _rat_vec(v) -> list:
    return [_rat(x) for x in v]


def _serialize_cone(cone: Cone) -> dict:
    if cone.kind == COMPONENTWISE:
        return {"kind": COMPONENTWISE}
    if cone.kind == HALFSPACE:
        return {"kind": HALFSPACE, "w": _rat_vec(cone.duals[0])}
    if cone.kind == DUAL:
        return {"kind": DUAL, "b": [_rat_vec(r) for r in cone.duals]}
    out = {"kind": GENERATORS, "g": [_rat_vec(r) for r in cone.generators]}
    if cone.duals is not None:
        out["b"] = [_rat_vec(r) for r in cone.duals]
    return out


def serialize_instance(inst: ParsedInstance) -> str:
    """Canonical JSON for a parsed instance; parse(serialize(x)) == x."""
    p = inst.problem
    tree = p.tree
    doc: dict[str, Any] = {
        "version": CURRENT_VERSION,
        "dimension": _problem_dim(p),
        "cone": _serialize_cone(p.cone),
        "tree": {
            "horizon": tree.horizon,
            "levels": [list(l) for l in tree.levels],
            "children": {n: list(kids) for n, kids in tree.children.items()},
        },
        "models": {
            "explicit": [
                {
                    "id": m.id,
                    "transition": {
                        n: _rat_vec(m.transition[n])
                        for t in range(tree.horizon)
                        for n in tree.nodes_at(t)
                    },
                }
                for m in p.family.models
            ]
        },
    }
    if tree.labels:
        doc["tree"]["labels"] = dict(tree.labels)
    if p.mode == TABULATED:
        doc["problem"] = {
            "mode": TABULATED,
            "strategies": {
                name: {leaf: _rat_vec(v) for leaf, v in table.items()}
                for name, table in p.strategies.items()
            },
        }
    else:
        dyn = p.dynamics
        doc["problem"] = {
            "mode": DYNAMICS,
            "initial_state": dyn.initial_state,
            "admissible": [
                {"time": t, "state": s, "controls": list(ctrls)}
                for (t, s), ctrls in dyn.admissible.items()
            ],
            "transition": [
                {"time": t, "state": s, "control": a, "label": lab, "next": nxt}
                for (t, s, a, lab), nxt in dyn.transition.items()
            ],
            "loss": {s: _rat_vec(v) for s, v in dyn.loss.items()},
        }
    doc["options"] = {"budget": inst.options.budget, "prune": inst.options.prune}
    if inst.options.seed is not None:
        doc["options"]["seed"] = inst.options.seed
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _problem_dim(p: ControlledProblem) -> int:
    if p.mode == TABULATED:
        table = next(iter(p.strategies.values()))
        return len(next(iter(table.values())))
    return len(next(iter(p.dynamics.loss.values())))
