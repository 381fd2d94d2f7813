"""Command-line interface.

Every subcommand loads its inputs, calls one library function through a
``*_doc`` helper and prints the returned document with ``documents.dumps``.
The helpers are public so a library caller can produce byte-identical output.

Exit codes: 0 success, 1 invalid input, 2 computation failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bmr import (
    VARIANTS,
    EvidentialModel,
    interval_estimate,
    learn_model,
    load_training_csv,
    point_estimate,
    predict_belief,
)
from .combination import conjunctive_combine, dempster_combine, dempster_condition, geometric_condition
from .documents import (
    dumps,
    family_from_doc,
    load_json,
    mass_from_doc,
    mass_to_doc,
    partition_to_doc,
    problem_from_doc,
)
from .errors import ComputationError, EvidentialError, UnsolvedInstanceError, ValidationError
from .frame_core import MassFunction, belief, plausibility
from .frames_algebra import is_independent_IF, lattice_relations, maximal_coarsening, minimal_refinement
from .geometry import credal_vertices
from .selftest import replay
from .total_belief import TotalBeliefProblem, solve_total, verify_total
from .transforms import pignistic, relative_belief, relative_plausibility

EXIT_OK, EXIT_INVALID, EXIT_COMPUTE = 0, 1, 2


def _conflict_doc(kappa: float) -> dict:
    weight = None if kappa >= 1.0 else float(-np.log1p(-kappa))
    return {"kappa": kappa, "weight": weight}


def combine_doc(ms: Sequence[MassFunction], rule: str = "dempster") -> dict:
    """Left fold of the chosen rule with per-step and total conflict."""
    if len(ms) < 2:
        raise ValidationError("combine needs at least two mass functions")
    acc = ms[0]
    steps = []
    for m in ms[1:]:
        if rule == "dempster":
            acc, report = dempster_combine(acc, m)
            steps.append(report.kappa)
        elif rule == "conjunctive":
            before = acc.empty_mass
            acc = conjunctive_combine(acc, m)
            # share of the remaining non-empty mass lost at this step
            steps.append(0.0 if before >= 1.0 else (acc.empty_mass - before) / (1.0 - before))
        else:
            raise ValidationError(f"unknown rule {rule!r}")
    weights = [_conflict_doc(k)["weight"] for k in steps]
    total = None if any(w is None for w in weights) else float(sum(weights))
    return {
        "result": mass_to_doc(acc),
        "conflict": {"steps": [_conflict_doc(k) for k in steps], "total_weight": total},
    }


def transform_doc(m: MassFunction, method: str = "pignistic") -> dict:
    fn = {"pignistic": pignistic, "relpl": relative_plausibility, "relbel": relative_belief}.get(method)
    if fn is None:
        raise ValidationError(f"unknown method {method!r}")
    p = fn(m)
    return {"frame": list(p.frame.labels), "method": method, "probabilities": [float(x) for x in p.probs]}


def condition_doc(m: MassFunction, on: Sequence[str], rule: str = "dempster") -> dict:
    fn = {"dempster": dempster_condition, "geometric": geometric_condition}.get(rule)
    if fn is None:
        raise ValidationError(f"unknown conditioning rule {rule!r}")
    return {"condition": list(on), "rule": rule, "result": mass_to_doc(fn(m, on))}


def credal_doc(m: MassFunction, what: str = "vertices") -> dict:
    labels = list(m.frame.labels)
    if what == "vertices":
        verts = credal_vertices(m).unique()
        return {"frame": labels, "vertices": [[float(x) for x in v] for v in verts]}
    if what == "interval":
        return {
            "frame": labels,
            "interval": {lab: [belief(m, 1 << i), plausibility(m, 1 << i)] for i, lab in enumerate(labels)},
        }
    raise ValidationError(f"unknown credal output {what!r}")


def frames_doc(frames: list, op: str) -> dict:
    if op == "minref":
        mr = minimal_refinement(frames)
        return {
            "op": op,
            "partition": partition_to_doc(mr.partition),
            "refinings": [[list(mr.partition.frame.labels_of(img)) for img in r.images] for r in mr.refinings],
        }
    if op == "maxcoa":
        return {"op": op, "partition": partition_to_doc(maximal_coarsening(frames))}
    if op == "independent":
        res = is_independent_IF(frames)
        return {"op": op, "independent": res.independent, "witness": list(res.witness) if res.witness else None}
    if op == "relations":
        return {"op": op, "relations": lattice_relations(frames).as_dict()}
    raise ValidationError(f"unknown frames operation {op!r}")


def totalbel_doc(problem: TotalBeliefProblem, verify: bool = False, threads: int = 1) -> dict:
    total, solutions = solve_total(problem, threads=threads)
    fine = problem.fine
    doc = {
        "total": mass_to_doc(total),
        "cells": [
            {
                "prior_focal": list(problem.coarse.labels_of(E)),
                "strategy": s.strategy,
                "solution": [
                    {"set": list(fine.labels_of(c.mask)), "mass": float(x)} for c, x in zip(s.columns, s.masses)
                ],
            }
            for E, s in sorted(solutions.items())
        ],
    }
    if verify:
        rep = verify_total(total, problem)
        doc["verification"] = {"passed": rep.passed, "messages": rep.messages}
    return doc


def bmr_predict_doc(model: EvidentialModel, features: Sequence[float], variant: str = "dirichlet") -> dict:
    est = predict_belief(model, features, variant)
    return {
        "variant": variant,
        "conflict": est.conflict,
        "belief": mass_to_doc(est.mass),
        "point": [float(x) for x in point_estimate(est, model)],
        "interval": [[float(lo), float(hi)] for lo, hi in interval_estimate(est, model)],
        "notes": list(est.notes),
    }


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from None


def _emit(doc: dict, out: str | None) -> None:
    text = dumps(doc) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _mass(path: str) -> MassFunction:
    return mass_from_doc(load_json(path))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="evidential", description="Finite-frame belief function toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads where supported")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("combine", help="combine mass functions")
    c.add_argument("--rule", choices=("dempster", "conjunctive"), default="dempster")
    c.add_argument("files", nargs="+")
    c.add_argument("-o", "--output")

    t = sub.add_parser("transform", help="probability transform of a mass function")
    t.add_argument("--method", choices=("pignistic", "relpl", "relbel"), default="pignistic")
    t.add_argument("file")
    t.add_argument("-o", "--output")

    k = sub.add_parser("condition", help="condition a mass function on an event")
    k.add_argument("--on", required=True, help="comma-separated labels")
    k.add_argument("--rule", choices=("dempster", "geometric"), default="dempster")
    k.add_argument("file")
    k.add_argument("-o", "--output")

    v = sub.add_parser("credal", help="credal set of a mass function")
    g = v.add_mutually_exclusive_group()
    g.add_argument("--vertices", action="store_const", dest="what", const="vertices")
    g.add_argument("--interval", action="store_const", dest="what", const="interval")
    v.add_argument("file")
    v.add_argument("-o", "--output")

    f = sub.add_parser("frames", help="operations on a family of partitions")
    f.add_argument("--op", choices=("minref", "maxcoa", "independent", "relations"), required=True)
    f.add_argument("file")
    f.add_argument("-o", "--output")

    b = sub.add_parser("totalbel", help="solve a restricted total belief problem")
    b.add_argument("file")
    b.add_argument("--verify", action="store_true")
    b.add_argument("-o", "--output")

    r = sub.add_parser("bmr-train", help="learn an evidential model from a CSV")
    r.add_argument("file")
    r.add_argument("--clusters", required=True, help="one count, or one per feature")
    r.add_argument("--m-theta", type=float, default=None)
    r.add_argument("--raw-density", action="store_true", help="ignore mixture weights in likelihoods")
    r.add_argument("-o", "--output")

    q = sub.add_parser("bmr-predict", help="estimate a pose from feature values")
    q.add_argument("model")
    q.add_argument("--features", required=True)
    q.add_argument("--variant", choices=VARIANTS, default="dirichlet")
    q.add_argument("-o", "--output")

    sub.add_parser("examples", help="replay the bundled worked examples")
    return p


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "combine":
        _emit(combine_doc([_mass(x) for x in args.files], args.rule), args.output)
    elif cmd == "transform":
        _emit(transform_doc(_mass(args.file), args.method), args.output)
    elif cmd == "condition":
        on = [x.strip() for x in args.on.split(",") if x.strip()]
        _emit(condition_doc(_mass(args.file), on, args.rule), args.output)
    elif cmd == "credal":
        _emit(credal_doc(_mass(args.file), args.what or "vertices"), args.output)
    elif cmd == "frames":
        _emit(frames_doc(family_from_doc(load_json(args.file)), args.op), args.output)
    elif cmd == "totalbel":
        doc = totalbel_doc(problem_from_doc(load_json(args.file)), args.verify, args.threads)
        _emit(doc, args.output)
        if args.verify and not doc["verification"]["passed"]:
            print("verification failed: " + "; ".join(doc["verification"]["messages"]), file=sys.stderr)
            return EXIT_COMPUTE
    elif cmd == "bmr-train":
        ks = _ints(args.clusters)
        model = learn_model(
            load_training_csv(args.file),
            ks[0] if len(ks) == 1 else ks,
            seed=args.seed,
            m_theta=args.m_theta,
            weighted=not args.raw_density,
        )
        _emit(model.to_dict(), args.output)
    elif cmd == "bmr-predict":
        model = EvidentialModel.from_dict(load_json(args.model))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # notes carry the same message
            _emit(bmr_predict_doc(model, _floats(args.features), args.variant), args.output)
    elif cmd == "examples":
        checks = replay(args.seed)
        for chk in checks:
            print(chk.line())
        return EXIT_OK if all(c.passed for c in checks) else EXIT_COMPUTE
    return EXIT_OK


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except UnsolvedInstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for entry in exc.trace:
            print(f"  trace: {entry}", file=sys.stderr)
        return EXIT_COMPUTE
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (ValidationError, EvidentialError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
