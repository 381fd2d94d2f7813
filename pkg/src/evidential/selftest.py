"""Replays the bundled worked examples from their JSON documents.

Used by the ``examples`` CLI command.  Each check compares a library result
with a value written down independently in ``data/expected.json`` or with a
closed form evaluated at random inputs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import numpy as np

from .combination import dempster_combine
from .documents import mass_from_doc, problem_from_doc
from .frame_core import belief
from .geometry import credal_generators, credal_vertices
from .total_belief import (
    TotalBeliefProblem,
    build_system,
    candidate_columns,
    solve_restricted_cell,
    solve_total,
    verify_total,
)
from .transforms import pignistic

EXACT = 1e-12
CASE_TOL = 1e-10


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _doc(name: str):
    return json.loads(resources.files("evidential").joinpath("data", name).read_text(encoding="utf-8"))


def _frac(pair) -> float:
    return float(Fraction(int(pair[0]), int(pair[1])))


def check_dempster() -> Check:
    m1, m2 = mass_from_doc(_doc("dempster_b1.json")), mass_from_doc(_doc("dempster_b2.json"))
    expected = _doc("expected.json")["dempster"]
    out = dempster_combine(m1, m2).mass
    err = max(abs(out[(lab,)] - _frac(v)) for lab, v in expected.items())
    ok = err <= EXACT and len(out) == len(expected)
    return Check("dempster worked example", ok, f"max error {err:.3g}, {len(out)} focal elements")


def check_alibi() -> Check:
    m1, m2 = mass_from_doc(_doc("alibi_innocent.json")), mass_from_doc(_doc("alibi_guilty.json"))
    expected = _doc("expected.json")["alibi"]
    out = dempster_combine(m1, m2).mass
    err = max(abs(belief(out, (lab,)) - _frac(v)) for lab, v in expected.items())
    return Check("alibi example", err <= EXACT, f"max error {err:.3g}")


def check_credal() -> Check:
    m = mass_from_doc(_doc("credal_estimate.json"))
    listed = np.array([[_frac(x) for x in row] for row in _doc("expected.json")["credal_generators"]])
    gens = credal_generators(m)
    same = gens.shape == listed.shape and all(
        any(np.max(np.abs(g - row)) <= EXACT for g in gens) for row in listed
    )
    verts = credal_vertices(m)
    among = all(any(np.max(np.abs(v - row)) <= EXACT for row in listed) for v in verts.vertices)
    bary = float(np.max(np.abs(verts.barycenter() - pignistic(m).probs)))
    ok = same and among and bary <= EXACT
    return Check(
        "credal set example",
        ok,
        f"generators match={same}, vertices among them={among}, barycenter error {bary:.3g}",
    )


def case_study_closed_forms(a: float, c: float) -> list:
    """The four minimal solutions over (e1, e2, e3, e4), None for an absent column."""
    return [
        [a + c - 1.0, 1.0 - c, 1.0 - a, None],
        [c, a - c, None, 1.0 - a],
        [a, None, c - a, 1.0 - c],
        [None, a, c, 1.0 - a - c],
    ]


def case_study_problem(template: dict, a: float, c: float) -> TotalBeliefProblem:
    doc = json.loads(json.dumps(template))
    doc["conditionals"]["w1"]["masses"][0]["mass"] = a
    doc["conditionals"]["w1"]["masses"][1]["mass"] = 1.0 - a
    doc["conditionals"]["w3"]["masses"][0]["mass"] = c
    doc["conditionals"]["w3"]["masses"][1]["mass"] = 1.0 - c
    return problem_from_doc(doc)


def check_case_study(seed: int = 0) -> Check:
    template = _doc("case_study.json")
    pairs = int(_doc("expected.json")["case_study_pairs"])
    rng = np.random.default_rng(seed)
    worst, solved, verified = 0.0, 0, 0
    for _ in range(pairs):
        a, c = rng.uniform(0.01, 0.99, size=2)
        problem = case_study_problem(template, a, c)
        E = problem.prior.frame.full
        cols = candidate_columns(E, problem.conditionals)  # e1..e4 in cell-product order
        for sel, closed in zip(itertools.combinations(range(len(cols)), 3), case_study_closed_forms(a, c)):
            sol = build_system([cols[i] for i in sel], problem.conditionals).solution
            want = [v for v in closed if v is not None]
            worst = max(worst, float(np.max(np.abs(sol - np.array(want)))))
        cell = solve_restricted_cell(E, problem.conditionals)
        solved += cell.system.admissible
        total, _ = solve_total(problem)
        verified += verify_total(total, problem).passed
    ok = worst <= CASE_TOL and solved == pairs and verified == pairs
    return Check(
        "total belief case study",
        ok,
        f"{pairs} pairs, max closed-form error {worst:.3g}, admissible {solved}/{pairs}, verified {verified}/{pairs}",
    )


def replay(seed: int = 0) -> list:
    return [check_dempster(), check_alibi(), check_credal(), check_case_study(seed)]
