"""Restricted total belief: build a belief function on a fine frame from a
prior on a coarsening (with pairwise disjoint focal elements) and one
conditional belief function per cell of the coarsening.

Each focal element E_k of the prior is solved independently.  Its candidate
focal elements ("columns") pick one focal element of every conditional on the
cells of E_k; a square 0/1 linear system over n_min of them fixes the masses.
A selection is admissible when its solution is non-negative.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .combination import dempster_condition
from .errors import (
    NonCombinableError,
    SingularSystemError,
    UnsolvedInstanceError,
    ValidationError,
)
from .frame_core import TOL, MassFunction, _same_frame, core, iter_bits, plausibility
from .frames_algebra import Refining, outer_reduction, restriction

POSITIVITY_TOL = 1e-10
EXHAUSTIVE_LIMIT = 24
GRAPH_CAP = 10_000


@dataclass(frozen=True)
class TotalBeliefProblem:
    """refining maps the coarse frame Ω into the fine frame Θ.
    conditionals[i] is a mass function on Θ whose core lies in the cell ρ(ω_i)."""

    refining: Refining
    prior: MassFunction
    conditionals: Mapping[int, MassFunction]

    def __post_init__(self):
        r = self.refining
        _same_frame(self.prior.frame, r.source)
        if not self.prior.normalized:
            raise ValidationError("the prior must be normalized")
        seen = 0
        for a in self.prior.focal:
            if a & seen:
                raise ValidationError("prior focal elements must be pairwise disjoint")
            seen |= a
        conds = {int(k): v for k, v in self.conditionals.items()}
        for i, m in conds.items():
            if not 0 <= i < r.source.size:
                raise ValidationError(f"conditional for unknown cell {i}")
            _same_frame(m.frame, r.target)
            if not m.normalized:
                raise ValidationError(f"conditional {i} must be normalized")
            if core(m) & ~r.images[i]:
                raise ValidationError(f"conditional {i} has focal elements outside its cell")
        for i in iter_bits(seen):
            if i not in conds:
                raise ValidationError(f"missing conditional for cell {r.source.labels[i]!r}")
        object.__setattr__(self, "conditionals", conds)

    @property
    def coarse(self):
        return self.refining.source

    @property
    def fine(self):
        return self.refining.target


@dataclass(frozen=True)
class CandidateColumn:
    """Union of one focal element per cell; choices[p] indexes cells[p]'s list."""

    mask: int
    cells: tuple
    choices: tuple


def cell_focals(m: MassFunction) -> list:
    """(mask, mass) pairs of a conditional, ascending by mask."""
    return m.items()


def _cells(E_k: int, conditionals: Mapping[int, MassFunction]) -> list:
    cells = list(iter_bits(int(E_k)))
    if not cells:
        raise ValidationError("empty focal element")
    for i in cells:
        if i not in conditionals:
            raise ValidationError(f"no conditional for cell {i}")
    return cells


def candidate_columns(E_k: int, conditionals: Mapping[int, MassFunction]) -> list:
    """All prod(n_i) columns, in lexicographic order of the choice tuples."""
    cells = _cells(E_k, conditionals)
    focals = [cell_focals(conditionals[i]) for i in cells]
    out = []
    for choice in itertools.product(*(range(len(f)) for f in focals)):
        mask = 0
        for f, j in zip(focals, choice):
            mask |= f[j][0]
        out.append(CandidateColumn(mask, tuple(cells), tuple(choice)))
    return out


def min_focal_count(E_k: int, conditionals: Mapping[int, MassFunction]) -> int:
    cells = _cells(E_k, conditionals)
    return sum(len(conditionals[i]) - 1 for i in cells) + 1


def column_vector(col: CandidateColumn, conditionals: Mapping[int, MassFunction]) -> np.ndarray:
    """0/1 coefficients: one row per (cell, focal element except the last), then normalization."""
    rows = []
    for i, j in zip(col.cells, col.choices):
        n_i = len(conditionals[i])
        rows.extend(1.0 if j == r else 0.0 for r in range(n_i - 1))
    rows.append(1.0)
    return np.array(rows)


def _rhs(cells: Sequence[int], conditionals: Mapping[int, MassFunction]) -> np.ndarray:
    out = []
    for i in cells:
        out.extend(v for _, v in cell_focals(conditionals[i])[:-1])
    out.append(1.0)
    return np.array(out)


@dataclass(frozen=True, eq=False)
class SolutionSystem:
    columns: tuple
    matrix: np.ndarray
    rhs: np.ndarray
    solution: np.ndarray

    @property
    def admissible(self) -> bool:
        return bool(np.all(self.solution >= -POSITIVITY_TOL))


def _is_singular(a: np.ndarray) -> bool:
    return np.linalg.matrix_rank(a) < a.shape[0]


def build_system(columns: Sequence[CandidateColumn], conditionals: Mapping[int, MassFunction]) -> SolutionSystem:
    """Square system over a selection of n_min columns, solved by LU."""
    columns = tuple(columns)
    if not columns:
        raise ValidationError("empty selection")
    cells = columns[0].cells
    if any(c.cells != cells for c in columns):
        raise ValidationError("columns come from different focal elements")
    a = np.column_stack([column_vector(c, conditionals) for c in columns])
    b = _rhs(cells, conditionals)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"selection has {a.shape[1]} columns, the system needs {a.shape[0]}")
    if _is_singular(a):
        raise SingularSystemError("selected columns are linearly dependent")
    return SolutionSystem(columns, a, b, np.linalg.solve(a, b))


@dataclass(frozen=True)
class Substitution:
    """Replace selection[out] by `new`: new = -old + Σ companions - Σ selections."""

    out: int
    new: CandidateColumn
    companions: tuple  # positions in the selection
    selections: tuple


def _covers(companions: Sequence[CandidateColumn], col: CandidateColumn) -> bool:
    return all(any(c.choices[p] == j for c in companions) for p, j in enumerate(col.choices))


def class_t_substitutions(
    system: SolutionSystem,
    out: int,
    all_columns: Sequence[CandidateColumn],
    conditionals: Mapping[int, MassFunction],
) -> list:
    """Admissible class-𝒯 replacements of selection[out], ordered by new column mask."""
    chosen = {c.mask for c in system.columns}
    found = []
    cands = [c for c in sorted(all_columns, key=lambda c: c.mask) if c.mask not in chosen]
    if not cands:
        return found
    lams = np.linalg.solve(system.matrix, np.column_stack([column_vector(c, conditionals) for c in cands]))
    for cand, lam in zip(cands, lams.T):
        rounded = np.rint(lam)
        if np.max(np.abs(lam - rounded)) > 1e-9 or np.any(np.abs(rounded) > 1):
            continue
        if rounded[out] != -1:
            continue
        comp = tuple(int(p) for p in np.flatnonzero(rounded == 1))
        sel = tuple(int(p) for p in np.flatnonzero(rounded == -1) if p != out)
        if len(sel) != len(comp) - 2:
            continue
        if not _covers([system.columns[p] for p in comp], system.columns[out]):
            continue
        found.append(Substitution(out, cand, comp, sel))
    return found


def apply_substitution(
    system: SolutionSystem, sub: Substitution, conditionals: Mapping[int, MassFunction]
) -> SolutionSystem:
    """Swap the column and check the predicted effect on every component."""
    cols = list(system.columns)
    cols[sub.out] = sub.new
    new = build_system(cols, conditionals)
    s = system.solution[sub.out]
    expected = system.solution.copy()
    expected[sub.out] = -s
    for p in sub.companions:
        expected[p] += s
    for p in sub.selections:
        expected[p] -= s
    if not np.allclose(new.solution, expected, atol=1e-9, rtol=0.0):
        raise AssertionError("class-𝒯 substitution did not have the predicted effect")
    return new


@dataclass(frozen=True, eq=False)
class CellSolution:
    E_k: int
    system: SolutionSystem
    masses: np.ndarray  # clamped, non-negative
    strategy: str  # "walk" or "exhaustive"
    trace: list = field(default_factory=list)
    admissible_count: int | None = None

    @property
    def columns(self) -> tuple:
        return self.system.columns

    def fragment(self) -> dict:
        return {c.mask: float(x) for c, x in zip(self.system.columns, self.masses) if x > 0}


def _finish(E_k, system, strategy, trace, count=None) -> CellSolution:
    x = np.where(system.solution < 0, 0.0, system.solution)
    return CellSolution(int(E_k), system, x, strategy, trace, count)


def _trace_entry(step, system, action) -> dict:
    return {
        "step": step,
        "selection": [c.mask for c in system.columns],
        "solution": [float(v) for v in system.solution],
        "action": action,
    }


def _first_basis(columns, n_min, conditionals) -> SolutionSystem | None:
    # greedy in column order gives the lexicographically first non-singular selection
    picked, vecs = [], []
    for c in columns:
        v = column_vector(c, conditionals)
        if np.linalg.matrix_rank(np.column_stack(vecs + [v])) > len(vecs):
            picked.append(c)
            vecs.append(v)
            if len(picked) == n_min:
                return build_system(picked, conditionals)
    return None


def solve_restricted_cell(
    E_k: int,
    conditionals: Mapping[int, MassFunction],
    exhaustive: bool = True,
    count_admissible: bool = False,
    max_steps: int = 1000,
) -> CellSolution:
    """Find a non-negative minimal solution for one prior focal element.

    Walk: start from the first non-singular selection (columns ordered by
    bitmask) and repeatedly replace the most negative component by a class-𝒯
    substitution.  If the walk stalls, fall back to trying every selection
    (only when there are at most EXHAUSTIVE_LIMIT columns).
    """
    columns = sorted(candidate_columns(E_k, conditionals), key=lambda c: c.mask)
    n_min = min_focal_count(E_k, conditionals)
    trace: list = []

    system = _first_basis(columns, n_min, conditionals)
    if system is None:
        raise UnsolvedInstanceError("no non-singular selection exists", trace)

    visited = {frozenset(c.mask for c in system.columns)}
    for step in range(max_steps):
        if system.admissible:
            trace.append(_trace_entry(step, system, "admissible"))
            count = _count_admissible(columns, n_min, conditionals) if count_admissible else None
            return _finish(E_k, system, "walk", trace, count)
        order = sorted(range(n_min), key=lambda p: (system.solution[p], system.columns[p].mask))
        worst = order[0]
        nxt = None
        for sub in class_t_substitutions(system, worst, columns, conditionals):
            key = frozenset(c.mask for c in system.columns if c is not system.columns[worst]) | {sub.new.mask}
            if key not in visited:
                nxt = (sub, key)
                break
        if nxt is None:
            trace.append(_trace_entry(step, system, "stalled"))
            break
        trace.append(_trace_entry(step, system, f"substitute column {system.columns[worst].mask} -> {nxt[0].new.mask}"))
        system = apply_substitution(system, nxt[0], conditionals)
        visited.add(nxt[1])

    if exhaustive and len(columns) <= EXHAUSTIVE_LIMIT:
        first = None
        count = 0
        for combo in itertools.combinations(columns, n_min):
            try:
                cand = build_system(combo, conditionals)
            except SingularSystemError:
                continue
            if cand.admissible:
                count += 1
                if first is None:
                    first = cand
                    if not count_admissible:
                        break
        if first is not None:
            trace.append(_trace_entry(len(trace), first, "exhaustive"))
            return _finish(E_k, first, "exhaustive", trace, count if count_admissible else None)
        trace.append({"step": len(trace), "action": "exhaustive search found nothing"})
    raise UnsolvedInstanceError(f"no admissible selection found for focal element {E_k}", trace)


def _count_admissible(columns, n_min, conditionals) -> int:
    count = 0
    for combo in itertools.combinations(columns, n_min):
        try:
            if build_system(combo, conditionals).admissible:
                count += 1
        except SingularSystemError:
            continue
    return count


def assemble_total(problem: TotalBeliefProblem, solutions: Mapping[int, CellSolution]) -> MassFunction:
    """m(e) = m_prior(E_k) * m_k(e) over all prior focal elements."""
    acc: dict[int, float] = {}
    for E_k, w in problem.prior.focal.items():
        if E_k not in solutions:
            raise ValidationError(f"missing cell solution for focal element {E_k}")
        for mask, x in solutions[E_k].fragment().items():
            acc[mask] = acc.get(mask, 0.0) + w * x
    return MassFunction._from_arithmetic(problem.fine, acc, normalized=True)


def solve_total(problem: TotalBeliefProblem, threads: int = 1, **kwargs) -> tuple:
    """Solve every prior focal element; returns (total mass function, solutions)."""
    keys = sorted(problem.prior.focal)
    run = lambda E_k: solve_restricted_cell(E_k, problem.conditionals, **kwargs)
    if threads > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sols = list(pool.map(run, keys))
    else:
        sols = [run(k) for k in keys]
    solutions = dict(zip(keys, sols))
    return assemble_total(problem, solutions), solutions


@dataclass
class VerificationReport:
    prior_ok: bool
    conditionals_ok: dict
    structure_ok: bool
    messages: list

    @property
    def passed(self) -> bool:
        return self.prior_ok and self.structure_ok and all(self.conditionals_ok.values())


def verify_total(candidate: MassFunction, problem: TotalBeliefProblem, tol: float = TOL) -> VerificationReport:
    """Replay the constraints: restriction equals the prior, Dempster conditioning
    on each cell returns its conditional, and every focal element reduces to a
    prior focal element."""
    r = problem.refining
    _same_frame(candidate.frame, r.target)
    msgs = []
    prior_ok = restriction(candidate, r).equals(problem.prior, tol)
    if not prior_ok:
        msgs.append("restriction differs from the prior")
    cond_ok = {}
    for i, target in problem.conditionals.items():
        cell = r.images[i]
        if plausibility(candidate, cell) <= 0.0:
            cond_ok[i] = False
            msgs.append(f"cell {i} is implausible under the candidate")
            continue
        try:
            cond_ok[i] = dempster_condition(candidate, cell).equals(target, tol)
        except NonCombinableError:
            cond_ok[i] = False
        if not cond_ok[i]:
            msgs.append(f"conditioning on cell {i} does not return its conditional")
    prior_focal = set(problem.prior.focal)
    structure_ok = True
    for e in candidate.focal:
        if outer_reduction(r, e) not in prior_focal:
            structure_ok = False
            msgs.append(f"focal element {e} does not reduce to a prior focal element")
    return VerificationReport(prior_ok, cond_ok, structure_ok, msgs)


@dataclass(frozen=True, eq=False)
class SolutionGraph:
    columns: list
    nodes: list  # tuples of column indices
    solutions: list  # solution vector per node
    edges: list  # (node_a, node_b)

    def degrees(self) -> list:
        deg = [0] * len(self.nodes)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def signs(self) -> list:
        return [tuple(int(np.sign(x)) if abs(x) > POSITIVITY_TOL else 0 for x in s) for s in self.solutions]

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        adj = {i: set() for i in range(len(self.nodes))}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.nodes)


def solution_graph(E_k: int, conditionals: Mapping[int, MassFunction], cap: int = GRAPH_CAP) -> SolutionGraph:
    """Non-singular minimal selections joined by class-𝒯 substitutions."""
    columns = candidate_columns(E_k, conditionals)
    n_min = min_focal_count(E_k, conditionals)
    total = math.comb(len(columns), n_min)
    if total > cap:
        raise ValidationError(f"{total} candidate selections exceed the cap {cap}")
    nodes, systems = [], []
    for combo in itertools.combinations(range(len(columns)), n_min):
        try:
            systems.append(build_system([columns[i] for i in combo], conditionals))
            nodes.append(combo)
        except SingularSystemError:
            continue
    index = {frozenset(n): k for k, n in enumerate(nodes)}
    pos_of = {c.mask: i for i, c in enumerate(columns)}
    edges = set()
    for k, (node, system) in enumerate(zip(nodes, systems)):
        for out in range(n_min):
            for sub in class_t_substitutions(system, out, columns, conditionals):
                other = frozenset(set(node) - {node[out]} | {pos_of[sub.new.mask]})
                j = index[other]
                edges.add((min(k, j), max(k, j)))
    return SolutionGraph(columns, nodes, [s.solution for s in systems], sorted(edges))
