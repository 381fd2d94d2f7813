"""One check per acceptance criterion; each prints a PASS/FAIL line.

Run ``python tests/test_acceptance.py`` for the summary alone, or let pytest
collect it (the lines are written through ``capsys.disabled``).
"""

import itertools
import math
import subprocess
import sys
import time
import warnings
from fractions import Fraction

import numpy as np
import pytest

from evidential import Frame, MassFunction
from evidential.bmr import (
    TrainingSet,
    feature_likelihoods,
    interval_estimate,
    learn_model,
    point_estimate,
    predict_belief,
)
from evidential.combination import combinable, dempster_combine
from evidential.frame_core import belief_values, is_bayesian, mobius_inverse, plausibility_values
from evidential.frames_algebra import all_partitions, is_independent_IF, minimal_refinement
from evidential.geometry import (
    SingularConstructionWarning,
    binary_canonical_decomposition,
    binary_dempster_geometric,
    binary_foci,
    convex_combination,
    credal_generators,
    credal_vertices,
    dempster_convex_weights,
    l1_consistent_constant,
    limit_simplex_gap,
    to_belief_vector,
)
from evidential.total_belief import (
    build_system,
    candidate_columns,
    solution_graph,
    solve_restricted_cell,
)
from evidential.transforms import pignistic

TH = Frame(("θ1", "θ2", "θ3", "θ4", "θ5"))
XY = Frame(("x", "y"))


def line(n, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print("\n" + line(n, ok, detail))
        assert ok, detail

    return emit


def random_mass(rng, n, max_focal=6):
    frame = Frame.of_size(n)
    k = int(rng.integers(1, max_focal + 1))
    masks = rng.integers(1, 1 << n, size=k)
    w = rng.dirichlet(np.ones(k))
    acc = {}
    for msk, x in zip(masks, w):
        acc[int(msk)] = acc.get(int(msk), 0.0) + float(x)
    return MassFunction(frame, acc)


def random_binary(rng):
    w = rng.dirichlet(np.ones(3))
    return MassFunction(XY, {0b01: w[0], 0b10: w[1], 0b11: w[2]})


# 1


def criterion_1():
    m1 = MassFunction(TH, {("θ2",): 0.7, ("θ2", "θ4"): 0.3})
    m2 = MassFunction(TH, {("θ2", "θ3"): 0.6, ("θ4", "θ5"): 0.4})
    out = dempster_combine(m1, m2).mass
    err = max(abs(out[("θ2",)] - 5 / 6), abs(out[("θ4",)] - 1 / 6))
    runs = []
    for _ in range(50):
        t = time.perf_counter()
        dempster_combine(m1, m2)
        runs.append(time.perf_counter() - t)
    best = min(runs)
    ok = err <= 1e-12 and len(out) == 2 and best < 1e-3
    return ok, f"Dempster example error {err:.2g}, runtime {best * 1e6:.0f} us"


# 2


def criterion_2():
    f = Frame(("G", "I"))
    out = dempster_combine(
        MassFunction.simple_support(f, ("I",), 0.1), MassFunction.simple_support(f, ("G",), 0.9)
    ).mass
    err = max(abs(out[("I",)] - 1 / 91), abs(out[("G",)] - 81 / 91))
    return err <= 1e-12, f"alibi b(I)=1/91, b(G)=81/91, error {err:.2g}"


# 3

Q = Frame(("q1", "q2", "q3"))
CREDAL = MassFunction(Q, {("q1", "q2"): 1 / 3, ("q3",): 1 / 6, ("q1", "q2", "q3"): 0.5})
SIX = np.array(
    [
        [float(Fraction(a)) for a in row]
        for row in [
            ["5/6", "0", "1/6"],
            ["1/2", "1/3", "1/6"],
            ["1/3", "1/2", "1/6"],
            ["0", "5/6", "1/6"],
            ["0", "1/3", "2/3"],
            ["1/3", "0", "2/3"],
        ]
    ]
)


def _same_rows(a, b, tol=1e-12):
    return len(a) == len(b) and all(any(np.max(np.abs(x - y)) <= tol for y in b) for x in a)


def criterion_3a():
    gens = credal_generators(CREDAL)
    verts = credal_vertices(CREDAL).unique()
    among = all(any(np.max(np.abs(v - s)) <= 1e-12 for s in SIX) for v in verts)
    ok = _same_rows(gens, SIX) and among
    return ok, f"six listed distributions = focal-selection generators; {len(verts)} extreme points all among them"


def criterion_3b():
    verts = credal_vertices(CREDAL).unique()
    return _same_rows(verts, SIX), f"permutation vertices give {len(verts)} distinct distributions, six listed"


def criterion_3c():
    err = float(np.max(np.abs(credal_vertices(CREDAL).barycenter() - pignistic(CREDAL).probs)))
    return err <= 1e-12, f"average of the 3! permutation vertices vs pignistic, error {err:.2g}"


# 4

FINE = Frame(("a1", "a2", "b1", "c1", "c2"))


def criterion_4():
    rng = np.random.default_rng(404)
    worst, admissible = 0.0, 0
    for _ in range(20):
        a, c = rng.uniform(0.01, 0.99, size=2)
        conds = {
            0: MassFunction(FINE, {("a1",): a, ("a1", "a2"): 1 - a}),
            1: MassFunction(FINE, {("b1",): 1.0}),
            2: MassFunction(FINE, {("c1",): c, ("c1", "c2"): 1 - c}),
        }
        cols = candidate_columns(0b111, conds)
        closed = [[a + c - 1, 1 - c, 1 - a], [c, a - c, 1 - a], [a, c - a, 1 - c], [a, c, 1 - a - c]]
        for sel, want in zip(itertools.combinations(range(4), 3), closed):
            sol = build_system([cols[i] for i in sel], conds).solution
            worst = max(worst, float(np.max(np.abs(sol - want))))
        admissible += solve_restricted_cell(0b111, conds).system.admissible
    ok = worst <= 1e-10 and admissible == 20
    return ok, f"20 pairs: closed-form error {worst:.2g}, admissible selection found {admissible}/20"


# 5


def _subset_images(p):
    """Refining image of every non-empty subset of the partition's blocks."""
    out = []
    for r in range(1, len(p.blocks) + 1):
        for combo in itertools.combinations(p.blocks, r):
            out.append(sum(combo))
    return np.array(out, dtype=np.int64)


def criterion_5():
    t = time.perf_counter()
    pairs = disagreements = 0
    for n in range(1, 7):
        parts = all_partitions(Frame.of_size(n))
        images = [_subset_images(p) for p in parts]
        for i, j in itertools.combinations_with_replacement(range(len(parts)), 2):
            pair = [parts[i], parts[j]]
            indep = is_independent_IF(pair).independent
            product = len(minimal_refinement(pair).partition.blocks) == len(parts[i].blocks) * len(parts[j].blocks)
            conflict = bool(np.any(np.bitwise_and.outer(images[i], images[j]) == 0))
            pairs += 1
            disagreements += not (indep == product == (not conflict))
    elapsed = time.perf_counter() - t
    ok = disagreements == 0 and elapsed < 10
    return ok, f"{pairs} unordered partition pairs, bases 1..6: {disagreements} disagreements, {elapsed:.1f} s"


# 6


def criterion_6():
    rng = np.random.default_rng(606)
    failures = {k: 0 for k in ("mobius", "superadditive", "pl>=b", "L1", "simplex", "Cl")}
    cl_checked = 0
    for trial in range(1000):
        n = int(rng.integers(1, 7))
        m = random_mass(rng, n)
        if trial % 10 == 0:
            m = MassFunction.bayesian(m.frame, rng.dirichlet(np.ones(n)))
        bel = belief_values(m)
        if not mobius_inverse(m.frame, bel).equals(m, 1e-9):
            failures["mobius"] += 1
        idx = np.arange(1 << n)
        union = np.bitwise_or.outer(idx, idx)
        meet = np.bitwise_and.outer(idx, idx)
        if np.any(bel[union] < bel[:, None] + bel[None, :] - bel[meet] - 1e-9):
            failures["superadditive"] += 1
        if np.any(plausibility_values(m) < bel - 1e-9):
            failures["pl>=b"] += 1
        verts = credal_vertices(m).vertices
        incidence = np.array([[(a >> i) & 1 for a in idx] for i in range(n)], dtype=float)
        dists = np.abs(bel[None, :] - verts @ incidence).sum(axis=1)
        if np.max(np.abs(dists - l1_consistent_constant(m))) > 1e-9:
            failures["L1"] += 1
        gap = limit_simplex_gap(m)
        if gap < -1e-9 or (abs(gap) <= 1e-9) != is_bayesian(m):
            failures["simplex"] += 1
        m1, m2 = random_mass(rng, n), random_mass(rng, n)
        alpha = float(rng.uniform())
        mix = convex_combination([m1, m2], [alpha, 1 - alpha])
        if combinable(m, m1) and combinable(m, m2):
            cl_checked += 1
            beta = dempster_convex_weights(m, [m1, m2], [alpha, 1 - alpha])
            lhs = to_belief_vector(dempster_combine(m, mix).mass).values
            rhs = beta[0] * to_belief_vector(dempster_combine(m, m1).mass).values + beta[
                1
            ] * to_belief_vector(dempster_combine(m, m2).mass).values
            if not np.allclose(lhs, rhs, atol=1e-9, rtol=0):
                failures["Cl"] += 1
    ok = sum(failures.values()) == 0
    detail = ", ".join(f"{k} {v}" for k, v in failures.items())
    return ok, f"1000 instances (Cl on {cl_checked} combinable triples), failures: {detail}"


# 7


def criterion_7():
    rng = np.random.default_rng(707)
    foci_bad = canon_bad = geo_bad = 0
    for _ in range(1000):
        m = random_binary(rng)
        mx, my, mt = m[0b01], m[0b10], m[0b11]
        f = binary_foci(m)
        if abs(f.fx[1] + mt / mx) > 1e-12 or abs(f.fy[0] + mt / my) > 1e-12 or f.fx[0] != 1 or f.fy[1] != 1:
            foci_bad += 1
        # substitution: m ⊕ [a, 1-a] and m ⊕ [a, t(1-a)] are collinear with F_x
        a, s = rng.uniform(size=2)
        p = dempster_combine(m, MassFunction(XY, {0b01: a, 0b10: 1 - a})).mass
        q = dempster_combine(m, MassFunction(XY, {0b01: a, 0b10: s * (1 - a), 0b11: (1 - s) * (1 - a)})).mass
        d1 = np.array([q[1] - p[1], q[2] - p[2]])
        d2 = np.array([f.fx[0] - p[1], f.fx[1] - p[2]])
        if abs(d1[0] * d2[1] - d1[1] * d2[0]) > 1e-9 * max(1.0, np.abs(d2).max()):
            foci_bad += 1
        wx, wy = binary_canonical_decomposition(m)
        back = dempster_combine(
            MassFunction.simple_support(XY, ("x",), wx), MassFunction.simple_support(XY, ("y",), wy)
        ).mass
        canon_bad += not back.equals(m, 1e-9)
    pairs = skipped = 0
    while pairs < 1000:
        m1, m2 = random_binary(rng), random_binary(rng)
        with warnings.catch_warnings():
            warnings.simplefilter("error", SingularConstructionWarning)
            try:
                geo = binary_dempster_geometric(m1, m2)
            except SingularConstructionWarning:
                skipped += 1
                continue
        pairs += 1
        geo_bad += not geo.equals(dempster_combine(m1, m2).mass, 1e-9)
    ok = foci_bad == canon_bad == geo_bad == 0
    return ok, (
        f"foci failures {foci_bad}, decomposition failures {canon_bad}, "
        f"geometric vs algebraic failures {geo_bad} on 1000 pairs ({skipped} singular skipped)"
    )


# 8


def _synthetic(n, rng):
    q = rng.uniform(0, 10, size=n)
    clean = np.column_stack([np.where(q < 5, q, 10 - q) * 2, np.floor(q / 2.5) * 3, np.where(q < 7, 0.5 * q, 8 - q)])
    return q, clean + rng.normal(scale=0.3, size=clean.shape)


def criterion_8():
    model = learn_model(TrainingSet([1.0, 2.0, 5.0], [23.0, 38.0, 86.0]), 2, m_theta=0.0)
    q = model.poses[:, 0]
    images = model.refinings[0]
    closed_err = vert_err = 0.0
    for y in np.linspace(20, 90, 100):
        g = feature_likelihoods(model, 0, y)
        hi = sum(gj * max(q[k] for k in range(3) if img >> k & 1) for gj, img in zip(g, images)) / g.sum()
        lo = sum(gj * min(q[k] for k in range(3) if img >> k & 1) for gj, img in zip(g, images)) / g.sum()
        est = predict_belief(model, [y])
        b = interval_estimate(est, model)[0]
        closed_err = max(closed_err, abs(b[0] - lo), abs(b[1] - hi))
        vq = credal_vertices(est.mass.normalize()).vertices @ q
        vert_err = max(vert_err, abs(b[0] - vq.min()), abs(b[1] - vq.max()))

    rng = np.random.default_rng(808)
    qs, fs = _synthetic(200, rng)
    qt, ft = _synthetic(200, rng)

    def rmse(k):
        m = learn_model(TrainingSet(qs, fs), k, seed=0)
        pred = np.array([point_estimate(predict_belief(m, row), m)[0] for row in ft])
        return float(np.sqrt(np.mean((pred - qt) ** 2)))

    bmr, base = rmse(4), rmse(1)
    ok = closed_err <= 1e-9 and vert_err <= 1e-12 and base >= 2 * bmr
    return ok, (
        f"toy grid: closed-form error {closed_err:.2g}, vertex-enumeration error {vert_err:.2g}; "
        f"synthetic RMSE {bmr:.3f} (k=4) vs {base:.3f} (k=1), ratio {base / bmr:.1f}"
    )


# 9


def criterion_9():
    fine = Frame(("a1", "a2", "a3", "b1", "b2"))
    conds = {
        0: MassFunction(fine, {("a1",): 0.2, ("a2",): 0.3, ("a1", "a2", "a3"): 0.5}),
        1: MassFunction(fine, {("b1",): 0.4, ("b1", "b2"): 0.6}),
    }
    g = solution_graph(0b11, conds)
    ok = len(g.nodes) == 12 and g.is_connected()
    return ok, f"n=(3,2): {len(g.nodes)} non-singular nodes of {math.comb(6, 4)} selections, connected={g.is_connected()}"


# 10


def criterion_10():
    proc = subprocess.run([sys.executable, "-m", "evidential", "examples"], capture_output=True, text=True)
    lines = proc.stdout.strip().splitlines()
    return proc.returncode == 0, f"examples exit code {proc.returncode}, {sum(x.startswith('PASS') for x in lines)}/{len(lines)} PASS"


def test_criterion_1(report):
    report(1, *criterion_1())


def test_criterion_2(report):
    report(2, *criterion_2())


def test_criterion_3a(report):
    report("3a", *criterion_3a())


@pytest.mark.xfail(strict=True, reason="the permutation construction yields 4 distinct extreme points, not 6")
def test_criterion_3b(report):
    report("3b", *criterion_3b())


def test_criterion_3c(report):
    report("3c", *criterion_3c())


def test_criterion_4(report):
    report(4, *criterion_4())


def test_criterion_5(report):
    report(5, *criterion_5())


def test_criterion_6(report):
    report(6, *criterion_6())


def test_criterion_7(report):
    report(7, *criterion_7())


def test_criterion_8(report):
    report(8, *criterion_8())


def test_criterion_9(report):
    report(9, *criterion_9())


def test_criterion_10(report):
    report(10, *criterion_10())


if __name__ == "__main__":
    checks = [
        (1, criterion_1), (2, criterion_2), ("3a", criterion_3a), ("3b", criterion_3b), ("3c", criterion_3c),
        (4, criterion_4), (5, criterion_5), (6, criterion_6), (7, criterion_7), (8, criterion_8),
        (9, criterion_9), (10, criterion_10),
    ]
    for n, fn in checks:
        print(line(n, *fn()))
