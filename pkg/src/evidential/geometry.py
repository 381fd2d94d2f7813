"""The belief space: coordinates, credal vertices, distances, conditional
subspaces and the constructions specific to binary frames."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .combination import dempster_combine, dempster_condition
from .errors import (
    EnumerationCapError,
    NonCombinableError,
    ValidationError,
)
from .frame_core import (
    TOL,
    Frame,
    MassFunction,
    _same_frame,
    belief_values,
    check_cap,
    core,
    iter_bits,
    mobius_inverse,
    popcount,
)
from .transforms import ProbabilityDistribution

CREDAL_CAP = 10
CORE_CAP = 16


class SingularConstructionWarning(UserWarning):
    """The geometric construction degenerated; the algebraic rule was used."""


@dataclass(frozen=True, eq=False)
class BeliefVector:
    """Belief values of every subset other than ∅ and Θ, ordered by bitmask."""

    frame: Frame
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != ((1 << self.frame.size) - 2,):
            raise ValidationError(f"expected {(1 << self.frame.size) - 2} coordinates")
        object.__setattr__(self, "values", v)

    def full(self) -> np.ndarray:
        """The 2^n vector including b(∅) = 0 and b(Θ) = 1."""
        return np.concatenate(([0.0], self.values, [1.0]))


def to_belief_vector(m: MassFunction) -> BeliefVector:
    bel = belief_values(m.normalize())
    return BeliefVector(m.frame, bel[1:-1])


def from_belief_vector(bv: BeliefVector) -> MassFunction:
    return mobius_inverse(bv.frame, bv.full())


def convex_combination(ms: Sequence[MassFunction], weights: Sequence[float]) -> MassFunction:
    """Mixture of mass functions; belief coordinates mix with the same weights."""
    weights = np.asarray(weights, dtype=float)
    if len(ms) != len(weights) or np.any(weights < 0) or abs(weights.sum() - 1.0) > TOL:
        raise ValidationError("weights must be non-negative, sum to 1 and match the list")
    acc: dict[int, float] = {}
    for m, w in zip(ms, weights):
        _same_frame(m.frame, ms[0].frame)
        for k, v in m.focal.items():
            acc[k] = acc.get(k, 0.0) + w * v
    return MassFunction._from_arithmetic(ms[0].frame, acc, normalized=True)


@dataclass(frozen=True, eq=False)
class CredalVertexSet:
    """One vertex per permutation of the frame (raw list, with repeats)."""

    frame: Frame
    permutations: list
    vertices: np.ndarray  # shape (n!, n)
    _unique: list = field(default=None, repr=False)

    def unique(self, tol: float = TOL) -> np.ndarray:
        """Vertices with duplicates (equal within tol) collapsed, first occurrence kept."""
        kept: list = []
        for v in self.vertices:
            if not any(np.max(np.abs(v - u)) <= tol for u in kept):
                kept.append(v)
        return np.array(kept)

    def distributions(self, unique: bool = True) -> list:
        rows = self.unique() if unique else self.vertices
        return [ProbabilityDistribution(self.frame, r) for r in rows]

    def barycenter(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


def credal_vertices(m: MassFunction, cap: int = CREDAL_CAP) -> CredalVertexSet:
    """Vertices of the consistent credal set, one per ordering of the elements.

    Under ordering pi, each focal mass goes to its earliest element in pi.
    """
    m = m.normalize()
    n = m.frame.size
    if n > cap:
        raise EnumerationCapError(f"credal vertices need {n}! permutations; cap is {cap} elements")
    focal = [(list(iter_bits(a)), v) for a, v in m.focal.items()]
    perms = list(itertools.permutations(range(n)))
    out = np.zeros((len(perms), n))
    for row, perm in enumerate(perms):
        rank = [0] * n
        for r, x in enumerate(perm):
            rank[x] = r
        for elems, v in focal:
            out[row, min(elems, key=rank.__getitem__)] += v
    return CredalVertexSet(m.frame, perms, out)


def credal_generators(m: MassFunction, cap: int = 100000) -> np.ndarray:
    """Distributions obtained by giving each focal mass to one of its elements.

    Rows follow itertools.product over focal elements in ascending bitmask
    order, each choosing elements in ascending index order.  The credal set is
    the convex hull of these rows; the permutation vertices are among them.
    """
    m = m.normalize()
    focal = sorted(m.focal.items())
    count = math.prod(popcount(a) for a, _ in focal)
    if count > cap:
        raise EnumerationCapError(f"{count} focal selections exceed the cap of {cap}")
    n = m.frame.size
    rows = []
    for choice in itertools.product(*[list(iter_bits(a)) for a, _ in focal]):
        row = np.zeros(n)
        for x, (_, v) in zip(choice, focal):
            row[x] += v
        rows.append(row)
    return np.array(rows)


def _event_probs(p: ProbabilityDistribution) -> np.ndarray:
    check_cap(p.frame.size, "event probabilities")
    return belief_values(p.as_mass())


def l1_distance(m: MassFunction, p: ProbabilityDistribution) -> float:
    """Sum over all events of |b(A) - p(A)|."""
    _same_frame(m.frame, p.frame)
    check_cap(m.frame.size, "l1_distance")
    return float(np.abs(belief_values(m) - _event_probs(p)).sum())


def l1_consistent_constant(m: MassFunction) -> float:
    """Closed-form L1 distance from b to any probability dominating it.

    2^{|Θ∖C|} (2^{|C|-1} - 1 - Σ b(A)) with A ranging over the non-empty
    proper subsets of the core C.
    """
    check_cap(m.frame.size, "l1_consistent_constant")
    c = core(m)
    bel = belief_values(m)
    inner = 0.0
    sub = (c - 1) & c
    while sub:
        inner += bel[sub]
        sub = (sub - 1) & c
    k = popcount(c)
    return float(2 ** (m.frame.size - k) * (2 ** (k - 1) - 1 - inner))


def limit_simplex_gap(m: MassFunction) -> float:
    """2^{n-1} minus the sum of all belief values; zero exactly for Bayesian b."""
    check_cap(m.frame.size, "limit_simplex_gap")
    return float(2 ** (m.frame.size - 1) - belief_values(m).sum())


def conditional_subspace_vertices(m: MassFunction, core_cap: int = CORE_CAP) -> list:
    """m combined with the categorical on every non-empty subset of its core.

    Ordered by the bitmask of the conditioning subset; the last entry is m itself.
    """
    m = m.normalize()
    c = core(m)
    if popcount(c) > core_cap:
        raise EnumerationCapError(f"core of size {popcount(c)} exceeds {core_cap}")
    subs = []
    sub = c
    while sub:
        subs.append(sub)
        sub = (sub - 1) & c
    return [dempster_condition(m, a) for a in sorted(subs)]


def dempster_convex_weights(
    m: MassFunction, ms: Sequence[MassFunction], alphas: Sequence[float]
) -> np.ndarray:
    """Weights beta with m ⊕ Σ alpha_i m_i = Σ beta_i (m ⊕ m_i).

    beta_i is proportional to alpha_i times the non-conflicting mass of (m, m_i).
    """
    alphas = np.asarray(alphas, dtype=float)
    if len(ms) != len(alphas) or np.any(alphas < 0) or abs(alphas.sum() - 1.0) > TOL:
        raise ValidationError("alphas must be non-negative weights summing to 1")
    k = np.zeros(len(ms))
    for i, mi in enumerate(ms):
        try:
            k[i] = 1.0 - dempster_combine(m, mi).conflict.kappa
        except NonCombinableError:
            k[i] = 0.0
    w = alphas * k
    if w.sum() <= 0.0:
        raise NonCombinableError("no member with positive weight is combinable with m")
    return w / w.sum()


# binary frames: coordinates are (b(x), b(y)) = (m(x), m(y))


def _binary(m: MassFunction) -> tuple:
    if m.frame.size != 2:
        raise ValidationError("a binary frame is required")
    m = m.normalize()
    return m[1], m[2], m[3]


def binary_point(m: MassFunction) -> np.ndarray:
    mx, my, _ = _binary(m)
    return np.array([mx, my])


def _from_point(frame: Frame, point) -> MassFunction:
    mx, my = float(point[0]), float(point[1])
    return MassFunction._from_arithmetic(
        frame, {1: max(mx, 0.0), 2: max(my, 0.0), 3: max(1.0 - mx - my, 0.0)}, normalized=True
    )


@dataclass(frozen=True)
class BinaryFoci:
    """Foci of the conditional subspace; None marks a focus at infinity."""

    fx: tuple | None
    fy: tuple | None

    @property
    def x_at_infinity(self) -> bool:
        return self.fx is None

    @property
    def y_at_infinity(self) -> bool:
        return self.fy is None


def _homogeneous_foci(mx: float, my: float, mt: float) -> tuple:
    # F_x = [1, -mt/mx] scaled by mx, F_y = [-mt/my, 1] scaled by my
    return np.array([mx, -mt, mx]), np.array([-mt, my, my])


def binary_foci(m: MassFunction) -> BinaryFoci:
    mx, my, mt = _binary(m)
    fx = (1.0, -mt / mx) if mx > 0 else None
    fy = (-mt / my, 1.0) if my > 0 else None
    return BinaryFoci(fx, fy)


def binary_canonical_decomposition(m: MassFunction) -> tuple:
    """Support degrees (w_x, w_y) of the simple b.f.s whose sum is m."""
    mx, my, mt = _binary(m)
    if mt <= 0.0:
        raise ValidationError(
            "m(Θ) = 0: no decomposition into two non-conflicting simple support functions"
        )
    return mx / (mx + mt), my / (my + mt)


def binary_probabilistic_coordinates(m1: MassFunction, m2: MassFunction) -> tuple:
    """p_x = m1 ⊕ [m2(x), 1 - m2(x)] and p_y = m1 ⊕ [1 - m2(y), m2(y)] as points."""
    _same_frame(m1.frame, m2.frame)
    _, _, _ = _binary(m1)
    m2x, m2y, _ = _binary(m2)
    px_prime = _from_point(m1.frame, (m2x, 1.0 - m2x))
    py_prime = _from_point(m1.frame, (1.0 - m2y, m2y))
    px = binary_point(dempster_combine(m1, px_prime).mass)
    py = binary_point(dempster_combine(m1, py_prime).mass)
    return px, py


SINGULAR_DET = 1e-12
# the intersection error grows like 1e-16 / sin(angle); below this the lines are treated as parallel
SINGULAR_SINE = 1e-6


def _intersect(p1, d1, p2, d2) -> np.ndarray | None:
    det = d1[0] * (-d2[1]) - d1[1] * (-d2[0])
    if abs(det) < SINGULAR_DET or abs(det) < SINGULAR_SINE * np.hypot(*d1) * np.hypot(*d2):
        return None
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    t = (rx * (-d2[1]) - ry * (-d2[0])) / det
    return np.array([p1[0] + t * d1[0], p1[1] + t * d1[1]])


def binary_dempster_geometric(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule on a binary frame by the foci construction.

    The sum is the intersection of the line through p_x and F_x with the
    line through p_y and F_y.  Degenerate configurations (Bayesian m1 among
    them) fall back to the algebraic rule with a SingularConstructionWarning.
    Nearly parallel lines count as degenerate too.
    """
    mx, my, mt = _binary(m1)
    point = None
    try:
        px, py = binary_probabilistic_coordinates(m1, m2)
        hx, hy = _homogeneous_foci(mx, my, mt)
        # direction towards a focus, valid for finite and infinite foci alike
        dx = hx[:2] - hx[2] * px
        dy = hy[:2] - hy[2] * py
        if np.hypot(*dx) > 1e-12 and np.hypot(*dy) > 1e-12:
            point = _intersect(px, dx, py, dy)
    except NonCombinableError:
        point = None
    if point is None:
        warnings.warn(
            "singular geometric configuration; used the algebraic rule",
            SingularConstructionWarning,
            stacklevel=2,
        )
        return dempster_combine(m1, m2).mass
    return _from_point(m1.frame, point)


def binary_l2_closest_probability(m: MassFunction) -> np.ndarray:
    """Bayesian point closest to b in the (b(x), b(y)) plane."""
    mx, my, _ = _binary(m)
    # orthogonal projection onto the line x + y = 1
    shift = (1.0 - mx - my) / 2.0
    return np.array([mx + shift, my + shift])
