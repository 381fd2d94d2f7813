"""Evidence fusion and conditioning rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NonCombinableError, ValidationError
from .frame_core import (
    PRUNE,
    MassFunction,
    SubsetLike,
    _same_frame,
    as_mask,
    belief,
    belief_values,
    core,
    mobius_inverse,
)


@dataclass(frozen=True)
class ConflictReport:
    """kappa is the mass sent to ∅; weight = -ln(1 - kappa)."""

    kappa: float
    weight: float

    @classmethod
    def from_kappa(cls, kappa: float) -> "ConflictReport":
        kappa = min(max(kappa, 0.0), 1.0)
        weight = math.inf if kappa >= 1.0 else -math.log1p(-kappa)
        return cls(kappa, weight)


class Combined(NamedTuple):
    mass: MassFunction
    conflict: ConflictReport


def combinable(m1: MassFunction, m2: MassFunction) -> bool:
    _same_frame(m1.frame, m2.frame)
    return bool(core(m1) & core(m2))


def _intersections(m1: MassFunction, m2: MassFunction) -> dict:
    _same_frame(m1.frame, m2.frame)
    acc: dict[int, float] = {}
    for b, x in m1.focal.items():
        for c, y in m2.focal.items():
            a = b & c
            acc[a] = acc.get(a, 0.0) + x * y
    return acc


def conjunctive_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Unnormalized conjunctive rule: the mass on ∅ is kept."""
    acc = _intersections(m1, m2)
    if acc.get(0, 0.0) >= 1.0 - PRUNE:
        return MassFunction._from_arithmetic(m1.frame, {0: 1.0}, normalized=False)
    return MassFunction._from_arithmetic(m1.frame, acc, normalized=False)


def dempster_combine(m1: MassFunction, m2: MassFunction) -> Combined:
    """Dempster's rule, returning the normalized sum and its conflict."""
    acc = _intersections(m1, m2)
    # any ∅ mass already present in the inputs lands on ∅ as well
    kappa = acc.pop(0, 0.0)
    if sum(acc.values()) <= PRUNE:
        raise NonCombinableError("total conflict: the cores do not intersect")
    out = MassFunction._from_arithmetic(m1.frame, acc, normalized=True)
    return Combined(out, ConflictReport.from_kappa(kappa))


def orthogonal_sum(*ms: MassFunction) -> MassFunction:
    """Left fold of Dempster's rule."""
    if not ms:
        raise ValidationError("nothing to combine")
    return reduce(lambda a, b: dempster_combine(a, b).mass, ms)


def weight_of_conflict(ms: Sequence[MassFunction]) -> float:
    """Natural-log weight of conflict of a sequence, accumulated left to right."""
    ms = list(ms)
    if not ms:
        raise ValidationError("weight of conflict of an empty list")
    acc = ms[0].normalize()
    total = 0.0
    for m in ms[1:]:
        acc, report = dempster_combine(acc, m)
        total += report.weight
    return total


def dempster_condition(m: MassFunction, subset: SubsetLike) -> MassFunction:
    """Dempster conditioning: combine with the categorical on B."""
    b = as_mask(m.frame, subset)
    if b == 0:
        raise NonCombinableError("conditioning on the empty set")
    try:
        return dempster_combine(m, MassFunction.categorical(m.frame, b)).mass
    except NonCombinableError:
        raise NonCombinableError("pl(B) = 0: cannot condition on an implausible event") from None


def geometric_condition(m: MassFunction, subset: SubsetLike) -> MassFunction:
    """Geometric conditioning b(A|B) = b(A∩B)/b(B), rebuilt through Möbius inversion."""
    b = as_mask(m.frame, subset)
    bb = belief(m, b)
    if bb <= PRUNE:
        raise NonCombinableError("b(B) = 0: geometric conditioning undefined")
    bel = belief_values(m)
    idx = np.arange(len(bel))
    return mobius_inverse(m.frame, bel[idx & b] / bb)


def discount(m: MassFunction, eps: float) -> MassFunction:
    """Scale every mass by (1 - eps) and move eps onto Θ."""
    if not 0.0 <= eps <= 1.0:
        raise ValidationError(f"discount rate {eps} outside [0, 1]")
    full = m.frame.full
    out = {k: (1.0 - eps) * v for k, v in m.focal.items()}
    out[full] = out.get(full, 0.0) + eps
    return MassFunction._from_arithmetic(m.frame, out, normalized=m.normalized)
