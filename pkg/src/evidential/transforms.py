"""Probability transforms and belief functions built from likelihood vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError, ZeroSingletonBeliefError
from .frame_core import TOL, Frame, MassFunction, iter_bits, popcount


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    """A probability vector over the singletons of a frame."""

    frame: Frame
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).copy()
        if p.shape != (self.frame.size,):
            raise ValidationError("one probability per frame element is required")
        if np.any(p < -TOL) or abs(p.sum() - 1.0) > TOL:
            raise ValidationError(f"not a probability vector: {p}")
        p[p < 0] = 0.0
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __getitem__(self, label: str) -> float:
        return float(self.probs[self.frame.index(label)])

    def as_mass(self) -> MassFunction:
        return MassFunction._from_arithmetic(
            self.frame, {1 << i: p for i, p in enumerate(self.probs)}, normalized=True
        )

    def prob(self, mask: int) -> float:
        return float(sum(self.probs[i] for i in iter_bits(mask)))

    def allclose(self, other, tol: float = TOL) -> bool:
        q = other.probs if isinstance(other, ProbabilityDistribution) else np.asarray(other)
        return bool(np.allclose(self.probs, q, rtol=0.0, atol=tol))

    def __repr__(self) -> str:
        return f"ProbabilityDistribution({np.array2string(self.probs, precision=6)})"


def pignistic(m: MassFunction) -> ProbabilityDistribution:
    """Split each focal mass evenly among its elements."""
    m = m.normalize()
    p = np.zeros(m.frame.size)
    for a, v in m.focal.items():
        share = v / popcount(a)
        for i in iter_bits(a):
            p[i] += share
    return ProbabilityDistribution(m.frame, p)


def singleton_plausibilities(m: MassFunction) -> np.ndarray:
    pl = np.zeros(m.frame.size)
    for a, v in m.focal.items():
        for i in iter_bits(a):
            pl[i] += v
    return pl


def singleton_beliefs(m: MassFunction) -> np.ndarray:
    b = np.zeros(m.frame.size)
    for a, v in m.focal.items():
        if popcount(a) == 1:
            b[a.bit_length() - 1] += v
    return b


def relative_plausibility(m: MassFunction) -> ProbabilityDistribution:
    pl = singleton_plausibilities(m)
    return ProbabilityDistribution(m.frame, pl / pl.sum())


def relative_belief(m: MassFunction) -> ProbabilityDistribution:
    b = singleton_beliefs(m)
    total = b.sum()
    if total <= 0.0:
        raise ZeroSingletonBeliefError("no singleton carries mass; relative belief undefined")
    return ProbabilityDistribution(m.frame, b / total)


def _likelihoods(gammas: Sequence[float], frame: Frame | None) -> tuple:
    g = np.asarray(gammas, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValidationError("likelihoods must be a non-empty vector")
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise ValidationError("likelihoods must be finite and non-negative")
    if g.sum() <= 0.0:
        raise ValidationError("all likelihoods are zero")
    frame = frame or Frame.of_size(g.size, prefix="y")
    if frame.size != g.size:
        raise ValidationError("one likelihood per frame element is required")
    return g, frame


def dirichlet_from_likelihoods(
    gammas: Sequence[float], m_theta: float | None = None, frame: Frame | None = None
) -> MassFunction:
    """Normalized likelihoods scaled by (1 - m_theta) on singletons; m_theta on Θ.

    m_theta defaults to 1/n.  m_theta = 0 gives the Bayesian normalization.
    """
    g, frame = _likelihoods(gammas, frame)
    if m_theta is None:
        m_theta = 1.0 / g.size
    if not 0.0 <= m_theta <= 1.0:
        raise ValidationError("m_theta must lie in [0, 1]")
    p = g / g.sum() * (1.0 - m_theta)
    masses = {1 << i: x for i, x in enumerate(p)}
    masses[frame.full] = masses.get(frame.full, 0.0) + m_theta
    return MassFunction._from_arithmetic(frame, masses, normalized=True)


def bayesian_from_likelihoods(gammas: Sequence[float], frame: Frame | None = None) -> MassFunction:
    return dirichlet_from_likelihoods(gammas, 0.0, frame)


def consonant_from_likelihoods(gammas: Sequence[float], frame: Frame | None = None) -> MassFunction:
    """Consonant b.f. whose singleton plausibilities are gamma / max(gamma).

    Focal elements are the upper level sets of gamma; tied values share one level.
    """
    g, frame = _likelihoods(gammas, frame)
    levels = np.unique(g)[::-1]  # distinct values, descending
    top = levels[0]
    masses = {}
    for hi, lo in zip(levels, list(levels[1:]) + [0.0]):
        upper = 0
        for i in np.flatnonzero(g >= hi):
            upper |= 1 << int(i)
        masses[upper] = (hi - lo) / top
    return MassFunction._from_arithmetic(frame, masses, normalized=True)
