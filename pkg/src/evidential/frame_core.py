"""Frames, subsets, mass functions and the belief/plausibility/Möbius calculus.

Subsets are bitmasks over the frame's label order: bit i set means the
i-th label belongs to the subset.  Mass functions keep only their focal
elements, so nothing here is exponential unless it has to enumerate the
power set, in which case the enumeration cap applies.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .errors import (
    EnumerationCapError,
    FrameMismatchError,
    NonCombinableError,
    NotABeliefFunctionError,
    ValidationError,
)

TOL = 1e-9
PRUNE = 1e-12
DEFAULT_ENUM_CAP = 20


def enumeration_cap() -> int:
    """Largest frame size for which 2^n enumeration is allowed."""
    raw = os.environ.get("EVID_ENUM_CAP")
    if raw is None or raw.strip() == "":
        return DEFAULT_ENUM_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(f"EVID_ENUM_CAP must be an integer, got {raw!r}")
    if cap < 1:
        raise ValidationError("EVID_ENUM_CAP must be positive")
    return cap


def check_cap(n: int, what: str = "operation") -> None:
    cap = enumeration_cap()
    if n > cap:
        raise EnumerationCapError(
            f"{what} enumerates 2^{n} subsets; frame size {n} exceeds the cap {cap}"
            " (raise it with EVID_ENUM_CAP)"
        )


def iter_bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of `mask`, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return int(mask).bit_count()


@dataclass(frozen=True)
class Frame:
    """A finite frame of discernment with a fixed label order."""

    labels: tuple
    name: str = ""

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise ValidationError("a frame needs at least one element")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"frame labels must be distinct: {labels}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def of_size(cls, n: int, prefix: str = "t", name: str = "") -> "Frame":
        return cls(tuple(f"{prefix}{i + 1}" for i in range(n)), name)

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise ValidationError(f"{label!r} is not an element of frame {self.labels}")

    def mask(self, labels: Iterable[str]) -> int:
        out = 0
        for lab in labels:
            out |= 1 << self.index(lab)
        return out

    def labels_of(self, mask: int) -> tuple:
        return tuple(self.labels[i] for i in iter_bits(mask))

    def subset(self, which) -> "Subset":
        return Subset(self, as_mask(self, which))

    def __repr__(self) -> str:
        tag = f"{self.name}:" if self.name else ""
        return f"Frame({tag}{{{', '.join(self.labels)}}})"


@dataclass(frozen=True)
class Subset:
    """A subset of a frame, stored as a bitmask."""

    frame: Frame
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask > self.frame.full:
            raise ValidationError(f"mask {self.mask} out of range for {self.frame}")

    @property
    def labels(self) -> tuple:
        return self.frame.labels_of(self.mask)

    def __len__(self) -> int:
        return popcount(self.mask)

    def complement(self) -> "Subset":
        return Subset(self.frame, self.frame.full & ~self.mask)

    def __and__(self, other: "Subset") -> "Subset":
        _same_frame(self.frame, other.frame)
        return Subset(self.frame, self.mask & other.mask)

    def __or__(self, other: "Subset") -> "Subset":
        _same_frame(self.frame, other.frame)
        return Subset(self.frame, self.mask | other.mask)


SubsetLike = Union[int, Subset, str, Iterable[str]]


def _same_frame(f1: Frame, f2: Frame) -> None:
    if f1 != f2:
        raise FrameMismatchError(f"frame mismatch: {f1} vs {f2}")


def as_mask(frame: Frame, subset: SubsetLike) -> int:
    """Accept a bitmask, a Subset, a single label or an iterable of labels."""
    if isinstance(subset, Subset):
        _same_frame(frame, subset.frame)
        return subset.mask
    if isinstance(subset, (bool, np.bool_)):
        raise ValidationError("a boolean is not a subset")
    if isinstance(subset, (int, np.integer)):
        subset = int(subset)
        if subset < 0 or subset > frame.full:
            raise ValidationError(f"mask {subset} out of range for {frame}")
        return subset
    if isinstance(subset, str):
        return frame.mask([subset])
    return frame.mask(subset)


class MassFunction:
    """A basic probability assignment on a finite frame.

    Only focal elements (strictly positive masses) are stored.  In
    normalized mode the empty set carries no mass; unnormalized mode admits
    a mass on the empty set, as produced by the conjunctive rule.
    """

    __slots__ = ("frame", "_focal", "normalized")

    def __init__(self, frame: Frame, masses: Mapping, normalized: bool = True):
        focal: dict[int, float] = {}
        for key, value in masses.items():
            value = float(value)
            if not np.isfinite(value):
                raise ValidationError(f"mass {value} is not finite")
            if value < -PRUNE:
                raise ValidationError(f"negative mass {value}")
            if value <= 0.0:
                continue
            mask = as_mask(frame, key)
            focal[mask] = focal.get(mask, 0.0) + value
        if normalized and focal.get(0, 0.0) > 0.0:
            raise ValidationError("the empty set carries mass in normalized mode")
        total = sum(focal.values())
        if abs(total - 1.0) > TOL:
            raise ValidationError(f"masses sum to {total!r}, not 1")
        # same pruning rule as computed masses, so stored focal sets never carry denormal mass
        if any(v <= PRUNE for v in focal.values()):
            focal = {k: v for k, v in focal.items() if v > PRUNE}
            kept = sum(focal.values())
            focal = {k: v / kept for k, v in focal.items()}
        self.frame = frame
        self._focal = focal
        self.normalized = bool(normalized)

    @classmethod
    def _from_arithmetic(cls, frame: Frame, focal: Mapping[int, float], normalized: bool) -> "MassFunction":
        """Build from computed masses: prune tiny entries, renormalize."""
        kept = {k: v for k, v in focal.items() if v > PRUNE}
        if normalized:
            kept.pop(0, None)
        total = sum(kept.values())
        if total <= 0.0:
            raise NonCombinableError("no mass left after pruning")
        obj = cls.__new__(cls)
        obj.frame = frame
        obj._focal = {k: v / total for k, v in kept.items()}
        obj.normalized = bool(normalized)
        return obj

    # constructors

    @classmethod
    def vacuous(cls, frame: Frame) -> "MassFunction":
        return cls(frame, {frame.full: 1.0})

    @classmethod
    def categorical(cls, frame: Frame, subset: SubsetLike) -> "MassFunction":
        mask = as_mask(frame, subset)
        if mask == 0:
            raise ValidationError("categorical mass function on the empty set")
        return cls(frame, {mask: 1.0})

    @classmethod
    def bayesian(cls, frame: Frame, probs: Sequence[float]) -> "MassFunction":
        probs = [float(p) for p in probs]
        if len(probs) != frame.size:
            raise ValidationError("one probability per frame element is required")
        return cls(frame, {1 << i: p for i, p in enumerate(probs)})

    @classmethod
    def simple_support(cls, frame: Frame, focus: SubsetLike, sigma: float) -> "MassFunction":
        mask = as_mask(frame, focus)
        if not 0.0 <= sigma <= 1.0:
            raise ValidationError("support degree must lie in [0, 1]")
        if mask == frame.full:
            return cls.vacuous(frame)
        return cls(frame, {mask: sigma, frame.full: 1.0 - sigma})

    # access

    @property
    def focal(self) -> Mapping[int, float]:
        return MappingProxyType(self._focal)

    @property
    def mode(self) -> str:
        return "normalized" if self.normalized else "unnormalized"

    def focal_elements(self) -> list:
        return sorted(self._focal)

    def items(self) -> list:
        return sorted(self._focal.items())

    def __getitem__(self, subset: SubsetLike) -> float:
        return self._focal.get(as_mask(self.frame, subset), 0.0)

    def __len__(self) -> int:
        return len(self._focal)

    @property
    def empty_mass(self) -> float:
        return self._focal.get(0, 0.0)

    def normalize(self) -> "MassFunction":
        """Drop the empty-set mass and rescale the rest."""
        if self.normalized:
            return self
        if 1.0 - self.empty_mass <= PRUNE:
            raise NonCombinableError("all mass sits on the empty set (total conflict)")
        return MassFunction._from_arithmetic(self.frame, self._focal, normalized=True)

    def equals(self, other: "MassFunction", tol: float = TOL) -> bool:
        if not isinstance(other, MassFunction) or self.frame != other.frame:
            return False
        keys = set(self._focal) | set(other._focal)
        return all(abs(self._focal.get(k, 0.0) - other._focal.get(k, 0.0)) <= tol for k in keys)

    def __eq__(self, other) -> bool:
        return self.equals(other)

    __hash__ = None

    def to_labels(self) -> dict:
        return {self.frame.labels_of(k): v for k, v in self.items()}

    def __repr__(self) -> str:
        parts = ", ".join(
            "{" + ",".join(self.frame.labels_of(k)) + f"}}: {v:.6g}" for k, v in self.items()
        )
        return f"MassFunction({parts})"


def belief(m: MassFunction, subset: SubsetLike) -> float:
    """b(A): total mass of the non-empty focal elements contained in A."""
    a = as_mask(m.frame, subset)
    return sum(v for k, v in m._focal.items() if k and not (k & ~a))


def plausibility(m: MassFunction, subset: SubsetLike) -> float:
    """pl(A): total mass of the focal elements meeting A."""
    a = as_mask(m.frame, subset)
    return sum(v for k, v in m._focal.items() if k & a)


def core(m: MassFunction) -> int:
    out = 0
    for k in m._focal:
        out |= k
    return out


def mass_vector(m: MassFunction) -> np.ndarray:
    """Dense mass vector indexed by bitmask (length 2^n)."""
    check_cap(m.frame.size, "mass_vector")
    v = np.zeros(1 << m.frame.size)
    for k, val in m._focal.items():
        v[k] = val
    return v


def _zeta(v: np.ndarray, n: int, sign: float) -> np.ndarray:
    # subset-sum transform, one bit at a time
    v = np.array(v, dtype=float)
    for i in range(n):
        bit = 1 << i
        w = v.reshape(-1, 2, bit)
        w[:, 1, :] += sign * w[:, 0, :]
    return v


def belief_values(m: MassFunction) -> np.ndarray:
    """b(A) for every A, indexed by bitmask; b(∅) = 0."""
    v = mass_vector(m)
    v[0] = 0.0
    return _zeta(v, m.frame.size, 1.0)


def plausibility_values(m: MassFunction) -> np.ndarray:
    bel = belief_values(m)
    full = m.frame.full
    total = 1.0 - m.empty_mass
    return total - bel[full ^ np.arange(full + 1)]


def mobius_inverse(frame: Frame, bel: Sequence[float]) -> MassFunction:
    """Recover the mass function from a full vector of belief values."""
    check_cap(frame.size, "mobius_inverse")
    bel = np.asarray(bel, dtype=float)
    if bel.shape != (1 << frame.size,):
        raise ValidationError(f"expected {1 << frame.size} belief values, got {bel.shape}")
    if abs(bel[0]) > TOL or abs(bel[-1] - 1.0) > TOL:
        raise NotABeliefFunctionError("belief of ∅ must be 0 and belief of Θ must be 1")
    m = _zeta(bel, frame.size, -1.0)
    m[0] = 0.0
    worst = m.min()
    if worst < -TOL:
        raise NotABeliefFunctionError(
            f"Möbius inverse has a negative mass {worst:.3g}; the input is not superadditive"
        )
    return MassFunction._from_arithmetic(frame, {i: x for i, x in enumerate(m) if x > 0}, True)


@dataclass(frozen=True)
class Classification:
    bayesian: bool
    consonant: bool
    simple_support: bool
    vacuous: bool


def is_bayesian(m: MassFunction) -> bool:
    return all(popcount(k) == 1 for k in m._focal)


def is_consonant(m: MassFunction) -> bool:
    chain = sorted(m._focal, key=popcount)
    return all(not (a & ~b) for a, b in zip(chain, chain[1:]))


def classify(m: MassFunction) -> Classification:
    full = m.frame.full
    non_full = [k for k in m._focal if k != full]
    return Classification(
        bayesian=is_bayesian(m),
        consonant=is_consonant(m),
        simple_support=len(non_full) <= 1 and 0 not in non_full,
        vacuous=non_full == [],
    )


def weakly_includes(m1: MassFunction, m2: MassFunction) -> bool:
    """True iff b1(A) >= b2(A) for every A."""
    _same_frame(m1.frame, m2.frame)
    return bool(np.all(belief_values(m1) >= belief_values(m2) - TOL))
