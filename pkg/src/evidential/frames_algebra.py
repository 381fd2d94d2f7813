"""Compatible frames as partitions of one base frame.

A refining maps each element of a coarse frame to a block of a finer one.
Minimal refinement (⊗) is the meet of partitions in the refinement order,
maximal coarsening (⊕ on frames) is their join.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FrameMismatchError, ValidationError
from .frame_core import (
    Frame,
    MassFunction,
    SubsetLike,
    _same_frame,
    as_mask,
    iter_bits,
)


@dataclass(frozen=True)
class Refining:
    """images[i] is the target subset that source element i splits into."""

    source: Frame
    target: Frame
    images: tuple

    def __post_init__(self):
        images = tuple(int(x) for x in self.images)
        if len(images) != self.source.size:
            raise ValidationError("one image per source element is required")
        seen = 0
        for img in images:
            if img == 0:
                raise ValidationError("refining images must be non-empty")
            if img & seen:
                raise ValidationError("refining images must be disjoint")
            if img & ~self.target.full:
                raise ValidationError("image outside the target frame")
            seen |= img
        if seen != self.target.full:
            raise ValidationError("refining images must cover the target frame")
        object.__setattr__(self, "images", images)

    def image(self, subset: SubsetLike) -> int:
        a = as_mask(self.source, subset)
        out = 0
        for i in iter_bits(a):
            out |= self.images[i]
        return out

    def compose(self, finer: "Refining") -> "Refining":
        """self: Θ → Ω, finer: Ω → Ψ, result Θ → Ψ."""
        _same_frame(self.target, finer.source)
        return Refining(self.source, finer.target, tuple(finer.image(img) for img in self.images))


def inner_reduction(r: Refining, subset: SubsetLike) -> int:
    """Source elements whose whole image lies inside A."""
    a = as_mask(r.target, subset)
    return sum(1 << i for i, img in enumerate(r.images) if not (img & ~a))


def outer_reduction(r: Refining, subset: SubsetLike) -> int:
    """Source elements whose image meets A."""
    a = as_mask(r.target, subset)
    return sum(1 << i for i, img in enumerate(r.images) if img & a)


def vacuous_extension(m: MassFunction, r: Refining) -> MassFunction:
    _same_frame(m.frame, r.source)
    acc: dict[int, float] = {}
    for a, v in m.focal.items():
        img = r.image(a)
        acc[img] = acc.get(img, 0.0) + v
    return MassFunction._from_arithmetic(r.target, acc, normalized=m.normalized)


def restriction(m: MassFunction, r: Refining) -> MassFunction:
    """Marginal of m on the coarse frame: each focal element maps to its outer reduction."""
    _same_frame(m.frame, r.target)
    acc: dict[int, float] = {}
    for b, v in m.focal.items():
        a = outer_reduction(r, b)
        acc[a] = acc.get(a, 0.0) + v
    return MassFunction._from_arithmetic(r.source, acc, normalized=m.normalized)


def _canonical(blocks: Iterable[int]) -> tuple:
    # order blocks by their lowest element
    return tuple(sorted(blocks, key=lambda b: b & -b))


class PartitionFrame:
    """A frame given as a partition of a base frame into blocks."""

    __slots__ = ("base", "blocks", "_frame")

    def __init__(self, base: Frame, blocks: Iterable):
        masks = [as_mask(base, b) for b in blocks]
        seen = 0
        for b in masks:
            if b == 0:
                raise ValidationError("partition blocks must be non-empty")
            if b & seen:
                raise ValidationError("partition blocks must be disjoint")
            seen |= b
        if seen != base.full:
            raise ValidationError("partition blocks must cover the base frame")
        self.base = base
        self.blocks = _canonical(masks)
        self._frame = None

    @classmethod
    def discrete(cls, base: Frame) -> "PartitionFrame":
        return cls(base, [1 << i for i in range(base.size)])

    @classmethod
    def unit(cls, base: Frame) -> "PartitionFrame":
        return cls(base, [base.full])

    @classmethod
    def parse(cls, base: Frame, text: str) -> "PartitionFrame":
        """'12|34' style notation when every base label is one character,
        otherwise blocks separated by '|' with labels separated by ','."""
        chars = all(len(x) == 1 for x in base.labels) and "," not in text
        groups = []
        for part in text.split("|"):
            part = part.strip()
            labels = list(part) if chars else part.split(",")
            groups.append([x.strip() for x in labels if x.strip()])
        return cls(base, groups)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def size(self) -> int:
        return len(self.blocks)

    @property
    def frame(self) -> Frame:
        if self._frame is None:
            labels = tuple("+".join(self.base.labels_of(b)) for b in self.blocks)
            self._frame = Frame(labels, name=f"partition of {self.base.name or 'base'}")
        return self._frame

    def refining(self) -> Refining:
        """Refining from this frame to the base frame."""
        return Refining(self.frame, self.base, self.blocks)

    def block_of(self, element: int) -> int:
        for i, b in enumerate(self.blocks):
            if b >> element & 1:
                return i
        raise ValidationError(f"element {element} outside the base")

    def refines(self, other: "PartitionFrame") -> bool:
        """True iff every block of self lies inside a block of other."""
        _same_frame(self.base, other.base)
        return all(any(not (b & ~c) for c in other.blocks) for b in self.blocks)

    def __eq__(self, other) -> bool:
        return isinstance(other, PartitionFrame) and self.base == other.base and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash((self.base, self.blocks))

    def __repr__(self) -> str:
        return "{" + "|".join("".join(self.base.labels_of(b)) if all(len(x) == 1 for x in self.base.labels)
                              else ",".join(self.base.labels_of(b)) for b in self.blocks) + "}"


def refining_between(coarse: PartitionFrame, fine: PartitionFrame) -> Refining:
    """Refining from a coarse partition's frame to a finer partition's frame."""
    if not fine.refines(coarse):
        raise ValidationError(f"{fine} does not refine {coarse}")
    images = []
    for c in coarse.blocks:
        images.append(sum(1 << j for j, f in enumerate(fine.blocks) if not (f & ~c)))
    return Refining(coarse.frame, fine.frame, tuple(images))


def _shared_base(frames: Sequence[PartitionFrame]) -> Frame:
    if not frames:
        raise ValidationError("at least one frame is required")
    base = frames[0].base
    for f in frames[1:]:
        if f.base != base:
            raise FrameMismatchError("frames do not share a base")
    return base


@dataclass(frozen=True)
class MinimalRefinement:
    partition: PartitionFrame
    refinings: tuple  # one per input frame, into partition.frame


def minimal_refinement(frames: Sequence[PartitionFrame]) -> MinimalRefinement:
    """Coarsest common refinement: non-empty intersections of one block per frame."""
    base = _shared_base(frames)
    groups: dict[tuple, int] = {}
    for x in range(base.size):
        key = tuple(f.block_of(x) for f in frames)
        groups[key] = groups.get(key, 0) | (1 << x)
    out = PartitionFrame(base, groups.values())
    return MinimalRefinement(out, tuple(refining_between(f, out) for f in frames))


def meet(frames: Sequence[PartitionFrame]) -> PartitionFrame:
    return minimal_refinement(frames).partition


def maximal_coarsening(frames: Sequence[PartitionFrame]) -> PartitionFrame:
    """Finest common coarsening: connected components of overlapping blocks."""
    base = _shared_base(frames)
    parent = list(range(base.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in frames:
        for b in f.blocks:
            elems = list(iter_bits(b))
            for y in elems[1:]:
                parent[find(y)] = find(elems[0])
    comps: dict[int, int] = {}
    for x in range(base.size):
        r = find(x)
        comps[r] = comps.get(r, 0) | (1 << x)
    return PartitionFrame(base, comps.values())


def maximal_coarsening_by_splitting(frames: Sequence[PartitionFrame]) -> PartitionFrame:
    """Cross-check for maximal_coarsening: start from the unit frame and keep
    splitting a block whenever a proper part of it is a union of blocks of
    every input frame.  Exponential; meant for at most three small frames."""
    base = _shared_base(frames)
    if len(frames) > 3:
        raise ValidationError("the splitting procedure is limited to three frames")
    current = [base.full]
    changed = True
    while changed:
        changed = False
        for li, l in enumerate(current):
            inside = [b for b in frames[0].blocks if not (b & ~l)]
            split = None
            for r in range(1, len(inside)):
                for combo in itertools.combinations(inside, r):
                    part = 0
                    for b in combo:
                        part |= b
                    if all(_is_union_of_blocks(part, f) for f in frames[1:]):
                        split = part
                        break
                if split is not None:
                    break
            if split is not None:
                current[li:li + 1] = [split, l & ~split]
                changed = True
                break
    return PartitionFrame(base, current)


def _is_union_of_blocks(part: int, f: PartitionFrame) -> bool:
    return all((b & part) == 0 or not (b & ~part) for b in f.blocks)


def join(frames: Sequence[PartitionFrame]) -> PartitionFrame:
    return maximal_coarsening(frames)


@dataclass(frozen=True)
class IndependenceResult:
    independent: bool
    witness: tuple | None  # block indices, one per frame, with empty intersection

    def __bool__(self) -> bool:
        return self.independent


def is_independent_IF(frames: Sequence[PartitionFrame]) -> IndependenceResult:
    """Independence of frames: |⊗| equals the product of the frame sizes."""
    _shared_base(frames)
    size = meet(frames).size
    if size == math.prod(f.size for f in frames):
        return IndependenceResult(True, None)
    for combo in itertools.product(*(range(f.size) for f in frames)):
        acc = frames[0].base.full
        for f, j in zip(frames, combo):
            acc &= f.blocks[j]
            if not acc:
                return IndependenceResult(False, combo)
    raise AssertionError("size test and block search disagree")  # unreachable


def combinability_always(frames: Sequence[PartitionFrame]) -> IndependenceResult:
    """Every choice of b.f.s on the frames is combinable on their minimal refinement
    exactly when the frames are independent."""
    return is_independent_IF(frames)


@dataclass(frozen=True)
class LatticeRelations:
    I1: bool
    I2: bool
    I3: bool
    I1_star: bool
    I2_star: bool
    I3_star: bool

    def as_dict(self) -> dict:
        return {
            "I1": self.I1, "I2": self.I2, "I3": self.I3,
            "I1*": self.I1_star, "I2*": self.I2_star, "I3*": self.I3_star,
        }


def lattice_relations(frames: Sequence[PartitionFrame]) -> LatticeRelations:
    """Matroid-style independence relations in the two semimodular orders.

    I2 and I2* depend on the order of `frames`.
    """
    base = _shared_base(frames)
    if len(frames) < 2:
        raise ValidationError("lattice relations need at least two frames")
    n = len(frames)
    discrete = PartitionFrame.discrete(base)
    unit = PartitionFrame.unit(base)
    others = [[f for i, f in enumerate(frames) if i != j] for j in range(n)]

    i1 = all(meet([frames[j], join(others[j])]) != frames[j] for j in range(n))
    i2 = all(meet([frames[j], join(frames[:j])]) == discrete for j in range(1, n))
    i3 = base.size - join(frames).size == sum(base.size - f.size for f in frames)
    i1s = all(join([frames[j], meet(others[j])]) != frames[j] for j in range(n))
    i2s = all(join([frames[j], meet(frames[:j])]) == unit for j in range(1, n))
    i3s = meet(frames).size - 1 == sum(f.size - 1 for f in frames)
    return LatticeRelations(i1, i2, i3, i1s, i2s, i3s)


class FrameFamily:
    """Partitions of one base frame, closed under ⊗ and ⊕ on demand."""

    def __init__(self, base: Frame, partitions: Iterable[PartitionFrame] = ()):
        self.base = base
        self._members: dict[PartitionFrame, None] = {}
        self.add(PartitionFrame.discrete(base))
        self.add(PartitionFrame.unit(base))
        for p in partitions:
            self.add(p)

    def add(self, p: PartitionFrame) -> PartitionFrame:
        _same_frame(self.base, p.base)
        self._members.setdefault(p, None)
        return p

    @property
    def members(self) -> list:
        return list(self._members)

    def __contains__(self, p) -> bool:
        return p in self._members

    def __len__(self) -> int:
        return len(self._members)

    def close(self, limit: int = 10000) -> "FrameFamily":
        """Add pairwise meets and joins until nothing new appears."""
        changed = True
        while changed:
            changed = False
            current = self.members
            for a, b in itertools.combinations(current, 2):
                for p in (meet([a, b]), join([a, b])):
                    if p not in self._members:
                        self.add(p)
                        changed = True
                        if len(self) > limit:
                            raise ValidationError("family closure exceeded its size limit")
        return self

    def refining(self, coarse: PartitionFrame, fine: PartitionFrame) -> Refining:
        return refining_between(coarse, fine)


def all_partitions(base: Frame) -> list:
    """Every partition of the base frame (Bell-number many)."""
    n = base.size
    out = []

    def grow(i, blocks):
        if i == n:
            out.append(PartitionFrame(base, list(blocks)))
            return
        bit = 1 << i
        for k in range(len(blocks)):
            blocks[k] |= bit
            grow(i + 1, blocks)
            blocks[k] &= ~bit
        blocks.append(bit)
        grow(i + 1, blocks)
        blocks.pop()

    grow(0, [])
    return out
