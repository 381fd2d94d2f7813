"""JSON documents for mass functions, frame families, total belief problems
and evidential models.  Sets are written as label lists in frame order and
reals with 17 significant digits."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ValidationError
from .frame_core import Frame, MassFunction
from .frames_algebra import PartitionFrame, Refining
from .total_belief import TotalBeliefProblem


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValidationError(f"cannot serialize non-finite value {x}")
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """json.dumps with every float written as %.17g."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise ValidationError(f"cannot serialize {type(obj).__name__}")


def load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValidationError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def _require(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ValidationError(f"{where}: missing field {key!r}")
    return doc[key]


# mass functions


def mass_to_doc(m: MassFunction) -> dict:
    return {
        "frame": list(m.frame.labels),
        "masses": [{"set": list(m.frame.labels_of(k)), "mass": v} for k, v in m.items()],
        "mode": m.mode,
    }


def mass_from_doc(doc: dict, frame: Frame | None = None) -> MassFunction:
    where = "mass function document"
    labels = doc.get("frame") if isinstance(doc, dict) else None
    if frame is None:
        if not isinstance(labels, list):
            raise ValidationError(f"{where}: missing field 'frame'")
        frame = Frame(tuple(labels))
    elif labels is not None and tuple(labels) != frame.labels:
        raise ValidationError(f"{where}: frame does not match {frame.labels}")
    mode = doc.get("mode", "normalized")
    if mode not in ("normalized", "unnormalized"):
        raise ValidationError(f"{where}: mode must be 'normalized' or 'unnormalized'")
    entries = _require(doc, "masses", where)
    masses: dict = {}
    for e in entries:
        s = frame.mask(_require(e, "set", where))
        masses[s] = masses.get(s, 0.0) + float(_require(e, "mass", where))
    return MassFunction(frame, masses, normalized=(mode == "normalized"))


# partitions


def partition_from_doc(base: Frame, doc) -> PartitionFrame:
    if isinstance(doc, str):
        return PartitionFrame.parse(base, doc)
    if isinstance(doc, list):
        return PartitionFrame(base, [list(b) for b in doc])
    raise ValidationError("a partition is a '12|34' string or a list of label lists")


def family_from_doc(doc: dict) -> list:
    base = Frame(tuple(_require(doc, "base", "family document")))
    frames = _require(doc, "frames", "family document")
    return [partition_from_doc(base, f) for f in frames]


def partition_to_doc(p: PartitionFrame) -> list:
    return [list(p.base.labels_of(b)) for b in p.blocks]


# total belief problems


def problem_from_doc(doc: dict) -> TotalBeliefProblem:
    where = "problem document"
    fine = Frame(tuple(_require(doc, "frame", where)))
    blocks = _require(doc, "refining", where)
    if not isinstance(blocks, dict):
        raise ValidationError(f"{where}: 'refining' maps coarse labels to fine label lists")
    coarse = Frame(tuple(blocks))
    r = Refining(coarse, fine, tuple(fine.mask(blocks[c]) for c in coarse.labels))
    prior = mass_from_doc(_require(doc, "prior", where), coarse)
    conds = {}
    for lab, cdoc in _require(doc, "conditionals", where).items():
        conds[coarse.index(lab)] = mass_from_doc(cdoc, fine)
    return TotalBeliefProblem(r, prior, conds)


def problem_to_doc(p: TotalBeliefProblem) -> dict:
    r = p.refining
    return {
        "frame": list(r.target.labels),
        "refining": {c: list(r.target.labels_of(img)) for c, img in zip(r.source.labels, r.images)},
        "prior": {k: v for k, v in mass_to_doc(p.prior).items() if k != "frame"},
        "conditionals": {
            r.source.labels[i]: {k: v for k, v in mass_to_doc(m).items() if k != "frame"}
            for i, m in sorted(p.conditionals.items())
        },
    }
