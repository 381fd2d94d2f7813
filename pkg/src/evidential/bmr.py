"""Belief Modeling Regression.

Training: one 1-D Gaussian mixture per feature, fitted by EM; every
training sample is assigned to its dominant component, which turns each
mixture component into a set of training poses (a refining of the cluster
frame into the frame of training poses).

Prediction: per-feature likelihoods become a belief function on that
feature's clusters, which is carried onto the pose frame and fused with the
conjunctive rule.  Point and interval estimates follow from the fused
belief function.
"""

from __future__ import annotations

import csv
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .combination import conjunctive_combine
from .errors import NonCombinableError, ValidationError
from .frame_core import Frame, MassFunction, iter_bits
from .frames_algebra import Refining, vacuous_extension
from .transforms import (
    consonant_from_likelihoods,
    dirichlet_from_likelihoods,
    pignistic,
)

EM_TOL = 1e-8
EM_MAX_ITER = 200
VARIANCE_FLOOR = 1e-6
LOG_TINY = np.log(np.finfo(float).tiny)
VARIANTS = ("dirichlet", "bayesian", "consonant")


class ExtremeFeatureWarning(UserWarning):
    """A feature value had zero likelihood under every component."""


@dataclass(frozen=True, eq=False)
class TrainingSet:
    poses: np.ndarray  # (T, D)
    features: np.ndarray  # (T, N)

    def __post_init__(self):
        q = np.asarray(self.poses, dtype=float)
        y = np.asarray(self.features, dtype=float)
        if q.ndim == 1:
            q = q[:, None]
        if y.ndim == 1:
            y = y[:, None]
        if q.shape[0] != y.shape[0]:
            raise ValidationError("poses and features must have the same number of rows")
        if q.shape[0] < 2:
            raise ValidationError("at least two training samples are required")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(y))):
            raise ValidationError("training data must be finite and complete")
        object.__setattr__(self, "poses", q)
        object.__setattr__(self, "features", y)

    @property
    def size(self) -> int:
        return self.poses.shape[0]


def load_training_csv(path) -> TrainingSet:
    """CSV with header pose_0..pose_{D-1}, feat_0..feat_{N-1}."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError("empty training file")
    header = [h.strip() for h in rows[0]]
    pose_cols = [i for i, h in enumerate(header) if h.startswith("pose_")]
    feat_cols = [i for i, h in enumerate(header) if h.startswith("feat_")]
    expect_p = [f"pose_{d}" for d in range(len(pose_cols))]
    expect_f = [f"feat_{d}" for d in range(len(feat_cols))]
    if [header[i] for i in pose_cols] != expect_p or [header[i] for i in feat_cols] != expect_f:
        raise ValidationError("header must read pose_0..pose_{D-1}, feat_0..feat_{N-1}")
    if not pose_cols or not feat_cols or len(pose_cols) + len(feat_cols) != len(header):
        raise ValidationError("training file needs pose_* and feat_* columns only")
    try:
        data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"non-numeric training entry: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValidationError("ragged training rows")
    return TrainingSet(data[:, pose_cols], data[:, feat_cols])


@dataclass(frozen=True, eq=False)
class GaussianMixture1D:
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        for name in ("weights", "means", "variances"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.weights.shape == self.means.shape == self.variances.shape):
            raise ValidationError("mixture parameters must have equal length")
        if np.any(self.weights <= 0) or abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValidationError("mixture weights must be positive and sum to 1")
        if np.any(self.variances <= 0):
            raise ValidationError("mixture variances must be positive")

    @property
    def k(self) -> int:
        return len(self.weights)

    def log_densities(self, y: float) -> np.ndarray:
        """log N(y; mean_j, var_j) for each component."""
        return -0.5 * (np.log(2 * np.pi * self.variances) + (y - self.means) ** 2 / self.variances)

    def log_likelihoods(self, y: float, weighted: bool = True) -> np.ndarray:
        out = self.log_densities(y)
        return out + np.log(self.weights) if weighted else out

    def log_likelihood(self, values: Sequence[float]) -> float:
        v = np.asarray(values, dtype=float)[:, None]
        comp = -0.5 * (np.log(2 * np.pi * self.variances) + (v - self.means) ** 2 / self.variances)
        return float(logsumexp(comp + np.log(self.weights), axis=1).sum())

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }


def _kmeans_pp(values: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = [values[rng.integers(len(values))]]
    for _ in range(1, k):
        d2 = np.min((values[:, None] - np.array(centers)[None, :]) ** 2, axis=1)
        total = d2.sum()
        if total <= 0:
            break
        centers.append(values[rng.choice(len(values), p=d2 / total)])
    return np.array(centers)


def _lloyd(values: np.ndarray, centers: np.ndarray, iters: int = 100) -> np.ndarray:
    for _ in range(iters):
        labels = np.argmin(np.abs(values[:, None] - centers[None, :]), axis=1)
        new = np.array([values[labels == j].mean() if np.any(labels == j) else centers[j]
                        for j in range(len(centers))])
        if np.allclose(new, centers, rtol=0, atol=0):
            break
        centers = new
    return centers


def fit_em_1d(
    values: Sequence[float],
    k: int,
    seed: int = 0,
    tol: float = EM_TOL,
    max_iter: int = EM_MAX_ITER,
) -> GaussianMixture1D:
    """Maximum-likelihood 1-D Gaussian mixture by EM.

    Initial means come from k-means++ seeding refined by Lloyd iterations.
    Variances never drop below 1e-6 times the squared data range.
    """
    x = np.asarray(values, dtype=float).ravel()
    if k < 1:
        raise ValidationError("k must be at least 1")
    if k > len(np.unique(x)):
        raise ValidationError(f"k={k} exceeds the number of distinct values {len(np.unique(x))}")
    span = float(x.max() - x.min())
    floor = VARIANCE_FLOOR * span ** 2 if span > 0 else VARIANCE_FLOOR
    rng = np.random.default_rng(seed)
    means = np.sort(_lloyd(x, _kmeans_pp(x, k, rng)))
    labels = np.argmin(np.abs(x[:, None] - means[None, :]), axis=1)
    weights = np.array([max(np.mean(labels == j), 1.0 / len(x)) for j in range(k)])
    weights /= weights.sum()
    variances = np.array([max(np.var(x[labels == j]) if np.any(labels == j) else floor, floor)
                          for j in range(k)])

    prev = -np.inf
    for _ in range(max_iter):
        logp = -0.5 * (np.log(2 * np.pi * variances) + (x[:, None] - means) ** 2 / variances) + np.log(weights)
        norm = logsumexp(logp, axis=1)
        ll = float(norm.sum())
        resp = np.exp(logp - norm[:, None])
        nk = resp.sum(axis=0)
        # a component that lost all its points keeps its parameters
        alive = nk > 1e-300
        weights = np.where(alive, nk / len(x), 1e-300)
        weights /= weights.sum()
        safe = np.where(alive, nk, 1.0)
        means = np.where(alive, (resp * x[:, None]).sum(axis=0) / safe, means)
        variances = np.where(alive, (resp * (x[:, None] - means) ** 2).sum(axis=0) / safe, variances)
        variances = np.maximum(variances, floor)
        if ll - prev < tol:
            break
        prev = ll
    order = np.argsort(means, kind="stable")
    return GaussianMixture1D(weights[order], means[order], variances[order])


@dataclass(frozen=True, eq=False)
class EvidentialModel:
    mixtures: tuple
    refinings: tuple  # per feature: tuple of pose-index bitmasks, one per cluster
    poses: np.ndarray  # (T, D)
    m_theta: tuple  # per feature
    weighted: bool = True

    def __post_init__(self):
        q = np.asarray(self.poses, dtype=float)
        if q.ndim == 1:
            q = q[:, None]
        object.__setattr__(self, "poses", q)
        T = q.shape[0]
        full = (1 << T) - 1
        if not (len(self.mixtures) == len(self.refinings) == len(self.m_theta)):
            raise ValidationError("one mixture, refining and m_theta per feature")
        for mix, images in zip(self.mixtures, self.refinings):
            if mix.k != len(images):
                raise ValidationError("one refining image per mixture component")
            seen = 0
            for img in images:
                if img == 0 or img & seen:
                    raise ValidationError("refining images must be non-empty and disjoint")
                seen |= img
            if seen != full:
                raise ValidationError("refining images must cover every training pose")

    @property
    def size(self) -> int:
        return self.poses.shape[0]

    @property
    def n_features(self) -> int:
        return len(self.mixtures)

    @property
    def pose_frame(self) -> Frame:
        return Frame.of_size(self.size, prefix="q", name="poses")

    def cluster_frame(self, i: int) -> Frame:
        return Frame.of_size(self.mixtures[i].k, prefix=f"f{i}c", name=f"feature {i}")

    def refining(self, i: int) -> Refining:
        return Refining(self.cluster_frame(i), self.pose_frame, self.refinings[i])

    def to_dict(self) -> dict:
        return {
            "mixtures": [m.to_dict() for m in self.mixtures],
            "refinings": [[list(iter_bits(img)) for img in imgs] for imgs in self.refinings],
            "poses": self.poses.tolist(),
            "m_theta": list(self.m_theta),
            "weighted": self.weighted,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EvidentialModel":
        try:
            mixtures = tuple(GaussianMixture1D(m["weights"], m["means"], m["variances"]) for m in doc["mixtures"])
            refinings = tuple(tuple(sum(1 << int(k) for k in block) for block in imgs) for imgs in doc["refinings"])
            return cls(mixtures, refinings, np.asarray(doc["poses"], dtype=float),
                       tuple(float(x) for x in doc["m_theta"]), bool(doc.get("weighted", True)))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed model document: {exc}") from None


def learn_model(
    training: TrainingSet,
    clusters: int | Sequence[int],
    seed: int = 0,
    m_theta: float | Sequence[float] | None = None,
    weighted: bool = True,
) -> EvidentialModel:
    """Fit one mixture per feature and map each component to the poses it dominates."""
    N = training.features.shape[1]
    ks = [int(clusters)] * N if np.isscalar(clusters) else [int(k) for k in clusters]
    if len(ks) != N:
        raise ValidationError(f"{len(ks)} cluster counts given for {N} features")
    mixtures, refinings, thetas = [], [], []
    for i in range(N):
        y = training.features[:, i]
        mix = fit_em_1d(y, ks[i], seed=seed)  # same seed: equal columns cluster equally
        dominant = np.array([np.argmax(mix.log_likelihoods(v, weighted)) for v in y])
        keep = [j for j in range(mix.k) if np.any(dominant == j)]
        w = mix.weights[keep]
        mix = GaussianMixture1D(w / w.sum(), mix.means[keep], mix.variances[keep])
        images = tuple(sum(1 << int(t) for t in np.flatnonzero(dominant == j)) for j in keep)
        mixtures.append(mix)
        refinings.append(images)
        if m_theta is None:
            thetas.append(1.0 / len(keep))
        elif np.isscalar(m_theta):
            thetas.append(float(m_theta))
        else:
            thetas.append(float(list(m_theta)[i]))
    return EvidentialModel(tuple(mixtures), tuple(refinings), training.poses, tuple(thetas), weighted)


@dataclass(frozen=True, eq=False)
class BeliefEstimate:
    mass: MassFunction  # unnormalized, on the pose frame
    notes: list = field(default_factory=list)

    @property
    def conflict(self) -> float:
        return self.mass.empty_mass


def feature_likelihoods(model: EvidentialModel, i: int, y: float) -> np.ndarray | None:
    """Per-cluster likelihoods of feature i at y, scaled so the largest is 1.

    None when every likelihood underflows to zero."""
    logs = model.mixtures[i].log_likelihoods(float(y), model.weighted)
    top = logs.max()
    if top < LOG_TINY:
        return None
    return np.exp(logs - top)


def feature_belief(model: EvidentialModel, i: int, y: float, variant: str = "dirichlet") -> MassFunction | None:
    """Belief function on feature i's cluster frame."""
    gam = feature_likelihoods(model, i, y)
    if gam is None:
        return None
    frame = model.cluster_frame(i)
    if variant == "dirichlet":
        return dirichlet_from_likelihoods(gam, model.m_theta[i], frame)
    if variant == "bayesian":
        return dirichlet_from_likelihoods(gam, 0.0, frame)
    if variant == "consonant":
        return consonant_from_likelihoods(gam, frame)
    raise ValidationError(f"unknown inference variant {variant!r}; choose from {VARIANTS}")


def predict_belief(model: EvidentialModel, features: Sequence[float], variant: str = "dirichlet") -> BeliefEstimate:
    """Fuse per-feature evidence on the training-pose frame (conflict kept on ∅)."""
    feats = np.asarray(features, dtype=float).ravel()
    if feats.size != model.n_features:
        raise ValidationError(f"expected {model.n_features} feature values, got {feats.size}")
    pose_frame = model.pose_frame
    acc = MassFunction.vacuous(pose_frame)
    notes = []
    for i, y in enumerate(feats):
        b = feature_belief(model, i, y, variant)
        if b is None:
            msg = f"feature {i} value {y} has zero likelihood under every cluster; using the vacuous b.f."
            warnings.warn(msg, ExtremeFeatureWarning, stacklevel=2)
            notes.append(msg)
            continue
        acc = conjunctive_combine(acc, vacuous_extension(b, model.refining(i)))
    if acc.normalized:
        acc = MassFunction._from_arithmetic(pose_frame, dict(acc.focal), normalized=False)
    return BeliefEstimate(acc, notes)


def _normalized(estimate: BeliefEstimate) -> MassFunction:
    try:
        return estimate.mass.normalize()
    except NonCombinableError:
        raise NonCombinableError("total conflict among the features; no pose estimate") from None


def point_estimate(estimate: BeliefEstimate, model: EvidentialModel) -> np.ndarray:
    """Expected pose under the pignistic probability of the normalized estimate."""
    return pignistic(_normalized(estimate)).probs @ model.poses


def interval_estimate(estimate: BeliefEstimate, model: EvidentialModel) -> np.ndarray:
    """Per pose component, the (lower, upper) expectation over the credal set.

    Each focal mass is placed on its smallest (largest) pose value.
    """
    m = _normalized(estimate)
    out = np.zeros((model.poses.shape[1], 2))
    for a, v in m.focal.items():
        idx = list(iter_bits(a))
        block = model.poses[idx]
        out[:, 0] += v * block.min(axis=0)
        out[:, 1] += v * block.max(axis=0)
    return out


def model_consistency(model: EvidentialModel) -> float:
    """Share of training poses singled out by intersecting one cluster image per feature."""
    cells = set()
    for t in range(model.size):
        bit = 1 << t
        cells.add(tuple(next(j for j, img in enumerate(imgs) if img & bit) for imgs in model.refinings))
    return len(cells) / model.size


def predict_many(model: EvidentialModel, rows, variant: str = "dirichlet", threads: int = 1) -> list:
    """Belief estimates for many feature rows, optionally on a thread pool."""
    rows = [np.asarray(r, dtype=float) for r in rows]
    work = lambda r: predict_belief(model, r, variant)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, rows))
    return [work(r) for r in rows]
