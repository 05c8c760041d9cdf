"""From sessions to a learning-ready dataset: background subtraction,
train-only scaling, and label derivation from questionnaire ratings."""

import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, FeatureExtractionError, TooFewRows
from .features import BASELINE, TASK, DEFAULT_EXTRACTION, extract_all
from .model import (
    FEATURE_NAMES,
    LABEL_FAST,
    LABEL_SLOW,
    Dataset,
    FeatureVector,
)

SCALER_METHODS = ("none", "minmax", "zscore")
DATASET_SCHEMA_VERSION = 1


def background_subtract(task: FeatureVector, baseline: FeatureVector) -> FeatureVector:
    """Elementwise task minus baseline; reduces inter-participant variance."""
    return task - baseline


@dataclass(frozen=True)
class ScalerParams:
    method: str
    stat_a: np.ndarray = None  # min (minmax) or mean (zscore)
    stat_b: np.ndarray = None  # max (minmax) or population SD (zscore)

    def n_features(self):
        return None if self.stat_a is None else len(self.stat_a)


def fit_scaler(train_X, method: str) -> ScalerParams:
    """Fit per-feature scaling statistics on training rows only."""
    if method not in SCALER_METHODS:
        raise ValueError(f"unknown scaler method {method!r}")
    X = np.asarray(train_X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise TooFewRows("need at least 2 training rows to fit a scaler")
    if method == "none":
        return ScalerParams("none")
    if method == "minmax":
        return ScalerParams("minmax", X.min(axis=0), X.max(axis=0))
    return ScalerParams("zscore", X.mean(axis=0), X.std(axis=0))


def apply_scaler(params: ScalerParams, X):
    """Apply fitted statistics; unseen values may leave [0, 1] (no clipping).

    Features that were constant on the training rows map to 0.
    """
    X = np.asarray(X, dtype=float)
    if params.method == "none":
        return X.copy()
    if X.ndim != 2 or X.shape[1] != params.n_features():
        raise DimensionMismatch("feature count does not match fitted scaler")
    if params.method == "minmax":
        span = params.stat_b - params.stat_a
        safe = np.where(span == 0, 1.0, span)
        out = (X - params.stat_a) / safe
        out[:, span == 0] = 0.0
        return out
    sd = params.stat_b
    safe = np.where(sd == 0, 1.0, sd)
    out = (X - params.stat_a) / safe
    out[:, sd == 0] = 0.0
    return out


@dataclass(frozen=True)
class LabelRule:
    """Fast iff the participant-rescaled rating strictly exceeds threshold."""

    threshold: float = 3.0

    def __post_init__(self):
        if not 1.0 < self.threshold < 5.0:
            raise ValueError("threshold must lie in (1, 5)")


def scale_ratings(ratings):
    """Affinely rescale one participant's ratings so min -> 1 and max -> 5.

    All-equal ratings are returned unchanged (degenerate rule).
    """
    r = np.asarray(ratings, dtype=float)
    lo, hi = r.min(), r.max()
    if hi == lo:
        return r.copy()
    return 1.0 + 4.0 * (r - lo) / (hi - lo)


def derive_labels(ratings_by_participant, rule: LabelRule = LabelRule()):
    """Per participant: rescale ratings to [1, 5], threshold into slow/fast.

    Returns {participant: (labels, scaled_ratings)} keeping session order.
    """
    out = {}
    for pid, ratings in ratings_by_participant.items():
        if len(ratings) < 1:
            raise ValueError(f"participant {pid} has no ratings")
        scaled = scale_ratings(ratings)
        labels = [LABEL_FAST if s > rule.threshold else LABEL_SLOW for s in scaled]
        out[pid] = (labels, scaled)
    return out


def assemble(sessions, rule: LabelRule = LabelRule(),
             extraction=DEFAULT_EXTRACTION) -> Dataset:
    """Extract task and baseline vectors, background-subtract, attach labels.

    Scaling is deliberately NOT applied here; it is fitted per evaluation
    fold to prevent train/test leakage.
    """
    rows = []
    ratings = {}
    order = sorted(sessions, key=lambda s: (s.participant_id, s.session_index))
    for s in order:
        try:
            task_fv = extract_all(s, TASK, extraction)
            base_fv = extract_all(s, BASELINE, extraction)
        except FeatureExtractionError as exc:
            raise FeatureExtractionError(
                exc.channel, exc.window,
                f"participant {s.participant_id} session {s.session_index}: {exc.cause}",
            ) from exc
        rows.append((s.participant_id, background_subtract(task_fv, base_fv)))
        ratings.setdefault(s.participant_id, []).append(s.rating)

    labelled = derive_labels(ratings, rule)
    cursor = {pid: 0 for pid in labelled}
    X, y, pids = [], [], []
    for pid, fv in rows:
        labels, _ = labelled[pid]
        label = labels[cursor[pid]]
        cursor[pid] += 1
        X.append(fv.values)
        y.append(1 if label == LABEL_FAST else 0)
        pids.append(pid)
    return Dataset(np.array(X), np.array(y), np.array(pids))


# ---------------------------------------------------------------------------
# Dataset CSV round-trip
# ---------------------------------------------------------------------------

def dataset_to_csv(dataset: Dataset, path):
    lines = [f"# schema_version={DATASET_SCHEMA_VERSION}"]
    lines.append(",".join(dataset.feature_names) + ",label,participant_id")
    for i in range(len(dataset)):
        cells = [repr(float(v)) for v in dataset.X[i]]
        cells.append(LABEL_FAST if dataset.y[i] == 1 else LABEL_SLOW)
        cells.append(str(int(dataset.participant_ids[i])))
        lines.append(",".join(cells))
    tmp = str(path) + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def dataset_from_csv(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if lines and lines[0].startswith("#"):
        lines = lines[1:]
    header = lines[0].split(",")
    if header[-2:] != ["label", "participant_id"]:
        raise ValueError("expected trailing 'label,participant_id' columns")
    names = tuple(header[:-2])
    X, y, pids = [], [], []
    for ln in lines[1:]:
        cells = ln.split(",")
        X.append([float(c) for c in cells[: len(names)]])
        y.append(1 if cells[-2] == LABEL_FAST else 0)
        pids.append(int(cells[-1]))
    return Dataset(np.array(X), np.array(y), np.array(pids), names)
