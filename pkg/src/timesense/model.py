"""Shared domain types and the canonical 24-feature naming contract."""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

# Canonical feature order. Every feature matrix, CSV and report in the
# library uses exactly this order; do not reorder without bumping schema.
PPG_FEATURES = (
    "bpm",
    "ibi_ms",
    "sdnn_ms",
    "sdsd_ms",
    "rmssd_ms",
    "pnn20",
    "pnn50",
    "hr_mad_ms",
    "sd1_ms",
    "sd2_ms",
    "s_ms2",
    "sd1_sd2_ratio",
    "breathing_rate_hz",
)

EDA_FEATURES = (
    "scr_peaks_n",
    "scr_peaks_amplitude_mean_us",
    "eda_tonic_sd_us",
    "eda_sympathetic",
    "eda_sympathetic_n",
    "eda_autocorrelation",
)

TEMP_FEATURES = (
    "temp_diff_mean_c",
    "thermopile_mean_c",
    "reference_mean_c",
    "temp_gradient_mean_c_per_s",
    "temp_psd_power",
)

FEATURE_NAMES: Tuple[str, ...] = PPG_FEATURES + EDA_FEATURES + TEMP_FEATURES
N_FEATURES = len(FEATURE_NAMES)
assert N_FEATURES == 24

LABEL_SLOW = "slow"
LABEL_FAST = "fast"
LABELS = (LABEL_SLOW, LABEL_FAST)

GREEK = "greek"
ENGLISH = "english"


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled channel. Sample i sits at time i / sampling_rate_hz."""

    values: np.ndarray
    sampling_rate_hz: float
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.sampling_rate_hz <= 0:
            raise ValueError("sampling_rate_hz must be positive")
        if self.values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        self.values.setflags(write=False)

    def __len__(self):
        return len(self.values)

    @property
    def duration_s(self) -> float:
        return len(self.values) / self.sampling_rate_hz

    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) / self.sampling_rate_hz


@dataclass(frozen=True)
class SessionSetting:
    """Workload condition: how many helicopters, which language."""

    helicopters: int
    language: str

    def __post_init__(self):
        if self.helicopters not in (1, 2):
            raise ValueError("helicopters must be 1 or 2")
        if self.language not in (GREEK, ENGLISH):
            raise ValueError(f"language must be one of {GREEK!r}, {ENGLISH!r}")


ALL_SETTINGS = (
    SessionSetting(1, GREEK),
    SessionSetting(1, ENGLISH),
    SessionSetting(2, GREEK),
    SessionSetting(2, ENGLISH),
)


@dataclass(frozen=True)
class SessionRecord:
    """One recorded sequence: channels, task window, questionnaire answers."""

    participant_id: int
    session_index: int
    setting: SessionSetting
    ppg: TimeSeries
    eda: TimeSeries
    thermopile: TimeSeries
    reference_temp: TimeSeries
    task_start_s: float
    task_end_s: float
    rating: int
    duration_estimate_s: Optional[float] = None


def validate_session(session: SessionRecord):
    """Return a list of human-readable invariant violations (empty if valid).

    Never raises; intended for pre-flight checks before feature extraction.
    """
    violations = []
    if session.participant_id < 1:
        violations.append("participant_id must be >= 1")
    if not 1 <= session.session_index <= 4:
        violations.append("session_index out of range 1..4")
    if session.rating not in (1, 2, 3, 4, 5):
        violations.append("rating out of range")
    if session.task_start_s <= 0:
        violations.append("empty baseline interval")
    if session.task_end_s <= session.task_start_s:
        violations.append("task_end_s must exceed task_start_s")
    for name in ("ppg", "eda", "thermopile", "reference_temp"):
        ch: TimeSeries = getattr(session, name)
        if len(ch) < 2:
            violations.append(f"{name} channel too short")
        elif session.task_end_s > ch.duration_s + 1e-9:
            violations.append(f"task window exceeds {name} recording length")
    if session.duration_estimate_s is not None and session.duration_estimate_s <= 0:
        violations.append("duration_estimate_s must be positive when given")
    return violations


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """The 24 biomarker values, stored in canonical order."""

    values: np.ndarray

    def __eq__(self, other):
        return isinstance(other, FeatureVector) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} features, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("feature values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_dict(cls, mapping) -> "FeatureVector":
        missing = [n for n in FEATURE_NAMES if n not in mapping]
        if missing:
            raise ValueError(f"missing features: {missing}")
        return cls(np.array([mapping[n] for n in FEATURE_NAMES], dtype=float))

    def to_dict(self) -> dict:
        return {name: float(v) for name, v in zip(FEATURE_NAMES, self.values)}

    def __getitem__(self, name: str) -> float:
        return float(self.values[FEATURE_NAMES.index(name)])

    def __sub__(self, other: "FeatureVector") -> "FeatureVector":
        return FeatureVector(self.values - other.values)


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with binary labels and participant identifiers."""

    X: np.ndarray                 # (n, d)
    y: np.ndarray                 # (n,) of 0 (slow) / 1 (fast)
    participant_ids: np.ndarray   # (n,) ints
    feature_names: Tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=int)
        pids = np.asarray(self.participant_ids, dtype=int)
        if X.ndim != 2 or X.shape[0] != len(y) or len(y) != len(pids):
            raise ValueError("inconsistent dataset shapes")
        if X.shape[1] != len(self.feature_names):
            raise ValueError("feature count does not match feature names")
        if not np.all(np.isfinite(X)):
            raise ValueError("feature matrix must be finite")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 (slow) or 1 (fast)")
        for a in (X, y, pids):
            a.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "participant_ids", pids)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    def __len__(self):
        return len(self.y)

    def labels(self) -> list:
        return [LABELS[v] for v in self.y]

    def participants(self) -> np.ndarray:
        return np.unique(self.participant_ids)

    def subset_features(self, names: Sequence[str]) -> "Dataset":
        idx = [self.feature_names.index(n) for n in names]
        return Dataset(self.X[:, idx], self.y, self.participant_ids, tuple(names))

    def select_rows(self, mask) -> "Dataset":
        return Dataset(self.X[mask], self.y[mask], self.participant_ids[mask],
                       self.feature_names)


@dataclass(frozen=True)
class FoldResult:
    """Outcome of one leave-one-subject-out fold."""

    held_out_participant: int
    accuracy: float
    selected_feature_names: Tuple[str, ...]
    per_feature_mean_abs_shap: Optional[dict] = None
    scaler_stats: Optional[dict] = None
    predictions: Tuple[int, ...] = ()
    actual: Tuple[int, ...] = ()


@dataclass(frozen=True)
class EvaluationReport:
    per_fold: Tuple[FoldResult, ...]
    mean_accuracy: float = field(default=None)

    def __post_init__(self):
        folds = tuple(self.per_fold)
        object.__setattr__(self, "per_fold", folds)
        mean = float(np.mean([f.accuracy for f in folds])) if folds else float("nan")
        if self.mean_accuracy is None:
            object.__setattr__(self, "mean_accuracy", mean)
        elif folds and abs(self.mean_accuracy - mean) > 1e-12:
            raise ValueError("mean_accuracy inconsistent with per-fold accuracies")
