"""Leave-one-subject-out evaluation, baselines and the classifier-by-selection
accuracy matrix."""

import json
import os

import numpy as np

from .classifiers import ClassifierConfig, predict, train
from .errors import EmptyInput, LengthMismatch, SingleParticipant, UnsupportedClassifier
from .explain import mean_abs_shap
from .model import (
    EDA_FEATURES,
    PPG_FEATURES,
    Dataset,
    EvaluationReport,
    FoldResult,
)
from .pipeline import apply_scaler, fit_scaler
from .selection import rfecv, sfs

NA = "N.A."
REPORT_SCHEMA_VERSION = 1

MANUAL_SUBSETS = {
    "ppg": PPG_FEATURES,
    "ppg+eda": PPG_FEATURES + EDA_FEATURES,
}

SELECTION_MODES = ("none", "sfs", "rfecv", "ppg", "ppg+eda")

# Row order of the accuracy matrix.
MATRIX_KINDS = ("svc", "dtc", "knn", "lr", "gnb", "lda", "qda", "rf", "gb", "ab", "xgb")


def accuracy(predicted, actual) -> float:
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if len(predicted) != len(actual):
        raise LengthMismatch("prediction/actual length mismatch")
    if len(predicted) == 0:
        raise EmptyInput("empty prediction sequence")
    return float(np.mean(predicted == actual))


def majority_baseline(dataset: Dataset) -> float:
    if len(dataset) == 0:
        raise EmptyInput("empty dataset")
    n_fast = int(np.sum(dataset.y))
    return max(n_fast, len(dataset) - n_fast) / len(dataset)


def fold_seed(master_seed: int, participant_id: int) -> int:
    """Per-fold seed; independent of which other classifiers are evaluated."""
    return int(master_seed) * 1000003 + int(participant_id)


def _resolve_selection(selection, train_ds: Dataset, config, seed):
    """Returns the selected feature names for this fold's training rows."""
    if selection is None:
        return tuple(train_ds.feature_names)
    mode, params = selection
    if mode == "none":
        return tuple(train_ds.feature_names)
    if mode == "manual":
        return tuple(params)
    if mode in MANUAL_SUBSETS:
        return MANUAL_SUBSETS[mode]
    if mode == "sfs":
        params = dict(params or {})
        n_features = params.pop("n_features", 12)
        result = sfs(train_ds, config, n_features=n_features, seed=seed, **params)
        return result.selected
    if mode == "rfecv":
        params = dict(params or {})
        result = rfecv(train_ds, config, seed=seed, **params)
        return result.selected
    raise ValueError(f"unknown selection mode {mode!r}")


def losocv(dataset: Dataset, config: ClassifierConfig, scaler_method: str = "minmax",
           selection=None, seed: int = 0, compute_shap: bool = False,
           shap_samples: int = 256) -> EvaluationReport:
    """Leave-one-subject-out protocol.

    Per fold: fit the scaler on training rows only, run the optional feature
    selection on training rows only, train, then score the held-out
    participant. ``selection`` is None or a (mode, params) pair with mode in
    {'none', 'sfs', 'rfecv', 'ppg', 'ppg+eda', 'manual'}.
    """
    participants = dataset.participants()
    if len(participants) < 2:
        raise SingleParticipant("need at least 2 participants")
    folds = []
    for pid in participants:
        pid = int(pid)
        s = fold_seed(seed, pid)
        test_mask = dataset.participant_ids == pid
        train_rows = dataset.select_rows(~test_mask)
        test_rows = dataset.select_rows(test_mask)

        scaler = fit_scaler(train_rows.X, scaler_method)
        train_scaled = Dataset(apply_scaler(scaler, train_rows.X), train_rows.y,
                               train_rows.participant_ids, train_rows.feature_names)
        test_X = apply_scaler(scaler, test_rows.X)

        cfg = ClassifierConfig(config.kind, config.params, seed=s)
        selected = _resolve_selection(selection, train_scaled, cfg, s)
        idx = [dataset.feature_names.index(n) for n in selected]

        model = train(cfg, train_scaled.X[:, idx], train_scaled.y)
        preds = predict(model, test_X[:, idx])
        acc = accuracy(preds, test_rows.y)

        shap_ranking = None
        if compute_shap:
            sub = train_scaled.subset_features(selected)
            ranking = mean_abs_shap(model, sub, n_samples=shap_samples, seed=s)
            shap_ranking = {name: value for name, value, _ in ranking}

        stats = {"method": scaler.method}
        if scaler.stat_a is not None:
            stats["stat_a"] = tuple(float(v) for v in scaler.stat_a)
            stats["stat_b"] = tuple(float(v) for v in scaler.stat_b)
        folds.append(FoldResult(
            held_out_participant=pid,
            accuracy=acc,
            selected_feature_names=tuple(selected),
            per_feature_mean_abs_shap=shap_ranking,
            scaler_stats=stats,
            predictions=tuple(int(v) for v in preds),
            actual=tuple(int(v) for v in test_rows.y),
        ))
    return EvaluationReport(tuple(folds))


def selection_spec(mode: str, classifier_config: ClassifierConfig = None):
    """Map a CLI-style selection mode name to a losocv selection argument."""
    if mode == "none":
        return None
    if mode in ("ppg", "ppg+eda"):
        return (mode, None)
    if mode == "sfs":
        return ("sfs", {})
    if mode == "rfecv":
        return ("rfecv", {})
    raise ValueError(f"unknown selection mode {mode!r}")


def report_matrix(dataset: Dataset, kinds=MATRIX_KINDS, settings=SELECTION_MODES,
                  scaler_method: str = "minmax", seed: int = 0):
    """Mean LOSOCV accuracy per (classifier, selection-mode) cell.

    Cells pairing RFECV with an importance-incapable classifier hold the
    literal 'N.A.' marker instead of a number.
    """
    matrix = {}
    for kind in kinds:
        config = ClassifierConfig(kind, seed=seed)
        row = {}
        for mode in settings:
            if mode == "rfecv" and not config.supports_importance():
                row[mode] = NA
                continue
            report = losocv(dataset, config, scaler_method,
                            selection=selection_spec(mode), seed=seed)
            row[mode] = report.mean_accuracy
        matrix[kind] = row
    return matrix


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def report_to_jsonable(report: EvaluationReport):
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "mean_accuracy": report.mean_accuracy,
        "per_fold": [
            {
                "held_out_participant": f.held_out_participant,
                "accuracy": f.accuracy,
                "selected_feature_names": list(f.selected_feature_names),
                "per_feature_mean_abs_shap": f.per_feature_mean_abs_shap,
                "predictions": list(f.predictions),
                "actual": list(f.actual),
            }
            for f in report.per_fold
        ],
    }


def write_report_json(doc, path):
    tmp = str(path) + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def matrix_to_csv(matrix, path, settings=SELECTION_MODES):
    lines = [f"# schema_version={REPORT_SCHEMA_VERSION}"]
    lines.append("classifier," + ",".join(settings))
    for kind, row in matrix.items():
        cells = [kind]
        for mode in settings:
            v = row[mode]
            cells.append(v if isinstance(v, str) else repr(float(v)))
        lines.append(",".join(cells))
    tmp = str(path) + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
