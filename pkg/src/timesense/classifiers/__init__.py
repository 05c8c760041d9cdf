from .base import (
    IMPORTANCE_CAPABLE,
    KINDS,
    ClassifierConfig,
    TrainedModel,
    decision_scores,
    importance,
    load_model,
    predict,
    save_model,
    train,
)

__all__ = [
    "IMPORTANCE_CAPABLE",
    "KINDS",
    "ClassifierConfig",
    "TrainedModel",
    "decision_scores",
    "importance",
    "load_model",
    "predict",
    "save_model",
    "train",
]
