import numpy as np
import pytest

from timesense import ingest, pipeline
from timesense.model import FEATURE_NAMES, Dataset


@pytest.fixture(scope="session")
def strong_sessions():
    """Full 12x4 corpus with strong class margins (the default generator)."""
    return ingest.synth_dataset(ingest.SynthConfig(seed=7))


@pytest.fixture(scope="session")
def strong_dataset(strong_sessions):
    return pipeline.assemble(strong_sessions)


@pytest.fixture(scope="session")
def zero_margin_dataset():
    sessions = ingest.synth_dataset(ingest.zero_margin_config(seed=7))
    return pipeline.assemble(sessions)


@pytest.fixture(scope="session")
def small_sessions():
    """3-participant corpus for cheaper end-to-end tests."""
    return ingest.synth_dataset(ingest.SynthConfig(participants=3, seed=11))


@pytest.fixture(scope="session")
def small_dataset(small_sessions):
    return pipeline.assemble(small_sessions)


def planted_dataset(n_informative=5, n_rows=48, n_participants=12, seed=0,
                    signal=2.0):
    """24-feature dataset where only the first n_informative features carry
    class signal; the rest are pure noise."""
    rng = np.random.default_rng(seed)
    y = np.tile([0, 1], n_rows // 2)
    X = rng.normal(0.0, 1.0, size=(n_rows, len(FEATURE_NAMES)))
    X[:, :n_informative] += signal * y[:, None]
    pids = np.repeat(np.arange(1, n_participants + 1), n_rows // n_participants)
    return Dataset(X, y, pids)


@pytest.fixture
def planted():
    return planted_dataset()
