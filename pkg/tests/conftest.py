import pathlib

import numpy as np
import pytest

from recoursekit.attribution import BackgroundSet
from recoursekit.dataset import Dataset, FeatureSchema, SubjectRecord
from recoursekit.model import load_model
from recoursekit.recourse import RecourseEngine

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "data"
FIXTURE_CSV = DATA_DIR / "credit_risk.csv"
FIXTURE_MODEL = DATA_DIR / "model.tsv"


@pytest.fixture(scope="session")
def fixture_dataset() -> Dataset:
    return Dataset.load(FIXTURE_CSV)


@pytest.fixture(scope="session")
def fixture_model(fixture_dataset):
    return load_model(FIXTURE_MODEL, fixture_dataset.schema)


@pytest.fixture(scope="session")
def fixture_background(fixture_dataset):
    return BackgroundSet.from_dataset(fixture_dataset, size=32, seed=42)


@pytest.fixture(scope="session")
def fixture_engine(fixture_dataset, fixture_model):
    # precomputes the full attribution table once for the whole test run
    return RecourseEngine(fixture_dataset, fixture_model)


def make_dataset(n_features=3, n_records=24, seed=0, labeled=True) -> Dataset:
    """Small synthetic dataset for unit tests; deterministic per seed."""
    rng = np.random.default_rng(seed)
    names = [f"f{i}" for i in range(n_features)]
    raw = rng.uniform(0.0, 10.0, size=(n_records, n_features))
    logits = (raw - 5.0).sum(axis=1) / n_features
    labels = (rng.uniform(size=n_records) < 1.0 / (1.0 + np.exp(-logits))).astype(int)
    records = [
        SubjectRecord(
            id=f"r{i:03d}",
            values={name: float(raw[i, j]) for j, name in enumerate(names)},
            label=int(labels[i]) if labeled else None,
        )
        for i in range(n_records)
    ]
    schema = [
        FeatureSchema(
            name=name,
            min=float(raw[:, j].min()),
            max=float(raw[:, j].max()),
            mean=float(raw[:, j].mean()),
        )
        for j, name in enumerate(names)
    ]
    return Dataset(schema, records)
