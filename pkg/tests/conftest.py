from pathlib import Path

import pytest

from app.config import settings
from app.frey_sieve import forms_from_curves, load_curves
from app.tau_core import delta_qexpansion
from app.utils.fixture_parser import load_fixture

DATA_DIR = Path(settings.data_dir)


@pytest.fixture(scope="session")
def table():
    """tau(1..10^4), built once per run."""
    return delta_qexpansion(10_000)


@pytest.fixture(scope="session")
def small_table(table):
    return table.truncate(500)


@pytest.fixture(scope="session")
def load_bundled_fixture():
    def _load(name):
        return load_fixture(DATA_DIR / "fixtures" / f"{name}.txt")
    return _load


@pytest.fixture(scope="session")
def curves():
    return {c.label: c for c in load_curves((DATA_DIR / "curves.txt").read_text(encoding="utf-8"))}


@pytest.fixture(scope="session")
def rational_forms(curves):
    return {f.label: f for f in forms_from_curves(curves.values(), settings.ell_bound)}


@pytest.fixture
def eigendata_dir():
    path = DATA_DIR / "eigendata"
    files = sorted(path.glob("*.txt"))
    if not files:
        pytest.skip("no eigendata files under app/data/eigendata; data-dependent sieve skipped")
    return path
