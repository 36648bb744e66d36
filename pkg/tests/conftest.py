"""Shared fixtures; puts scripts/ on the import path like the scripts themselves do."""

import sys
from pathlib import Path
from random import Random

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))

from cache import ResultCache  # noqa: E402
from exactfield import FieldSpec  # noqa: E402


@pytest.fixture
def rationals():
    return FieldSpec.rationals()


@pytest.fixture
def f3():
    return FieldSpec.prime(3)


@pytest.fixture
def tmp_cache(tmp_path):
    return ResultCache(tmp_path / "cache")


@pytest.fixture
def rng():
    return Random(20240607)
