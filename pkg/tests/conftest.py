import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS_DIR))  # make progen/tag_cases importable


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return TESTS_DIR / "data"


@pytest.fixture(scope="session")
def demo_dir(data_dir: Path) -> Path:
    return data_dir / "demo"


@pytest.fixture(scope="session")
def worlds_dir(data_dir: Path) -> Path:
    return data_dir / "worlds"
