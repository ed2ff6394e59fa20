from pathlib import Path

import pytest

from offdetect.corpus import default_stopwords

REPO_ROOT = Path(__file__).resolve().parent.parent
MINI_DIR = REPO_ROOT / "data" / "mini"


@pytest.fixture(scope="session")
def mini_dir() -> Path:
    return MINI_DIR


@pytest.fixture(scope="session")
def stopwords():
    return default_stopwords()
