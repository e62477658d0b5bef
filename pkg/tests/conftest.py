from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"


def student_file() -> Path:
    """The student data file the suite runs on.

    A real upstream file can be dropped in as tests/data/student-mat.csv or
    pointed at via EQUITY_AUDIT_STUDENT_FILE; otherwise the bundled
    schema-identical sample is used.
    """
    override = os.environ.get("EQUITY_AUDIT_STUDENT_FILE")
    if override:
        return Path(override)
    real = DATA_DIR / "student-mat.csv"
    if real.exists():
        return real
    return DATA_DIR / "student_sample.csv"


@pytest.fixture(scope="session")
def student_path() -> Path:
    return student_file()
