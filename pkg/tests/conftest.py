import numpy as np
import pytest

from lattice_cube.cli import default_vector_path
from lattice_cube.lattice import GeneratingVector, read_vector

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = ("PASS" if ok else "FAIL", f"{title}{': ' + detail if detail else ''}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {text}")


@pytest.fixture(scope="session")
def shipped():
    return read_vector(default_vector_path())


@pytest.fixture
def small_gv():
    """Two-dimensional 64-point lattice with generator (1, 27)."""
    return GeneratingVector(2, 6, (1, 27))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
