import json
import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def interop_vectors():
    return json.loads((DATA / "interop_vectors.json").read_text())


@pytest.fixture(scope="session")
def shake_vectors():
    return json.loads((DATA / "shake_vectors.json").read_text())


@pytest.fixture(scope="session", params=[2, 3, 5])
def level(request):
    return request.param


@pytest.fixture(scope="session")
def keys():
    """One deterministic keypair and signing precomputation per level."""
    from dilithium_batch import SignPrecomp, keygen

    out = {}
    for lvl in (2, 3, 5):
        pk, sk = keygen(bytes([lvl]) * 32, lvl)
        out[lvl] = (pk, sk, SignPrecomp.from_secret_key(sk, lvl))
    return out


def pytest_terminal_summary(terminalreporter):
    import acceptance_report

    if acceptance_report.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_report.lines():
            terminalreporter.write_line(line)
