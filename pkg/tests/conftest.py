import numpy as np
import pytest

from twistorprod.catalog import default_catalog, make_cp2, make_round_sphere, make_s2xs2


@pytest.fixture(scope="session", autouse=True)
def verified_catalog():
    """Every catalog claim is recomputed once; a wrong claim aborts the run."""
    entries = default_catalog() + [make_cp2(-1), make_s2xs2(1.0, 1.0)]
    records = [e.verify(n_points=5, seed=11) for e in entries]
    bad = [r for r in records if not r["ok"]]
    if bad:
        pytest.exit(f"catalog verification failed: {bad}", returncode=1)
    return entries


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def sphere():
    return make_round_sphere(1.0)


@pytest.fixture(scope="session")
def cp2():
    return make_cp2(1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_collection_modifyitems(config, items):
    # the acceptance suite runs last so its summary lines close the log
    items.sort(key=lambda item: item.nodeid.startswith("tests/test_acceptance.py"))


_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
