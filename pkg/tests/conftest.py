import pytest

from sclaguerre import PrecisionContext, WeightParams


@pytest.fixture(scope="session")
def ctx50():
    return PrecisionContext(50)


@pytest.fixture(scope="session")
def base():
    """(lambda, t) = (1.5, 0.8), the main verification point."""
    return WeightParams("1.5", "0.8")


@pytest.fixture(scope="session")
def unit():
    """(lambda, t) = (1, 0): every low-order quantity has a closed form."""
    return WeightParams(1, 0)


_ACCEPTANCE = {}


@pytest.fixture
def acceptance_log():
    """record(k, ok, detail): prints the criterion line and keeps it for the
    terminal summary."""
    def record(k, ok, detail):
        line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[k] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
