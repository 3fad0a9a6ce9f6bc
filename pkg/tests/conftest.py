import numpy as np
import pytest

from femtoassoc.model import ScenarioConfig, ServiceTimeProblem, build_problem, generate_scenario

# criterion number -> list of (part, passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, part: str, passed: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[criterion]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{name}: {'ok' if p else 'FAIL'} ({d})" if name else d for name, p, d in parts)
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_problem():
    return ServiceTimeProblem.from_lists([[1, 2, 3], [2, 1, 1]])


@pytest.fixture(scope="session")
def open_scenario():
    return generate_scenario(ScenarioConfig(num_users=20), seed=3)


@pytest.fixture(scope="session")
def closed_scenario():
    return generate_scenario(ScenarioConfig(num_users=20, access="closed"), seed=3)


@pytest.fixture(scope="session")
def open_problem(open_scenario):
    return build_problem(open_scenario)
