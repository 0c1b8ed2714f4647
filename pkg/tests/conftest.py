import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from trc.model import DiscreteNetwork

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def chain(n=3, m=2, seed=0):
    """X1 -> X2 -> ... -> Xn with random rows."""
    rng = np.random.default_rng(seed)
    names = [f"X{i + 1}" for i in range(n)]
    cpts = {}
    for i, v in enumerate(names):
        pa = (names[i - 1],) if i else ()
        cpts[v] = (pa, rng.dirichlet(np.ones(m), size=m ** len(pa)).reshape((m,) * len(pa) + (m,)))
    return DiscreteNetwork.from_tables({v: tuple(str(k + 1) for k in range(m)) for v in names}, cpts,
                                       name=f"chain{n}")


@pytest.fixture
def chain3():
    return chain(3)


ACCEPTANCE = []  # (criterion, ok, detail), filled by test_acceptance


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {crit:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
