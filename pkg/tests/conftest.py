import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from planarends import balance
from planarends.configspace import Configuration

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def naive_forces(levels):
    """Force of every point straight from the pairwise sums, level by level."""
    out = []
    n = [len(lv) for lv in levels]
    for k, lv in enumerate(levels):
        ck = 1.0 / n[k]
        for i, p in enumerate(lv):
            f = 0j
            for j, q in enumerate(lv):
                if j != i:
                    f += 2 * ck * ck / (p - q)
            if k + 1 < len(levels):
                for q in levels[k + 1]:
                    f -= ck / n[k + 1] / (p - q)
            if k > 0:
                for q in levels[k - 1]:
                    f -= ck / n[k - 1] / (p - q)
            out.append(f)
    return np.array(out)


@pytest.fixture
def riemann():
    return Configuration.from_points({k: [complex(k)] for k in range(-2, 3)})


@pytest.fixture
def fan2():
    return balance.fan(2)


@pytest.fixture
def ladder():
    return balance.ladder22()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance verdicts, one line per criterion in the terminal summary
ACCEPTANCE = {}


def record(criterion, ok, detail):
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    print("criterion %d %s: %s" % (criterion, "PASS" if ok else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p for p, _ in parts)
        terminalreporter.write_line("%s criterion %d: %s" % (
            "PASS" if ok else "FAIL", n, "; ".join(d for _, d in parts)))
