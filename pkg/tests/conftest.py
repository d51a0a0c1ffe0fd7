import random

import pytest

from mbk.core import ModelSpec

# criterion label -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def report(label: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[label] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: (int(s.split()[0].rstrip("abc")), s)):
        ok, detail = ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}")


def random_model(rng: random.Random, max_m: int = 6, max_cells: int = 256, levels=(2, 3)) -> ModelSpec:
    """Random generating class: a few random subsets, reduced to the maximal ones."""
    while True:
        m = rng.randint(1, max_m)
        lv = [rng.choice(levels) for _ in range(m)]
        n = 1
        for x in lv:
            n *= x
        if n <= max_cells:
            break
    sets = {frozenset(rng.sample(range(m), rng.randint(1, m))) for _ in range(rng.randint(1, m + 1))}
    sets = [s for s in sets if not any(s < t for t in sets)]
    covered = set().union(*sets)
    sets += [frozenset([v]) for v in range(m) if v not in covered]
    return ModelSpec(lv, sets)


@pytest.fixture
def ci3():
    return ModelSpec.complete_independence([2, 2, 2])


@pytest.fixture
def ci4():
    return ModelSpec.complete_independence([2, 2, 2, 2])


@pytest.fixture
def indep33():
    return ModelSpec.complete_independence([3, 3])


@pytest.fixture
def hub():
    # three leaves {1,4},{2,5},{3,6} hanging on the clique {4,5,6}
    return ModelSpec([2] * 6, [[0, 3], [1, 4], [2, 5], [3, 4, 5]])


@pytest.fixture
def claw():
    # cliques {1,4},{2,4},{3,4,5}
    return ModelSpec([2] * 5, [[0, 3], [1, 3], [2, 3, 4]])
