import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ellbilliards import BilliardConfig, ConfocalFamily, build_billiard

SQ2, SQ3, SQ6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)


@pytest.fixture
def fam():
    return ConfocalFamily(2.0, 1.0)


@pytest.fixture
def rhombus(fam):
    """N=4, tau=1 billiard on the (2, 1) caustic starting on the minor axis."""
    return build_billiard(BilliardConfig.periodic(fam, 4, 1, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(number, title: str, ok: bool, detail: str = "") -> bool:
        label = f"criterion {number:>2}" if number is not None else "budget      "
        line = f"{label} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        lines.append((number is None, number or 0, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for *_, line in sorted(lines):
            terminalreporter.write_line(line)
