from collections import defaultdict
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def random_symmetric(rng, n, scale=1.0):
    X = rng.uniform(-scale, scale, size=(n, n))
    return (X + X.T) / 2


def random_pd(rng, n, cond_max=None):
    """Wishart-like PD matrix; optionally regularized so that cond <= cond_max."""
    X = rng.normal(size=(n, n + 2))
    S = X @ X.T / (n + 2)
    if cond_max is not None:
        ev = np.linalg.eigvalsh(S)
        # shift so that (lmax + s) / (lmin + s) == cond_max when needed
        if ev[-1] / ev[0] > cond_max:
            s = (ev[-1] - cond_max * ev[0]) / (cond_max - 1)
            S = S + s * np.eye(n)
    return S


def random_correlation(rng, n, cond_max=None):
    S = random_pd(rng, n, cond_max)
    d = np.sqrt(np.diag(S))
    return S / np.outer(d, d)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion (tests tagged with a ``criterion`` property)."""
    status = defaultdict(list)
    titles = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" not in props:
                continue
            k = props["criterion"]
            titles[k] = props.get("title", "")
            status[k].append(rep.passed)
    if not status:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(status):
        ok = all(status[k])
        n_fail = status[k].count(False)
        extra = f" ({n_fail} of {len(status[k])} cases failed)" if n_fail else ""
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {titles[k]}{extra}")
