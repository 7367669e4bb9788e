import sys

import pytest

from pmsearch import kernels
from pmsearch.core import CountedOracle, PartitionConstraint

from oracles.frozen import MODULAR_WEIGHTS


def modular(weights):
    return lambda s: float(sum(weights[e] for e in s))


@pytest.fixture
def modular_constraint():
    return PartitionConstraint(((0, 1), (2,)), (1, 1))


@pytest.fixture
def modular_oracle(modular_constraint):
    return CountedOracle(modular(MODULAR_WEIGHTS), modular_constraint)


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request, monkeypatch):
    """Route every analysis routine through one kernel backend."""
    monkeypatch.setattr(kernels, "_impl", kernels.BACKENDS[request.param])
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS, key=lambda k: int(k[1:])):
        terminalreporter.write_line(mod.RESULTS[key])
