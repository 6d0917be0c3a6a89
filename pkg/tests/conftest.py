from __future__ import annotations

import pytest

from h2p.numerics import available_backends, core
from h2p.params import CorrelationStructure, DesignInputs, EffectSpec, VarianceSpec

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def circl() -> DesignInputs:
    """The two-outcome worked example: K=15, m=300, alpha=0.05, 80% target."""
    return DesignInputs(
        effects=EffectSpec(0.1, 0.1),
        variances=VarianceSpec(0.23, 0.25),
        corr=CorrelationStructure(0.025, 0.025, 0.01, 0.05),
        m=300, K=15, alpha=0.05, target_power=0.80)


@pytest.fixture(params=sorted(available_backends()))
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    mod = available_backends()[request.param]
    monkeypatch.setattr(core, "kernels", mod)
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
