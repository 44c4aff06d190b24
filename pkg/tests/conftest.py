import numpy as np
import pytest

from hetnet_nbs.scenario import Scenario, ScenarioConfig, make_scenario

ACCEPTANCE_LINES = []


@pytest.fixture
def ref_drop():
    """Reference-parameter scenario factory: ``ref_drop(n, b, seed, drop)``."""
    def make(num_users=8, num_bs=2, seed=0, drop=0):
        return make_scenario(ScenarioConfig(num_users=num_users, num_bs=num_bs, seed=seed), drop)
    return make


@pytest.fixture
def flat():
    """Scenario from an explicit gain matrix with unit powers and r_min = 1 bit/s.

    Noise is made negligible unless overridden, so SINRs are set by the gains.
    """
    def make(gains, **overrides):
        params = dict(mbs_power_dbm=30.0, pbs_power_dbm=30.0, r_min_bps=1.0,
                      bandwidth_hz=1.0, noise_psd_dbm_hz=-300.0)
        params.update(overrides)
        return Scenario.from_gains(np.asarray(gains, dtype=float), **params)
    return make


@pytest.fixture
def acceptance():
    """``record(tag, ok, detail)`` adds one line to the end-of-run summary.

    ``ok=None`` marks an informational line with no pass/fail bound.
    """
    def record(tag, ok, detail):
        status = "INFO" if ok is None else ("PASS" if ok else "FAIL")
        line = f"[{status}] {tag} {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
