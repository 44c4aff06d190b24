import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetnet_nbs.metrics import MetricsReport, jain_index, report, srr, summarize
from hetnet_nbs.radio import Association

# zero or well clear of the subnormal range, where scaling by c is not exact
share = st.one_of(st.just(0.0), st.floats(1e-100, 1e6))
shares = st.lists(share, min_size=1, max_size=30).filter(
    lambda x: any(v > 0 for v in x))


@pytest.mark.parametrize("x, expected", [
    ([5, 5, 5, 5], 1.0),
    ([1, 0, 0, 0], 0.25),
    ([1, 2, 3], 6 / 7),
])
def test_jain_examples(x, expected):
    assert jain_index(x) == pytest.approx(expected, rel=1e-15)


def test_jain_all_zero_rejected():
    with pytest.raises(ValueError, match="all-zero"):
        jain_index([0.0, 0.0])
    with pytest.raises(ValueError):
        jain_index([1.0, -1.0])


@settings(max_examples=200, deadline=None)
@given(shares, st.floats(1e-6, 1e6))
def test_jain_scale_invariant(x, c):
    assert abs(jain_index(np.array(x) * c) - jain_index(x)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(shares)
def test_jain_bounds(x):
    j = jain_index(x)
    assert 1 / len(x) - 1e-12 <= j <= 1 + 1e-12


def test_srr_cases():
    assert srr([5.0, 0.0, 0.0]) == (0.0, 0.0)
    assert srr([3.0, 1.0, 3.0]) == (1.0, 1.0)
    assert srr([2.0, 5.0]) == (2.5, 1.0)
    with pytest.raises(ValueError, match="SRR undefined"):
        srr([0.0, 1.0])


def test_report_macro_carries_everything(ref_drop):
    scn = ref_drop(num_users=6, num_bs=3, seed=1)
    rep = report(scn, Association([0] * 6, 3), "x")
    assert rep.srr_raw == 0.0 and rep.loads == [6, 0, 0]
    assert 0.0 <= rep.qos_satisfaction <= 1.0
    assert 1 / 6 <= rep.jain_user_rate <= 1.0


def test_report_idle_macro_gives_nan_srr(ref_drop):
    scn = ref_drop(num_users=4, num_bs=2, seed=0)
    rep = report(scn, Association([1] * 4, 2), "x")
    assert math.isnan(rep.srr_raw)


def _rep(srr_value):
    return MetricsReport("s", 0, 4, 2, 1.0, 2.0, 0.5, 1.0, 1.0, srr_value, srr_value, 1.0, [2, 2])


def test_summarize():
    one = summarize([_rep(0.4)])
    assert one["count"] == 1 and one["srr_raw"]["mean"] == one["srr_raw"]["median"] == 0.4
    two = summarize([_rep(0.1), _rep(0.3)])
    assert two["srr_raw"]["mean"] == pytest.approx(0.2)
    assert two["srr_raw"]["std"] == pytest.approx(0.1)
    nan = summarize([_rep(float("nan")), _rep(0.3)])
    assert nan["srr_raw"]["mean"] == 0.3
    with pytest.raises(ValueError):
        summarize([])
