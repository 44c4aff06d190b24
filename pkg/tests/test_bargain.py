import itertools
import math

import numpy as np
import pytest

from hetnet_nbs.bargain import (GameOutcome, InfeasibleError, evaluate, is_feasible, log_nash,
                                nash_product)
from hetnet_nbs.radio import Association, bs_utility


def _outcome(utilities):
    u = np.asarray(utilities, dtype=float)
    return GameOutcome(Association(np.arange(u.size), u.size), u, np.ones(u.size))


def test_product_and_log_of_given_utilities():
    assert _outcome([2.0, 3.0]).nash_product == 6.0
    assert _outcome([1.0, 1.0, 1.0]).log_nash == 0.0
    assert _outcome([math.e, math.e]).log_nash == pytest.approx(2.0)
    assert _outcome([1.0, 0.0]).log_nash == -math.inf


def test_user_at_rmin_gives_zero_product(flat):
    scn = flat([[1.0, 1.0, 1e-9], [1.0, 50.0, 50.0]])
    x = Association([0, 1, 1], 2)
    assert nash_product(x, scn) == pytest.approx(0.0, abs=1e-9)


def test_product_of_bs_utilities(ref_drop):
    scn = ref_drop(num_users=7, num_bs=3, seed=4)
    x = Association([0, 1, 2, 0, 1, 2, 0], 3)
    expected = bs_utility(0, scn, x) * bs_utility(1, scn, x) * bs_utility(2, scn, x)
    assert nash_product(x, scn) == pytest.approx(expected, rel=1e-12)
    assert evaluate(scn, x).nash_product == pytest.approx(expected, rel=1e-12)


def test_log_nash_raises_off_interior(flat):
    scn = flat([[1.0, 1.0], [1.0, 1.0]], r_min_bps=1.0)
    with pytest.raises(InfeasibleError):
        log_nash(Association([0, 1], 2), scn)


def test_argmax_agreement_exhaustive(ref_drop):
    scn = ref_drop(num_users=8, num_bs=2, seed=9)
    best_np, best_ln = None, None
    for labels in itertools.product((0, 1), repeat=8):
        x = Association(labels, 2)
        if not is_feasible(x, scn).ok or min(x.loads) == 0:
            continue
        p = nash_product(x, scn)
        if p <= 0:
            continue
        ln = log_nash(x, scn)
        if best_np is None or p > best_np[0]:
            best_np = (p, labels)
        if best_ln is None or ln > best_ln[0]:
            best_ln = (ln, labels)
    assert best_np is not None
    assert best_np[1] == best_ln[1]


def test_ordering_matches_on_random_pairs(ref_drop):
    rng = np.random.default_rng(0)
    scn = ref_drop(num_users=12, num_bs=3, seed=1)
    samples = []
    while len(samples) < 40:
        x = Association(rng.integers(0, 3, 12), 3)
        if min(x.loads) > 0 and np.all(evaluate(scn, x).utilities > 0):
            samples.append((nash_product(x, scn), log_nash(x, scn)))
    for (p1, l1), (p2, l2) in itertools.combinations(samples, 2):
        assert np.sign(p1 - p2) == np.sign(l1 - l2)


def test_relabeling_invariance(flat):
    rng = np.random.default_rng(3)
    gains = rng.exponential(size=(3, 9))
    labels = rng.integers(0, 3, 9)
    perm = np.array([2, 0, 1])  # new index of old BS b is perm[b]
    scn = flat(gains, r_min_bps=0.01)
    permuted = np.empty_like(gains)
    permuted[perm] = gains
    scn_p = flat(permuted, r_min_bps=0.01)
    a = nash_product(Association(labels, 3), scn)
    b = nash_product(Association(perm[labels], 3), scn_p)
    assert a == pytest.approx(b, rel=1e-12)


def test_feasibility_empty_bs_boundary(ref_drop):
    scn = ref_drop(num_users=5, num_bs=2, seed=2)
    x = Association([0] * 5, 2)
    u0 = bs_utility(0, scn, x)
    assert is_feasible(x, scn).ok == (u0 >= 0)
    assert bs_utility(1, scn, x) == 0.0


def test_feasibility_unassigned_user(ref_drop):
    scn = ref_drop(num_users=3, num_bs=2)
    res = is_feasible(np.array([[1, 0, 0], [0, 1, 0]]), scn)
    assert not res.ok and res.reason == "unassigned user"


def test_feasibility_negative_utility(flat):
    # user 1 alone on BS1 with a tiny gain: rate far below r_min
    scn = flat([[10.0, 1.0], [0.1, 1e-6]], r_min_bps=0.5)
    res = is_feasible(Association([0, 1], 2), scn)
    assert not res.ok and res.reason == "negative utility"
