"""Exhaustive search over every association of a small instance.

This is the reference against which the heuristics are checked, so it
recomputes SINRs, rates and utilities from the raw gains on its own rather
than going through :mod:`hetnet_nbs.radio`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .radio import Association
from .scenario import Scenario

MAX_USERS = 14
MAX_ASSIGNMENTS = 2**22


@dataclass(frozen=True)
class ExhaustiveResult:
    assoc: Association
    value: float
    objective: str
    evaluated: int


def all_labels(num_users: int, num_bs: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start..stop-1`` of the base-``num_bs`` enumeration of label vectors."""
    codes = np.arange(start, stop, dtype=np.int64)
    powers = num_bs ** np.arange(num_users, dtype=np.int64)
    return (codes[:, None] // powers[None, :]) % num_bs


def evaluate_labels(gains, powers, bandwidth, noise_psd, r_min, labels):
    """Per-candidate BS utilities, per-BS sum rates and loads for a batch of label rows."""
    gains = np.asarray(gains, dtype=float)
    powers = np.asarray(powers, dtype=float)
    b_count, n_count = gains.shape
    m = labels.shape[0]
    onehot = labels[:, :, None] == np.arange(b_count)[None, None, :]  # (M, N, B)
    loads = onehot.sum(axis=1)  # (M, B)
    user_load = np.take_along_axis(loads, labels, axis=1)  # (M, N)
    cols = np.broadcast_to(np.arange(n_count), (m, n_count))
    signal = powers[labels] * gains[labels, cols]
    total = (powers[:, None] * gains).sum(axis=0)
    sinr = signal / (total[None, :] - signal + noise_psd * bandwidth / user_load)
    rate = bandwidth / user_load * np.log2(1.0 + sinr)
    util = np.log(rate / r_min)
    u_bs = np.einsum("mn,mnb->mb", util, onehot)
    r_bs = np.einsum("mn,mnb->mb", rate, onehot)
    return u_bs, r_bs, loads


def brute_force(scn: Scenario, objective: str = "nash", chunk: int = 1 << 16) -> ExhaustiveResult:
    """Global optimum over all ``B**N`` associations.

    ``objective='nash'`` maximizes ``prod_b U_b`` over associations where every
    BS serves at least one user and all ``U_b >= 0``; ``'sum_rate'`` maximizes
    the total rate with no constraint. The first optimum in enumeration
    order is returned.
    """
    if objective not in ("nash", "sum_rate"):
        raise ValueError(f"unknown objective {objective!r}")
    b, n = scn.num_bs, scn.num_users
    if n > MAX_USERS:
        raise ValueError(f"exhaustive search limited to N <= {MAX_USERS}, got N={n}")
    count = b ** n
    if count > MAX_ASSIGNMENTS:
        raise ValueError(f"{count} candidate associations exceed the limit of {MAX_ASSIGNMENTS}")
    best_val, best_labels = -np.inf, None
    for start in range(0, count, chunk):
        labels = all_labels(n, b, start, min(start + chunk, count))
        u_bs, r_bs, loads = evaluate_labels(scn.gains, scn.powers, scn.bandwidth,
                                            scn.noise_psd, scn.r_min, labels)
        if objective == "nash":
            ok = np.all(loads > 0, axis=1) & np.all(u_bs >= 0, axis=1)
            val = np.where(ok, np.prod(u_bs, axis=1), -np.inf)
        else:
            val = r_bs.sum(axis=1)
        k = int(np.argmax(val))
        if val[k] > best_val:
            best_val, best_labels = float(val[k]), labels[k]
    if best_labels is None:
        raise ValueError("no association satisfies the constraints")
    return ExhaustiveResult(Association(best_labels, b), best_val, objective, count)
