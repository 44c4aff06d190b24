"""Two-player bargaining by two-band partition.

Inside a coalition of two BSs, every shared user is scored by how much more
BS 1 gains from it than BS 2 (marginal utilities weighted by ``1/U_b``).
Users are sorted by that score and the sorted list is cut once: the head
goes to BS 1, the tail to BS 2. The cut maximizing the two-player Nash
product is kept, scores are recomputed at the new association, and the
process repeats while the Nash product improves.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .bargain import GameOutcome, InfeasibleError, evaluate
from .radio import Association, bs_utilities, greedy_assign, rate_table, sinr_matrix, utility
from .scenario import Scenario

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FScore:
    user: int
    value: float


def pair_users(assoc: Association, pair) -> np.ndarray:
    b1, b2 = pair
    return np.flatnonzero((assoc.labels == b1) | (assoc.labels == b2))


def f_value(u1, u2, q1: float, q2: float, load1: int, load2: int, r_min: float):
    """``y + a`` with ``y = q1*u1 - q2*u2`` and intercept ``a = q2*r_min/load2 - q1*r_min/load1``."""
    return q1 * np.asarray(u1) - q2 * np.asarray(u2) + (q2 * r_min / load2 - q1 * r_min / load1)


def f_scores(pair, assoc: Association, scn: Scenario) -> list[FScore]:
    """Marginal-benefit score of each user currently on either BS of ``pair``.

    ``F = Q1*u1 - Q2*u2 + (Q2*r_min/L2 - Q1*r_min/L1)`` with ``Q_b = 1/U_b``,
    all evaluated at the current association. Positive values lean to the
    first BS of the pair, negative to the second.
    """
    b1, b2 = pair
    loads = assoc.loads
    if loads[b1] < 1 or loads[b2] < 1:
        raise InfeasibleError(f"pair {pair} has an unloaded BS")
    u_bs = bs_utilities(scn, assoc)
    if u_bs[b1] <= 0 or u_bs[b2] <= 0:
        raise InfeasibleError(f"pair {pair} utilities {u_bs[[b1, b2]]} not strictly positive")
    users = pair_users(assoc, pair)
    rates = rate_table(scn, assoc).rates
    u1 = utility(rates[b1, users], scn.r_min)
    u2 = utility(rates[b2, users], scn.r_min)
    values = np.atleast_1d(f_value(u1, u2, 1.0 / u_bs[b1], 1.0 / u_bs[b2],
                                   loads[b1], loads[b2], scn.r_min))
    return [FScore(int(n), float(v)) for n, v in zip(users, values)]


def sort_by_score(scores: list[FScore]) -> np.ndarray:
    """User indices by descending score, ascending user index on ties."""
    ordered = sorted(scores, key=lambda s: (-s.value, s.user))
    return np.array([s.user for s in ordered], dtype=np.int64)


def split_nash(scn: Scenario, assoc: Association, sorted_users, pair, m: int):
    """Association and two-player Nash product for cutting ``sorted_users`` after ``m``."""
    b1, b2 = pair
    labels = assoc.labels.copy()
    labels[sorted_users[:m]] = b1
    labels[sorted_users[m:]] = b2
    cand = Association(labels, assoc.num_bs)
    u = bs_utilities(scn, cand)
    if u[b1] < 0 or u[b2] < 0:
        return cand, -np.inf
    return cand, float(u[b1] * u[b2])


def two_band_partition_step(sorted_users, pair, scn: Scenario, assoc: Association):
    """Best contiguous cut of ``sorted_users`` between the two BSs of ``pair``.

    Every cut ``m = 1 .. len-1`` is evaluated with loads and rates recomputed;
    cuts leaving either BS with negative utility score ``-inf``. Returns
    ``(m, nash, assoc)`` for the first best cut.
    """
    sorted_users = np.asarray(sorted_users, dtype=np.int64)
    if sorted_users.size < 2:
        raise ValueError("two-band partition needs at least two users")
    best = (0, -np.inf, None)
    for m in range(1, sorted_users.size):
        cand, nash = split_nash(scn, assoc, sorted_users, pair, m)
        if nash > best[1]:
            best = (m, nash, cand)
    if best[2] is None:
        raise InfeasibleError(f"no feasible two-band split for pair {pair}")
    return best


def reinitialize_pair(pair, assoc: Association, scn: Scenario) -> Association:
    """SINR-greedy split of the pair's users with balanced caps ``ceil(n/2)``."""
    users = pair_users(assoc, pair)
    cap = -(-users.size // 2)
    rows = list(pair)
    s = sinr_matrix(scn, np.full(scn.num_bs, cap))[rows]
    local = greedy_assign(s, [cap, cap], users)
    return assoc.reassign(users, np.asarray(rows)[local[users]])


def ratio_cut_initialization(pair, assoc: Association, scn: Scenario) -> Association:
    """Best feasible cut of the pair's users ordered by SINR ratio toward the first BS.

    Used when the balanced greedy start still leaves a BS with non-positive
    utility. Raises :class:`InfeasibleError` when no cut gives both BSs a
    positive utility.
    """
    b1, b2 = pair
    users = pair_users(assoc, pair)
    rx = scn.powers[[b1, b2]][:, None] * scn.gains[[b1, b2]][:, users]
    lean = np.log(rx[0]) - np.log(rx[1])
    order = users[np.lexsort((users, -lean))]
    best, best_nash = None, 0.0
    for m in range(1, order.size):
        cand, _ = split_nash(scn, assoc, order, pair, m)
        u = bs_utilities(scn, cand)
        if u[b1] > 0 and u[b2] > 0 and u[b1] * u[b2] > best_nash:
            best, best_nash = cand, u[b1] * u[b2]
    if best is None:
        raise InfeasibleError(f"no positive-utility initialization for pair {pair}")
    return best


def two_band_nbs(pair, initial_assoc: Association, scn: Scenario,
                 max_iter: int | None = None) -> GameOutcome:
    """Bargain the users of ``pair`` between its two BSs.

    Starts from ``initial_assoc``. If either BS is empty or has non-positive
    utility there, the pair is re-initialized SINR-greedily with balanced caps,
    falling back to :func:`ratio_cut_initialization`. It then iterates score,
    sort, cut until the Nash product stops increasing. The returned outcome is the best association
    seen; ``info['history']`` holds the accepted Nash products in order.
    Users outside the pair are never moved.
    """
    b1, b2 = pair
    if b1 == b2:
        raise ValueError("a coalition needs two distinct BSs")
    users = pair_users(initial_assoc, pair)
    if users.size < 2:
        raise InfeasibleError(f"pair {pair} shares fewer than two users")
    if max_iter is None:
        max_iter = 10 * users.size

    assoc = initial_assoc
    u = bs_utilities(scn, assoc)
    reinit = bool(assoc.loads[b1] < 1 or assoc.loads[b2] < 1 or u[b1] <= 0 or u[b2] <= 0)
    if reinit:
        assoc = reinitialize_pair(pair, assoc, scn)
        u = bs_utilities(scn, assoc)
        if u[b1] <= 0 or u[b2] <= 0:
            assoc = ratio_cut_initialization(pair, assoc, scn)
            u = bs_utilities(scn, assoc)
    best = float(u[b1] * u[b2])
    history = [best]
    capped = False
    iterations = 0
    while True:
        if iterations >= max_iter:
            capped = True
            log.warning("two-band bargaining for pair %s hit the %d-iteration cap", pair, max_iter)
            break
        iterations += 1
        order = sort_by_score(f_scores(pair, assoc, scn))
        try:
            _, nash, cand = two_band_partition_step(order, pair, scn, assoc)
        except InfeasibleError:
            break
        if nash <= best:
            break
        best, assoc = nash, cand
        history.append(nash)
    return evaluate(scn, assoc, pair=tuple(pair), iterations=iterations, history=history,
                    initial_nash=history[0], reinitialized=reinit, capped=capped)
