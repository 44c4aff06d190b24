"""Throughput-oriented association: maximize the network sum rate.

The sum rate couples users through the per-BS load (each BS shares its band
equally), so instead of a convex solve we run best-response local search:
at each step the single-user move with the largest sum-rate gain is applied,
until no move helps. The search starts from the max-SINR association.

Single moves cannot empty a crowded BS in one go, so the global sum-rate
optimum (typically one strong user alone on one BS and everyone else piled
onto another) is often out of reach. ``multi_start=True`` also climbs from
one "concentrated" start per BS and keeps the best local optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .radio import Association, bs_sum_rates, interference
from .scenario import Scenario


@dataclass
class SumRateOutcome:
    assoc: Association
    total_rate: float
    per_bs_rate: np.ndarray
    info: dict = field(default_factory=dict)


def max_sinr_association(scn: Scenario) -> Association:
    """Every user on the BS with the highest full-band SINR (lowest index on ties)."""
    rx = scn.powers[:, None] * scn.gains
    s = rx / (interference(scn) + scn.noise_psd * scn.bandwidth)
    return Association(np.argmax(s, axis=0), scn.num_bs)


def concentrated_association(scn: Scenario, hub: int) -> Association:
    """All users on ``hub`` except that every other BS keeps its best-SINR user."""
    rx = scn.powers[:, None] * scn.gains
    s = rx / (interference(scn) + scn.noise_psd * scn.bandwidth)
    labels = np.full(scn.num_users, hub, dtype=np.int64)
    taken = np.zeros(scn.num_users, dtype=bool)
    for b in range(scn.num_bs):
        if b == hub:
            continue
        n = int(np.argmax(np.where(taken, -np.inf, s[b])))
        labels[n] = b
        taken[n] = True
    return Association(labels, scn.num_bs)


def start_points(scn: Scenario, multi_start: bool = False) -> list[Association]:
    starts = [max_sinr_association(scn)]
    if multi_start and scn.num_users >= scn.num_bs:
        starts += [concentrated_association(scn, b) for b in range(scn.num_bs)]
    return starts


def _spectral_eff(rx, interf, noise_psd, bandwidth, load):
    """log2(1 + SINR) for every (b, n) at per-BS loads ``load`` (shape (B,))."""
    load = np.maximum(np.asarray(load, dtype=float), 1.0)
    return np.log2(1.0 + rx / (interf + noise_psd * bandwidth / load[:, None]))


def move_gains(scn: Scenario, assoc: Association) -> np.ndarray:
    """N x B sum-rate change from moving user n to BS b (0 for its own BS)."""
    b_count, n_count = scn.gains.shape
    w = scn.bandwidth
    rx = scn.powers[:, None] * scn.gains
    interf = interference(scn)
    labels = assoc.labels
    loads = assoc.loads
    member = assoc.matrix.astype(bool)

    se_now = _spectral_eff(rx, interf, scn.noise_psd, w, loads)
    se_up = _spectral_eff(rx, interf, scn.noise_psd, w, loads + 1)
    se_down = _spectral_eff(rx, interf, scn.noise_psd, w, loads - 1)

    safe = np.maximum(loads, 1)
    old = np.where(loads > 0, w / safe * (se_now * member).sum(axis=1), 0.0)
    gain_up = w / (loads + 1)[:, None] * ((se_up * member).sum(axis=1)[:, None] + se_up)  # (B, N)
    down_total = (se_down * member).sum(axis=1)
    n = np.arange(n_count)
    src = labels
    left = loads[src] - 1
    loss_down = np.where(left > 0, w / np.maximum(left, 1) * (down_total[src] - se_down[src, n]), 0.0)

    delta = (gain_up.T + loss_down[:, None]) - old[None, :] - old[src][:, None]
    delta[n, src] = 0.0
    return delta


def best_response(scn: Scenario, start: Association, max_moves: int | None = None,
                  rtol: float = 1e-12) -> SumRateOutcome:
    """Single-user-move hill climbing on the sum rate from ``start``.

    A move is accepted only if it raises the sum rate by more than ``rtol``
    relative to the current total; among equal best moves the lowest
    ``(user, BS)`` wins.
    """
    assoc = start
    if max_moves is None:
        max_moves = 50 * scn.num_users
    total = float(bs_sum_rates(scn, assoc).sum())
    history = [total]
    moves = 0
    while True:
        delta = move_gains(scn, assoc)
        k = int(np.argmax(delta))
        n, b = divmod(k, scn.num_bs)
        if delta[n, b] <= rtol * total:
            break
        if moves >= max_moves:
            raise RuntimeError(f"best-response did not settle within {max_moves} moves")
        assoc = assoc.reassign([n], b)
        total = float(bs_sum_rates(scn, assoc).sum())
        history.append(total)
        moves += 1
    per_bs = bs_sum_rates(scn, assoc)
    return SumRateOutcome(assoc=assoc, total_rate=float(per_bs.sum()), per_bs_rate=per_bs,
                          info={"iterations": moves, "history": history})


def max_sum_rate(scn: Scenario, starts=None, multi_start: bool = False,
                 **kwargs) -> SumRateOutcome:
    """Max-sum-rate association by best-response local search.

    ``starts`` defaults to :func:`start_points`; with several starts the best
    local optimum wins, ties keeping the earliest. ``info['iterations']``
    counts moves over all starts.
    """
    starts = start_points(scn, multi_start) if starts is None else list(starts)
    best, total_moves = None, 0
    for k, start in enumerate(starts):
        out = best_response(scn, start, **kwargs)
        total_moves += out.info["iterations"]
        if best is None or out.total_rate > best.total_rate:
            best = out
            best.info["start"] = k
    best.info["iterations"] = total_moves
    return best
