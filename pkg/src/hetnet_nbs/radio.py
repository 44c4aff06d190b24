"""Load-dependent SINR, rate and utility model.

A BS serving ``L`` users splits its band ``W`` equally (FDMA), so each of its
users sees noise power ``noise_psd * W / L`` and rate ``(W / L) log2(1 + SINR)``.
Interference comes from every other BS at full power regardless of load.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Scenario


class Association:
    """User-to-BS association, stored as one serving-BS label per user.

    The binary B x N matrix view is available as :attr:`matrix`; storing
    labels makes the one-user-one-BS column constraint impossible to break.
    """

    __slots__ = ("labels", "num_bs")

    def __init__(self, labels, num_bs: int):
        labels = np.array(labels, dtype=np.int64).reshape(-1)
        if labels.size and (labels.min() < 0 or labels.max() >= num_bs):
            raise ValueError(f"labels must lie in [0, {num_bs}), got {labels}")
        labels.setflags(write=False)
        self.labels = labels
        self.num_bs = int(num_bs)

    @classmethod
    def from_matrix(cls, x) -> "Association":
        x = np.asarray(x)
        if x.ndim != 2:
            raise ValueError("association matrix must be 2-D (B x N)")
        if not np.all((x == 0) | (x == 1)):
            raise ValueError("association matrix must be binary")
        col = x.sum(axis=0)
        if np.any(col == 0):
            raise ValueError(f"unassigned user(s) {np.flatnonzero(col == 0).tolist()}")
        if np.any(col > 1):
            raise ValueError(f"user(s) {np.flatnonzero(col > 1).tolist()} served by several BSs")
        return cls(np.argmax(x, axis=0), x.shape[0])

    @property
    def num_users(self) -> int:
        return self.labels.size

    @property
    def matrix(self) -> np.ndarray:
        x = np.zeros((self.num_bs, self.num_users), dtype=np.int64)
        x[self.labels, np.arange(self.num_users)] = 1
        return x

    @property
    def loads(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_bs)

    def users_of(self, b: int) -> np.ndarray:
        return np.flatnonzero(self.labels == b)

    def reassign(self, users, bs) -> "Association":
        """Copy with ``users`` moved to ``bs`` (scalar or one BS per user)."""
        labels = self.labels.copy()
        labels[np.asarray(users, dtype=np.int64)] = bs
        return Association(labels, self.num_bs)

    def __eq__(self, other):
        return (isinstance(other, Association) and self.num_bs == other.num_bs
                and np.array_equal(self.labels, other.labels))

    def __hash__(self):
        return hash((self.num_bs, self.labels.tobytes()))

    def __repr__(self):
        return f"Association({self.labels.tolist()}, num_bs={self.num_bs})"


@dataclass(frozen=True)
class RateTable:
    """Rates and SINRs of every (BS, user) pair at the current BS loads.

    Rows of BSs with zero load are left at 0 since no SINR is defined there.
    """

    rates: np.ndarray
    sinrs: np.ndarray


def effective_load(assoc: Association, b: int) -> int:
    return int(np.count_nonzero(assoc.labels == b))


def interference(scn: Scenario) -> np.ndarray:
    """B x N interference ``sum_{i != b} P_i G_in`` seen by user n when served by b."""
    rx = scn.powers[:, None] * scn.gains
    return rx.sum(axis=0, keepdims=True) - rx


def sinr(b: int, n: int, load_b: int, gains, powers, bandwidth: float, noise_psd: float) -> float:
    """SINR of user ``n`` served by BS ``b`` which carries ``load_b`` users."""
    if load_b < 1:
        raise ValueError("load_b must be >= 1; SINR undefined for an unloaded BS")
    gains = np.asarray(gains, dtype=float)
    powers = np.asarray(powers, dtype=float)
    rx = powers * gains[:, n]
    return float(rx[b] / (rx.sum() - rx[b] + noise_psd * bandwidth / load_b))


def sinr_matrix(scn: Scenario, loads) -> np.ndarray:
    """SINR of every (b, n) pair with BS b carrying ``loads[b]`` users.

    ``loads`` may be any positive per-BS vector (e.g. initialization caps).
    """
    loads = np.asarray(loads, dtype=float)
    if np.any(loads < 1):
        raise ValueError("all loads must be >= 1")
    rx = scn.powers[:, None] * scn.gains
    noise = scn.noise_psd * scn.bandwidth / loads
    return rx / (interference(scn) + noise[:, None])


def rate(b: int, n: int, load_b: int, gains, powers, bandwidth: float, noise_psd: float) -> float:
    s = sinr(b, n, load_b, gains, powers, bandwidth, noise_psd)
    return bandwidth / load_b * float(np.log2(1.0 + s))


def rate_from_sinr(sinr_value, load, bandwidth: float):
    return bandwidth / np.asarray(load, dtype=float) * np.log2(1.0 + sinr_value)


def utility(r_bn, r_min: float):
    """Per-user utility ``ln(r / r_min)`` in nats; negative below the minimum rate."""
    r_bn = np.asarray(r_bn, dtype=float)
    if r_min <= 0:
        raise ValueError("r_min must be positive")
    if np.any(r_bn <= 0):
        raise ValueError("rates must be strictly positive to define a utility")
    out = np.log(r_bn / r_min)
    return float(out) if out.ndim == 0 else out


def rate_table(scn: Scenario, assoc: Association) -> RateTable:
    loads = assoc.loads
    active = loads > 0
    sinrs = np.zeros(scn.gains.shape)
    rates = np.zeros(scn.gains.shape)
    if active.any():
        s = sinr_matrix(scn, np.where(active, loads, 1))
        sinrs[active] = s[active]
        rates[active] = rate_from_sinr(s[active], loads[active, None], scn.bandwidth)
    return RateTable(rates=rates, sinrs=sinrs)


def served_rates(scn: Scenario, assoc: Association) -> np.ndarray:
    """Rate each user actually gets from its serving BS (length N)."""
    loads = assoc.loads[assoc.labels]
    n = np.arange(assoc.num_users)
    rx = scn.powers[:, None] * scn.gains
    signal = rx[assoc.labels, n]
    noise = scn.noise_psd * scn.bandwidth / loads
    s = signal / (rx.sum(axis=0) - signal + noise)
    return rate_from_sinr(s, loads, scn.bandwidth)


def bs_utilities(scn: Scenario, assoc: Association) -> np.ndarray:
    """Per-BS utility ``U_b``: sum of its users' utilities at the current loads."""
    u = utility(served_rates(scn, assoc), scn.r_min)
    return np.bincount(assoc.labels, weights=np.atleast_1d(u), minlength=assoc.num_bs)


def bs_utility(b: int, scn: Scenario, assoc: Association) -> float:
    return float(bs_utilities(scn, assoc)[b])


def bs_sum_rates(scn: Scenario, assoc: Association) -> np.ndarray:
    return np.bincount(assoc.labels, weights=served_rates(scn, assoc), minlength=assoc.num_bs)


def greedy_assign(score, caps, users=None) -> np.ndarray:
    """Capped greedy assignment on a B x N score matrix.

    Repeatedly takes the largest remaining entry (first in row-major order on
    ties), assigns that user to that BS, retires the user's column and retires
    a BS's row once it holds ``caps[b]`` users. Returns one label per column of
    ``score``; only the columns listed in ``users`` (default: all) are assigned,
    the rest are labelled -1.
    """
    score = np.asarray(score, dtype=float)
    caps = np.asarray(caps, dtype=np.int64)
    b_count, n_count = score.shape
    cols = np.arange(n_count) if users is None else np.asarray(users, dtype=np.int64)
    if caps.shape != (b_count,) or np.any(caps < 0):
        raise ValueError("caps must be a nonnegative vector with one entry per BS")
    if caps.sum() < cols.size:
        raise ValueError(f"caps sum to {caps.sum()} but {cols.size} users need a BS")
    work = np.full(score.shape, -np.inf)
    work[:, cols] = score[:, cols]
    work[caps == 0] = -np.inf
    labels = np.full(n_count, -1, dtype=np.int64)
    load = np.zeros(b_count, dtype=np.int64)
    for _ in range(cols.size):
        b, n = np.unravel_index(np.argmax(work), work.shape)
        labels[n] = b
        load[b] += 1
        work[:, n] = -np.inf
        if load[b] >= caps[b]:
            work[b, :] = -np.inf
    return labels
