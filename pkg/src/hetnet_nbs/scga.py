"""SINR-based coalition generation with per-coalition bargaining (SCGA-NBS).

For each macro load proportion ``alpha`` the users are first placed
SINR-greedily under per-BS caps, BSs are then paired greedily by how well
each one hears the other's users, and each pair bargains over its joint
users with :func:`two_band_nbs`. The alpha giving the largest network-wide
Nash product wins.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .bargain import GameOutcome, InfeasibleError, evaluate
from .radio import Association, greedy_assign, sinr_matrix
from .scenario import Scenario
from .two_band import two_band_nbs

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LoadCaps:
    """Per-BS user caps for the initialization phase.

    The macro BS gets ``round(alpha*N/B)`` users; the remainder is split as
    evenly as possible over the pico BSs, lower indices taking the extras.
    """

    alpha: float
    caps: np.ndarray

    @property
    def mbs_cap(self) -> int:
        return int(self.caps[0])

    @property
    def pbs_caps(self) -> np.ndarray:
        return self.caps[1:]

    @classmethod
    def from_alpha(cls, alpha: float, num_users: int, num_bs: int) -> "LoadCaps":
        if alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {alpha}")
        mbs = int(math.floor(alpha * num_users / num_bs + 0.5))
        rest = num_users - mbs
        if mbs < 1 or rest < num_bs - 1:
            raise ValueError(
                f"alpha={alpha} leaves a BS without users (N={num_users}, B={num_bs})")
        base, extra = divmod(rest, num_bs - 1)
        pbs = np.full(num_bs - 1, base, dtype=np.int64)
        pbs[:extra] += 1
        return cls(alpha=alpha, caps=np.concatenate([[mbs], pbs]).astype(np.int64))


def alpha_sweep(num_users: int, num_bs: int) -> list[int]:
    """Integer alphas from 1 up to the value that leaves one user per pico BS."""
    top = max(1, (num_bs * (num_users - num_bs + 1)) // num_users)
    return list(range(1, top + 1))


def initialize(scn: Scenario, caps: LoadCaps) -> Association:
    """Capped SINR-greedy initial association.

    SINRs are computed as if each BS already carried its cap, since that is
    the only load defined before any user is placed.
    """
    c = np.asarray(caps.caps)
    if c.shape != (scn.num_bs,) or c.sum() < scn.num_users or np.any(c < 1):
        raise ValueError(f"caps {c.tolist()} cannot host {scn.num_users} users on {scn.num_bs} BSs")
    labels = greedy_assign(sinr_matrix(scn, c), c)
    return Association(labels, scn.num_bs)


def benefit_matrix(x0: Association, sinr_full) -> np.ndarray:
    """``omega[i, j]``: summed SINR from BS i to the users initialized on BS j."""
    omega = np.asarray(sinr_full, dtype=float) @ x0.matrix.T
    np.fill_diagonal(omega, 0.0)
    return omega


def benefit_sinr(scn: Scenario, x0: Association) -> np.ndarray:
    """SINR matrix used for the benefit matrix, each BS at its own initial load."""
    return sinr_matrix(scn, np.maximum(x0.loads, 1))


@dataclass(frozen=True)
class CoalitionMatrix:
    c: np.ndarray
    pairs: tuple

    @property
    def unpaired(self) -> list[int]:
        return [b for b in range(self.c.shape[0]) if not self.c[b].any()]

    def partner(self, b: int) -> int | None:
        hit = np.flatnonzero(self.c[b])
        return int(hit[0]) if hit.size else None


def generate_coalitions(omega) -> CoalitionMatrix:
    """Greedy max-first pairing of BSs on the symmetrized benefit ``omega + omega.T``.

    Ties go to the lexicographically smallest ``(i, j)``. With an odd number
    of BSs one BS is left without a partner.
    """
    omega = np.asarray(omega, dtype=float)
    b = omega.shape[0]
    if b < 2 or omega.shape != (b, b):
        raise ValueError("benefit matrix must be square with at least two BSs")
    s = omega + omega.T
    candidates = sorted(((-s[i, j], i, j) for i in range(b) for j in range(i + 1, b)))
    used = np.zeros(b, dtype=bool)
    c = np.zeros((b, b), dtype=np.int64)
    pairs = []
    for _, i, j in candidates:
        if used[i] or used[j]:
            continue
        used[i] = used[j] = True
        c[i, j] = c[j, i] = 1
        pairs.append((i, j))
    return CoalitionMatrix(c=c, pairs=tuple(pairs))


def bargain_coalitions(scn: Scenario, x0: Association, coalitions: CoalitionMatrix):
    """Run two-band bargaining in each coalition, one after another.

    Coalitions share no users and a user's rate depends only on its own BS's
    load, so the order does not matter. A coalition whose bargaining fails
    keeps its initialized users.
    """
    assoc = x0
    failed = []
    iterations = 0
    for pair in coalitions.pairs:
        try:
            out = two_band_nbs(pair, assoc, scn)
        except InfeasibleError as exc:
            log.debug("coalition %s kept its initialization: %s", pair, exc)
            failed.append(pair)
            continue
        assoc = out.assoc
        iterations += out.info["iterations"]
    return assoc, failed, iterations


def scga_nbs(scn: Scenario, alphas=None) -> GameOutcome:
    """Fair association by SINR-based coalition generation and bargaining.

    Sweeps ``alphas`` (default :func:`alpha_sweep`) and returns the feasible
    outcome with the largest Nash product over all BSs; ties keep the
    smallest alpha. ``info['sweep']`` records per-alpha diagnostics.

    Raises :class:`InfeasibleError` when no alpha yields ``U_b >= 0`` for all BSs.
    """
    if alphas is None:
        alphas = alpha_sweep(scn.num_users, scn.num_bs)
    best = None
    sweep = []
    for alpha in alphas:
        try:
            caps = LoadCaps.from_alpha(alpha, scn.num_users, scn.num_bs)
        except ValueError as exc:
            sweep.append({"alpha": alpha, "status": f"skipped: {exc}"})
            continue
        x0 = initialize(scn, caps)
        init = evaluate(scn, x0)
        coalitions = generate_coalitions(benefit_matrix(x0, benefit_sinr(scn, x0)))
        assoc, failed, iterations = bargain_coalitions(scn, x0, coalitions)
        out = evaluate(scn, assoc)
        row = {"alpha": alpha, "init_nash": init.nash_product, "init_feasible": init.feasible,
               "nash": out.nash_product, "feasible": out.feasible, "pairs": coalitions.pairs,
               "failed_pairs": failed, "iterations": iterations}
        sweep.append(row)
        if out.feasible and (best is None or out.nash_product > best[0].nash_product):
            best = (out, alpha, coalitions, iterations)
    if best is None:
        raise InfeasibleError(f"no feasible association over alpha sweep: {sweep}")
    out, alpha, coalitions, _ = best
    out.info.update(alpha=alpha, coalitions=coalitions.pairs, sweep=sweep,
                    iterations=sum(r.get("iterations", 0) for r in sweep))
    return out
