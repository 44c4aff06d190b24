"""Nash bargaining objective for the B-player association game.

Each BS is a player whose payoff is its utility ``U_b``; the disagreement
point defaults to zero so the objective is ``prod_b U_b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .radio import Association, bs_utilities, served_rates
from .scenario import Scenario


class InfeasibleError(RuntimeError):
    """No association satisfying the bargaining constraints was found."""


class Feasibility(NamedTuple):
    ok: bool
    reason: str


@dataclass
class GameOutcome:
    assoc: Association
    utilities: np.ndarray
    per_user_rate: np.ndarray
    disagreement: np.ndarray | None = None
    # solver diagnostics: iterations, alpha, coalitions, warnings...
    info: dict = field(default_factory=dict)

    @property
    def loads(self) -> np.ndarray:
        return self.assoc.loads

    @property
    def gains_over_disagreement(self) -> np.ndarray:
        d = 0.0 if self.disagreement is None else self.disagreement
        return self.utilities - d

    @property
    def nash_product(self) -> float:
        return float(np.prod(self.gains_over_disagreement))

    @property
    def log_nash(self) -> float:
        """Sum of log gains, or ``-inf`` when some player is not strictly above d."""
        g = self.gains_over_disagreement
        if np.any(g <= 0):
            return -np.inf
        return float(np.sum(np.log(g)))

    @property
    def feasible(self) -> bool:
        return bool(np.all(self.gains_over_disagreement >= 0))

    @property
    def sum_rate(self) -> float:
        return float(self.per_user_rate.sum())


def evaluate(scn: Scenario, assoc: Association, disagreement=None, **info) -> GameOutcome:
    """Bundle utilities and rates of ``assoc`` into a :class:`GameOutcome`."""
    d = None if disagreement is None else np.broadcast_to(
        np.asarray(disagreement, dtype=float), (assoc.num_bs,)).copy()
    return GameOutcome(assoc=assoc, utilities=bs_utilities(scn, assoc),
                       per_user_rate=served_rates(scn, assoc), disagreement=d, info=dict(info))


def nash_product(assoc: Association, scn: Scenario, disagreement=0.0) -> float:
    """Product of utility gains over the disagreement point.

    Not clipped: a negative factor makes the product meaningless and callers
    are expected to check :func:`is_feasible` first.
    """
    return float(np.prod(bs_utilities(scn, assoc) - disagreement))


def log_nash(assoc: Association, scn: Scenario, disagreement=0.0) -> float:
    """``sum_b ln(U_b - d_b)``; raises :class:`InfeasibleError` off the interior."""
    g = bs_utilities(scn, assoc) - disagreement
    if np.any(g <= 0):
        bad = np.flatnonzero(g <= 0).tolist()
        raise InfeasibleError(f"log-Nash undefined: BS {bad} not strictly above disagreement")
    return float(np.sum(np.log(g)))


def is_feasible(assoc, scn: Scenario, disagreement=0.0) -> Feasibility:
    """Check the association constraints and ``U_b >= d_b`` for every BS.

    ``assoc`` may be an :class:`Association` or a raw B x N matrix.
    """
    if not isinstance(assoc, Association):
        x = np.asarray(assoc)
        col = x.sum(axis=0)
        if not np.all((x == 0) | (x == 1)):
            return Feasibility(False, "non-binary association")
        if np.any(col == 0):
            return Feasibility(False, "unassigned user")
        if np.any(col > 1):
            return Feasibility(False, "user served by several BSs")
        assoc = Association.from_matrix(x)
    u = bs_utilities(scn, assoc) - disagreement
    if np.any(u < 0):
        return Feasibility(False, "negative utility")
    return Feasibility(True, "")
