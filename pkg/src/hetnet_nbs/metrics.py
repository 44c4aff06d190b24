"""Fairness and throughput metrics for an association outcome."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .radio import Association, bs_utilities, served_rates
from .scenario import Scenario

log = logging.getLogger(__name__)


def jain_index(shares, n: int | None = None) -> float:
    """Jain's fairness index ``(sum x)^2 / (n sum x^2)``.

    ``n`` defaults to the number of shares. Lies in ``[1/n, 1]``, reaching 1
    only for equal shares.

    >>> jain_index([1, 2, 3])  # doctest: +ELLIPSIS
    0.857142...
    """
    x = np.asarray(shares, dtype=float).reshape(-1)
    if n is None:
        n = x.size
    if n < 1:
        raise ValueError("need at least one share")
    if np.any(x < 0):
        raise ValueError("shares must be nonnegative")
    if x.max() == 0.0:
        raise ValueError("Jain index undefined for all-zero shares")
    # scale out the largest share: exact scale invariance, no underflow of sum x^2
    x = x / x.max()
    return float(np.sum(x) ** 2 / (n * np.sum(x * x)))


def srr(per_bs_rate) -> tuple[float, float]:
    """Sum rate ratio: best pico BS aggregate rate over the macro BS's.

    Returns ``(raw, clamped)``; the raw ratio can exceed 1.
    """
    r = np.asarray(per_bs_rate, dtype=float)
    if r[0] <= 0:
        raise ValueError("SRR undefined: macro BS serves no traffic")
    raw = float(r[1:].max() / r[0]) if r.size > 1 else 0.0
    return raw, min(raw, 1.0)


@dataclass
class MetricsReport:
    scheme: str
    drop_id: int
    n_users: int
    num_bs: int
    nash_product: float
    sum_rate: float
    avg_user_rate: float
    jain_bs_utility: float
    jain_user_rate: float
    srr_raw: float
    srr_clamped: float
    qos_satisfaction: float
    loads: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def report(scn: Scenario, assoc: Association, scheme: str, drop_id: int = 0) -> MetricsReport:
    """Evaluate every metric for ``assoc``.

    Negative BS utilities are left out of the BS Jain index (with a warning);
    an undefined SRR (idle macro BS) is recorded as NaN.
    """
    u = bs_utilities(scn, assoc)
    rates = served_rates(scn, assoc)
    per_bs = np.bincount(assoc.labels, weights=rates, minlength=assoc.num_bs)
    shares = u[u >= 0]
    if shares.size < u.size:
        log.warning("%s drop %d: %d negative BS utilities excluded from Jain index",
                    scheme, drop_id, u.size - shares.size)
    try:
        jain_bs = jain_index(shares)
    except ValueError:
        jain_bs = float("nan")
    try:
        srr_raw, srr_clamped = srr(per_bs)
    except ValueError:
        srr_raw = srr_clamped = float("nan")
    return MetricsReport(
        scheme=scheme, drop_id=drop_id, n_users=assoc.num_users, num_bs=assoc.num_bs,
        nash_product=float(np.prod(u)), sum_rate=float(rates.sum()),
        avg_user_rate=float(rates.mean()), jain_bs_utility=jain_bs,
        jain_user_rate=jain_index(rates), srr_raw=srr_raw, srr_clamped=srr_clamped,
        qos_satisfaction=float(np.mean(rates >= scn.r_min)), loads=assoc.loads.tolist(),
    )


NUMERIC_FIELDS = [f.name for f in fields(MetricsReport)
                  if f.name not in ("scheme", "drop_id", "n_users", "num_bs", "loads")]


def summarize(reports) -> dict:
    """Mean, median and population std (ddof=0) of every numeric field.

    NaN entries (e.g. undefined SRR) are ignored via the ``nan*`` reducers.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to summarize")
    out = {"count": len(reports)}
    for name in NUMERIC_FIELDS:
        vals = np.array([getattr(r, name) for r in reports], dtype=float)
        if np.all(np.isnan(vals)):
            out[name] = {"mean": np.nan, "median": np.nan, "std": np.nan}
            continue
        out[name] = {"mean": float(np.nanmean(vals)), "median": float(np.nanmedian(vals)),
                     "std": float(np.nanstd(vals))}
    return out
