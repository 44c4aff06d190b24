"""
Fairness against throughput over many drops
===========================================

Averages the two schemes over 100 drops for the two BS counts of interest
(4 and 6 pico BSs) and a range of user counts. This is the same grid the
command-line runner produces, done inline so the numbers can be poked at.

A handful of 7-BS drops have no α for which every coalition reaches a
nonnegative utility; those drops are skipped for both schemes and counted.
"""

import numpy as np

from hetnet_nbs import ScenarioConfig, make_scenario
from hetnet_nbs.bargain import InfeasibleError
from hetnet_nbs.baseline import max_sum_rate
from hetnet_nbs.metrics import report, summarize
from hetnet_nbs.scga import scga_nbs

DROPS = 100

for num_bs in (5, 7):
    for n in (20, 30, 40, 50, 60):
        cfg = ScenarioConfig(num_users=n, num_bs=num_bs, seed=0)
        nbs, msr, skipped = [], [], 0
        for drop in range(DROPS):
            scn = make_scenario(cfg, drop)
            try:
                nbs.append(report(scn, scga_nbs(scn).assoc, "scga-nbs", drop))
            except InfeasibleError:
                skipped += 1
                continue
            msr.append(report(scn, max_sum_rate(scn).assoc, "max-sum-rate", drop))
        a, b = summarize(nbs), summarize(msr)
        keep = np.mean([x.sum_rate / y.sum_rate for x, y in zip(nbs, msr)])
        print(f"B={num_bs} N={n:2d}  jain_bs {a['jain_bs_utility']['mean']:.3f} / "
              f"{b['jain_bs_utility']['mean']:.3f}  jain_user {a['jain_user_rate']['mean']:.3f} / "
              f"{b['jain_user_rate']['mean']:.3f}  srr median {a['srr_raw']['median']:.2f} / "
              f"{b['srr_raw']['median']:.2f}  sum-rate kept {keep:.2f}  skipped {skipped}")
