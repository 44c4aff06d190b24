"""
How close do the heuristics get?
================================

With two BSs and a dozen users every association can be enumerated, so the
two-band bargaining step and the best-response baseline can be scored
against the true optimum of their own objectives.
"""

from hetnet_nbs import ScenarioConfig, make_scenario
from hetnet_nbs.baseline import max_sum_rate
from hetnet_nbs.bargain import InfeasibleError
from hetnet_nbs.exhaustive import brute_force
from hetnet_nbs.scga import LoadCaps, initialize
from hetnet_nbs.two_band import two_band_nbs

N = 10
nbs_ratio, msr_ratio, msr_multi = [], [], []
for seed in range(50):
    scn = make_scenario(ScenarioConfig(num_users=N, num_bs=2, seed=seed))
    try:
        best = brute_force(scn, "nash").value
        got = two_band_nbs((0, 1), initialize(scn, LoadCaps.from_alpha(1, N, 2)), scn)
        nbs_ratio.append(got.nash_product / best)
    except (ValueError, InfeasibleError):
        pass
    best_rate = brute_force(scn, "sum_rate").value
    msr_ratio.append(max_sum_rate(scn).total_rate / best_rate)
    msr_multi.append(max_sum_rate(scn, multi_start=True).total_rate / best_rate)

print(f"two-band / optimal Nash product: min {min(nbs_ratio):.4f} over {len(nbs_ratio)} seeds")
print(f"best-response / optimal sum rate: min {min(msr_ratio):.3f}, "
      f"share >= 0.95: {sum(r >= 0.95 for r in msr_ratio) / len(msr_ratio):.2f}")
print(f"  with extra concentrated starts: min {min(msr_multi):.3f}")
