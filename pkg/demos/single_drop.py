"""
One drop, step by step
======================

Builds a single reference drop (40 users, one macro BS and four pico BSs),
runs the coalition-based bargaining scheme and the sum-rate baseline on it,
and prints what each one does with the users.
"""

import numpy as np

from hetnet_nbs import ScenarioConfig, make_scenario
from hetnet_nbs.baseline import max_sum_rate
from hetnet_nbs.metrics import report
from hetnet_nbs.scga import LoadCaps, alpha_sweep, benefit_matrix, benefit_sinr, \
    generate_coalitions, initialize, scga_nbs

np.set_printoptions(precision=3, suppress=True)

cfg = ScenarioConfig(num_users=40, num_bs=5, seed=0)
scn = make_scenario(cfg, drop=0)
print("BS positions (m):\n", scn.topology.bs_positions)

# %%
# The alpha sweep fixes how many users the macro BS may take at the start.
for alpha in alpha_sweep(cfg.num_users, cfg.num_bs):
    caps = LoadCaps.from_alpha(alpha, cfg.num_users, cfg.num_bs)
    x0 = initialize(scn, caps)
    omega = benefit_matrix(x0, benefit_sinr(scn, x0))
    pairs = generate_coalitions(omega).pairs
    print(f"alpha={alpha}: caps {caps.caps.tolist()}, coalitions {pairs}")

# %%
# Full scheme: every alpha is tried and the best Nash product kept.
nbs = scga_nbs(scn)
print("\nchosen alpha:", nbs.info["alpha"], "loads:", nbs.loads.tolist())
print("BS utilities:", nbs.utilities)
for row in nbs.info["sweep"]:
    print("  ", row)

# %%
msr = max_sum_rate(scn)
print("\nmax-sum-rate loads:", msr.assoc.loads.tolist())

for name, assoc in (("scga-nbs", nbs.assoc), ("max-sum-rate", msr.assoc)):
    r = report(scn, assoc, name)
    print(f"{name:>13}: sum rate {r.sum_rate / 1e6:7.2f} Mbit/s, jain_bs {r.jain_bs_utility:.3f}, "
          f"jain_user {r.jain_user_rate:.3f}, srr {r.srr_raw:.3f}, qos {r.qos_satisfaction:.3f}")
