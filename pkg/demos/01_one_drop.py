"""One network drop, end to end.

Draws a cell with 4 cellular users and 8 D2D pairs, prints the strongest and
weakest links, then compares what each allocator does with the same drop.
"""

import numpy as np

from d2dsim import ScenarioConfig, make_instance, sum_rate
from d2dsim.netmodel import link_rates
from d2dsim.harness import run_allocator

cfg = ScenarioConfig(num_cellular=4, num_d2d=8)
inst = make_instance(cfg, seed=7)
g = inst.gains

# Path loss in dB for the links that matter
print("BS -> UE loss (dB):    ", np.round(10 * np.log10(g.bs_ue), 1))
print("D2D direct loss (dB):  ", np.round(10 * np.log10(g.direct), 1))
print("BS -> D2D rx loss (dB):", np.round(10 * np.log10(g.bs_rx), 1))

for name in ("random", "rica", "new-auction", "exhaustive"):
    if name == "exhaustive" and cfg.num_cellular ** cfg.num_d2d > 10**6:
        continue
    alloc, revenue, _ = run_allocator(name, inst, seed=7)
    cell, d2d = link_rates(alloc, inst.gains, inst.powers)
    print(f"\n{name}: resources {alloc.resources}")
    print(f"  cellular rates {np.round(cell, 2)}")
    print(f"  d2d rates      {np.round(d2d, 2)}")
    print(f"  sum rate {sum_rate(alloc, inst.gains, inst.powers):.3f} bit/s/Hz, revenue {revenue:.2f}")
