"""Mean sum rate against the number of D2D pairs.

Every point uses the same seeds, so the curves for different allocators are
paired drop by drop.  With short D2D links in a large cell the pairs barely
hear each other, and the curve keeps climbing almost linearly.
"""

from d2dsim import ScenarioConfig, paired_differences, sweep_d2d_count
from d2dsim.harness import run_grid

cfg = ScenarioConfig(num_cellular=4)
d_values = [0, 2, 4, 8, 12, 16, 20]

res = sweep_d2d_count(cfg, "new-auction", d_values, trials_per_point=40, base_seed=0)
print(" D   mean sum rate   std err")
for p in res.curve("new-auction"):
    print(f"{p.x:2d}   {p.mean_sum_rate:12.3f}   {p.std_err:7.3f}")

# Paired comparison at D=8
grid = run_grid(cfg, ["random", "rica", "new-auction"], [4], [8], trials=60, base_seed=0)
for a, b in (("new-auction", "random"), ("rica", "random"), ("new-auction", "rica")):
    (p,) = paired_differences(grid.trials, a, b)
    print(f"{a} - {b}: {p.mean_diff:+.3f} +- {p.std_err:.3f} over {p.n_trials} drops")
