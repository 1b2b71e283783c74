"""Distribution of the first cellular user's SINR across drops.

Collects UE1's SINR after the sum-rate auction over many drops, bins it into
an empirical pdf and reports the skewness of the dB values.
"""

import numpy as np

from d2dsim import ScenarioConfig, run_trial, sinr_pdf, skewness

cfg = ScenarioConfig(num_cellular=4, num_d2d=8)
samples = np.array([run_trial(cfg, "new-auction", seed).ue1_sinr_db for seed in range(500)])

pdf = sinr_pdf(samples, num_bins=20)
print(f"{pdf.n_samples} drops, integral {pdf.integral():.12f}")
peak = pdf.densities.max()
for left, dens in zip(pdf.bin_edges[:-1], pdf.densities):
    print(f"{left:7.1f} dB | {'#' * int(round(40 * dens / peak))}")

print(f"mean {samples.mean():.2f} dB, std {samples.std(ddof=1):.2f} dB, skewness {skewness(samples):+.3f}")
