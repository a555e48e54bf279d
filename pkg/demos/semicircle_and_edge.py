"""Semicircle in the bulk, Tracy-Widom at the edge.

Samples a handful of Rademacher Wigner matrices, compares the pooled
spectrum with the semicircle law, then rescales the largest eigenvalue of
GUE draws and compares it with the Tracy-Widom F2 distribution.

    python3 demos/semicircle_and_edge.py
"""
import numpy as np

from rmtlab.ensembles import parse_dist, replicate_seed
from rmtlab.laws import semicircle_cdf, tw2_cdf
from rmtlab.spectra import eigenvalues, merge_pairs
from rmtlab.stats import ks_one_sample, rescale_edge

n, reps = 300, 20
rademacher = parse_dist("rademacher")
pooled = np.concatenate([
    eigenvalues(rademacher.sample(n, replicate_seed(1, i))).values for i in range(reps)
])
ks = ks_one_sample(pooled, semicircle_cdf)
print(f"pooled spectrum of {reps} Rademacher matrices, n={n}: KS d vs semicircle = {ks.d:.4f}")

# GUE through its real embedding: every eigenvalue appears twice
gue = parse_dist("gue")
edge = []
for i in range(400):
    spec = merge_pairs(eigenvalues(gue.sample(100, replicate_seed(2, i))))
    edge.append(rescale_edge(spec, 100))
ks = ks_one_sample(edge, tw2_cdf)
print(f"rescaled largest GUE eigenvalue, n=100, 400 draws: mean {np.mean(edge):+.3f} "
      f"(F2 mean is about -1.771), KS d vs F2 = {ks.d:.3f}")
