"""Universality of a bulk eigenvalue.

The median eigenvalue of a Rademacher Wigner matrix and of a GOE matrix of
the same size should have the same law.  This compares the two samples
with a two-sample KS test and an interval probability on the
sqrt(ln n / n) scale.

    python3 demos/bulk_universality.py
"""
from rmtlab.harness import ExperimentConfig, run_experiment

cfg = ExperimentConfig("universality", n=150, reps=600, dist="rademacher", seed=7,
                       params={"k": 75, "ref": "goe", "b": 0.0, "c": 1.0})
report = run_experiment(cfg)
s = report.summary
print(f"two-sample KS: d = {s['ks_two_sample']['d']:.4f}, p = {s['ks_two_sample']['p_value']:.3f}")
print(f"P(0 <= x <= sqrt(ln n / n)): rademacher {s['p_dist']:.3f} +- {s['se_dist']:.3f}, "
      f"goe {s['p_ref']:.3f} +- {s['se_ref']:.3f}")
print("\n".join(report.summary_lines()))
