"""Blind phase search: window gain and the shaping worst case.

Run: python3 demos/03_bps_window_gain.py
"""

# %%
import numpy as np

from pslab.harness import make_config, run_experiment

# Uniform vs shaped 64-QAM at 12 dB for three window lengths. Decision
# errors of shaped input leave a floor that longer windows cannot remove.
cfg = make_config(scenario="bps-mse", lambdas=[0.0, 0.05], snr_db=[12], window_n=[10, 30, 100],
                  symbol_count=2**17)
for r in run_experiment(cfg).records():
    print(f"lambda={r['lambda']:.2f} N={r['window_n']:3d}  mse={r['mse']:.4e} +- {r['stderr']:.1e}")

# %%
# With N=10 the MSE peaks in lambda close to the capacity-optimal lambda.
lams = [round(x, 3) for x in np.arange(0, 0.101, 0.01)]
scan = run_experiment(make_config(scenario="lambda-max-scan", lambdas=lams, snr_db=[12, 14, 16],
                                  window_n=[10], symbol_count=2**16))
for r in scan.records():
    print(f"{r['snr_db']:.0f} dB  argmax {r['lambda_max_sim']:.3f}  lambda_opt {r['lambda_opt']:.4f}")
