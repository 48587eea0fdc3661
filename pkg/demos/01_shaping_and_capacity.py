"""Maxwell-Boltzmann shaping on a fixed QAM grid and what it buys on AWGN.

Run: python3 demos/01_shaping_and_capacity.py
"""

# %%
import numpy as np

from pslab import build_constellation, build_square_qam, mi_awgn, moments, prior_entropy, solve_lambda_optimum

# The geometry never changes; only the priors do. lambda = 0 is uniform.
for lam in (0.0, 0.02, 0.05, 0.1):
    c = build_square_qam(64, lam)
    m = moments(c)
    print(f"lambda={lam:<5} P_s={m.p_s:6.2f}  H={prior_entropy(c):.3f} bit  "
          f"P(1+1j)/P(7+7j)={c.priors[np.argmin(abs(c.points))] / c.priors.min():8.1f}")

# %%
# AWGN mutual information against lambda at 12 dB: a single interior peak.
snr = 10 ** (12 / 10)
base = build_square_qam(64)
lams = np.linspace(0, 0.12, 13)
for lam, mi in zip(lams, [mi_awgn(base.with_lambda(x), snr) for x in lams]):
    print(f"lambda={lam:.2f}  MI={mi:.4f}")

# %%
# The optimum shrinks toward uniform as SNR grows; by ~22 dB shaping gains
# little for 64-QAM.
print("\n SNR   lambda_opt   MI uniform   MI shaped")
for snr_db in range(10, 26, 2):
    snr = 10 ** (snr_db / 10)
    lam = solve_lambda_optimum(base, snr)
    print(f"{snr_db:4d}   {lam:9.4f}   {mi_awgn(base, snr):10.4f}   {mi_awgn(base.with_lambda(lam), snr):9.4f}")

# %%
# Cross 32-QAM is the 32 lowest-energy points of the 64-QAM grid.
c32 = build_constellation("cross32", 32)
print("\ncross 32-QAM max energy:", int(max(abs(c32.points) ** 2).round()), " P_s:", c32.signal_power)
