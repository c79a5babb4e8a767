"""Monte Carlo check of the ratio F2(E + d, E - d) / F2(E, E).

A single block (n = 1) is a GOE-like matrix, whose local limit is DS(pi xi).
The same matrix samples feed every xi, which keeps the ratio's error bars
usable at a few thousand samples.

Run:  python demos/03_monte_carlo.py          (about ten seconds)
"""
import math

from bandcorr import harmonics
from bandcorr.mc_oracle import EnsembleParams, estimate_ratio

params = EnsembleParams(n=1, W=32, beta=0.2, E=0.0)
grid = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5]
estimates = estimate_ratio(params, grid, M=20_000, seed=7)

print("  xi     ratio     std_err    DS(pi xi)   z")
for e in estimates:
    ds = harmonics.ds_function(math.pi * e.xi)
    z = (e.ratio - ds) / e.std_error if e.std_error else 0.0
    print(f"{e.xi:5.2f}  {e.ratio:8.4f}  {e.std_error:8.4f}   {ds:8.4f}  {z:+5.2f}")

# A few blocks with a nearest-neighbour variance profile, same estimator.
params = EnsembleParams(n=4, W=16, beta=0.2, E=0.0)
for e in estimate_ratio(params, [0.5, 1.0], M=5_000, seed=7):
    print(f"n=4 W=16 xi={e.xi}: {e.ratio:.4f} +/- {e.std_error:.4f}")
