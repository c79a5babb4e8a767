"""The three regimes and the family that interpolates between them.

The critical value (exp(-C* Delta - i pi xi nu) 1, 1) runs from DS(pi xi)
at C* = 0 to the constant 1 as C* grows; the finite-(n, W) propagator
approaches it as W grows with n / W fixed.

Run:  python demos/02_crossover.py
"""
import numpy as np

from bandcorr import limits

xi = np.linspace(0, 3, 7)
print("xi        " + "  ".join(f"{x:8.3f}" for x in xi))
print("DS        " + "  ".join(f"{v:8.5f}" for v in limits.delocalized_limit(xi)))
for C in (0.01, 0.1, 0.5, 2.0, 10.0):
    curve = limits.regime_curve("critical", xi, C_star=C, l=30)
    print(f"C*={C:<6g}" + "  ".join(f"{v:8.5f}" for v in curve.values),
          f"  (truncation <= {curve.truncation_error.max():.1e})")
print("localized " + "  ".join(f"{v:8.5f}" for v in limits.localized_limit(xi)))

# Finite n, W with n = 4 W at E = 0, so C* = 4 / t_*(0) = 1.
target = limits.critical_limit(1.0, limits.c_star_from_ratio(4.0, 0.0), l=25)
print(f"\ncritical value at xi=1, C*=1: {target:.10f}")
for W in (10, 100, 1000, 10000):
    v = limits.finite_n_propagator(1.0, 4 * W, W, 0.0, l=25)
    print(f"W={W:<6d} n={4 * W:<6d} propagator {v:.10f}  error {abs(v - target):.2e}")
