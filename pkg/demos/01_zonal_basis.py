"""Zonal harmonics on the radial coordinate.

Builds the orthonormal basis, shows that multiplication by 1 - 2x^2 is
tridiagonal with zero diagonal, and compares transfer-kernel eigenvalues
with their large-p expansion 1 - (j+1)(j+2)/p.

Run:  python demos/01_zonal_basis.py
"""
import numpy as np

from bandcorr import harmonics

np.set_printoptions(precision=6, suppress=True, linewidth=100)

# The radial measure 12 x^3 (1 - x^2) dx is a probability measure.
rule = harmonics.quadrature_rule(10)
print("total mass      :", rule.integrate(np.ones_like))
print("second moment   :", rule.integrate(lambda x: x**2), "(exact 1/2)")

# phi_0 = 1, phi_1 = sqrt(5)(1 - 2x^2), and the Gram matrix is the identity.
basis = harmonics.build_basis(6)
print("\nphi_j(0)        :", basis.at_identity())
print("max |Gram - I|  :", np.abs(basis.gram() - np.eye(6)).max())

# Multiplication by nu = 1 - 2x^2 in this basis.
full = harmonics.radial_matrix(lambda x: 1 - 2 * x**2, 6)
print("\nnu matrix (quadrature):\n", full)
print("closed-form off-diagonal:", harmonics.nu_offdiagonal_closed_form(6))

# Transfer eigenvalues against the expansion, for growing p = W t.
print("\n   p    j   lambda_j      1-(j+1)(j+2)/p")
for p in (10.0, 100.0, 1000.0):
    for j in range(4):
        lam = harmonics.transfer_eigenvalue(j, p)
        print(f"{p:6g} {j:3d}  {lam:.8f}   {1 - (j + 1) * (j + 2) / p:.8f}")

# The Haar average of exp(-p S) in closed form and by quadrature.
big = harmonics.quadrature_rule(120)
for p in (0.1, 1.0, 10.0, 100.0):
    print(f"IZ p={p:<5g} closed {harmonics.iz_integral(p):.15f}  "
          f"quadrature {big.integrate(lambda x: np.exp(-p * x**2)):.15f}")
