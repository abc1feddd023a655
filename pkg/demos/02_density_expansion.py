"""Expanding qudit states in the Weyl basis, and the qubit Bloch-vector special case."""
import numpy as np

from qhsw.density import (
    bloch_to_density,
    expand,
    hermiticity_constraint_residual,
    random_density_matrix,
    reconstruct,
)

np.set_printoptions(precision=4, suppress=True)

# a qubit with Bloch vector w has alpha[1,0] = wx, alpha[1,1] = i wy, alpha[0,1] = wz
w = np.array([0.3, -0.4, 0.5])
alpha = expand(bloch_to_density(w)).alpha
print("Bloch vector:", w)
print("alpha[1,0], alpha[1,1], alpha[0,1] =", np.round([alpha[1, 0], alpha[1, 1], alpha[0, 1]], 12))

# random qutrit: the d^2 coefficients come in conjugate pairs up to a root-of-unity phase
rho = random_density_matrix(3, seed=7)
alpha = expand(rho).alpha
print("\nqutrit coefficients alpha[a, b]:\n", alpha)
print("pairing residual:", hermiticity_constraint_residual(alpha))
print("round-trip error:", np.abs(reconstruct(alpha) - rho.matrix).max())

# the constraint guarantees a Hermitian, trace-one matrix, not a positive one
big = np.zeros((2, 2), dtype=complex)
big[0, 0], big[0, 1] = 1, 1.5
print("\nalpha with |w| = 1.5 reconstructs to eigenvalues", np.linalg.eigvalsh(reconstruct(big)))
