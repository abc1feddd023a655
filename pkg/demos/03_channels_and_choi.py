"""Diagonal unital channels: action on states, complete positivity via the Choi matrix."""
import numpy as np

from qhsw.channel import DiagonalUnitalChannel, apply, choi_matrix, covariance_residual
from qhsw.density import bloch_to_density, density_to_bloch, random_density_matrix

np.set_printoptions(precision=4, suppress=True)

ch = DiagonalUnitalChannel.qubit(0.5, 0.5, 0.9)
w = np.array([0.6, 0.0, 0.8])
print("input Bloch", w, "-> output Bloch", density_to_bloch(apply(ch, bloch_to_density(w))))

# complete positivity holds iff the Choi matrix is positive semidefinite
for lam in [(0.5, 0.5, 0.9), (1, 1, 1), (0, 0, 0), (1, 1, -1), (0.7, -0.3, 0.1)]:
    c = DiagonalUnitalChannel.qubit(*lam, check_cp=False)
    eigs = np.linalg.eigvalsh(choi_matrix(c))
    print(f"lambda = {lam!s:18} Choi eigenvalues {eigs}  CP: {c.cp.ok}")

# a random mixture of Weyl conjugations on a qutrit commutes with every Weyl conjugation
rng = np.random.default_rng(1)
mix = DiagonalUnitalChannel.from_weyl_mixture(rng.dirichlet(np.ones(9)).reshape(3, 3))
print("\nqutrit Weyl mixture multipliers:\n", mix.lam)
print("covariance residual:", covariance_residual(mix, random_density_matrix(3, seed=0)))
