"""A non-unital qubit channel: the optimal average output is not maximally mixed.

The map w -> (0, 0, 0.2 + 0.4 wz) squeezes the Bloch ball onto the segment
z in [-0.2, 0.6].  Only the two endpoints are worth sending, so the best
ensemble is a biased coin over |0> and |1>.
"""
import numpy as np

from qhsw.capacity import average_output_uniqueness_check, equal_distance_check, maximal_distance_check, optimize_ensemble
from qhsw.channel import QubitAffineChannel
from qhsw.density import density_to_bloch

ch = QubitAffineChannel([0, 0, 0.2], [0, 0, 0.4])
res = optimize_ensemble(ch)
print(f"chi = {res.chi_bits:.7f}, converged = {res.converged}")
print("average output Bloch vector:", np.round(density_to_bloch(res.average_output), 7))

for p, state in zip(res.ensemble.probs, res.ensemble.states):
    if p > 1e-6:
        print(f"  p = {p:.4f}  input Bloch {np.round(density_to_bloch(state), 4)}")

# the distance conditions still hold, around an average output that is not I/2
for rep in (equal_distance_check(res, ch), maximal_distance_check(res, ch)):
    print(f"{rep.name}: passed={rep.passed} residual={rep.residual:.2e}")
rep = average_output_uniqueness_check(ch, n_runs=3)
print(f"average output equals I/2: {rep.passed} (deviation {rep.residual:.4f}); "
      f"runs agree with each other: {rep.details['pairwise_passed']}")
