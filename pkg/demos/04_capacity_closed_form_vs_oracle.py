"""The capacity formula log2(d) - min S(E(rho)) against direct Holevo maximization."""
import numpy as np

from qhsw.capacity import (
    equal_distance_check,
    hsw_capacity_diagonal,
    maximal_distance_check,
    optimize_ensemble,
    qubit_unital_capacity_closed_form,
)
from qhsw.channel import DiagonalUnitalChannel

print(f"{'lambda':>20} {'1 - H2':>10} {'formula':>10} {'oracle':>10}")
for lam in [(0.5, 0.5, 0.9), (-0.6, 0.1, -0.4), (0.2, 0.2, 0.2), (0.9, 0.85, 0.8)]:
    ch = DiagonalUnitalChannel.qubit(*lam)
    exact = qubit_unital_capacity_closed_form(lam)
    formula = hsw_capacity_diagonal(ch).capacity_bits
    chi = optimize_ensemble(ch).chi_bits
    print(f"{lam!s:>20} {exact:10.6f} {formula:10.6f} {chi:10.6f}")

q = np.zeros((3, 3))
q[0, 0], q[0, 1], q[1, 0] = 0.7, 0.2, 0.1
ch = DiagonalUnitalChannel.from_weyl_mixture(q)
closed = hsw_capacity_diagonal(ch)
res = optimize_ensemble(ch)
print(f"\nqutrit Weyl mixture: formula {closed.capacity_bits:.8f}, oracle {res.chi_bits:.8f}")
print("average output:\n", np.round(res.average_output.matrix, 6))
for rep in (equal_distance_check(res, ch), maximal_distance_check(res, ch)):
    print(f"{rep.name}: passed={rep.passed} residual={rep.residual:.2e}")
