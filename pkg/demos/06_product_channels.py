"""Tensor products of diagonal unital channels and additivity of the formula."""
import numpy as np

from qhsw.capacity import hsw_capacity_diagonal, optimize_ensemble
from qhsw.channel import DiagonalUnitalChannel, tensor, tensor_conjugation_check, tensor_weyl_orthonormality_check

for dims in [(2, 2), (2, 3)]:
    print(f"dims {dims}: orthonormality residual {tensor_weyl_orthonormality_check(dims):.1e}, "
          f"conjugation residual {tensor_conjugation_check(dims):.1e}")

single = DiagonalUnitalChannel.qubit(0.5, 0.5, 0.9)
pair = tensor([single, single])
c1 = hsw_capacity_diagonal(single).capacity_bits
c2 = hsw_capacity_diagonal(pair)
print(f"\nC(single) = {c1:.6f}, 2 C(single) = {2 * c1:.6f}, C(pair) = {c2.capacity_bits:.6f}")
print("minimizing input on the pair is a product state:",
      np.round(np.linalg.eigvalsh(c2.argmin_state.matrix.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)), 6))
res = optimize_ensemble(pair)
print(f"oracle chi on the pair = {res.chi_bits:.6f}")

mixed = tensor([DiagonalUnitalChannel.identity(2), DiagonalUnitalChannel.point(3)])
print(f"\nidentity(2) x point(3): C = {hsw_capacity_diagonal(mixed).capacity_bits:.6f}")
