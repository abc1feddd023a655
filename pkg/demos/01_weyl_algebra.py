"""Shift and clock operators, their commutation phase, and the finite group they generate."""
import numpy as np

from qhsw import weyl

np.set_printoptions(precision=3, suppress=True)

d = 3
x, z = weyl.shift_matrix(d), weyl.clock_matrix(d)
print("shift X for d=3:\n", x.real)
print("clock Z diagonal:", np.round(np.diag(z), 3))

# ZX = w XZ with w = exp(2 pi i/d)
w = weyl.root_of_unity(d)
print("|ZX - w XZ|_max =", np.abs(z @ x - w * x @ z).max())

# conjugating E[a,b] by E[g,h] only multiplies it by a phase w^k
g, target = weyl.WeylIndex(1, 2, d), weyl.WeylIndex(1, 0, d)
k = weyl.conjugate_weyl(g, target)
eg, et = weyl.weyl_operator(g).matrix, weyl.weyl_operator(target).matrix
print(f"E[1,2] E[1,0] E[1,2]^dag = w^{k} E[1,0]:", np.allclose(eg @ et @ eg.conj().T, w**k * et))

# d^2 Weyl operators are orthogonal under Tr(A^dag B)
gram = np.array([[weyl.hs_inner(a, b) for b in weyl.weyl_basis(d).reshape(-1, d, d)]
                 for a in weyl.weyl_basis(d).reshape(-1, d, d)])
print("Gram matrix equals d * I:", np.allclose(gram, d * np.eye(d * d)))

# phases w^c E[a,b] close into a group of order d^3 whose character sum is 1
for d in (2, 3, 4, 5):
    group = weyl.generate_group_q(d)
    print(f"d={d}: |Q| = {len(group):3d}, (1/|Q|) sum |Tr g|^2 = {weyl.irreducibility_sum(group):.12f}")
