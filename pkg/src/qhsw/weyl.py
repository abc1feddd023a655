"""Generalized Pauli (Weyl-Heisenberg) operators for a d-level system.

The shift and clock matrices act on the computational basis as

    X|j> = |j+1 mod d>,    Z|j> = w^j |j>,    w = exp(2 pi i / d),

and satisfy Z X = w X Z.  The d^2 products E[a, b] = X^a Z^b form a
Hilbert-Schmidt orthogonal operator basis with <E[a,b], E[q,r]> = d delta delta.
Multiplying by the scalars w^c gives a group of order d^3 whose defining
representation is irreducible.

Phases are always carried as integer exponents reduced mod d and only turned
into complex numbers at the last step.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import DomainError, ResourceError

# largest d for which generate_group_q materializes all d^3 matrices
GROUP_DIM_CAP = 8


def _check_dim(d, minimum=2):
    if int(d) != d or d < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {d!r}")
    return int(d)


def root_of_unity(d: int, k: int = 1) -> complex:
    """Return exp(2 pi i k / d) with ``k`` reduced mod d first."""
    d = _check_dim(d, minimum=1)
    k = int(k) % d
    return complex(np.exp(2j * np.pi * k / d))


def shift_matrix(d: int) -> np.ndarray:
    d = _check_dim(d)
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_matrix(d: int) -> np.ndarray:
    d = _check_dim(d)
    return np.diag([root_of_unity(d, j) for j in range(d)])


@dataclass(frozen=True)
class WeylIndex:
    """Label (a, b) of the operator X^a Z^b in dimension d."""

    a: int
    b: int
    d: int

    def __post_init__(self):
        _check_dim(self.d)
        if not (0 <= self.a < self.d and 0 <= self.b < self.d):
            raise DomainError(f"Weyl index ({self.a}, {self.b}) out of range for d={self.d}")

    @property
    def is_identity(self) -> bool:
        return self.a == 0 and self.b == 0

    def negate(self) -> "WeylIndex":
        """Index (d-a, d-b) mod d, the partner in the Hermiticity constraint."""
        return WeylIndex((-self.a) % self.d, (-self.b) % self.d, self.d)


def weyl_indices(d: int, include_identity: bool = True) -> List[WeylIndex]:
    d = _check_dim(d)
    out = [WeylIndex(a, b, d) for a, b in product(range(d), repeat=2)]
    if not include_identity:
        out = out[1:]
    return out


@lru_cache(maxsize=None)
def _weyl_matrix(a: int, b: int, d: int) -> np.ndarray:
    # X^a Z^b built directly: column j of Z^b is w^{bj} e_j, then X^a moves it to row j+a
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + a) % d, j] = root_of_unity(d, b * j)
    m.flags.writeable = False
    return m


@dataclass(frozen=True)
class WeylOperator:
    index: WeylIndex
    matrix: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class PhasedWeylOperator:
    """w^c X^a Z^b, an element of the order-d^3 group."""

    index: WeylIndex
    c: int
    matrix: np.ndarray = field(repr=False, compare=False)

    @property
    def label(self) -> Tuple[int, int, int]:
        return (self.index.a, self.index.b, self.c)


def weyl_operator(idx: WeylIndex) -> WeylOperator:
    return WeylOperator(idx, _weyl_matrix(idx.a, idx.b, idx.d))


def weyl_matrix(a: int, b: int, d: int) -> np.ndarray:
    """Dense matrix of X^a Z^b; indices are taken mod d."""
    d = _check_dim(d)
    return _weyl_matrix(int(a) % d, int(b) % d, d)


@lru_cache(maxsize=None)
def weyl_basis(d: int) -> np.ndarray:
    """All d^2 operators stacked as an array of shape (d, d, d, d), ``basis[a, b] = X^a Z^b``."""
    d = _check_dim(d)
    basis = np.empty((d, d, d, d), dtype=complex)
    for a, b in product(range(d), repeat=2):
        basis[a, b] = _weyl_matrix(a, b, d)
    basis.flags.writeable = False
    return basis


def conjugate_weyl(g: WeylIndex, target: WeylIndex) -> int:
    """Phase exponent k with E[g] E[target] E[g]^dag = w^k E[target].

    For conjugator (g, h) and target (a, b) the exponent is a*h - b*g mod d.
    """
    if g.d != target.d:
        raise DomainError(f"dimension mismatch: {g.d} != {target.d}")
    return (target.a * g.b - target.b * g.a) % g.d


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product Tr(A^dag B)."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DomainError(f"shape mismatch: {A.shape} != {B.shape}")
    return complex(np.vdot(A, B))


def irreducibility_sum(elements: Sequence[np.ndarray]) -> float:
    """(1/|G|) sum_g |Tr g|^2, which equals 1 exactly when the representation is irreducible."""
    if len(elements) == 0:
        raise DomainError("irreducibility_sum needs at least one group element")
    mats = [getattr(g, "matrix", g) for g in elements]
    total = sum(abs(np.trace(m)) ** 2 for m in mats)
    return float(total / len(mats))


def phased_product_label(f: Tuple[int, int, int], g: Tuple[int, int, int], d: int) -> Tuple[int, int, int]:
    """Label of the product (w^c X^a Z^b)(w^c' X^a' Z^b').

    Moving Z^b past X^a' costs w^{b a'}, so the product is
    w^{c + c' + b a'} X^{a+a'} Z^{b+b'}.
    """
    a, b, c = f
    a2, b2, c2 = g
    return ((a + a2) % d, (b + b2) % d, (c + c2 + b * a2) % d)


def generate_group_q(d: int, max_dim: int = GROUP_DIM_CAP) -> List[PhasedWeylOperator]:
    """The d^3 operators w^c X^a Z^b, enumerated with c fastest."""
    d = _check_dim(d)
    if d > max_dim:
        raise ResourceError(f"group of order {d**3} requested; dimension cap is {max_dim}")
    out = []
    for a, b in product(range(d), repeat=2):
        base = _weyl_matrix(a, b, d)
        for c in range(d):
            m = root_of_unity(d, c) * base
            m.flags.writeable = False
            out.append(PhasedWeylOperator(WeylIndex(a, b, d), c, m))
    return out


def group_closure_residual(elements: Iterable[PhasedWeylOperator]) -> float:
    """Max deviation between each pairwise product and the element its label predicts.

    Returns ``inf`` if a predicted label is missing from the set.
    """
    elements = list(elements)
    if not elements:
        raise DomainError("empty group")
    d = elements[0].index.d
    by_label = {f.label: f.matrix for f in elements}
    worst = 0.0
    for f, g in product(elements, repeat=2):
        lab = phased_product_label(f.label, g.label, d)
        if lab not in by_label:
            return float("inf")
        worst = max(worst, float(np.abs(f.matrix @ g.matrix - by_label[lab]).max()))
    return worst


def unitarity_residual(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())


def conjugation_residual(d: int) -> float:
    """Exhaustive max error of the conjugation phase rule over all index pairs."""
    basis = weyl_basis(d)
    worst = 0.0
    for g in weyl_indices(d):
        eg = basis[g.a, g.b]
        for t in weyl_indices(d):
            k = conjugate_weyl(g, t)
            lhs = eg @ basis[t.a, t.b] @ eg.conj().T
            worst = max(worst, float(np.abs(lhs - root_of_unity(d, k) * basis[t.a, t.b]).max()))
    return worst


def orthogonality_residual(d: int) -> float:
    """max |Tr(E[a,b]^dag E[q,r]) - d delta_{aq} delta_{br}| over all d^4 pairs."""
    flat = weyl_basis(d).reshape(d * d, d * d)
    gram = flat.conj() @ flat.T
    return float(np.abs(gram - d * np.eye(d * d)).max())
