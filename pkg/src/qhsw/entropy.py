"""Von Neumann entropy, Holevo quantity and quantum relative entropy, all in bits."""
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .density import PSD_TOL, DensityMatrix, as_matrix, hermitian_eigvalsh
from .errors import DomainError

ZERO_EIG = 1e-14
SUPPORT_EIG = 1e-12
SUPPORT_WEIGHT = 1e-9
UNITARY_TOL = 1e-10


def _clamped_spectrum(eigs: np.ndarray) -> np.ndarray:
    if eigs.size and eigs[0] < -PSD_TOL:
        raise DomainError(f"matrix has eigenvalue {eigs[0]:.3g}; not a density matrix")
    return np.where(eigs < ZERO_EIG, 0.0, eigs)


def entropy_of_spectrum(eigs) -> float:
    """-sum mu log2 mu with 0 log 0 = 0."""
    eigs = _clamped_spectrum(np.sort(np.asarray(eigs, dtype=float)))
    nz = eigs[eigs > 0]
    return float(-np.sum(nz * np.log2(nz))) + 0.0  # no -0.0


def binary_entropy(p: float) -> float:
    return entropy_of_spectrum([p, 1 - p])


def von_neumann_entropy(rho) -> float:
    m = as_matrix(rho)
    if abs(np.trace(m) - 1) > 1e-8:
        raise DomainError(f"entropy needs a unit-trace state, trace is {np.trace(m):.6g}")
    return entropy_of_spectrum(hermitian_eigvalsh(m))


@dataclass(frozen=True)
class Ensemble:
    probs: np.ndarray
    states: Sequence[DensityMatrix] = field(repr=False)

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        states = tuple(s if isinstance(s, DensityMatrix) else DensityMatrix(s) for s in self.states)
        if probs.ndim != 1 or len(probs) != len(states) or len(states) == 0:
            raise DomainError("an ensemble needs one probability per state and at least one state")
        if (probs < 0).any() or abs(probs.sum() - 1) > 1e-10:
            raise DomainError(f"probabilities must be non-negative and sum to 1, got sum {probs.sum()!r}")
        if len({s.d for s in states}) != 1:
            raise DomainError("ensemble states have different dimensions")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", states)

    @property
    def d(self) -> int:
        return self.states[0].d

    def average(self) -> np.ndarray:
        return np.einsum("i,ijk->jk", self.probs, np.array([s.matrix for s in self.states]))


def holevo_quantity(ens: Ensemble) -> float:
    """chi = S(sum p_i rho_i) - sum p_i S(rho_i)."""
    avg = von_neumann_entropy(ens.average())
    return avg - float(sum(p * von_neumann_entropy(s) for p, s in zip(ens.probs, ens.states)))


def relative_entropy(rho, phi) -> float:
    """D(rho || phi) = Tr rho log2 rho - Tr rho log2 phi, or ``math.inf`` off support.

    Each term is evaluated in its own argument's eigenbasis, so no matrix
    logarithm of a singular matrix is ever formed.
    """
    r = as_matrix(rho)
    p = as_matrix(phi)
    if r.shape != p.shape:
        raise DomainError(f"shape mismatch: {r.shape} != {p.shape}")
    mu, v = np.linalg.eigh((p + p.conj().T) / 2)
    mu = _clamped_spectrum(mu)
    # weight of rho on each eigenvector of phi
    w = np.real(np.einsum("ki,kl,li->i", v.conj(), r, v))
    null = mu < SUPPORT_EIG
    if w[null].sum() > SUPPORT_WEIGHT:
        return math.inf
    cross = float(np.sum(w[~null] * np.log2(mu[~null])))
    return -von_neumann_entropy(r) - cross


def chi_unitary_invariance_check(ens: Ensemble, u) -> float:
    """|chi({p_i, U rho_i U^dag}) - chi({p_i, rho_i})|."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (ens.d, ens.d):
        raise DomainError(f"unitary of shape {u.shape} for d={ens.d} ensemble")
    if np.abs(u.conj().T @ u - np.eye(ens.d)).max() > UNITARY_TOL:
        raise DomainError("matrix is not unitary")
    rotated = Ensemble(ens.probs, [u @ s.matrix @ u.conj().T for s in ens.states])
    return abs(holevo_quantity(rotated) - holevo_quantity(ens))
