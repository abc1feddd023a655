"""Qudit density matrices and their expansion in the Weyl operator basis.

Every d x d density matrix can be written

    rho = (1/d) sum_{a,b} alpha[a, b] X^a Z^b,     alpha[a, b] = Tr(E[a,b]^dag rho),

with alpha[0, 0] = 1.  Hermiticity ties the coefficients together in pairs:

    alpha[-a, -b] = conj(alpha[a, b]) * w^{(d-a)(d-b)}    (indices mod d).

For qubits this reproduces the Bloch vector: alpha[1,0] = w_x, alpha[1,1] = i w_y,
alpha[0,1] = w_z.
"""
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DomainError, InvalidStateError
from .weyl import _check_dim, root_of_unity, weyl_basis

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
CONSTRAINT_TOL = 1e-8

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def hermitian_eigvalsh(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of the Hermitian part (M + M^dag)/2, ascending."""
    m = np.asarray(m)
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


@dataclass(frozen=True)
class ValidationReport:
    d: int
    hermiticity_residual: float
    trace_residual: float
    min_eigenvalue: float
    is_hermitian: bool
    has_unit_trace: bool
    is_psd: bool

    @property
    def ok(self) -> bool:
        return self.is_hermitian and self.has_unit_trace and self.is_psd

    def failures(self):
        out = []
        if not self.is_hermitian:
            out.append(f"not Hermitian (residual {self.hermiticity_residual:.3g})")
        if not self.has_unit_trace:
            out.append(f"trace off by {self.trace_residual:.3g}")
        if not self.is_psd:
            out.append(f"min eigenvalue {self.min_eigenvalue:.3g}")
        return out


def validate(matrix) -> ValidationReport:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    herm = float(np.abs(m - m.conj().T).max())
    tr = float(abs(np.trace(m) - 1))
    lmin = float(hermitian_eigvalsh(m)[0])
    return ValidationReport(
        d=m.shape[0],
        hermiticity_residual=herm,
        trace_residual=tr,
        min_eigenvalue=lmin,
        is_hermitian=herm < HERMITIAN_TOL,
        has_unit_trace=tr < TRACE_TOL,
        is_psd=lmin > -PSD_TOL,
    )


@dataclass(frozen=True)
class DensityMatrix:
    """A validated d x d density matrix.  The stored array is read-only."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        report = validate(m)
        if not report.ok:
            raise InvalidStateError("not a density matrix: " + "; ".join(report.failures()))
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def as_matrix(rho) -> np.ndarray:
    """Plain complex array view of a DensityMatrix or array-like."""
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def maximally_mixed(d: int) -> DensityMatrix:
    d = _check_dim(d)
    return DensityMatrix(np.eye(d) / d)


def hermiticity_constraint_residual(alpha: np.ndarray) -> float:
    """max |alpha[-a,-b] - conj(alpha[a,b]) w^{(d-a)(d-b)}| over all (a, b)."""
    d = alpha.shape[0]
    worst = 0.0
    for a in range(d):
        for b in range(d):
            want = np.conj(alpha[a, b]) * root_of_unity(d, (d - a) * (d - b))
            worst = max(worst, abs(alpha[(-a) % d, (-b) % d] - want))
    return float(worst)


@dataclass(frozen=True)
class WeylCoefficients:
    """All d^2 coefficients alpha[a, b]; the redundant half is stored, not exploited."""

    alpha: np.ndarray = field(repr=False)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=complex)
        if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
            raise DomainError(f"coefficients must be a d x d array, got shape {alpha.shape}")
        _check_dim(alpha.shape[0])
        alpha.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)

    @property
    def d(self) -> int:
        return self.alpha.shape[0]

    def __getitem__(self, ab):
        return self.alpha[ab]

    @classmethod
    def from_dict(cls, d: int, entries: dict) -> "WeylCoefficients":
        """Build from {(a, b): value}; alpha[0, 0] is forced to 1 and omitted entries are 0."""
        alpha = np.zeros((d, d), dtype=complex)
        for (a, b), v in entries.items():
            alpha[a % d, b % d] = v
        alpha[0, 0] = 1
        return cls(alpha)


def expand_matrix(m: np.ndarray) -> np.ndarray:
    """alpha[a, b] = Tr(E[a,b]^dag M) for any square matrix M."""
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    return np.einsum("abij,ij->ab", weyl_basis(d).conj(), m)


def reconstruct_matrix(alpha: np.ndarray) -> np.ndarray:
    """(1/d) sum alpha[a,b] E[a,b] without any checks."""
    alpha = np.asarray(alpha, dtype=complex)
    d = alpha.shape[0]
    return np.einsum("ab,abij->ij", alpha, weyl_basis(d)) / d


def expand(rho) -> WeylCoefficients:
    return WeylCoefficients(expand_matrix(as_matrix(rho)))


def reconstruct(coeffs: Union[WeylCoefficients, np.ndarray]) -> np.ndarray:
    """Matrix (1/d)(I + sum_{(a,b) != (0,0)} alpha[a,b] E[a,b]).

    The result is Hermitian with unit trace.  Positivity is not implied by the
    coefficient constraints; wrap the result in :class:`DensityMatrix` (or call
    :func:`validate`) to check it.
    """
    alpha = coeffs.alpha if isinstance(coeffs, WeylCoefficients) else np.asarray(coeffs, dtype=complex)
    if abs(alpha[0, 0] - 1) > CONSTRAINT_TOL:
        raise DomainError(f"alpha[0,0] must be 1 for a unit-trace state, got {alpha[0, 0]}")
    resid = hermiticity_constraint_residual(alpha)
    if resid > CONSTRAINT_TOL:
        raise DomainError(f"coefficients violate the Hermiticity constraint (residual {resid:.3g})")
    m = reconstruct_matrix(alpha)
    return (m + m.conj().T) / 2


def bloch_to_density(w) -> DensityMatrix:
    w = np.asarray(w, dtype=float)
    if w.shape != (3,):
        raise DomainError("Bloch vectors are real 3-vectors (qubits only)")
    if np.linalg.norm(w) > 1 + HERMITIAN_TOL:
        raise DomainError(f"Bloch vector norm {np.linalg.norm(w):.6g} exceeds 1")
    return DensityMatrix(bloch_matrix(w))


def bloch_matrix(w) -> np.ndarray:
    """(I + w . sigma)/2 with no norm check; useful for affine images that may be unphysical."""
    w = np.asarray(w, dtype=float)
    return (np.eye(2) + w[0] * PAULI_X + w[1] * PAULI_Y + w[2] * PAULI_Z) / 2


def density_to_bloch(rho) -> np.ndarray:
    m = as_matrix(rho)
    if m.shape != (2, 2):
        raise DomainError(f"Bloch vectors exist for qubits only, got d={m.shape[0]}")
    return np.array([np.real(np.trace(s @ m)) for s in PAULIS])


def random_pure_vector(d: int, seed=None) -> np.ndarray:
    """Haar-random unit vector in C^d from a normalized complex Gaussian."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_pure_state(d: int, seed=None) -> DensityMatrix:
    d = _check_dim(d)
    v = random_pure_vector(d, seed)
    return DensityMatrix(np.outer(v, v.conj()))


def random_density_matrix(d: int, seed=None, rank: Optional[int] = None) -> DensityMatrix:
    """Mixed state G G^dag / Tr(G G^dag) from a d x rank complex Ginibre matrix."""
    d = _check_dim(d)
    rng = np.random.default_rng(seed)
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def density_to_json(rho) -> dict:
    m = as_matrix(rho)
    return {"d": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def density_from_json(obj: dict) -> DensityMatrix:
    try:
        d = int(obj["d"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed density-matrix record: {exc}") from exc
    if re.shape != (d, d) or im.shape != (d, d):
        raise DomainError(f"density record declares d={d} but holds shapes {re.shape}, {im.shape}")
    return DensityMatrix(re + 1j * im)
