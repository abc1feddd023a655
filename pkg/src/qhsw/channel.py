"""Channels that act diagonally on a Weyl-type operator basis, plus the qubit affine family.

A diagonal unital channel on a d-level system is fixed by d^2 multipliers,

    E(E[a,b]) = lam[a,b] E[a,b],   lam[0,0] = 1,

so on a state with coefficients alpha it returns the state with coefficients
lam * alpha.  Tensor products of such channels are again diagonal, in the
basis of Kronecker products of the factor operators, with multipliers equal to
products of factor multipliers.  The two flat indices of the product basis are
mixed-radix encodings of the factor indices with the first factor varying
fastest.

Every channel here is linear on all of M_d, so the Choi matrix
sum_ij |i><j| (x) E(|i><j|) is available for the complete-positivity test.
"""
import math
import os
from collections import namedtuple
from functools import reduce
from itertools import product
from typing import Optional, Sequence, Tuple

import numpy as np

from .density import (
    PAULIS,
    DensityMatrix,
    as_matrix,
    bloch_matrix,
    density_to_bloch,
    hermitian_eigvalsh,
)
from .errors import DomainError, NotCompletelyPositiveError, ResourceError
from .weyl import _check_dim, root_of_unity, weyl_basis

CP_TOL = 1e-9
PAIRING_TOL = 1e-10
DEFAULT_MAX_DIM = 16
CONJUGATION_CHECK_CAP = 9

CPCheck = namedtuple("CPCheck", ["ok", "min_eigenvalue"])


def max_product_dim() -> int:
    """Dimension cap for product channels; QHSW_MAX_DIM overrides the default of 16."""
    raw = os.environ.get("QHSW_MAX_DIM")
    return int(raw) if raw else DEFAULT_MAX_DIM


# --------------------------------------------------------------------------------------
# mixed-radix index bijection
# --------------------------------------------------------------------------------------


def encode_index(dims: Sequence[int], components: Sequence[int]) -> int:
    """a = a_1 + a_2 d_1 + a_3 d_1 d_2 + ...  (first factor fastest)."""
    if len(dims) != len(components):
        raise DomainError(f"{len(components)} components given for {len(dims)} factors")
    a, stride = 0, 1
    for dk, ak in zip(dims, components):
        if not 0 <= ak < dk:
            raise DomainError(f"component {ak} out of range for factor dimension {dk}")
        a += ak * stride
        stride *= dk
    return a


def decode_index(dims: Sequence[int], a: int) -> Tuple[int, ...]:
    total = math.prod(dims)
    if not 0 <= a < total:
        raise DomainError(f"index {a} out of range for product dimension {total}")
    out = []
    for dk in dims:
        a, r = divmod(a, dk)
        out.append(r)
    return tuple(out)


def tensor_weyl_basis(dims: Sequence[int]) -> np.ndarray:
    """basis[a, b] = E[a_1,b_1] (x) E[a_2,b_2] (x) ... under the mixed-radix bijection."""
    dims = tuple(int(_check_dim(dk)) for dk in dims)
    d = math.prod(dims)
    basis = np.empty((d, d, d, d), dtype=complex)
    for a in range(d):
        ak = decode_index(dims, a)
        for b in range(d):
            bk = decode_index(dims, b)
            mats = [weyl_basis(dk)[x, y] for dk, x, y in zip(dims, ak, bk)]
            basis[a, b] = reduce(np.kron, mats)
    basis.flags.writeable = False
    return basis


# --------------------------------------------------------------------------------------
# channels
# --------------------------------------------------------------------------------------


class QuantumChannel:
    """Linear trace-preserving map on d x d matrices.

    Subclasses implement :meth:`apply_matrix`; the superoperator, adjoint and
    Choi matrix are derived from it.
    """

    d: int

    def apply_matrix(self, m: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def superoperator(self) -> np.ndarray:
        """S with S @ M.ravel() == apply_matrix(M).ravel() (row-major vectorization)."""
        cached = getattr(self, "_superop", None)
        if cached is None:
            d = self.d
            cols = []
            for i, j in product(range(d), repeat=2):
                unit = np.zeros((d, d), dtype=complex)
                unit[i, j] = 1
                cols.append(self.apply_matrix(unit).ravel())
            cached = np.array(cols).T
            cached.flags.writeable = False
            self._superop = cached
        return cached

    def adjoint_matrix(self, m: np.ndarray) -> np.ndarray:
        """Heisenberg-picture map E* with Tr(E*(A)^dag B) = Tr(A^dag E(B))."""
        m = np.asarray(m, dtype=complex)
        return (self.superoperator().conj().T @ m.ravel()).reshape(self.d, self.d)

    def apply_many(self, mats: np.ndarray) -> np.ndarray:
        """Apply to a stack of matrices with shape (n, d, d)."""
        mats = np.asarray(mats, dtype=complex)
        n = mats.shape[0]
        return (mats.reshape(n, -1) @ self.superoperator().T).reshape(n, self.d, self.d)

    def __call__(self, rho) -> DensityMatrix:
        return apply(self, rho)


class WeylDiagonalChannel(QuantumChannel):
    """Shared machinery for channels diagonal in an orthogonal basis with <B_k, B_k> = d."""

    def __init__(self, lam: np.ndarray, basis: np.ndarray, check_cp: bool = True):
        lam = np.array(lam, dtype=complex)
        d = lam.shape[0]
        if lam.shape != (d, d) or basis.shape != (d, d, d, d):
            raise DomainError("multiplier array and basis disagree on dimension")
        if abs(lam[0, 0] - 1) > PAIRING_TOL:
            raise DomainError(f"lam[0,0] must be 1 (unital, trace preserving), got {lam[0, 0]}")
        lam.flags.writeable = False
        self.d = d
        self.lam = lam
        self.basis = basis
        self._superop = None
        self._check_pairing()
        self.cp = is_completely_positive(self)
        if check_cp and not self.cp.ok:
            raise NotCompletelyPositiveError(
                f"Choi matrix has eigenvalue {self.cp.min_eigenvalue:.6g} < -{CP_TOL:g}"
            )

    def _partner(self, a: int, b: int) -> Tuple[int, int]:
        """Index whose basis element is proportional to B[a,b]^dag."""
        return ((-a) % self.d, (-b) % self.d)

    def _check_pairing(self):
        for a, b in product(range(self.d), repeat=2):
            pa, pb = self._partner(a, b)
            if abs(self.lam[pa, pb] - np.conj(self.lam[a, b])) > PAIRING_TOL:
                raise DomainError(
                    f"multipliers break Hermiticity: lam[{pa},{pb}]={self.lam[pa, pb]} "
                    f"but conj(lam[{a},{b}])={np.conj(self.lam[a, b])}"
                )

    def coefficients(self, m: np.ndarray) -> np.ndarray:
        return np.einsum("abij,ij->ab", self.basis.conj(), np.asarray(m, dtype=complex))

    def apply_matrix(self, m: np.ndarray) -> np.ndarray:
        alpha = self.coefficients(m)
        return np.einsum("ab,abij->ij", self.lam * alpha, self.basis) / self.d

    def superoperator(self) -> np.ndarray:
        if self._superop is None:
            d = self.d
            flat = self.basis.reshape(d * d, d * d)
            s = (flat.T * (self.lam.ravel() / d)) @ flat.conj()
            s.flags.writeable = False
            self._superop = s
        return self._superop

    def multipliers(self) -> dict:
        """{(a, b): lam[a, b]} over all non-identity indices."""
        return {(a, b): complex(self.lam[a, b]) for a, b in product(range(self.d), repeat=2) if (a, b) != (0, 0)}


class DiagonalUnitalChannel(WeylDiagonalChannel):
    """Channel scaling each Weyl coefficient alpha[a,b] by lam[a,b].

    ``lam`` is a d x d array; lam[0,0] must be 1 and lam[-a,-b] = conj(lam[a,b])
    so that outputs stay Hermitian.  Complete positivity is checked through
    the Choi matrix unless ``check_cp=False``.
    """

    def __init__(self, lam, check_cp: bool = True):
        lam = np.asarray(lam, dtype=complex)
        if lam.ndim != 2 or lam.shape[0] != lam.shape[1]:
            raise DomainError(f"multipliers must form a d x d array, got shape {lam.shape}")
        d = _check_dim(lam.shape[0])
        super().__init__(lam, weyl_basis(d), check_cp=check_cp)

    @classmethod
    def from_dict(cls, d: int, entries: dict, check_cp: bool = True) -> "DiagonalUnitalChannel":
        """From {(a, b): multiplier}; omitted entries are 0 and lam[0,0] is 1."""
        lam = np.zeros((d, d), dtype=complex)
        for (a, b), v in entries.items():
            if not (0 <= a < d and 0 <= b < d):
                raise DomainError(f"multiplier index ({a}, {b}) out of range for d={d}")
            lam[a, b] = v
        lam[0, 0] = 1
        return cls(lam, check_cp=check_cp)

    @classmethod
    def qubit(cls, lx: float, ly: float, lz: float, check_cp: bool = True) -> "DiagonalUnitalChannel":
        """Qubit channel scaling the Bloch vector componentwise.

        X = sigma_x, XZ = -i sigma_y and Z = sigma_z, so (1,0), (1,1), (0,1)
        carry lambda_x, lambda_y, lambda_z.
        """
        return cls.from_dict(2, {(1, 0): lx, (1, 1): ly, (0, 1): lz}, check_cp=check_cp)

    @classmethod
    def identity(cls, d: int) -> "DiagonalUnitalChannel":
        return cls(np.ones((d, d)))

    @classmethod
    def point(cls, d: int) -> "DiagonalUnitalChannel":
        lam = np.zeros((d, d))
        lam[0, 0] = 1
        return cls(lam)

    @classmethod
    def depolarizing(cls, d: int, p: float, check_cp: bool = True) -> "DiagonalUnitalChannel":
        """rho -> (1-p) rho + p I/d."""
        lam = np.full((d, d), 1 - p)
        lam[0, 0] = 1
        return cls(lam, check_cp=check_cp)

    @classmethod
    def from_weyl_mixture(cls, probs) -> "DiagonalUnitalChannel":
        """rho -> sum_{g,h} probs[g,h] E[g,h] rho E[g,h]^dag.

        Conjugation multiplies E[a,b] by w^{a h - b g}, so
        lam[a,b] = sum_{g,h} probs[g,h] w^{a h - b g}.  Always CP.
        """
        probs = np.asarray(probs, dtype=float)
        d = probs.shape[0]
        if probs.shape != (d, d) or (probs < 0).any() or abs(probs.sum() - 1) > 1e-12:
            raise DomainError("Weyl mixture weights must be a d x d probability array")
        lam = np.zeros((d, d), dtype=complex)
        for a, b, g, h in product(range(d), repeat=4):
            lam[a, b] += probs[g, h] * root_of_unity(d, a * h - b * g)
        return cls(lam)

    def bloch_multipliers(self) -> np.ndarray:
        if self.d != 2:
            raise DomainError("Bloch multipliers exist for qubit channels only")
        return np.real(np.array([self.lam[1, 0], self.lam[1, 1], self.lam[0, 1]]))

    def __repr__(self):
        return f"DiagonalUnitalChannel(d={self.d})"


class ProductChannel(WeylDiagonalChannel):
    """Tensor product of diagonal unital channels, diagonal in the Kronecker-product basis."""

    def __init__(self, factors: Sequence[DiagonalUnitalChannel], check_cp: bool = True):
        factors = list(factors)
        if len(factors) < 2:
            raise DomainError("a product channel needs at least two factors")
        for f in factors:
            if not isinstance(f, DiagonalUnitalChannel):
                raise DomainError(f"product factors must be DiagonalUnitalChannel, got {type(f).__name__}")
        dims = tuple(f.d for f in factors)
        d = math.prod(dims)
        cap = max_product_dim()
        if d > cap:
            raise ResourceError(f"product dimension {d} exceeds cap {cap} (set QHSW_MAX_DIM to raise it)")
        lam = np.empty((d, d), dtype=complex)
        for a in range(d):
            ak = decode_index(dims, a)
            for b in range(d):
                bk = decode_index(dims, b)
                lam[a, b] = math.prod(f.lam[x, y] for f, x, y in zip(factors, ak, bk))
        self.factors = tuple(factors)
        self.dims = dims
        super().__init__(lam, tensor_weyl_basis(dims), check_cp=check_cp)

    def _partner(self, a, b):
        # the adjoint of a Kronecker product is the product of factor adjoints
        ak = decode_index(self.dims, a)
        bk = decode_index(self.dims, b)
        return (
            encode_index(self.dims, [(-x) % dk for x, dk in zip(ak, self.dims)]),
            encode_index(self.dims, [(-y) % dk for y, dk in zip(bk, self.dims)]),
        )

    def __repr__(self):
        return f"ProductChannel(dims={self.dims})"


def tensor(factors: Sequence[DiagonalUnitalChannel]) -> ProductChannel:
    return ProductChannel(factors)


class QubitAffineChannel(QuantumChannel):
    """Qubit map w -> t + (lx wx, ly wy, lz wz) on Bloch vectors."""

    d = 2

    def __init__(self, t, lam, check_cp: bool = True):
        t = np.array(t, dtype=float)
        lam = np.array(lam, dtype=float)
        if t.shape != (3,) or lam.shape != (3,):
            raise DomainError("t and lambda must be real 3-vectors")
        t.flags.writeable = False
        lam.flags.writeable = False
        self.t = t
        self.lam = lam
        self._superop = None
        self.cp = is_completely_positive(self)
        if check_cp and not self.cp.ok:
            raise NotCompletelyPositiveError(
                f"Choi matrix has eigenvalue {self.cp.min_eigenvalue:.6g} < -{CP_TOL:g}"
            )

    def apply_matrix(self, m: np.ndarray) -> np.ndarray:
        # M = (m0 I + m . sigma)/2  ->  (m0 I + (m0 t + lam * m) . sigma)/2
        m = np.asarray(m, dtype=complex)
        m0 = np.trace(m)
        mv = np.array([np.trace(s @ m) for s in PAULIS])
        out = m0 * self.t + self.lam * mv
        return (m0 * np.eye(2) + sum(c * s for c, s in zip(out, PAULIS))) / 2

    def map_bloch(self, w) -> np.ndarray:
        return self.t + self.lam * np.asarray(w, dtype=float)

    def __repr__(self):
        return f"QubitAffineChannel(t={self.t.tolist()}, lam={self.lam.tolist()})"


# --------------------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------------------


def apply(ch: QuantumChannel, rho) -> DensityMatrix:
    m = as_matrix(rho)
    if m.shape != (ch.d, ch.d):
        raise DomainError(f"state of dimension {m.shape[0]} given to a d={ch.d} channel")
    out = ch.apply_matrix(m)
    return DensityMatrix((out + out.conj().T) / 2)


def apply_affine(ch: QubitAffineChannel, rho) -> DensityMatrix:
    m = as_matrix(rho)
    if m.shape != (2, 2):
        raise DomainError(f"affine qubit channels act on d=2 states, got d={m.shape[0]}")
    return DensityMatrix(bloch_matrix(ch.map_bloch(density_to_bloch(m))))


def choi_matrix(ch: QuantumChannel) -> np.ndarray:
    """sum_ij |i><j| (x) E(|i><j|), a d^2 x d^2 matrix."""
    d = ch.d
    s = ch.superoperator().reshape(d, d, d, d)  # s[k, l, i, j] = E(|i><j|)[k, l]
    return s.transpose(2, 0, 3, 1).reshape(d * d, d * d)


def is_completely_positive(ch: QuantumChannel, tol: float = CP_TOL) -> CPCheck:
    lmin = float(hermitian_eigvalsh(choi_matrix(ch))[0])
    return CPCheck(lmin > -tol, lmin)


def is_unital(ch: QuantumChannel, tol: float = 1e-10) -> bool:
    eye = np.eye(ch.d)
    return bool(np.abs(ch.apply_matrix(eye) - eye).max() < tol)


def is_weyl_diagonal(ch: QuantumChannel) -> bool:
    return isinstance(ch, WeylDiagonalChannel)


def covariance_residual(ch: WeylDiagonalChannel, rho) -> float:
    """max over basis elements U of |U E(rho) U^dag - E(U rho U^dag)|.

    Scalar phases drop out of conjugation, so this covers the whole
    phased group generated by the basis.
    """
    m = as_matrix(rho)
    out = ch.apply_matrix(m)
    worst = 0.0
    for a, b in product(range(ch.d), repeat=2):
        u = ch.basis[a, b]
        lhs = u @ out @ u.conj().T
        rhs = ch.apply_matrix(u @ m @ u.conj().T)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


# --------------------------------------------------------------------------------------
# tensor-basis identity checks
# --------------------------------------------------------------------------------------


def tensor_weyl_orthonormality_check(dims: Sequence[int]) -> float:
    """max |Tr(B[a,b]^dag B[g,h]) - d delta delta| over the Kronecker-product basis."""
    d = math.prod(dims)
    if d > DEFAULT_MAX_DIM:
        raise ResourceError(f"product dimension {d} exceeds {DEFAULT_MAX_DIM}")
    flat = tensor_weyl_basis(dims).reshape(d * d, d * d)
    gram = flat.conj() @ flat.T
    return float(np.abs(gram - d * np.eye(d * d)).max())


def tensor_conjugation_phase(dims: Sequence[int], g: Tuple[int, int], ab: Tuple[int, int]) -> int:
    """Exponent c (in units of exp(2 pi i/d)) for conjugating B[a,b] by B[g,h].

    c = sum_k (a_k h_k - b_k g_k) d/d_k  mod d.
    """
    d = math.prod(dims)
    gk, hk = decode_index(dims, g[0]), decode_index(dims, g[1])
    ak, bk = decode_index(dims, ab[0]), decode_index(dims, ab[1])
    c = sum((x * h - y * gg) * (d // dk) for x, y, gg, h, dk in zip(ak, bk, gk, hk, dims))
    return c % d


def tensor_conjugation_check(dims: Sequence[int], n_samples: Optional[int] = None, seed=0) -> float:
    """Max residual of B[g,h] B[a,b] B[g,h]^dag = w^c B[a,b].

    Exhaustive over all index pairs unless ``n_samples`` asks for a random subset.
    """
    dims = tuple(dims)
    d = math.prod(dims)
    if d > CONJUGATION_CHECK_CAP:
        raise ResourceError(f"product dimension {d} exceeds {CONJUGATION_CHECK_CAP}")
    basis = tensor_weyl_basis(dims)
    idx = list(product(range(d), repeat=2))
    if n_samples is None:
        pairs = product(idx, idx)
    else:
        rng = np.random.default_rng(seed)
        pick = rng.integers(0, len(idx), size=(n_samples, 2))
        pairs = [(idx[i], idx[j]) for i, j in pick]
    worst = 0.0
    for g, ab in pairs:
        u = basis[g]
        lhs = u @ basis[ab] @ u.conj().T
        c = tensor_conjugation_phase(dims, g, ab)
        worst = max(worst, float(np.abs(lhs - root_of_unity(d, c) * basis[ab]).max()))
    return worst


# --------------------------------------------------------------------------------------
# JSON descriptors
# --------------------------------------------------------------------------------------


def channel_from_descriptor(obj: dict, allow_non_cp: bool = False) -> QuantumChannel:
    """Build a channel from its JSON descriptor; raises DomainError on malformed input."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise DomainError("channel descriptor must be an object with a 'type' field")
    kind = obj["type"]
    check = not allow_non_cp
    try:
        if kind == "diagonal_unital":
            d = int(obj["d"])
            _check_dim(d)
            entries = {}
            for e in obj.get("lambda", []):
                entries[(int(e["a"]), int(e["b"]))] = complex(float(e.get("re", 0.0)), float(e.get("im", 0.0)))
            return DiagonalUnitalChannel.from_dict(d, entries, check_cp=check)
        if kind == "qubit_affine":
            return QubitAffineChannel(obj["t"], obj["lambda"], check_cp=check)
        if kind == "product":
            factors = [channel_from_descriptor(f, allow_non_cp) for f in obj["factors"]]
            return ProductChannel(factors, check_cp=check)
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed {kind} descriptor: {exc!r}") from exc
    raise DomainError(f"unknown channel type {kind!r}")


def channel_to_descriptor(ch: QuantumChannel) -> dict:
    if isinstance(ch, ProductChannel):
        return {"type": "product", "factors": [channel_to_descriptor(f) for f in ch.factors]}
    if isinstance(ch, DiagonalUnitalChannel):
        entries = [
            {"a": a, "b": b, "re": float(v.real), "im": float(v.imag)}
            for (a, b), v in ch.multipliers().items()
            if v != 0
        ]
        return {"type": "diagonal_unital", "d": ch.d, "lambda": entries}
    if isinstance(ch, QubitAffineChannel):
        return {"type": "qubit_affine", "t": ch.t.tolist(), "lambda": ch.lam.tolist()}
    raise DomainError(f"no descriptor format for {type(ch).__name__}")
