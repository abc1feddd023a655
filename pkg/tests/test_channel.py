import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhsw import channel as ch
from qhsw.density import PAULIS, bloch_to_density, random_density_matrix, random_pure_state
from qhsw.errors import DomainError, NotCompletelyPositiveError, ResourceError
from qhsw.weyl import weyl_matrix


def direct_choi(apply, d):
    c = np.zeros((d * d, d * d), dtype=complex)
    for i, j in itertools.product(range(d), repeat=2):
        eij = np.zeros((d, d))
        eij[i, j] = 1
        c += np.kron(eij, apply(eij))
    return c


def pauli_channel_action(lx, ly, lz, rho):
    # (Tr rho I + sum_k lam_k Tr(sigma_k rho) sigma_k)/2
    out = np.trace(rho) * np.eye(2)
    for lam, s in zip((lx, ly, lz), PAULIS):
        out = out + lam * np.trace(s @ rho) * s
    return out / 2


def fujiwara_algoet(lx, ly, lz):
    return abs(lx + ly) <= 1 + lz + 1e-12 and abs(lx - ly) <= 1 - lz + 1e-12


def test_qubit_channel_scales_bloch_vector():
    c = ch.DiagonalUnitalChannel.qubit(0.5, -0.3, 0.1)
    w = np.array([0.3, 0.4, -0.5])
    out = ch.apply(c, bloch_to_density(w))
    want = np.array([0.15, -0.12, -0.05])
    assert np.abs([np.real(np.trace(s @ out.matrix)) for s in PAULIS] - want).max() < 1e-12


@pytest.mark.parametrize("lam", [(0.5, 0.5, 0.9), (-0.6, 0.1, -0.4), (0.2, 0.2, 0.2), (1, 1, 1), (0, 0, 0)])
def test_qubit_channel_against_pauli_formula(lam):
    c = ch.DiagonalUnitalChannel.qubit(*lam)
    for seed in range(5):
        rho = random_density_matrix(2, seed=seed).matrix
        assert np.abs(c.apply_matrix(rho) - pauli_channel_action(*lam, rho)).max() < 1e-12


def test_identity_and_point_channels():
    for d in (2, 3, 4):
        rho = random_density_matrix(d, seed=d)
        assert np.abs(ch.apply(ch.DiagonalUnitalChannel.identity(d), rho).matrix - rho.matrix).max() < 1e-12
        assert np.abs(ch.apply(ch.DiagonalUnitalChannel.point(d), rho).matrix - np.eye(d) / d).max() < 1e-12


def test_depolarizing():
    c = ch.DiagonalUnitalChannel.depolarizing(3, 0.4)
    rho = random_density_matrix(3, seed=1).matrix
    assert np.abs(c.apply_matrix(rho) - (0.6 * rho + 0.4 * np.eye(3) / 3)).max() < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_weyl_mixture_against_kraus_sum(d):
    rng = np.random.default_rng(d)
    q = rng.dirichlet(np.ones(d * d)).reshape(d, d)
    c = ch.DiagonalUnitalChannel.from_weyl_mixture(q)
    rho = random_density_matrix(d, seed=3).matrix
    direct = sum(q[g, h] * weyl_matrix(g, h, d) @ rho @ weyl_matrix(g, h, d).conj().T
                 for g, h in itertools.product(range(d), repeat=2))
    assert np.abs(c.apply_matrix(rho) - direct).max() < 1e-12
    assert c.cp.ok


def test_superoperator_and_choi_match_direct():
    for c in [ch.DiagonalUnitalChannel.qubit(0.5, 0.5, 0.9),
              ch.DiagonalUnitalChannel.depolarizing(3, 0.2),
              ch.QubitAffineChannel([0, 0, 0.2], [0, 0, 0.4])]:
        d = c.d
        assert np.abs(ch.choi_matrix(c) - direct_choi(c.apply_matrix, d)).max() < 1e-12
        rho = random_density_matrix(d, seed=0).matrix
        via_s = (c.superoperator() @ rho.ravel()).reshape(d, d)
        assert np.abs(via_s - c.apply_matrix(rho)).max() < 1e-12


def test_choi_examples():
    ident = ch.choi_matrix(ch.DiagonalUnitalChannel.identity(2))
    assert np.abs(np.sort(np.linalg.eigvalsh(ident)) - [0, 0, 0, 2]).max() < 1e-12
    assert np.abs(ch.choi_matrix(ch.DiagonalUnitalChannel.point(2)) - np.eye(4) / 2).max() < 1e-12
    bad = ch.DiagonalUnitalChannel.qubit(1, 1, -1, check_cp=False)
    assert abs(ch.is_completely_positive(bad).min_eigenvalue + 1) < 1e-12
    assert not bad.cp.ok


def test_non_cp_rejected():
    with pytest.raises(NotCompletelyPositiveError):
        ch.DiagonalUnitalChannel.qubit(1, 1, -1)
    with pytest.raises(NotCompletelyPositiveError):
        ch.DiagonalUnitalChannel.qubit(0.7, -0.3, 0.1)
    with pytest.raises(NotCompletelyPositiveError):
        ch.QubitAffineChannel([0, 0, 0.9], [0.5, 0.5, 0.5])


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_choi_agrees_with_fujiwara_algoet(lx, ly, lz):
    c = ch.DiagonalUnitalChannel.qubit(lx, ly, lz, check_cp=False)
    lmin = c.cp.min_eigenvalue
    fa = fujiwara_algoet(lx, ly, lz)
    # stay away from the boundary where the two tests differ by rounding
    if abs(lmin) > 1e-9:
        assert (lmin > 0) == fa


def test_pairing_enforced():
    lam = np.ones((3, 3), dtype=complex)
    lam[1, 0] = 0.5
    with pytest.raises(DomainError):
        ch.DiagonalUnitalChannel(lam)
    lam = np.ones((3, 3))
    lam[0, 0] = 0.9
    with pytest.raises(DomainError):
        ch.DiagonalUnitalChannel(lam)
    with pytest.raises(DomainError):
        ch.DiagonalUnitalChannel.from_dict(2, {(2, 0): 0.5})


def test_complex_multipliers_d3():
    # lam[1,0] = 0.3i pairs with lam[2,0] = -0.3i
    c = ch.DiagonalUnitalChannel.from_dict(3, {(1, 0): 0.3j, (2, 0): -0.3j})
    out = ch.apply(c, random_pure_state(3, seed=4))
    assert np.abs(out.matrix - out.matrix.conj().T).max() < 1e-12


@pytest.mark.parametrize("d", [2, 3])
def test_unital_and_trace_preserving(d):
    rng = np.random.default_rng(0)
    c = ch.DiagonalUnitalChannel.from_weyl_mixture(rng.dirichlet(np.ones(d * d)).reshape(d, d))
    assert ch.is_unital(c)
    for seed in range(10):
        out = ch.apply(c, random_density_matrix(d, seed=seed))
        assert abs(np.trace(out.matrix) - 1) < 1e-12
    assert not ch.is_unital(ch.QubitAffineChannel([0, 0, 0.2], [0, 0, 0.4]))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_weyl_covariance(d):
    rng = np.random.default_rng(d)
    c = ch.DiagonalUnitalChannel.from_weyl_mixture(rng.dirichlet(np.ones(d * d)).reshape(d, d))
    for seed in range(5):
        assert ch.covariance_residual(c, random_density_matrix(d, seed=seed)) < 1e-12


def test_affine_channel_examples():
    c = ch.QubitAffineChannel([0, 0, 0.2], [0, 0, 0.4])
    for w, want in [([0, 0, 1], [0, 0, 0.6]), ([0, 0, -1], [0, 0, -0.2]), ([1, 0, 0], [0, 0, 0.2])]:
        out = ch.apply_affine(c, bloch_to_density(w))
        assert np.abs([np.real(np.trace(s @ out.matrix)) for s in PAULIS] - np.array(want)).max() < 1e-12
        assert np.abs(ch.apply(c, bloch_to_density(w)).matrix - out.matrix).max() < 1e-12
    assert np.abs(c.adjoint_matrix(np.eye(2)) - np.eye(2)).max() < 1e-12
    with pytest.raises(DomainError):
        ch.apply_affine(c, np.eye(3) / 3)


def test_adjoint_is_hs_adjoint():
    c = ch.QubitAffineChannel([0.1, 0, 0.2], [0.3, 0.2, 0.4])
    rng = np.random.default_rng(0)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert abs(np.vdot(c.adjoint_matrix(a), b) - np.vdot(a, c.apply_matrix(b))) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=1, max_size=3), st.data())
def test_index_bijection(dims, data):
    total = math.prod(dims)
    a = data.draw(st.integers(0, total - 1))
    comps = ch.decode_index(dims, a)
    assert ch.encode_index(dims, comps) == a
    assert all(0 <= x < dk for x, dk in zip(comps, dims))


def test_index_bijection_examples():
    assert ch.encode_index([2, 3], [1, 2]) == 5
    assert ch.decode_index([2, 3], 5) == (1, 2)
    assert ch.decode_index([3, 2], 1) == (1, 0)
    with pytest.raises(DomainError):
        ch.encode_index([2, 2], [2, 0])
    with pytest.raises(DomainError):
        ch.decode_index([2, 2], 4)


def test_tensor_basis_is_kronecker():
    basis = ch.tensor_weyl_basis([2, 3])
    # index a=5 -> (1, 2), b=3 -> (1, 1)
    want = np.kron(weyl_matrix(1, 1, 2), weyl_matrix(2, 1, 3))
    assert np.abs(basis[5, 3] - want).max() == 0


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (2, 2, 2), (3, 3)])
def test_tensor_orthonormality(dims):
    assert ch.tensor_weyl_orthonormality_check(dims) < 1e-10


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2)])
def test_tensor_conjugation(dims):
    assert ch.tensor_conjugation_check(dims) < 1e-10
    assert ch.tensor_conjugation_check(dims, n_samples=50, seed=1) < 1e-10


def test_tensor_conjugation_phase_reduces_to_single_factor():
    # a single factor written through the tensor machinery
    for g, h, a, b in itertools.product(range(3), repeat=4):
        got = ch.tensor_conjugation_phase([3], (g, h), (a, b))
        assert got == (a * h - b * g) % 3


def test_product_channel_matches_kron():
    c1 = ch.DiagonalUnitalChannel.qubit(0.5, 0.5, 0.9)
    c2 = ch.DiagonalUnitalChannel.depolarizing(3, 0.3)
    prod = ch.tensor([c1, c2])
    assert prod.d == 6 and prod.dims == (2, 3)
    r1, r2 = random_density_matrix(2, seed=0).matrix, random_density_matrix(3, seed=1).matrix
    got = prod.apply_matrix(np.kron(r1, r2))
    want = np.kron(c1.apply_matrix(r1), c2.apply_matrix(r2))
    assert np.abs(got - want).max() < 1e-12
    # entangled input: expand in matrix units and apply each factor separately
    rho = random_density_matrix(6, seed=5).matrix
    r = rho.reshape(2, 3, 2, 3)
    out = np.zeros((6, 6), dtype=complex)
    for i, j, k, l in itertools.product(range(2), range(2), range(3), range(3)):
        e1 = np.zeros((2, 2)); e1[i, j] = 1
        e2 = np.zeros((3, 3)); e2[k, l] = 1
        out += r[i, k, j, l] * np.kron(c1.apply_matrix(e1), c2.apply_matrix(e2))
    assert np.abs(prod.apply_matrix(rho) - out).max() < 1e-12
    assert prod.cp.ok and ch.is_unital(prod)


def test_product_channel_limits(monkeypatch):
    c = ch.DiagonalUnitalChannel.identity(2)
    with pytest.raises(DomainError):
        ch.ProductChannel([c])
    with pytest.raises(DomainError):
        ch.ProductChannel([c, ch.QubitAffineChannel([0, 0, 0], [1, 1, 1])])
    with pytest.raises(ResourceError):
        ch.ProductChannel([ch.DiagonalUnitalChannel.identity(3)] * 3)
    monkeypatch.setenv("QHSW_MAX_DIM", "4")
    with pytest.raises(ResourceError):
        ch.ProductChannel([c, ch.DiagonalUnitalChannel.identity(3)])


def test_descriptor_round_trip():
    channels = [
        ch.DiagonalUnitalChannel.qubit(0.5, 0.5, 0.9),
        ch.DiagonalUnitalChannel.from_dict(3, {(1, 0): 0.3j, (2, 0): -0.3j}),
        ch.QubitAffineChannel([0, 0, 0.2], [0, 0, 0.4]),
        ch.tensor([ch.DiagonalUnitalChannel.identity(2), ch.DiagonalUnitalChannel.point(2)]),
    ]
    for c in channels:
        back = ch.channel_from_descriptor(ch.channel_to_descriptor(c))
        assert type(back) is type(c)
        assert np.abs(back.superoperator() - c.superoperator()).max() < 1e-15


def test_descriptor_errors():
    with pytest.raises(DomainError):
        ch.channel_from_descriptor({"d": 2})
    with pytest.raises(DomainError):
        ch.channel_from_descriptor({"type": "mystery"})
    with pytest.raises(DomainError):
        ch.channel_from_descriptor({"type": "qubit_affine", "t": [0, 0, 0]})
    with pytest.raises(DomainError):
        ch.channel_from_descriptor({"type": "diagonal_unital", "d": 1})
    bad = {"type": "diagonal_unital", "d": 2, "lambda": [{"a": 1, "b": 0, "re": 1}, {"a": 1, "b": 1, "re": 1},
                                                          {"a": 0, "b": 1, "re": -1}]}
    with pytest.raises(NotCompletelyPositiveError):
        ch.channel_from_descriptor(bad)
    assert not ch.channel_from_descriptor(bad, allow_non_cp=True).cp.ok
