import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhsw.density import bloch_to_density, random_density_matrix, random_pure_state, random_unitary
from qhsw.entropy import (
    Ensemble,
    binary_entropy,
    chi_unitary_invariance_check,
    entropy_of_spectrum,
    holevo_quantity,
    relative_entropy,
    von_neumann_entropy,
)
from qhsw.errors import DomainError


def test_entropy_examples():
    assert von_neumann_entropy(np.diag([1, 0])) == 0
    assert abs(von_neumann_entropy(np.eye(2) / 2) - 1) < 1e-12
    assert abs(von_neumann_entropy(np.eye(3) / 3) - math.log2(3)) < 1e-12
    assert abs(von_neumann_entropy(np.diag([0.5, 0.25, 0.25])) - 1.5) < 1e-12
    assert abs(binary_entropy(0.95) - 0.2863969571159563) < 1e-12


def test_entropy_is_not_negative_zero():
    s = von_neumann_entropy(np.diag([1.0, 0.0, 0.0]))
    assert s == 0 and math.copysign(1, s) == 1


def test_entropy_rejects_bad_spectra():
    with pytest.raises(DomainError):
        entropy_of_spectrum([1.1, -0.1])
    with pytest.raises(DomainError):
        von_neumann_entropy(np.eye(2))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31))
def test_entropy_bounds(d, seed):
    s = von_neumann_entropy(random_density_matrix(d, seed=seed))
    assert -1e-12 <= s <= math.log2(d) + 1e-12
    assert von_neumann_entropy(random_pure_state(d, seed=seed)) < 1e-9


def test_holevo_example():
    # states with Bloch z = 1 and z = 0.6; average z = 0.8... eigenvalues below
    r0 = bloch_to_density([0, 0, 0.2])  # eigenvalues 0.6, 0.4
    r1 = bloch_to_density([0, 0, 0.6])  # eigenvalues 0.8, 0.2
    ens = Ensemble([0.5, 0.5], [r0, r1])
    # average z = 0.4 -> eigenvalues 0.7, 0.3
    want = binary_entropy(0.7) - 0.5 * binary_entropy(0.6) - 0.5 * binary_entropy(0.8)
    assert abs(holevo_quantity(ens) - want) < 1e-12


def test_holevo_corrected_reference_value():
    # H2(0.6) - H2(0.6)/2 - H2(0.8)/2 for two states whose average has eigenvalue 0.6
    r0 = np.diag([0.6, 0.4])
    r1 = np.diag([0.6, 0.4]) @ np.diag([1, 1])
    ens = Ensemble([0.5, 0.5], [np.diag([0.4, 0.6]), np.diag([0.8, 0.2])])
    assert abs(holevo_quantity(ens) - 0.12451124978365313) < 1e-12
    assert abs(holevo_quantity(Ensemble([1.0], [r0])) - 0) < 1e-12
    assert abs(holevo_quantity(Ensemble([0.5, 0.5], [r0, r1]))) < 1e-12


def test_holevo_orthogonal_pure_states():
    ens = Ensemble([1 / 3] * 3, [np.diag(e) for e in np.eye(3)])
    assert abs(holevo_quantity(ens) - math.log2(3)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(1, 4), st.integers(0, 2**31))
def test_holevo_bounds_and_unitary_invariance(d, m, seed):
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(m))
    states = [random_density_matrix(d, seed=seed + i) for i in range(m)]
    ens = Ensemble(probs, states)
    chi = holevo_quantity(ens)
    assert -1e-12 <= chi <= math.log2(d) + 1e-12
    assert chi_unitary_invariance_check(ens, random_unitary(d, seed=seed)) < 1e-10


def test_ensemble_validation():
    with pytest.raises(DomainError):
        Ensemble([0.5, 0.6], [np.eye(2) / 2, np.eye(2) / 2])
    with pytest.raises(DomainError):
        Ensemble([0.5, 0.5], [np.eye(2) / 2, np.eye(3) / 3])
    with pytest.raises(DomainError):
        Ensemble([1.0], [])
    with pytest.raises(DomainError):
        chi_unitary_invariance_check(Ensemble([1.0], [np.eye(2) / 2]), np.ones((2, 2)))


def test_relative_entropy_examples():
    assert abs(relative_entropy(np.diag([1, 0]), np.eye(2) / 2) - 1) < 1e-12
    assert relative_entropy(np.diag([1, 0]), np.diag([0, 1])) == math.inf
    assert relative_entropy(np.eye(2) / 2, np.diag([1, 0])) == math.inf
    # classical case against the direct formula
    p, q = np.array([0.3, 0.7]), np.array([0.6, 0.4])
    want = float(np.sum(p * np.log2(p / q)))
    assert abs(relative_entropy(np.diag(p), np.diag(q)) - want) < 1e-12
    # pure state inside the support of a rank-deficient phi
    phi = np.diag([0.5, 0.5, 0.0])
    assert abs(relative_entropy(np.diag([1, 0, 0]), phi) - 1) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31))
def test_relative_entropy_properties(d, seed):
    rho = random_density_matrix(d, seed=seed)
    phi = random_density_matrix(d, seed=seed + 1)
    assert relative_entropy(rho, phi) >= -1e-10
    assert abs(relative_entropy(rho, rho)) < 1e-9
    # D(rho || I/d) = log2 d - S(rho)
    assert abs(relative_entropy(rho, np.eye(d) / d) - (math.log2(d) - von_neumann_entropy(rho))) < 1e-10
    # against a direct matrix-log evaluation for full-rank arguments
    from scipy.linalg import logm
    direct = np.real(np.trace(rho.matrix @ (logm(rho.matrix) - logm(phi.matrix)))) / math.log(2)
    assert abs(relative_entropy(rho, phi) - direct) < 1e-8


def test_holevo_equals_average_relative_entropy():
    rng = np.random.default_rng(3)
    states = [random_density_matrix(3, seed=s) for s in range(4)]
    probs = rng.dirichlet(np.ones(4))
    ens = Ensemble(probs, states)
    avg = ens.average()
    dsum = sum(p * relative_entropy(s, avg) for p, s in zip(probs, states))
    assert abs(holevo_quantity(ens) - dsum) < 1e-10
