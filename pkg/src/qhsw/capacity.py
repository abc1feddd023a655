"""Classical (HSW) capacity of diagonal unital channels and an ensemble-optimizer oracle.

For a channel diagonal in the Weyl basis, every Weyl conjugate of an optimal
ensemble is again optimal, so the unique optimal average output commutes with
an irreducible group and must be I/d.  The relative-entropy optimality
conditions then pin every signal state to the minimum output entropy, giving

    C = log2(d) - min_rho S(E(rho)).

:func:`hsw_capacity_diagonal` evaluates that formula.  :func:`optimize_ensemble`
maximizes the Holevo quantity directly and works for any channel here,
including non-unital ones; it is the independent check on the formula.  The
``*_check`` functions test the optimality conditions on an optimizer result.
"""
import hashlib
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional

import numpy as np
from scipy.optimize import minimize

from .channel import (
    DiagonalUnitalChannel,
    ProductChannel,
    QuantumChannel,
    WeylDiagonalChannel,
    channel_to_descriptor,
)
from .density import (
    DensityMatrix,
    bloch_matrix,
    density_to_json,
    random_pure_vector,
)
from .entropy import (
    Ensemble,
    binary_entropy,
    entropy_of_spectrum,
    holevo_quantity,
    relative_entropy,
    von_neumann_entropy,
)
from .errors import DomainError

# probe states are mixed with this much I/d before taking logarithms
LOG_REGULARIZER = 1e-9
LN2 = math.log(2)


@dataclass
class OptimizerOptions:
    """Knobs shared by the minimum-entropy search and the ensemble oracle.

    ``tol`` and ``patience`` define convergence of the ensemble oracle: the
    best Holevo value must improve by less than ``tol`` over ``patience``
    consecutive iterations.  ``agreement_tol`` is how close the last batch of
    minimum-entropy restarts must stay to the earlier best.
    """

    seed: int = 0
    restarts: int = 8
    max_iter: int = 5000
    tol: float = 1e-9
    patience: int = 50
    ensemble_size: Optional[int] = None
    prob_floor: float = 1e-6
    agreement_tol: float = 1e-7


@dataclass
class MinOutputEntropy:
    value_bits: float
    argmin_state: DensityMatrix
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def __iter__(self):
        # allows ``value, state = min_output_entropy(...)``
        return iter((self.value_bits, self.argmin_state))


@dataclass
class CapacityResult:
    capacity_bits: float
    min_output_entropy_bits: float
    argmin_state: DensityMatrix
    method: str
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "capacity_bits": self.capacity_bits,
            "min_output_entropy_bits": self.min_output_entropy_bits,
            "argmin_state": density_to_json(self.argmin_state),
            "converged": self.converged,
            "diagnostics": self.diagnostics,
        }


@dataclass
class EnsembleResult:
    ensemble: Ensemble
    output_states: List[DensityMatrix]
    chi_bits: float
    average_output: DensityMatrix
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": "ensemble_oracle",
            "chi_bits": self.chi_bits,
            "probabilities": self.ensemble.probs.tolist(),
            "input_states": [density_to_json(s) for s in self.ensemble.states],
            "average_output": density_to_json(self.average_output),
            "converged": self.converged,
            "diagnostics": self.diagnostics,
        }


@dataclass
class CheckReport:
    name: str
    passed: bool
    residual: float
    tol: float
    converged: bool = True
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "tol": self.tol,
            "converged": self.converged,
            "details": self.details,
        }


# --------------------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------------------


def _regularized_log2(mats: np.ndarray):
    """Spectra and log2 of a stack of Hermitian matrices, mixed with a little I/d first."""
    d = mats.shape[-1]
    h = (mats + np.swapaxes(mats, -1, -2).conj()) / 2
    mu, v = np.linalg.eigh(h)
    mu_reg = (1 - LOG_REGULARIZER) * np.clip(mu, 0, None) + LOG_REGULARIZER / d
    logs = np.einsum("...ik,...k,...jk->...ij", v, np.log2(mu_reg), v.conj())
    return mu, mu_reg, logs


def _projectors(psi: np.ndarray) -> np.ndarray:
    return psi[:, :, None] * psi.conj()[:, None, :]


def _normalize_rows(psi: np.ndarray) -> np.ndarray:
    return psi / np.linalg.norm(psi, axis=-1, keepdims=True)


def _log2_dim(ch: QuantumChannel) -> float:
    if isinstance(ch, ProductChannel):
        return float(sum(math.log2(dk) for dk in ch.dims))
    return math.log2(ch.d)


def descriptor_hash(ch: QuantumChannel) -> str:
    blob = json.dumps(channel_to_descriptor(ch), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# --------------------------------------------------------------------------------------
# minimum output entropy
# --------------------------------------------------------------------------------------


def _output_entropy_and_grad(x: np.ndarray, ch: QuantumChannel):
    d = ch.d
    psi = x[:d] + 1j * x[d:]
    n = float(np.real(np.vdot(psi, psi)))
    rho = np.outer(psi, psi.conj()) / n
    out = ch.apply_matrix(rho)
    mu, mu_reg, logs = _regularized_log2(out[None])
    value = float(-np.sum(mu_reg[0] * np.log2(mu_reg[0])))
    # dS/dsigma = -(log2 sigma + I/ln2); pulled back through the channel
    k = -(1 - LOG_REGULARIZER) * ch.adjoint_matrix(logs[0] + np.eye(d) / LN2)
    k = (k + k.conj().T) / 2
    kpsi = k @ psi
    g = kpsi - (np.real(np.vdot(psi, kpsi)) / n) * psi
    grad = 2 * np.concatenate([g.real, g.imag]) / n
    return value, grad


def min_output_entropy(ch: QuantumChannel, opts: Optional[OptimizerOptions] = None) -> MinOutputEntropy:
    """min over pure inputs of S(E(rho)), by multi-restart L-BFGS on the unit sphere in C^d.

    Minimizing over pure states is enough: S(E(.)) is concave, so its minimum
    over the convex set of states sits at an extreme point.
    """
    opts = opts or OptimizerOptions()
    d = ch.d
    rng = np.random.default_rng(opts.seed)
    runs = []
    for r in range(opts.restarts):
        v0 = random_pure_vector(d, rng)
        res = minimize(
            _output_entropy_and_grad,
            np.concatenate([v0.real, v0.imag]),
            args=(ch,),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": opts.max_iter, "ftol": 1e-15, "gtol": 1e-10},
        )
        psi = _normalize_rows((res.x[:d] + 1j * res.x[d:])[None])[0]
        state = DensityMatrix(np.outer(psi, psi.conj()))
        value = von_neumann_entropy(_hermitize(ch.apply_matrix(state.matrix)))
        runs.append({"restart": r, "value": value, "iterations": int(res.nit), "success": bool(res.success), "state": state})

    values = [run["value"] for run in runs]
    best = min(range(len(runs)), key=lambda i: (values[i], i))
    batch = max(1, len(runs) // 4)
    earlier = min(values[:-batch]) if len(runs) > batch else values[best]
    improved_late = earlier - values[best]
    converged = improved_late <= opts.agreement_tol and runs[best]["success"]
    diagnostics = {
        "restarts": len(runs),
        "best_restart": best,
        "restart_values": values,
        "iterations": [run["iterations"] for run in runs],
        "final_batch_improvement": improved_late,
        "hits_within_tol": int(sum(v - values[best] <= opts.agreement_tol for v in values)),
    }
    return MinOutputEntropy(values[best], runs[best]["state"], converged, diagnostics)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def fibonacci_sphere(n: int) -> np.ndarray:
    """n nearly uniform unit vectors in R^3."""
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z**2)
    theta = np.pi * (1 + 5**0.5) * i
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)


def qubit_grid_min_output_entropy(ch: QuantumChannel, n_points: int = 20000):
    """Brute-force qubit minimum output entropy over a dense Bloch-sphere grid.

    Returns ``(value, bloch_vector)``.  Independent of the gradient search.
    """
    if ch.d != 2:
        raise DomainError("the Bloch-sphere grid search is for qubit channels")
    pts = fibonacci_sphere(n_points)
    best, best_w = math.inf, None
    for w in pts:
        s = von_neumann_entropy(_hermitize(ch.apply_matrix(bloch_matrix(w))))
        if s < best:
            best, best_w = s, w
    return best, best_w


def qubit_unital_capacity_closed_form(lam) -> float:
    """1 - H2((1 + max|lambda_k|)/2) for a CP qubit channel scaling the Bloch vector by lam."""
    lam = np.asarray(lam, dtype=float)
    DiagonalUnitalChannel.qubit(*lam)  # raises if not CP
    return 1 - binary_entropy((1 + np.abs(lam).max()) / 2)


def hsw_capacity_diagonal(ch: QuantumChannel, opts: Optional[OptimizerOptions] = None) -> CapacityResult:
    """log2(d) - min S(E(rho)) for channels diagonal in a Weyl-type basis."""
    if not isinstance(ch, WeylDiagonalChannel):
        raise DomainError(
            f"{type(ch).__name__} is not a diagonal unital channel; the closed form does not apply. "
            "Use optimize_ensemble for a direct Holevo maximization."
        )
    moe = min_output_entropy(ch, opts)
    diagnostics = dict(moe.diagnostics)
    diagnostics["log2_dim"] = _log2_dim(ch)
    return CapacityResult(
        capacity_bits=_log2_dim(ch) - moe.value_bits,
        min_output_entropy_bits=moe.value_bits,
        argmin_state=moe.argmin_state,
        method="closed_form_diagonal",
        converged=moe.converged,
        diagnostics=diagnostics,
    )


# --------------------------------------------------------------------------------------
# ensemble oracle
# --------------------------------------------------------------------------------------


class _EnsembleState:
    """Cached outputs, spectra and logarithms for one (probs, vectors) pair."""

    def __init__(self, ch: QuantumChannel, probs: np.ndarray, psi: np.ndarray):
        self.probs = probs
        self.psi = psi
        self.outputs = ch.apply_many(_projectors(psi))
        self.avg = np.einsum("i,ijk->jk", probs, self.outputs)
        mu, _, self.logs = _regularized_log2(self.outputs)
        mu_avg, _, self.log_avg = _regularized_log2(self.avg[None])
        self.log_avg = self.log_avg[0]
        self.out_entropy = np.array([entropy_of_spectrum(m) for m in mu])
        self.avg_entropy = entropy_of_spectrum(mu_avg[0])
        cross = np.real(np.einsum("ijk,kj->i", self.outputs, self.log_avg))
        # D(E(rho_i) || average output)
        self.distances = -self.out_entropy - cross
        self.chi = self.avg_entropy - float(probs @ self.out_entropy)


def _blahut_arimoto_step(probs: np.ndarray, distances: np.ndarray) -> np.ndarray:
    # p_i <- p_i 2^{D_i} / Z, the exact coordinate update for fixed signal states
    w = np.log2(np.clip(probs, 1e-300, None)) + distances
    w = np.exp2(w - w.max()) * (probs > 0)
    return w / w.sum()


def _state_directions(ch: QuantumChannel, st: _EnsembleState) -> np.ndarray:
    """Per-state ascent directions of chi on the unit sphere.

    The chi gradient for state i is p_i E*(log sigma_i - log sigma_avg) psi_i
    projected onto the tangent space; the p_i factor is dropped so that
    low-weight states keep moving toward the optimal surface.
    """
    m, d = st.psi.shape
    diff = (st.logs - st.log_avg[None]).reshape(m, d * d)
    k = (diff @ ch.superoperator().conj()).reshape(m, d, d)
    k = (k + np.swapaxes(k, 1, 2).conj()) / 2
    kpsi = np.einsum("ijk,ik->ij", k, st.psi)
    expect = np.real(np.einsum("ij,ij->i", st.psi.conj(), kpsi))
    return kpsi - expect[:, None] * st.psi


def _run_ensemble(ch: QuantumChannel, opts: OptimizerOptions, rng, m: int) -> dict:
    d = ch.d
    psi = np.array([random_pure_vector(d, rng) for _ in range(m)])
    probs = np.full(m, 1.0 / m)
    st = _EnsembleState(ch, probs, psi)
    step = 0.25
    history = [st.chi]
    converged = False
    it = 0
    for it in range(1, opts.max_iter + 1):
        st = _EnsembleState(ch, _blahut_arimoto_step(st.probs, st.distances), st.psi)
        g = _state_directions(ch, st)
        gmax = float(np.linalg.norm(g, axis=1).max())
        if gmax > 0:
            for _ in range(30):
                eta = min(step, 0.5 / gmax)
                trial = _EnsembleState(ch, st.probs, _normalize_rows(st.psi + eta * g))
                if trial.chi >= st.chi - 1e-15:
                    st = trial
                    step = min(step * 1.5, 1e3)
                    break
                step *= 0.5
        history.append(st.chi)
        if it >= opts.patience and history[-1] - history[-1 - opts.patience] < opts.tol:
            converged = True
            break
    return {"state": st, "iterations": it, "converged": converged}


def optimize_ensemble(ch: QuantumChannel, opts: Optional[OptimizerOptions] = None) -> EnsembleResult:
    """Maximize the Holevo quantity over ensembles of at most ``ensemble_size`` pure inputs.

    Each iteration alternates an exact probability update for the current
    signal states with a backtracking ascent step on the states.  Restarts
    are seeded from ``opts.seed``; the best chi wins, ties to the earliest.
    """
    opts = opts or OptimizerOptions()
    m = opts.ensemble_size or ch.d**2
    rng = np.random.default_rng(opts.seed)
    runs = [_run_ensemble(ch, opts, rng, m) for _ in range(opts.restarts)]
    chis = [run["state"].chi for run in runs]
    best = max(range(len(runs)), key=lambda i: (chis[i], -i))
    st = runs[best]["state"]

    inputs = [DensityMatrix(p) for p in _projectors(st.psi)]
    outputs = [DensityMatrix(_hermitize(o)) for o in st.outputs]
    probs = st.probs / st.probs.sum()
    ens = Ensemble(probs, inputs)
    out_ens = Ensemble(probs, outputs)
    diagnostics = {
        "restarts": len(runs),
        "best_restart": best,
        "restart_chi": chis,
        "iterations": [run["iterations"] for run in runs],
        "restart_converged": [run["converged"] for run in runs],
        "ensemble_size": m,
    }
    return EnsembleResult(
        ensemble=ens,
        output_states=outputs,
        chi_bits=holevo_quantity(out_ens),
        average_output=DensityMatrix(_hermitize(out_ens.average())),
        converged=runs[best]["converged"],
        diagnostics=diagnostics,
    )


# --------------------------------------------------------------------------------------
# optimality checks
# --------------------------------------------------------------------------------------


def equal_distance_check(res: EnsembleResult, ch: QuantumChannel, tol: float = 1e-3,
                         prob_floor: float = 1e-6) -> CheckReport:
    """Every signal state with weight above ``prob_floor`` sits at distance chi from the average output."""
    distances = {}
    worst, offending = 0.0, None
    for i, (p, out) in enumerate(zip(res.ensemble.probs, res.output_states)):
        if p <= prob_floor:
            continue
        dist = relative_entropy(out, res.average_output)
        distances[i] = dist
        dev = abs(dist - res.chi_bits)
        if dev > worst or math.isinf(dist):
            worst, offending = dev, i
    passed = res.converged and worst < tol
    return CheckReport(
        "equal_distance", passed, worst, tol, res.converged,
        {"chi_bits": res.chi_bits, "distances": {str(k): v for k, v in distances.items()}, "worst_index": offending},
    )


def maximal_distance_check(res: EnsembleResult, ch: QuantumChannel, n_probes: int = 1000,
                           tol: float = 1e-3, seed: int = 0) -> CheckReport:
    """No random pure input lands farther than chi (+ tol) from the average output."""
    rng = np.random.default_rng(seed)
    worst, worst_vec = -math.inf, None
    n_violations = 0
    for _ in range(n_probes):
        v = random_pure_vector(ch.d, rng)
        out = _hermitize(ch.apply_matrix(np.outer(v, v.conj())))
        excess = relative_entropy(out, res.average_output) - res.chi_bits
        if excess > tol:
            n_violations += 1
        if excess > worst:
            worst, worst_vec = excess, v
    passed = res.converged and worst <= tol
    return CheckReport(
        "maximal_distance", passed, worst, tol, res.converged,
        {"n_probes": n_probes, "n_violations": n_violations,
         "worst_probe": {"re": worst_vec.real.tolist(), "im": worst_vec.imag.tolist()}},
    )


def average_output_uniqueness_check(ch: QuantumChannel, n_runs: int = 5, tol: float = 1e-3,
                                    opts: Optional[OptimizerOptions] = None) -> CheckReport:
    """Oracle runs from different seeds must all end at average output I/d.

    ``details['pairwise_passed']`` records the weaker statement that the runs
    agree with each other (within 2 tol), which holds for any channel.
    """
    opts = opts or OptimizerOptions()
    target = np.eye(ch.d) / ch.d
    averages, excluded, chis = [], 0, []
    for k in range(n_runs):
        run_opts = OptimizerOptions(**{**opts.__dict__, "seed": opts.seed + k})
        res = optimize_ensemble(ch, run_opts)
        if not res.converged:
            excluded += 1
            continue
        averages.append(res.average_output.matrix)
        chis.append(res.chi_bits)
    if not averages:
        return CheckReport("average_output_uniqueness", False, math.inf, tol, False, {"n_excluded": excluded})
    dev_mixed = max(float(np.abs(a - target).max()) for a in averages)
    pairwise = max((float(np.abs(a - b).max()) for a, b in combinations(averages, 2)), default=0.0)
    details = {
        "n_runs": n_runs,
        "n_excluded": excluded,
        "max_deviation_from_maximally_mixed": dev_mixed,
        "max_pairwise_deviation": pairwise,
        "pairwise_passed": pairwise < 2 * tol,
        "chi_bits": chis,
    }
    if ch.d == 2:
        details["average_bloch_vectors"] = [
            [float(np.real(a[0, 1] + a[1, 0])), float(np.imag(a[1, 0] - a[0, 1])), float(np.real(a[0, 0] - a[1, 1]))]
            for a in averages
        ]
    return CheckReport("average_output_uniqueness", dev_mixed < tol, dev_mixed, tol, True, details)


def result_record(ch: QuantumChannel, result, checks: Optional[List[CheckReport]] = None) -> dict:
    """Machine-readable record of one computation."""
    try:
        descriptor = channel_to_descriptor(ch)
        digest = descriptor_hash(ch)
    except DomainError:
        descriptor, digest = None, None
    rec = {"channel": descriptor, "channel_sha256": digest}
    rec.update(result.to_dict())
    rec["checks"] = [c.to_dict() for c in (checks or [])]
    return rec
