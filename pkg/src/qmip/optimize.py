"""Certificate checking and see-saw search over prover strategies.

Acceptance is a quadratic function of any single prover turn X,
``f(X) = || Pi B X a ||^2``, where ``a`` is the state just before the turn,
``B`` the rest of the protocol and ``Pi`` the projector onto output 1.
Because f is convex in X it lies above its tangent at the current X0, so
maximising ``Re <B X0 a| Pi B |X a>`` over unitaries (a polar decomposition)
never decreases f.  :func:`best_response` iterates that step.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import linalg, protocol, states
from .errors import ValidationError

REUNITARIZE_TOL = 1e-6
MM_TOL = 1e-13
MM_MAX_ITER = 500


@dataclass(eq=False)
class Certificate:
    provers: list
    prior: np.ndarray = None
    claimed: float = None


class Verdict(NamedTuple):
    accepted: bool
    value: float
    reason: str


class BestResponse(NamedTuple):
    unitary: np.ndarray
    value: float
    degenerate: bool


@dataclass(eq=False)
class OptimizationResult:
    provers: list
    value: float
    trajectory: list
    restarts: int
    converged: bool
    restart_values: list = field(default_factory=list)

    def certificate(self, prior=None):
        return Certificate(self.provers, prior, self.value)


def _reunitarize(u, tol):
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return None, f"turn of shape {u.shape} is not square"
    if not np.all(np.isfinite(u)):
        return None, "turn has non-finite entries"
    if linalg.is_unitary(u, 1e-10):
        return u, ""
    gap = linalg.hermitian_operator_norm(u.conj().T @ u - np.eye(u.shape[0]))
    if gap <= tol:
        return linalg.polar_unitary(u), ""
    return None, f"turn is {gap:.3e} from unitary (tolerance {tol:.1e})"


def verify_certificate(spec, verifier, cert, threshold, eps=1e-9, tol=REUNITARIZE_TOL):
    """Accept iff the certificate's exact acceptance exceeds ``threshold - eps``.

    Near-unitary turns are replaced by their polar factors; anything further
    from unitary is rejected with a reason.
    """
    provers = []
    for i, strategy in enumerate(cert.provers, 1):
        fixed = []
        for j, turn in enumerate(strategy, 1):
            if isinstance(turn, (list, tuple)):
                fixed.append(turn)
                continue
            u, why = _reunitarize(turn, tol)
            if u is None:
                return Verdict(False, float("nan"), f"prover {i} turn {j}: {why}")
            fixed.append(u)
        provers.append(fixed)
    try:
        _, value = protocol.run_protocol(spec, verifier, provers, cert.prior)
    except ValidationError as exc:
        return Verdict(False, float("nan"), "; ".join(exc.violations))
    accepted = value > threshold - eps
    reason = "" if accepted else f"acceptance {value:.12f} not above {threshold} - {eps}"
    return Verdict(bool(accepted), value, reason)


def _step_list(spec, verifier, provers):
    """[(matrix, registers, label)] in execution order, all turns as matrices."""
    steps = []
    for kind, j in protocol.schedule(spec):
        if kind == "V":
            steps.append((protocol.turn_matrix(verifier[j], spec.verifier_qubits),
                          spec.verifier_registers, ("V", j)))
        else:
            for i in range(1, spec.k + 1):
                steps.append((protocol.turn_matrix(provers[i - 1][j], spec.prover_qubits),
                              spec.prover_registers(i), ("P", j, i)))
    return steps


def _project_output(state, qubit):
    n = state.layout.total_qubits
    t = state.amplitudes.reshape(2 ** qubit, 2, 2 ** (n - qubit - 1)).copy()
    t[:, 0, :] = 0.0
    return t.reshape(-1)


def best_response(spec, verifier, provers, prior, i, j, tol=MM_TOL, max_iter=MM_MAX_ITER):
    """Unitary for turn ``j`` (0-based) of prover ``i`` (1-based) maximising
    acceptance with everything else fixed, started from the current turn."""
    steps = _step_list(spec, verifier, provers)
    pos = next(n for n, s in enumerate(steps) if s[2] == ("P", j, i))
    state = protocol.initial_state(spec, prior)
    for op, regs, _ in steps[:pos]:
        state = states.apply_unitary(state, op, regs)
    before = state
    regs = spec.prover_registers(i)
    after = steps[pos + 1:]
    layout = spec.layout

    def evaluate(x):
        s = states.apply_unitary(before, x, regs)
        for op, r, _ in after:
            s = states.apply_unitary(s, op, r)
        return s

    x = steps[pos][0]
    final = evaluate(x)
    value = states.measure_output_qubit(final, spec.output_qubit)
    a_mat, _, _ = states.group(before, regs)
    degenerate = False
    for _ in range(max_iter):
        back = _project_output(final, spec.output_qubit)
        if np.linalg.norm(back) < 1e-14:
            degenerate = True
            break
        b = states.from_amplitudes(layout, back, normalize=True)
        scale = np.linalg.norm(back)
        for op, r, _ in reversed(after):
            b = states.apply_unitary(b, op.conj().T, r)
        b_mat, _, _ = states.group(b, regs)
        env = (a_mat @ b_mat.conj().T) * scale
        if linalg.operator_norm(env) < 1e-14:
            degenerate = True
            break
        w, _, vh = np.linalg.svd(env)
        candidate = vh.conj().T @ w.conj().T
        new_final = evaluate(candidate)
        new_value = states.measure_output_qubit(new_final, spec.output_qubit)
        if new_value < value:
            break
        gain = new_value - value
        x, final, value = candidate, new_final, new_value
        if gain <= tol:
            break
    if degenerate and value <= 1e-14:
        x = np.eye(2 ** spec.prover_qubits, dtype=complex)
    return BestResponse(x, value, degenerate)


def optimize_provers(spec, verifier, prior=None, restarts=8, sweeps=100, seed=0, tol=1e-10,
                     initial=None):
    """Cyclic best responses over every (round, prover) from seeded Haar starts.

    Restart r draws its starting strategies from ``default_rng([seed, r])``;
    ``initial`` (if given) replaces the random start of restart 0.  The best
    restart wins, ties going to the lower index.
    """
    best = None
    values = []
    for r in range(restarts):
        if r == 0 and initial is not None:
            provers = [[protocol.turn_matrix(t, spec.prover_qubits) for t in s] for s in initial]
        else:
            provers = protocol.random_provers(spec, np.random.default_rng([seed, r]))
        _, value = protocol.run_protocol(spec, verifier, provers, prior)
        trajectory = [value]
        converged = False
        for _ in range(sweeps):
            for j in range(spec.prover_turns):
                for i in range(1, spec.k + 1):
                    resp = best_response(spec, verifier, provers, prior, i, j)
                    provers[i - 1][j] = resp.unitary
            _, value = protocol.run_protocol(spec, verifier, provers, prior)
            trajectory.append(value)
            if value - trajectory[-2] < tol:
                converged = True
                break
        values.append(value)
        if best is None or value > best.value:
            best = OptimizationResult(provers, value, trajectory, restarts, converged)
    best.restart_values = values
    return best
