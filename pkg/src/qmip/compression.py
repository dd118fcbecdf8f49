"""Bounding the private space of provers without changing acceptance.

Two constructions are provided:

* :func:`compress_single_prover` -- one prover, private space shrunk to
  ``q_V + q_M`` qubits by purifying the verifier-side reduced state after every
  prover turn and linking consecutive purifications with Uhlmann unitaries.
* :func:`compress_prover` / :func:`compress_all_provers` -- k provers sharing a
  prior, each shrunk to ``q_ent + 2 * ceil(m/2) * q_M`` qubits.  Round by round,
  the state after the prover's move is re-embedded into the first few qubits
  of its private register (the Schmidt rank there is bounded by the round
  number), and the prover's replacement unitary is synthesised on its message
  register plus that prefix.
"""
from dataclasses import dataclass, field

import numpy as np

from . import linalg, protocol, states
from .errors import CapacityError, ContractError, NumericError, ValidationError

ACCEPTANCE_TOL = 1e-8
SUPPORT_TOL = 1e-9


@dataclass(eq=False)
class RoundRecord:
    """States and operators of one prover round (``round`` is 1-based)."""

    round: int
    phi: states.PureState
    psi: states.PureState
    phi_prime: states.PureState
    psi_prime: states.PureState
    Q: np.ndarray
    P_prime: np.ndarray
    A: np.ndarray = None
    rank: int = 0
    phi_budget: int = 0
    psi_budget: int = 0
    phi_leak: float = 0.0
    psi_leak: float = 0.0
    reduced_gap: float = 0.0
    realignment_gap: float = 0.0


@dataclass(eq=False)
class CompressionTrace:
    prover: int
    rounds: list = field(default_factory=list)

    @property
    def ranks(self):
        return [r.rank for r in self.rounds]

    def max_leak(self):
        return max((max(r.phi_leak, r.psi_leak) for r in self.rounds), default=0.0)

    def max_reduced_gap(self):
        return max((r.reduced_gap for r in self.rounds), default=0.0)


@dataclass(eq=False)
class CompressedProver:
    prover: int
    strategy: list
    q_P: int
    trace: CompressionTrace
    acceptance_original: float
    acceptance_compressed: float
    original_q_P: int
    trivial: bool = False

    @property
    def acceptance_delta(self):
        return abs(self.acceptance_compressed - self.acceptance_original)

    def embedded(self, q_P=None):
        """Turns widened back to ``q_P`` private qubits by idle trailing qubits."""
        q_P = self.original_q_P if q_P is None else q_P
        if q_P < self.q_P:
            raise CapacityError(f"cannot embed a {self.q_P}-qubit prover into {q_P} qubits")
        pad = np.eye(2 ** (q_P - self.q_P), dtype=complex)
        return [np.kron(u, pad) for u in self.strategy]


@dataclass(eq=False)
class CompressedProtocol:
    spec: protocol.ProtocolSpec
    provers: list
    compressed: list
    acceptance_original: float
    acceptance_compressed: float

    @property
    def acceptance_delta(self):
        return abs(self.acceptance_compressed - self.acceptance_original)


@dataclass(eq=False)
class EquivalenceReport:
    acceptance_a: float
    acceptance_b: float
    gaps: list
    steps: list

    @property
    def final_gap(self):
        return self.gaps[-1] if self.gaps else 0.0

    def equivalent(self, tol=ACCEPTANCE_TOL):
        return abs(self.acceptance_a - self.acceptance_b) <= tol and self.final_gap <= tol


def multi_prover_budget(spec):
    """q_ent + 2 * floor(m/2 + 1/2) * q_M."""
    return spec.q_ent + 2 * spec.prover_turns * spec.q_M


def _as_matrices(spec, turns, n_qubits):
    return [protocol.turn_matrix(t, n_qubits) for t in turns]


def _check(spec, verifier, provers, prior):
    problems = protocol.validate_protocol(spec, verifier, provers, prior)
    if problems:
        raise ValidationError(problems)


def _pad_turns(turns, extra):
    pad = np.eye(2 ** extra, dtype=complex)
    return [np.kron(u, pad) for u in turns]


def compress_single_prover(spec, verifier, prover, tol=ACCEPTANCE_TOL):
    """Replace the single prover by one with ``q_V + q_M`` private qubits.

    The compressed track starts from |init> on the smaller layout; after each
    original prover turn the verifier-side reduced state is purified into the
    new private register, and the new turn is the Uhlmann unitary on
    ``M1 P1`` carrying the compressed pre-turn state to that purification.
    """
    if spec.k != 1:
        raise ContractError(f"single-prover compression needs k = 1, got k = {spec.k}")
    if spec.q_ent:
        raise ContractError("a single prover has no one to share prior entanglement with")
    _check(spec, verifier, [prover], None)
    budget = spec.q_V + spec.q_M
    small = spec.with_q_P(budget)
    prover = _as_matrices(spec, prover, spec.prover_qubits)
    vm = spec.verifier_registers
    regs = spec.prover_registers(1)

    state = protocol.initial_state(spec)
    state_p = protocol.initial_state(small)
    if spec.m % 2 == 0:
        state = protocol.apply_turn(state, verifier[0], vm)
        state_p = protocol.apply_turn(state_p, verifier[0], vm)
    offset = 1 if spec.m % 2 == 0 else 0

    trace = CompressionTrace(prover=1)
    new_turns = []
    for j in range(spec.prover_turns):
        phi, phi_p = state, state_p
        psi = states.apply_unitary(phi, prover[j], regs)
        psi_p = states.purify(states.partial_trace(psi, vm), "P1")
        q = states.uhlmann_unitary(phi_p, psi_p, regs)
        new_turns.append(q)
        trace.rounds.append(RoundRecord(
            round=j + 1, phi=phi, psi=psi, phi_prime=phi_p, psi_prime=psi_p, Q=q, P_prime=q,
            rank=states.ent2(psi, ["P1"]), phi_budget=budget, psi_budget=budget,
            reduced_gap=linalg.hermitian_operator_norm(
                states.partial_trace(psi, vm).matrix - states.partial_trace(psi_p, vm).matrix),
        ))
        state = protocol.apply_turn(psi, verifier[j + offset], vm)
        state_p = protocol.apply_turn(states.apply_unitary(phi_p, q, regs), verifier[j + offset], vm)

    acc = states.measure_output_qubit(state, spec.output_qubit)
    _, acc_new = protocol.run_protocol(small, verifier, [new_turns])
    result = CompressedProver(1, new_turns, budget, trace, acc, acc_new, spec.q_P)
    if result.acceptance_delta > tol:
        raise NumericError(f"compressed acceptance differs by {result.acceptance_delta:.3e}")
    return result


def compress_prover(spec, verifier, provers, i, prior=None, tol=ACCEPTANCE_TOL):
    """Compress prover ``i`` (1-based) to ``q_ent + 2*ceil(m/2)*q_M`` private qubits.

    When q_P is already below that budget there is nothing to construct: the
    prover is padded with idle qubits up to the budget.
    """
    _check(spec, verifier, provers, prior)
    if not 1 <= i <= spec.k:
        raise ContractError(f"prover index {i} outside 1..{spec.k}")
    budget = multi_prover_budget(spec)
    provers = [_as_matrices(spec, s, spec.prover_qubits) for s in provers]
    _, acc = protocol.run_protocol(spec, verifier, provers, prior)

    if spec.q_P < budget:
        extra = budget - spec.q_P
        padded = [_pad_turns(s, extra) for s in provers]
        _, acc_new = protocol.run_protocol(spec.with_q_P(budget), verifier, padded, prior)
        result = CompressedProver(i, padded[i - 1], budget, CompressionTrace(i), acc, acc_new,
                                  spec.q_P, trivial=True)
    else:
        result = _compress_rounds(spec, verifier, provers, i, prior, budget, acc)
    if result.acceptance_delta > tol:
        raise NumericError(
            f"prover {i}: compressed acceptance differs by {result.acceptance_delta:.3e}")
    return result


def _compress_rounds(spec, verifier, provers, i, prior, budget, acc):
    vm = spec.verifier_registers
    regs = spec.prover_registers(i)
    p_name = f"P{i}"
    others = [t for t in range(1, spec.k + 1) if t != i]
    offset = 1 if spec.m % 2 == 0 else 0
    pad = np.eye(2 ** (spec.q_P - budget), dtype=complex)

    def advance(s, j):
        # U_j: the other provers' round-j turns, then the next verifier turn
        for t in others:
            s = states.apply_unitary(s, provers[t - 1][j], spec.prover_registers(t))
        return protocol.apply_turn(s, verifier[j + offset], vm)

    state = protocol.initial_state(spec, prior)
    if offset:
        state = protocol.apply_turn(state, verifier[0], vm)
    state_p = state

    trace = CompressionTrace(prover=i)
    new_turns, embedded = [], []
    prev_a = None
    for j in range(spec.prover_turns):
        phi, phi_p = state, state_p
        psi = states.apply_unitary(phi, provers[i - 1][j], regs)
        phi_budget = spec.q_ent + 2 * j * spec.q_M
        psi_budget = spec.q_ent + 2 * (j + 1) * spec.q_M
        try:
            psi_p = states.compress_subsystem(psi, p_name, psi_budget)
        except CapacityError as exc:
            raise NumericError(
                f"internal consistency: prover {i} round {j + 1} Schmidt rank {exc.rank} "
                f"exceeds the proven bound 2^{psi_budget}") from exc
        realign = 0.0
        if prev_a is not None:
            # psi_j must equal P_{i,j} A_{j-1} phi'_j
            check = states.apply_unitary(states.apply_unitary(phi_p, prev_a, [p_name]),
                                         provers[i - 1][j], regs)
            realign = float(np.linalg.norm(check.amplitudes - psi.amplitudes))
        a = states.uhlmann_unitary(psi_p, psi, [p_name])
        small_q = states.uhlmann_unitary(
            states.truncate_register(phi_p, p_name, budget, SUPPORT_TOL),
            states.truncate_register(psi_p, p_name, budget, SUPPORT_TOL),
            regs,
        )
        q = np.kron(small_q, pad)
        new_turns.append(small_q)
        embedded.append(q)
        trace.rounds.append(RoundRecord(
            round=j + 1, phi=phi, psi=psi, phi_prime=phi_p, psi_prime=psi_p, Q=q, P_prime=small_q,
            A=a, rank=states.ent2(psi, [p_name]), phi_budget=phi_budget, psi_budget=psi_budget,
            phi_leak=states.support_leak(phi_p, p_name, phi_budget),
            psi_leak=states.support_leak(psi_p, p_name, psi_budget),
            reduced_gap=states.reduced_state_gap(psi, psi_p, [p_name]),
            realignment_gap=realign,
        ))
        prev_a = a
        state = advance(psi, j)
        state_p = advance(states.apply_unitary(phi_p, q, regs), j)

    swapped = list(provers)
    swapped[i - 1] = embedded
    _, acc_new = protocol.run_protocol(spec, verifier, swapped, prior)
    return CompressedProver(i, new_turns, budget, trace, acc, acc_new, spec.q_P)


def compress_all_provers(spec, verifier, provers, prior=None, tol=ACCEPTANCE_TOL):
    """Compress provers 1..k in turn, each against the already-compressed ones."""
    _check(spec, verifier, provers, prior)
    budget = multi_prover_budget(spec)
    provers = [_as_matrices(spec, s, spec.prover_qubits) for s in provers]
    _, acc = protocol.run_protocol(spec, verifier, provers, prior)
    current = list(provers)
    results = []
    for i in range(1, spec.k + 1):
        try:
            cp = compress_prover(spec, verifier, current, i, prior, tol)
        except (NumericError, ContractError) as exc:
            raise type(exc)(f"prover {i}: {exc}") from exc
        results.append(cp)
        if not cp.trivial:
            current[i - 1] = cp.embedded()
    final_spec = spec.with_q_P(budget)
    final = [cp.strategy for cp in results]
    _, acc_new = protocol.run_protocol(final_spec, verifier, final, prior)
    out = CompressedProtocol(final_spec, final, results, acc, acc_new)
    if out.acceptance_delta > spec.k * tol:
        raise NumericError(f"compressed protocol acceptance differs by {out.acceptance_delta:.3e}")
    return out


def _private_qubits(spec, turns):
    for t in turns:
        if not isinstance(t, (list, tuple)):
            d = np.asarray(t).shape[0]
            return int(round(np.log2(d))) - spec.q_M
    return spec.q_P


def verify_equivalence(spec, verifier, provers_a, provers_b, prior=None, tol=ACCEPTANCE_TOL):
    """Compare two prover tuples against one verifier.

    The tuples may use different private-register widths (inferred from the
    turn matrices).  After every schedule step the reduced states on
    ``V M_1 .. M_k`` are compared in operator norm.
    """
    spec_a = spec.with_q_P(_private_qubits(spec, provers_a[0]))
    spec_b = spec.with_q_P(_private_qubits(spec, provers_b[0]))
    vm = spec.verifier_registers
    gaps, steps = [], []
    run_a = protocol.protocol_steps(spec_a, verifier, provers_a, prior)
    run_b = protocol.protocol_steps(spec_b, verifier, provers_b, prior)
    final_a = final_b = None
    for (step, final_a), (_, final_b) in zip(run_a, run_b):
        ra = states.partial_trace(final_a, vm).matrix
        rb = states.partial_trace(final_b, vm).matrix
        gaps.append(linalg.hermitian_operator_norm(ra - rb))
        steps.append(step)
    return EquivalenceReport(
        states.measure_output_qubit(final_a, spec.output_qubit),
        states.measure_output_qubit(final_b, spec.output_qubit),
        gaps, steps,
    )
