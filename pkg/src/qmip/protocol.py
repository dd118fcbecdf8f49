"""The k-prover, m-message quantum interactive proof model.

The system is ``V (x) M_1 .. M_k (x) P_1 .. P_k`` with register names
``"V"``, ``"M1"``..``"Mk"``, ``"P1"``..``"Pk"`` in that order.  Verifier turns
act on ``V M_1 .. M_k``; turn j of prover i acts on ``M_i P_i``.  A turn is
either an explicit unitary matrix or a list of :class:`~qmip.gates.Gate`.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from . import gates as gates_mod
from . import linalg, states
from .errors import ShapeError, ValidationError
from .states import PureState, RegisterLayout

UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class ProtocolSpec:
    k: int
    m: int
    q_V: int
    q_M: int
    q_P: int
    q_ent: int = 0
    output_qubit: int = 0
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def layout(self):
        regs = [("V", self.q_V)]
        regs += [(f"M{i}", self.q_M) for i in range(1, self.k + 1)]
        regs += [(f"P{i}", self.q_P) for i in range(1, self.k + 1)]
        return RegisterLayout(tuple(regs))

    @property
    def total_qubits(self):
        return self.q_V + self.k * (self.q_M + self.q_P)

    @property
    def verifier_turns(self):
        return self.m // 2 + 1

    @property
    def prover_turns(self):
        return (self.m + 1) // 2

    @property
    def verifier_registers(self):
        return ("V",) + tuple(f"M{i}" for i in range(1, self.k + 1))

    @property
    def verifier_qubits(self):
        return self.q_V + self.k * self.q_M

    @property
    def prover_qubits(self):
        return self.q_M + self.q_P

    def prover_registers(self, i):
        """Registers touched by prover ``i`` (1-based)."""
        return (f"M{i}", f"P{i}")

    def with_q_P(self, q_P):
        return replace(self, q_P=q_P)

    def problems(self):
        out = []
        if self.k < 1:
            out.append(f"k = {self.k} must be at least 1")
        if self.m < 1:
            out.append(f"m = {self.m} must be at least 1")
        for name in ("q_V", "q_M", "q_P", "q_ent"):
            if getattr(self, name) < 0:
                out.append(f"{name} must be non-negative")
        if self.q_ent > self.q_P:
            out.append(f"q_ent = {self.q_ent} exceeds q_P = {self.q_P}")
        if not 0 <= self.output_qubit < self.q_V:
            out.append(f"output qubit {self.output_qubit} is not a verifier qubit (q_V = {self.q_V})")
        return out


def turn_problems(turn, n_qubits, label):
    if isinstance(turn, (list, tuple)):
        return [f"{label}: {p}" for p in gates_mod.gate_problems(turn, n_qubits)]
    mat = np.asarray(turn)
    d = 2 ** n_qubits
    if mat.shape != (d, d):
        return [f"{label}: shape {mat.shape}, expected ({d}, {d})"]
    if not np.all(np.isfinite(mat)) or not linalg.is_unitary(mat, UNITARY_TOL):
        return [f"{label}: not unitary"]
    return []


def turn_matrix(turn, n_qubits):
    if isinstance(turn, (list, tuple)):
        return gates_mod.compile_gates(turn, n_qubits)
    return np.asarray(turn, dtype=complex)


def validate_protocol(spec, verifier, provers, prior=None):
    """Every violated invariant of a protocol and its prior; empty if runnable."""
    problems = spec.problems()
    if problems:
        return problems
    if len(verifier) != spec.verifier_turns:
        problems.append(f"verifier has {len(verifier)} turns, expected {spec.verifier_turns}")
    for j, turn in enumerate(verifier, 1):
        problems += turn_problems(turn, spec.verifier_qubits, f"verifier turn {j}")
    if len(provers) != spec.k:
        problems.append(f"{len(provers)} provers given, expected {spec.k}")
    for i, strategy in enumerate(provers, 1):
        if len(strategy) != spec.prover_turns:
            problems.append(f"prover {i} has {len(strategy)} turns, expected {spec.prover_turns}")
        for j, turn in enumerate(strategy, 1):
            problems += turn_problems(turn, spec.prover_qubits, f"prover {i} turn {j}")
    if prior is not None:
        amps = prior.amplitudes if isinstance(prior, PureState) else np.asarray(prior)
        want = 2 ** (spec.k * spec.q_ent)
        if amps.size != want:
            problems.append(f"prior has {amps.size} amplitudes, expected {want}")
        elif abs(np.linalg.norm(amps) - 1.0) > states.NORM_TOL:
            problems.append("prior is not normalised")
    return problems


def designated_qubits(spec):
    """Global indices of the prior-entangled qubits: the first q_ent of each P_i."""
    layout = spec.layout
    return [q for i in range(1, spec.k + 1) for q in layout.qubits(f"P{i}")[: spec.q_ent]]


def initial_state(spec, prior=None):
    """|init>: the prior on the designated qubits, |0> everywhere else."""
    layout = spec.layout
    linalg.check_dimension(layout.dim)
    amps = np.zeros(layout.dim, dtype=complex)
    if prior is None:
        amps[0] = 1.0
        return PureState(layout, amps)
    prior = prior.amplitudes if isinstance(prior, PureState) else np.asarray(prior, dtype=complex)
    desig = designated_qubits(spec)
    if prior.size != 2 ** len(desig):
        raise ShapeError(f"prior has {prior.size} amplitudes for {len(desig)} designated qubits")
    n = layout.total_qubits
    others = [q for q in range(n) if q not in desig]
    block = np.zeros((2 ** len(desig), 2 ** len(others)), dtype=complex)
    block[:, 0] = prior.reshape(-1)
    t = block.reshape((2,) * n)
    t = np.transpose(t, np.argsort(desig + others))
    return PureState(layout, t.reshape(-1))


def epr_prior(spec):
    """q_ent EPR pairs shared by provers 1 and 2, pairing their t-th designated qubits."""
    if spec.k != 2:
        raise ShapeError("EPR prior is defined for two provers")
    e = spec.q_ent
    amps = np.zeros(2 ** (2 * e), dtype=complex)
    for x in range(2 ** e):
        amps[(x << e) | x] = 1.0
    return amps / np.sqrt(2 ** e)


def schedule(spec):
    """Ordered steps ("V", j) / ("P", j), 0-based, following the message parity."""
    steps = []
    if spec.m % 2 == 0:
        steps.append(("V", 0))
        for j in range(spec.prover_turns):
            steps += [("P", j), ("V", j + 1)]
    else:
        for j in range(spec.prover_turns):
            steps += [("P", j), ("V", j)]
    return steps


def apply_turn(state, turn, registers):
    """Apply a matrix or gate-list turn to the named registers of ``state``."""
    if isinstance(turn, (list, tuple)):
        layout = state.layout
        local = [q for name in registers for q in layout.qubits(name)]
        n = layout.total_qubits
        out = state.amplitudes
        problems = gates_mod.gate_problems(turn, len(local))
        if problems:
            raise gates_mod.GateError("; ".join(problems))
        for g in turn:
            out = gates_mod.apply_on_qubits(out, n, g.operator(), [local[t] for t in g.targets])
        return PureState(layout, out)
    return states.apply_unitary(state, turn, registers)


def protocol_steps(spec, verifier, provers, prior=None, prover_order=None):
    """Yield ``(step, state)`` after every verifier turn and every prover turn.

    A prover step is labelled ("P", j, i) with 1-based prover index i.
    """
    problems = validate_protocol(spec, verifier, provers, prior)
    if problems:
        raise ValidationError(problems)
    order = list(prover_order) if prover_order is not None else list(range(1, spec.k + 1))
    state = initial_state(spec, prior)
    for kind, j in schedule(spec):
        if kind == "V":
            state = apply_turn(state, verifier[j], spec.verifier_registers)
            yield ("V", j), state
        else:
            for i in order:
                state = apply_turn(state, provers[i - 1][j], spec.prover_registers(i))
                yield ("P", j, i), state


def run_protocol(spec, verifier, provers, prior=None, prover_order=None):
    """Final state and acceptance probability of the protocol."""
    final = None
    for _, final in protocol_steps(spec, verifier, provers, prior, prover_order):
        pass
    return final, states.measure_output_qubit(final, spec.output_qubit)


def identity_provers(spec):
    d = 2 ** spec.prover_qubits
    return [[np.eye(d, dtype=complex) for _ in range(spec.prover_turns)] for _ in range(spec.k)]


def identity_verifier(spec):
    d = 2 ** spec.verifier_qubits
    return [np.eye(d, dtype=complex) for _ in range(spec.verifier_turns)]


def random_provers(spec, rng):
    d = 2 ** spec.prover_qubits
    return [[linalg.random_unitary(d, rng) for _ in range(spec.prover_turns)] for _ in range(spec.k)]


def random_verifier(spec, rng):
    d = 2 ** spec.verifier_qubits
    return [linalg.random_unitary(d, rng) for _ in range(spec.verifier_turns)]
