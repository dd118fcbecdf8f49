"""Turning a k-prover protocol without prior entanglement into a single-prover
quantum oracle circuit (QOC), and back.

The QOC verifier keeps the original verifier space ``W`` together with every
prover's message and private registers ``M_1..M_k, P_1..P_k`` in its own
private space.  The oracle register is ``M P`` with ``q_M + q_P`` qubits.
Before each oracle call the verifier swaps the current prover's registers into
``M P``; after it, swaps them back out.  Oracle call ``(j-1)k + i`` is turn j
of prover i acting on ``M P`` unchanged.

Provers must first be brought to ``q_P = 2 * ceil(m/2) * q_M`` private qubits
(see :mod:`qmip.compression`); :func:`transform_instance` does this.
"""
from dataclasses import dataclass, field

import numpy as np

from . import compression, gates, protocol
from .errors import ShapeError, UnsupportedTransformError


@dataclass(frozen=True, eq=False)
class OracleCircuitSpec:
    """A QOC produced by :func:`to_oracle_circuit`.

    ``source`` is the protocol after normalisation (even message count,
    compressed private width).  ``turns`` are gate lists over the
    ``q_V_qoc + q_O_qoc`` qubits the QOC verifier touches; ``schedule`` lists
    the same turns as ``("swap", regs_a, regs_b)`` / ``("apply", j)`` segments.
    """

    source: protocol.ProtocolSpec
    oracle_calls: int
    q_V_qoc: int
    q_O_qoc: int
    turns: list
    schedule: list
    registers: dict = field(default_factory=dict)
    prepended_identity: bool = False

    @property
    def protocol_spec(self):
        """The QOC as a one-prover protocol whose prover has no private space."""
        return protocol.ProtocolSpec(
            k=1, m=2 * self.oracle_calls, q_V=self.q_V_qoc, q_M=self.q_O_qoc, q_P=0,
            output_qubit=self.source.output_qubit,
        )


def qoc_register_map(spec):
    """Qubit indices of W, M_i, P_i (private) and M, P (oracle) in a QOC verifier turn."""
    regs = {}
    pos = 0
    for name, size in [("W", spec.q_V)] + \
            [(f"M{i}", spec.q_M) for i in range(1, spec.k + 1)] + \
            [(f"P{i}", spec.q_P) for i in range(1, spec.k + 1)] + \
            [("M", spec.q_M), ("P", spec.q_P)]:
        regs[name] = tuple(range(pos, pos + size))
        pos += size
    return regs


def _swap_gates(regs, a, b):
    qa = [q for name in a for q in regs[name]]
    qb = [q for name in b for q in regs[name]]
    if len(qa) != len(qb):
        raise ShapeError(f"cannot swap {a} ({len(qa)} qubits) with {b} ({len(qb)} qubits)")
    return [gates.swap(x, y) for x, y in zip(qa, qb)]


def _normalise(spec, verifier):
    """Even message count (an identity verifier turn is prepended for odd m) and
    the compressed private width."""
    prepended = spec.m % 2 == 1
    if prepended:
        ident = np.eye(2 ** spec.verifier_qubits, dtype=complex)
        verifier = [ident] + list(verifier)
        spec = protocol.ProtocolSpec(spec.k, spec.m + 1, spec.q_V, spec.q_M, spec.q_P,
                                     spec.q_ent, spec.output_qubit, spec.metadata)
    spec = spec.with_q_P(compression.multi_prover_budget(spec))
    return spec, list(verifier), prepended


def to_oracle_circuit(spec, verifier):
    """Build the QOC verifier for ``spec`` (which must have q_ent = 0)."""
    if spec.q_ent != 0:
        raise UnsupportedTransformError("the oracle-circuit transform needs q_ent = 0")
    if len(verifier) != spec.verifier_turns:
        raise ShapeError(f"verifier has {len(verifier)} turns, expected {spec.verifier_turns}")
    src, verifier, prepended = _normalise(spec, verifier)
    k, rounds = src.k, src.prover_turns
    regs = qoc_register_map(src)
    inner = [q for name in ["W"] + [f"M{i}" for i in range(1, k + 1)] for q in regs[name]]
    mp = ("M", "P")

    def mp_of(i):
        return (f"M{i}", f"P{i}")

    schedule = [[("apply", 0), ("swap", ("M1",), ("M",))]]
    for j in range(rounds):
        if j > 0:
            schedule.append([("swap", mp, mp_of(k)), ("apply", j), ("swap", mp_of(1), mp)])
        for i in range(2, k + 1):
            schedule.append([("swap", mp, mp_of(i - 1)), ("swap", mp_of(i), mp)])
    schedule.append([("swap", mp, mp_of(k)), ("apply", rounds)])

    turns = []
    for segments in schedule:
        turn = []
        for seg in segments:
            if seg[0] == "apply":
                u = protocol.turn_matrix(verifier[seg[1]], src.verifier_qubits)
                turn.append(gates.unitary(u, inner))
            else:
                turn += _swap_gates(regs, seg[1], seg[2])
        turns.append(turn)

    calls = k * rounds
    q_V_qoc = src.q_V + k * (src.q_M + src.q_P)
    return OracleCircuitSpec(
        source=src, oracle_calls=calls, q_V_qoc=q_V_qoc, q_O_qoc=src.q_M + src.q_P,
        turns=turns, schedule=schedule, registers=regs, prepended_identity=prepended,
    )


def oracle_from_provers(provers, k, m):
    """Oracle unitaries in call order: call (j-1)k + i is turn j of prover i."""
    rounds = (m + 1) // 2
    if len(provers) != k or any(len(s) != rounds for s in provers):
        raise ShapeError(f"expected {k} provers with {rounds} turns each")
    shapes = {np.asarray(u).shape for s in provers for u in s}
    if len(shapes) != 1 or any(a != b for a, b in shapes):
        raise ShapeError(f"prover turns have mismatched shapes {sorted(shapes)}")
    return [np.asarray(provers[i][j], dtype=complex) for j in range(rounds) for i in range(k)]


def provers_from_oracle(oracles, k, m):
    """Inverse of :func:`oracle_from_provers`."""
    rounds = (m + 1) // 2
    if len(oracles) != k * rounds:
        raise ShapeError(f"{len(oracles)} oracle unitaries; the schedule needs {k * rounds}")
    return [[np.asarray(oracles[j * k + i], dtype=complex) for j in range(rounds)]
            for i in range(k)]


def run_oracle_circuit(qoc, oracles):
    """Acceptance probability of the QOC with the given oracle unitaries."""
    _, acc = protocol.run_protocol(qoc.protocol_spec, qoc.turns, [list(oracles)])
    return acc


@dataclass(eq=False)
class TransformedInstance:
    qoc: OracleCircuitSpec
    oracles: list
    compressed: bool
    acceptance_source: float
    acceptance_qoc: float


def transform_instance(spec, verifier, provers):
    """Compress the provers if needed, then build the QOC and its oracles."""
    src, verifier_n, prepended = _normalise(spec, verifier)
    provers = [[protocol.turn_matrix(t, spec.prover_qubits) for t in s] for s in provers]
    _, acc = protocol.run_protocol(spec, verifier, provers)
    if prepended:
        # the prepended identity turn leaves every prover turn in place
        spec = protocol.ProtocolSpec(spec.k, spec.m + 1, spec.q_V, spec.q_M, spec.q_P,
                                     spec.q_ent, spec.output_qubit, spec.metadata)
    compressed = spec.q_P != src.q_P
    if compressed:
        provers = compression.compress_all_provers(spec, verifier_n, provers).provers
    qoc = to_oracle_circuit(src, verifier_n)
    oracles = oracle_from_provers(provers, src.k, src.m)
    return TransformedInstance(qoc, oracles, compressed, acc, run_oracle_circuit(qoc, oracles))
