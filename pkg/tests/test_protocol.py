import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmip import gates, linalg, protocol, states
from qmip.errors import GateError, ShapeError, ValidationError
from qmip.protocol import ProtocolSpec

X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_spec_counts():
    for m, vt, pt in [(1, 1, 1), (2, 2, 1), (3, 2, 2), (4, 3, 2)]:
        spec = ProtocolSpec(2, m, 1, 1, 2)
        assert (spec.verifier_turns, spec.prover_turns) == (vt, pt)
    spec = ProtocolSpec(3, 2, 2, 1, 2)
    assert spec.total_qubits == 2 + 3 * (1 + 2) == spec.layout.total_qubits
    assert spec.layout.names == ("V", "M1", "M2", "M3", "P1", "P2", "P3")


def test_schedule_parity():
    assert protocol.schedule(ProtocolSpec(1, 1, 1, 1, 1)) == [("P", 0), ("V", 0)]
    assert protocol.schedule(ProtocolSpec(1, 4, 1, 1, 1)) == [
        ("V", 0), ("P", 0), ("V", 1), ("P", 1), ("V", 2)]


def test_validate_examples():
    spec = ProtocolSpec(1, 2, 1, 1, 1)
    v, p = protocol.identity_verifier(spec), protocol.identity_provers(spec)
    assert protocol.validate_protocol(spec, v, p) == []
    bad = [[np.eye(8)]]
    problems = protocol.validate_protocol(spec, v, bad)
    assert len(problems) == 1 and "shape" in problems[0]
    v2 = [np.diag([1, 2, 1, 1]).astype(complex), v[1]]
    problems = protocol.validate_protocol(spec, v2, p)
    assert len(problems) == 1 and "unitary" in problems[0]
    assert protocol.validate_protocol(ProtocolSpec(1, 2, 1, 1, 1, q_ent=2), v, p)


def test_compile_gates_examples():
    assert np.array_equal(gates.compile_gates([], 2), np.eye(4))
    hh = gates.compile_gates([gates.hadamard(1), gates.hadamard(1)], 2)
    assert np.allclose(hh, np.eye(4), atol=1e-12)
    z4 = gates.compile_gates([gates.sqrt_z(0)] * 4, 1)
    assert np.allclose(z4, np.eye(2), atol=1e-12)
    h0 = gates.compile_gates([gates.hadamard(0)], 2)
    assert np.allclose(h0, np.kron(gates.HADAMARD, np.eye(2)))
    tof = gates.compile_gates([gates.toffoli(2, 0, 1)], 3)
    for i in range(8):
        a, b, c = (i >> 2) & 1, (i >> 1) & 1, i & 1
        j = (a << 2) | ((b ^ (a & c)) << 1) | c
        assert tof[j, i] == 1


def test_compile_gates_errors():
    with pytest.raises(GateError):
        gates.compile_gates([gates.toffoli(0, 0, 1)], 2)
    with pytest.raises(GateError):
        gates.compile_gates([gates.hadamard(3)], 2)
    with pytest.raises(GateError):
        gates.compile_gates([gates.Gate("cnot", (0, 1))], 2)


def test_initial_state_examples(rng):
    spec = ProtocolSpec(2, 2, 1, 1, 2)
    init = protocol.initial_state(spec)
    assert init.amplitudes[0] == 1
    spec = ProtocolSpec(2, 2, 1, 1, 1, q_ent=1)
    init = protocol.initial_state(spec, protocol.epr_prior(spec))
    for name in ("P1", "P2"):
        assert np.allclose(states.partial_trace(init, [name]).matrix, np.eye(2) / 2)
    spec = ProtocolSpec(2, 2, 1, 1, 2, q_ent=1)
    prior = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    init = protocol.initial_state(spec, prior / np.linalg.norm(prior))
    rest = states.partial_trace(init, ["V", "M1", "M2"]).matrix
    expect = np.zeros_like(rest)
    expect[0, 0] = 1
    assert np.max(np.abs(rest - expect)) < 1e-12
    # designated qubits are the first of each P register
    t = init.tensor()[0, 0, 0]
    assert np.allclose(t[1::2, :], 0) and np.allclose(t[:, 1::2], 0)
    with pytest.raises(ShapeError):
        protocol.initial_state(spec, np.ones(8) / np.sqrt(8))


def test_run_protocol_examples(rng):
    spec = ProtocolSpec(1, 2, 1, 1, 1)
    v, p = protocol.identity_verifier(spec), protocol.identity_provers(spec)
    assert protocol.run_protocol(spec, v, p)[1] == 0.0
    flip = [np.kron(X, np.eye(2)), v[1]]
    assert protocol.run_protocol(spec, flip, p)[1] == 1.0

    spec = ProtocolSpec(2, 2, 1, 1, 1)
    v, p = protocol.random_verifier(spec, rng), protocol.random_provers(spec, rng)
    final, acc = protocol.run_protocol(spec, v, p)
    # raw chain on V M1 M2 P1 P2: move P_{i,1} onto (M_i, P_i) by permutation
    perm = {1: [1, 3], 2: [2, 4]}

    def lift(u, qubits):
        return gates.compile_gates([gates.unitary(u, qubits)], 5)

    init = np.zeros(32, dtype=complex)
    init[0] = 1
    raw = (np.kron(v[1], np.eye(4)) @ lift(p[1][0], perm[2]) @ lift(p[0][0], perm[1])
           @ np.kron(v[0], np.eye(4)) @ init)
    assert np.allclose(final.amplitudes, raw, atol=1e-12)
    assert acc == pytest.approx(np.sum(np.abs(raw[16:]) ** 2), abs=1e-12)


def test_run_protocol_rejects_invalid():
    spec = ProtocolSpec(1, 2, 1, 1, 1)
    with pytest.raises(ValidationError):
        protocol.run_protocol(spec, [np.eye(4)], protocol.identity_provers(spec))


def test_gate_list_turns_match_matrices(rng):
    spec = ProtocolSpec(1, 2, 2, 1, 2)
    v_gates = [[gates.hadamard(0), gates.toffoli(0, 2, 1)], [gates.sqrt_z(1), gates.hadamard(2)]]
    p_gates = [[[gates.hadamard(1), gates.unitary(linalg.random_unitary(4, rng), (2, 0))]]]
    v_mats = [gates.compile_gates(t, 3) for t in v_gates]
    p_mats = [[gates.compile_gates(t, 3) for t in p_gates[0]]]
    a = protocol.run_protocol(spec, v_gates, p_gates)[0].amplitudes
    b = protocol.run_protocol(spec, v_mats, p_mats)[0].amplitudes
    assert np.allclose(a, b, atol=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4), st.integers(1, 3))
def test_norm_order_and_reproducibility(seed, m, k):
    rng = np.random.default_rng(seed)
    spec = ProtocolSpec(k, m, 1, 1, 1)
    v, p = protocol.random_verifier(spec, rng), protocol.random_provers(spec, rng)
    for _, s in protocol.protocol_steps(spec, v, p):
        assert abs(s.norm - 1) < 1e-9
    base, acc = protocol.run_protocol(spec, v, p)
    assert 0 <= acc <= 1
    for order in itertools.permutations(range(1, k + 1)):
        other, acc2 = protocol.run_protocol(spec, v, p, prover_order=order)
        assert np.max(np.abs(other.amplitudes - base.amplitudes)) < 1e-12
    assert protocol.run_protocol(spec, v, p)[1] == acc
