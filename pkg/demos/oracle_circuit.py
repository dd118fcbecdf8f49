"""Rewriting a two-prover protocol as a circuit with oracle calls.

Run with ``python3 demos/oracle_circuit.py``.
"""
import numpy as np

from qmip import protocol, transforms
from qmip.protocol import ProtocolSpec

rng = np.random.default_rng(3)
spec = ProtocolSpec(k=2, m=2, q_V=1, q_M=1, q_P=4)
verifier = protocol.random_verifier(spec, rng)
provers = protocol.random_provers(spec, rng)

# Provers are compressed first so every oracle call acts on the same width.
inst = transforms.transform_instance(spec, verifier, provers)
qoc = inst.qoc
print(f"oracle calls {qoc.oracle_calls}, circuit qubits {qoc.q_V_qoc}, oracle qubits {qoc.q_O_qoc}")
for name, qubits in qoc.registers.items():
    print(f"  {name:>3}: qubits {qubits[0]}..{qubits[-1]}" if qubits else f"  {name:>3}: empty")
print(f"acceptance as a protocol       {inst.acceptance_source:.12f}")
print(f"acceptance as an oracle circuit {inst.acceptance_qoc:.12f}")

# Any list of oracles also reads back as a prover strategy with the same acceptance.
d = 2 ** qoc.q_O_qoc
oracles = [np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))[0]
           for _ in range(qoc.oracle_calls)]
back = transforms.provers_from_oracle(oracles, spec.k, spec.m)
_, acc = protocol.run_protocol(qoc.source, verifier, back)
print(f"random oracles: circuit {transforms.run_oracle_circuit(qoc, oracles):.12f}, "
      f"protocol {acc:.12f}")
