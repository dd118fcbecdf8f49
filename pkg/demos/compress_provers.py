"""Shrinking prover memory without changing what the verifier sees.

Run with ``python3 demos/compress_provers.py``.
"""
import numpy as np

from qmip import compression, protocol
from qmip.protocol import ProtocolSpec

rng = np.random.default_rng(7)

# One prover with a generous 4-qubit private register.
spec = ProtocolSpec(k=1, m=3, q_V=1, q_M=1, q_P=4)
verifier = protocol.random_verifier(spec, rng)
prover = protocol.random_provers(spec, rng)[0]

cp = compression.compress_single_prover(spec, verifier, prover)
print(f"single prover: q_P {spec.q_P} -> {cp.q_P}")
print(f"  acceptance before {cp.acceptance_original:.12f}")
print(f"  acceptance after  {cp.acceptance_compressed:.12f}")

# Two provers sharing an EPR pair.  Each is compressed in turn; the
# per-round Schmidt ranks show how little of the private space is used.
spec = ProtocolSpec(k=2, m=2, q_V=1, q_M=1, q_P=4, q_ent=1)
prior = protocol.epr_prior(spec)
verifier = protocol.random_verifier(spec, rng)
provers = protocol.random_provers(spec, rng)

out = compression.compress_all_provers(spec, verifier, provers, prior)
print(f"\ntwo provers: q_P {spec.q_P} -> {out.spec.q_P}")
for i, cp in enumerate(out.compressed, 1):
    print(f"  prover {i}: Schmidt ranks per round {cp.trace.ranks}, "
          f"largest support leak {cp.trace.max_leak():.1e}")
print(f"  acceptance before {out.acceptance_original:.12f}")
print(f"  acceptance after  {out.acceptance_compressed:.12f}")
