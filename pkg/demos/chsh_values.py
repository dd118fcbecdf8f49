"""Classical and entangled values of CHSH, played through the protocol simulator.

Run with ``python3 demos/chsh_values.py``.
"""
from qmip import games, optimize, protocol

game = games.chsh_game()
value, (f1, f2) = games.classical_value(game, return_strategy=True)
print(f"best deterministic answers {f1} and {f2} win with probability {value}")

# The same strategy, wired into the two-prover quantum protocol, gives the same number.
spec, verifier = games.embed_classical_game(game)
provers = [[games.deterministic_prover(spec, f1)], [games.deterministic_prover(spec, f2)]]
_, acc = protocol.run_protocol(spec, verifier, provers)
print(f"embedded protocol accepts with probability {acc:.12f}")

# Give each prover one half of an EPR pair and let the see-saw search run.
spec, verifier = games.embed_classical_game(game, q_ent=1)
prior = protocol.epr_prior(spec)
res = optimize.optimize_provers(spec, verifier, prior, restarts=8, seed=0)
print(f"with shared entanglement the search reaches {res.value:.12f} "
      f"(cos^2(pi/8) = 0.853553390593)")
print("per-restart values:", ", ".join(f"{v:.6f}" for v in res.restart_values))

verdict = optimize.verify_certificate(spec, verifier, res.certificate(prior), threshold=0.85)
print(f"certificate check against 0.85: accepted={verdict.accepted}")
