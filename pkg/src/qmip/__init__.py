"""Simulation and constructive transforms for multi-prover quantum interactive proofs."""
from . import compression, errors, games, gates, io, linalg, optimize, protocol, states, transforms
from .compression import (compress_all_provers, compress_prover, compress_single_prover,
                          verify_equivalence)
from .games import ClassicalTwoProverGame, chsh_game, classical_value, embed_classical_game
from .optimize import Certificate, best_response, optimize_provers, verify_certificate
from .protocol import ProtocolSpec, epr_prior, run_protocol, validate_protocol
from .states import (DensityMatrix, PureState, RegisterLayout, ent2, ent3_upper_bound,
                     partial_trace, purify, schmidt_decompose, uhlmann_unitary)
from .transforms import (oracle_from_provers, provers_from_oracle, run_oracle_circuit,
                         to_oracle_circuit)

__version__ = "0.1.0"
