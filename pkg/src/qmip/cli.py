"""``qmip`` command line.

Exit codes: 0 ok, 1 numerical failure, 2 input error, 3 capacity or dimension
cap exceeded, 4 certificate rejected.
"""
import argparse
import json
import sys

import numpy as np

from . import compression, games, io, optimize, protocol, states, transforms
from .errors import (AddressingError, CapacityError, ContractError, CutError, DimensionLimitError,
                     GateError, NumericError, ShapeError, UnsupportedTransformError,
                     ValidationError)

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT, EXIT_CAPACITY, EXIT_REJECT = 0, 1, 2, 3, 4


def fmt(x):
    """Fixed 12-decimal rendering; rounding residue never prints as -0."""
    s = f"{float(x):.12f}"
    return s[1:] if s.startswith("-") and float(s) == 0.0 else s


def num(x):
    return float(fmt(x))


def _emit(args, lines, payload):
    if args.json:
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        print("\n".join(lines))


def _step_label(step):
    if step[0] == "V":
        return f"V{step[1] + 1}"
    return f"P{step[2]}.{step[1] + 1}"


def cmd_simulate(args):
    proto = io.read_protocol(args.protocol)
    prior = io.read_state(args.prior) if args.prior else proto.prior
    rounds = []
    final = None
    for step, final in protocol.protocol_steps(proto.spec, proto.verifier, proto.provers, prior):
        rounds.append({"step": _step_label(step), "norm": num(final.norm),
                       "p_out": num(states.measure_output_qubit(final, proto.spec.output_qubit))})
    acc = states.measure_output_qubit(final, proto.spec.output_qubit)
    lines = [f"acceptance: {fmt(acc)}"]
    lines += [f"step {r['step']}: norm {fmt(r['norm'])} p_out {fmt(r['p_out'])}" for r in rounds]
    _emit(args, lines, {"acceptance": num(acc), "rounds": rounds})
    return EXIT_OK


def _trace_doc(cp):
    return {
        "prover": cp.prover, "old_q_P": cp.original_q_P, "new_q_P": cp.q_P, "trivial": cp.trivial,
        "rounds": [{"round": r.round, "rank": r.rank, "phi_budget": r.phi_budget,
                    "psi_budget": r.psi_budget, "phi_leak": num(r.phi_leak),
                    "psi_leak": num(r.psi_leak), "reduced_gap": num(r.reduced_gap),
                    "realignment_gap": num(r.realignment_gap)} for r in cp.trace.rounds],
    }


def cmd_compress(args):
    proto = io.read_protocol(args.protocol)
    spec = proto.spec
    if spec.k == 1 and spec.q_ent == 0:
        cp = compression.compress_single_prover(spec, proto.verifier, proto.provers[0])
        results, new_spec, new_provers = [cp], spec.with_q_P(cp.q_P), [cp.strategy]
        acc, acc_new, method = cp.acceptance_original, cp.acceptance_compressed, "single-prover"
    elif args.prover == "all":
        out = compression.compress_all_provers(spec, proto.verifier, proto.provers, proto.prior)
        results, new_spec, new_provers = out.compressed, out.spec, out.provers
        acc, acc_new, method = out.acceptance_original, out.acceptance_compressed, "multi-prover"
    else:
        i = int(args.prover)
        cp = compression.compress_prover(spec, proto.verifier, proto.provers, i, proto.prior)
        new_provers = list(proto.provers)
        if not cp.trivial:
            new_provers[i - 1] = cp.embedded()
        results, new_spec = [cp], spec
        acc, acc_new, method = cp.acceptance_original, cp.acceptance_compressed, "multi-prover"
    delta = abs(acc_new - acc)
    budget = results[0].q_P
    if args.out:
        io.write_protocol(args.out, new_spec, proto.verifier, new_provers, proto.prior)
    traces = [_trace_doc(cp) for cp in results]
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump({"method": method, "provers": traces}, fh, indent=1, sort_keys=True)
            fh.write("\n")
    lines = [f"method: {method}", f"old q_P: {spec.q_P}", f"new q_P: {budget}"]
    lines += [f"prover {t['prover']} ranks: "
              + (" ".join(str(r["rank"]) for r in t["rounds"]) or "none (padded)")
              for t in traces]
    lines += [f"acceptance original: {fmt(acc)}", f"acceptance compressed: {fmt(acc_new)}",
              f"acceptance delta: {fmt(delta)}"]
    _emit(args, lines, {"method": method, "old_q_P": spec.q_P, "new_q_P": budget,
                        "ranks": {str(t["prover"]): [r["rank"] for r in t["rounds"]] for t in traces},
                        "acceptance_original": num(acc), "acceptance_compressed": num(acc_new),
                        "acceptance_delta": num(delta)})
    return EXIT_OK


def cmd_to_qoc(args):
    proto = io.read_protocol(args.protocol)
    inst = transforms.transform_instance(proto.spec, proto.verifier, proto.provers)
    qoc = inst.qoc
    if args.out:
        io.write_protocol(args.out, qoc.protocol_spec, qoc.turns, [inst.oracles])
    lines = [f"oracle calls: {qoc.oracle_calls}", f"q_V_qoc: {qoc.q_V_qoc}",
             f"q_O_qoc: {qoc.q_O_qoc}", f"provers compressed first: {'yes' if inst.compressed else 'no'}",
             f"acceptance source: {fmt(inst.acceptance_source)}",
             f"acceptance qoc: {fmt(inst.acceptance_qoc)}"]
    _emit(args, lines, {"oracle_calls": qoc.oracle_calls, "q_V_qoc": qoc.q_V_qoc,
                        "q_O_qoc": qoc.q_O_qoc, "compressed": inst.compressed,
                        "acceptance_source": num(inst.acceptance_source),
                        "acceptance_qoc": num(inst.acceptance_qoc)})
    return EXIT_OK


def cmd_embed(args):
    game = io.read_game(args.game)
    value, (f1, f2) = games.classical_value(game, return_strategy=True)
    spec, verifier = games.embed_classical_game(game, args.q_ent)
    provers = [[games.deterministic_prover(spec, f1)], [games.deterministic_prover(spec, f2)]]
    prior = protocol.epr_prior(spec) if args.q_ent else None
    _, acc = protocol.run_protocol(spec, verifier, provers, prior)
    if args.out:
        io.write_protocol(args.out, spec, verifier, provers, prior)
    lines = [f"q_V: {spec.q_V}", f"q_M: {spec.q_M}", f"q_P: {spec.q_P}", f"q_ent: {spec.q_ent}",
             f"prior: {'epr' if prior is not None else 'none'}",
             f"classical value: {fmt(value)}", f"embedded acceptance: {fmt(acc)}"]
    _emit(args, lines, {"q_V": spec.q_V, "q_M": spec.q_M, "q_P": spec.q_P, "q_ent": spec.q_ent,
                        "prior": "epr" if prior is not None else None,
                        "classical_value": num(value), "embedded_acceptance": num(acc)})
    return EXIT_OK


def cmd_optimize(args):
    proto = io.read_protocol(args.protocol)
    res = optimize.optimize_provers(proto.spec, proto.verifier, proto.prior, restarts=args.restarts,
                                    sweeps=args.sweeps, seed=args.seed)
    if args.out:
        io.write_certificate(args.out, res.certificate(proto.prior))
    lines = [f"value: {fmt(res.value)}", f"converged: {'yes' if res.converged else 'no'}",
             f"restarts: {res.restarts}", f"sweeps: {len(res.trajectory) - 1}",
             "restart values: " + " ".join(fmt(v) for v in res.restart_values)]
    _emit(args, lines, {"value": num(res.value), "converged": res.converged,
                        "restarts": res.restarts, "trajectory": [num(v) for v in res.trajectory],
                        "restart_values": [num(v) for v in res.restart_values]})
    return EXIT_OK


def cmd_verify(args):
    proto = io.read_protocol(args.protocol)
    cert = io.read_certificate(args.certificate)
    if cert.prior is None:
        cert.prior = proto.prior
    verdict = optimize.verify_certificate(proto.spec, proto.verifier, cert, args.threshold, args.eps)
    value = None if np.isnan(verdict.value) else num(verdict.value)
    lines = [f"verdict: {'accept' if verdict.accepted else 'reject'}",
             f"value: {fmt(verdict.value) if value is not None else 'n/a'}"]
    if verdict.reason:
        lines.append(f"reason: {verdict.reason}")
    _emit(args, lines, {"accepted": verdict.accepted, "value": value, "reason": verdict.reason})
    return EXIT_OK if verdict.accepted else EXIT_REJECT


def _names(text):
    return [n.strip() for n in text.split(",") if n.strip()]


def cmd_entanglement(args):
    proto = io.read_protocol(args.protocol)
    layout = proto.spec.layout
    if args.state:
        state = states.PureState(layout, io.read_state(args.state))
    else:
        state, _ = protocol.run_protocol(proto.spec, proto.verifier, proto.provers, proto.prior)
    cut = _names(args.cut)
    if args.parts:
        parts = [_names(p) for p in args.parts.split(";")]
    else:
        rest = list(layout.complement(cut))
        middle = [n for n in rest if n.startswith("P")] or rest[:1]
        parts = [cut, middle, [n for n in rest if n not in middle]]
    e2 = states.ent2(state, cut)
    e3 = states.ent3_upper_bound(state, parts) if all(parts) else None
    lines = [f"ent2: {e2}", f"ent3_upper_bound: {e3 if e3 is not None else 'n/a'}",
             "parts: " + " | ".join(",".join(p) for p in parts)]
    _emit(args, lines, {"ent2": e2, "ent3_upper_bound": e3, "cut": cut, "parts": parts})
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="qmip", description="Multi-prover quantum protocol toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.set_defaults(func=func)
        return p

    p = add("simulate", cmd_simulate, "run a protocol and report acceptance")
    p.add_argument("protocol")
    p.add_argument("--prior", help="state file overriding the protocol's prior")

    p = add("compress", cmd_compress, "shrink prover private registers")
    p.add_argument("protocol")
    p.add_argument("--prover", default="all", help="prover index (1-based) or 'all'")
    p.add_argument("--out", help="write the compressed protocol here")
    p.add_argument("--trace", help="write a per-round trace here")

    p = add("to-qoc", cmd_to_qoc, "transform to a single-prover oracle circuit")
    p.add_argument("protocol")
    p.add_argument("--out", help="write the oracle circuit as a protocol file")

    p = add("embed", cmd_embed, "embed a classical two-prover game")
    p.add_argument("game")
    p.add_argument("--q-ent", type=int, default=0, help="EPR pairs shared by the provers")
    p.add_argument("--out", help="write the embedded protocol here")

    p = add("optimize", cmd_optimize, "see-saw search for good prover strategies")
    p.add_argument("protocol")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--sweeps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the best strategy as a certificate")

    p = add("verify", cmd_verify, "check a certificate against a threshold")
    p.add_argument("protocol")
    p.add_argument("certificate")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=1e-9)

    p = add("entanglement", cmd_entanglement, "entanglement measures of a state")
    p.add_argument("protocol")
    p.add_argument("--state", help="state file on the protocol's registers (default: final state)")
    p.add_argument("--cut", required=True, help="comma-separated registers on one side")
    p.add_argument("--parts", help="three ';'-separated register groups for the tripartite bound")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INPUT
    except (DimensionLimitError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ContractError, ShapeError, GateError, CutError, AddressingError,
            UnsupportedTransformError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
