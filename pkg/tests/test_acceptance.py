"""Acceptance criteria, one check per criterion.

Each ``criterion_N`` returns ``(passed, detail)``.  Under pytest every check
prints one ``criterion N: PASS|FAIL ...`` line (visible without ``-s``) and
then asserts.  ``python3 tests/test_acceptance.py`` prints the same lines.
"""
import itertools
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from golden_cases import CASES, FIXTURES, GOLDEN, render, run_case  # noqa: E402
from qmip import (compression, games, io, linalg, optimize, protocol, states,  # noqa: E402
                  transforms)
from qmip.protocol import ProtocolSpec  # noqa: E402
from qmip.states import DensityMatrix, PureState, RegisterLayout  # noqa: E402

MAX_QUBITS = 16


def criterion_1():
    """Single-prover compression on 100 seeded instances."""
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    worst, budget_ok = 0.0, True
    for _ in range(100):
        spec = ProtocolSpec(1, int(rng.choice([1, 2, 3])), int(rng.integers(1, 3)),
                            int(rng.integers(1, 3)), int(rng.choice([3, 4])))
        v, p = protocol.random_verifier(spec, rng), protocol.random_provers(spec, rng)
        cp = compression.compress_single_prover(spec, v, p[0])
        _, acc = protocol.run_protocol(spec.with_q_P(cp.q_P), v, [cp.strategy])
        worst = max(worst, abs(acc - protocol.run_protocol(spec, v, p)[1]))
        budget_ok &= cp.q_P == spec.q_V + spec.q_M
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and budget_ok and elapsed < 60
    return ok, f"max |delta acc| {worst:.2e}, budgets exact {budget_ok}, {elapsed:.1f}s"


def criterion_2():
    """Multi-prover compression on 200 seeded instances."""
    rng = np.random.default_rng(1002)
    start = time.perf_counter()
    worst, worst_leak, budget_ok = 0.0, 0.0, True
    done = nontrivial = rejected = 0
    while done < 200:
        m, q_ent = int(rng.choice([2, 3, 4])), int(rng.integers(0, 2))
        q_V, q_M = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        q_P = int(rng.integers(max(q_ent, 1), 5))
        spec = ProtocolSpec(2, m, q_V, q_M, q_P, q_ent=q_ent)
        budget = compression.multi_prover_budget(spec)
        # compressed layouts beyond the desk-scale cap are skipped, not shrunk
        if q_V + 2 * (q_M + max(budget, q_P)) > MAX_QUBITS:
            rejected += 1
            continue
        prior = protocol.epr_prior(spec) if q_ent else None
        v, p = protocol.random_verifier(spec, rng), protocol.random_provers(spec, rng)
        out = compression.compress_all_provers(spec, v, p, prior)
        _, acc = protocol.run_protocol(out.spec, v, out.provers, prior)
        worst = max(worst, abs(acc - protocol.run_protocol(spec, v, p, prior)[1]))
        budget_ok &= out.spec.q_P == q_ent + 2 * ((m + 1) // 2) * q_M
        for cp in out.compressed:
            worst_leak = max(worst_leak, cp.trace.max_leak())
            nontrivial += not cp.trivial
        done += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and budget_ok and worst_leak <= 1e-9 and elapsed < 600
    return ok, (f"max |delta acc| {worst:.2e}, max support leak {worst_leak:.2e}, budgets exact "
                f"{budget_ok}, {nontrivial} nontrivial prover compressions, "
                f"{rejected} draws over {MAX_QUBITS} qubits skipped, {elapsed:.1f}s")


def _low_rank_state(layout, left, rank, rng):
    d_left = layout.subdim(left)
    d_right = layout.dim // d_left
    a = rng.standard_normal((d_left, rank)) + 1j * rng.standard_normal((d_left, rank))
    b = rng.standard_normal((rank, d_right)) + 1j * rng.standard_normal((rank, d_right))
    m = a @ b
    return PureState(layout, states.ungroup(m / np.linalg.norm(m), layout, left))


def criterion_3():
    """Rank growth bound under a unitary on parts 2 and 3, 500 instances."""
    rng = np.random.default_rng(1003)
    violations = 0
    for _ in range(500):
        n1, n2, n3 = int(rng.integers(1, 3)), int(rng.integers(0, 2)), int(rng.integers(1, 3))
        lay = RegisterLayout.of(("H1", n1), ("H2", n2), ("H3", n3))
        r = int(rng.integers(1, min(2 ** n3, 2 ** (n1 + n2)) + 1))
        phi = _low_rank_state(lay, ["H3"], r, rng)
        r_in = states.ent2(phi, ["H3"])
        u = linalg.random_unitary(2 ** (n2 + n3), rng)
        out = states.apply_unitary(phi, u, ["H2", "H3"])
        if states.ent2(out, ["H3"]) > r_in * (2 ** n2) ** 2:
            violations += 1
    return violations == 0, f"{violations} violations in 500 instances"


def criterion_4():
    """Uhlmann plant-and-recover (500) and purification round trips (200)."""
    rng = np.random.default_rng(1004)
    worst_u, worst_unitary = 0.0, 0.0
    for n in range(500):
        n1, n2 = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        lay = RegisterLayout.of(("A", n1), ("B", n2))
        kind = n % 3
        if kind == 0:
            phi = states.random_state(lay, rng)
        elif kind == 1:
            # maximally entangled or flat-spectrum: fully degenerate marginal
            r = min(2 ** n1, 2 ** n2)
            m = np.zeros((2 ** n1, 2 ** n2), dtype=complex)
            m[np.arange(r), np.arange(r)] = 1 / np.sqrt(r)
            w = linalg.random_unitary(2 ** n1, rng)
            phi = PureState(lay, (w @ m).reshape(-1))
        else:
            rank = int(rng.integers(1, min(2 ** n1, 2 ** n2) + 1))
            phi = _low_rank_state(lay, ["A"], rank, rng)
        psi = states.apply_unitary(phi, linalg.random_unitary(2 ** n2, rng), ["B"])
        u = states.uhlmann_unitary(phi, psi, ["B"])
        worst_unitary = max(worst_unitary, np.max(np.abs(u @ u.conj().T - np.eye(len(u)))))
        err = np.linalg.norm(states.apply_unitary(phi, u, ["B"]).amplitudes - psi.amplitudes)
        worst_u = max(worst_u, err)
    worst_p = 0.0
    for n in range(200):
        q = int(rng.integers(1, 4))
        d = 2 ** q
        rank = int(rng.integers(1, d + 1))
        g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        lay = RegisterLayout.of(("S", q))
        back = states.partial_trace(states.purify(DensityMatrix(lay, rho), "E"), ["S"]).matrix
        worst_p = max(worst_p, np.max(np.abs(back - rho)))
    ok = worst_u <= 1e-8 and worst_unitary <= 1e-10 and worst_p <= 1e-9
    return ok, (f"Uhlmann max error {worst_u:.2e} (unitarity {worst_unitary:.2e}), "
                f"purify max error {worst_p:.2e}")


def criterion_5():
    """QMIP <-> QOC acceptance equality on 100 k=2, m=2 instances."""
    rng = np.random.default_rng(1005)
    k, m = 2, 2
    worst, structure_ok = 0.0, True
    for _ in range(100):
        q_V, q_M = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        spec = ProtocolSpec(k, m, q_V, q_M, m * q_M)
        v = protocol.random_verifier(spec, rng)
        qoc = transforms.to_oracle_circuit(spec, v)
        structure_ok &= qoc.q_V_qoc == q_V + k * (m + 1) * q_M
        structure_ok &= qoc.q_O_qoc == (m + 1) * q_M
        structure_ok &= qoc.protocol_spec.total_qubits == qoc.q_V_qoc + qoc.q_O_qoc
        structure_ok &= sum(len(q) for q in qoc.registers.values()) == qoc.q_V_qoc + qoc.q_O_qoc
        p = protocol.random_provers(spec, rng)
        a = transforms.run_oracle_circuit(qoc, transforms.oracle_from_provers(p, k, m))
        worst = max(worst, abs(a - protocol.run_protocol(spec, v, p)[1]))
        oracles = [linalg.random_unitary(2 ** qoc.q_O_qoc, rng) for _ in range(qoc.oracle_calls)]
        back = transforms.provers_from_oracle(oracles, k, m)
        a = transforms.run_oracle_circuit(qoc, oracles)
        worst = max(worst, abs(a - protocol.run_protocol(spec, v, back)[1]))
    return worst <= 1e-9 and structure_ok, (
        f"max |QMIP - QOC| {worst:.2e} over both directions, register formulas {structure_ok}")


def _permutations(d):
    for perm in itertools.permutations(range(d)):
        u = np.zeros((d, d), dtype=complex)
        u[list(perm), np.arange(d)] = 1.0
        yield u


def criterion_6():
    """CHSH: classical value, deterministic provers, entangled see-saw."""
    start = time.perf_counter()
    game = games.chsh_game()
    value = games.classical_value(game)
    spec, v = games.embed_classical_game(game)
    worst, pairs = 0.0, 0
    for f1, f2 in itertools.product(itertools.product(range(2), repeat=2), repeat=2):
        provers = [[games.deterministic_prover(spec, f1)], [games.deterministic_prover(spec, f2)]]
        acc = protocol.run_protocol(spec, v, provers)[1]
        worst = max(worst, abs(acc - game.strategy_value(f1, f2)))
        pairs += 1
    # every basis permutation of M (x) P is a deterministic prover too
    perms = list(_permutations(2 ** spec.prover_qubits))
    for u1, u2 in itertools.product(perms, repeat=2):
        f1, f2 = games.induced_answers(spec, u1, 2), games.induced_answers(spec, u2, 2)
        acc = protocol.run_protocol(spec, v, [[u1], [u2]])[1]
        worst = max(worst, abs(acc - game.strategy_value(f1, f2)))
        pairs += 1
    spec_e, v_e = games.embed_classical_game(game, q_ent=1)
    res = optimize.optimize_provers(spec_e, v_e, protocol.epr_prior(spec_e), restarts=8, seed=0)
    elapsed = time.perf_counter() - start
    ok = value == 0.75 and worst <= 1e-10 and res.value >= 0.85 and elapsed < 120
    return ok, (f"classical value {value}, {pairs} deterministic pairs max deviation {worst:.1e}, "
                f"entangled see-saw value {res.value:.6f}, {elapsed:.1f}s")


def _fixture_protocols():
    for name in sorted(os.listdir(FIXTURES)):
        if name in ("bad.json", "identity_cert.json", "chsh_game.json"):
            continue
        yield name, io.read_protocol(os.path.join(FIXTURES, name))


def criterion_7():
    """Certificate verification equals simulation; 1e-6 perturbations move it by <= 1e-4."""
    bitwise = True
    count = 0
    for _, proto in _fixture_protocols():
        cert = optimize.Certificate(proto.provers, proto.prior)
        verdict = optimize.verify_certificate(proto.spec, proto.verifier, cert, 0.5)
        bitwise &= verdict.value == protocol.run_protocol(*proto)[1]
        count += 1
    rng = np.random.default_rng(1007)
    worst = 0.0
    delta = 1e-6
    for name in ("random_k1.json", "random_k2.json", "random_epr.json"):
        proto = io.read_protocol(os.path.join(FIXTURES, name))
        base = protocol.run_protocol(*proto)[1]
        for _ in range(5):
            moved = []
            for strategy in proto.provers:
                turns = []
                for u in strategy:
                    h = linalg.random_hermitian(len(u), rng)
                    w, vec = np.linalg.eigh(h / linalg.operator_norm(h))
                    turns.append((vec * np.exp(1j * delta * w)) @ vec.conj().T @ u)
                moved.append(turns)
            cert = optimize.Certificate(moved, proto.prior)
            value = optimize.verify_certificate(proto.spec, proto.verifier, cert, 0.5).value
            worst = max(worst, abs(value - base))
    return bitwise and worst <= 1e-4, (
        f"bit-for-bit on {count} fixtures {bitwise}, max shift under 1e-6 perturbation {worst:.2e}")


def criterion_8():
    """CLI golden files, byte-equal across two runs."""
    mismatched = []
    for name, argv in sorted(CASES.items()):
        with open(os.path.join(GOLDEN, name + ".txt"), encoding="utf-8") as fh:
            expected = fh.read()
        runs = [render(*run_case(argv)) for _ in range(2)]
        if runs[0] != expected or runs[1] != expected:
            mismatched.append(name)
    return not mismatched, (f"{len(CASES) - len(mismatched)}/{len(CASES)} golden files byte-equal "
                            f"on two runs (this platform only)" +
                            (f"; mismatched: {mismatched}" if mismatched else ""))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


def _line(n, ok, detail):
    return f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("n", range(1, len(CRITERIA) + 1))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, check in enumerate(CRITERIA, 1):
        ok, detail = check()
        print(_line(n, ok, detail), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
