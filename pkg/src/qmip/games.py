"""Classical one-round two-prover games and their embedding as quantum protocols.

The embedded verifier's private register is laid out as
``out | tape | Q1 | Q2 | A1 | A2`` (``out`` is the output qubit).  Turn 1 maps
|0> to ``sum sqrt(p(v,q1,q2)) |0,v,q1,q2,0,0>|q1>_M1|q2>_M2``; turn 2 copies
the answers from ``M1, M2`` into ``A1, A2`` and XORs the accept predicate into
``out``.  Both turns are explicit permutation / reflection matrices.
"""
from dataclasses import dataclass
from itertools import product
from math import ceil, log2

import numpy as np

from . import protocol
from .errors import CapacityError, ContractError

PROB_TOL = 1e-12
EXHAUSTIVE_LIMIT = 2 ** 16


def _bits(n):
    return ceil(log2(n)) if n > 1 else 0


@dataclass(frozen=True, eq=False)
class ClassicalTwoProverGame:
    """Questions and answers are label lists shared by both provers.

    ``distribution`` maps index triples ``(v, q1, q2)`` to probabilities;
    ``accepting`` is the set of index tuples ``(v, q1, q2, a1, a2)`` the
    verifier accepts.
    """

    questions: tuple
    answers: tuple
    distribution: dict
    accepting: frozenset

    def __post_init__(self):
        object.__setattr__(self, "questions", tuple(self.questions))
        object.__setattr__(self, "answers", tuple(self.answers))
        object.__setattr__(self, "distribution", dict(self.distribution))
        object.__setattr__(self, "accepting", frozenset(tuple(r) for r in self.accepting))
        problems = self.problems()
        if problems:
            raise ContractError("; ".join(problems))

    @classmethod
    def from_predicate(cls, questions, answers, distribution, accept):
        nq, na = len(questions), len(answers)
        tapes = {v for v, _, _ in distribution}
        rows = [(v, q1, q2, a1, a2)
                for v in sorted(tapes) for q1 in range(nq) for q2 in range(nq)
                for a1 in range(na) for a2 in range(na) if accept(v, q1, q2, a1, a2)]
        return cls(questions, answers, distribution, rows)

    def problems(self):
        out = []
        nq, na = len(self.questions), len(self.answers)
        if nq == 0 or na == 0:
            out.append("question and answer alphabets must be non-empty")
        total = 0.0
        for (v, q1, q2), p in self.distribution.items():
            if p < 0:
                out.append(f"negative probability {p} at {(v, q1, q2)}")
            if v < 0 or not (0 <= q1 < nq and 0 <= q2 < nq):
                out.append(f"distribution entry {(v, q1, q2)} outside the alphabets")
            total += p
        if abs(total - 1.0) > PROB_TOL:
            out.append(f"probabilities sum to {total!r}, not 1")
        for v, q1, q2, a1, a2 in self.accepting:
            if not (0 <= q1 < nq and 0 <= q2 < nq and 0 <= a1 < na and 0 <= a2 < na) or v < 0:
                out.append(f"accepting row {(v, q1, q2, a1, a2)} outside the alphabets")
        return out

    @property
    def tapes(self):
        return max(v for v, _, _ in self.distribution) + 1

    def accepts(self, v, q1, q2, a1, a2):
        return (v, q1, q2, a1, a2) in self.accepting

    def strategy_value(self, f1, f2):
        """Acceptance of deterministic answer functions (sequences indexed by question)."""
        return sum(p for (v, q1, q2), p in self.distribution.items()
                   if self.accepts(v, q1, q2, f1[q1], f2[q2]))


def classical_value(game, return_strategy=False):
    """Best acceptance over deterministic strategy pairs.

    Enumerates prover 1's answer functions; prover 2's best reply is then
    chosen question by question.
    """
    nq, na = len(game.questions), len(game.answers)
    if na ** nq > EXHAUSTIVE_LIMIT:
        raise CapacityError(f"{na}^{nq} answer functions exceed the exhaustive limit")
    by_q2 = {}
    for (v, q1, q2), p in game.distribution.items():
        by_q2.setdefault(q2, []).append((v, q1, p))
    best, best_pair = -1.0, None
    for f1 in product(range(na), repeat=nq):
        f2 = [0] * nq
        total = 0.0
        for q2, entries in sorted(by_q2.items()):
            scores = [sum(p for v, q1, p in entries if game.accepts(v, q1, q2, f1[q1], a2))
                      for a2 in range(na)]
            f2[q2] = int(np.argmax(scores))
            total += scores[f2[q2]]
        if total > best + 1e-15:
            best, best_pair = total, (tuple(f1), tuple(f2))
    return (best, best_pair) if return_strategy else best


@dataclass(frozen=True, eq=False)
class EmbeddingLayout:
    q_tape: int
    q_question: int
    q_answer: int
    q_M: int

    @property
    def q_V(self):
        return 1 + self.q_tape + 2 * self.q_question + 2 * self.q_answer

    @property
    def fields(self):
        """(name, width) of the verifier-side registers, most significant first."""
        return [("out", 1), ("tape", self.q_tape), ("Q1", self.q_question),
                ("Q2", self.q_question), ("A1", self.q_answer), ("A2", self.q_answer),
                ("M1", self.q_M), ("M2", self.q_M)]

    def pack(self, **values):
        index = 0
        for name, width in self.fields:
            index = (index << width) | values.get(name, 0)
        return index

    def unpack(self, index):
        out = {}
        for name, width in reversed(self.fields):
            out[name] = index & ((1 << width) - 1)
            index >>= width
        return out


def embedding_layout(game):
    nq, na = len(game.questions), len(game.answers)
    q_M = max(_bits(nq), _bits(na), 1)
    return EmbeddingLayout(_bits(game.tapes), _bits(nq), _bits(na), q_M)


def _householder(target):
    """Real reflection sending e_0 to the unit vector ``target``."""
    d = target.size
    e0 = np.zeros(d)
    e0[0] = 1.0
    w = e0 - target
    norm = np.linalg.norm(w)
    if norm < 1e-15:
        return np.eye(d, dtype=complex)
    w /= norm
    return (np.eye(d) - 2.0 * np.outer(w, w)).astype(complex)


def embed_classical_game(game, q_ent=0):
    """(ProtocolSpec, verifier turns) of the two-prover, two-message embedding.

    With ``q_ent > 0`` every prover also holds q_ent prior-entangled qubits at
    the front of its private register; see :func:`protocol.epr_prior`.
    """
    lay = embedding_layout(game)
    spec = protocol.ProtocolSpec(
        k=2, m=2, q_V=lay.q_V, q_M=lay.q_M, q_P=lay.q_M + q_ent, q_ent=q_ent, output_qubit=0,
        metadata={"label": "embedded classical game"},
    )
    d = 2 ** spec.verifier_qubits
    superposition = np.zeros(d)
    for (v, q1, q2), p in game.distribution.items():
        superposition[lay.pack(tape=v, Q1=q1, Q2=q2, M1=q1, M2=q2)] += np.sqrt(p)
    first = _householder(superposition)

    na = len(game.answers)
    answer_mask = (1 << lay.q_answer) - 1
    perm = np.empty(d, dtype=int)
    for index in range(d):
        f = lay.unpack(index)
        a1, a2 = f["M1"], f["M2"]
        ok = a1 < na and a2 < na and game.accepts(f["tape"], f["Q1"], f["Q2"], a1, a2)
        f["out"] ^= int(ok)
        f["A1"] ^= a1 & answer_mask
        f["A2"] ^= a2 & answer_mask
        perm[index] = lay.pack(**f)
    second = np.zeros((d, d), dtype=complex)
    second[perm, np.arange(d)] = 1.0
    return spec, [first, second]


def deterministic_prover(spec, answers):
    """Permutation |x>_M |e, y>_P -> |y xor f(x)>_M |e, x>_P, f given as a list.

    ``e`` (the first q_ent private qubits) is left alone.
    """
    q_M, q_ent = spec.q_M, spec.q_ent
    dm = 2 ** q_M
    d = 2 ** spec.prover_qubits
    perm = np.empty(d, dtype=int)
    for index in range(d):
        x = index >> spec.q_P
        e = (index >> q_M) & ((1 << q_ent) - 1)
        y = index & (dm - 1)
        fx = answers[x] if x < len(answers) else 0
        perm[index] = ((y ^ fx) << spec.q_P) | (e << q_M) | x
    u = np.zeros((d, d), dtype=complex)
    u[perm, np.arange(d)] = 1.0
    return u


def induced_answers(spec, unitary, n_questions):
    """Answer function of a basis-permuting prover started on |q>|0>."""
    u = np.asarray(unitary)
    out = []
    for q in range(n_questions):
        image = int(np.argmax(np.abs(u[:, q << spec.q_P])))
        out.append(image >> spec.q_P)
    return out


def chsh_game():
    """Uniform bit questions; accept iff a1 xor a2 = q1 and q2."""
    dist = {(0, q1, q2): 0.25 for q1 in range(2) for q2 in range(2)}
    return ClassicalTwoProverGame.from_predicate(
        (0, 1), (0, 1), dist, lambda v, q1, q2, a1, a2: (a1 ^ a2) == (q1 & q2))


def equality_game(n=2):
    """Shared uniform question; accept iff both answers repeat it."""
    dist = {(0, q, q): 1.0 / n for q in range(n)}
    return ClassicalTwoProverGame.from_predicate(
        tuple(range(n)), tuple(range(n)), dist,
        lambda v, q1, q2, a1, a2: a1 == a2 == q1 == q2)
