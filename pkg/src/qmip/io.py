"""JSON files for protocols, certificates, games and states.

Complex numbers are ``[re, im]`` pairs.  A turn is ``{"matrix": ...}`` or
``{"gates": [{"name", "targets", "matrix"?}, ...]}``.
"""
import json
from typing import NamedTuple

import numpy as np

from . import gates, protocol
from .errors import ContractError, ShapeError, ValidationError
from .games import ClassicalTwoProverGame
from .optimize import Certificate


class Protocol(NamedTuple):
    spec: protocol.ProtocolSpec
    verifier: list
    provers: list
    prior: np.ndarray = None


def encode_complex(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(data):
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ShapeError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def turn_to_json(turn):
    if isinstance(turn, (list, tuple)):
        out = []
        for g in turn:
            entry = {"name": g.name, "targets": list(g.targets)}
            if g.name == "unitary":
                entry["matrix"] = encode_complex(g.matrix)
            out.append(entry)
        return {"gates": out}
    return {"matrix": encode_complex(turn)}


def turn_from_json(data):
    if not isinstance(data, dict) or len(data.keys() & {"gates", "matrix"}) != 1:
        raise ContractError("a turn needs exactly one of 'gates' or 'matrix'")
    if "matrix" in data:
        return decode_complex(data["matrix"])
    out = []
    for g in data["gates"]:
        matrix = decode_complex(g["matrix"]) if "matrix" in g else None
        out.append(gates.Gate(g["name"], tuple(g["targets"]), matrix))
    return out


def protocol_to_dict(spec, verifier, provers, prior=None):
    doc = {
        "k": spec.k, "m": spec.m, "q_V": spec.q_V, "q_M": spec.q_M, "q_P": spec.q_P,
        "q_ent": spec.q_ent, "output_qubit": spec.output_qubit,
        "verifier": [turn_to_json(t) for t in verifier],
        "provers": [[turn_to_json(t) for t in s] for s in provers],
    }
    if prior is not None:
        doc["prior"] = encode_complex(np.asarray(prior).reshape(-1))
    if spec.metadata:
        doc["metadata"] = dict(spec.metadata)
    return doc


def protocol_from_dict(doc, validate=True):
    try:
        spec = protocol.ProtocolSpec(
            k=int(doc["k"]), m=int(doc["m"]), q_V=int(doc["q_V"]), q_M=int(doc["q_M"]),
            q_P=int(doc["q_P"]), q_ent=int(doc.get("q_ent", 0)),
            output_qubit=int(doc.get("output_qubit", 0)), metadata=dict(doc.get("metadata", {})),
        )
        verifier = [turn_from_json(t) for t in doc["verifier"]]
        provers = [[turn_from_json(t) for t in s] for s in doc["provers"]]
    except (KeyError, TypeError) as exc:
        raise ContractError(f"malformed protocol document: {exc!r}") from exc
    prior = decode_complex(doc["prior"]) if doc.get("prior") is not None else None
    if validate:
        problems = protocol.validate_protocol(spec, verifier, provers, prior)
        if problems:
            raise ValidationError(problems)
    return Protocol(spec, verifier, provers, prior)


def _load(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ContractError(f"{path}: invalid JSON ({exc})") from exc


def _dump(doc, path, compact=False):
    with open(path, "w", encoding="utf-8") as fh:
        if compact:
            json.dump(doc, fh, separators=(",", ":"))
        else:
            json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_protocol(path, validate=True):
    return protocol_from_dict(_load(path), validate)


def write_protocol(path, spec, verifier, provers, prior=None):
    _dump(protocol_to_dict(spec, verifier, provers, prior), path, compact=True)


def certificate_to_dict(cert):
    doc = {"provers": [[turn_to_json(t) for t in s] for s in cert.provers]}
    if cert.prior is not None:
        doc["prior"] = encode_complex(np.asarray(cert.prior).reshape(-1))
    if cert.claimed is not None:
        doc["claimed"] = float(cert.claimed)
    return doc


def read_certificate(path):
    doc = _load(path)
    try:
        provers = [[turn_from_json(t) for t in s] for s in doc["provers"]]
    except (KeyError, TypeError) as exc:
        raise ContractError(f"malformed certificate: {exc!r}") from exc
    prior = decode_complex(doc["prior"]) if doc.get("prior") is not None else None
    return Certificate(provers, prior, doc.get("claimed"))


def write_certificate(path, cert):
    _dump(certificate_to_dict(cert), path, compact=True)


def game_to_dict(game):
    q, a = game.questions, game.answers
    return {
        "questions": list(q),
        "answers": list(a),
        "distribution": [{"v": v, "q1": q[q1], "q2": q[q2], "p": p}
                         for (v, q1, q2), p in sorted(game.distribution.items())],
        "accept": [[v, q[q1], q[q2], a[a1], a[a2]]
                   for v, q1, q2, a1, a2 in sorted(game.accepting)],
    }


def game_from_dict(doc):
    try:
        questions, answers = list(doc["questions"]), list(doc["answers"])
        qi = {label: n for n, label in enumerate(questions)}
        ai = {label: n for n, label in enumerate(answers)}
        dist = {}
        for row in doc["distribution"]:
            key = (int(row.get("v", 0)), qi[row["q1"]], qi[row["q2"]])
            dist[key] = dist.get(key, 0.0) + float(row["p"])
        accepting = [(int(v), qi[q1], qi[q2], ai[a1], ai[a2]) for v, q1, q2, a1, a2 in doc["accept"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"malformed game document: {exc!r}") from exc
    return ClassicalTwoProverGame(questions, answers, dist, accepting)


def read_game(path):
    return game_from_dict(_load(path))


def write_game(path, game):
    _dump(game_to_dict(game), path)


def read_state(path):
    """Amplitude vector from ``{"amplitudes": [[re, im], ...]}`` or a bare list."""
    doc = _load(path)
    data = doc["amplitudes"] if isinstance(doc, dict) else doc
    return decode_complex(data).reshape(-1)


def write_state(path, amplitudes):
    _dump({"amplitudes": encode_complex(np.asarray(amplitudes).reshape(-1))}, path)
