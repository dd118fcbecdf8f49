"""Gate lists over the Hadamard / sqrt(Z) / Toffoli basis, plus explicit unitaries."""
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import GateError

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
SQRT_Z = np.diag([1, 1j]).astype(complex)
TOFFOLI = np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]]
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]

BASIS = {"hadamard": HADAMARD, "sqrt_z": SQRT_Z, "toffoli": TOFFOLI}


@dataclass(frozen=True, eq=False)
class Gate:
    """One gate application.  For ``toffoli`` the targets are (control, control, target).

    ``name="unitary"`` is the escape hatch: ``matrix`` acts on ``targets`` with
    the first target as the most significant bit.
    """

    name: str
    targets: tuple
    matrix: np.ndarray = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.matrix is not None:
            object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    def operator(self):
        if self.name == "unitary":
            if self.matrix is None:
                raise GateError("unitary gate needs a matrix")
            return self.matrix
        try:
            return BASIS[self.name]
        except KeyError:
            raise GateError(f"unknown gate {self.name!r}") from None


def hadamard(q):
    return Gate("hadamard", (q,))


def sqrt_z(q):
    return Gate("sqrt_z", (q,))


def toffoli(c1, c2, t):
    return Gate("toffoli", (c1, c2, t))


def unitary(matrix, targets):
    return Gate("unitary", tuple(targets), matrix)


def swap(a, b):
    return unitary(SWAP, (a, b))


def gate_problems(gates, total_qubits):
    problems = []
    for pos, g in enumerate(gates):
        try:
            op = g.operator()
        except GateError as exc:
            problems.append(f"gate {pos}: {exc}")
            continue
        t = g.targets
        if len(set(t)) != len(t):
            problems.append(f"gate {pos} ({g.name}): repeated target in {t}")
        if any(q < 0 or q >= total_qubits for q in t):
            problems.append(f"gate {pos} ({g.name}): target out of range 0..{total_qubits - 1}")
        if op.shape != (2 ** len(t), 2 ** len(t)):
            problems.append(f"gate {pos} ({g.name}): matrix shape {op.shape} for {len(t)} targets")
        elif g.name == "unitary" and not linalg.is_unitary(op):
            problems.append(f"gate {pos}: explicit matrix is not unitary")
    return problems


def apply_on_qubits(amplitudes, total_qubits, op, qubits):
    """Apply ``op`` to the listed qubits of a state vector (or of each column
    of a ``(2**n, batch)`` array)."""
    amps = np.asarray(amplitudes)
    batch = amps.shape[1:]
    t = amps.reshape((2,) * total_qubits + batch)
    k = len(qubits)
    rest = [q for q in range(total_qubits) if q not in qubits]
    axes = list(qubits) + rest + list(range(total_qubits, total_qubits + len(batch)))
    t = np.transpose(t, axes).reshape(2 ** k, -1)
    t = (op @ t).reshape([2] * total_qubits + list(batch))
    return np.transpose(t, np.argsort(axes)).reshape(amps.shape)


def apply_gates(amplitudes, gates, total_qubits):
    problems = gate_problems(gates, total_qubits)
    if problems:
        raise GateError("; ".join(problems))
    out = np.asarray(amplitudes, dtype=complex)
    for g in gates:
        out = apply_on_qubits(out, total_qubits, g.operator(), g.targets)
    return out


def compile_gates(gates, total_qubits):
    """Unitary of dimension 2**total_qubits realised by the gate list."""
    linalg.check_dimension(2 ** total_qubits)
    return apply_gates(np.eye(2 ** total_qubits, dtype=complex), gates, total_qubits)
