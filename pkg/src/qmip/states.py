"""Pure and mixed states over named qubit registers.

Amplitude indices follow register-declaration order with qubit 0 as the most
significant bit, so a layout ``(("A", 1), ("B", 2))`` stores ``|a b1 b2>`` at
index ``4a + 2b1 + b2``.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import (
    AddressingError,
    CapacityError,
    ContractError,
    CutError,
    PreconditionError,
    ShapeError,
)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple

    def __post_init__(self):
        regs = tuple((str(name), int(n)) for name, n in self.registers)
        names = [name for name, _ in regs]
        if len(set(names)) != len(names):
            raise ContractError(f"duplicate register names in {names}")
        if any(n < 0 for _, n in regs):
            raise ContractError("register sizes must be non-negative")
        object.__setattr__(self, "registers", regs)

    @classmethod
    def of(cls, *registers):
        return cls(tuple(registers))

    @property
    def names(self):
        return tuple(name for name, _ in self.registers)

    @property
    def sizes(self):
        return tuple(n for _, n in self.registers)

    @property
    def dims(self):
        return tuple(2 ** n for _, n in self.registers)

    @property
    def total_qubits(self):
        return sum(self.sizes)

    @property
    def dim(self):
        return 2 ** self.total_qubits

    def __contains__(self, name):
        return name in self.names

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise AddressingError(f"unknown register {name!r}; layout has {self.names}") from None

    def size(self, name):
        return self.registers[self.index(name)][1]

    def qubits(self, name):
        """Global qubit indices occupied by register ``name``."""
        i = self.index(name)
        start = sum(self.sizes[:i])
        return tuple(range(start, start + self.sizes[i]))

    def subdim(self, names):
        return 2 ** sum(self.size(n) for n in names)

    def ordered(self, names):
        """``names`` validated and sorted into declaration order."""
        names = set(names)
        for name in names:
            self.index(name)
        return tuple(n for n in self.names if n in names)

    def sub(self, names):
        keep = self.ordered(names)
        return RegisterLayout(tuple(r for r in self.registers if r[0] in keep))

    def complement(self, names):
        names = set(self.ordered(names))
        return tuple(n for n in self.names if n not in names)

    def resized(self, name, n):
        i = self.index(name)
        regs = list(self.registers)
        regs[i] = (name, n)
        return RegisterLayout(tuple(regs))

    def extended(self, name, n):
        if name in self.names:
            raise ContractError(f"register {name!r} already present")
        return RegisterLayout(self.registers + ((name, n),))


@dataclass(frozen=True, eq=False)
class PureState:
    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        linalg.check_dimension(amps.size)
        if amps.size != self.layout.dim:
            raise ShapeError(f"{amps.size} amplitudes for a {self.layout.total_qubits}-qubit layout")
        if not np.all(np.isfinite(amps)):
            raise ContractError("state has non-finite amplitudes")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ContractError(f"state norm {norm!r} differs from 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self):
        return self.amplitudes.reshape(self.layout.dims)

    def density(self):
        return DensityMatrix(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    layout: RegisterLayout
    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        d = self.layout.dim
        if m.shape != (d, d):
            raise ShapeError(f"density matrix of shape {m.shape} for dimension {d}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def violations(self, tol=NORM_TOL):
        problems = []
        m = self.matrix
        if not linalg.is_hermitian(m, tol):
            problems.append("not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > tol:
            problems.append(f"trace {tr.real:.3g} differs from 1")
        if not problems:
            lowest = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
            if lowest < -tol:
                problems.append(f"negative eigenvalue {lowest:.3g}")
        return problems


class SchmidtDecomposition(NamedTuple):
    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    rank: int
    left: tuple
    right: tuple

    def reconstruct(self):
        """Amplitude matrix indexed (left registers, right registers)."""
        return (self.left_vectors * self.coefficients) @ self.right_vectors.T


def basis_state(layout, index=0):
    amps = np.zeros(layout.dim, dtype=complex)
    amps[index] = 1.0
    return PureState(layout, amps)


def product_state(layout, values):
    """Computational basis state with register ``name`` holding ``values[name]``."""
    index = 0
    for name, n in layout.registers:
        index = (index << n) | int(values.get(name, 0))
    return basis_state(layout, index)


def random_state(layout, rng):
    z = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    return PureState(layout, z / np.linalg.norm(z))


def from_amplitudes(layout, amplitudes, normalize=False):
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if normalize:
        amps = amps / np.linalg.norm(amps)
    return PureState(layout, amps)


def group(state, left):
    """Amplitude matrix of ``state`` split as (``left`` registers | the rest)."""
    layout = state.layout
    left = layout.ordered(left)
    right = layout.complement(left)
    axes = [layout.index(n) for n in left + right]
    t = np.transpose(state.tensor(), axes)
    return t.reshape(layout.subdim(left), layout.subdim(right)), left, right


def ungroup(matrix, layout, left):
    """Inverse of :func:`group`: amplitude vector in ``layout`` order."""
    left = layout.ordered(left)
    right = layout.complement(left)
    order = left + right
    t = np.asarray(matrix).reshape([2 ** layout.size(n) for n in order])
    inverse = np.argsort([layout.index(n) for n in order])
    return np.transpose(t, inverse).reshape(-1)


def apply_unitary(state, op, registers, check=False):
    """Apply ``op`` to the named registers (in the order given) of ``state``."""
    layout = state.layout
    registers = tuple(registers)
    for name in registers:
        layout.index(name)
    if len(set(registers)) != len(registers):
        raise AddressingError(f"repeated register in {registers}")
    d = layout.subdim(registers)
    op = np.asarray(op, dtype=complex)
    if op.shape != (d, d):
        raise ShapeError(f"operator of shape {op.shape} on registers {registers} of dimension {d}")
    if check and not linalg.is_unitary(op):
        raise ContractError("operator is not unitary")
    rest = tuple(n for n in layout.names if n not in registers)
    axes = [layout.index(n) for n in registers + rest]
    t = np.transpose(state.tensor(), axes).reshape(d, -1)
    t = (op @ t).reshape([layout.dims[a] for a in axes])
    out = np.transpose(t, np.argsort(axes)).reshape(-1)
    return PureState(layout, out)


def partial_trace(state, keep):
    """Reduced density matrix on ``keep``: sum_i (I x <e_i|) rho (I x |e_i>)."""
    layout = state.layout
    keep = layout.ordered(keep)
    sub = layout.sub(keep)
    if isinstance(state, PureState):
        m, _, _ = group(state, keep)
        return DensityMatrix(sub, m @ m.conj().T)
    if isinstance(state, DensityMatrix):
        traced = layout.complement(keep)
        dims = layout.dims
        r = len(dims)
        t = state.matrix.reshape(dims + dims)
        keep_axes = [layout.index(n) for n in keep]
        trace_axes = [layout.index(n) for n in traced]
        perm = keep_axes + trace_axes + [r + a for a in keep_axes] + [r + a for a in trace_axes]
        dk, dt = layout.subdim(keep), layout.subdim(traced)
        t = np.transpose(t, perm).reshape(dk, dt, dk, dt)
        return DensityMatrix(sub, np.einsum("ajbj->ab", t))
    raise TypeError(f"cannot trace a {type(state).__name__}")


def reduced_state_gap(a, b, traced):
    """Operator-norm distance between the reductions of two pure states on the
    complement of ``traced``.

    Works through a QR factorisation of the stacked amplitude matrices so the
    cost scales with the traced dimension rather than the kept one.
    """
    if a.layout != b.layout:
        raise ShapeError("states live on different layouts")
    keep = a.layout.complement(traced)
    ma, _, _ = group(a, keep)
    mb, _, _ = group(b, keep)
    dk, dt = ma.shape
    if dk <= 2 * dt:
        return linalg.hermitian_operator_norm(ma @ ma.conj().T - mb @ mb.conj().T)
    _, r = np.linalg.qr(np.hstack([ma, mb]))
    sign = np.concatenate([np.ones(dt), -np.ones(dt)])
    return linalg.hermitian_operator_norm((r * sign) @ r.conj().T)


def _check_cut(layout, left):
    left = layout.ordered(left)
    if not left or len(left) == len(layout.names):
        raise CutError(f"cut {left} must be a proper non-empty subset of {layout.names}")
    return left


def schmidt_decompose(state, left, rank_tol=linalg.RANK_TOL):
    """Schmidt decomposition across (``left`` | rest).

    Vectors are columns indexed in declaration order within each side; only
    coefficients above ``rank_tol`` times the largest are retained.
    """
    left = _check_cut(state.layout, left)
    m, left, right = group(state, left)
    dec = linalg.svd(m)
    s = dec.singulars
    rank = int(np.sum(s > rank_tol * s[0])) if s.size else 0
    u = dec.left[:, :rank]
    v = dec.right[:, :rank].conj()
    # fix the free phase of each term on the left vector
    for i in range(rank):
        big = np.flatnonzero(np.abs(u[:, i]) > 1e-9)
        z = u[big[0], i]
        ph = abs(z) / z
        u[:, i] *= ph
        v[:, i] /= ph
    return SchmidtDecomposition(s[:rank].copy(), u, v, rank, left, right)


def ent2(state, left, rank_tol=linalg.RANK_TOL):
    """Minimum number of product terms across the cut, i.e. the Schmidt rank."""
    return schmidt_decompose(state, left, rank_tol).rank


def ent3_upper_bound(state, parts, rank_tol=linalg.RANK_TOL):
    """Term count of the chained Schmidt expansion over three parts.

    Decompose across (part1 | part2+part3), then decompose every right-hand
    Schmidt vector across (part2 | part3) and count the surviving terms.
    """
    layout = state.layout
    parts = [layout.ordered(p) for p in parts]
    flat = [n for p in parts for n in p]
    if len(parts) != 3 or any(not p for p in parts) or sorted(flat) != sorted(layout.names):
        raise CutError(f"{parts} is not a partition of {layout.names} into three parts")
    first = schmidt_decompose(state, parts[0], rank_tol)
    rest_layout = layout.sub(parts[1] + parts[2])
    total = 0
    for i in range(first.rank):
        vec = first.right_vectors[:, i]
        inner = PureState(rest_layout, vec / np.linalg.norm(vec))
        total += schmidt_decompose(inner, parts[1], rank_tol).rank
    return total


def purify(rho, ancilla_name):
    """Purification sum_i sqrt(l_i) |v_i> |i> with an ancilla as large as rho's space."""
    problems = rho.violations()
    if problems:
        raise ContractError("invalid density matrix: " + ", ".join(problems))
    values, vectors = linalg.hermitian_eig(rho.matrix)
    weights = np.sqrt(np.clip(values, 0.0, None))
    n = rho.layout.total_qubits
    layout = rho.layout.extended(ancilla_name, n)
    # amplitude matrix [system, ancilla] = V diag(sqrt(l))
    amps = (vectors * weights).reshape(-1)
    return PureState(layout, amps / np.linalg.norm(amps))


def _isometry_completion(a_null, b_null):
    """Unitary from span(a_null) onto span(b_null) closest to the identity."""
    if a_null.shape[1] == 0:
        return np.zeros((a_null.shape[0], a_null.shape[0]), dtype=complex)
    a_null = linalg.normalize_phase(a_null)
    overlap = b_null.conj().T @ a_null
    if linalg.operator_norm(overlap) < 1e-9:
        # no preferred alignment: pair phase-normalised bases in order
        return linalg.normalize_phase(b_null) @ a_null.conj().T
    return b_null @ linalg.polar_unitary(overlap) @ a_null.conj().T


def uhlmann_unitary(phi, psi, part2, tol=1e-8, rank_tol=1e-12):
    """Unitary U on ``part2`` with (I x U)|phi> = |psi>.

    U is the conjugated polar factor of the overlap matrix of the two
    amplitude matrices; on the kernel of the overlap it is completed by the
    unitary closest to the identity, so phi = psi returns exactly I.
    The matrix acts on the ``part2`` registers in declaration order.
    """
    if phi.layout != psi.layout:
        raise ShapeError("states live on different layouts")
    layout = phi.layout
    part2 = layout.ordered(part2)
    if not part2:
        raise CutError("part2 must name at least one register")
    gap = reduced_state_gap(phi, psi, part2)
    if gap > tol:
        raise PreconditionError(f"reduced states differ by {gap:.3e} (> {tol:.1e})", gap=gap)
    part1 = layout.complement(part2)
    mphi, _, _ = group(phi, part1)
    mpsi, _, _ = group(psi, part1)
    x = mphi.T @ mpsi.conj()
    # tr(X U) is maximised by U = (polar factor of X)^dagger
    w, s, vh = np.linalg.svd(x)
    a, b = w, vh.conj().T
    big = s > rank_tol * max(s[0], 1e-300)
    u = b[:, big] @ a[:, big].conj().T
    u = u + _isometry_completion(a[:, ~big], b[:, ~big])
    return u


def compress_subsystem(psi, subsystem, budget_qubits, rank_tol=linalg.RANK_TOL):
    """Move the ``subsystem`` side of psi's Schmidt decomposition into its first
    ``budget_qubits`` qubits, leaving the remaining qubits of the register |0>.

    The reduced state on everything outside ``subsystem`` is unchanged.
    """
    layout = psi.layout
    n_sub = layout.size(subsystem)
    if budget_qubits < 0 or budget_qubits > n_sub:
        raise CapacityError(f"budget {budget_qubits} outside 0..{n_sub} for register {subsystem!r}")
    rest = layout.complement([subsystem])
    if rest:
        dec = schmidt_decompose(psi, rest, rank_tol)
        coeffs, outer, inner = dec.coefficients, dec.left_vectors, dec.right_vectors
    else:
        coeffs = np.array([1.0])
        outer = np.ones((1, 1), dtype=complex)
        inner = psi.amplitudes[:, None]
    rank = coeffs.size
    if rank > 2 ** budget_qubits:
        raise CapacityError(
            f"Schmidt rank {rank} across {subsystem!r} exceeds 2^{budget_qubits}", rank=rank
        )
    order = _retained_order(coeffs, inner)
    shift = n_sub - budget_qubits
    m = np.zeros((outer.shape[0], 2 ** n_sub), dtype=complex)
    for slot, term in enumerate(order):
        m[:, slot << shift] = coeffs[term] * outer[:, term]
    amps = ungroup(m, layout, rest) if rest else m.reshape(-1)
    return PureState(layout, amps / np.linalg.norm(amps))


def _retained_order(coeffs, vectors):
    def key(i):
        v = linalg.normalize_phase(vectors[:, i])
        flat = np.round(np.column_stack([v.real, v.imag]).reshape(-1), 12)
        return (-round(float(coeffs[i]), 12), tuple(flat))

    return sorted(range(coeffs.size), key=key)


def support_leak(state, register, keep_qubits):
    """Largest amplitude with a 1 anywhere past the first ``keep_qubits`` of ``register``."""
    layout = state.layout
    n = layout.size(register)
    if keep_qubits >= n:
        return 0.0
    t = state.tensor()
    axis = layout.index(register)
    t = np.moveaxis(t, axis, 0).reshape(2 ** keep_qubits, 2 ** (n - keep_qubits), -1)
    return float(np.max(np.abs(t[:, 1:, :]), initial=0.0))


def truncate_register(state, register, keep_qubits, tol=1e-9):
    """Drop the trailing qubits of ``register``; they must be |0>."""
    leak = support_leak(state, register, keep_qubits)
    if leak > tol:
        raise CapacityError(f"register {register!r} has amplitude {leak:.2e} beyond qubit {keep_qubits}")
    layout = state.layout
    n = layout.size(register)
    axis = layout.index(register)
    t = np.moveaxis(state.tensor(), axis, 0)
    t = t.reshape((2 ** keep_qubits, 2 ** (n - keep_qubits)) + t.shape[1:])[:, 0]
    t = np.moveaxis(t, 0, axis).reshape(-1)
    return PureState(layout.resized(register, keep_qubits), t / np.linalg.norm(t))


def pad_register(state, register, extra_qubits):
    """Append ``extra_qubits`` fresh |0> qubits to the end of ``register``."""
    layout = state.layout
    n = layout.size(register)
    axis = layout.index(register)
    t = np.moveaxis(state.tensor(), axis, -1)
    out = np.zeros(t.shape[:-1] + (2 ** n, 2 ** extra_qubits), dtype=complex)
    out[..., 0] = t
    out = np.moveaxis(out.reshape(t.shape[:-1] + (2 ** (n + extra_qubits),)), -1, axis)
    return PureState(layout.resized(register, n + extra_qubits), out.reshape(-1))


def measure_output_qubit(state, qubit):
    """Probability that measuring global qubit ``qubit`` yields |1>."""
    n = state.layout.total_qubits
    if not 0 <= qubit < n:
        raise AddressingError(f"qubit {qubit} out of range for {n} qubits")
    probs = np.abs(state.amplitudes.reshape(2 ** qubit, 2, -1)) ** 2
    return float(min(max(probs[:, 1, :].sum(), 0.0), 1.0))
