"""Operators on named registers: application, tracing, metrics, entropies.

Operators are embedded by index permutation on the tensor factors of the
state array; state data is never reordered.  A matrix over registers
``(P, Q, ...)`` is indexed little-endian over the concatenation of those
registers in the given order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .layout import RegisterLayout
from .state import QuantumState, mixed_state

UNITARY_TOL = 1e-10
POVM_TOL = 1e-10
EIG_ZERO = 1e-14

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def kron_le(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product with the FIRST argument on the low-order bits."""
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(op, out)
    return out


def controlled(gate: np.ndarray, control_first: bool = True) -> np.ndarray:
    """Controlled gate on (control, target) qubits; control is the low-order
    qubit when ``control_first``."""
    d = gate.shape[0]
    out = np.eye(2 * d, dtype=complex)
    if control_first:
        idx = np.arange(d) * 2 + 1
    else:
        idx = np.arange(d) + d
    out[np.ix_(idx, idx)] = gate
    return out


CNOT = controlled(X)  # control = qubit 0, target = qubit 1
SWAP2 = np.array([[1, 0, 0, 0],
                  [0, 0, 1, 0],
                  [0, 1, 0, 0],
                  [0, 0, 0, 1]], dtype=complex)


@dataclass(frozen=True)
class Unitary:
    matrix: np.ndarray
    acts_on: tuple[str, ...]

    def __init__(self, matrix, acts_on):
        acts_on = (acts_on,) if isinstance(acts_on, str) else tuple(acts_on)
        matrix = np.asarray(matrix, dtype=complex)
        d = matrix.shape[0]
        if matrix.ndim != 2 or matrix.shape != (d, d) or d & (d - 1):
            raise ValueError("unitary must be square with power-of-two dimension")
        err = np.linalg.norm(matrix.conj().T @ matrix - np.eye(d))
        if err > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (deviation {err:.2e})")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "acts_on", acts_on)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Povm:
    elements: tuple[np.ndarray, ...]
    acts_on: tuple[str, ...]

    def __init__(self, elements, acts_on):
        acts_on = (acts_on,) if isinstance(acts_on, str) else tuple(acts_on)
        elems = tuple(np.asarray(e, dtype=complex) for e in elements)
        d = elems[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in elems:
            if e.shape != (d, d):
                raise ValueError("POVM elements must share one dimension")
            if np.max(np.abs(e - e.conj().T)) > POVM_TOL:
                raise ValueError("POVM element is not Hermitian")
            if np.min(np.linalg.eigvalsh(e)) < -POVM_TOL:
                raise ValueError("POVM element is not positive semidefinite")
            total = total + e
        if np.max(np.abs(total - np.eye(d))) > POVM_TOL:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "acts_on", acts_on)


def two_outcome_povm(effect: np.ndarray, acts_on) -> Povm:
    effect = np.asarray(effect, dtype=complex)
    return Povm((effect, np.eye(effect.shape[0]) - effect), acts_on)


# ---------------------------------------------------------------------------
# raw index-permutation machinery
# ---------------------------------------------------------------------------

def _apply_to_vector(vec: np.ndarray, n: int, mat: np.ndarray,
                     qubits: list[int]) -> np.ndarray:
    w = len(qubits)
    if w == 0:
        return vec * mat[0, 0]
    t = vec.reshape([2] * n)
    mt = mat.reshape([2] * (2 * w))
    # reshaped mat axes: (out_{w-1}..out_0, in_{w-1}..in_0); the state axis
    # of local qubit k is n-1-qubits[k]
    in_axes = [n - 1 - qubits[w - 1 - j] for j in range(w)]
    t = np.tensordot(mt, t, axes=(list(range(w, 2 * w)), in_axes))
    dest = [n - 1 - qubits[w - 1 - j] for j in range(w)]
    t = np.moveaxis(t, list(range(w)), dest)
    return np.ascontiguousarray(t).reshape(-1)


def _registers_tuple(registers) -> tuple[str, ...]:
    return (registers,) if isinstance(registers, str) else tuple(registers)


def _sandwich_raw(rho: np.ndarray, n: int, mat: np.ndarray,
                  qubits: list[int]) -> np.ndarray:
    """M rho M^dagger on a density matrix, via the flattened 2n-bit view.

    Flat index = row * 2^n + col, so row qubit q sits at bit n+q and column
    qubit q at bit q.
    """
    dim = 1 << n
    flat = rho.reshape(-1)
    flat = _apply_to_vector(flat, 2 * n, mat, [q + n for q in qubits])
    flat = _apply_to_vector(flat, 2 * n, mat.conj(), qubits)
    return flat.reshape(dim, dim)


def apply_matrix_raw(state: QuantumState, mat: np.ndarray, registers) -> np.ndarray:
    """Apply a matrix on the named registers without normalizing/validating.

    Returns a vector for pure input and a density matrix for mixed input
    (rho -> M rho M^dagger).
    """
    registers = _registers_tuple(registers)
    qubits = state.layout.positions(*registers)
    if mat.shape != (1 << len(qubits),) * 2:
        raise ValueError(f"matrix dimension {mat.shape} does not match registers {registers}")
    n = state.layout.total_qubits
    if state.kind == "pure":
        return _apply_to_vector(np.asarray(state.data), n, mat, qubits)
    return _sandwich_raw(np.asarray(state.data), n, mat, qubits)


def apply_matrix(state: QuantumState, mat: np.ndarray, registers) -> QuantumState:
    """Trace-preserving matrix application returning a validated state."""
    out = apply_matrix_raw(state, mat, registers)
    return QuantumState(state.layout, state.kind, out)


def apply(state: QuantumState, u: Unitary) -> QuantumState:
    """Apply a unitary on its registers, identity elsewhere."""
    return apply_matrix(state, u.matrix, u.acts_on)


def apply_vector_matrix(vec: np.ndarray, layout: RegisterLayout,
                        mat: np.ndarray, registers) -> np.ndarray:
    """Raw-vector variant of :func:`apply_matrix` for hot loops."""
    qubits = layout.positions(*_registers_tuple(registers))
    return _apply_to_vector(vec, layout.total_qubits, mat, qubits)


def apply_on_qubits(vec: np.ndarray, n_qubits: int, mat: np.ndarray,
                    qubit_indices) -> np.ndarray:
    """Apply a small matrix on explicit qubit positions of a raw vector."""
    return _apply_to_vector(vec, n_qubits, mat, list(qubit_indices))


def compose_on_qubits(n_qubits: int, gates) -> np.ndarray:
    """Dense matrix of a gate sequence on an ``n_qubits`` system.

    ``gates`` is an iterable of ``(matrix, qubit_indices)`` applied first to
    last.  Intended for small circuits (finale unitaries, teleport blocks).
    """
    dim = 1 << n_qubits
    out = np.eye(dim, dtype=complex)
    for mat, qubits in gates:
        flat = out.reshape(-1)
        # rows of the matrix live on bits n_qubits..2*n_qubits-1
        flat = _apply_to_vector(flat, 2 * n_qubits, np.asarray(mat, dtype=complex),
                                [q + n_qubits for q in qubits])
        out = flat.reshape(dim, dim)
    return out


# ---------------------------------------------------------------------------
# partial trace and reductions
# ---------------------------------------------------------------------------

def _keep_ordered(layout: RegisterLayout, keep) -> list[str]:
    keep = _registers_tuple(keep)
    unknown = set(keep) - set(layout.names)
    if unknown:
        raise KeyError(f"unknown registers {sorted(unknown)}")
    if not keep:
        raise ValueError("must keep at least one register")
    return [n for n in layout.names if n in set(keep)]


def reduced_outer(vec_left: np.ndarray, vec_right: np.ndarray,
                  layout: RegisterLayout, keep, order: str = "layout") -> np.ndarray:
    """Partial trace of |left><right| onto the kept registers, as a matrix.

    With ``order='layout'`` the result is indexed little-endian over the
    kept registers in layout order; ``order='given'`` uses the order of the
    ``keep`` tuple instead, matching how :func:`apply_matrix` embeds
    operators on those registers.
    """
    keep = _registers_tuple(keep)
    _keep_ordered(layout, keep)  # validates names
    kept_given = layout.positions(*keep)
    n = layout.total_qubits
    traced = [q for q in range(n) if q not in set(kept_given)]
    tl = vec_left.reshape([2] * n)
    tr = vec_right.conj().reshape([2] * n)
    tr_axes = [n - 1 - q for q in traced]
    out = np.tensordot(tl, tr, axes=(tr_axes, tr_axes))
    k = len(kept_given)
    # remaining axes hold the kept qubits in descending global order
    current = sorted(kept_given, reverse=True)
    target = sorted(kept_given) if order == "layout" else kept_given
    perm = [current.index(target[k - 1 - j]) for j in range(k)]
    if perm != list(range(k)):
        out = out.transpose(perm + [k + p for p in perm])
    return out.reshape(1 << k, 1 << k)


def reduce_density_raw(rho: np.ndarray, layout: RegisterLayout, keep,
                       order: str = "layout") -> np.ndarray:
    """Partial trace of a raw density matrix onto the kept registers."""
    keep = _registers_tuple(keep)
    _keep_ordered(layout, keep)
    kept_given = layout.positions(*keep)
    n = layout.total_qubits
    traced = set(range(n)) - set(kept_given)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    row = {q: letters[i] for i, q in enumerate(range(n))}
    col = {}
    nxt = n
    for q in range(n):
        if q in traced:
            col[q] = row[q]
        else:
            col[q] = letters[nxt]
            nxt += 1
    target = sorted(kept_given) if order == "layout" else kept_given
    ordered = list(reversed(target))
    # axis j of the reshaped array is row qubit n-1-j, then col qubit n-1-j
    row_sub = "".join(row[n - 1 - j] for j in range(n))
    col_sub = "".join(col[n - 1 - j] for j in range(n))
    out_sub = ("".join(row[q] for q in ordered) + "".join(col[q] for q in ordered))
    t = np.asarray(rho).reshape([2] * (2 * n))
    out = np.einsum(f"{row_sub}{col_sub}->{out_sub}", t)
    k = len(kept_given)
    return out.reshape(1 << k, 1 << k)


def partial_trace_raw(state: QuantumState, keep) -> tuple[np.ndarray, RegisterLayout]:
    keep_ordered = _keep_ordered(state.layout, keep)
    sub_layout = state.layout.restricted(*keep_ordered)
    if state.kind == "pure":
        vec = np.asarray(state.data)
        return reduced_outer(vec, vec, state.layout, keep_ordered), sub_layout
    return reduce_density_raw(np.asarray(state.data), state.layout, keep_ordered), sub_layout


def partial_trace(state: QuantumState, keep) -> QuantumState:
    """Reduced density matrix on the kept registers (layout order)."""
    rho, sub_layout = partial_trace_raw(state, keep)
    return mixed_state(sub_layout, rho)


# ---------------------------------------------------------------------------
# fidelity, purified distance, entropies
# ---------------------------------------------------------------------------

def _clipped_eigvalsh(mat: np.ndarray) -> np.ndarray:
    return np.clip(np.linalg.eigvalsh(mat), 0.0, None)


def psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho: QuantumState, sigma: QuantumState) -> float:
    """Root fidelity tr sqrt(sqrt(sigma) rho sqrt(sigma)); equals |<psi|phi>|
    on pure pairs."""
    if rho.layout.dim != sigma.layout.dim:
        raise ValueError("states have different dimensions")
    if rho.kind == "pure" and sigma.kind == "pure":
        return float(abs(np.vdot(rho.data, sigma.data)))
    if rho.kind == "pure":
        val = np.vdot(rho.data, sigma.density() @ np.asarray(rho.data)).real
        return float(math.sqrt(max(val, 0.0)))
    if sigma.kind == "pure":
        val = np.vdot(sigma.data, rho.density() @ np.asarray(sigma.data)).real
        return float(math.sqrt(max(val, 0.0)))
    s = psd_sqrt(np.asarray(sigma.data))
    inner = s @ np.asarray(rho.data) @ s
    vals = _clipped_eigvalsh(inner)
    return float(min(np.sum(np.sqrt(vals)), 1.0))


def purified_distance(rho: QuantumState, sigma: QuantumState) -> float:
    f = fidelity(rho, sigma)
    return math.sqrt(max(0.0, 1.0 - f * f))


def purified_distance_pure(u: np.ndarray, v: np.ndarray) -> float:
    f = abs(np.vdot(u, v))
    return math.sqrt(max(0.0, 1.0 - f * f))


def von_neumann_entropy(state: QuantumState) -> float:
    """Base-2 entropy; eigenvalues below 1e-14 contribute zero."""
    if state.kind == "pure":
        return 0.0
    vals = _clipped_eigvalsh(np.asarray(state.data))
    vals = vals[vals > EIG_ZERO]
    return float(-np.sum(vals * np.log2(vals)))


def conditional_entropy(state: QuantumState, target, side=()) -> float:
    """H(target | side) = H(target, side) - H(side), base 2."""
    target = _registers_tuple(target)
    side = _registers_tuple(side)
    if set(target) & set(side):
        raise ValueError("target and side registers overlap")
    h_joint = von_neumann_entropy(partial_trace(state, target + side))
    if not side or all(state.layout.width(s) == 0 for s in side):
        return h_joint
    h_side = von_neumann_entropy(partial_trace(state, side))
    return h_joint - h_side


def binary_entropy(p: float) -> float:
    if p < 0.0 or p > 1.0:
        raise ValueError(f"probability {p} outside [0,1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

BASIS_VECTORS = {
    0: (np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)),
    1: (np.array([1.0, 1.0], dtype=complex) / math.sqrt(2),
        np.array([1.0, -1.0], dtype=complex) / math.sqrt(2)),
}


def basis_projectors(basis: int) -> tuple[np.ndarray, np.ndarray]:
    """Rank-1 projectors of the computational (0) or Hadamard (1) basis."""
    v0, v1 = BASIS_VECTORS[basis]
    return np.outer(v0, v0.conj()), np.outer(v1, v1.conj())


def effect_probability(state: QuantumState, effect: np.ndarray, registers) -> float:
    """tr(E rho) with E embedded on the named registers."""
    if state.kind == "pure":
        vec = np.asarray(state.data)
        out = apply_vector_matrix(vec, state.layout, effect, registers)
        return float(np.vdot(vec, out).real)
    n = state.layout.total_qubits
    qubits = state.layout.positions(*_registers_tuple(registers))
    rho = np.asarray(state.data)
    flat = _apply_to_vector(rho.reshape(-1), 2 * n, effect, [q + n for q in qubits])
    return float(np.trace(flat.reshape(rho.shape)).real)


def povm_probabilities(state: QuantumState, povm: Povm) -> np.ndarray:
    return np.array([effect_probability(state, e, povm.acts_on)
                     for e in povm.elements])


def measure(state: QuantumState, povm: Povm, rng):
    """Sample an outcome (Born rule) and return (index, normalized post-state).

    ``rng`` is a seed or a numpy Generator.
    """
    from .rng import as_generator
    rng = as_generator(rng)
    probs = np.clip(povm_probabilities(state, povm), 0.0, None)
    probs = probs / probs.sum()
    outcome = int(rng.choice(len(probs), p=probs))
    kraus = psd_sqrt(np.asarray(povm.elements[outcome]))
    post = apply_matrix_raw(state, kraus, povm.acts_on)
    if state.kind == "pure":
        post = post / np.linalg.norm(post)
        return outcome, QuantumState(state.layout, "pure", post)
    post = post / np.trace(post).real
    return outcome, QuantumState(state.layout, "mixed", post)


def dephase_register(state: QuantumState, register: str, basis: int) -> QuantumState:
    """Measure a 1-qubit register in the given basis and forget the outcome.

    Returns the hybrid state sum_z P_z rho P_z; the classical outcome lives in
    the measured register's slot.
    """
    if state.layout.width(register) != 1:
        raise ValueError("dephasing is defined for 1-qubit registers")
    n = state.layout.total_qubits
    qubits = state.layout.positions(register)
    rho = state.density()
    out = np.zeros_like(rho)
    for proj in basis_projectors(basis):
        out = out + _sandwich_raw(rho, n, proj, qubits)
    return QuantumState(state.layout, "mixed", out)
