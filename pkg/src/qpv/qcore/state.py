"""Quantum states over named register layouts.

States are dense: a complex amplitude vector for pure states, a density
matrix for mixed ones.  All arrays are frozen after validation; operations
elsewhere in the package return new states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .layout import RegisterLayout

PURE_NORM_TOL = 1e-12
TRACE_TOL = 1e-12
HERMITIAN_TOL = 1e-10
PSD_EIG_TOL = -1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class QuantumState:
    layout: RegisterLayout
    kind: str  # "pure" | "mixed"
    data: np.ndarray

    def __post_init__(self):
        dim = self.layout.dim
        if self.kind == "pure":
            if self.data.shape != (dim,):
                raise ValueError(f"pure state must be a vector of length {dim}")
            norm = np.linalg.norm(self.data)
            if abs(norm - 1.0) > PURE_NORM_TOL:
                raise ValueError(f"pure state norm {norm} is not 1")
        elif self.kind == "mixed":
            if self.data.shape != (dim, dim):
                raise ValueError(f"density matrix must be {dim}x{dim}")
            if np.max(np.abs(self.data - self.data.conj().T)) > HERMITIAN_TOL:
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(self.data).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"density matrix trace {tr} is not 1")
            if np.min(np.linalg.eigvalsh(self.data)) < PSD_EIG_TOL:
                raise ValueError("density matrix is not positive semidefinite")
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")
        object.__setattr__(self, "data", _frozen(self.data))

    @property
    def n_qubits(self) -> int:
        return self.layout.total_qubits

    def density(self) -> np.ndarray:
        """Density-matrix view (outer product for pure states)."""
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return np.asarray(self.data)

    def to_mixed(self) -> "QuantumState":
        if self.kind == "mixed":
            return self
        return QuantumState(self.layout, "mixed", self.density())


def pure_state(layout: RegisterLayout, amplitudes) -> QuantumState:
    vec = np.asarray(amplitudes, dtype=complex)
    return QuantumState(layout, "pure", vec)


def mixed_state(layout: RegisterLayout, rho) -> QuantumState:
    return QuantumState(layout, "mixed", np.asarray(rho, dtype=complex))


def basis_state(layout: RegisterLayout, index: int = 0) -> QuantumState:
    vec = np.zeros(layout.dim, dtype=complex)
    vec[index] = 1.0
    return QuantumState(layout, "pure", vec)


def bell_state(first: str = "R", second: str = "A") -> QuantumState:
    """The maximally entangled pair (|00> + |11>)/sqrt(2) on two 1-qubit registers."""
    layout = RegisterLayout([(first, 1), (second, 1)])
    vec = np.zeros(4, dtype=complex)
    vec[0b00] = vec[0b11] = 1.0 / math.sqrt(2)
    return QuantumState(layout, "pure", vec)


BELL_VECTOR = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / math.sqrt(2)

# |phi_1> = (|01>+|10>)/sqrt(2) and |phi_2> = (|00>-|11>)/sqrt(2) complete
# the relevant Bell-basis identities (|Omega>, |phi_1>, |phi_2> orthogonal).
PHI1_VECTOR = np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) / math.sqrt(2)
PHI2_VECTOR = np.array([1.0, 0.0, 0.0, -1.0], dtype=complex) / math.sqrt(2)

_SQ = 1.0 / math.sqrt(2)
BB84_VECTORS = (
    np.array([1.0, 0.0], dtype=complex),      # |0>
    np.array([0.0, 1.0], dtype=complex),      # |1>
    np.array([_SQ, _SQ], dtype=complex),      # |+>
    np.array([_SQ, -_SQ], dtype=complex),     # |->
)


def bb84_state(index: int, name: str = "Q") -> QuantumState:
    """One of |0>, |1>, |+>, |-> on a single-qubit register."""
    if index not in (0, 1, 2, 3):
        raise ValueError(f"BB84 index must be in 0..3, got {index}")
    layout = RegisterLayout([(name, 1)])
    return QuantumState(layout, "pure", BB84_VECTORS[index].copy())


def bb84_basis(index: int) -> int:
    """0 for computational preparations (|0>,|1>), 1 for Hadamard (|+>,|->)."""
    return index // 2


def assemble(layout: RegisterLayout, factors) -> QuantumState:
    """Build a product state on ``layout`` from per-group factor vectors.

    ``factors`` is an iterable of ``(register_names, vector)`` pairs; the
    groups must partition the layout's registers.  Each vector is indexed
    little-endian over its group's registers in the given order.  Groups may
    interleave arbitrarily across the layout.
    """
    n = layout.total_qubits
    covered: list[int] = []
    arrays = []
    axis_qubits: list[int] = []
    for names, vec in factors:
        names = (names,) if isinstance(names, str) else tuple(names)
        qubits = layout.positions(*names)
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (1 << len(qubits),):
            raise ValueError(f"factor on {names} has wrong dimension {vec.shape}")
        covered.extend(qubits)
        arrays.append(vec)
        axis_qubits.extend(qubits)
    if sorted(covered) != list(range(n)):
        raise ValueError("factors must cover every qubit exactly once")

    full = arrays[0]
    for vec in arrays[1:]:
        # np.kron(a, b) makes b the low-order index block
        full = np.kron(vec, full)
    # full is little-endian over axis_qubits; permute to layout order
    t = full.reshape([2] * n)
    # axis j of t holds axis_qubits[n-1-j]; we need axis j to hold qubit n-1-j
    perm = [n - 1 - axis_qubits.index(n - 1 - j) for j in range(n)]
    t = t.transpose(perm)
    return QuantumState(layout, "pure", t.reshape(-1))


def move_register_content(vec: np.ndarray, layout_from: RegisterLayout,
                          layout_to: RegisterLayout, rename: dict) -> np.ndarray:
    """Relabel registers of a pure-state vector without touching amplitudes.

    ``rename`` maps old register names to new ones; unmentioned registers keep
    their names.  The returned vector is indexed by ``layout_to``.
    """
    n = layout_from.total_qubits
    if layout_to.total_qubits != n:
        raise ValueError("layouts must have the same qubit count")
    mapping: dict[int, int] = {}
    for name, width in layout_from.registers:
        new = rename.get(name, name)
        src = layout_from.positions(name)
        dst = layout_to.positions(new)
        if len(dst) != width:
            raise ValueError(f"register {name!r} changes width under renaming")
        mapping.update(zip(src, dst))
    t = np.asarray(vec, dtype=complex).reshape([2] * n)
    # axis j in source holds qubit n-1-j; send it to target axis n-1-mapping[q]
    perm = [0] * n
    for q_src, q_dst in mapping.items():
        perm[n - 1 - q_dst] = n - 1 - q_src
    return t.transpose(perm).reshape(-1)
