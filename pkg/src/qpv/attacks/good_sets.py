"""Membership oracles and constructive samplers for the recoverable-state sets.

The routing sets contain states from which one side's recovery unitary can
restore the shared pair with the reference qubit; the measuring sets contain
states from which BOTH sides can guess the reference measurement outcome in
the relevant basis.  Membership figures are computed by see-saw over the
recovery unitary (routing) and by the closed-form Helstrom bound (measuring).
"""

from __future__ import annotations

import numpy as np

from .. import qcore as qc
from .seesaw import polar_unitary
from .strategy import ALICE_FINAL, BOB_FINAL, attack_layout

ROUTE_SIDES = {"S0": (ALICE_FINAL, "A"), "S1": (BOB_FINAL, "B")}


def _bell_fidelity_sq(vec, layout, ret):
    rho = qc.reduced_outer(vec, vec, layout, ("R", ret))
    return float(np.vdot(qc.BELL_VECTOR, rho @ qc.BELL_VECTOR).real)


def best_recovery_distance(state: qc.QuantumState, which: str,
                           iters: int = 80, restarts: int = 4, seed: int = 0,
                           tol: float = 1e-10):
    """Minimal purified distance P(rho_{R,ret}, Bell) over recovery unitaries.

    Returns (distance, recovery_unitary).
    """
    regs, ret = ROUTE_SIDES[which]
    layout = state.layout
    vec = np.asarray(state.data)
    dim = layout.subdim(*regs)
    bell = np.outer(qc.BELL_VECTOR, qc.BELL_VECTOR.conj())
    best_f2, best_u = -1.0, np.eye(dim, dtype=complex)
    for r in range(restarts + 1):
        u = (np.eye(dim, dtype=complex) if r == 0
             else qc.haar_random_unitary(dim, qc.stream(seed, "recovery", r)))
        score = None
        for _ in range(iters):
            moved = qc.apply_vector_matrix(vec, layout, u, regs)
            f2 = _bell_fidelity_sq(moved, layout, ret)
            if score is not None and f2 - score < tol:
                score = f2
                break
            score = f2
            graded = qc.apply_vector_matrix(moved, layout, bell, ("R", ret))
            grad = qc.reduced_outer(graded, vec, layout, regs, order="given")
            cand = polar_unitary(grad)
            moved_c = qc.apply_vector_matrix(vec, layout, cand, regs)
            if _bell_fidelity_sq(moved_c, layout, ret) >= f2:
                u = cand
        if score > best_f2:
            best_f2, best_u = score, u
    distance = float(np.sqrt(max(0.0, 1.0 - best_f2)))
    return distance, best_u


def helstrom_guess_probability(state: qc.QuantumState, basis: int, regs) -> float:
    """Optimal probability of guessing the reference measurement outcome from
    the named registers: (1 + ||C0 - C1||_1)/2 on the conditional operators."""
    layout = state.layout
    proj = qc.basis_projectors(basis)
    cs = []
    for z in (0, 1):
        if state.kind == "pure":
            w = qc.apply_vector_matrix(np.asarray(state.data), layout, proj[z], ("R",))
            cs.append(qc.reduced_outer(w, w, layout, regs, order="given"))
        else:
            branch = qc.apply_matrix_raw(state, proj[z], ("R",))
            cs.append(qc.reduce_density_raw(branch, layout, regs, order="given"))
    diff = cs[0] - cs[1]
    diff = (diff + diff.conj().T) / 2
    trace_norm = float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return 0.5 * (1.0 + trace_norm)


def s_set_distance(state: qc.QuantumState, which: str, kind: str, eps: float,
                   seed: int = 0):
    """Membership oracle for the recoverable-state sets.

    Routing kind: returns (best recovery distance, member) with membership
    at distance <= eps.  Measuring kind: returns (min of the two sides'
    optimal guessing probabilities, member) with membership when both reach
    1 - eps^2.
    """
    if which not in ("S0", "S1"):
        raise ValueError("which must be 'S0' or 'S1'")
    if kind == "route":
        dist, _ = best_recovery_distance(state, which, seed=seed)
        # sqrt(1 - F^2) loses half the float precision near F = 1, so exact
        # members surface at distances around 1e-8 rather than 1e-9
        return dist, dist <= eps + 5e-8
    if kind == "meas":
        basis = 0 if which == "S0" else 1
        p_alice = helstrom_guess_probability(state, basis, ALICE_FINAL)
        p_bob = helstrom_guess_probability(state, basis, BOB_FINAL)
        figure = min(p_alice, p_bob)
        return figure, figure >= 1.0 - eps * eps - 1e-9
    raise ValueError("kind must be 'route' or 'meas'")


# ---------------------------------------------------------------------------
# constructive members (witness core + verified perturbation)
# ---------------------------------------------------------------------------

def _perturb_within(vec: np.ndarray, eps: float, rng) -> np.ndarray:
    """Rotate within purified distance <= eps toward a random direction."""
    if eps <= 0:
        return vec
    noise = qc.random_unit_vector(vec.size, rng)
    noise = noise - np.vdot(vec, noise) * vec
    nn = np.linalg.norm(noise)
    if nn < 1e-12:
        return vec
    noise = noise / nn
    sin_a = eps * rng.random()
    return np.sqrt(1 - sin_a ** 2) * vec + sin_a * noise


def route_member(layout: qc.RegisterLayout, which: str, eps: float, rng):
    """K^dagger (|Omega>_{R,ret} x |phi>), perturbed within eps.

    The perturbation keeps membership: applying the same recovery unitary
    leaves the reduced state within purified distance eps of the Bell pair.
    """
    regs, ret = ROUTE_SIDES[which]
    rest = [name for name in layout.names if name not in ("R", ret) and layout.width(name)]
    phi = qc.random_unit_vector(1 << sum(layout.width(r) for r in rest), rng)
    core = qc.assemble(layout, [(("R", ret), qc.BELL_VECTOR), (tuple(rest), phi)])
    k = qc.haar_random_unitary(layout.subdim(*regs), rng)
    vec = qc.apply_vector_matrix(np.asarray(core.data), layout, k.conj().T, regs)
    vec = _perturb_within(vec, eps, rng)
    return qc.QuantumState(layout, "pure", vec / np.linalg.norm(vec))


def meas_member(layout: qc.RegisterLayout, which: str, eps: float, rng,
                max_tries: int = 12):
    """State whose reference bit is readable by BOTH sides in the relevant
    basis, perturbed while re-verifying the guessing premise."""
    basis = 0 if which == "S0" else 1
    a_read = layout.positions("A")[0] if layout.width("A") else None
    b_read = layout.positions("B")[0] if layout.width("B") else None
    if a_read is None or b_read is None:
        raise ValueError("need 1-qubit A and B registers for readable copies")
    n = layout.total_qubits
    vec = np.zeros(layout.dim, dtype=complex)
    vec[0] = 1.0
    r_q = layout.positions("R")[0]
    vec = qc.apply_on_qubits(vec, n, qc.H, [r_q])
    vec = qc.apply_on_qubits(vec, n, qc.CNOT, [r_q, a_read])
    vec = qc.apply_on_qubits(vec, n, qc.CNOT, [r_q, b_read])
    if basis == 1:
        # conjugate every copy into the Hadamard basis
        for qb in (r_q, a_read, b_read):
            vec = qc.apply_on_qubits(vec, n, qc.H, [qb])
    scale = eps
    for _ in range(max_tries):
        cand = _perturb_within(vec, scale, rng)
        state = qc.QuantumState(layout, "pure", cand / np.linalg.norm(cand))
        figure, ok = s_set_distance(state, which, "meas", eps)
        if ok:
            return state
        scale *= 0.5
    return qc.QuantumState(layout, "pure", vec)


def small_attack_layout() -> qc.RegisterLayout:
    """1 qubit per named attacker register: the smallest full layout."""
    return attack_layout(a=1, at=1, ac=1)
