"""Executable rounds of the three position-verification protocols.

Each ``run_*`` function plays one round: it builds the spacetime event log,
computes the exact acceptance probability for the given prover, samples the
verdict, and returns a :class:`ProtocolRun`.  The exact probabilities are
exposed separately for tests and exhaustive sweeps.

Attack strategies (objects from :mod:`qpv.attacks`) are referenced by
handle: their timing validity is granted by construction and their
acceptance probability comes from the two-phase strategy executor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import qcore as qc
from .geometry import (
    Geometry,
    SpacetimeEvent,
    honest_challenge_events,
    response_events,
    timing_check,
    two_attacker_relay_events,
)
from .provers import HONEST, Prover, SyntheticAdversary

PROTOCOLS = ("route_entangled", "route_bb84", "meas")


@dataclass(frozen=True)
class ProtocolRun:
    protocol: str
    n: int
    f: object
    x: int
    y: int
    events: list[SpacetimeEvent]
    timing_ok: bool
    arrival_ok: bool
    accept_probability: float
    accepted: bool
    details: dict = field(default_factory=dict)


def m1_accept_probability(rho) -> float:
    """Probability that the two-qubit Bell test {|Omega><Omega|, rest} accepts."""
    rho = rho.density() if isinstance(rho, qc.QuantumState) else np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError("M1 is defined on two qubits")
    return float(np.vdot(qc.BELL_VECTOR, rho @ qc.BELL_VECTOR).real)


def m2_accept_probability(rho) -> float:
    """Acceptance of the basis-sampled local replacement of the Bell test.

    With probability 1/2 each, both qubits are measured in the computational
    or the Hadamard basis and accepted on equal outcomes.
    """
    rho = rho.density() if isinstance(rho, qc.QuantumState) else np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError("M2 is defined on two qubits")
    p_omega = float(np.vdot(qc.BELL_VECTOR, rho @ qc.BELL_VECTOR).real)
    p_1 = float(np.vdot(qc.PHI1_VECTOR, rho @ qc.PHI1_VECTOR).real)
    p_2 = float(np.vdot(qc.PHI2_VECTOR, rho @ qc.PHI2_VECTOR).real)
    return p_omega + 0.5 * (p_1 + p_2)


def _is_attack(prover) -> bool:
    return hasattr(prover, "psi") and hasattr(prover, "kind")


def _check_inputs(f, x: int, y: int) -> None:
    side = 1 << f.n
    if not (0 <= x < side and 0 <= y < side):
        raise ValueError(f"inputs must be {f.n}-bit strings")


def _depolarize_qubit(state: qc.QuantumState, register: str, p: float) -> qc.QuantumState:
    """Replace the register with I/2 with probability p (Pauli-twirl form)."""
    mixed = state.to_mixed()
    rho = state.density()
    out = (1 - 0.75 * p) * rho
    for pauli in (qc.X, qc.Y, qc.Z):
        out = out + (p / 4) * qc.apply_matrix_raw(mixed, pauli, register)
    return qc.QuantumState(state.layout, "mixed", out)


def _route_channel(state: qc.QuantumState, prover: Prover, q_register: str,
                   depolarize: float = 0.0) -> qc.QuantumState:
    """Apply the prover's (mis)handling of the travelling qubit."""
    if depolarize > 0.0:
        state = _depolarize_qubit(state, q_register, depolarize)
    if prover.replace_with is not None:
        keep = [n for n in state.layout.names if n != q_register]
        if keep:
            rest = qc.partial_trace(state, keep)
            fresh = np.asarray(qc.BB84_VECTORS[prover.replace_with])
            state = _reassemble_replaced(state.layout, rest, fresh, q_register)
        else:
            state = qc.bb84_state(prover.replace_with, q_register)
    if prover.tamper_unitary is not None:
        state = qc.apply_matrix(state, np.asarray(prover.tamper_unitary, dtype=complex), q_register)
    if prover.premeasure_basis is not None:
        state = qc.dephase_register(state, q_register, prover.premeasure_basis)
    return state


def _reassemble_replaced(layout, rest_state, fresh_vec, q_register) -> qc.QuantumState:
    rho_rest = rest_state.density()
    fresh = np.outer(fresh_vec, fresh_vec.conj())
    # build product in an order matching the layout little-endian convention
    pos_q = layout.positions(q_register)[0]
    n = layout.total_qubits
    lower = pos_q              # qubits below q
    upper = n - pos_q - 1      # qubits above q
    dim_low, dim_high = 1 << lower, 1 << upper
    rest = rho_rest.reshape(dim_high, dim_low, dim_high, dim_low)
    out = np.einsum("ab,icjd->iacjbd", fresh, rest).reshape(1 << n, 1 << n)
    return qc.QuantumState(layout, "mixed", out)


# ---------------------------------------------------------------------------
# exact acceptance probabilities
# ---------------------------------------------------------------------------

def route_entangled_accept_probability(f, x: int, y: int, prover=HONEST,
                                       depolarize: float = 0.0) -> float:
    """Bell-test pass probability, conditional on timing/arrival being valid."""
    _check_inputs(f, x, y)
    if _is_attack(prover):
        from ..attacks import execute_route
        return execute_route(prover, f, x, y)
    if isinstance(prover, SyntheticAdversary):
        return prover.p
    state = qc.bell_state("R", "Q")
    state = _route_channel(state, prover, "Q", depolarize)
    return m1_accept_probability(state.density())


def route_bb84_accept_probability(f, x: int, y: int, prover=HONEST,
                                  prep: int | None = None,
                                  depolarize: float = 0.0) -> float:
    """Preparation-basis check pass probability (averaged over preparations
    when ``prep`` is None)."""
    _check_inputs(f, x, y)
    if _is_attack(prover):
        from ..attacks import execute_route_reduced
        rho = execute_route_reduced(prover, f, x, y)
        return 0.0 if rho is None else m2_accept_probability(rho)
    if isinstance(prover, SyntheticAdversary):
        return prover.p
    preps = (prep,) if prep is not None else (0, 1, 2, 3)
    total = 0.0
    for p_idx in preps:
        state = qc.bb84_state(p_idx, "Q")
        state = _route_channel(state, prover, "Q", depolarize)
        vec = qc.BB84_VECTORS[p_idx]
        total += float(np.vdot(vec, state.density() @ vec).real)
    return total / len(preps)


def meas_accept_probability(f, x: int, y: int, prover=HONEST,
                            depolarize: float = 0.0) -> float:
    """Probability that the broadcast bit matches the verifier's measurement."""
    _check_inputs(f, x, y)
    if _is_attack(prover):
        from ..attacks import execute_meas
        return execute_meas(prover, f, x, y)
    if isinstance(prover, SyntheticAdversary):
        return prover.p
    theta = f.value(x, y)
    state = qc.bell_state("R", "Q")
    if depolarize > 0.0:
        state = _depolarize_qubit(state, "Q", depolarize)
    rho = state.density()
    verifier = qc.basis_projectors(theta)
    if prover.meas_mode == "measure":
        mine = qc.basis_projectors(theta)
    elif prover.meas_mode == "wrong_basis":
        mine = qc.basis_projectors(1 - theta)
    elif prover.meas_mode == "random_bit":
        mine = (np.eye(2) / 2, np.eye(2) / 2)
    else:
        raise ValueError(f"unknown meas_mode {prover.meas_mode!r}")
    prob = 0.0
    for b in (0, 1):
        effect = qc.kron_le(verifier[b], mine[b])  # R low qubit, Q high qubit
        prob += float(np.trace(effect @ rho).real)
    return prob


def accept_probability(protocol: str, f, x: int, y: int, prover=HONEST, **kw) -> float:
    if protocol == "route_entangled":
        return route_entangled_accept_probability(f, x, y, prover, **kw)
    if protocol == "route_bb84":
        return route_bb84_accept_probability(f, x, y, prover, **kw)
    if protocol == "meas":
        return meas_accept_probability(f, x, y, prover, **kw)
    raise ValueError(f"unknown protocol {protocol!r}")


# ---------------------------------------------------------------------------
# single rounds
# ---------------------------------------------------------------------------

def _attack_relay_events(geom: Geometry, x: int, y: int, targets: list[int]) -> list[SpacetimeEvent]:
    return two_attacker_relay_events(geom, x, y, targets)


def _finish_run(protocol, f, x, y, events, timing_ok, arrival_ok, prob, rng, details):
    prob = min(max(prob, 0.0), 1.0)
    accepted = bool(timing_ok and arrival_ok and (rng.random() < prob or prob >= 1.0))
    return ProtocolRun(protocol=protocol, n=f.n, f=f, x=x, y=y, events=events,
                       timing_ok=timing_ok, arrival_ok=arrival_ok,
                       accept_probability=prob, accepted=accepted, details=details)


def run_route_entangled(f, x: int, y: int, prover=HONEST, seed=0,
                        geom: Geometry | None = None, depolarize: float = 0.0) -> ProtocolRun:
    _check_inputs(f, x, y)
    geom = geom or Geometry()
    rng = qc.as_generator(seed)
    fxy = f.value(x, y)
    prob = route_entangled_accept_probability(f, x, y, prover, depolarize)
    if _is_attack(prover) or isinstance(prover, SyntheticAdversary):
        events = _attack_relay_events(geom, x, y, [fxy])
        return _finish_run("route_entangled", f, x, y, events, True, True, prob, rng,
                           {"f": fxy, "attack": True})
    dest = prover.destination(fxy)
    events = honest_challenge_events(geom, x, y) + response_events(
        geom, [dest], delay=prover.delay, actual_position=prover.actual_position,
        payload={"carries_qubit": True})
    t_ok = timing_check(events, geom)
    arrival_ok = dest == fxy
    return _finish_run("route_entangled", f, x, y, events, t_ok, arrival_ok,
                       prob, rng, {"f": fxy, "destination": dest})


def run_route_bb84(f, x: int, y: int, prover=HONEST, seed=0,
                   geom: Geometry | None = None, depolarize: float = 0.0) -> ProtocolRun:
    _check_inputs(f, x, y)
    geom = geom or Geometry()
    rng = qc.as_generator(seed)
    fxy = f.value(x, y)
    prep = int(rng.integers(0, 4))
    if _is_attack(prover) or isinstance(prover, SyntheticAdversary):
        prob = route_bb84_accept_probability(f, x, y, prover)
        events = _attack_relay_events(geom, x, y, [fxy])
        return _finish_run("route_bb84", f, x, y, events, True, True, prob, rng,
                           {"f": fxy, "prep": prep, "attack": True})
    prob = route_bb84_accept_probability(f, x, y, prover, prep=prep, depolarize=depolarize)
    dest = prover.destination(fxy)
    events = honest_challenge_events(geom, x, y) + response_events(
        geom, [dest], delay=prover.delay, actual_position=prover.actual_position,
        payload={"carries_qubit": True})
    t_ok = timing_check(events, geom)
    arrival_ok = dest == fxy
    return _finish_run("route_bb84", f, x, y, events, t_ok, arrival_ok, prob, rng,
                       {"f": fxy, "prep": prep, "destination": dest})


def run_meas(f, x: int, y: int, prover=HONEST, seed=0,
             geom: Geometry | None = None, require_both: bool = True,
             depolarize: float = 0.0) -> ProtocolRun:
    _check_inputs(f, x, y)
    geom = geom or Geometry()
    rng = qc.as_generator(seed)
    fxy = f.value(x, y)
    targets = [0, 1] if require_both else [fxy]
    prob = meas_accept_probability(f, x, y, prover, depolarize)
    if _is_attack(prover) or isinstance(prover, SyntheticAdversary):
        events = _attack_relay_events(geom, x, y, targets)
        return _finish_run("meas", f, x, y, events, True, True, prob, rng,
                           {"f": fxy, "attack": True})
    events = honest_challenge_events(geom, x, y) + response_events(
        geom, targets, delay=prover.delay, actual_position=prover.actual_position,
        payload={"classical_bit": True})
    t_ok = timing_check(events, geom)
    return _finish_run("meas", f, x, y, events, t_ok, True, prob, rng, {"f": fxy})


RUNNERS = {
    "route_entangled": run_route_entangled,
    "route_bb84": run_route_bb84,
    "meas": run_meas,
}
