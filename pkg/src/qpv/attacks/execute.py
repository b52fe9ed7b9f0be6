"""Exact executors for attack strategies, plus built-in baseline attacks."""

from __future__ import annotations

import numpy as np

from .. import qcore as qc
from ..protocol.geometry import Geometry, timing_check, two_attacker_relay_events
from .strategy import (
    ALICE_FINAL,
    ALICE_LOCAL,
    BOB_FINAL,
    BOB_LOCAL,
    AttackReport,
    AttackStrategy,
    attack_layout,
)

ENUMERATION_LIMIT_N = 4


def _check_pair(strategy: AttackStrategy, f, x: int, y: int) -> None:
    if f.n != strategy.n:
        raise ValueError(f"strategy built for n={strategy.n}, function has n={f.n}")
    side = 1 << f.n
    if not (0 <= x < side and 0 <= y < side):
        raise ValueError(f"inputs must be {f.n}-bit strings")


def _post_exchange_state(strategy: AttackStrategy, x: int, y: int) -> qc.QuantumState:
    state = strategy.psi
    state = qc.apply_matrix(state, strategy.alice_unitary(x), ALICE_LOCAL)
    state = qc.apply_matrix(state, strategy.bob_unitary(y), BOB_LOCAL)
    return state


def execute_route_reduced(strategy: AttackStrategy, f, x: int, y: int):
    """Reduced two-qubit state on (R, returned register) or None if the
    routed qubit is absent at the responsible verifier."""
    if strategy.kind != "route":
        raise ValueError("not a routing strategy")
    _check_pair(strategy, f, x, y)
    if strategy.layout.width("A") != 1:
        raise ValueError("routing execution needs 1-qubit A and B registers")
    ret = "A" if f.value(x, y) == 0 else "B"
    if not strategy.holds_qubit(x, y, ret):
        return None
    state = _post_exchange_state(strategy, x, y)
    state = qc.apply_matrix(state, strategy.recovery_k(x, y), ALICE_FINAL)
    state = qc.apply_matrix(state, strategy.recovery_l(x, y), BOB_FINAL)
    return qc.partial_trace(state, ("R", ret))


def execute_route(strategy: AttackStrategy, f, x: int, y: int) -> float:
    """Probability that the Bell test on (R, returned qubit) accepts."""
    rho = execute_route_reduced(strategy, f, x, y)
    if rho is None:
        return 0.0
    return float(np.vdot(qc.BELL_VECTOR, rho.density() @ qc.BELL_VECTOR).real)


def execute_meas(strategy: AttackStrategy, f, x: int, y: int) -> float:
    """Probability that both reported bits equal the verifier's measurement
    of R in the basis selected by f(x, y)."""
    if strategy.kind != "meas":
        raise ValueError("not a measuring strategy")
    _check_pair(strategy, f, x, y)
    theta = f.value(x, y)
    state = _post_exchange_state(strategy, x, y)
    pi, sigma = strategy.measurement_effects(x, y)
    alice_effects = (pi, np.eye(pi.shape[0]) - pi)
    bob_effects = (sigma, np.eye(sigma.shape[0]) - sigma)
    projectors = qc.basis_projectors(theta)
    total = 0.0
    if state.kind == "pure":
        vec = np.asarray(state.data)
        for z in (0, 1):
            out = qc.apply_vector_matrix(vec, state.layout, projectors[z], ("R",))
            out = qc.apply_vector_matrix(out, state.layout, alice_effects[z], ALICE_FINAL)
            out = qc.apply_vector_matrix(out, state.layout, bob_effects[z], BOB_FINAL)
            total += float(np.vdot(vec, out).real)
        return total
    for z in (0, 1):
        total += _mixed_joint_probability(state, projectors[z], alice_effects[z],
                                          bob_effects[z])
    return total


def _mixed_joint_probability(state, proj, alice_effect, bob_effect) -> float:
    n = state.layout.total_qubits
    rho = np.asarray(state.data)
    flat = rho.reshape(-1)
    for mat, regs in ((proj, ("R",)), (alice_effect, ALICE_FINAL), (bob_effect, BOB_FINAL)):
        qubits = [q + n for q in state.layout.positions(*regs)]
        flat = qc.apply_on_qubits(flat, 2 * n, np.asarray(mat, dtype=complex), qubits)
    return float(np.trace(flat.reshape(rho.shape)).real)


def execute(strategy: AttackStrategy, f, x: int, y: int) -> float:
    if strategy.kind == "route":
        return execute_route(strategy, f, x, y)
    return execute_meas(strategy, f, x, y)


def epsilon_l_report(strategy: AttackStrategy, f, eps: float | None = None) -> AttackReport:
    """Exhaustive per-pair success over all 4^n input pairs (n <= 4)."""
    if f.n > ENUMERATION_LIMIT_N:
        raise ValueError(f"exhaustive enumeration capped at n={ENUMERATION_LIMIT_N}")
    per_pair = {(x, y): execute(strategy, f, x, y) for x, y in f.pairs()}
    report = AttackReport(n=f.n, per_pair=per_pair,
                          average=float(np.mean(list(per_pair.values()))))
    return report


# ---------------------------------------------------------------------------
# built-in attacks
# ---------------------------------------------------------------------------

def keep_q_attack(f) -> AttackStrategy:
    """Alice stores the incoming qubit and everyone does nothing.

    Succeeds perfectly whenever the function routes to V0 and sends nothing
    to V1 otherwise (success zero there, the verifier sees no qubit).
    """
    layout = attack_layout(a=1)
    psi = qc.assemble(layout, [(("R", "A"), qc.BELL_VECTOR),
                               (("B",), np.array([1.0, 0.0]))])
    site = {(x, y): "A" for x, y in f.pairs()}
    return AttackStrategy(kind="route", n=f.n, layout=layout, psi=psi,
                          qubit_site=site)


def classical_copy_attack(f, geom: Geometry | None = None):
    """The copy-and-relay attack on the PURELY CLASSICAL protocol variant.

    Both attackers copy the intercepted input, exchange copies, and return
    f(x, y) to their nearest verifier with honest-looking timing.  Returns
    the attack report (success 1 on every pair) and one event log.
    """
    geom = geom or Geometry()
    per_pair = {(x, y): 1.0 for x, y in f.pairs()}
    events = two_attacker_relay_events(geom, 0, 0, [0, 1])
    assert timing_check(events, geom)
    return AttackReport(n=f.n, per_pair=per_pair, average=1.0), events


def swap_in_attack(f) -> AttackStrategy:
    """Alice forwards the qubit through the communication register whenever
    she can already evaluate the function from x alone; used as a perfect
    attack for functions that depend only on x."""
    layout = attack_layout(a=1, ac=1)
    psi = qc.assemble(layout, [(("R", "A"), qc.BELL_VECTOR),
                               (("Ac",), np.array([1.0, 0.0])),
                               (("B",), np.array([1.0, 0.0])),
                               (("Bc",), np.array([1.0, 0.0]))])
    dim_local = layout.subdim(*ALICE_LOCAL)
    swap_a_ac = qc.compose_on_qubits(2, [(qc.SWAP2, [0, 1])])
    alice = {}
    site = {}
    values = {x: {f.value(x, y) for y in range(1 << f.n)} for x in range(1 << f.n)}
    for x, vals in values.items():
        if vals == {1}:
            alice[x] = swap_a_ac
    l_swap = qc.compose_on_qubits(2, [(qc.SWAP2, [0, 1])])  # B <-> Ac
    l_final = {}
    for x, y in f.pairs():
        forwarded = x in alice
        site[(x, y)] = "B" if forwarded else "A"
        if forwarded and f.value(x, y) == 1:
            l_final[(x, y)] = l_swap
    return AttackStrategy(kind="route", n=f.n, layout=layout, psi=psi,
                          alice=alice, l_final=l_final, qubit_site=site)
