"""See-saw search over two-phase strategies.

Each sweep optimizes one family at a time holding the rest fixed: unitary
families move to the polar factor of the linearized objective (accepted
only when the true objective does not decrease, so sweeps are monotone),
measurement effects jump to the exact Helstrom optimum, and the shared
state moves toward the top eigenvector of the effective Hamiltonian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import qcore as qc
from .execute import epsilon_l_report
from .strategy import (
    ALICE_FINAL,
    ALICE_LOCAL,
    BOB_FINAL,
    BOB_LOCAL,
    AttackReport,
    AttackStrategy,
    attack_layout,
)

DEFAULT_TOL = 1e-9


def polar_unitary(w: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(w)
    return u @ vh


def random_effect(dim: int, rng) -> np.ndarray:
    """Random projector onto half the space (seed for POVM sweeps)."""
    u = qc.haar_random_unitary(dim, rng)
    keep = dim // 2 if dim > 1 else 1
    basis = u[:, :keep]
    return basis @ basis.conj().T


def helstrom_effect(d0: np.ndarray, d1: np.ndarray) -> np.ndarray:
    """Projector onto the positive eigenspace of d0 - d1 (optimal two-outcome
    discrimination of the weighted alternatives)."""
    diff = d0 - d1
    diff = (diff + diff.conj().T) / 2
    vals, vecs = np.linalg.eigh(diff)
    pos = vecs[:, vals > 0]
    return pos @ pos.conj().T


class _Work:
    """Mutable optimization state; frozen into an AttackStrategy at the end."""

    def __init__(self, kind, f, layout, psi_vec, rng, fix_psi):
        self.kind = kind
        self.f = f
        self.layout = layout
        self.psi = psi_vec
        self.fix_psi = fix_psi
        self.side = 1 << f.n
        self.pairs = [(x, y) for x in range(self.side) for y in range(self.side)]
        da = layout.subdim(*ALICE_LOCAL)
        db = layout.subdim(*BOB_LOCAL)
        dka = layout.subdim(*ALICE_FINAL)
        dkb = layout.subdim(*BOB_FINAL)
        self.alice = {x: qc.haar_random_unitary(da, rng) for x in range(self.side)}
        self.bob = {y: qc.haar_random_unitary(db, rng) for y in range(self.side)}
        if kind == "route":
            self.k_final = {p: qc.haar_random_unitary(dka, rng) for p in self.pairs}
            self.l_final = {p: qc.haar_random_unitary(dkb, rng) for p in self.pairs}
            self.pi = self.sigma = None
        else:
            self.k_final = self.l_final = None
            self.pi = {p: random_effect(dka, rng) for p in self.pairs}
            self.sigma = {p: random_effect(dkb, rng) for p in self.pairs}

    # -- state propagation helpers (raw vectors) ---------------------------

    def _apply(self, vec, mat, regs, dagger=False):
        m = mat.conj().T if dagger else mat
        return qc.apply_vector_matrix(vec, self.layout, m, regs)

    def after_locals(self, x, y, psi=None):
        vec = self.psi if psi is None else psi
        vec = self._apply(vec, self.alice[x], ALICE_LOCAL)
        vec = self._apply(vec, self.bob[y], BOB_LOCAL)
        return vec

    def ret_register(self, x, y):
        return "A" if self.f.value(x, y) == 0 else "B"

    def pair_success(self, x, y, psi=None):
        vec = self.after_locals(x, y, psi)
        if self.kind == "route":
            vec = self._apply(vec, self.k_final[(x, y)], ALICE_FINAL)
            vec = self._apply(vec, self.l_final[(x, y)], BOB_FINAL)
            rho = qc.reduced_outer(vec, vec, self.layout, ("R", self.ret_register(x, y)))
            return float(np.vdot(qc.BELL_VECTOR, rho @ qc.BELL_VECTOR).real)
        theta = self.f.value(x, y)
        pi, sg = self.pi[(x, y)], self.sigma[(x, y)]
        total = 0.0
        for z, (ea, eb) in enumerate(((pi, sg), (np.eye(pi.shape[0]) - pi,
                                                 np.eye(sg.shape[0]) - sg))):
            out = self._apply(vec, qc.basis_projectors(theta)[z], ("R",))
            out = self._apply(out, ea, ALICE_FINAL)
            out = self._apply(out, eb, BOB_FINAL)
            total += float(np.vdot(vec, out).real)
        return total

    def average(self, psi=None):
        return float(np.mean([self.pair_success(x, y, psi) for x, y in self.pairs]))

    # -- sweep updates ------------------------------------------------------

    def _bell_effect(self, vec, x, y):
        """M |v> with M the Bell projector on (R, returned register)."""
        ret = self.ret_register(x, y)
        bell = np.outer(qc.BELL_VECTOR, qc.BELL_VECTOR.conj())
        return self._apply(vec, bell, ("R", ret))

    def _meas_effect(self, vec, x, y):
        """G |v> with G = sum_z P_z E^A_z E^B_z for the current effects."""
        theta = self.f.value(x, y)
        pi, sg = self.pi[(x, y)], self.sigma[(x, y)]
        out = np.zeros_like(vec)
        for z, (ea, eb) in enumerate(((pi, sg), (np.eye(pi.shape[0]) - pi,
                                                 np.eye(sg.shape[0]) - sg))):
            w = self._apply(vec, qc.basis_projectors(theta)[z], ("R",))
            w = self._apply(w, ea, ALICE_FINAL)
            w = self._apply(w, eb, BOB_FINAL)
            out += w
        return out

    def update_recovery(self, sub_iters=3):
        for (x, y) in self.pairs:
            ret = self.ret_register(x, y)
            regs, table = ((ALICE_FINAL, self.k_final) if ret == "A"
                           else (BOB_FINAL, self.l_final))
            vec = self.after_locals(x, y)
            if ret == "A":
                vec = self._apply(vec, self.l_final[(x, y)], BOB_FINAL)
            else:
                vec = self._apply(vec, self.k_final[(x, y)], ALICE_FINAL)
            current = table[(x, y)]
            score = self._recovery_score(vec, current, regs, x, y)
            for _ in range(sub_iters):
                moved = self._apply(vec, current, regs)
                grad = qc.reduced_outer(self._bell_effect(moved, x, y), vec,
                                        self.layout, regs, order="given")
                cand = polar_unitary(grad)
                cand_score = self._recovery_score(vec, cand, regs, x, y)
                if cand_score > score + 1e-15:
                    current, score = cand, cand_score
                else:
                    break
            table[(x, y)] = current

    def _recovery_score(self, vec, mat, regs, x, y):
        moved = self._apply(vec, mat, regs)
        rho = qc.reduced_outer(moved, moved, self.layout, ("R", self.ret_register(x, y)))
        return float(np.vdot(qc.BELL_VECTOR, rho @ qc.BELL_VECTOR).real)

    def update_effects(self):
        for (x, y) in self.pairs:
            theta = self.f.value(x, y)
            vec = self.after_locals(x, y)
            proj = qc.basis_projectors(theta)
            # Alice: D_z on her finale registers with Bob's effect fixed
            sg = self.sigma[(x, y)]
            d = []
            for z, eb in enumerate((sg, np.eye(sg.shape[0]) - sg)):
                w = self._apply(vec, proj[z], ("R",))
                w = self._apply(w, eb, BOB_FINAL)
                d.append(qc.reduced_outer(w, vec, self.layout, ALICE_FINAL, order="given"))
            self.pi[(x, y)] = helstrom_effect(d[0], d[1])
            # Bob with Alice's fresh effect fixed
            pi = self.pi[(x, y)]
            d = []
            for z, ea in enumerate((pi, np.eye(pi.shape[0]) - pi)):
                w = self._apply(vec, proj[z], ("R",))
                w = self._apply(w, ea, ALICE_FINAL)
                d.append(qc.reduced_outer(w, vec, self.layout, BOB_FINAL, order="given"))
            self.sigma[(x, y)] = helstrom_effect(d[0], d[1])

    def _pair_effect_after_locals(self, vec, x, y):
        """Effective measurement sandwiched by the finale for one pair."""
        if self.kind == "route":
            w = self._apply(vec, self.k_final[(x, y)], ALICE_FINAL)
            w = self._apply(w, self.l_final[(x, y)], BOB_FINAL)
            w = self._bell_effect(w, x, y)
            w = self._apply(w, self.l_final[(x, y)], BOB_FINAL, dagger=True)
            return self._apply(w, self.k_final[(x, y)], ALICE_FINAL, dagger=True)
        w = self._meas_effect(vec, x, y)
        return w

    def update_local(self, who):
        table, regs = ((self.alice, ALICE_LOCAL) if who == "alice"
                       else (self.bob, BOB_LOCAL))
        side_inputs = range(self.side)
        for val in side_inputs:
            pair_list = ([(val, y) for y in range(self.side)] if who == "alice"
                         else [(x, val) for x in range(self.side)])
            old_score = sum(self.pair_success(x, y) for x, y in pair_list)
            grad = np.zeros((self.layout.subdim(*regs),) * 2, dtype=complex)
            for (x, y) in pair_list:
                vec = self.after_locals(x, y)
                eff = self._pair_effect_after_locals(vec, x, y)
                other = (self.bob[y], BOB_LOCAL) if who == "alice" else (self.alice[x], ALICE_LOCAL)
                back = self._apply(eff, other[0], other[1], dagger=True)
                grad += qc.reduced_outer(back, self.psi, self.layout, regs, order="given")
            cand = polar_unitary(grad)
            old = table[val]
            table[val] = cand
            new_score = sum(self.pair_success(x, y) for x, y in pair_list)
            if new_score < old_score - 1e-15:
                table[val] = old

    def update_psi(self, power_iters=40):
        if self.fix_psi:
            return
        def hmat_vec(v):
            out = np.zeros_like(v)
            for (x, y) in self.pairs:
                w = self._apply(v, self.alice[x], ALICE_LOCAL)
                w = self._apply(w, self.bob[y], BOB_LOCAL)
                w = self._pair_effect_after_locals(w, x, y)
                w = self._apply(w, self.bob[y], BOB_LOCAL, dagger=True)
                w = self._apply(w, self.alice[x], ALICE_LOCAL, dagger=True)
                out += w
            return out / len(self.pairs)

        old_score = self.average()
        v = self.psi.copy()
        for _ in range(power_iters):
            v = hmat_vec(v)
            nrm = np.linalg.norm(v)
            if nrm < 1e-30:
                return
            v = v / nrm
        if self.average(v) > old_score + 1e-15:
            self.psi = v

    def sweep(self):
        if self.kind == "route":
            self.update_recovery()
        else:
            self.update_effects()
        self.update_local("alice")
        self.update_local("bob")
        self.update_psi()
        return self.average()

    def freeze(self) -> AttackStrategy:
        psi = qc.QuantumState(self.layout, "pure", self.psi / np.linalg.norm(self.psi))
        if self.kind == "route":
            return AttackStrategy(kind="route", n=self.f.n, layout=self.layout,
                                  psi=psi, alice=dict(self.alice), bob=dict(self.bob),
                                  k_final=dict(self.k_final), l_final=dict(self.l_final))
        return AttackStrategy(kind="meas", n=self.f.n, layout=self.layout, psi=psi,
                              alice=dict(self.alice), bob=dict(self.bob),
                              pi_effect=dict(self.pi), sigma_effect=dict(self.sigma))


@dataclass(frozen=True)
class SeesawOutcome:
    strategy: AttackStrategy
    report: AttackReport
    best_value: float
    restart_values: tuple[float, ...]


def default_split(q: int) -> tuple[int, int, int]:
    """Width split (A, At, Ac) of one attacker's q qubits; the returned-qubit
    slot takes one and the rest goes to the communication register."""
    if q < 1:
        raise ValueError("attackers need at least the stored-qubit register")
    return 1, 0, q - 1


def seesaw_optimize(f, q: int = 2, kind: str = "route", restarts: int = 20,
                    iters: int = 60, seed: int = 0,
                    split: tuple[int, int, int] | None = None,
                    fix_psi: qc.QuantumState | None = None,
                    tol: float = DEFAULT_TOL) -> SeesawOutcome:
    """Best strategy found over random restarts of monotone see-saw sweeps.

    ``fix_psi`` pins the pre-shared state (e.g. the unentangled product
    state) and restricts the search to unitaries and measurements.
    """
    a, at, ac = split if split is not None else default_split(q)
    layout = attack_layout(a=a, at=at, ac=ac)
    if fix_psi is not None and fix_psi.layout.dim != layout.dim:
        raise ValueError("fixed psi does not match the layout")
    best: _Work | None = None
    best_val = -1.0
    values = []
    for r in range(restarts):
        rng = qc.stream(seed, "restart", r)
        psi_vec = (np.asarray(fix_psi.data) if fix_psi is not None
                   else qc.random_unit_vector(layout.dim, rng))
        work = _Work(kind, f, layout, psi_vec, rng, fix_psi is not None)
        prev = work.average()
        for _ in range(iters):
            cur = work.sweep()
            if cur < prev - 1e-12:
                raise AssertionError("see-saw sweep decreased the objective")
            if cur - prev < tol:
                prev = cur
                break
            prev = cur
        values.append(prev)
        if prev > best_val:
            best_val, best = prev, work
    strategy = best.freeze()
    report = epsilon_l_report(strategy, f)
    return SeesawOutcome(strategy=strategy, report=report,
                         best_value=best_val, restart_values=tuple(values))


def unentangled_product_state(layout: qc.RegisterLayout) -> qc.QuantumState:
    """|Omega>_RA on the stored-qubit slot, |0...0> everywhere else."""
    if layout.width("A") != 1:
        raise ValueError("needs a 1-qubit A register")
    rest = [name for name in layout.names if name not in ("R", "A") and layout.width(name)]
    factors = [(("R", "A"), qc.BELL_VECTOR)]
    for name in rest:
        dim = layout.subdim(name)
        e0 = np.zeros(dim, dtype=complex)
        e0[0] = 1.0
        factors.append(((name,), e0))
    return qc.assemble(layout, factors)


def angle_grid_value(f, resolution: int = 1000, per_x: bool = False) -> float:
    """Best average success of measure-and-broadcast attacks on the measuring
    protocol, over single-qubit measurement angles.

    Alice measures the stored qubit at an angle in the X-Z great circle and
    both attackers report the outcome; the verifier measures in the basis
    picked by f.  ``per_x`` lets the angle depend on Alice's input.
    """
    side = 1 << f.n
    angles = np.linspace(0.0, math.pi / 2, resolution)

    def pair_value(theta_f, alpha):
        target = theta_f * math.pi / 4
        return math.cos(alpha - target) ** 2

    if not per_x:
        best = 0.0
        for alpha in angles:
            avg = np.mean([pair_value(f.value(x, y), alpha) for x, y in f.pairs()])
            best = max(best, float(avg))
        return best
    total = 0.0
    for x in range(side):
        best_x = 0.0
        for alpha in angles:
            avg = np.mean([pair_value(f.value(x, y), alpha) for y in range(side)])
            best_x = max(best_x, float(avg))
        total += best_x
    return total / side
