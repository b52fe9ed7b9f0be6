"""One-dimensional spacetime model: verifier/prover positions and timing."""

from __future__ import annotations

from dataclasses import dataclass, field

TIMING_TOL = 1e-12

# challenges are synchronized to reach the prover position at this time,
# leaving room for the verifier-to-verifier prologue at nonnegative times
CHALLENGE_ARRIVAL = 2.0


@dataclass(frozen=True)
class Geometry:
    z: float = 0.5
    v0_pos: float = 0.0
    v1_pos: float = 1.0
    signal_speed: float = 1.0

    def __post_init__(self):
        if not self.v0_pos < self.z < self.v1_pos:
            raise ValueError(f"prover position {self.z} must lie strictly between the verifiers")

    def verifier_pos(self, which: int) -> float:
        return self.v0_pos if which == 0 else self.v1_pos

    def travel_time(self, a: float, b: float) -> float:
        return abs(a - b) / self.signal_speed


@dataclass(frozen=True)
class SpacetimeEvent:
    actor: str
    position: float
    time: float
    label: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.time < 0:
            raise ValueError("event times must be nonnegative")


def honest_challenge_events(geom: Geometry, x: int, y: int) -> list[SpacetimeEvent]:
    t_arrive = CHALLENGE_ARRIVAL
    t_v0 = t_arrive - geom.travel_time(geom.v0_pos, geom.z)
    t_v1 = t_arrive - geom.travel_time(geom.v1_pos, geom.z)
    t_relay = t_v1 - geom.travel_time(geom.v0_pos, geom.v1_pos)
    return [
        SpacetimeEvent("V0", geom.v0_pos, t_relay, "relay_y_to_v1", {"y": y}),
        SpacetimeEvent("V0", geom.v0_pos, t_v0, "dispatch_challenge", {"x": x, "carries_qubit": True}),
        SpacetimeEvent("V1", geom.v1_pos, t_v1, "dispatch_challenge", {"y": y}),
        SpacetimeEvent("P", geom.z, t_arrive, "challenge_arrival", {"x": x, "y": y}),
    ]


def response_events(geom: Geometry, targets: list[int], *, delay: float = 0.0,
                    actual_position: float | None = None,
                    payload: dict | None = None) -> list[SpacetimeEvent]:
    """Dispatch + arrival events for a response sent to each target verifier.

    A prover not at z (``actual_position``) times its dispatch so that the
    FIRST target's arrival matches an origin at z; other targets then see
    inconsistent times, which is what the timing check detects.
    """
    payload = payload or {}
    pos = geom.z if actual_position is None else actual_position
    events = []
    t_honest = CHALLENGE_ARRIVAL + delay
    for i, v in enumerate(targets):
        vpos = geom.verifier_pos(v)
        if actual_position is None:
            t_send = t_honest
        elif i == 0:
            # match the honest arrival time at the first target
            t_send = (CHALLENGE_ARRIVAL + geom.travel_time(geom.z, vpos)
                      - geom.travel_time(pos, vpos)) + delay
        events.append(SpacetimeEvent("P", pos, t_send, "response_dispatch",
                                     {"verifier": v, **payload}))
        events.append(SpacetimeEvent(f"V{v}", vpos, t_send + geom.travel_time(pos, vpos),
                                     "response_arrival", {"verifier": v, **payload}))
    return events


def two_attacker_relay_events(geom: Geometry, x: int, y: int,
                              targets: list[int]) -> list[SpacetimeEvent]:
    """Event log of the classical copy-and-relay attack (Alice/Bob between
    the verifiers and z); arrival times mimic an origin at z exactly."""
    a_pos = (geom.v0_pos + geom.z) / 2
    b_pos = (geom.z + geom.v1_pos) / 2
    t_a = CHALLENGE_ARRIVAL - geom.travel_time(a_pos, geom.z)
    t_b = CHALLENGE_ARRIVAL - geom.travel_time(b_pos, geom.z)
    events = [
        SpacetimeEvent("Alice", a_pos, t_a, "intercept", {"x": x}),
        SpacetimeEvent("Bob", b_pos, t_b, "intercept", {"y": y}),
        SpacetimeEvent("Alice", a_pos, t_a, "forward_to_peer", {"x": x}),
        SpacetimeEvent("Bob", b_pos, t_b, "forward_to_peer", {"y": y}),
        SpacetimeEvent("P", geom.z, CHALLENGE_ARRIVAL, "challenge_arrival",
                       {"x": x, "y": y}),
    ]
    for v in targets:
        vpos = geom.verifier_pos(v)
        attacker, pos = ("Alice", a_pos) if v == 0 else ("Bob", b_pos)
        t_send = (CHALLENGE_ARRIVAL + geom.travel_time(geom.z, vpos)
                  - geom.travel_time(pos, vpos))
        events.append(SpacetimeEvent(attacker, pos, t_send, "response_dispatch",
                                     {"verifier": v}))
        events.append(SpacetimeEvent(f"V{v}", vpos,
                                     t_send + geom.travel_time(pos, vpos),
                                     "response_arrival", {"verifier": v}))
    return events


def timing_check(events: list[SpacetimeEvent], geom: Geometry | None = None) -> bool:
    """True iff every response arrival is consistent with an origin at z.

    Each arrival time must equal the challenge-arrival time at z plus the
    signal travel time from z to that verifier, within 1e-12.
    """
    geom = geom or Geometry()
    t_challenge = None
    for ev in events:
        if ev.label == "challenge_arrival":
            t_challenge = ev.time
    if t_challenge is None:
        return False
    arrivals = [ev for ev in events if ev.label == "response_arrival"]
    if not arrivals:
        return False
    for ev in arrivals:
        expected = t_challenge + geom.travel_time(geom.z, ev.position)
        if abs(ev.time - expected) > TIMING_TOL:
            return False
    return True
