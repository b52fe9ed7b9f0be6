"""Executable state machines for the routing and measuring protocols."""

from .geometry import (
    CHALLENGE_ARRIVAL,
    Geometry,
    SpacetimeEvent,
    honest_challenge_events,
    response_events,
    timing_check,
)
from .provers import HONEST, Prover, SyntheticAdversary
from .repetition import (
    NoisyRepeatConfig,
    RepetitionResult,
    constant_round_probability,
    noisy_threshold_trials,
    repeat_sequential,
    run_noisy_threshold,
)
from .runs import (
    PROTOCOLS,
    RUNNERS,
    ProtocolRun,
    accept_probability,
    m1_accept_probability,
    m2_accept_probability,
    meas_accept_probability,
    route_bb84_accept_probability,
    route_entangled_accept_probability,
    run_meas,
    run_route_bb84,
    run_route_entangled,
)

__all__ = [name for name in dir() if not name.startswith("_")]
