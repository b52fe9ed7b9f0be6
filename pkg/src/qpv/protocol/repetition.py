"""Sequential repetition and the noisy-threshold acceptance rule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..qcore.rng import stream
from .provers import HONEST, Prover, SyntheticAdversary
from .runs import RUNNERS, accept_probability

THRESHOLD_FACTOR = 0.996
ETA_MAX = 1e-2


@dataclass(frozen=True)
class NoisyRepeatConfig:
    rounds: int
    eta: float

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("need at least one round")
        if not 0.0 <= self.eta <= ETA_MAX:
            raise ValueError(f"noise level must be in [0, {ETA_MAX}]")

    @property
    def threshold(self) -> float:
        return THRESHOLD_FACTOR * (1.0 - self.eta) * self.rounds


@dataclass(frozen=True)
class RepetitionResult:
    outcomes: tuple[bool, ...]
    accept_count: int
    accepted: bool


def _fresh_inputs(f, rng) -> tuple[int, int]:
    side = 1 << f.n
    return int(rng.integers(side)), int(rng.integers(side))


def repeat_sequential(protocol: str, f, rounds: int, prover=HONEST, seed=0,
                      **run_kw) -> RepetitionResult:
    """Run ``rounds`` independent rounds with fresh uniform inputs; accept
    only if every round accepts."""
    if rounds < 1:
        raise ValueError("need at least one round")
    runner = RUNNERS[protocol]
    outcomes = []
    for i in range(rounds):
        x, y = _fresh_inputs(f, stream(seed, "inputs", i))
        run = runner(f, x, y, prover, seed=stream(seed, "round", i), **run_kw)
        outcomes.append(run.accepted)
    count = sum(outcomes)
    return RepetitionResult(tuple(outcomes), count, count == rounds)


def _round_outcome(protocol, f, prover, config, rng_inputs, rng_round, rng_noise,
                   noise_mode) -> bool:
    x, y = _fresh_inputs(f, rng_inputs)
    depolarize = 0.0
    if noise_mode == "depolarizing" and isinstance(prover, Prover):
        # calibrated so the honest per-round failure is exactly eta: the Bell
        # test detects 3 of 4 twirl branches, the single-basis checks 2 of 4
        depolarize = (4 * config.eta / 3 if protocol == "route_entangled"
                      else 2 * config.eta)
    run = RUNNERS[protocol](f, x, y, prover, seed=rng_round, depolarize=depolarize)
    outcome = run.accepted
    if noise_mode == "bernoulli" and isinstance(prover, Prover):
        outcome = outcome and (rng_noise.random() >= config.eta)
    return outcome


def run_noisy_threshold(config: NoisyRepeatConfig, protocol: str, f,
                        prover=HONEST, seed=0,
                        noise_mode: str = "bernoulli") -> RepetitionResult:
    """One repeated protocol with the accept-count threshold rule.

    Accepts iff strictly more than 0.996*(1-eta)*rounds rounds accept (a tie
    at the threshold rejects).  Honest-device noise is a per-round Bernoulli
    corruption of the verdict by default; ``noise_mode='depolarizing'``
    instead degrades the travelling qubit physically.
    """
    if noise_mode not in ("bernoulli", "depolarizing"):
        raise ValueError(f"unknown noise mode {noise_mode!r}")
    outcomes = []
    for i in range(config.rounds):
        outcomes.append(_round_outcome(
            protocol, f, prover, config,
            stream(seed, "inputs", i), stream(seed, "round", i),
            stream(seed, "noise", i), noise_mode))
    count = sum(outcomes)
    return RepetitionResult(tuple(outcomes), count, count > config.threshold)


def constant_round_probability(protocol: str, f, prover, config: NoisyRepeatConfig,
                               noise_mode: str = "bernoulli"):
    """Per-round success probability when it does not depend on the inputs.

    Returns None when rounds are genuinely input-dependent, in which case the
    Monte Carlo helpers fall back to full per-round simulation.
    """
    if isinstance(prover, SyntheticAdversary):
        return prover.p
    side = 1 << f.n
    probs = {accept_probability(protocol, f, x, y, prover)
             for x in range(side) for y in range(side)}
    if len(probs) > 1 and max(probs) - min(probs) > 1e-12:
        return None
    p = probs.pop()
    if noise_mode == "bernoulli" and isinstance(prover, Prover):
        p *= (1.0 - config.eta)
    elif noise_mode == "depolarizing" and isinstance(prover, Prover):
        p *= 1.0  # depolarizing noise is already part of the round simulation
    return p


def noisy_threshold_trials(config: NoisyRepeatConfig, protocol: str, f,
                           prover=HONEST, seed=0, trials: int = 1000,
                           noise_mode: str = "bernoulli") -> dict:
    """Monte Carlo acceptance rate of the noisy-threshold protocol.

    When the per-round success probability is input-independent (honest
    provers, synthetic adversaries) the rounds are exact Bernoulli draws and
    the trial loop vectorizes; otherwise each round is simulated in full.
    """
    p_round = constant_round_probability(protocol, f, prover, config, noise_mode)
    if p_round is not None:
        rng = stream(seed, "vectorized")
        counts = rng.binomial(config.rounds, p_round, size=trials)
        accepted = counts > config.threshold
        rate = float(np.mean(accepted))
    else:
        flags = []
        counts = np.empty(trials, dtype=int)
        for t in range(trials):
            res = run_noisy_threshold(config, protocol, f, prover,
                                      seed=stream(seed, "trial", t),
                                      noise_mode=noise_mode)
            counts[t] = res.accept_count
            flags.append(res.accepted)
        rate = float(np.mean(flags))
    sigma = math.sqrt(max(rate * (1 - rate), 1e-12) / trials)
    return {
        "trials": trials,
        "rounds": config.rounds,
        "eta": config.eta,
        "threshold": config.threshold,
        "acceptance_rate": rate,
        "rate_sigma": sigma,
        "mean_accept_count": float(np.mean(counts)),
        "per_round_probability": p_round,
    }
