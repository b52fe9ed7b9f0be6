"""Command-line orchestration: simulate protocols, optimize attacks, compute
bounds, and run the verification suites.

Outputs are JSON / JSON-lines / CSV only, carry a provenance header
(config hash, seed, version), and are byte-identical for identical config
and seed.  Exit codes: 0 ok, 1 verification failure, 2 usage or config
error, 3 enumeration/resource budget exceeded.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__, analysis, attacks, checks, protocol
from .analysis.commcplx import BudgetExceeded
from .qcore.rng import stream

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3

ROUND_SIM_LIMIT = 5_000_000


class ConfigError(Exception):
    pass


def _require_keys(obj: dict, where: str, required: tuple = (), optional: tuple = ()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ConfigError(f"{where}: missing keys {missing}")


def _provenance(config: dict, seed: int) -> dict:
    canonical = json.dumps(config, sort_keys=True).encode()
    return {
        "config_sha256": hashlib.sha256(canonical).hexdigest(),
        "seed": seed,
        "version": __version__,
    }


def _function_from_config(config: dict, seed: int):
    spec = dict(config["f"])
    _require_keys(spec, "f", ("kind",), ("n", "seed", "table", "bit", "path"))
    if spec["kind"] == "file":
        return analysis.load_function(spec["path"])
    spec.setdefault("n", config.get("n"))
    if spec["kind"] == "random" and "seed" not in spec:
        spec["seed"] = seed
    return analysis.function_from_spec(spec)


def _prover_from_config(config: dict):
    spec = config.get("prover", {"kind": "honest"})
    _require_keys(spec, "prover", ("kind",), ("p", "state", "basis", "path"))
    kind = spec["kind"]
    if kind == "honest":
        return protocol.HONEST
    if kind == "synthetic":
        return protocol.SyntheticAdversary(float(spec["p"]))
    if kind == "keep_q":
        return "keep_q"  # resolved once the function is known
    if kind == "strategy":
        with open(spec["path"], "r", encoding="ascii") as fh:
            return attacks.strategy_from_json(fh.read())
    if kind == "wrong_basis":
        return protocol.Prover(meas_mode="wrong_basis")
    if kind == "random_bit":
        return protocol.Prover(meas_mode="random_bit")
    if kind == "discard":
        return protocol.Prover(replace_with=int(spec.get("state", 0)))
    if kind == "measure_forward":
        return protocol.Prover(premeasure_basis=int(spec.get("basis", 0)))
    if kind == "route_wrong":
        return protocol.Prover(route_to="swapped")
    raise ConfigError(f"prover: unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(config: dict, seed: int, threads: int):
    _require_keys(config, "config",
                  ("protocol", "n", "f", "rounds"),
                  ("eta", "trials", "prover", "noise_mode", "require_both"))
    proto = config["protocol"]
    if proto not in protocol.PROTOCOLS:
        raise ConfigError(f"unknown protocol {proto!r}")
    rounds = int(config["rounds"])
    trials = int(config.get("trials", 1))
    eta = float(config.get("eta", 0.0))
    noise_mode = config.get("noise_mode", "bernoulli")
    if rounds < 1 or trials < 1:
        raise ConfigError("rounds and trials must be positive")
    if rounds * trials > ROUND_SIM_LIMIT:
        raise BudgetExceeded(f"{rounds}x{trials} rounds exceed the simulation budget")
    f = _function_from_config(config, seed)
    prover = _prover_from_config(config)
    if prover == "keep_q":
        prover = attacks.keep_q_attack(f)
    cfg = protocol.NoisyRepeatConfig(rounds=rounds, eta=eta)

    p_round = protocol.constant_round_probability(proto, f, prover, cfg, noise_mode)
    side = 1 << f.n
    rows = []
    accept_counts = np.zeros(trials, dtype=int)

    def run_trial(t):
        rng_inputs = stream(seed, "inputs", t)
        xs = rng_inputs.integers(side, size=rounds)
        ys = rng_inputs.integers(side, size=rounds)
        if p_round is not None:
            draws = stream(seed, "round", t).random(rounds)
            outcomes = draws < p_round
        else:
            outcomes = np.zeros(rounds, dtype=bool)
            for i in range(rounds):
                run = protocol.RUNNERS[proto](f, int(xs[i]), int(ys[i]), prover,
                                              seed=stream(seed, "round", t, i))
                ok = run.accepted
                if noise_mode == "bernoulli" and isinstance(prover, protocol.Prover):
                    ok = ok and (stream(seed, "noise", t, i).random() >= eta)
                outcomes[i] = ok
        return t, xs, ys, outcomes

    results = []
    if threads > 1 and trials > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_trial, range(trials)))
    else:
        results = [run_trial(t) for t in range(trials)]
    results.sort(key=lambda item: item[0])

    total_rounds = 0
    total_accepts = 0
    for t, xs, ys, outcomes in results:
        accept_counts[t] = int(outcomes.sum())
        total_rounds += rounds
        total_accepts += int(outcomes.sum())
        for i in range(rounds):
            rows.append((t, i, int(xs[i]), int(ys[i]), int(outcomes[i])))

    threshold_pass = accept_counts > cfg.threshold
    round_rate = total_accepts / total_rounds
    thr_rate = float(np.mean(threshold_pass))

    def ci95(rate, n):
        if n <= 1:
            return [0.0, 1.0]
        half = 1.96 * math.sqrt(max(rate * (1 - rate), 1e-12) / n)
        return [max(0.0, rate - half), min(1.0, rate + half)]

    summary = {
        "provenance": _provenance(config, seed),
        "protocol": proto,
        "rounds": rounds,
        "trials": trials,
        "eta": eta,
        "threshold": cfg.threshold,
        "acceptance_rate": round_rate,
        "acceptance_rate_ci95": ci95(round_rate, total_rounds),
        "threshold_acceptance_rate": thr_rate,
        "threshold_acceptance_rate_ci95": ci95(thr_rate, trials),
        "per_round_probability": p_round,
    }
    return summary, rows


def _rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write("trial,round,x,y,accepted\n")
    for row in rows:
        buf.write(",".join(str(v) for v in row) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# attack-optimize
# ---------------------------------------------------------------------------

def cmd_attack_optimize(config: dict, seed: int):
    _require_keys(config, "config", ("f",),
                  ("n", "kind", "q", "split", "restarts", "iters", "unentangled",
                   "epsilon", "gardenhose"))
    f = _function_from_config(config, seed)
    eps = float(config.get("epsilon", 0.1))
    if "gardenhose" in config:
        gh_spec = config["gardenhose"]
        _require_keys(gh_spec, "gardenhose", ("pipes", "alice", "bob"), ())

        def parse_matching(table):
            out = {}
            for key, pairs in table.items():
                out[int(key)] = tuple(
                    tuple(p if p == "S" else int(p) for p in pair) for pair in pairs)
            return out

        gh = attacks.GardenHoseProtocol(pipes=int(gh_spec["pipes"]),
                                        alice=parse_matching(gh_spec["alice"]),
                                        bob=parse_matching(gh_spec["bob"]))
        strategy = attacks.compile_gardenhose(gh)
        report = attacks.epsilon_l_report(strategy, f, eps)
        extra = {"gardenhose_computes_f": attacks.computes(gh, f)}
    else:
        kind = config.get("kind", "route")
        q = int(config.get("q", 2))
        split = tuple(config["split"]) if "split" in config else None
        fix_psi = None
        if config.get("unentangled"):
            a, at, ac = split if split else attacks.default_split(q)
            fix_psi = attacks.unentangled_product_state(
                attacks.attack_layout(a=a, at=at, ac=ac))
        outcome = attacks.seesaw_optimize(
            f, q=q, kind=kind, restarts=int(config.get("restarts", 20)),
            iters=int(config.get("iters", 60)), seed=seed, split=split,
            fix_psi=fix_psi)
        strategy = outcome.strategy
        report = outcome.report
        extra = {"restart_values": list(outcome.restart_values),
                 "best_value": outcome.best_value}
    doc = {
        "provenance": _provenance(config, seed),
        "report": report.as_dict(eps),
        **extra,
    }
    return doc, attacks.strategy_to_json(strategy)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def cmd_bounds(config: dict, seed: int):
    _require_keys(config, "config", ("kind",),
                  ("n", "q", "k", "f", "f_kind", "model", "lambda", "error"))
    kind = config["kind"]
    out = {"provenance": _provenance(config, seed), "kind": kind}
    if kind == "counting":
        report = analysis.counting_bound(int(config["n"]), int(config["q"]))
        out.update(report.as_dict())
    elif kind == "net_size":
        out.update(analysis.net_size_report(int(config["q"])).as_dict())
    elif kind == "delta_margin":
        out["value"] = float(analysis.delta_margin_value())
        out["passes"] = analysis.delta_margin_check()
    elif kind == "volume":
        from fractions import Fraction
        lam = Fraction(config["lambda"])
        out["passes"] = analysis.volume_entropy_check(int(config["n"]), lam)
    elif kind == "qubit_bound":
        f_kind = config["f_kind"]
        if f_kind == "random":
            out["q_max"] = analysis.attacker_qubit_bound("random", n=int(config["n"]))
            if int(config["n"]) < 10:
                out["precondition_note"] = "guarantee requires n >= 10"
        elif f_kind == "cc":
            if "k" in config:
                k = int(config["k"])
            else:
                f = _function_from_config(config, seed)
                k = analysis.smp_cc(f)
                out["smp_cc"] = k
            out["q_max"] = analysis.attacker_qubit_bound("cc", k=k)
        else:
            raise ConfigError(f"unknown f_kind {f_kind!r}")
    elif kind == "cc":
        f = _function_from_config(config, seed)
        model = config.get("model", "smp")
        k = int(config["k"])
        if model == "smp":
            err = analysis.smp_cc_bruteforce(f, k)
        elif model == "oneway":
            err = analysis.oneway_cc_bruteforce(f, k)
        else:
            raise ConfigError(f"unknown model {model!r}")
        out["k"] = k
        out["model"] = model
        out["error"] = [err.numerator, err.denominator]
        out["error_float"] = float(err)
    else:
        raise ConfigError(f"unknown bounds kind {kind!r}")
    return out


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(names, seed: int, threads: int):
    if names == ["all"]:
        names = list(checks.CHECKS)
    unknown = [n for n in names if n not in checks.CHECKS]
    if unknown:
        raise ConfigError(f"unknown check(s): {unknown}")

    def run(name):
        return checks.CHECKS[name](seed=seed)

    if threads > 1 and len(names) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(run, names))
    else:
        reports = [run(name) for name in names]
    return reports


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpv",
        description="single-qubit position-verification simulator and verifier")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "attack-optimize", "bounds"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None,
                       help="overrides the config's 'seed' key (default 0)")
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")
    v = sub.add_parser("verify")
    v.add_argument("--suite", default="all",
                   help="comma-separated check names, or 'all'")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _resolve_threads(arg) -> int:
    if arg is not None:
        return max(1, int(arg))
    env = os.environ.get("QPV_THREADS")
    return max(1, int(env)) if env else 1


def _write(path, text: str):
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    threads = _resolve_threads(args.threads)
    try:
        if args.command == "verify":
            names = [n.strip() for n in args.suite.split(",") if n.strip()]
            reports = cmd_verify(names, args.seed, threads)
            lines = "\n".join(r.json_line() for r in reports) + "\n"
            _write(args.out, lines)
            return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY

        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
        if args.seed is None:
            args.seed = int(config.pop("seed", 0))
        else:
            config.pop("seed", None)

        if args.command == "simulate":
            summary, rows = cmd_simulate(config, args.seed, threads)
            if args.out:
                _write(args.out, json.dumps(summary, sort_keys=True) + "\n")
                _write(args.out + ".csv", _rows_to_csv(rows))
            elif args.format == "csv":
                _write(None, _rows_to_csv(rows))
            else:
                _write(None, json.dumps(summary, sort_keys=True))
            return EXIT_OK

        if args.command == "attack-optimize":
            doc, strategy_json = cmd_attack_optimize(config, args.seed)
            if args.out:
                _write(args.out, json.dumps(doc, sort_keys=True) + "\n")
                _write(args.out + ".strategy.json", strategy_json + "\n")
            else:
                doc["strategy"] = json.loads(strategy_json)
                _write(None, json.dumps(doc, sort_keys=True))
            return EXIT_OK

        if args.command == "bounds":
            out = cmd_bounds(config, args.seed)
            _write(args.out, json.dumps(out, sort_keys=True) + ("\n" if args.out else ""))
            return EXIT_OK

        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, FileNotFoundError, json.JSONDecodeError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
