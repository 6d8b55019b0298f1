"""`lab` — reproducible experiment driver.

    lab <command> --config <file> --out <dir> [--seed N] [--reps N]
        [--n N | --n-grid a,b,c] [--cap N] [--threads N]

Commands: simulate, beta, mixing, partitions, hoeffding, coupling, rate,
sandwich.  Every run writes its CSV artifacts plus run_manifest.json into
the output directory.  (config, seed) pins every random draw, so repeated
runs — at any worker count — produce byte-identical CSVs.

Seed resolution: --seed flag, else the LAB_SEED environment variable, else
a "seed" key in the config file, else 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, rng
from .config import chain_from_config, config_digest, load_json, model_from_config
from .errors import (
    ConfigInvalid,
    EnumerationCapExceeded,
    LabError,
    NotIrreducible,
)
from .estimators import (
    coupling_decay_check,
    exact_mean_lc,
    gamma_star_estimate,
    hoeffding_tail_check,
    mc_mean_lc,
    rate_bound_evaluate,
    sandwich_check,
)
from .hmm import DEFAULT_JOINT_CAP, doeblin_for, sample_batch, validate
from .markov import (
    DEFAULT_ITERATION_CAP,
    doeblin_constants,
    mixing_profile,
    tau_min,
)
from .mixing import beta_xy_exact, beta_zx_y_exact, h_n
from .partitions import DEFAULT_ENUM_CAP, count_bound_check, partition_max_identity

EXIT_CONFIG_INVALID = 3
EXIT_ENUMERATION_CAP = 4
EXIT_NOT_IRREDUCIBLE = 5
EXIT_LAB_ERROR = 6

_CONSTANT_KEYS = ("A", "c", "alpha", "eps", "k", "tau_min", "p_match")


@dataclass
class RunConfig:
    command: str
    out_dir: str
    seed: int
    config_path: str | None = None
    model_obj: dict | None = None
    params: dict = field(default_factory=dict)


@dataclass
class RunManifest:
    command: str
    version: str
    config_digest: str | None
    seed: int
    params: dict
    constants: dict
    outputs: list
    results: dict
    started: str
    finished: str


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(v):
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _model(cfg: RunConfig):
    if cfg.model_obj is None:
        raise ConfigInvalid(f"command '{cfg.command}' requires --config")
    return model_from_config(cfg.model_obj)


def _n_grid(cfg: RunConfig, default):
    grid = cfg.params.get("n_grid")
    if grid:
        return tuple(grid)
    if cfg.params.get("n"):
        return (cfg.params["n"],)
    return tuple(default)


# ---------------------------------------------------------------------------
# command handlers: each returns (outputs, constants, results)


def _cmd_simulate(cfg: RunConfig, out: Path):
    hmm = _model(cfg)
    ns = _n_grid(cfg, default=(100,))
    reps = cfg.params.get("reps") or 1000
    cap = cfg.params.get("cap") or DEFAULT_JOINT_CAP
    exact_cap = min(cap, 2**20)
    rows = []
    for i, n in enumerate(ns):
        est = mc_mean_lc(hmm, n, reps, cfg.seed, threads=cfg.params["threads"],
                         stream=rng.STREAM_GRID + i)
        exact = None
        if hmm.n_letters ** (2 * n) <= exact_cap:
            exact = exact_mean_lc(hmm, n, cap=exact_cap) / n
        rows.append((n, reps, est.mean, est.std_err, exact))
    _write_csv(out / "mean.csv", ["n", "reps", "mean", "std_err", "exact"], rows)
    return ["mean.csv"], {}, {"rows": len(rows)}


def _cmd_beta(cfg: RunConfig, out: Path):
    hmm = _model(cfg)
    n_max = cfg.params.get("n") or 3
    cap = cfg.params.get("cap") or DEFAULT_JOINT_CAP
    S, A = hmm.chain.n_states, hmm.n_letters
    beta_rows, h_rows = [], []
    for n in range(1, n_max + 1):
        rep = beta_xy_exact(hmm, n, cap=cap)
        cost = rep.cost
        zx_cost = (S * A) ** n * A ** n
        b_zx = None
        if zx_cost <= cap:
            b_zx = beta_zx_y_exact(hmm, n, cap=cap)
            cost += zx_cost
        beta_rows.append((n, rep.beta_xy, b_zx, cost))
        asym = h_n(hmm, n)
        h_rows.append((n, asym.h, asym.argmax_m))
    _write_csv(out / "beta.csv", ["n", "beta_xy", "beta_zx_y", "cost"], beta_rows)
    _write_csv(out / "h.csv", ["n", "h", "argmax_m"], h_rows)
    return (["beta.csv", "h.csv"], {},
            {"n_max": n_max, "beta_star_lower": beta_rows[-1][1]})


def _chain_of(cfg: RunConfig):
    if cfg.model_obj is None:
        raise ConfigInvalid(f"command '{cfg.command}' requires --config")
    if "chain" in cfg.model_obj:
        return model_from_config(cfg.model_obj).chain
    return chain_from_config(cfg.model_obj, where="config")


def _cmd_mixing(cfg: RunConfig, out: Path):
    chain = _chain_of(cfg)
    cap = cfg.params.get("cap") or DEFAULT_ITERATION_CAP
    rows = mixing_profile(chain, cap=cap)
    report = tau_min(chain, cap=cap)
    dc = doeblin_constants(chain)
    _write_csv(out / "mixing.csv", ["epsilon", "tau_eps", "objective"], rows)
    constants = {"A": report.A, "c": dc.c, "alpha": dc.alpha, "eps": dc.eps,
                 "k": dc.k, "tau_min": report.tau_min}
    return (["mixing.csv"], constants,
            {"argmin_eps": report.epsilon, "tau_at_argmin": report.tau_eps})


def _cmd_partitions(cfg: RunConfig, out: Path):
    k = cfg.params.get("k") or 2
    n = cfg.params.get("n") or 2
    cap = cfg.params.get("cap") or DEFAULT_ENUM_CAP
    report = count_bound_check(k, n)
    rows = [(r, cnt, bound, ok) for r, (cnt, bound, ok) in sorted(report.per_r.items())]
    _write_csv(out / "partitions.csv", ["r", "count", "bound", "ok"], rows)
    results = {"k": k, "n": n, "total": report.total,
               "exp_bound": report.exp_bound, "exp_ok": report.exp_ok}
    if cfg.model_obj is not None:
        hmm = _model(cfg)
        reps = cfg.params.get("reps") or 10
        _, X, Y = sample_batch(hmm, k * n, reps, cfg.seed, stream=rng.STREAM_TEST)
        mismatches = 0
        for r in range(reps):
            ident = partition_max_identity(X[r], Y[r], k, n, cap=cap)
            mismatches += 0 if ident.equal else 1
        results["identity_pairs"] = reps
        results["identity_mismatches"] = mismatches
    return ["partitions.csv"], {}, results


def _cmd_hoeffding(cfg: RunConfig, out: Path):
    hmm = _model(cfg)
    n = cfg.params.get("n") or 200
    reps = cfg.params.get("reps") or 2000
    report = hoeffding_tail_check(hmm, n, reps, cfg.seed,
                                  threads=cfg.params["threads"])
    rows = list(zip(report.t, report.empirical, report.bound, report.ok_each))
    _write_csv(out / "tail.csv", ["t", "empirical", "bound", "ok"], rows)
    mix = tau_min(hmm.chain)
    constants = {"A": report.A, "eps": mix.epsilon, "tau_min": mix.tau_min}
    return ["tail.csv"], constants, {"n": n, "reps": reps, "ok": report.ok}


def _cmd_coupling(cfg: RunConfig, out: Path):
    hmm = _model(cfg)
    n = cfg.params.get("n") or 50
    reps = cfg.params.get("reps") or 2000
    dc = doeblin_for(hmm)
    report = coupling_decay_check(hmm, n, reps, cfg.seed, doeblin=dc)
    rows = list(zip(report.K, report.empirical, report.bound, report.ok_each))
    _write_csv(out / "coupling.csv", ["K", "empirical", "bound", "ok"], rows)
    constants = {"c": dc.c, "alpha": dc.alpha, "eps": dc.eps, "k": dc.k,
                 "p_match": dc.p_match}
    return ["coupling.csv"], constants, {"n": n, "reps": reps, "ok": report.ok}


def _cmd_rate(cfg: RunConfig, out: Path):
    hmm = _model(cfg)
    ns = _n_grid(cfg, default=(50, 100, 200, 400))
    reps = cfg.params.get("reps") or 400
    gamma = gamma_star_estimate(hmm, ns, reps, cfg.seed,
                                threads=cfg.params["threads"])
    mix = tau_min(hmm.chain)
    dc = doeblin_constants(hmm.chain)
    stationary = hmm.chain.stationary_start
    symmetric = validate(hmm)["symmetric"]
    beta_lb = cfg.params.get("beta_star")
    if beta_lb is None:
        from .estimators import _beta_lower_bound

        beta_lb, beta_source = _beta_lower_bound(hmm)
    else:
        beta_source = "flag"
    rows = []
    for n_i in ns:
        h_value = None if symmetric else h_n(hmm, n_i).h
        rb = rate_bound_evaluate(n_i, gamma.gamma_hat, beta_lb, mix, dc,
                                 stationary, h_value=h_value)
        rows.append((n_i, rb.gamma_hat, rb.beta_star_lb, rb.C, rb.A, rb.c,
                     rb.alpha, rb.stationary, rb.h_n, rb.lower, rb.upper))
    _write_csv(out / "rate.csv",
               ["n", "gamma_hat", "beta_star_lb", "C", "A", "c", "alpha",
                "stationary", "h_n", "lower", "upper"], rows)
    constants = {"A": mix.A, "c": dc.c, "alpha": dc.alpha, "eps": dc.eps,
                 "k": dc.k, "tau_min": mix.tau_min}
    results = {"gamma_hat": gamma.gamma_hat, "C_hat": gamma.C_hat,
               "fekete_lower": gamma.fekete_lower, "beta_star_lb": beta_lb,
               "beta_source": beta_source, "symmetric": symmetric}
    return ["rate.csv"], constants, results


def _cmd_sandwich(cfg: RunConfig, out: Path):
    hmm = _model(cfg)
    ns = _n_grid(cfg, default=(50, 100, 200, 400))
    reps = cfg.params.get("reps") or 400
    report = sandwich_check(hmm, ns, reps, cfg.seed, threads=cfg.params["threads"])
    rows = [(r.n, r.mean, r.se, r.lower, r.upper, r.inside) for r in report.rows]
    _write_csv(out / "sandwich.csv", ["n", "mean", "se", "lower", "upper", "inside"], rows)
    constants = {"A": report.mixing.A, "c": report.doeblin.c,
                 "alpha": report.doeblin.alpha, "eps": report.doeblin.eps,
                 "k": report.doeblin.k, "tau_min": report.mixing.tau_min}
    results = {"ok": report.ok, "gamma_hat": report.gamma.gamma_hat,
               "C_hat": report.gamma.C_hat, "fekete_lower": report.gamma.fekete_lower,
               "beta_star_lb": report.beta_star_lb, "beta_source": report.beta_source,
               "stationary": report.stationary, "symmetric": report.symmetric}
    return ["sandwich.csv"], constants, results


_HANDLERS = {
    "simulate": _cmd_simulate,
    "beta": _cmd_beta,
    "mixing": _cmd_mixing,
    "partitions": _cmd_partitions,
    "hoeffding": _cmd_hoeffding,
    "coupling": _cmd_coupling,
    "rate": _cmd_rate,
    "sandwich": _cmd_sandwich,
}


def run(cfg: RunConfig) -> RunManifest:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    outputs, constants, results = _HANDLERS[cfg.command](cfg, out)
    finished = datetime.now(timezone.utc).isoformat()
    full_constants = {key: constants.get(key) for key in _CONSTANT_KEYS}
    manifest = RunManifest(
        command=cfg.command,
        version=__version__,
        config_digest=config_digest(cfg.model_obj) if cfg.model_obj else None,
        seed=cfg.seed,
        params=_jsonable(cfg.params),
        constants=_jsonable(full_constants),
        outputs=outputs,
        results=_jsonable(results),
        started=started,
        finished=finished,
    )
    with open(out / "run_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest.__dict__, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "Monte Carlo mean of LC_n/n (plus exact value when enumerable)",
        "beta": "exact dependence coefficients and the asymmetry profile h(n)",
        "mixing": "mixing-time profile and the concentration constant A",
        "partitions": "partition counts vs closed-form bounds; optional identity check",
        "hoeffding": "empirical upper tail of LC_n vs exp(-t^2/(A^2 n))",
        "coupling": "empirical meeting-time tail vs c * alpha^K",
        "rate": "two-sided rate bracket for the mean on a grid of n",
        "sandwich": "Monte Carlo means tested against the rate bracket",
    }
    for name in _HANDLERS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", default=None,
                        help="JSON model (or chain) config file")
        sp.add_argument("--out", default=None, help="output directory (default runs/<command>)")
        sp.add_argument("--seed", type=int, default=None,
                        help="master seed (default: LAB_SEED env, config seed, else 0)")
        sp.add_argument("--reps", type=int, default=None, help="Monte Carlo replicates")
        sp.add_argument("--n", type=int, default=None, help="word length (or n_max for beta)")
        sp.add_argument("--n-grid", dest="n_grid", default=None,
                        help="comma-separated word lengths, e.g. 50,100,200")
        sp.add_argument("--cap", type=int, default=None, help="enumeration/iteration cap")
        sp.add_argument("--threads", type=int, default=1, help="worker processes")
        if name == "partitions":
            sp.add_argument("--k", type=int, default=None, help="number of diagonal anchors")
    return parser


def _parse_grid(text: str):
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigInvalid(f"--n-grid expects comma-separated integers, got {text!r}")


def _resolve_seed(flag_seed, model_obj) -> int:
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get("LAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigInvalid(f"LAB_SEED must be an integer, got {env!r}")
    if model_obj is not None and "seed" in model_obj:
        return int(model_obj["seed"])
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        model_obj = load_json(args.config) if args.config else None
        params = {
            "n": args.n,
            "n_grid": _parse_grid(args.n_grid) if args.n_grid else None,
            "reps": args.reps,
            "cap": args.cap,
            "threads": max(1, args.threads),
            "k": getattr(args, "k", None),
        }
        if args.n is not None and args.n < 1:
            raise ConfigInvalid("--n must be >= 1")
        if args.reps is not None and args.reps < 1:
            raise ConfigInvalid("--reps must be >= 1")
        cfg = RunConfig(
            command=args.command,
            out_dir=args.out or os.path.join("runs", args.command),
            seed=_resolve_seed(args.seed, model_obj),
            config_path=args.config,
            model_obj=model_obj,
            params=params,
        )
        manifest = run(cfg)
    except LabError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        if isinstance(exc, ConfigInvalid):
            return EXIT_CONFIG_INVALID
        if isinstance(exc, EnumerationCapExceeded):
            return EXIT_ENUMERATION_CAP
        if isinstance(exc, NotIrreducible):
            return EXIT_NOT_IRREDUCIBLE
        return EXIT_LAB_ERROR
    print(f"{manifest.command}: wrote {', '.join(manifest.outputs)} -> {cfg.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
