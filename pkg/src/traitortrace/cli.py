"""Command-line front end.

Subcommands:

* gen     sample a bias vector and code matrix, write both to disk
* attack  forge a pirated sequence from a stored code under a collusion strategy
* score   score every user of a stored code against a stored attack
* roc     full Monte Carlo run: score table CSV, per-decoder ROC CSVs, SVG overlay
* wca     optimize the worst-case stationary channel and report its mutual information

Every subcommand writes a manifest.json recording the resolved
configuration, seed, tool version and artifact paths; `roc --config
manifest.json` replays a run bit-exactly.  Validation failures exit 2,
I/O failures exit 1.
"""

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .codegen import generate_code, load_bias, load_code, sample_bias_vector, save_bias, save_code
from .collusion import (
    STRATEGIES,
    channel_from_json,
    channel_to_json,
    forge,
    sample_coalition,
    strategy_theta,
    tally,
)
from . import decoders as _dec
from .plotting import roc_figure
from .simulate import (
    DECODERS,
    ExperimentConfig,
    estimate_roc,
    run_monte_carlo,
)
from .streams import STREAM_BIAS, STREAM_CODE, STREAM_COALITION, STREAM_FORGE, derive
from .wca import Quadrature, cache_key, load_or_optimize, mutual_information, save_result

STRATEGY_CHOICES = STRATEGIES + ("wca",)


def _utcnow():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_manifest(out_dir, command, config, seed, artifacts, wca_keys=()):
    doc = {
        "schema": 1,
        "tool": "traitortrace",
        "version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "created": _utcnow(),
        "artifacts": artifacts,
        "wca_cache_keys": list(wca_keys),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen(args):
    out = _out_dir(args)
    if args.m < 1:
        raise ValueError("gen: m must be >= 1")
    bias = sample_bias_vector(args.m, derive(args.seed, STREAM_BIAS), cutoff=args.cutoff)
    code = generate_code(bias, args.n, derive(args.seed, STREAM_CODE))
    save_bias(out / "bias.bin", bias, seed=args.seed)
    save_code(out / "code.bin", code, seed=args.seed)
    config = {"m": args.m, "n": args.n, "seed": args.seed, "cutoff": args.cutoff}
    _write_manifest(out, "gen", config, args.seed, {"bias": "bias.bin", "code": "code.bin"})
    print(f"wrote {out / 'bias.bin'} and {out / 'code.bin'}")
    return 0


def _resolve_cli_channel(strategy, c, out_dir):
    """Channel for a strategy tag; "wca" goes through the on-disk cache."""
    if strategy == "wca":
        result, hit = load_or_optimize(c, cache_dir=out_dir / "wca_cache")
        return result.channel, [cache_key(c, 128, 1e-8)], hit
    return strategy_theta(strategy, c), [], None


def cmd_attack(args):
    out = _out_dir(args)
    code = load_code(args.code)
    channel, keys, _ = _resolve_cli_channel(args.strategy, args.c, out)
    coalition = sample_coalition(code.n, args.c, derive(args.seed, STREAM_COALITION))
    t = tally(code, coalition)
    y = forge(t, channel, derive(args.seed, STREAM_FORGE))
    doc = {
        "schema": 1,
        "strategy": args.strategy,
        "c": args.c,
        "seed": args.seed,
        "coalition": coalition.members.tolist(),
        "channel": channel_to_json(channel),
        "y": "".join(str(int(b)) for b in y),
    }
    (out / "attack.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    config = {"code": str(args.code), "c": args.c, "strategy": args.strategy, "seed": args.seed}
    _write_manifest(out, "attack", config, args.seed, {"attack": "attack.json"}, keys)
    print(f"wrote {out / 'attack.json'}")
    return 0


def cmd_score(args):
    out = _out_dir(args)
    code = load_code(args.code)
    bias = load_bias(args.bias)
    doc = json.loads(Path(args.attack).read_text())
    y = np.frombuffer(doc["y"].encode(), dtype=np.uint8) - ord("0")
    if args.decoder == "tardos":
        scores = _dec.tardos_scores_all(y, code, bias, args.convention)
    elif args.decoder == "map":
        if args.cmax is None:
            raise ValueError("score: --cmax is required for the map decoder")
        mc = _dec.MapConfig(c_max=args.cmax, c_min=args.cmin)
        scores = _dec.map_blind_scores_all(y, code, bias, code.n, mc)
    else:
        channel = channel_from_json(doc["channel"])
        scores = _dec.informed_scores_all(y, code, bias, channel, doc["c"])
    path = out / "scores.csv"
    with open(path, "w", newline="") as fh:
        fh.write("user,score\n")
        for u, s in enumerate(scores):
            fh.write(f"{u},{float(s)!r}\n")
    config = {
        "code": str(args.code),
        "bias": str(args.bias),
        "attack": str(args.attack),
        "decoder": args.decoder,
        "cmax": args.cmax,
        "cmin": args.cmin,
        "convention": args.convention,
    }
    _write_manifest(out, "score", config, doc["seed"], {"scores": "scores.csv"})
    print(f"wrote {path}")
    return 0


_ROC_DEFAULTS = {
    "m": None,
    "n": None,
    "c": None,
    "cmax": None,
    "strategy": None,
    "R": 2000,
    "seed": 0,
    "decoders": "tardos,informed,map",
    "cutoff": 0.0,
    "convention": "zero-mean",
    "loglog": False,
    "jobs": 1,
    "out": ".",
}


def _merge_roc_config(args):
    """Resolve roc settings: CLI flags beat the JSON config file beat defaults."""
    merged = dict(_ROC_DEFAULTS)
    if args.config is not None:
        doc = json.loads(Path(args.config).read_text())
        if "config" in doc and isinstance(doc["config"], dict):
            doc = doc["config"]  # accept a manifest as a config source
        unknown = set(doc) - set(merged)
        if unknown:
            raise ValueError(f"roc: unknown config keys {sorted(unknown)}")
        merged.update(doc)
    for key in merged:
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            merged[key] = flag
    missing = [k for k in ("m", "n", "c", "cmax", "strategy") if merged[k] is None]
    if missing:
        raise ValueError(f"roc: missing required settings {missing}")
    if isinstance(merged["decoders"], str):
        merged["decoders"] = tuple(t for t in merged["decoders"].split(",") if t)
    else:
        merged["decoders"] = tuple(merged["decoders"])
    return merged


def cmd_roc(args):
    settings = _merge_roc_config(args)
    out = Path(settings["out"])
    out.mkdir(parents=True, exist_ok=True)
    cfg = ExperimentConfig(
        m=settings["m"],
        n=settings["n"],
        c_true=settings["c"],
        c_max=settings["cmax"],
        strategy=settings["strategy"],
        decoders=settings["decoders"],
        realizations=settings["R"],
        seed=settings["seed"],
        cutoff=settings["cutoff"],
        tardos_convention=settings["convention"],
    )
    keys = [cache_key(cfg.c_true, cfg.wca_nodes, cfg.wca_tol)] if cfg.strategy == "wca" else []
    table = run_monte_carlo(
        cfg, jobs=settings["jobs"], cache_dir=out / "wca_cache", progress=args.progress
    )
    artifacts = {"scores": "scores.csv", "plot": "roc.svg", "summary": "summary.json"}
    table.to_csv(out / "scores.csv")
    curves = []
    aucs = {}
    for d in cfg.decoders:
        roc = estimate_roc(table, d)
        roc.to_csv(out / f"roc_{d}.csv")
        artifacts[f"roc_{d}"] = f"roc_{d}.csv"
        curves.append((d, roc))
        aucs[d] = roc.auc
    roc_figure(
        curves,
        out / "roc.svg",
        title=f"m={cfg.m}, c={cfg.c_true}, n={cfg.n}, {cfg.strategy}",
        loglog=settings["loglog"],
    )
    config_echo = {k: v for k, v in settings.items() if k not in ("jobs", "out")}
    config_echo["decoders"] = list(cfg.decoders)
    summary = {"auc": aucs, "config": config_echo, "seed": cfg.seed}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write_manifest(out, "roc", config_echo, cfg.seed, artifacts, keys)
    for d, a in aucs.items():
        print(f"auc[{d}] = {a:.4f}")
    return 0


def cmd_wca(args):
    out = _out_dir(args)
    result, hit = load_or_optimize(
        args.c, nodes=args.nodes, tol=args.tol, cache_dir=out / "wca_cache"
    )
    path = out / f"wca_c{args.c}.json"
    save_result(path, result, args.nodes, args.tol)
    quad = Quadrature.gauss_chebyshev(args.nodes)
    theta_str = " ".join(f"{v:.6f}" for v in result.theta)
    print(f"theta* (c={args.c}): {theta_str}")
    print(f"MI(theta*) = {result.mi:.9f}  [{'cache hit' if hit else 'optimized'}]")
    for name in STRATEGIES:
        mi = mutual_information(strategy_theta(name, args.c).theta, quad)
        print(f"MI({name}) = {mi:.9f}")
    config = {"c": args.c, "nodes": args.nodes, "tol": args.tol}
    _write_manifest(
        out, "wca", config, None, {"theta": path.name}, [cache_key(args.c, args.nodes, args.tol)]
    )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="traitortrace",
        description="Fingerprinting-code workbench: generation, collusion, decoding, ROC runs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample and store a bias vector and code matrix")
    p.add_argument("--m", type=int, required=True, help="code length")
    p.add_argument("--n", type=int, required=True, help="number of users")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--cutoff", type=float, default=0.0, help="bias support cutoff in [0, 0.5)")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("attack", help="forge a pirated sequence from a stored code")
    p.add_argument("--code", required=True, help="code matrix file from gen")
    p.add_argument("--c", type=int, required=True, help="coalition size")
    p.add_argument("--strategy", required=True, choices=STRATEGY_CHOICES)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("score", help="score all users of a stored code against an attack")
    p.add_argument("--code", required=True)
    p.add_argument("--bias", required=True)
    p.add_argument("--attack", required=True, help="attack.json from the attack subcommand")
    p.add_argument("--decoder", required=True, choices=DECODERS)
    p.add_argument("--cmax", type=int, help="largest coalition size marginalized (map)")
    p.add_argument("--cmin", type=int, default=2, help="smallest coalition size marginalized (map)")
    p.add_argument("--convention", default="zero-mean", choices=_dec.TARDOS_CONVENTIONS)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("roc", help="Monte Carlo ROC estimation run")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=int, help="true coalition size")
    p.add_argument("--cmax", type=int, help="largest coalition size marginalized by map")
    p.add_argument("--strategy", choices=STRATEGY_CHOICES)
    p.add_argument("--R", type=int, help="number of realizations")
    p.add_argument("--seed", type=int)
    p.add_argument("--decoders", help="comma-separated subset of tardos,informed,map")
    p.add_argument("--cutoff", type=float)
    p.add_argument("--convention", choices=_dec.TARDOS_CONVENTIONS)
    p.add_argument("--loglog", action="store_true", help="log-log ROC axes")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--config", help="JSON config file or manifest.json; flags override")
    p.add_argument("--progress", action="store_true", help="print a progress line to stderr")
    p.add_argument("--out")
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("wca", help="optimize the worst-case stationary channel")
    p.add_argument("--c", type=int, required=True, help="coalition size (>= 2)")
    p.add_argument("--nodes", type=int, default=128, help="quadrature nodes")
    p.add_argument("--tol", type=float, default=1e-8, help="convergence tolerance")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_wca)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
