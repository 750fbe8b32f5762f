"""``crcg generate|train|eval|sweep-tau|report``.

Every artifact lives under the output directory::

    config.resolved.json
    data/seed_<s>/{train,test}.jsonl
    runs/<method>/seed_<s>/{params.json,epochs.csv,accuracy.json}
    tau_sweep.csv
    report/{comparison.csv,comparison.txt,friedman.csv}
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import json
import os
import sys

from . import __version__
from .composer import generate_scenario
from .config import Config, ConfigError, parse_config, scenario_name, scenario_sort_key, write_resolved
from .graph import GraphFormatError, deserialize, serialize
from .model import ModelParams
from .stats import RunResult, StatsError, cpu_overhead, friedman, friedman_csv, load_results, mean_std, summarize
from .train import METHODS, TrainConfig, evaluate, train, write_log_csv

DEFAULT_TAUS = (0.5, 0.6, 0.7, 0.8, 0.9)


class MissingArtifact(RuntimeError):
    pass


# --------------------------------------------------------------------------
# paths
# --------------------------------------------------------------------------

def data_path(out: str, seed: int, split: str) -> str:
    return os.path.join(out, "data", f"seed_{seed}", f"{split}.jsonl")


def run_dir(out: str, method: str, seed: int) -> str:
    return os.path.join(out, "runs", method, f"seed_{seed}")


def _require(path: str) -> str:
    if not os.path.exists(path):
        raise MissingArtifact(f"missing artifact: {path}")
    return path


def _load(out: str, seed: int, split: str, cfg: Config):
    return deserialize(_require(data_path(out, seed, split)), split=split, num_classes=cfg.scenario.num_classes)


# --------------------------------------------------------------------------
# stages
# --------------------------------------------------------------------------

def cmd_generate(cfg: Config, out: str, workers: int = 1) -> list[str]:
    written = []
    for seed in cfg.seeds:
        train_set, test_set = generate_scenario(cfg.scenario, seed, workers=workers)
        for ds in (train_set, test_set):
            path = data_path(out, seed, ds.split)
            os.makedirs(os.path.dirname(path), exist_ok=True)
            serialize(ds, path)
            written.append(path)
    return written


def _fit(cfg: Config, out: str, seed: int, tcfg: TrainConfig):
    dataset = _load(out, seed, "train", cfg)
    return train(dataset, dataclasses.replace(tcfg, seed=seed))


def cmd_train(cfg: Config, out: str) -> list[str]:
    written = []
    for seed in cfg.seeds:
        result = _fit(cfg, out, seed, cfg.train)
        d = run_dir(out, cfg.train.method, seed)
        os.makedirs(d, exist_ok=True)
        payload = {
            "method": cfg.train.method,
            "scenario": scenario_name(cfg.scenario),
            "seed": seed,
            "cpu_seconds": result.cpu_seconds,
            "params": result.params.to_dict(),
        }
        with open(os.path.join(d, "params.json"), "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
        write_log_csv(result.log, os.path.join(d, "epochs.csv"))
        written.append(d)
    return written


def cmd_eval(cfg: Config, out: str) -> list[RunResult]:
    results = []
    for seed in cfg.seeds:
        d = run_dir(out, cfg.train.method, seed)
        with open(_require(os.path.join(d, "params.json"))) as fh:
            payload = json.load(fh)
        params = ModelParams.from_dict(payload["params"])
        acc = evaluate(_load(out, seed, "test", cfg), params)
        r = RunResult(cfg.train.method, payload["scenario"], seed, acc, payload["cpu_seconds"])
        with open(os.path.join(d, "accuracy.json"), "w") as fh:
            json.dump(r.to_dict(), fh)
            fh.write("\n")
        results.append(r)
    return results


def sweep_rows(accuracies: dict, taus) -> list[dict]:
    """``accuracies[(method, tau)]`` -> list over seeds; one row per (method, tau)."""
    rows = []
    for method in METHODS:
        for tau in taus:
            mu, sd = mean_std(accuracies[(method, tau)])
            rows.append({"method": method, "tau": tau, "mean": mu, "std": sd, "n": len(accuracies[(method, tau)])})
    return rows


def cmd_sweep_tau(cfg: Config, out: str, taus=DEFAULT_TAUS) -> str:
    """ERM once per seed (tau has no effect on it) and ERM+R-CAM per (tau, seed)."""
    taus = tuple(float(t) for t in taus)
    acc: dict = {}
    for seed in cfg.seeds:
        test_set = _load(out, seed, "test", cfg)
        erm = _fit(cfg, out, seed, dataclasses.replace(cfg.train, method="erm"))
        base = evaluate(test_set, erm.params)
        for tau in taus:
            acc.setdefault(("erm", tau), []).append(base)
            rcam = dataclasses.replace(cfg.train.rcam, tau=tau)
            res = _fit(cfg, out, seed, dataclasses.replace(cfg.train, method="erm+rcam", rcam=rcam))
            acc.setdefault(("erm+rcam", tau), []).append(evaluate(test_set, res.params))
    path = os.path.join(out, "tau_sweep.csv")
    with open(path, "w") as fh:
        fh.write("method,tau,mean,std,n\n")
        for r in sweep_rows(acc, taus):
            fh.write(f"{r['method']},{r['tau']!r},{r['mean']!r},{r['std']!r},{r['n']}\n")
    return path


def collect_results(inputs) -> list[RunResult]:
    files = []
    for item in inputs:
        if os.path.isdir(item):
            files.extend(sorted(glob.glob(os.path.join(item, "**", "accuracy.json"), recursive=True)))
        else:
            files.append(_require(item))
    if not files:
        raise MissingArtifact(f"missing artifact: no accuracy.json under {', '.join(inputs)}")
    results = []
    for f in files:
        results.extend(load_results(f))
    return results


def friedman_matrix(results, methods) -> list[list[float]]:
    """Methods x blocks, a block being a (scenario, seed) pair every method ran."""
    by = {(r.method, r.scenario, r.seed): r.accuracy for r in results}
    blocks = sorted({(s, sd) for (_, s, sd) in by}, key=lambda b: (scenario_sort_key(b[0]), b[1]))
    blocks = [b for b in blocks if all((m, *b) in by for m in methods)]
    return [[by[(m, *b)] for b in blocks] for m in methods]


def cmd_report(inputs, out: str, baseline: str = "erm") -> dict:
    results = collect_results(inputs)
    table = summarize(results, baseline)
    table.scenarios.sort(key=scenario_sort_key)
    rdir = os.path.join(out, "report")
    os.makedirs(rdir, exist_ok=True)
    paths = {"comparison.csv": table.to_csv(), "comparison.txt": table.to_text()}
    lines = [table.to_text()]
    if len(table.methods) >= 2:
        matrix = friedman_matrix(results, table.methods)
        if matrix and len(matrix[0]) >= 2:
            stat, df, p = friedman(matrix)
            paths["friedman.csv"] = friedman_csv(stat, df, p)
            lines.append(f"Friedman: statistic {stat:.4f}, df {df}, p {p:.6g}")
        for m in table.methods[1:]:
            try:
                lines.append(f"CPU time {m} / {baseline}: {cpu_overhead(results, m, baseline):.3f}x")
            except StatsError:
                pass
    for name, text in paths.items():
        with open(os.path.join(rdir, name), "w") as fh:
            fh.write(text)
    return {"text": "\n".join(lines), "files": [os.path.join(rdir, n) for n in paths]}


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file or inline JSON object")
    p.add_argument("--seed", type=int, help="run a single seed instead of the config's seed list")
    p.add_argument("--out", help="output directory (overrides output_dir)")


def _training(p: argparse.ArgumentParser):
    p.add_argument("--method", choices=METHODS, help="training method")
    p.add_argument("--tau", type=float, help="R-CAM similarity threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crcg", description="Synthetic causal graph benchmark and R-CAM training.")
    parser.add_argument("--version", action="version", version=f"crcg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("generate", help="write train/test JSONL per seed")
    _common(p)
    p.add_argument("--workers", type=int, default=1, help="generation threads (output is identical for any value)")
    for name, text in (("train", "train one method per seed"), ("eval", "evaluate trained params on the test split")):
        p = sub.add_parser(name, help=text)
        _common(p)
        _training(p)
    p = sub.add_parser("sweep-tau", help="ERM and ERM+R-CAM accuracy over a tau grid")
    _common(p)
    p.add_argument("--taus", default=",".join(str(t) for t in DEFAULT_TAUS), help="comma-separated tau grid")
    p = sub.add_parser("report", help="comparison table and Friedman test from accuracy.json files")
    _common(p)
    p.add_argument("inputs", nargs="*", help="run directories or accuracy.json files (default: the output directory)")
    p.add_argument("--baseline", default="erm", help="method the deltas are measured against")
    return parser


def resolve(args) -> tuple[Config, str]:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seeds([args.seed])
    tcfg = cfg.train
    if getattr(args, "method", None):
        tcfg = dataclasses.replace(tcfg, method=args.method)
    if getattr(args, "tau", None) is not None:
        try:
            tcfg = dataclasses.replace(tcfg, rcam=dataclasses.replace(tcfg.rcam, tau=args.tau))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    out = args.out or cfg.output_dir
    cfg = dataclasses.replace(cfg, train=tcfg, output_dir=out)
    return cfg, out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, out = resolve(args)
        write_resolved(cfg, out)
        if args.command == "generate":
            for path in cmd_generate(cfg, out, workers=args.workers):
                print(path)
        elif args.command == "train":
            for d in cmd_train(cfg, out):
                print(d)
        elif args.command == "eval":
            for r in cmd_eval(cfg, out):
                print(f"{r.method} {r.scenario} seed {r.seed}: accuracy {r.accuracy:.4f}")
        elif args.command == "sweep-tau":
            taus = [float(t) for t in args.taus.split(",") if t.strip()]
            print(cmd_sweep_tau(cfg, out, taus))
        elif args.command == "report":
            print(cmd_report(args.inputs or [out], out, args.baseline)["text"])
    except (MissingArtifact, ConfigError, GraphFormatError, StatsError, ValueError, OSError) as exc:
        print(f"crcg {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
