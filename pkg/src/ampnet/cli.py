"""Command-line interface.

Subcommands: train, eval, reproduce, dataset (generate/validate), and
demo-multiplier. Runs are described by a JSON manifest; command-line flags
override manifest fields. The optional AMPNET_OUTPUT_ROOT environment
variable prefixes every output directory.

Exit codes: 0 success, 2 validation failure, 3 I/O failure, 4 training
divergence, 5 every reproduction row failed. Failures print a single
`error:<category>: <message>` line to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datasets import (
    Dataset,
    generate_1d_dataset,
    generate_2d_dataset,
    load_dataset,
    save_dataset,
)
from .evaluation import EvalReport, evaluate, evaluation_grid
from .exceptions import (
    AllRunsDivergedError,
    ConfigError,
    DataValidationError,
    DomainError,
    NonFinitePropagationError,
    TrainingDivergedError,
)
from .experiments import (
    ordering_outcomes,
    preset,
    reproduce_table,
    table_presets,
)
from .model_io import config_from_dict, config_to_dict, load_model, save_model
from .network import NetworkConfig, build_multiplier_network, forward
from .targets import TargetFunction, target_by_name
from .training import RunFailure, RunResult, TrainingConfig, best_of_n

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_DIVERGENCE = 4
EXIT_REPRODUCTION = 5

OUTPUT_ROOT_VAR = "AMPNET_OUTPUT_ROOT"


class CliError(Exception):
    def __init__(self, category: str, code: int, message: str):
        self.category = category
        self.code = code
        super().__init__(message)


def _fmt(value: float) -> str:
    return repr(float(value))


def _out_dir(name: str) -> Path:
    root = Path(os.environ.get(OUTPUT_ROOT_VAR, "."))
    path = root / name
    path.mkdir(parents=True, exist_ok=True)
    return path


@dataclass
class RunManifest:
    """Everything that determines a train or reproduce run."""

    preset: str | None = None
    network: dict | None = None
    target: str | None = None
    dataset: dict = field(default_factory=dict)
    training: dict = field(default_factory=dict)
    n_runs: int = 10
    base_seed: int = 0
    grid_resolution: int | None = None
    jobs: int = 1
    log_interval: int = 100
    output_dir: str = "ampnet-out"
    table: int | None = None
    networks: list[str] | None = None

    @classmethod
    def load(cls, path) -> "RunManifest":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as err:
            raise ConfigError(f"malformed manifest: {err}") from err
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown manifest keys: {sorted(unknown)}")
        return cls(**doc)

    def apply_overrides(self, args: argparse.Namespace) -> None:
        for name in ("n_runs", "base_seed", "grid_resolution", "jobs",
                     "output_dir", "table", "preset", "log_interval"):
            value = getattr(args, name, None)
            if value is not None:
                setattr(self, name, value)
        if getattr(args, "networks", None):
            self.networks = [n.strip() for n in args.networks.split(",")]
        for key in ("epochs", "learning_rate", "l2_lambda"):
            value = getattr(args, key, None)
            if value is not None:
                self.training[key] = value

    def training_config(self, base: TrainingConfig) -> TrainingConfig:
        """`base` (the problem's calibrated default) overridden by the
        manifest's training keys."""
        known = {f.name for f in dataclasses.fields(TrainingConfig)}
        unknown = set(self.training) - known
        if unknown:
            raise ConfigError(f"unknown training keys: {sorted(unknown)}")
        return dataclasses.replace(base, **self.training)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _resolve_network(manifest: RunManifest) -> tuple[NetworkConfig, TargetFunction]:
    if manifest.preset is not None and manifest.network is not None:
        raise ConfigError("manifest sets both 'preset' and 'network'")
    if manifest.preset is not None:
        p = preset(manifest.preset)
        return p.to_network_config(), p.target
    if manifest.network is not None:
        if manifest.target is None:
            raise ConfigError("explicit 'network' needs a 'target'")
        return config_from_dict(manifest.network), target_by_name(manifest.target)
    raise ConfigError("manifest needs either 'preset' or 'network'")


def _resolve_dataset(manifest: RunManifest, target: TargetFunction) -> Dataset:
    spec = dict(manifest.dataset)
    source = spec.pop("source", "grid" if target.input_dim == 1 else "random")
    if source == "file":
        path = spec.pop("path", None)
        if path is None:
            raise ConfigError("dataset source 'file' needs a 'path'")
        return load_dataset(path, target)
    if target.input_dim == 1:
        return generate_1d_dataset(int(spec.pop("n", 194)))
    return generate_2d_dataset(int(spec.pop("n", 300)), seed=int(spec.pop("seed", 0)))


def _write_loss_log(path: Path, losses: np.ndarray, interval: int) -> None:
    lines = ["epoch,mean_loss"]
    for e in range(losses.shape[0]):
        if (e + 1) % interval == 0 or e == losses.shape[0] - 1:
            lines.append(f"{e + 1},{_fmt(losses[e])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _eval_dict(report: EvalReport) -> dict:
    return {
        "mae": report.mae,
        "sd": report.sd,
        "grid_spec": report.grid_spec,
        "max_abs_error": report.max_abs_error,
        "max_error_location": [float(v) for v in report.max_error_location],
    }


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def cmd_train(args: argparse.Namespace) -> int:
    manifest = RunManifest.load(args.manifest)
    manifest.apply_overrides(args)
    config, target = _resolve_network(manifest)
    tcfg = manifest.training_config()
    data = _resolve_dataset(manifest, target)
    if config.input_dim != target.input_dim:
        raise ConfigError(
            f"network input_dim {config.input_dim} does not match target "
            f"{target.name}"
        )
    out = _out_dir(manifest.output_dir)
    _write_json(out / "manifest.json", manifest.to_dict())

    evaluator = lambda net: evaluate(net, target, manifest.grid_resolution)  # noqa: E731
    best, runs = best_of_n(
        config, tcfg, data, manifest.n_runs, manifest.base_seed,
        evaluator=evaluator, n_jobs=manifest.jobs,
    )

    summary = []
    best_index = None
    for k, res in enumerate(runs):
        if isinstance(res, RunFailure):
            summary.append({
                "run": k, "status": "diverged",
                "init_seed": res.init_seed, "shuffle_seed": res.shuffle_seed,
                "epoch": res.epoch, "sample": res.sample, "message": res.message,
            })
            continue
        model_path = out / f"run_{k:02d}.model.json"
        save_model(res.trained, model_path, provenance={
            "init_seed": manifest.base_seed + k,
            "shuffle_seed": manifest.base_seed + 10000 + k,
            "training": dataclasses.asdict(dataclasses.replace(
                tcfg,
                init_seed=manifest.base_seed + k,
                shuffle_seed=manifest.base_seed + 10000 + k,
            )),
            "dataset": data.provenance,
            "target": target.name,
        })
        _write_loss_log(out / f"run_{k:02d}.loss.csv", res.epoch_losses,
                        manifest.log_interval)
        summary.append({
            "run": k, "status": "ok",
            "init_seed": manifest.base_seed + k,
            "shuffle_seed": manifest.base_seed + 10000 + k,
            "final_train_loss": res.final_train_loss,
            "eval": _eval_dict(res.eval),
            "model": model_path.name,
        })
        if res is best:
            best_index = k
    _write_json(out / "runs.json", {"runs": summary})
    _write_json(out / "best.json", {
        "best_run": best_index,
        "model": f"run_{best_index:02d}.model.json",
        "eval": _eval_dict(best.eval),
    })
    print(f"best run {best_index}: MAE {best.eval.mae:.6f} SD {best.eval.sd:.6f}")
    print(f"artifacts in {out}")
    return EXIT_OK


def _write_grid_csv(path: Path, net, target: TargetFunction, resolution) -> None:
    pts = evaluation_grid(target, resolution)
    from .network import predict_batch

    preds = predict_batch(net, pts)[:, 0]
    exact = target(pts)
    errors = preds - exact
    if target.input_dim == 1:
        lines = ["x,y_net,y_exact,error"]
        for i in range(pts.shape[0]):
            lines.append(
                f"{_fmt(pts[i, 0])},{_fmt(preds[i])},{_fmt(exact[i])},{_fmt(errors[i])}"
            )
    else:
        lines = ["x,y,z_net,z_exact,error"]
        for i in range(pts.shape[0]):
            lines.append(
                f"{_fmt(pts[i, 0])},{_fmt(pts[i, 1])},{_fmt(preds[i])},"
                f"{_fmt(exact[i])},{_fmt(errors[i])}"
            )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_eval(args: argparse.Namespace) -> int:
    net, _ = load_model(args.model)
    target = target_by_name(args.target)
    if net.config.input_dim != target.input_dim:
        raise ConfigError(
            f"model takes {net.config.input_dim} inputs but target "
            f"{target.name} has {target.input_dim}"
        )
    out = _out_dir(args.output_dir)
    report = evaluate(net, target, args.grid_resolution)
    _write_json(out / "eval.json", _eval_dict(report))
    _write_grid_csv(out / "grid.csv", net, target, args.grid_resolution)
    print(f"MAE {report.mae:.6f} SD {report.sd:.6f}")
    print(f"artifacts in {out}")
    return EXIT_OK


def cmd_reproduce(args: argparse.Namespace) -> int:
    manifest = RunManifest.load(args.manifest) if args.manifest else RunManifest()
    manifest.apply_overrides(args)
    if manifest.table not in (1, 2):
        raise ConfigError("reproduce needs --table 1 or 2 (flag or manifest)")
    tcfg = manifest.training_config()
    out = _out_dir(manifest.output_dir)
    _write_json(out / "manifest.json", manifest.to_dict())

    dataset_seed = int(manifest.dataset.get("seed", 0))
    rows = reproduce_table(
        manifest.table, tcfg, manifest.n_runs,
        base_seed=manifest.base_seed,
        networks=tuple(manifest.networks) if manifest.networks else None,
        grid_resolution=manifest.grid_resolution,
        dataset_seed=dataset_seed,
        n_jobs=manifest.jobs,
    )

    lines = ["network,depth,width,n_amplifying,n_attenuating,"
             "paper_mae,paper_sd,repro_mae,repro_sd,ratio"]
    for row in rows:
        p = row.preset
        cells = [p.name, str(p.depth), str(p.width), str(p.n_amplifying),
                 str(p.n_attenuating), _fmt(p.reference_mae), _fmt(p.reference_sd)]
        if row.report is not None:
            cells += [_fmt(row.report.mae), _fmt(row.report.sd), _fmt(row.ratio)]
        else:
            cells += ["", "", ""]
        lines.append(",".join(cells))
    (out / "results.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    outcomes = ordering_outcomes(manifest.table, rows)
    text = [f"table {manifest.table} reproduction, n_runs={manifest.n_runs}, "
            f"epochs={tcfg.epochs}"]
    for row in rows:
        if row.report is None:
            text.append(f"{row.preset.name}: FAILED ({row.error})")
        else:
            text.append(
                f"{row.preset.name}: MAE {row.report.mae:.6f} "
                f"(published {row.preset.reference_mae:.6f}, "
                f"ratio {row.ratio:.2f}), SD {row.report.sd:.6f}"
            )
    for label, ok in outcomes:
        status = "not run" if ok is None else ("reproduced" if ok else "not reproduced")
        text.append(f"ordering {label}: {status}")
    (out / "summary.txt").write_text("\n".join(text) + "\n", encoding="utf-8")
    print("\n".join(text))
    print(f"artifacts in {out}")

    if all(row.report is None for row in rows):
        raise CliError("reproduction", EXIT_REPRODUCTION, "every table row failed")
    return EXIT_OK


def cmd_dataset(args: argparse.Namespace) -> int:
    target = target_by_name(args.target)
    if args.dataset_command == "generate":
        if target.input_dim == 1:
            data = generate_1d_dataset(args.n)
        else:
            data = generate_2d_dataset(args.n, seed=args.seed)
        save_dataset(data, args.out)
        print(f"wrote {len(data)} points to {args.out}")
        return EXIT_OK
    data = load_dataset(args.path, target)
    print(f"{args.path}: {len(data)} valid points for target {target.name}")
    return EXIT_OK


def cmd_demo_multiplier(args: argparse.Namespace) -> int:
    net = build_multiplier_network()
    print("multiplier network: out = ((x+y)^2 - (x-y)^2) / 4")
    for x, y in ((2.0, 3.0), (-4.0, 5.0), (7.5, 0.0), (-6.0, -6.0)):
        out = forward(net, np.array([x, y]))[0]
        print(f"  {x:+.1f} * {y:+.1f} = {out:+.6f}")
    if args.out:
        save_model(net, args.out, provenance={"constructed": "demo-multiplier"})
        print(f"model written to {args.out}")
    return EXIT_OK


def _add_common_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output-dir", help="output directory (under AMPNET_OUTPUT_ROOT)")
    p.add_argument("--n-runs", type=int, dest="n_runs")
    p.add_argument("--base-seed", type=int, dest="base_seed")
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.add_argument("--l2", type=float, dest="l2_lambda")
    p.add_argument("--grid-resolution", type=int, dest="grid_resolution")
    p.add_argument("--jobs", type=int)
    p.add_argument("--log-interval", type=int, dest="log_interval")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ampnet",
        description="Train and evaluate networks with amplifying/attenuating neurons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="best-of-N training from a manifest")
    p_train.add_argument("--manifest", required=True)
    p_train.add_argument("--preset", help="preset name override, e.g. 'Network 5'")
    _add_common_overrides(p_train)
    p_train.set_defaults(fn=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a saved model on a target")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--target", required=True, choices=["1d", "ackley2d"])
    p_eval.add_argument("--grid-resolution", type=int, dest="grid_resolution")
    p_eval.add_argument("--output-dir", default="ampnet-eval")
    p_eval.set_defaults(fn=cmd_eval)

    p_rep = sub.add_parser("reproduce", help="rerun a published configuration table")
    p_rep.add_argument("--manifest")
    p_rep.add_argument("--table", type=int, choices=[1, 2])
    p_rep.add_argument("--networks", help="comma-separated preset subset")
    _add_common_overrides(p_rep)
    p_rep.set_defaults(fn=cmd_reproduce)

    p_data = sub.add_parser("dataset", help="generate or validate dataset CSVs")
    data_sub = p_data.add_subparsers(dest="dataset_command", required=True)
    p_gen = data_sub.add_parser("generate")
    p_gen.add_argument("--target", required=True, choices=["1d", "ackley2d"])
    p_gen.add_argument("--n", type=int, default=None)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(fn=cmd_dataset)
    p_val = data_sub.add_parser("validate")
    p_val.add_argument("--target", required=True, choices=["1d", "ackley2d"])
    p_val.add_argument("path")
    p_val.set_defaults(fn=cmd_dataset)

    p_demo = sub.add_parser("demo-multiplier", help="exact multiplication demo")
    p_demo.add_argument("--out", help="optional model output path")
    p_demo.set_defaults(fn=cmd_demo_multiplier)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", None) is None and getattr(args, "dataset_command", "") == "generate":
        args.n = 194 if args.target == "1d" else 300
    try:
        return args.fn(args)
    except CliError as err:
        print(f"error:{err.category}: {err}", file=sys.stderr)
        return err.code
    except (ConfigError, DomainError, DataValidationError) as err:
        print(f"error:validation: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (TrainingDivergedError, AllRunsDivergedError,
            NonFinitePropagationError) as err:
        print(f"error:divergence: {err}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as err:
        print(f"error:io: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
