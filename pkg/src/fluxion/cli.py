"""Command-line driver: config parsing, validation, and result serialization.

Config files are INI text with a [run] section (experiment, seed) and a
[params] section of experiment-specific keys.  Grid outputs go to CSV with
at least 12 significant digits; scalar summaries go to key=value text.  Data
files are deterministic for a fixed config and seed; timestamps live only in
the metadata sidecars.  All files are written to a temporary name and
renamed into place, so failed runs leave no partial outputs.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from importlib import metadata as importlib_metadata

from .experiments import EXPERIMENTS, PARAM_SPECS, SummaryOutput, TableOutput, cross_checks

MAX_SEED = 2**64 - 1


class ConfigError(Exception):
    def __init__(self, diagnostics: list[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    parameters: dict[str, str] = field(default_factory=dict)
    seed: int = 0


@dataclass
class ResultTable:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple]
    metadata: dict[str, str]


def load_config(path: str, experiment: str, seed_override: int | None = None) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # parameter names are case-sensitive (Jt, J)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read config file {path}: {exc}"]) from exc
    except configparser.Error as exc:
        raise ConfigError([f"malformed config file {path}: {exc}"]) from exc
    diagnostics = []
    for section in parser.sections():
        if section not in ("run", "params"):
            diagnostics.append(f"unknown config section [{section}]")
    seed = 0
    if parser.has_section("run"):
        for key in parser["run"]:
            if key not in ("experiment", "seed"):
                diagnostics.append(f"unknown key {key!r} in [run]")
        named = parser["run"].get("experiment")
        if named is not None and named != experiment:
            diagnostics.append(
                f"config names experiment {named!r} but {experiment!r} was requested"
            )
        raw_seed = parser["run"].get("seed")
        if raw_seed is not None:
            try:
                seed = int(raw_seed)
            except ValueError:
                diagnostics.append(f"seed must be an integer, got {raw_seed!r}")
    if seed_override is not None:
        seed = seed_override
    if diagnostics:
        raise ConfigError(diagnostics)
    params = dict(parser["params"]) if parser.has_section("params") else {}
    return RunConfig(experiment, params, seed)


def _parse_value(key: str, raw: str, spec) -> tuple[object, str | None]:
    try:
        if spec.kind == "int":
            return int(raw), None
        if spec.kind == "float":
            return float(raw), None
        if spec.kind == "int-list":
            return tuple(int(v) for v in raw.split(",") if v.strip() != ""), None
        if spec.kind == "float-list":
            return tuple(float(v) for v in raw.split(",") if v.strip() != ""), None
    except ValueError:
        return None, f"{key} must be a {spec.kind}, got {raw!r}"
    if spec.kind == "choice":
        if raw not in spec.choices:
            return None, f"{key} must be one of {', '.join(spec.choices)}; got {raw!r}"
        return raw, None
    return raw, None


def resolve(config: RunConfig) -> dict:
    """Typed parameter dict from raw config, or ConfigError with diagnostics."""
    diagnostics = []
    if config.experiment not in EXPERIMENTS:
        raise ConfigError(
            [
                f"unknown experiment {config.experiment!r}; choose from "
                + ", ".join(sorted(EXPERIMENTS))
            ]
        )
    if not 0 <= config.seed <= MAX_SEED:
        diagnostics.append(f"seed must be in 0..{MAX_SEED}")
    specs = PARAM_SPECS[config.experiment]
    params = {key: spec.default for key, spec in specs.items()}
    for key, raw in config.parameters.items():
        if key not in specs:
            diagnostics.append(f"unknown parameter {key!r} for {config.experiment}")
            continue
        value, problem = _parse_value(key, raw, specs[key])
        if problem:
            diagnostics.append(problem)
            continue
        params[key] = value
    for key, spec in specs.items():
        value = params[key]
        if spec.minimum is not None:
            values = value if isinstance(value, tuple) else (value,)
            if any(v < spec.minimum for v in values):
                diagnostics.append(f"{key} must be >= {spec.minimum}, got {value}")
        if spec.maximum is not None:
            values = value if isinstance(value, tuple) else (value,)
            if any(v > spec.maximum for v in values):
                diagnostics.append(f"{key} must be <= {spec.maximum}, got {value}")
    if not diagnostics:
        diagnostics.extend(cross_checks(config.experiment, params))
    if diagnostics:
        raise ConfigError(diagnostics)
    return params


def validate(config: RunConfig) -> list[str]:
    """Diagnostics for a config; empty list means it is runnable."""
    try:
        resolve(config)
    except ConfigError as exc:
        return exc.diagnostics
    return []


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.15g}"
    return str(v)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _package_version() -> str:
    try:
        return importlib_metadata.version("fluxion")
    except importlib_metadata.PackageNotFoundError:
        return "unreleased"


def _metadata(config: RunConfig, extra: dict[str, str], wall_time: float) -> dict[str, str]:
    meta = {
        "experiment": config.experiment,
        "seed": str(config.seed),
        "version": _package_version(),
        "wall_time_s": f"{wall_time:.3f}",
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    for key, raw in sorted(config.parameters.items()):
        meta[f"param.{key}"] = raw
    meta.update(extra)
    return meta


def _write_metadata(path: str, meta: dict[str, str]) -> None:
    _atomic_write(path, "".join(f"{k} = {v}\n" for k, v in meta.items()))


def run(config: RunConfig, out_dir: str = ".", threads: int = 1) -> list[str]:
    """Execute one experiment; returns the paths written."""
    params = resolve(config)
    os.makedirs(out_dir, exist_ok=True)
    started = time.monotonic()
    outputs = EXPERIMENTS[config.experiment](params, config.seed, threads)
    wall = time.monotonic() - started
    written = []
    for output in outputs:
        if isinstance(output, TableOutput):
            path = os.path.join(out_dir, f"{output.name}.csv")
            lines = [",".join(output.columns)]
            for row in output.rows:
                lines.append(",".join(_format_cell(v) for v in row))
            _atomic_write(path, "\n".join(lines) + "\n")
            meta = _metadata(config, output.extra, wall)
        elif isinstance(output, SummaryOutput):
            path = os.path.join(out_dir, f"{output.name}.txt")
            _atomic_write(
                path, "".join(f"{k} = {_format_cell(v)}\n" for k, v in output.items.items())
            )
            meta = _metadata(config, {}, wall)
        else:
            raise TypeError(f"unexpected output {output!r}")
        _write_metadata(path + ".meta", meta)
        written.extend([path, path + ".meta"])
    return written


def read_table(path: str) -> ResultTable:
    """Re-parse a written CSV and its sidecar into a ResultTable."""
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip() != ""]
    columns = tuple(lines[0].split(","))
    rows = [tuple(line.split(",")) for line in lines[1:]]
    metadata = {}
    meta_path = path + ".meta"
    if os.path.exists(meta_path):
        with open(meta_path) as fh:
            for line in fh:
                if " = " in line:
                    key, value = line.split(" = ", 1)
                    metadata[key.strip()] = value.rstrip("\n")
    return ResultTable(os.path.basename(path).rsplit(".", 1)[0], columns, rows, metadata)


def config_from_metadata(metadata: dict[str, str]) -> RunConfig:
    params = {
        key[len("param."):]: value for key, value in metadata.items() if key.startswith("param.")
    }
    return RunConfig(metadata["experiment"], params, int(metadata["seed"]))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fluxion",
        description="Information-flux experiments for circuits, chains, and open dynamics.",
    )
    parser.add_argument("experiment", help=", ".join(sorted(EXPERIMENTS)))
    parser.add_argument("--config", required=True, help="INI config file")
    parser.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=1, help="worker threads where supported")
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        config = load_config(args.config, args.experiment, args.seed)
        for path in run(config, args.out, args.threads):
            print(path)
    except ConfigError as exc:
        for diag in exc.diagnostics:
            print(f"config error: {diag}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001  (runtime failure -> exit 1)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
