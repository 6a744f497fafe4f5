"""Command line interface.

    brushlab <subcommand> --config <path> [--out <dir>] [--threads N]

Every subcommand writes ``<out>/<subcommand>.csv`` and ``<out>/summary.json``
and exits with the code of its :class:`~brushlab.status.Status`.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

import brushlab.experiments  # noqa: F401  registers the experiments
from brushlab import digest
from brushlab.config import ExperimentConfig, resolve_threads
from brushlab.registry import ExperimentOutput, default_registry
from brushlab.status import Status, status_for_error

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brushlab",
        description="Numerical experiments with anisotropic brushlet bases.",
    )
    subcommands = parser.add_subparsers(dest="command", required=True)
    for name in default_registry.names():
        sub = subcommands.add_parser(name)
        sub.add_argument("--config", required=True, help="JSON experiment configuration")
        sub.add_argument("--out", default=".", help="directory of the CSV and JSON outputs")
        sub.add_argument("--threads", type=int, default=None, help="worker threads")
        sub.add_argument(
            "--log-level",
            default="WARNING",
            choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        )
    return parser


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def summary_json(
    name: str, config: ExperimentConfig, input_hash: str, output: ExperimentOutput
) -> str:
    summary = {
        "experiment": name,
        "config": config.echo(),
        "input_hash": input_hash,
        "results": output.results,
    }
    return json.dumps(summary, sort_keys=True, indent=2, default=_plain) + "\n"


def table_csv(output: ExperimentOutput) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(output.header)
    for row in output.rows:
        writer.writerow([_plain(v) if isinstance(v, np.generic) else v for v in row])
    return buffer.getvalue()


def write_atomically(directory: str, files: Dict[str, str]) -> List[str]:
    """Writes every file to a temporary name first and renames them only
    once all were written."""
    os.makedirs(directory, exist_ok=True)
    staged = []
    try:
        for name, content in files.items():
            fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{name}.")
            staged.append((tmp, os.path.join(directory, name)))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(content)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.remove(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)
    return [path for _, path in staged]


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def run(argv: Optional[Sequence[str]] = None) -> Status:
    """Runs one subcommand and returns its status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(levelname)s %(name)s: %(message)s",
    )
    name = args.command
    try:
        config = ExperimentConfig.from_file(args.config)
        threads = resolve_threads(config.threads, args.threads).as_int()
        inputs = [_read_bytes(args.config)]
        if config.coefficients is not None:
            inputs.append(_read_bytes(config.coefficients))
        output = default_registry.run_sync(name, config, threads)
        summary = summary_json(name, config, digest.input_hash(inputs), output)
        written = write_atomically(
            args.out, {f"{name}.csv": table_csv(output), "summary.json": summary}
        )
    except Exception as e:
        status = status_for_error(e)
        if status is Status.INTERNAL_ERROR:
            logger.exception("%s failed", name)
        else:
            logger.error("%s failed (%s): %s", name, status, e)
        print(f"brushlab {name}: {e}", file=sys.stderr)
        return status
    for path in written:
        logger.info("wrote %s", path)
    sys.stdout.write(json.dumps(output.results, sort_keys=True, default=_plain) + "\n")
    return Status.OK


def main(argv: Optional[Sequence[str]] = None):
    sys.exit(run(argv).exit_code)
