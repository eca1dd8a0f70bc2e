"""
Shared command arguments, configuration resolution and output helpers
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from pydantic import BaseModel

from qpart.core.errors import InputError
from qpart.models.sweep import PresetChoice
from qpart.schemas.config import SCHEMA_VERSION, RunConfig
from qpart.services import param_service

logger = logging.getLogger(__name__)


def _float_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file of RunConfig fields")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="primary output file")
    parser.add_argument("--report", help="JSON report file (stdout when omitted)")


def add_objective_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nu", type=float, help="balance tolerance in [0, 0.5)")
    parser.add_argument("--lambda", dest="lam", type=float, help="balance penalty weight")


def add_coarsening_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, help="coarse graph size (qubits)")
    parser.add_argument("--d", type=int, help="spectral embedding dimension")
    parser.add_argument("--n-screen", dest="n_screen", type=int, help="k-means rounds screened")
    parser.add_argument("--n-trials", dest="n_trials", type=int, help="random FM starts per round")


def add_solver_arguments(parser: argparse.ArgumentParser) -> None:
    ramp = parser.add_mutually_exclusive_group()
    ramp.add_argument("--delta", type=float, help="linear-ramp parameter")
    ramp.add_argument("--preset", help="Model, Model:<size> or Model:mean")
    parser.add_argument("--p", type=int, help="circuit depth")
    parser.add_argument("--shots", type=int)
    parser.add_argument("--n-iter", dest="n_iter", type=int)
    parser.add_argument("--top-k", dest="top_k", type=int)
    parser.add_argument("--eta", type=int, choices=(-1, 1))
    parser.add_argument("--c-factor", dest="c_factor", type=int, help="keep C*k largest terms")
    parser.add_argument("--early-stop", dest="early_stop", action="store_const", const=True)
    parser.add_argument("--no-fm-samples", dest="fm_on_samples", action="store_const", const=False)
    parser.add_argument("--single-pass", dest="single_pass", action="store_const", const=True)


def add_sweep_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--deltas", type=_float_list, help="comma-separated delta grid")
    parser.add_argument("--depths", type=int, nargs="+", help="circuit depths")


class ConfigResolver:
    """defaults < preset < config file < command-line flags"""

    def __init__(self, command: str, args: argparse.Namespace, defaults: Optional[Dict[str, Any]] = None):
        self.command = command
        self.defaults = dict(defaults or {})
        self.file_layer = self._read_config_file(getattr(args, "config", None))
        self.flag_layer = {
            name: getattr(args, name)
            for name in RunConfig.model_fields
            if name not in ("command", "schema_version") and getattr(args, name, None) is not None
        }
        self.preset: Optional[PresetChoice] = None

    @staticmethod
    def _read_config_file(path: Optional[str]) -> Dict[str, Any]:
        if not path:
            return {}
        try:
            data = json.loads(Path(path).read_text())
        except OSError as e:
            raise InputError(f"cannot read config file {path}: {e}")
        except ValueError as e:
            raise InputError(f"config file {path} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise InputError(f"config file {path} must hold a JSON object")
        data = dict(data)
        data.pop("command", None)
        version = data.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise InputError(f"config schema version {version} is not supported (expected {SCHEMA_VERSION})")
        return data

    def resolve(self, preset_size: Optional[int] = None) -> RunConfig:
        """Merge the layers; the preset layer needs the problem size it is resolved for"""
        preset_layer: Dict[str, Any] = {}
        name = self.flag_layer.get("preset", self.file_layer.get("preset"))
        if name and preset_size is not None:
            self.preset = param_service.resolve_preset(name, preset_size)
            preset_layer = {"delta": self.preset.delta, "p": self.preset.p, "c_factor": self.preset.c_factor}
            logger.info(
                "Preset %s (%s rule) at %d qubits: delta=%.4f p=%d C=%d",
                self.preset.model, self.preset.rule, self.preset.size,
                self.preset.delta, self.preset.p, self.preset.c_factor,
            )
        merged = {**self.defaults, **preset_layer, **self.file_layer, **self.flag_layer}
        return RunConfig(command=self.command, **merged)


def require(cfg: RunConfig, *fields: str) -> None:
    for name in fields:
        if getattr(cfg, name) is None:
            raise InputError(f"--{name.replace('_', '-')} is required for {cfg.command}")


def write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e}")
    logger.info("Wrote %s", path)


def write_lines(path: str, models: Iterable[BaseModel]) -> None:
    """One JSON object per line"""
    write_text(path, "".join(m.model_dump_json() + "\n" for m in models))


def emit_report(cfg: RunConfig, report: BaseModel) -> None:
    """Write the report to --report, or stdout when omitted"""
    text = report.model_dump_json(indent=2) + "\n"
    if cfg.report:
        write_text(cfg.report, text)
    else:
        sys.stdout.write(text)


def config_document(cfg: RunConfig) -> Dict[str, Any]:
    return cfg.model_dump(mode="json")
