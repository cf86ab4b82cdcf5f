"""Run artifacts: atomic file writes, config loading, manifests, checkpoints.

Every output directory gets exactly one ``manifest.json`` recording the
command, seed, config hash and wall-clock timestamps.  The manifest is the
only artifact allowed to differ between reruns; all data outputs (CSV,
report JSON, checkpoints, SVG) are byte-reproducible from the seed.

Config files are TOML (primary) or JSON, with kebab-case keys; unknown keys
are errors.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised only on older interpreters
    import tomli as tomllib

from .training.bank import PriorBank
from .training.loop import TrainConfig
from .training.network import DecoderParams, EncoderParams, ModelParams

__all__ = [
    "ConfigError",
    "atomic_write_text",
    "write_json",
    "load_config_file",
    "config_hash",
    "parse_train_config",
    "parse_data_config",
    "RunManifest",
    "save_checkpoint",
    "load_checkpoint",
    "history_to_csv",
]


class ConfigError(ValueError):
    """A malformed or out-of-range configuration (CLI exit code 1)."""


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, payload) -> None:
    atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def load_config_file(path: Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    data = path.read_bytes()
    if path.suffix.lower() == ".json":
        try:
            return json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    try:
        return tomllib.loads(data.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def config_hash(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _snake(section: dict, allowed: set, where: str) -> dict:
    out = {}
    for key, value in section.items():
        name = key.replace("-", "_")
        if name not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{where}]")
        out[name] = value
    return out


_TRAIN_FIELDS = {f.name for f in dataclasses.fields(TrainConfig)}
_DATA_FIELDS = {
    "kind",
    "classes",
    "dim",
    "separation",
    "bayes_target",
    "weights",
    "train_size",
    "test_size",
    "seed",
}
_SWEPT = ("objective", "beta", "seed")


def parse_train_config(raw: dict) -> list[TrainConfig]:
    """Expand the [train] section into one validated config per sweep point.

    ``objective``, ``beta`` and ``seed`` accept either a scalar or a list;
    lists sweep in declaration order (objectives outermost, then beta, then
    seed).
    """
    section = raw.get("train", {})
    if not isinstance(section, dict):
        raise ConfigError("[train] must be a table")
    values = _snake(section, _TRAIN_FIELDS, "train")
    sweeps = {}
    for key in _SWEPT:
        v = values.pop(key, None)
        if v is None:
            sweeps[key] = [getattr(TrainConfig, key)]
        elif isinstance(v, (list, tuple)):
            if not v:
                raise ConfigError(f"train.{key} sweep must be nonempty")
            sweeps[key] = list(v)
        else:
            sweeps[key] = [v]
    configs = []
    try:
        for objective in sweeps["objective"]:
            for beta in sweeps["beta"]:
                for seed in sweeps["seed"]:
                    configs.append(
                        TrainConfig(
                            objective=objective, beta=beta, seed=seed, **values
                        ).validate()
                    )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return configs


def parse_data_config(raw: dict) -> dict:
    """Validated [data] section with defaults: generator spec plus sizes."""
    from .training.data import GeneratorSpec

    section = raw.get("data", {})
    if not isinstance(section, dict):
        raise ConfigError("[data] must be a table")
    values = _snake(section, _DATA_FIELDS, "data")
    train_size = int(values.pop("train_size", 500))
    test_size = int(values.pop("test_size", train_size))
    seed = int(values.pop("seed", 0))
    if train_size < 1 or test_size < 1:
        raise ConfigError("train-size and test-size must be >= 1")
    try:
        spec = GeneratorSpec(**values)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return {"spec": spec, "train_size": train_size, "test_size": test_size, "seed": seed}


@dataclass
class RunManifest:
    """Provenance record for one CLI run (the only non-reproducible output)."""

    command: str
    seed: int
    config_path: str = ""
    config_sha256: str = ""
    output_dir: str = ""
    started_at: float = 0.0
    finished_at: float = 0.0

    def start(self) -> "RunManifest":
        self.started_at = time.time()
        return self

    def finish(self, out_dir: Path) -> None:
        self.finished_at = time.time()
        self.output_dir = str(out_dir)
        write_json(Path(out_dir) / "manifest.json", dataclasses.asdict(self))


def _pack(arrays: dict) -> dict:
    return {
        name: {"shape": list(arr.shape), "data": np.asarray(arr, dtype=float).ravel().tolist()}
        for name, arr in arrays.items()
    }


def _unpack(payload: dict) -> dict:
    return {
        name: np.asarray(rec["data"], dtype=float).reshape(rec["shape"])
        for name, rec in payload.items()
    }


def save_checkpoint(
    path: Path, params: ModelParams, bank: PriorBank, config: TrainConfig
) -> None:
    payload = {
        "format": "mdlb-checkpoint-v1",
        "config": dataclasses.asdict(config),
        "encoder": _pack({f.name: getattr(params.encoder, f.name) for f in dataclasses.fields(EncoderParams)}),
        "decoder": _pack({f.name: getattr(params.decoder, f.name) for f in dataclasses.fields(DecoderParams)}),
        "bank": {
            "means": _pack({"means": bank.means})["means"],
            "stds": _pack({"stds": bank.stds})["stds"],
            "alpha": bank.alpha,
            "mode": bank.mode,
        },
    }
    write_json(path, payload)


def load_checkpoint(path: Path) -> tuple[ModelParams, PriorBank, TrainConfig]:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read checkpoint {path}: {exc}") from exc
    if payload.get("format") != "mdlb-checkpoint-v1":
        raise ConfigError(f"unrecognized checkpoint format in {path}")
    params = ModelParams(
        encoder=EncoderParams(**_unpack(payload["encoder"])),
        decoder=DecoderParams(**_unpack(payload["decoder"])),
    )
    bank_rec = payload["bank"]
    bank = PriorBank(
        means=np.asarray(bank_rec["means"]["data"]).reshape(bank_rec["means"]["shape"]),
        stds=np.asarray(bank_rec["stds"]["data"]).reshape(bank_rec["stds"]["shape"]),
        alpha=bank_rec["alpha"],
        mode=bank_rec["mode"],
    )
    config = TrainConfig(**payload["config"]).validate()
    return params, bank, config


def history_to_csv(history: list[dict]) -> str:
    """Stable history schema: epoch,split,accuracy,loss,mean_kl,log_likelihood."""
    lines = ["epoch,split,accuracy,loss,mean_kl,log_likelihood"]
    for row in history:
        lines.append(
            f"{row['epoch']},{row['split']},{row['accuracy']!r},"
            f"{row['loss']!r},{row['mean_kl']!r},{row['log_likelihood']!r}"
        )
    return "\n".join(lines) + "\n"
