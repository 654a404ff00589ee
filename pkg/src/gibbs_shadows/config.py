"""Flat key = value experiment configs with typed, line-precise validation.

Unknown keys are hard errors so a typo cannot silently skew a result table.
Grids (beta, degree, shadow counts, sizes) are always explicit lists; there
are no implied sweep defaults.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Field:
    kind: str  # int | float | str | choice | int_list | float_list | str_list
    required: bool = False
    default: object = None
    choices: tuple = ()


_MODEL = Field("choice", default="xxz", choices=("xxz", "random-xyz"))

SCHEMAS: dict[str, dict[str, Field]] = {
    "tpq-degree-sweep": {
        "seed": Field("int", default=0),
        "model": _MODEL,
        "n": Field("int", required=True),
        "j": Field("float", default=0.5),
        "delta": Field("float", default=0.75),
        "model_seed": Field("int", default=1),
        "beta_grid": Field("float_list", required=True),
        "degree_grid": Field("int_list", required=True),
        "u_seeds": Field("int", default=10),
        "window": Field("choice", default="bound", choices=("bound", "exact")),
    },
    "shadow-compare": {
        "seed": Field("int", default=0),
        "model": _MODEL,
        "n": Field("int", required=True),
        "j": Field("float", default=0.5),
        "delta": Field("float", default=0.75),
        "model_seed": Field("int", default=1),
        "beta": Field("float", required=True),
        "degree": Field("int", default=32),
        "shadow_grid": Field("int_list", required=True),
        "u_count": Field("int", default=10),
        "window": Field("choice", default="bound", choices=("bound", "exact")),
    },
    "purity-scan": {
        "seed": Field("int", default=0),
        "j": Field("float", default=0.5),
        "delta": Field("float", default=0.7),
        "n_grid": Field("int_list", required=True),
        "beta_grid": Field("float_list", required=True),
    },
    "tpq-ensemble": {
        "seed": Field("int", default=0),
        "j": Field("float", default=0.5),
        "delta": Field("float", default=0.7),
        "beta": Field("float", required=True),
        "n_grid": Field("int_list", required=True),
        "ensemble_sizes": Field("int_list", required=True),
        "repetitions": Field("int", default=20),
    },
    "qbm-train": {
        "seed": Field("int", default=0),
        "n": Field("int", default=8),
        "target": Field("choice", default="gibbs", choices=("gibbs", "classical")),
        "target_j": Field("float", default=0.5),
        "target_delta": Field("float", default=0.75),
        "target_beta": Field("float", default=1.0),
        "data_csv": Field("str", default=""),
        "synthetic_samples": Field("int", default=10000),
        "synthetic_scale": Field("float", default=0.4),
        "backends": Field("str_list", required=True),
        "lr": Field("float", required=True),
        "steps": Field("int", required=True),
        "shadow_count": Field("int", default=5000),
        "degree": Field("int", default=32),
        "u_count": Field("int", default=1),
        "mom_groups": Field("int", default=0),
        "window": Field("choice", default="bound", choices=("bound", "exact")),
        "tpq_states": Field("int", default=1),
    },
}

EXPERIMENTS = tuple(SCHEMAS)


def _convert(kind: str, raw: str, line_no: int, key: str):
    def fail(expected):
        raise ConfigError(f"line {line_no}: expected {expected} for {key!r}, got {raw!r}")

    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind in ("str", "choice"):
            return raw
        items = [v.strip() for v in raw.split(",") if v.strip()]
        if not items:
            fail("a nonempty list")
        if kind == "int_list":
            return [int(v) for v in items]
        if kind == "float_list":
            return [float(v) for v in items]
        if kind == "str_list":
            return items
    except ConfigError:
        raise
    except ValueError:
        fail(kind.replace("_", " "))
    raise AssertionError(f"unknown field kind {kind}")


def parse_config(text: str) -> dict:
    """Parse and validate; returns the resolved config including 'experiment'."""
    raw: dict[str, tuple[str, int]] = {}
    experiment = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {line_no}: expected `key = value`")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {line_no}: expected `key = value`")
        if key == "experiment":
            if value not in SCHEMAS:
                raise ConfigError(
                    f"line {line_no}: unknown experiment {value!r}; "
                    f"expected one of {', '.join(EXPERIMENTS)}"
                )
            experiment = value
            continue
        if key in raw:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        raw[key] = (value, line_no)
    if experiment is None:
        raise ConfigError("missing required key 'experiment'")
    schema = SCHEMAS[experiment]
    resolved: dict = {"experiment": experiment}
    for key, (value, line_no) in raw.items():
        if key not in schema:
            raise ConfigError(f"line {line_no}: unknown key {key!r} for {experiment}")
        f = schema[key]
        converted = _convert(f.kind, value, line_no, key)
        if f.kind == "choice" and converted not in f.choices:
            raise ConfigError(
                f"line {line_no}: {key!r} must be one of {', '.join(f.choices)}"
            )
        resolved[key] = converted
    for key, f in schema.items():
        if key not in resolved:
            if f.required:
                raise ConfigError(f"missing required key {key!r} for {experiment}")
            resolved[key] = f.default
    return resolved


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
