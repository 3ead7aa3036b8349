"""Experiment configuration: a strict single-file key = value format.

One experiment per file.  Every file opens with a schema tag so stale
configs fail loudly instead of running with reinterpreted keys:

    schema = kglab-experiment-v1
    experiment = dispersive-decay
    dim = 2
    n = 256
    box = 64pi
    ...

Unknown keys are errors, values are typed per key, and all validation
happens at parse time, before any numerical work starts.  Floats accept
a "pi" suffix (box = 64pi) because box sizes are naturally multiples of
pi.  List-valued keys are comma separated.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field, fields

__all__ = ["ExperimentConfig", "EXPERIMENT_IDS", "SCHEMA", "parse_config", "load_config"]

SCHEMA = "kglab-experiment-v1"

EXPERIMENT_IDS = (
    "paradiff-oracle",
    "multiplier-bounds",
    "dispersive-decay",
    "strichartz-growth",
    "phase-scan",
    "good-unknown-scaling",
    "reduced-residual",
    "lifespan-sweep",
    "weighted-bootstrap",
    "scattering",
)

_SIGN_PAIRS = ("++", "+-", "-+", "--")


def _parse_float(raw: str) -> float:
    raw = raw.strip()
    if raw.endswith("pi"):
        return float(raw[:-2].strip() or "1") * math.pi
    return float(raw)


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_float_list(raw: str) -> tuple:
    items = [piece.strip() for piece in raw.split(",")]
    return tuple(_parse_float(piece) for piece in items if piece)


def _parse_str_list(raw: str) -> tuple:
    return tuple(piece.strip() for piece in raw.split(",") if piece.strip())


_PARSERS = {
    int: lambda raw: int(raw.strip(), 0),
    float: _parse_float,
    bool: _parse_bool,
    str: lambda raw: raw.strip(),
    "float_list": _parse_float_list,
    "str_list": _parse_str_list,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed, validated experiment description.

    Defaults are the desk-scale parameters each experiment was tuned
    at; a config file only has to override what it changes.  `eps`,
    `signs`, and similar list-valued knobs expand into the run matrix.
    """

    experiment: str
    dim: int = 1
    n: int = 256
    box: float = 32 * math.pi
    seed: int = 1
    eps: tuple = (0.1,)
    t0: float = 1.0
    t1: float = 2.0
    dt: float = 0.0          # 0 means "use the CFL limit"
    checkpoints: int = 17
    schedule: str = "log"
    band_lo: int = -1
    band_hi: int = 0
    envelope: float = 0.0    # <x>^-envelope data shaping; 0 disables
    alpha: float = 0.18
    norm_order: int = 0      # 0 means "default for the dimension"
    coeff_alpha: float = 1.0
    coeff_beta: float = 1.0
    coeff_gamma_u: float = 1.0
    coeff_gamma_t: float = 1.0
    signs: tuple = _SIGN_PAIRS
    radius: float = 8.0
    step: float = 0.25
    rule: str = "simpson"
    fit_lo: float = 0.0      # 0 means "whole sample range"
    fit_hi: float = 0.0
    blow_up_factor: float = 10.0
    ladder: int = 8
    include_tail: bool = False
    snapshot: bool = False
    out: str = ""            # "" falls back to KGLAB_OUT or ./out
    workers: int = 0         # 0 falls back to KGLAB_WORKERS or 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_IDS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; "
                f"known ids: {', '.join(EXPERIMENT_IDS)}"
            )
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2, or 3")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two, at least 8")
        if self.box <= 0:
            raise ValueError("box must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if not self.eps:
            raise ValueError("eps list must be nonempty")
        if any(e <= 0 for e in self.eps):
            raise ValueError("every eps must be positive")
        if self.t0 <= 0 or self.t1 <= self.t0:
            raise ValueError("need 0 < t0 < t1")
        if self.dt < 0:
            raise ValueError("dt must be nonnegative (0 = CFL)")
        if self.checkpoints < 2:
            raise ValueError("checkpoints must be at least 2")
        if self.schedule not in ("log", "linear"):
            raise ValueError("schedule must be 'log' or 'linear'")
        if self.band_hi < self.band_lo:
            raise ValueError("band_hi must be at least band_lo")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.norm_order < 0:
            raise ValueError("norm_order must be nonnegative")
        for pair in self.signs:
            if pair not in _SIGN_PAIRS:
                raise ValueError(f"bad sign pair {pair!r}; use ++, +-, -+, --")
        if not self.signs:
            raise ValueError("signs list must be nonempty")
        if self.radius <= 0 or self.step <= 0:
            raise ValueError("radius and step must be positive")
        if self.rule not in ("simpson", "trapezoid"):
            raise ValueError("rule must be 'simpson' or 'trapezoid'")
        if self.blow_up_factor <= 1:
            raise ValueError("blow_up_factor must exceed 1")
        if self.ladder < 1:
            raise ValueError("ladder must be at least 1")
        if self.workers < 0:
            raise ValueError("workers must be nonnegative (0 = env/default)")

    # -- derived accessors ------------------------------------------------

    def out_dir(self) -> str:
        return self.out or os.environ.get("KGLAB_OUT", "out")

    def worker_count(self) -> int:
        if self.workers:
            return self.workers
        return max(1, int(os.environ.get("KGLAB_WORKERS", "1")))

    def content_hash(self) -> str:
        """Hash of the canonical key = value rendering; names outputs."""
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]

    def canonical(self) -> str:
        lines = [f"schema = {SCHEMA}"]
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                rendered = ", ".join(_render(v) for v in value)
            else:
                rendered = _render(value)
            lines.append(f"{f.name} = {rendered}")
        return "\n".join(lines) + "\n"


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


_FIELD_TYPES = {}
for _f in fields(ExperimentConfig):
    if _f.name in ("eps",):
        _FIELD_TYPES[_f.name] = "float_list"
    elif _f.name in ("signs",):
        _FIELD_TYPES[_f.name] = "str_list"
    else:
        _FIELD_TYPES[_f.name] = _f.type if isinstance(_f.type, type) else {
            "int": int, "float": float, "bool": bool, "str": str
        }[_f.type]


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate one experiment file.  Fails before compute."""
    seen = {}
    schema = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key == "schema":
            schema = raw
            continue
        if key not in _FIELD_TYPES:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        parser = _PARSERS[_FIELD_TYPES[key]]
        try:
            seen[key] = parser(raw)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    if schema is None:
        raise ValueError("missing 'schema' line")
    if schema != SCHEMA:
        raise ValueError(f"schema {schema!r} not supported; expected {SCHEMA!r}")
    if "experiment" not in seen:
        raise ValueError("missing 'experiment' key")
    return ExperimentConfig(**seen)


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())
