"""``key = value`` run configuration.

Example::

    # kappa = 2 alpha = 2 on the second kyoto calibration
    alpha = 1.0
    kappa = 2.0
    steps = 8
    t1_us = 334.16
    t2_us = 202.09
    tr_ns = 1440
    p01 = 0.0062
    p10 = 0.0066
    table_model = noisy

Noise is given either directly (``p_ad``, ``p_d``) or through coherence
times (``t1_us``, ``t2_us``, ``tr_ns``), never both. Readout confusion
(``p01``, ``p10``) combines with either form.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .collision import MAX_PRUNED_STEPS, MAX_STEPS, ModelParams, NoiseParams
from .errors import ConflictingNoiseForms, MalformedValue, MissingKey, UnknownKey
from .quantum import p_ad_from_times, p_d_from_times


def _choice(*options):
    def conv(text):
        if text not in options:
            raise ValueError(f"expected one of {options}")
        return text

    return conv


def _prob(text):
    p = float(text)
    if not 0.0 <= p <= 1.0:
        raise ValueError("not a probability")
    return p


def _positive(text):
    x = float(text)
    if not x > 0:
        raise ValueError("must be positive")
    return x


def _pos_int(text):
    n = int(text)
    if n < 1:
        raise ValueError("must be at least 1")
    return n


def _nonneg_int(text):
    n = int(text)
    if n < 0:
        raise ValueError("must be non-negative")
    return n


_KEYS = {
    "alpha": float,
    "kappa": float,
    "omega0": _positive,
    "steps": _nonneg_int,
    "shots": _pos_int,
    "seed": int,
    "basis": _choice("x", "z"),
    "p_ad": _prob,
    "p_d": _prob,
    "p01": _prob,
    "p10": _prob,
    "t1_us": _positive,
    "t2_us": _positive,
    "tr_ns": _positive,
    "table_model": _choice("ideal", "noisy"),
    "prune_threshold": _prob,
    "output_path": str,
    "battery_p01": _prob,
    "battery_p10": _prob,
    "t_final": _positive,
    "dt": _positive,
    "halvings": _nonneg_int,
    "workers": _pos_int,
}

_DIRECT = ("p_ad", "p_d")
_TIMING = ("t1_us", "t2_us", "tr_ns")
_READOUT = ("p01", "p10")


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 1.0
    kappa: float = 1.0
    omega0: float = 1.0
    steps: int = 10
    shots: int = 10_000
    seed: int = 0
    basis: str = "x"
    noise: NoiseParams = field(default_factory=NoiseParams.none)
    table_model: str = "ideal"
    prune_threshold: float = 0.0
    output_path: str | None = None
    battery_readout: tuple[float, float] = (0.0, 0.0)
    t_final: float = 1.0
    dt: float = 4e-3
    halvings: int = 3
    workers: int = 1

    @property
    def model(self) -> ModelParams:
        return ModelParams(self.alpha, self.kappa, self.steps, self.omega0, self.basis)

    @property
    def noise_configured(self) -> bool:
        return self.noise.enabled

    def table_noise(self) -> NoiseParams:
        return self.noise if self.table_model == "noisy" else NoiseParams.none()


def parse_config(text: str) -> RunConfig:
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise MalformedValue(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise UnknownKey(f"unknown key {key!r}", lineno)
        if key in values:
            raise MalformedValue(f"duplicate key {key!r}", lineno)
        try:
            values[key] = _KEYS[key](value)
        except ValueError as exc:
            raise MalformedValue(f"bad value {value!r} for {key!r}: {exc}", lineno) from None
        lines[key] = lineno

    direct = [k for k in _DIRECT if k in values]
    timing = [k for k in _TIMING if k in values]
    if direct and timing:
        raise ConflictingNoiseForms(
            f"both direct ({', '.join(direct)}) and timing ({', '.join(timing)}) noise given",
            max(lines[k] for k in direct + timing),
        )
    for form, group in ((direct, _DIRECT), (timing, _TIMING)):
        if form and len(form) != len(group):
            missing = [k for k in group if k not in values]
            raise MissingKey(f"{', '.join(missing)} required alongside {', '.join(form)}", max(lines[k] for k in form))

    noise = NoiseParams.none()
    readout = tuple(values.get(k, 0.0) for k in _READOUT)
    if timing:
        p_ad = p_ad_from_times(values["t1_us"], values["tr_ns"])
        p_d = p_d_from_times(values["t2_us"], values["tr_ns"])
        noise = NoiseParams(p_ad, p_d, *readout)
    elif direct or any(k in values for k in _READOUT):
        noise = NoiseParams(values.get("p_ad", 0.0), values.get("p_d", 0.0), *readout)

    plain = {k: v for k, v in values.items() if k not in _DIRECT + _TIMING + _READOUT + ("battery_p01", "battery_p10")}
    cfg = RunConfig(
        noise=noise,
        battery_readout=(values.get("battery_p01", 0.0), values.get("battery_p10", 0.0)),
        **plain,
    )
    ceiling = MAX_PRUNED_STEPS if cfg.prune_threshold > 0 else MAX_STEPS
    if cfg.steps > ceiling:
        raise MalformedValue(f"steps={cfg.steps} exceeds {ceiling} (set prune_threshold > 0 to go beyond {MAX_STEPS})", lines.get("steps"))
    return cfg
