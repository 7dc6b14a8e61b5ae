"""Flat ``key = value`` sweep configuration and figure presets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError, ParameterError
from .model import NOISE_MODELS, PhysicalParams, table_one

CRITERIA = ("simon", "product", "sum")
TRANSFERS = ("teleport", "teleclone")
PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6")
OMEGA_UNITS = ("omega_m", "rad/s")

PARAM_KEYS = ("mode_count", "omega_m", "omega_0", "mass", "cavity_length", "gamma_m",
              "gamma_c", "input_power", "detuning")
SWEEP_KEYS = ("omega_start", "omega_stop", "omega_points", "omega_units", "temperatures",
              "criteria", "transfer", "input_state", "noise_model")
KEYS = ("preset",) + PARAM_KEYS + SWEEP_KEYS


@dataclass(frozen=True)
class SweepConfig:
    params: PhysicalParams = field(default_factory=table_one)
    omega_start: float = 0.0
    omega_stop: float = 2.0
    omega_points: int = 1000
    omega_units: str = "omega_m"
    temperatures: tuple[float, ...] = (0.0,)
    criteria: tuple[str, ...] = CRITERIA
    transfer: tuple[str, ...] = ()
    input_D: tuple[float, float, float] = (0.5, 0.0, 0.5)  # D11, D12, D22
    preset: str | None = None
    noise_model: str = "canonical"

    def omega_grid(self) -> np.ndarray:
        grid = np.linspace(self.omega_start, self.omega_stop, self.omega_points)
        return grid * self.params.omega_m if self.omega_units == "omega_m" else grid

    @property
    def D(self) -> np.ndarray:
        d11, d12, d22 = self.input_D
        return np.array([[d11, d12], [d12, d22]])

    def echo(self) -> list[tuple[str, str]]:
        """Effective configuration as (key, value) text pairs."""
        p = self.params
        items = [("preset", self.preset or "none")]
        items += [(k, repr(getattr(p, k))) for k in PARAM_KEYS]
        items += [
            ("omega_start", repr(self.omega_start)),
            ("omega_stop", repr(self.omega_stop)),
            ("omega_points", repr(self.omega_points)),
            ("omega_units", self.omega_units),
            ("temperatures", ", ".join(repr(t) for t in self.temperatures)),
            ("criteria", ", ".join(self.criteria) or "none"),
            ("transfer", ", ".join(self.transfer) or "none"),
            ("input_state", "coherent" if self.input_D == (0.5, 0.0, 0.5)
             else ", ".join(repr(d) for d in self.input_D)),
            ("noise_model", self.noise_model),
        ]
        return items


def preset_values(name: str) -> dict:
    """Table I parameters plus the figure's detuning, temperatures and outputs."""
    base = {k: getattr(table_one(), k) for k in PARAM_KEYS}
    base.update(omega_start=0.0, omega_stop=2.0, omega_points=1000, omega_units="omega_m")
    if name == "fig2":
        base.update(detuning=0.0, temperatures=(0.0, 300.0), criteria=CRITERIA, transfer=())
    elif name == "fig3":
        base.update(detuning=-0.1, temperatures=(0.0, 10.0, 50.0), criteria=("sum",), transfer=())
    elif name == "fig4":
        base.update(detuning=0.1, temperatures=(0.0, 10.0, 50.0, 100.0), criteria=("sum",), transfer=())
    elif name == "fig5":
        base.update(detuning=0.1, temperatures=(0.0, 10.0, 50.0, 100.0), criteria=("sum",),
                    transfer=("teleport",))
    elif name == "fig6":
        base.update(detuning=0.1, temperatures=(0.0, 10.0, 50.0, 100.0), criteria=("sum",),
                    transfer=("teleclone",), mode_count=3)
    else:
        raise KeyError(name)
    return base


def _parse_list(text: str) -> list[str]:
    return [t.strip() for t in text.replace(";", ",").split(",") if t.strip()]


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def parse_config(text: str, preset: str | None = None) -> SweepConfig:
    """Parse and validate a configuration; all problems are reported at once.

    A preset (from the text or the ``preset`` argument, which wins) supplies
    every value first; keys given explicitly in the text override it.
    """
    problems: list[str] = []
    raw: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            problems.append(f"line {lineno}: unknown key {key!r}")
        elif key in raw:
            problems.append(f"line {lineno}: duplicate key {key!r} (first set on line {raw[key][0]})")
        else:
            raw[key] = (lineno, value)

    values: dict = {}
    preset_name = preset or (raw["preset"][1] if "preset" in raw else None)
    if preset_name is not None:
        if preset_name not in PRESETS:
            where = f"line {raw['preset'][0]}: " if "preset" in raw and not preset else ""
            problems.append(f"{where}unknown preset {preset_name!r}; expected one of {PRESETS}")
            preset_name = None
        else:
            values.update(preset_values(preset_name))

    def where(key):
        return f"line {raw[key][0]}" if key in raw else f"preset {preset_name}"

    converters = {
        "mode_count": int, "omega_points": int,
        **{k: _float for k in PARAM_KEYS if k != "mode_count"},
        "omega_start": _float, "omega_stop": _float,
    }
    for key, (lineno, value) in raw.items():
        if key == "preset":
            continue
        try:
            if key in converters:
                values[key] = converters[key](value)
            elif key == "temperatures":
                values[key] = tuple(_float(t) for t in _parse_list(value))
            elif key in ("criteria", "transfer"):
                items = tuple(_parse_list(value))
                allowed = CRITERIA if key == "criteria" else TRANSFERS
                if items == ("none",):
                    items = ()
                bad = [i for i in items if i not in allowed]
                if bad:
                    raise ValueError(f"unknown {key} {bad}; expected a subset of {allowed}")
                values[key] = items
            elif key == "omega_units":
                if value not in OMEGA_UNITS:
                    raise ValueError(f"expected one of {OMEGA_UNITS}")
                values[key] = value
            elif key == "noise_model":
                if value not in NOISE_MODELS:
                    raise ValueError(f"expected one of {NOISE_MODELS}")
                values[key] = value
            elif key == "input_state":
                if value == "coherent":
                    values["input_D"] = (0.5, 0.0, 0.5)
                else:
                    entries = tuple(_float(t) for t in _parse_list(value))
                    if len(entries) != 3:
                        raise ValueError("expected 'coherent' or 'D11, D12, D22'")
                    d11, d12, d22 = entries
                    if not (d11 > 0 and d11 * d22 - d12 * d12 > 0):
                        raise ValueError("D must be positive definite")
                    values["input_D"] = entries
        except ValueError as exc:
            problems.append(f"line {lineno}: {key}: {exc}")

    points = values.get("omega_points", SweepConfig.omega_points)
    if points < 2:
        problems.append(f"{where('omega_points')}: omega_points must be >= 2, got {points}")
    start = values.get("omega_start", SweepConfig.omega_start)
    stop = values.get("omega_stop", SweepConfig.omega_stop)
    if not start < stop:
        problems.append(f"{where('omega_stop')}: omega_start must be < omega_stop ({start} >= {stop})")
    temps = values.get("temperatures", SweepConfig.temperatures)
    if not temps:
        problems.append(f"{where('temperatures')}: at least one temperature is required")
    if any(t < 0 for t in temps):
        problems.append(f"{where('temperatures')}: temperatures must be nonnegative")

    param_values = {k: values[k] for k in PARAM_KEYS if k in values}
    params = None
    try:
        params = table_one().with_(**param_values)
    except ParameterError as exc:
        problems.append(f"parameters: {exc}")
    except TypeError as exc:
        problems.append(f"parameters: {exc}")

    if params is not None:
        n = params.mode_count
        if values.get("criteria", SweepConfig.criteria) and n < 2:
            problems.append(f"{where('mode_count')}: entanglement criteria need mode_count >= 2")
        transfer = values.get("transfer", ())
        if "teleport" in transfer and n < 2:
            problems.append(f"{where('mode_count')}: teleport needs mode_count >= 2")
        if "teleclone" in transfer and n != 3:
            problems.append(f"{where('mode_count')}: teleclone needs mode_count = 3, got {n}")

    if problems:
        raise ConfigError(problems)

    sweep_fields = {f.name for f in fields(SweepConfig)}
    kwargs = {k: v for k, v in values.items() if k in sweep_fields}
    return SweepConfig(params=params, preset=preset_name, **kwargs)
