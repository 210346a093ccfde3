"""YAML configuration files for the command line tool.

Field file::

    alpha: "0.5*y1"
    domain:
      boxMin: [0, 0, 0, 0]
      boxMax: [0, 1, 0, 0]
    points: [1, 100, 1, 1]

Spinor file (``im`` optional)::

    re: ["cos(y1)", "0", "0", "0"]
    im: ["sin(y1)", "0", "0", "0"]

Gauge file: ``a``, ``b``, ``m``, ``B`` (4 expressions), ``phi``,
``convention`` (``gamma5`` or ``standard``), ``method`` (``symbolic`` or
``central``) and ``h``.  Theta file: ``theta``.  Path file: either
``p`` (4 expressions in ``s``) or ``points`` (list of 4-vectors) with
optional ``s``, plus ``metric`` and ``quadrature``.
"""

from __future__ import annotations

from dataclasses import dataclass

import yaml

from .field import FieldSpec, Grid, parse_field
from .gauge import DEFAULT_B_COUPLING, AnalyticSpinor, GaugeConfig
from .paths import Path


class ConfigError(ValueError):
    pass


def _load(path) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return data


def _need(data, key, path):
    if key not in data:
        raise ConfigError(f"{path}: missing key {key!r}")
    return data[key]


@dataclass(frozen=True)
class FieldConfig:
    spec: FieldSpec
    grid: Grid


def load_field(path) -> FieldConfig:
    data = _load(path)
    spec = parse_field(str(_need(data, "alpha", path)))
    domain = _need(data, "domain", path)
    try:
        grid = Grid(_need(domain, "boxMin", path), _need(domain, "boxMax", path),
                    _need(data, "points", path))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return FieldConfig(spec, grid)


def load_spinor(path) -> AnalyticSpinor:
    data = _load(path)
    data = data.get("psi", data)
    re = [str(v) for v in _need(data, "re", path)]
    im = data.get("im")
    try:
        return AnalyticSpinor.parse(re, None if im is None else [str(v) for v in im])
    except ValueError as exc:
        if type(exc) is not ValueError:
            raise
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class GaugeFile:
    gauge: GaugeConfig
    convention: str
    method: str
    h: float


def load_gauge(path) -> GaugeFile:
    data = _load(path)
    B = [str(v) for v in data.get("B", ["0"] * 4)]
    if len(B) != 4:
        raise ConfigError(f"{path}: B needs 4 components")
    gauge = GaugeConfig(
        B=tuple(B),
        a=float(data.get("a", 1.0)),
        b=float(data.get("b", DEFAULT_B_COUPLING)),
        m=float(data.get("m", 0.0)),
        phi=str(data.get("phi", "0")),
    )
    return GaugeFile(gauge, str(data.get("convention", "gamma5")),
                     str(data.get("method", "symbolic")), float(data.get("h", 1e-3)))


def load_theta(path) -> str:
    return str(_need(_load(path), "theta", path))


@dataclass(frozen=True)
class PathFile:
    path: Path
    metric: str
    quadrature: int


def load_path(path) -> PathFile:
    data = _load(path)
    try:
        if "p" in data:
            p = Path.analytic([str(v) for v in data["p"]])
        elif "points" in data:
            p = Path.polyline(data["points"], data.get("s"))
        else:
            raise ConfigError(f"{path}: give either 'p' or 'points'")
    except ValueError as exc:
        if type(exc) is not ValueError:
            raise
        raise ConfigError(f"{path}: {exc}") from exc
    return PathFile(p, str(data.get("metric", "minkowski")), int(data.get("quadrature", 10_000)))
