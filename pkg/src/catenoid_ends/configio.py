"""JSON configuration files.

Layout::

    {"label": "...", "alphas": [a1, ...], "points": [[re1, im1], ...]}

Floats are written with Python's shortest round-trip repr, so a write
followed by a read reproduces every double exactly.
"""
from __future__ import annotations

import json
import math

from .balance import Configuration
from .exceptions import CatenoidEndsError, ConfigurationError


class ConfigFileError(CatenoidEndsError, ValueError):
    """A configuration file could not be parsed into a Configuration."""


def config_to_dict(c: Configuration) -> dict:
    d = {}
    if c.label:
        d["label"] = c.label
    d["alphas"] = [float(a) for a in c.alphas]
    d["points"] = [[float(p.real), float(p.imag)] for p in c.points]
    return d


def dumps_config(c: Configuration) -> str:
    return json.dumps(config_to_dict(c), indent=2) + "\n"


def write_config(c: Configuration, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_config(c))


def _real(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigFileError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def loads_config(text: str, source="<string>") -> Configuration:
    """Parse JSON text; errors name the line (syntax) or the field (content)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigFileError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigFileError(f"{source}: top level must be a JSON object")
    for key in ("alphas", "points"):
        if key not in data:
            raise ConfigFileError(f"{source}: missing field '{key}'")
        if not isinstance(data[key], list):
            raise ConfigFileError(f"{source}: field '{key}' must be an array")
    alphas = [_real(a, f"{source}: alphas[{i}]") for i, a in enumerate(data["alphas"])]
    points = []
    for i, p in enumerate(data["points"]):
        if not isinstance(p, list) or len(p) != 2:
            raise ConfigFileError(f"{source}: points[{i}] must be a [re, im] pair")
        points.append(complex(_real(p[0], f"{source}: points[{i}][0]"), _real(p[1], f"{source}: points[{i}][1]")))
    if len(alphas) != len(points):
        raise ConfigFileError(
            f"{source}: 'alphas' has {len(alphas)} entries but 'points' has {len(points)}"
        )
    label = data.get("label", "")
    if not isinstance(label, str):
        raise ConfigFileError(f"{source}: field 'label' must be a string")
    try:
        return Configuration(points, alphas, label)
    except ConfigurationError as exc:
        raise ConfigFileError(f"{source}: {exc}") from exc


def read_config(path) -> Configuration:
    with open(path, encoding="utf-8") as fh:
        return loads_config(fh.read(), source=str(path))
