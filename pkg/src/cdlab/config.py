"""Experiment configuration: plain JSON in, validated dataclass out.

Validation errors carry the offending field path so the CLI can name it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

EXPERIMENTS = (
    "bulk",
    "hard_edge",
    "fisher_hartwig",
    "jump",
    "opuc_bulk",
    "sparse",
    "canonical_identities",
    "schrodinger",
    "identities",
)

_DEFAULT_N = {
    "bulk": [50, 100, 200],
    "hard_edge": [100, 200, 300],
    "fisher_hartwig": [50, 100, 200],
    "jump": [100, 200, 400],
    "opuc_bulk": [1000, 10000],
    "sparse": [1000, 10000],
    "schrodinger": [50, 100, 200],
}

_DEFAULT_TOL = {
    "bulk": 0.05,
    "hard_edge": 0.02,
    "fisher_hartwig": 0.02,
    "jump": 0.1,
    "opuc_bulk": 0.01,
    "sparse": 0.15,
    "schrodinger": 0.05,
    "canonical_identities": 0.0,
    "identities": 0.0,
}

_DEFAULT_MEASURE = {
    "bulk": {"name": "legendre", "params": {}},
    "hard_edge": {"name": "power_hard_edge", "params": {"beta": 1.5}},
    "fisher_hartwig": {"name": "even_fh", "params": {"beta": 1.5}},
    "jump": {"name": "jump", "params": {"sigma_minus": 0.5, "sigma_plus": 1.0}},
    "opuc_bulk": {"name": "circle_lebesgue", "params": {}},
}


class ConfigError(ValueError):
    def __init__(self, field_path, message):
        self.field = field_path
        super().__init__(f"config field '{field_path}': {message}")


@dataclass
class GridConfig:
    half_width: float = 2.0
    points_per_axis: int = 5


@dataclass
class ExperimentConfig:
    experiment: str
    measure: dict = field(default_factory=dict)
    xi: float = 0.0
    n_values: list = field(default_factory=list)
    grid: GridConfig = field(default_factory=GridConfig)
    tolerance: float = 0.05
    seed: int = 20240811
    output_dir: str = ""
    scaling: dict = field(default_factory=dict)  # optional pins: eta / beta / scale
    k_max: int = 3
    module_filter: str | None = None  # identities experiments only
    params: dict = field(default_factory=dict)  # experiment-specific extras


def _expect(cond, field_path, message):
    if not cond:
        raise ConfigError(field_path, message)


def parse_config(raw):
    """Validate a raw dict (already JSON-decoded) into an ExperimentConfig."""
    _expect(isinstance(raw, dict), "", "top level must be an object")
    known = {
        "experiment", "measure", "xi", "n_values", "grid", "tolerance",
        "seed", "output_dir", "scaling", "k_max", "module_filter", "params",
    }
    for key in raw:
        _expect(key in known, key, "unknown field")
    exp = raw.get("experiment")
    _expect(isinstance(exp, str) and exp in EXPERIMENTS, "experiment",
            f"must be one of {list(EXPERIMENTS)}")

    measure = raw.get("measure", _DEFAULT_MEASURE.get(exp, {}))
    if measure:
        _expect(isinstance(measure, dict), "measure", "must be an object")
        _expect(isinstance(measure.get("name", ""), str), "measure.name", "must be a string")
        _expect(isinstance(measure.get("params", {}), dict), "measure.params",
                "must be an object")

    xi = raw.get("xi", 0.0)
    _expect(isinstance(xi, (int, float)), "xi", "must be a number")

    n_values = raw.get("n_values", _DEFAULT_N.get(exp, []))
    _expect(isinstance(n_values, list) and
            all(isinstance(v, (int, float)) and v > 0 for v in n_values),
            "n_values", "must be a list of positive numbers")

    grid_raw = raw.get("grid", {})
    _expect(isinstance(grid_raw, dict), "grid", "must be an object")
    hw = grid_raw.get("half_width", 2.0)
    ppa = grid_raw.get("points_per_axis", 5)
    _expect(isinstance(hw, (int, float)) and hw > 0, "grid.half_width", "must be > 0")
    _expect(isinstance(ppa, int) and ppa >= 3, "grid.points_per_axis", "must be an integer >= 3")

    tol = raw.get("tolerance", _DEFAULT_TOL.get(exp, 0.05))
    if exp not in ("identities", "canonical_identities"):
        _expect(isinstance(tol, (int, float)) and tol > 0, "tolerance", "must be > 0")

    seed = raw.get("seed", 20240811)
    _expect(isinstance(seed, int), "seed", "must be an integer")

    out_dir = raw.get("output_dir", f"out/{exp}")
    _expect(isinstance(out_dir, str), "output_dir", "must be a string")

    scaling = raw.get("scaling", {})
    _expect(isinstance(scaling, dict), "scaling", "must be an object")
    for key, val in scaling.items():
        _expect(key in ("eta", "beta", "scale"), f"scaling.{key}", "unknown pin")
        _expect(isinstance(val, (int, float)) and val > 0, f"scaling.{key}", "must be > 0")

    k_max = raw.get("k_max", 3)
    _expect(isinstance(k_max, int) and k_max >= 1, "k_max", "must be an integer >= 1")

    module_filter = raw.get("module_filter")
    _expect(module_filter is None or isinstance(module_filter, str),
            "module_filter", "must be a string")

    params = raw.get("params", {})
    _expect(isinstance(params, dict), "params", "must be an object")

    return ExperimentConfig(
        experiment=exp,
        measure=measure,
        xi=float(xi),
        n_values=list(n_values),
        grid=GridConfig(half_width=float(hw), points_per_axis=int(ppa)),
        tolerance=float(tol),
        seed=seed,
        output_dir=out_dir,
        scaling=scaling,
        k_max=k_max,
        module_filter=module_filter,
        params=params,
    )


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"invalid JSON: {exc}") from exc
    return parse_config(raw)
