"""JSON configuration loading with strict key validation.

Unknown keys are rejected at every level: a silently misspelled
tolerance name would invalidate an experiment.  Defaults are applied for
absent optional keys and the fully-defaulted document is echoed into the
run manifest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .experiments import ExperimentSpec, InitialData, Tolerances
from .grid import TorusGrid
from .initial_data import FAMILIES
from .integrate import SimParams

TAU = 6.283185307179586  # default box length 2*pi


class InvalidConfigError(ValueError):
    pass


EXPERIMENTS = ("simulate", "uniform_time", "zero_alpha", "bona_smith", "lemma_suite")

_TOP_KEYS = {"experiment", "grid", "params", "initial_data", "n_grid", "out_dir", "tolerances"}
_GRID_KEYS = {"d", "n", "length"}
_PARAM_KEYS = {"alpha", "alpha_grid", "s", "t_end", "cfl", "dt_max", "blowup_factor", "sample_every"}
_ID_KEYS = {"family", "k_max", "tail_exponent", "amplitude", "seed", "norm_hs"}
_TOL_KEYS = {
    "doubling_factor",
    "monotonicity_slack",
    "slope_band",
    "alpha_stability_factor",
    "resolution_factor",
    "splitting_factor",
}

_DEFAULT_ALPHA_GRIDS = {
    "uniform_time": (0.0, 0.05, 0.1, 0.25, 0.5, 1.0),
    "zero_alpha": (0.4, 0.2, 0.1, 0.05, 0.025, 0.0),
    "bona_smith": (0.5, 0.2, 0.1, 0.05, 0.025),
    "lemma_suite": (0.0, 1e-3, 1e-2, 1e-1, 1.0),
}

_ID_PARAM_FOR_FAMILY = {
    "bandlimited": "k_max",
    "algebraic-tail": "tail_exponent",
    "shear": "amplitude",
}


@dataclass
class LoadedConfig:
    experiment: str
    grid: TorusGrid
    params: SimParams
    alpha_grid: tuple
    initial_data: InitialData
    seed: int
    n_grid: tuple
    out_dir: str
    tolerances: Tolerances
    echo: dict

    def experiment_spec(self) -> ExperimentSpec:
        return ExperimentSpec(
            kind=self.experiment,
            grid=self.grid,
            params=self.params,
            alpha_grid=self.alpha_grid,
            initial_data=self.initial_data,
            seed=self.seed,
            n_grid=self.n_grid,
            tolerances=self.tolerances,
        )


def _reject_unknown(doc: dict, allowed: set, where: str):
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise InvalidConfigError(f"unknown {where} key(s): {', '.join(unknown)}")


def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise InvalidConfigError(f"missing required {where} key {key!r}")
    return doc[key]


def _as_number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InvalidConfigError(f"{where} must be a number, got {x!r}")
    return float(x)


def _as_int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise InvalidConfigError(f"{where} must be an integer, got {x!r}")
    return x


def load_config_file(path, *, seed_override=None, out_override=None) -> LoadedConfig:
    """Read and validate a JSON config file; I/O errors propagate as OSError."""
    text = Path(path).read_text()
    return load_config(text, seed_override=seed_override, out_override=out_override)


def load_config(source, *, seed_override=None, out_override=None) -> LoadedConfig:
    """Parse and validate a config document (JSON text or dict)."""
    if isinstance(source, dict):
        doc = source
    else:
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as err:
            raise InvalidConfigError(f"config is not valid JSON: {err}")
    if not isinstance(doc, dict):
        raise InvalidConfigError("config must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "top-level")

    experiment = str(_need(doc, "experiment", "top-level")).replace("-", "_")
    if experiment not in EXPERIMENTS:
        raise InvalidConfigError(
            f"unknown experiment {doc['experiment']!r}; choose from {EXPERIMENTS}"
        )

    grid_doc = dict(_need(doc, "grid", "top-level"))
    _reject_unknown(grid_doc, _GRID_KEYS, "grid")
    d = _as_int(_need(grid_doc, "d", "grid"), "grid.d")
    n = _as_int(_need(grid_doc, "n", "grid"), "grid.n")
    length = _as_number(grid_doc.get("length", TAU), "grid.length")
    try:
        grid = TorusGrid(d, n, length)
    except ValueError as err:
        raise InvalidConfigError(str(err))

    params_doc = dict(_need(doc, "params", "top-level"))
    _reject_unknown(params_doc, _PARAM_KEYS, "params")
    if "alpha" in params_doc and "alpha_grid" in params_doc:
        raise InvalidConfigError("give either params.alpha or params.alpha_grid, not both")
    if experiment == "simulate":
        if "alpha_grid" in params_doc:
            raise InvalidConfigError("simulate takes params.alpha, not alpha_grid")
        alpha = _as_number(_need(params_doc, "alpha", "params"), "params.alpha")
        alpha_grid = (alpha,)
    else:
        if "alpha" in params_doc:
            raise InvalidConfigError(f"{experiment} takes params.alpha_grid, not alpha")
        raw_grid = params_doc.get("alpha_grid", list(_DEFAULT_ALPHA_GRIDS[experiment]))
        if not isinstance(raw_grid, list) or not raw_grid:
            raise InvalidConfigError("params.alpha_grid must be a nonempty list")
        alpha_grid = tuple(_as_number(a, "params.alpha_grid entry") for a in raw_grid)
        alpha = alpha_grid[0]

    default_s = {1: 2.0, 2: 2.5}.get(d)
    if "s" not in params_doc and default_s is None:
        raise InvalidConfigError(f"params.s is required for d={d}")
    s = _as_number(params_doc.get("s", default_s), "params.s")
    t_end = _as_number(_need(params_doc, "t_end", "params"), "params.t_end")
    params = SimParams(
        alpha=alpha,
        s=s,
        t_end=t_end,
        cfl=_as_number(params_doc.get("cfl", 0.3), "params.cfl"),
        dt_max=_as_number(params_doc.get("dt_max", 1e-2), "params.dt_max"),
        blowup_factor=_as_number(params_doc.get("blowup_factor", 10.0), "params.blowup_factor"),
        sample_every=_as_int(params_doc.get("sample_every", 1), "params.sample_every"),
    )
    try:
        params.validate(d)
        for a in alpha_grid:
            params.replace(alpha=a).validate(d)
    except ValueError as err:
        raise InvalidConfigError(str(err))

    id_doc = dict(doc.get("initial_data", {}))
    _reject_unknown(id_doc, _ID_KEYS, "initial_data")
    family = str(id_doc.get("family", "bandlimited"))
    if family not in FAMILIES:
        raise InvalidConfigError(f"unknown initial_data.family {family!r}; choose from {FAMILIES}")
    shape_key = _ID_PARAM_FOR_FAMILY[family]
    for key in ("k_max", "tail_exponent", "amplitude"):
        if key in id_doc and key != shape_key:
            raise InvalidConfigError(f"initial_data.{key} does not apply to family {family!r}")
    seed = _as_int(id_doc.get("seed", 0), "initial_data.seed")
    if seed_override is not None:
        seed = int(seed_override)
    norm_hs = id_doc.get("norm_hs", 1.0)
    if norm_hs is not None:
        norm_hs = _as_number(norm_hs, "initial_data.norm_hs")
        if norm_hs < 0:
            raise InvalidConfigError("initial_data.norm_hs must be nonnegative")
    tail_default = s + 2.0 if family == "algebraic-tail" else None
    init = InitialData(
        family=family,
        k_max=_as_number(id_doc.get("k_max", 4.0), "initial_data.k_max"),
        tail_exponent=_as_number(id_doc["tail_exponent"], "initial_data.tail_exponent")
        if "tail_exponent" in id_doc
        else tail_default,
        amplitude=_as_number(id_doc.get("amplitude", 1.0), "initial_data.amplitude"),
        norm_hs=norm_hs,
    )

    n_grid_doc = doc.get("n_grid")
    if experiment == "bona_smith":
        if n_grid_doc is None:
            n_grid_doc = [2, 3, 4, 5]
        if not isinstance(n_grid_doc, list) or not n_grid_doc:
            raise InvalidConfigError("n_grid must be a nonempty list of cutoff indices")
        n_grid = tuple(_as_int(v, "n_grid entry") for v in n_grid_doc)
        if any(v < 0 for v in n_grid):
            raise InvalidConfigError("n_grid entries must be >= 0")
    else:
        if n_grid_doc is not None:
            raise InvalidConfigError("n_grid only applies to bona_smith experiments")
        n_grid = ()

    out_dir = str(doc.get("out_dir", "out"))
    if out_override is not None:
        out_dir = str(out_override)

    tol_doc = dict(doc.get("tolerances", {}))
    _reject_unknown(tol_doc, _TOL_KEYS, "tolerances")
    tol_kwargs = {}
    for key in _TOL_KEYS:
        if key not in tol_doc:
            continue
        if key == "slope_band":
            band = tol_doc[key]
            if not isinstance(band, list) or len(band) != 2:
                raise InvalidConfigError("tolerances.slope_band must be a [lo, hi] pair")
            tol_kwargs[key] = (float(band[0]), float(band[1]))
        else:
            tol_kwargs[key] = _as_number(tol_doc[key], f"tolerances.{key}")
    tolerances = Tolerances(**tol_kwargs)

    echo = {
        "experiment": experiment,
        "grid": {"d": d, "n": n, "length": length},
        "params": {
            ("alpha" if experiment == "simulate" else "alpha_grid"): (
                alpha if experiment == "simulate" else list(alpha_grid)
            ),
            "s": s,
            "t_end": t_end,
            "cfl": params.cfl,
            "dt_max": params.dt_max,
            "blowup_factor": params.blowup_factor,
            "sample_every": params.sample_every,
        },
        "initial_data": {
            "family": family,
            shape_key: getattr(init, shape_key)
            if shape_key != "tail_exponent"
            else init.tail_exponent,
            "seed": seed,
            "norm_hs": norm_hs,
        },
        "out_dir": out_dir,
        "tolerances": {
            "doubling_factor": tolerances.doubling_factor,
            "monotonicity_slack": tolerances.monotonicity_slack,
            "slope_band": list(tolerances.slope_band),
            "alpha_stability_factor": tolerances.alpha_stability_factor,
            "resolution_factor": tolerances.resolution_factor,
            "splitting_factor": tolerances.splitting_factor,
        },
    }
    if experiment == "bona_smith":
        echo["n_grid"] = list(n_grid)

    return LoadedConfig(
        experiment=experiment,
        grid=grid,
        params=params,
        alpha_grid=alpha_grid,
        initial_data=init,
        seed=seed,
        n_grid=n_grid,
        out_dir=out_dir,
        tolerances=tolerances,
        echo=echo,
    )
