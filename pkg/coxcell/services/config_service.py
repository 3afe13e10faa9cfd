"""
Run configuration: config files, presets, CLI overrides and figure presets
"""

from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import yaml
from pydantic import ValidationError

from coxcell.core.config import settings
from coxcell.core.exceptions import ConfigurationException, ValidationException
from coxcell.core.logging import LoggerMixin
from coxcell.core.model import LinkType, NetworkConfig, threshold_from_db, validate_config
from coxcell.services.experiment_service import Engine, ExperimentSpec, Quantity
from coxcell.utils.validation import linear_grid, log_grid, parse_grid

PARAMETER_KEYS = ("lambda_b", "lambda_u", "lambda_l", "mu_b", "mu_u", "alpha", "tx_power", "threshold_db")
RUN_KEYS = ("name", "engine", "scenario", "event", "link", "sweep", "grid", "trials", "seed", "angular", "out")

PRESETS: Dict[str, Dict[str, float]] = {
    # urban macro deployment: ~187 m between roads, one BS per 200 m of road
    "3gpp": {"lambda_l": 5.34, "lambda_b": 6.15, "mu_b": 5.0},
    # planar and vehicular BSs at the same spatial intensity
    "equal": {"lambda_l": 5.0, "lambda_b": 25.0, "mu_b": 5.0},
}

DEFAULT_PARAMETERS: Dict[str, float] = {
    **PRESETS["3gpp"],
    "lambda_u": settings.DEFAULT_LAMBDA_U,
    "mu_u": settings.DEFAULT_MU_U,
    "alpha": 4.0,
    "tx_power": 1.0,
    "threshold_db": 0.0,
}

THRESHOLD_GRID_DB = linear_grid(-10.0, 20.0, 13)
RADIUS_GRID_KM = linear_grid(0.02, 0.4, 20)

FIGURE_ALIASES = {
    "assoc-planar": "fig3",
    "coverage-planar": "fig5",
    "coverage-vehicular": "fig6",
}
FIGURES = ("fig3", "fig5", "fig6", "fig7-v2v", "fig7-i2v", "fig7-v2i", "fig7-i2i")
FIGURE_PRESETS = {
    "fig5": "3gpp",
    "fig6": "equal",
    "fig7-v2v": "3gpp",
    "fig7-i2v": "3gpp",
    "fig7-v2i": "3gpp",
    "fig7-i2i": "3gpp",
}

# road and planar densities halved / as deployed / doubled
DENSITY_LEVELS = (("sparse", 0.5), ("normal", 1.0), ("dense", 2.0))


def parse_config_file(path: str) -> Dict[str, Any]:
    """Read ``key=value`` lines (``#`` comments) or a flat YAML mapping.

    Values are typed the way YAML types scalars, so ``seed=7`` is an int and
    ``engine=both`` a string.
    """
    file_path = Path(path)
    try:
        text = file_path.read_text()
    except OSError as e:
        raise ConfigurationException(f"cannot read config file {path}: {e}", config_field="config")

    if file_path.suffix in (".yml", ".yaml"):
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigurationException(f"malformed YAML in {path}: {e}", config_field="config")
        if not isinstance(data, dict) or any(isinstance(v, dict) for v in data.values()):
            raise ConfigurationException(f"{path} must hold a flat mapping", config_field="config")
        values = {str(k): v for k, v in data.items()}
    else:
        values = {}
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationException(f"{path}:{number}: expected key=value", config_field="config")
            key, raw = (part.strip() for part in line.split("=", 1))
            values[key] = _scalar(raw, f"{path}:{number}")

    unknown = sorted(set(values) - set(PARAMETER_KEYS) - set(RUN_KEYS))
    if unknown:
        raise ConfigurationException(f"unknown keys in {path}: {', '.join(unknown)}", config_field=unknown[0])
    return values


def _scalar(raw: str, where: str) -> Any:
    if "," in raw and not raw.startswith("["):
        return raw
    try:
        return yaml.safe_load(raw)
    except yaml.YAMLError as e:
        raise ConfigurationException(f"{where}: malformed value {raw!r}: {e}", config_field="config")


def network_config(values: Mapping[str, Any]) -> NetworkConfig:
    """NetworkConfig from merged values; the threshold arrives in dB"""
    params = {k: values[k] for k in PARAMETER_KEYS if k in values}
    threshold_db = params.pop("threshold_db", 0.0)
    try:
        params["threshold"] = threshold_from_db(float(threshold_db))
    except (TypeError, ValueError):
        raise ConfigurationException(
            f"threshold_db must be a number, got {threshold_db!r}", config_field="threshold_db"
        )
    return validate_config(params)


def default_sweep(quantity: Quantity, values: Mapping[str, Any]) -> Tuple[str, List[float]]:
    if quantity is Quantity.DISTANCE:
        return "radius", list(RADIUS_GRID_KM)
    if quantity is Quantity.ASSOCIATION:
        lambda_l = values.get("lambda_l")
        # no roads: any decade of mu_b gives the same answer
        scale = float(lambda_l) if lambda_l is not None and float(lambda_l) > 0.0 else 1.0
        return "mu_b", log_grid(1.0 / scale, 100.0 / scale, 13)
    return "threshold_db", list(THRESHOLD_GRID_DB)


def _link(raw: Any) -> Optional[LinkType]:
    if raw is None:
        return None
    try:
        return LinkType(str(raw).upper())
    except ValueError:
        raise ValidationException(
            f"link must be one of {', '.join(l.value for l in LinkType)}, got {raw!r}", field="link"
        )


class ConfigService(LoggerMixin):
    """Merges defaults, presets, config files and CLI flags into experiment specs.

    Precedence, lowest first: built-in defaults, preset, config file, flags.
    """

    def merge(
        self,
        preset: Optional[str] = None,
        config_path: Optional[str] = None,
        overrides: Optional[Mapping[str, Any]] = None,
    ) -> Dict[str, Any]:
        values: Dict[str, Any] = dict(DEFAULT_PARAMETERS)
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigurationException(
                    f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}", config_field="preset"
                )
            values.update(PRESETS[preset])
        if config_path is not None:
            values.update(parse_config_file(config_path))
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        self.log_debug("Configuration merged", preset=preset, config=config_path, keys=len(values))
        return values

    def build_spec(self, quantity: Quantity, values: Mapping[str, Any], **fixed: Any) -> ExperimentSpec:
        """ExperimentSpec from merged values; ``fixed`` entries win over ``values``"""
        merged = {**values, **fixed}
        config = network_config(merged)

        sweep = merged.get("sweep")
        grid = merged.get("grid")
        if sweep is None:
            sweep, default_grid = default_sweep(quantity, merged)
            grid = default_grid if grid is None else grid
        elif grid is None:
            raise ValidationException(f"--sweep {sweep} needs a --grid", field="grid")
        if isinstance(grid, (int, float)):
            grid = [grid]
        grid = parse_grid(grid)

        event = merged.get("event")
        if event is None:
            event = {Quantity.ASSOCIATION: "planar", Quantity.DISTANCE: "cdf", Quantity.LINKS: "link"}.get(
                quantity, "total"
            )

        data = {
            "name": merged.get("name") or quantity.value,
            "quantity": quantity,
            "engine": merged.get("engine") or Engine.ANALYTIC,
            "scenario": merged.get("scenario") or "planar",
            "event": event,
            "link": _link(merged.get("link")),
            "sweep": sweep,
            "grid": grid,
            "config": config,
            "n_trials": settings.DEFAULT_TRIALS if merged.get("trials") is None else merged["trials"],
            "seed": settings.DEFAULT_SEED if merged.get("seed") is None else merged["seed"],
            "angular": merged.get("angular") or "isotropic",
            "output": merged.get("out"),
        }
        try:
            spec = ExperimentSpec(**data)
        except ValidationError as e:
            first = e.errors()[0]
            field = str(first["loc"][0]) if first.get("loc") else None
            raise ValidationException(str(first.get("msg", e)).removeprefix("Value error, "), field=field)
        self.log_debug("Spec built", experiment=spec.name, sweep=spec.sweep, points=len(spec.grid))
        return spec

    # -- figures ------------------------------------------------------------

    def figure_specs(
        self,
        figure: str,
        values: Mapping[str, Any],
        explicit: Optional[Mapping[str, Any]] = None,
    ) -> List[ExperimentSpec]:
        """One spec per curve of a named figure.

        ``values`` are the merged settings with the figure's preset applied;
        ``explicit`` holds only what the user set, which fig3 needs to know.
        """
        name = FIGURE_ALIASES.get(figure, figure)
        if name not in FIGURES:
            choices = ", ".join(FIGURES + tuple(FIGURE_ALIASES))
            raise ValidationException(f"unknown figure {figure!r}; choose from {choices}", field="figure")
        explicit = explicit or {}
        base = {k: v for k, v in values.items() if k not in ("sweep", "grid", "event", "link", "name", "scenario")}

        if name == "fig3":
            if explicit.get("lambda_l") is None:
                raise ConfigurationException("figure fig3 needs --lambda-l", config_field="lambda_l")
            lambda_l = float(explicit["lambda_l"])
            grid = log_grid(1.0 / lambda_l, 100.0 / lambda_l, 13)
            return [
                self.build_spec(
                    Quantity.ASSOCIATION,
                    {**base, "lambda_l": lambda_l, "lambda_b": lambda_b},
                    name=f"fig3-lambda_b-{lambda_b:g}",
                    scenario="planar",
                    event="vehicular",
                    sweep="mu_b",
                    grid=grid,
                )
                for lambda_b in (1.0, 10.0, 100.0)
            ]

        thresholds = {"sweep": "threshold_db", "grid": list(THRESHOLD_GRID_DB)}
        if name == "fig5":
            return [
                self.build_spec(
                    Quantity.COVERAGE, base, name=f"fig5-{event}", scenario="planar", event=event, **thresholds
                )
                for event in ("planar", "vehicular", "total")
            ]
        if name == "fig6":
            return [
                self.build_spec(
                    Quantity.COVERAGE, base, name=f"fig6-{event}", scenario="vehicular", event=event, **thresholds
                )
                for event in ("planar", "vehicular", "same_line", "other_line", "total")
            ]

        link = LinkType(name.split("-")[1].upper())
        curves: List[Tuple[str, Dict[str, Any]]] = []
        if link is LinkType.I2V:
            for level, factor in DENSITY_LEVELS:
                curves.append(
                    (level, {"lambda_l": factor * base["lambda_l"], "lambda_b": factor * base["lambda_b"]})
                )
        else:
            curves.extend((f"mu_b-{mu:g}", {"mu_b": mu}) for mu in (5.0, 10.0, 15.0))
            if link is LinkType.V2V:
                curves.extend(
                    (f"lambda_l-{lam:g}", {"lambda_l": lam, "mu_b": 5.0}) for lam in (5.34, 7.55, 10.88)
                )
        return [
            self.build_spec(Quantity.LINKS, {**base, **changes}, name=f"{name}-{label}", link=link, **thresholds)
            for label, changes in curves
        ]
