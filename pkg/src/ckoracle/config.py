"""JSON config files with exact rationals written as "num/den" strings."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from .agents import StrategySpec
from .analysis import EconomicParams, to_fraction
from .core import ModelError
from .harness import ScenarioConfig, ScenarioError

PARAM_FIELDS = tuple(f.name for f in fields(EconomicParams))
SCENARIO_KEYS = ("mechanism", "labels", "truths", "genesis", "params", "strategies", "querier",
                 "queries", "seed", "priority")
NUMERIC_OPTIONS = ("bribe", "min_gain")


class ConfigError(ValueError):
    """Parse or validation failure anchored to a field and, when known, a line of the source."""

    def __init__(self, message: str, field: str = "", line: Optional[int] = None, path: str = ""):
        self.field = field
        self.line = line
        self.path = path
        where = path or "<config>"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {field + ': ' if field else ''}{message}")


def encode(value: Any) -> Any:
    """JSON-safe copy; whole rationals become ints, the rest "num/den" strings."""
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, Mapping):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    return value


def _locate(text: str, key: str) -> Optional[int]:
    m = re.search(r'"%s"\s*:' % re.escape(key.split(".")[-1]), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _rational(value, field: str) -> Fraction:
    try:
        return to_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"expected a rational number, got {value!r}", field) from exc


def params_from_dict(raw: Mapping[str, Any]) -> EconomicParams:
    if not isinstance(raw, Mapping):
        raise ConfigError("expected an object", "params")
    unknown = sorted(set(raw) - set(PARAM_FIELDS))
    if unknown:
        raise ConfigError(f"unknown parameter {unknown[0]!r}", f"params.{unknown[0]}")
    kw: Dict[str, Any] = {}
    for name, value in raw.items():
        if name in ("shares", "lie_benefits"):
            if not isinstance(value, list):
                raise ConfigError("expected a list", f"params.{name}")
            kw[name] = tuple(_rational(v, f"params.{name}") for v in value)
        else:
            kw[name] = _rational(value, f"params.{name}")
    try:
        return EconomicParams(**kw)
    except ValueError as exc:
        name = next((n for n in PARAM_FIELDS if str(exc).startswith(n + " ")), "")
        raise ConfigError(str(exc), f"params.{name}" if name else "params") from exc


def params_to_dict(params: EconomicParams) -> Dict[str, Any]:
    return {name: encode(getattr(params, name)) for name in PARAM_FIELDS}


def _options_from(raw: Mapping[str, Any], field: str) -> Dict[str, Any]:
    opts = dict(raw)
    for key in NUMERIC_OPTIONS:
        if key in opts:
            opts[key] = _rational(opts[key], f"{field}.{key}")
    if "imputation" in opts:
        opts["imputation"] = {m: _rational(v, f"{field}.imputation") for m, v in opts["imputation"].items()}
    if "members" in opts:
        opts["members"] = tuple(opts["members"])
    return opts


def scenario_from_dict(raw: Mapping[str, Any]) -> ScenarioConfig:
    if not isinstance(raw, Mapping):
        raise ConfigError("top level must be an object")
    unknown = sorted(set(raw) - set(SCENARIO_KEYS))
    if unknown:
        raise ConfigError("unknown field", unknown[0])
    for key in ("mechanism", "labels", "truths", "genesis", "strategies", "querier"):
        if key not in raw:
            raise ConfigError("missing required field", key)
    strategies = {}
    for agent, spec in raw["strategies"].items():
        field = f"strategies.{agent}"
        if isinstance(spec, str):
            spec = {"kind": spec}
        try:
            strategies[agent] = StrategySpec(spec["kind"], _options_from(spec.get("options", {}), field))
        except (KeyError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc), field) from exc
    genesis = {}
    for agent, count in raw["genesis"].items():
        if isinstance(count, bool) or not isinstance(count, int):
            raise ConfigError("token counts must be integers", f"genesis.{agent}")
        genesis[agent] = count
    try:
        return ScenarioConfig(
            mechanism=raw["mechanism"],
            labels=tuple(raw["labels"]),
            truths=tuple(raw["truths"]),
            genesis=genesis,
            params=params_from_dict(raw.get("params", {})),
            strategies=strategies,
            querier=raw["querier"],
            queries=int(raw.get("queries", 1)),
            seed=int(raw.get("seed", 0)),
            priority=tuple(raw.get("priority", ())),
        )
    except ScenarioError as exc:
        raise ConfigError(str(exc).split(": ", 1)[-1], exc.field) from exc
    except ModelError as exc:
        raise ConfigError(str(exc), "labels") from exc


def scenario_to_dict(cfg: ScenarioConfig) -> Dict[str, Any]:
    return {
        "mechanism": cfg.mechanism,
        "labels": list(cfg.labels),
        "truths": list(cfg.truths),
        "genesis": dict(cfg.genesis),
        "params": params_to_dict(cfg.params),
        "strategies": {a: {"kind": s.kind, "options": encode(dict(s.options))} for a, s in cfg.strategies.items()},
        "querier": cfg.querier,
        "queries": cfg.queries,
        "seed": cfg.seed,
        "priority": list(cfg.priority),
    }


def _load_json(path) -> Tuple[Any, str]:
    path = str(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read file ({exc.strerror})", path=path) from exc
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{exc.msg} (column {exc.colno})", line=exc.lineno, path=path) from exc


def _anchor(exc: ConfigError, text: str, path: str) -> ConfigError:
    line = _locate(text, exc.field) if exc.field else None
    msg = str(exc).split(": ", 2 if exc.field else 1)[-1]
    return ConfigError(msg, exc.field, line, path)


def load_scenario(path) -> ScenarioConfig:
    raw, text = _load_json(path)
    try:
        return scenario_from_dict(raw)
    except ConfigError as exc:
        raise _anchor(exc, text, str(path)) from exc


@dataclass(frozen=True)
class AnalysisConfig:
    params: EconomicParams
    k_max: int = 10
    n_holders: int = 1
    m_max: int = 10


def load_params(path) -> AnalysisConfig:
    """A params file is either the bare parameter object or ``{"params": ..., "coalition": ...}``."""
    raw, text = _load_json(path)
    try:
        if not isinstance(raw, Mapping):
            raise ConfigError("top level must be an object")
        if "params" in raw and isinstance(raw["params"], Mapping):
            params = params_from_dict(raw["params"])
            extra = raw.get("coalition", {})
            m_max = raw.get("m_max", 10)
        else:
            params = params_from_dict(raw)
            extra, m_max = {}, 10
        k_max, n_holders = extra.get("k_max", 10), extra.get("n_holders", 1)
        for name, v, lo in (("coalition.k_max", k_max, 1), ("coalition.n_holders", n_holders, 1),
                            ("m_max", m_max, 2)):
            if isinstance(v, bool) or not isinstance(v, int) or v < lo:
                raise ConfigError(f"must be an integer >= {lo}", name)
        return AnalysisConfig(params, k_max, n_holders, m_max)
    except ConfigError as exc:
        raise _anchor(exc, text, str(path)) from exc


def dump_scenario(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(cfg), indent=2) + "\n")
