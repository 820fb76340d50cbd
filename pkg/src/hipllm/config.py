"""Strict JSON configuration schema for the command-line front end.

Configs are the experiment record: unknown keys are rejected everywhere so
a typo can never silently fall back to a default, and the schema carries an
explicit version field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .model import (
    DomainSpec,
    GridSpec,
    HyperBox,
    McSpec,
    ReliabilityQuery,
    SubdomainData,
    SystemSpec,
    default_box,
    validate,
)

__all__ = ["ConfigError", "RunConfig", "parse_config", "parse_config_dict"]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed or invalid configuration file."""


@dataclass
class RunConfig:
    system: SystemSpec
    grid: GridSpec
    mc: McSpec
    query: ReliabilityQuery
    emit_csv: bool = True
    emit_json: bool = True
    emit_svg: bool = False
    raw: Dict[str, Any] = field(default_factory=dict)


def _require_keys(obj: dict, path: str, required: set, optional: set) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(obj) - required - optional
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{path}: missing required keys {sorted(missing)}")


def _interval(obj, path: str) -> Tuple[float, float]:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(v, (int, float)) for v in obj)
    ):
        raise ConfigError(f"{path}: expected [min, max]")
    return (float(obj[0]), float(obj[1]))


def _parse_box(obj, path: str) -> HyperBox:
    if obj is None:
        return default_box()
    _require_keys(obj, path, {"a", "b", "c", "d"}, set())
    return HyperBox(
        a_range=_interval(obj["a"], f"{path}.a"),
        b_range=_interval(obj["b"], f"{path}.b"),
        c_range=_interval(obj["c"], f"{path}.c"),
        d_range=_interval(obj["d"], f"{path}.d"),
    )


def _parse_subdomain(obj, path: str) -> SubdomainData:
    _require_keys(obj, path, {"correct", "total"}, {"label"})
    return SubdomainData(
        correct=int(obj["correct"]),
        total=int(obj["total"]),
        label=str(obj.get("label", "")),
    )


def _parse_domain(obj, path: str) -> DomainSpec:
    _require_keys(obj, path, {"subdomains", "omega"}, {"label", "box"})
    subs = obj["subdomains"]
    if not isinstance(subs, list) or not subs:
        raise ConfigError(f"{path}.subdomains: expected a nonempty list")
    return DomainSpec(
        subdomains=tuple(
            _parse_subdomain(s, f"{path}.subdomains[{j}]") for j, s in enumerate(subs)
        ),
        op_weights=tuple(float(w) for w in obj["omega"]),
        box=_parse_box(obj.get("box"), f"{path}.box"),
        label=str(obj.get("label", "")),
    )


def _parse_hierarchy(obj, path: str) -> SystemSpec:
    _require_keys(obj, path, {"domains", "weights"}, set())
    doms = obj["domains"]
    if not isinstance(doms, list) or not doms:
        raise ConfigError(f"{path}.domains: expected a nonempty list")
    return SystemSpec(
        domains=tuple(
            _parse_domain(d, f"{path}.domains[{i}]") for i, d in enumerate(doms)
        ),
        domain_weights=tuple(float(w) for w in obj["weights"]),
    )


def _parse_grid(obj, path: str) -> GridSpec:
    if obj is None:
        return GridSpec()
    _require_keys(obj, path, set(), {"n_mu", "n_nu", "nu_min", "nu_max"})
    base = GridSpec()
    return GridSpec(
        n_mu=int(obj.get("n_mu", base.n_mu)),
        n_nu=int(obj.get("n_nu", base.n_nu)),
        nu_min=float(obj.get("nu_min", base.nu_min)),
        nu_max=float(obj.get("nu_max", base.nu_max)),
    )


def _parse_mc(obj, path: str) -> McSpec:
    if obj is None:
        return McSpec()
    _require_keys(
        obj,
        path,
        set(),
        {"samples_per_config", "configs_per_domain", "pairing_cap", "master_seed", "t_grid_size"},
    )
    base = McSpec()
    return McSpec(
        samples_per_config=int(obj.get("samples_per_config", base.samples_per_config)),
        configs_per_domain=int(obj.get("configs_per_domain", base.configs_per_domain)),
        pairing_cap=int(obj.get("pairing_cap", base.pairing_cap)),
        master_seed=int(obj.get("master_seed", base.master_seed)),
        t_grid_size=int(obj.get("t_grid_size", base.t_grid_size)),
    )


def _parse_query(obj, path: str) -> ReliabilityQuery:
    if obj is None:
        return ReliabilityQuery()
    _require_keys(obj, path, set(), {"horizons"})
    if "horizons" not in obj:
        return ReliabilityQuery()
    return ReliabilityQuery(horizons=tuple(int(h) for h in obj["horizons"]))


def parse_config_dict(doc: Dict[str, Any]) -> RunConfig:
    """Validate a loaded config document and fill defaults."""
    _require_keys(
        doc,
        "config",
        {"schema_version", "hierarchy"},
        {"grid", "mc", "query", "output"},
    )
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"config.schema_version: expected {SCHEMA_VERSION}, got {doc['schema_version']!r}"
        )
    system = _parse_hierarchy(doc["hierarchy"], "config.hierarchy")
    grid = _parse_grid(doc.get("grid"), "config.grid")
    mc = _parse_mc(doc.get("mc"), "config.mc")
    query = _parse_query(doc.get("query"), "config.query")

    out = doc.get("output")
    emit = {"csv": True, "json": True, "svg": False}
    if out is not None:
        _require_keys(out, "config.output", set(), {"csv", "json", "svg"})
        for key in emit:
            if key in out:
                emit[key] = bool(out[key])

    system, grid, mc, query = validate(system, grid, mc, query)
    return RunConfig(
        system=system,
        grid=grid,
        mc=mc,
        query=query,
        emit_csv=emit["csv"],
        emit_json=emit["json"],
        emit_svg=emit["svg"],
        raw=doc,
    )


def parse_config(path: str | Path) -> RunConfig:
    """Load, parse, and validate a JSON config file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_config_dict(doc)
