"""JSON economy configurations and solution reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .economy import Economy, EconomyError
from .equilibrium import EquilibriumCertificate, SolverOptions
from .measure import AlignmentError, StateSpace
from .utility import field_from_dict

SCHEMA_VERSION = "1"

_number = {"type": "number"}
_utility = {
    "type": "object",
    "required": ["family"],
    "properties": {
        "family": {"enum": ["crra", "log"]},
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "scale": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "states", "agents"],
    "properties": {
        "schema_version": {"type": "string"},
        "states": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "weight"],
                "properties": {
                    "id": {"type": "string"},
                    "weight": {"type": "number", "exclusiveMinimum": 0},
                },
                "additionalProperties": False,
            },
        },
        "agents": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "utility", "endowment"],
                "properties": {
                    "id": {"type": "string"},
                    "utility": _utility,
                    "endowment": {"type": "array", "items": {"type": "number", "minimum": 0}},
                },
                "additionalProperties": False,
            },
        },
        "solver": {
            "type": "object",
            "properties": {
                "tol_budget": {"type": "number", "exclusiveMinimum": 0},
                "max_iters": {"type": "integer", "minimum": 1},
                "warmup_iters": {"type": "integer", "minimum": 0},
                "w_floor": {"type": "number", "exclusiveMinimum": 0},
                "start": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


class ConfigError(ValueError):
    """Invalid configuration or report file; the message names the location."""


@dataclass
class EconomyConfig:
    economy: Economy
    solver: SolverOptions
    raw: dict


def _json_path(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _read_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"{path}: cannot read: {err.strerror}") from err
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from err


def parse_config(data: dict, source: str = "<config>") -> EconomyConfig:
    """Validate a config mapping and build the economy and solver options."""
    err = jsonschema.exceptions.best_match(
        jsonschema.Draft7Validator(CONFIG_SCHEMA).iter_errors(data)
    )
    if err is not None:
        raise ConfigError(f"{source}: at {_json_path(err.absolute_path)}: {err.message}")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"{source}: at schema_version: unsupported version {data['schema_version']!r}"
        )
    states = data["states"]
    n_states = len(states)
    try:
        space = StateSpace([s["id"] for s in states], [s["weight"] for s in states])
    except ValueError as e:
        raise ConfigError(f"{source}: at states: {e}") from e

    fields, rows, names = [], [], []
    for i, agent in enumerate(data["agents"]):
        where = f"agents[{i}]"
        if len(agent["endowment"]) != n_states:
            raise ConfigError(
                f"{source}: at {where}.endowment: {len(agent['endowment'])} entries "
                f"for {n_states} states"
            )
        if not any(x > 0 for x in agent["endowment"]):
            raise ConfigError(
                f"{source}: at {where}.endowment: agent {agent['id']!r} has a zero "
                "initial endowment; every agent needs alpha_0 != 0"
            )
        try:
            fields.append(field_from_dict(agent["utility"], n_states))
        except ValueError as e:
            raise ConfigError(f"{source}: at {where}.utility: {e}") from e
        rows.append(agent["endowment"])
        names.append(agent["id"])
    try:
        economy = Economy(space, fields, rows, agents=names)
    except (EconomyError, AlignmentError) as e:
        raise ConfigError(f"{source}: {e}") from e

    solver = SolverOptions(**data.get("solver", {}))
    if solver.start is not None and len(solver.start) != economy.n_agents:
        raise ConfigError(f"{source}: at solver.start: needs one weight per agent")
    return EconomyConfig(economy, solver, data)


def load_config(path: str | Path) -> EconomyConfig:
    return parse_config(_read_json(path), str(path))


def _finite(x):
    """JSON-safe float: non-finite values become strings."""
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _stage_summary(trace):
    stages = []
    for name, res in trace:
        name = name.replace("_reject", "")
        if stages and stages[-1]["method"] == name:
            stages[-1]["iterations"] += 1
            stages[-1]["residual"] = _finite(res)
        else:
            stages.append({"method": name, "iterations": 0 if name == "start" else 1,
                           "residual": _finite(res)})
    return stages


def certificate_to_json(
    cert: EquilibriumCertificate, economy: Economy, diagnostic: str | None = None
) -> dict:
    states, agents = economy.space.states, economy.agents
    integ = cert.integrability.as_dict() if cert.integrability is not None else None
    if integ is not None:
        integ = {k: ([_finite(x) for x in v] if isinstance(v, list) and k != "notes"
                     else (_finite(v) if isinstance(v, float) else v))
                 for k, v in integ.items()}
    return {
        "schema_version": SCHEMA_VERSION,
        "converged": bool(cert.converged),
        "diagnostic": diagnostic,
        "states": list(states),
        "agents": list(agents),
        "weights": [_finite(x) for x in cert.w],
        "z": _finite(cert.z),
        "zeta": {s: _finite(v) for s, v in zip(states, cert.zeta)},
        "allocation": {a: [_finite(x) for x in row] for a, row in zip(agents, cert.allocation)},
        "residuals": {
            "budget": {a: _finite(v) for a, v in zip(agents, cert.budget_residuals)},
            "max_budget": _finite(np.max(np.abs(cert.budget_residuals))),
            "first_order": {s: _finite(v) for s, v in zip(states, cert.foc_residuals)},
            "integrability": integ,
        },
        "iterations": int(cert.iterations),
        "method_trace": _stage_summary(cert.trace),
        "residual_trace": [_finite(r) for _, r in cert.trace],
    }


def certificate_from_json(data: dict, economy: Economy, source: str = "<certificate>"):
    """Rebuild a certificate from a solve report, aligned with ``economy``."""
    try:
        zeta = data["zeta"]
        alloc = data["allocation"]
        w = [float(x) for x in data["weights"]]
        z = float(data["z"])
        zeta_v = [float(zeta[s]) for s in economy.space.states]
        alloc_v = [[float(x) for x in alloc[a]] for a in economy.agents]
    except KeyError as e:
        raise ConfigError(f"{source}: missing entry {e} for this economy") from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{source}: malformed certificate: {e}") from e
    if len(w) != economy.n_agents or any(len(r) != economy.n_states for r in alloc_v):
        raise ConfigError(f"{source}: certificate does not match the economy's dimensions")
    if set(zeta) != set(economy.space.states) or set(alloc) != set(economy.agents):
        raise ConfigError(f"{source}: certificate names other states or agents than the economy")
    return EquilibriumCertificate(
        w=np.array(w), z=z, zeta=np.array(zeta_v), allocation=np.array(alloc_v)
    )


def load_certificate(path: str | Path, economy: Economy) -> EquilibriumCertificate:
    return certificate_from_json(_read_json(path), economy, str(path))


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"
