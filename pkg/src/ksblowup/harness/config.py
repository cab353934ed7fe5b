"""Flat ``section.key = value`` experiment configuration.

One file describes one experiment.  Lines are ``key = value``; ``#`` starts a
comment; blank lines are ignored.  Every key must appear in :data:`SCHEMA`,
which also supplies defaults.  Parsing never touches the numerics: the result
is a fully materialised :class:`ExperimentConfig` whose :meth:`canonical`
rendering is stable and therefore hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from ..constants import GnConstants
from ..errors import ConfigError, KSError
from ..exponents import DomainSpec, ModelParams
from ..solver import SolverConfig

REQUIRED = object()


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(x) for x in text.split(","))


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        value = text.strip()
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {value!r}")
        return value
    return parse


def _optional_float(text: str) -> float | None:
    return None if text.strip().lower() in ("", "none", "auto") else float(text)


_INITIAL = {
    "kind": (_choice("constant", "gaussian", "from-file"), "constant"),
    "value": (float, 0.0),
    "amplitude": (float, 1.0),
    "width": (float, 0.1),
    "center": (float, 0.0),
    "background": (float, 0.0),
    "path": (str, ""),
    "noise": (float, 0.0),
}

SCHEMA: dict[str, tuple[Callable[[str], Any], Any]] = {
    "model.n": (_int, REQUIRED),
    "model.m1": (float, REQUIRED),
    "model.m2": (float, REQUIRED),
    "model.chi": (float, 1.0),
    "model.alpha": (float, 1.0),
    "domain.geometry": (_choice("interval", "ball", "abstract"), REQUIRED),
    "domain.length": (float, 1.0),
    "domain.radius": (_optional_float, None),
    "domain.measure": (_optional_float, None),
    "domain.convex": (_bool, True),
    "domain.cells": (_int, 128),
    "exponents.mode": (_choice("explicit", "search"), "explicit"),
    "exponents.p": (_optional_float, None),
    "exponents.q": (_optional_float, None),
    "exponents.eta": (_optional_float, None),
    "exponents.p_min": (float, 1.0),
    "exponents.p_max": (float, 10.0),
    "exponents.q_min": (float, 1.0),
    "exponents.q_max": (float, 10.0),
    "exponents.step": (float, 0.5),
    "gn.mode": (_choice("given", "estimate"), "given"),
    "gn.c1": (_optional_float, None),
    "gn.c2": (_optional_float, None),
    "gn.budget": (_int, 200),
    "gn.safety": (float, 2.0),
    "gn.seed": (_int, 0),
    "bound.d_delta": (_optional_float, None),
    "bound.tol": (float, 1e-10),
    "solver.cfl_safety": (float, 0.9),
    "solver.dt_min": (float, 1e-12),
    "solver.u_blowup_threshold": (float, 1e8),
    "solver.concentration_fraction": (float, 0.5),
    "solver.t_end": (float, 1.0),
    "solver.sample_stride": (float, 0.01),
    "solver.seed": (_int, 0),
    "solver.rtol": (float, 1e-4),
    "solver.atol": (float, 1e-8),
    "solver.clip": (_bool, True),
    "solver.max_steps": (_int, 5_000_000),
    "verify.tol": (float, 1e-3),
    "sweep.m1": (_float_list, ()),
    "sweep.simulate": (_bool, False),
    "sweep.workers": (_int, 1),
    "outputs.dir": (str, "out"),
    "outputs.plots": (_bool, True),
    "outputs.snapshot_every": (_int, 10),
}
for _field in ("initial_u", "initial_v"):
    for _key, _spec in _INITIAL.items():
        SCHEMA[f"{_field}.{_key}"] = _spec


@dataclass(frozen=True)
class InitialData:
    kind: str
    value: float
    amplitude: float
    width: float
    center: float
    background: float
    path: str
    noise: float


@dataclass(frozen=True)
class ExperimentConfig:
    values: dict[str, Any]
    model: ModelParams
    cells: int
    solver: SolverConfig
    initial_u: InitialData
    initial_v: InitialData
    source: str = "<config>"

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @property
    def out_dir(self) -> Path:
        return Path(self.values["outputs.dir"])

    def gn_constants(self) -> GnConstants | None:
        if self["gn.mode"] != "given":
            return None
        if self["gn.c1"] is None or self["gn.c2"] is None:
            raise ConfigError("gn.c1 and gn.c2 are required when gn.mode = given", self.source)
        return GnConstants(self["gn.c1"], self["gn.c2"], "user-supplied")

    def with_values(self, **updates: Any) -> "ExperimentConfig":
        """Re-resolve with some keys replaced (dots written as ``__``)."""
        merged = dict(self.values)
        for key, value in updates.items():
            merged[key.replace("__", ".")] = value
        return resolve(merged, self.source)

    def canonical(self, exclude_sections: tuple[str, ...] = ()) -> str:
        lines = []
        for key in sorted(self.values):
            if key.split(".")[0] in exclude_sections:
                continue
            lines.append(f"{key} = {format_value(self.values[key])}")
        return "\n".join(lines) + "\n"


def format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(x)) for x in value)
    return str(value)


def parse_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """Parse config text into typed values (no defaults, no cross-checks)."""
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", where)
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", where)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", where)
        try:
            values[key] = SCHEMA[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", where) from None
    return values


def _domain(v: dict[str, Any]) -> DomainSpec:
    geometry, n = v["domain.geometry"], v["model.n"]
    if geometry == "interval":
        return DomainSpec.interval(v["domain.length"])
    if geometry == "ball":
        if v["domain.radius"] is not None:
            return DomainSpec.ball(v["domain.radius"], n)
        if v["domain.measure"] is not None:
            return DomainSpec.ball_with_measure(v["domain.measure"], n)
        return DomainSpec.ball(1.0, n)
    if v["domain.measure"] is None:
        raise ConfigError("domain.measure is required for an abstract domain")
    return DomainSpec.abstract(v["domain.measure"], n, v["domain.convex"])


def _initial(v: dict[str, Any], name: str) -> InitialData:
    data = InitialData(**{k: v[f"{name}.{k}"] for k in _INITIAL})
    if data.kind == "from-file" and not data.path:
        raise ConfigError(f"{name}.path is required when {name}.kind = from-file")
    if data.kind == "gaussian" and not data.width > 0:
        raise ConfigError(f"{name}.width must be > 0")
    if data.noise < 0:
        raise ConfigError(f"{name}.noise must be >= 0")
    return data


def resolve(values: dict[str, Any], source: str = "<config>") -> ExperimentConfig:
    """Apply defaults and validate cross-field constraints."""
    full: dict[str, Any] = {}
    for key, (_, default) in SCHEMA.items():
        if key in values:
            full[key] = values[key]
        elif default is REQUIRED:
            raise ConfigError(f"missing required key {key!r}", source)
        else:
            full[key] = default
    if full["exponents.mode"] == "explicit" and (
            full["exponents.p"] is None or full["exponents.q"] is None):
        raise ConfigError("exponents.p and exponents.q are required in explicit mode", source)
    if full["gn.budget"] < 1 or full["gn.safety"] < 1:
        raise ConfigError("gn.budget must be >= 1 and gn.safety >= 1", source)
    if full["sweep.workers"] < 1:
        raise ConfigError("sweep.workers must be >= 1", source)
    try:
        domain = _domain(full)
        model = ModelParams(full["model.n"], full["model.m1"], full["model.m2"],
                            full["model.chi"], full["model.alpha"], domain)
        if not domain.convex and full["bound.d_delta"] is None:
            raise ConfigError("bound.d_delta is required for a non-convex domain", source)
        solver = SolverConfig(**{k.split(".", 1)[1]: full[k] for k in full
                                 if k.startswith("solver.")})
    except ConfigError:
        raise
    except KSError as exc:
        raise ConfigError(str(exc), source) from None
    return ExperimentConfig(values=full, model=model, cells=full["domain.cells"], solver=solver,
                            initial_u=_initial(full, "initial_u"),
                            initial_v=_initial(full, "initial_v"), source=source)


def load_config(path: str | Path, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    values = parse_text(text, str(path))
    values.update(overrides or {})
    return resolve(values, str(path))


def loads_config(text: str, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    values = parse_text(text)
    values.update(overrides or {})
    return resolve(values)
