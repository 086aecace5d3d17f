"""Experiment configuration files.

The format is INI-style ``key = value`` text read with :mod:`configparser`::

    [experiment]
    experiment = reduction
    functional = polynomial
    hermite = 1,0:1; 0,2:1
    r_values = 80
    replications = 1000
    seed = 20240607

    [component.1]
    kind = cauchy
    z = 2.5

    [component.2]
    kind = cauchy
    z = 0.2

``hermite`` lists ``index:coefficient`` pairs of ``G = sum c_v e_v`` (the
coefficient multiplying ``e_v``, i.e. ``C_v / v!``). Named regimes for the
Student experiment use sections ``[regime.<name>.component.<j>]``.
"""
from __future__ import annotations

import configparser
import enum
import math
import re
from dataclasses import dataclass, replace
from typing import Sequence

from ..covmodels import CovarianceModel, classify, model_from_mapping
from ..errors import ConfigError, StrongWeakError
from ..hermite import HermiteExpansion, vfactorial

__all__ = ["ExperimentKind", "FunctionalSpec", "ExperimentConfig", "parse_config", "load_config"]


class ExperimentKind(enum.Enum):
    REDUCTION = "reduction"
    STUDENT_MINKOWSKI = "student"
    VARIANCE_SCAN = "variance-scan"
    COEFFICIENTS = "coeffs"
    SIMULATE = "simulate"


@dataclass(frozen=True)
class FunctionalSpec:
    """Either a finite Hermite polynomial or the Student excursion indicator."""

    kind: str  # "polynomial" or "student"
    terms: tuple[tuple[tuple[int, ...], float], ...] = ()
    n: int = 2
    a: float = 0.5

    def expansion(self) -> HermiteExpansion:
        if self.kind != "polynomial":
            raise ConfigError("only polynomial functionals carry an explicit expansion")
        coeffs = {v: c * vfactorial(v) for v, c in self.terms}
        return HermiteExpansion.from_coefficients(coeffs)

    def to_text(self) -> str:
        if self.kind == "student":
            return f"student(n={self.n}, a={self.a!r})"
        return "; ".join(",".join(map(str, v)) + f":{c!r}" for v, c in self.terms)


_REGIME_RE = re.compile(r"^regime\.([A-Za-z0-9_-]+)\.component\.(\d+)$")
_COMPONENT_RE = re.compile(r"^component\.(\d+)$")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: ExperimentKind
    functional: FunctionalSpec
    models: tuple[CovarianceModel, ...] = ()
    regimes: tuple[tuple[str, tuple[CovarianceModel, ...]], ...] = ()
    r_values: tuple[float, ...] = (10.0,)
    replications: int = 100
    h: float = 1.0
    seed: int = 0
    output_dir: str = "out"
    truncation_order: int = 8
    kinds: tuple[str, ...] = ()
    n_values: tuple[int, ...] = (1, 2, 3)
    a_values: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)
    qmc_points: int = 2 ** 22
    fd_step: float = 1e-4
    qq_points: int = 99
    threads: int = 1
    method: str | None = None
    padding: int = 2
    clip_ceiling: float = 1e-2

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.replications < 2:
            raise ConfigError("replications must be at least 2")
        if not self.r_values or any(not (r > 0 and math.isfinite(r)) for r in self.r_values):
            raise ConfigError("r_values must be positive")
        if len(set(self.r_values)) != len(self.r_values):
            raise ConfigError("r_values must be distinct")
        if not self.h > 0:
            raise ConfigError("h must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.experiment is ExperimentKind.VARIANCE_SCAN and len(self.r_values) < 3:
            raise ConfigError("a variance scan needs at least 3 r values")

    def regime_models(self) -> list[tuple[str, tuple[CovarianceModel, ...]]]:
        """Named model lists; the ``[component.*]`` list is regime ``main``."""
        if self.regimes:
            return list(self.regimes)
        if not self.models:
            raise ConfigError("no covariance models configured")
        return [("main", self.models)]

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    # -- serialisation ------------------------------------------------------
    def to_text(self) -> str:
        """Canonical text form; re-parsing it gives an equal configuration."""
        out = ["[experiment]", f"experiment = {self.experiment.value}"]
        if self.functional.kind == "student":
            out += ["functional = student", f"n = {self.functional.n}", f"a = {self.functional.a!r}"]
        else:
            out += ["functional = polynomial", f"hermite = {self.functional.to_text()}"]
        out += [
            f"r_values = {', '.join(repr(float(r)) for r in self.r_values)}",
            f"replications = {self.replications}",
            f"h = {self.h!r}",
            f"seed = {self.seed}",
            f"output_dir = {self.output_dir}",
            f"truncation_order = {self.truncation_order}",
            f"padding = {self.padding}",
            f"clip_ceiling = {self.clip_ceiling!r}",
            f"qq_points = {self.qq_points}",
        ]
        if self.method:
            out.append(f"method = {self.method}")
        if self.kinds:
            out.append(f"kinds = {', '.join(self.kinds)}")
        if self.experiment is ExperimentKind.COEFFICIENTS:
            out += [f"n_values = {', '.join(map(str, self.n_values))}",
                    f"a_values = {', '.join(repr(float(a)) for a in self.a_values)}",
                    f"qmc_points = {self.qmc_points}", f"fd_step = {self.fd_step!r}"]
        for j, mod in enumerate(self.models, 1):
            out += ["", f"[component.{j}]"] + _model_lines(mod)
        for name, mods in self.regimes:
            for j, mod in enumerate(mods, 1):
                out += ["", f"[regime.{name}.component.{j}]"] + _model_lines(mod)
        return "\n".join(out) + "\n"


def _model_lines(mod: CovarianceModel) -> list[str]:
    return [f"{k} = {v}" if isinstance(v, str) else f"{k} = {v!r}" for k, v in mod.to_dict().items()]


# ----------------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------------
def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in re.split(r"[,\s]+", text.strip()) if t)
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in re.split(r"[,\s]+", text.strip()) if t)
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def parse_hermite_terms(text: str) -> tuple[tuple[tuple[int, ...], float], ...]:
    """``"1,0:1; 0,2:1"`` -> ``(((1, 0), 1.0), ((0, 2), 1.0))``."""
    terms = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        try:
            idx, coef = chunk.split(":")
            v = tuple(int(k) for k in idx.split(","))
            terms.append((v, float(coef)))
        except ValueError as exc:
            raise ConfigError(f"bad hermite term {chunk!r}; expected 'k1,k2,...:coefficient'") from exc
    if not terms:
        raise ConfigError("hermite needs at least one term")
    if len({len(v) for v, _ in terms}) != 1:
        raise ConfigError("hermite indices must share one length")
    if any(k < 0 for v, _ in terms for k in v):
        raise ConfigError("hermite indices must be nonnegative")
    return tuple(terms)


def _model(section: configparser.SectionProxy) -> CovarianceModel:
    try:
        return model_from_mapping(dict(section.items()))
    except (StrongWeakError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"section [{section.name}]: {exc}") from exc


def _check_order(models: Sequence[CovarianceModel], where: str) -> None:
    longs = [classify(m).is_long_range for m in models]
    if longs != sorted(longs):
        raise ConfigError(f"{where}: list short-range components before long-range ones")


_KNOWN = {"experiment", "functional", "hermite", "n", "a", "r_values", "replications", "h", "seed",
          "output_dir", "truncation_order", "kinds", "n_values", "a_values", "qmc_points",
          "fd_step", "qq_points", "threads", "method", "padding", "clip_ceiling"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse configuration text.

    Raises
    ------
    ConfigError
        on unknown experiments, malformed values or failed validation.
    """
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    if "experiment" not in cp:
        raise ConfigError("missing [experiment] section")
    ex = cp["experiment"]
    unknown = set(ex) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown keys in [experiment]: {sorted(unknown)}")
    try:
        kind = ExperimentKind(ex.get("experiment", "").strip())
    except ValueError as exc:
        raise ConfigError(f"unknown experiment {ex.get('experiment')!r}") from exc

    fname = ex.get("functional", "polynomial").strip()
    try:
        if fname == "student":
            functional = FunctionalSpec("student", n=int(ex.get("n", "2")), a=float(ex.get("a", "0.5")))
        elif fname == "polynomial":
            functional = FunctionalSpec("polynomial", parse_hermite_terms(ex.get("hermite", "")))
        else:
            raise ConfigError(f"unknown functional {fname!r}")
        numbers = dict(
            replications=ex.getint("replications", 100),
            h=ex.getfloat("h", 1.0),
            seed=int(ex.get("seed", "0")),
            truncation_order=ex.getint("truncation_order", 8),
            qmc_points=ex.getint("qmc_points", 2 ** 22),
            fd_step=ex.getfloat("fd_step", 1e-4),
            qq_points=ex.getint("qq_points", 99),
            threads=ex.getint("threads", 1),
            padding=ex.getint("padding", 2),
            clip_ceiling=ex.getfloat("clip_ceiling", 1e-2),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    components: dict[int, CovarianceModel] = {}
    regimes: dict[str, dict[int, CovarianceModel]] = {}
    for name in cp.sections():
        if name == "experiment":
            continue
        if m := _COMPONENT_RE.match(name):
            components[int(m.group(1))] = _model(cp[name])
        elif m := _REGIME_RE.match(name):
            regimes.setdefault(m.group(1), {})[int(m.group(2))] = _model(cp[name])
        else:
            raise ConfigError(f"unknown section [{name}]")

    def ordered(d: dict[int, CovarianceModel], where: str) -> tuple[CovarianceModel, ...]:
        if sorted(d) != list(range(1, len(d) + 1)):
            raise ConfigError(f"{where}: components must be numbered 1..{len(d)}")
        mods = tuple(d[k] for k in sorted(d))
        _check_order(mods, where)
        return mods

    models = ordered(components, "components") if components else ()
    regime_list = tuple((nm, ordered(regimes[nm], f"regime {nm}")) for nm in regimes)

    kinds = tuple(k.strip() for k in ex.get("kinds", "").split(",") if k.strip())
    cfg = ExperimentConfig(
        experiment=kind,
        functional=functional,
        models=models,
        regimes=regime_list,
        r_values=_floats(ex.get("r_values", "10")),
        output_dir=ex.get("output_dir", "out").strip(),
        kinds=kinds,
        n_values=_ints(ex.get("n_values", "1, 2, 3")),
        a_values=_floats(ex.get("a_values", "0, 0.5, 1, 2")),
        method=ex.get("method", "").strip() or None,
        **numbers,
    )
    _check_dimensions(cfg)
    return cfg


def _check_dimensions(cfg: ExperimentConfig) -> None:
    if cfg.experiment is ExperimentKind.COEFFICIENTS:
        return
    for name, mods in cfg.regime_models():
        if cfg.functional.kind == "polynomial":
            p = len(cfg.functional.terms[0][0])
        else:
            p = cfg.functional.n + 1
        if len(mods) != p:
            raise ConfigError(f"regime {name}: functional needs {p} components, got {len(mods)}")


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
