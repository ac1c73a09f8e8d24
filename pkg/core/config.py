"""Flat key=value run configuration.

One ``key=value`` pair per line, ``#`` starts a comment, lists are
comma-separated. Numbers accept fractions such as ``1/32``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto
from fractions import Fraction
from pathlib import Path

from fem.timestepper import StepRule, StepRuleKind
from problems import ProblemType


class ExperimentType(Enum):
    """Experiment type enumeration.

    Parameters
    ----------
    Enum : EnumMeta
        Enumeration metaclass.
    """

    CONVERGENCE = auto()
    REGULARIZATION = auto()
    DECAY = auto()
    CAVITY = auto()
    SINGLE = auto()


class ConfigError(ValueError):
    """Invalid configuration text, located by line and key."""

    def __init__(self, line: int, key: str, message: str):
        super().__init__(f"line {line}: {key}: {message}")
        self.line = line
        self.key = key


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentType
    kappa_list: list[float]
    ns: list[int]
    k_rule: StepRule
    nu: float = 1.0
    T: float = 1.0
    picard_tol: float = 1e-10
    max_iters: int = 50
    output_dir: Path = Path("output")
    problem: ProblemType | None = None


REQUIRED_KEYS = ("experiment", "kappa_list", "h_list", "k_rule")
OPTIONAL_KEYS = ("nu", "T", "picard_tol", "max_iters", "output_dir", "problem")
SINGLE_MESH_EXPERIMENTS = (
    ExperimentType.DECAY,
    ExperimentType.CAVITY,
    ExperimentType.SINGLE,
)


def _number(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as error:
        raise ValueError(f"not a number: {text.strip()!r}") from error


def _positive(text: str) -> float:
    value = _number(text)
    if value <= 0:
        raise ValueError(f"must be positive: {text.strip()}")
    return float(value)


def _list(text: str) -> list[str]:
    items = [item.strip() for item in text.split(",")]
    if not all(items):
        raise ValueError(f"empty list entry in {text!r}")
    return items


def _kappas(text: str) -> list[float]:
    kappas = [float(_number(item)) for item in _list(text)]
    if any(kappa < 0 for kappa in kappas):
        raise ValueError("retardation times must be non-negative")
    return kappas


def _cells_per_side(text: str) -> list[int]:
    ns = []
    for item in _list(text):
        h = _number(item)
        if h <= 0 or (1 / h).denominator != 1:
            raise ValueError(f"mesh parameter must be 1/n for a positive integer n: {item}")
        ns.append(int(1 / h))
    return ns


def _step_rule(text: str) -> StepRule:
    kind, _, value = text.strip().partition(":")
    match kind.lower():
        case "h" if not value:
            return StepRule(StepRuleKind.H)
        case "h2" if not value:
            return StepRule(StepRuleKind.H2)
        case "fixed":
            return StepRule(StepRuleKind.FIXED, _positive(value))
        case _:
            raise ValueError(f"expected h, h2 or fixed:<value>, got {text.strip()!r}")


def _iterations(text: str) -> int:
    value = _number(text)
    if value.denominator != 1 or value < 1:
        raise ValueError(f"must be a positive integer: {text.strip()}")
    return int(value)


def _enum_member(enum: type[Enum], text: str):
    try:
        return enum[text.strip().upper()]
    except KeyError as error:
        choices = ", ".join(member.name.lower() for member in enum)
        raise ValueError(f"expected one of {choices}, got {text.strip()!r}") from error


def _directory(text: str) -> Path:
    return Path(text.strip())


PARSERS = {
    "experiment": lambda text: _enum_member(ExperimentType, text),
    "kappa_list": _kappas,
    "h_list": _cells_per_side,
    "k_rule": _step_rule,
    "nu": _positive,
    "T": _positive,
    "picard_tol": _positive,
    "max_iters": _iterations,
    "output_dir": _directory,
    "problem": lambda text: _enum_member(ProblemType, text),
}


def parse_config(text: str, expected: ExperimentType | None = None) -> RunConfig:
    """Parse and validate a run configuration.

    Parameters
    ----------
    text : str
        Configuration text.
    expected : ExperimentType | None, optional
        Experiment the configuration must declare, by default any.

    Returns
    -------
    RunConfig
        The configuration with defaults filled in.

    Raises
    ------
    ConfigError
        On an unknown, duplicated, malformed or missing key. Missing keys are
        reported one line past the end of the text.
    """
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    number = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        key = key.strip()
        if not separator:
            raise ConfigError(number, key, "expected key=value")
        if key not in PARSERS:
            raise ConfigError(number, key, "unknown key")
        if key in values:
            raise ConfigError(number, key, f"duplicate key, first set on line {lines[key]}")
        if not value.strip():
            raise ConfigError(number, key, "empty value")
        try:
            values[key] = PARSERS[key](value)
        except ValueError as error:
            raise ConfigError(number, key, str(error)) from error
        lines[key] = number

    end = number + 1
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(end, key, "missing required key")

    experiment = values["experiment"]
    ns = values["h_list"]
    kappas = values["kappa_list"]
    assert isinstance(experiment, ExperimentType)
    assert isinstance(ns, list) and isinstance(kappas, list)
    if expected is not None and experiment != expected:
        raise ConfigError(
            lines["experiment"],
            "experiment",
            f"configuration is for {experiment.name.lower()}, not {expected.name.lower()}",
        )
    if experiment in SINGLE_MESH_EXPERIMENTS and len(ns) != 1:
        raise ConfigError(
            lines["h_list"], "h_list", f"{experiment.name.lower()} takes a single mesh"
        )
    if experiment == ExperimentType.SINGLE and len(kappas) != 1:
        raise ConfigError(lines["kappa_list"], "kappa_list", "single takes one kappa")
    if experiment == ExperimentType.CONVERGENCE:
        for coarse, fine in zip(ns, ns[1:]):
            if fine != 2 * coarse:
                raise ConfigError(
                    lines["h_list"], "h_list", f"h must halve: 1/{coarse} -> 1/{fine}"
                )
    values["ns"] = values.pop("h_list")
    return RunConfig(**values)  # type: ignore[arg-type]


def load_config(path: Path, expected: ExperimentType | None = None) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), expected)
