import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping

from ..config import SolverSettings
from ..model.problem import Problem

EXPRESSION_KEYS = ('g', 'f', 'D', 'rho')


class ProblemFileError(ValueError):
    """Malformed problem file or --param override"""


@dataclass
class ProblemFile:
    """A problem file: four expressions, named parameters and solver options

        name = "example"
        g = "u^2 - u + K"
        f = "0"
        D = "(3/4 - u) * sqrt(u - u^2)"
        rho = "sqrt(u - u^2)"

        [params]
        K = 0.25

        [options]
        tol_c = 1e-6
    """
    name: str
    expressions: Dict[str, str]
    params: Dict[str, float] = field(default_factory=dict)
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], default_name: str = "problem") -> 'ProblemFile':
        missing = [key for key in EXPRESSION_KEYS if key not in data]
        if missing:
            raise ProblemFileError(f"Missing expression(s): {', '.join(missing)}")
        expressions = {}
        for key in EXPRESSION_KEYS:
            value = data[key]
            if isinstance(value, (int, float)):
                value = repr(value)
            if not isinstance(value, str):
                raise ProblemFileError(f"Expression {key} must be a string, got {type(value).__name__}")
            expressions[key] = value

        params = data.get('params', {})
        if not isinstance(params, Mapping):
            raise ProblemFileError("[params] must be a table")
        options = data.get('options', {})
        if not isinstance(options, Mapping):
            raise ProblemFileError("[options] must be a table")

        unknown = sorted(set(data) - set(EXPRESSION_KEYS) - {'name', 'params', 'options'})
        if unknown:
            logging.warning(f"Ignoring unknown problem-file keys: {', '.join(unknown)}")

        try:
            params = {str(key): float(value) for key, value in params.items()}
        except (TypeError, ValueError) as exc:
            raise ProblemFileError(f"Parameters must be numbers: {exc}") from exc
        return cls(name=str(data.get('name', default_name)), expressions=expressions,
                   params=params, options=dict(options))

    @classmethod
    def load(cls, path: str) -> 'ProblemFile':
        path = Path(path)
        try:
            with path.open('rb') as handle:
                data = tomllib.load(handle)
        except tomllib.TOMLDecodeError as exc:
            raise ProblemFileError(f"{path}: {exc}") from exc
        return cls.from_mapping(data, default_name=path.stem)

    def with_params(self, overrides: Iterable[str]) -> 'ProblemFile':
        """Apply NAME=VALUE overrides on top of [params]"""
        params = dict(self.params)
        for item in overrides:
            key, sep, value = item.partition('=')
            if not sep or not key.strip():
                raise ProblemFileError(f"Expected NAME=VALUE, got '{item}'")
            try:
                params[key.strip()] = float(value)
            except ValueError as exc:
                raise ProblemFileError(f"Parameter {key.strip()} needs a number, got '{value}'") from exc
        return ProblemFile(name=self.name, expressions=dict(self.expressions), params=params,
                           options=dict(self.options))

    def settings(self) -> SolverSettings:
        try:
            return SolverSettings.from_mapping(self.options)
        except (TypeError, ValueError) as exc:
            raise ProblemFileError(str(exc)) from exc

    def build(self, settings: SolverSettings) -> Problem:
        return Problem.from_sources(name=self.name, params=self.params, settings=settings, **self.expressions)
