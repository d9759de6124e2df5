# ============================================
# FILE: models/run_config.py
# ============================================
"""Run configuration files: flat KEY=value text in dotenv syntax.

Keys are the upper-cased field names of ``RunConfig``, e.g.

    N=2
    OMEGA=2.0
    RESOLUTION=64
    PRESET=constant
"""
import re
from io import StringIO
from pathlib import Path
from typing import List, Literal, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, PositiveFloat, PositiveInt, ValidationError, field_validator, model_validator

import config
from models.errors import ConfigError
from models.helical import HelicalConfig


class RunConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    # problem
    n: Literal[2, 3] = 2
    omega: PositiveFloat = 1.0
    R: PositiveFloat = 1.0
    sign: Literal[1, -1] = 1
    resolution: str = '32'
    M: int = config.DEFAULT_MODES
    n_phi: Optional[PositiveInt] = None
    name: str = 'run'

    # data: a named preset or tabular files
    preset: Optional[str] = 'constant'
    c: float = 1.0
    zero_boundary: bool = False
    source_file: Optional[str] = None
    boundary_file: Optional[str] = None

    # solver
    path: Literal['direct', 'iterative'] = 'direct'
    allow_incompatible: bool = False
    workers: PositiveInt = 1

    # verification
    suite: Optional[str] = None
    seed: int = config.DEFAULT_SEED
    refine: PositiveInt = 3
    identity_resolution: Optional[str] = None
    samples: PositiveInt = 1_000_000
    trials: PositiveInt = 10
    nullspace_modes: List[int] = [0, 1, 2]
    certificate_rtol: PositiveFloat = config.CERTIFICATE_RTOL
    min_order: float = config.MIN_ORDER

    # outputs
    output_dir: str = 'output'
    field_file: str = 'field.txt'
    modes_file: str = 'modes.txt'
    report_file: str = 'report.json'
    table_file: str = 'convergence.txt'
    integrand_file: str = 'integrands.txt'

    @model_validator(mode='before')
    @classmethod
    def _empty_is_unset(cls, values):
        # KEY= with nothing after it stands for None, or an empty mode list
        if isinstance(values, dict):
            return {k: (None if v == '' and k != 'nullspace_modes' else v) for k, v in values.items()}
        return values

    @field_validator('n', 'sign', mode='before')
    @classmethod
    def _integer_choice(cls, value):
        if isinstance(value, str):
            return int(value)
        return value

    @field_validator('nullspace_modes', mode='before')
    @classmethod
    def _split_modes(cls, value):
        if isinstance(value, str):
            return [int(p) for p in value.replace(' ', '').split(',') if p]
        return value

    @field_validator('M')
    @classmethod
    def _non_negative_modes(cls, value):
        if value < 0:
            raise ValueError('M must be non-negative')
        return value

    @model_validator(mode='after')
    def _check_resolution(self):
        from utils.grid import parse_resolution

        try:
            parse_resolution(self.resolution, self.n)
            if self.identity_resolution is not None:
                parse_resolution(self.identity_resolution, self.n)
        except (ValueError, TypeError) as e:
            raise ValueError(f"resolution: {e}") from e
        if self.preset is None and self.source_file is None:
            raise ValueError('either PRESET or SOURCE_FILE must be given')
        return self

    # ------------------------------------------------------------------
    @property
    def helical(self):
        return HelicalConfig(n=self.n, omega=self.omega, R=self.R, sign=self.sign)

    @property
    def resolution_parts(self):
        from utils.grid import parse_resolution

        return tuple(parse_resolution(self.resolution, self.n))

    @property
    def output_path(self):
        return Path(self.output_dir)

    def output(self, name):
        return self.output_path / getattr(self, name)

    def with_overrides(self, **overrides):
        """Re-validated copy; ``None`` overrides are ignored."""
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return RunConfig.model_validate(values)
        except ValidationError as e:
            error = e.errors()[0]
            key = error['loc'][0] if error['loc'] else None
            raise ConfigError(f"{key}: {error['msg']}") from e

    # ------------------------------------------------------------------
    @classmethod
    def from_file(cls, path):
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        return cls.from_text(text)

    @classmethod
    def from_text(cls, text):
        lines = _key_lines(text)
        fields = {name.upper(): name for name in cls.model_fields}
        raw = {}
        for key, value in _parse_dotenv(text).items():
            if value is None:
                raise ConfigError(f"key {key} has no value", line=lines.get(key.upper()))
            raw[fields.get(key.upper(), key)] = value
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            error = e.errors()[0]
            key = str(error['loc'][0]) if error['loc'] else None
            line = lines.get(key.upper()) if key else None
            raise ConfigError(f"{key}: {error['msg']}", line=line) from e

    def to_env_text(self):
        lines = []
        for name, value in self.model_dump().items():
            if value is None:
                value = ''
            elif isinstance(value, bool):
                value = 'true' if value else 'false'
            elif isinstance(value, list):
                value = ','.join(str(v) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{name.upper()}={value}")
        return '\n'.join(lines) + '\n'

    def write(self, path):
        Path(path).write_text(self.to_env_text())


_KEY_PATTERN = re.compile(r'^\s*(?:export\s+)?([A-Za-z_][A-Za-z0-9_]*)\s*=')


def _key_lines(text):
    """1-based line number of every key, by upper-cased key."""
    found = {}
    for number, line in enumerate(text.splitlines(), start=1):
        match = _KEY_PATTERN.match(line)
        if match:
            found.setdefault(match.group(1).upper(), number)
    return found


def _parse_dotenv(text):
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith('#') and not _KEY_PATTERN.match(line):
            raise ConfigError(f"expected KEY=value, got '{stripped}'", line=number)
    return dotenv_values(stream=StringIO(text))
