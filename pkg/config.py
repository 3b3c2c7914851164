"""
Configuration settings for the decomposition engine.
"""
import math
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class EngineConfig(BaseModel):
    """Limits and switches of the decomposition engines."""

    # Largest class of members sharing one image in the independent-set engine
    max_collision_class: int = 64

    # Safety net on the depth of the rcf recursion
    max_recursion_depth: int = 64

    # Emit enumerative pieces when the parameter descent finds no solvable coordinate
    allow_fallback: bool = True


class GridConfig(BaseModel):
    """Default verification grid."""

    # Axes run over [-reach, reach]
    reach: int = 5

    # Fewest sample parameters a default grid may have, across all coordinates
    min_points: int = 100

    # Extra seeded rational points per grid
    random_points: int = 0
    seed: int = 0


class GeneratorConfig(BaseModel):
    """Bounds of the seeded instance generator."""

    max_n: int = 2
    max_k: int = 2
    max_degree: int = 3
    max_points: int = 5

    # ufss families per corpus, templates included
    count: int = 20
    linear_count: int = 5
    indep_count: int = 5
    seed: int = 7


class IntegrationConfig(BaseModel):
    """Configuration for different integrations."""

    integrations: List[str] = ['slack']

    slack_enabled: bool = False
    slack_channel: str = '#ufss-verification'


class Config(BaseModel):
    """Main configuration class."""

    engine: EngineConfig = EngineConfig()
    grid: GridConfig = GridConfig()
    generator: GeneratorConfig = GeneratorConfig()
    integrations: IntegrationConfig = IntegrationConfig()

    def get_default_grid(self, k: int) -> str:
        """
        Grid spec with at least ``grid.min_points`` samples over k coordinates.

        Axes use unit steps when few points per axis suffice (e.g. "-5:5:1"
        for k=2) and split the unit further otherwise ("-5:5:1/10" for k=1).

        Args:
            k: number of parameter coordinates

        Returns:
            Spec string in the "lo:hi:step,..." form accepted by SampleGrid.parse
        """
        if k <= 0:
            return ""
        per_axis = 2
        while per_axis ** k < self.grid.min_points:
            per_axis += 1
        half = per_axis // 2
        if half <= self.grid.reach:
            axis = f"-{half}:{half}:1"
        else:
            denominator = math.ceil((per_axis - 1) / (2 * self.grid.reach))
            axis = f"-{self.grid.reach}:{self.grid.reach}:1/{denominator}"
        return ",".join([axis] * k)


class EnvSettings(BaseSettings):
    """Settings read from the environment and ``.env`` (prefix UFSS_)."""

    model_config = SettingsConfigDict(env_prefix='UFSS_', env_file='.env', extra='ignore')

    log_level: str = 'INFO'
    slack_webhook_url: Optional[str] = None


class RunConfig(BaseModel):
    """One command-line invocation; unknown fields are rejected."""

    model_config = ConfigDict(extra='forbid')

    command: Literal['decompose', 'verify', 'roundtrip', 'gen']
    case: Literal['rcf', 'linear', 'indep'] = 'rcf'
    input: Optional[Path] = None
    output: Optional[Path] = None
    instance: Optional[Path] = None
    decomposition: Optional[Path] = None
    grid: Optional[str] = None
    seed: int = 0
    emit_trace: Optional[Path] = None
    fail_on_fallback: bool = False
    notify: bool = False
    count: int = GeneratorConfig().count
    out_dir: Optional[Path] = None

    @field_validator('input', 'output', 'instance', 'decomposition', 'emit_trace', 'out_dir')
    @classmethod
    def _resolve(cls, value: Optional[Path]) -> Optional[Path]:
        return value.expanduser().resolve() if value is not None else None


# Default configuration instance
config = Config()
