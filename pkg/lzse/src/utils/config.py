"""
Configuration management for the lzse toolkit.

Settings come from LZSE_* environment variables (nested groups use "__",
e.g. LZSE_STRUCTURES__RANK_BLOCK_BITS=32) or an optional .env file.
Command-line flags override whatever is loaded here.
"""

from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict

from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from lzse.src.models.schemas import Algorithm
from lzse.src.structures.bitvec import RankDirectory
from lzse.src.utils.errors import InvalidInputError


class LogLevel(str, Enum):
    """Logging level types."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


def parse_epsilon(value: Any) -> Fraction:
    """Parse an epsilon given as "N/D", an int or a Fraction; must lie in (0, 1]."""
    if isinstance(value, Fraction):
        eps = value
    elif isinstance(value, int) and not isinstance(value, bool):
        eps = Fraction(value)
    elif isinstance(value, str):
        num, sep, den = value.strip().partition("/")
        if not num.strip().isdigit() or (sep and not den.strip().isdigit()):
            raise InvalidInputError("epsilon must be written as NUM/DEN", {"epsilon": value})
        if sep and int(den) == 0:
            raise InvalidInputError("epsilon denominator must be positive", {"epsilon": value})
        eps = Fraction(int(num), int(den) if sep else 1)
    else:
        raise InvalidInputError("unsupported epsilon value", {"epsilon": repr(value)})

    if not 0 < eps <= 1:
        raise InvalidInputError("epsilon must satisfy 0 < epsilon <= 1", {"epsilon": str(eps)})
    return eps


class FactorizationSettings(BaseModel):
    """Defaults for a factorization run."""
    epsilon: str = Field(
        default="1/1",
        description="Helper-arena fraction as NUM/DEN, 0 < epsilon <= 1"
    )
    algorithm: Algorithm = Field(
        default=Algorithm.LZ77,
        description="Default factorization: lz77, lz77c (classic) or lz78"
    )
    audit: bool = Field(
        default=True,
        description="Audit the size bounds after compress; stats always audits"
    )

    @field_validator("epsilon")
    @classmethod
    def _check_epsilon(cls, value: str) -> str:
        try:
            parse_epsilon(value)
        except InvalidInputError as e:
            raise ValueError(str(e)) from e
        return value

    @property
    def epsilon_fraction(self) -> Fraction:
        return parse_epsilon(self.epsilon)


class StructureSettings(BaseModel):
    """Block sizes of the navigation directories."""
    rank_superblock_bits: int = Field(
        default=512,
        description="Superblock size of the rank/select directory"
    )
    rank_block_bits: int = Field(
        default=64,
        description="Block size of the rank/select directory"
    )
    excess_block_bits: int = Field(
        default=128,
        description="Block size of the parentheses excess directory"
    )
    rmq_block_size: int = Field(
        default=32,
        description="Block size of the LCP range-minimum index"
    )

    @field_validator("rank_superblock_bits", "rank_block_bits", "excess_block_bits", "rmq_block_size")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("block sizes must be positive")
        return value

    @model_validator(mode="after")
    def _superblock_multiple(self) -> "StructureSettings":
        if self.rank_superblock_bits % self.rank_block_bits:
            raise ValueError("rank_superblock_bits must be a multiple of rank_block_bits")
        return self

    @property
    def directory(self) -> RankDirectory:
        return RankDirectory(self.rank_superblock_bits, self.rank_block_bits)


class CodecSettings(BaseModel):
    """Factor stream options."""
    u32: bool = Field(
        default=False,
        description="Read and write 32-bit big-endian symbols instead of bytes"
    )
    strip_sentinel: bool = Field(
        default=True,
        description="Drop the trailing sentinel when decompressing"
    )


class LzseSettings(BaseSettings):
    """Main configuration settings for lzse."""

    service_name: str = Field(
        default="lzse",
        description="Name bound into every log record"
    )

    factorization: FactorizationSettings = Field(default_factory=FactorizationSettings)
    structures: StructureSettings = Field(default_factory=StructureSettings)
    codec: CodecSettings = Field(default_factory=CodecSettings)

    log_level: LogLevel = Field(
        default=LogLevel.WARNING,
        description="Logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL"
    )
    log_json: bool = Field(
        default=False,
        description="Render log records as JSON instead of console text"
    )

    model_config = SettingsConfigDict(
        env_prefix="LZSE_",
        env_nested_delimiter="__",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    def to_dict(self) -> Dict[str, Any]:
        """Flatten the settings for logging."""
        return {
            "service_name": self.service_name,
            "epsilon": self.factorization.epsilon,
            "algorithm": self.factorization.algorithm.value,
            "audit": self.factorization.audit,
            "rank_block_bits": self.structures.rank_block_bits,
            "excess_block_bits": self.structures.excess_block_bits,
            "rmq_block_size": self.structures.rmq_block_size,
            "u32": self.codec.u32,
            "log_level": self.log_level.value,
        }


@lru_cache()
def get_settings() -> LzseSettings:
    """Get cached settings instance."""
    return LzseSettings()
