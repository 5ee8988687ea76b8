"""
Pydantic models for lzse.

Factor records returned by queries and oracles, the factor-stream header and
the audit report printed by the stats command.
"""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class Algorithm(str, Enum):
    """Factorization selector; values double as CLI spellings."""
    LZ77 = "lz77"
    LZ77_CLASSIC = "lz77c"
    LZ78 = "lz78"

    @property
    def code(self) -> int:
        """Algorithm byte of the stream header."""
        return {Algorithm.LZ77: 1, Algorithm.LZ77_CLASSIC: 2, Algorithm.LZ78: 3}[self]

    @classmethod
    def from_code(cls, code: int) -> "Algorithm":
        for algo in cls:
            if algo.code == code:
                return algo
        raise ValueError(f"unknown algorithm code {code}")


class Phase(str, Enum):
    """Interpretation of the A_1/A_2 arena contents."""
    EMPTY = "empty"
    SA = "sa"
    ISA = "isa"
    SPARSE_ISA = "sparse_isa"
    D = "d"
    REFERRED_POSITIONS = "referred_positions"
    WITNESSES = "witnesses"
    REFERRED_INDICES = "referred_indices"


class Lz77Factor(BaseModel):
    """One LZ77 factor. ref is None for a free letter."""
    model_config = ConfigDict(frozen=True)

    start: int = Field(..., ge=1, description="Factor position (1-based)")
    length: int = Field(..., ge=1, description="Factor length")
    ref: Optional[int] = Field(default=None, description="Referred position of a referencing factor")
    symbol: Optional[int] = Field(
        default=None,
        description="Literal of a free letter, or the fresh character of a classic reference; -1 is the sentinel"
    )


class Lz78Factor(BaseModel):
    """One LZ78 factor: factor ref extended by symbol."""
    model_config = ConfigDict(frozen=True)

    start: int = Field(..., ge=1)
    length: int = Field(..., ge=1)
    ref: int = Field(..., ge=0, description="Referred factor index, 0 for the empty factor")
    symbol: int = Field(..., description="Additional character; -1 is the sentinel")


class OracleFactor(BaseModel):
    """Factor produced by a brute-force reference implementation."""
    model_config = ConfigDict(frozen=True)

    start: int
    length: int
    ref: Optional[int] = None
    literal: Optional[int] = None


class CodecHeader(BaseModel):
    """Fixed big-endian header of a factor stream."""
    magic: bytes = Field(default=b"LZSE", min_length=4, max_length=4)
    version: int = Field(default=1, ge=0, le=255)
    algorithm: Algorithm
    eps_num: int = Field(..., ge=1, le=0xFFFF)
    eps_den: int = Field(..., ge=1, le=0xFFFF)
    n: int = Field(..., ge=1, lt=1 << 64)
    z: int = Field(..., ge=1, lt=1 << 64)


class LemmaCheck(BaseModel):
    """Outcome of one audited bound."""
    name: str
    holds: bool
    lhs: float
    rhs: float
    detail: str = ""


class AuditReport(BaseModel):
    """Space, size and timing figures of one factorization run."""
    algorithm: Algorithm
    n: int
    epsilon: str
    z: int
    counts: Dict[str, int] = Field(default_factory=dict, description="z_r, |V_r|, |D|, |V_Xi|, Delta, ...")
    arena_bits: int = Field(default=0, description="Bits of A_1 plus A_2")
    arena_budget_bits: int = Field(default=0, description="(1 + floor(eps n)/n) n ceil(lg(n+1))")
    structure_bits: Dict[str, int] = Field(default_factory=dict, description="Auxiliary structures by name")
    timings_ms: Dict[str, float] = Field(default_factory=dict)
    checks: List[LemmaCheck] = Field(default_factory=list)

    @property
    def auxiliary_bits(self) -> int:
        return sum(self.structure_bits.values())

    @property
    def all_hold(self) -> bool:
        return all(check.holds for check in self.checks)

    def as_key_values(self) -> Dict[str, str]:
        """Flatten for the key=value output format."""
        values: Dict[str, str] = {
            "algorithm": self.algorithm.value,
            "n": str(self.n),
            "epsilon": self.epsilon,
            "z": str(self.z),
        }
        values.update({key: str(value) for key, value in self.counts.items()})
        values["arena_bits"] = str(self.arena_bits)
        values["arena_budget_bits"] = str(self.arena_budget_bits)
        values["auxiliary_bits"] = str(self.auxiliary_bits)
        values.update({f"bits.{key}": str(value) for key, value in self.structure_bits.items()})
        values.update({f"time_ms.{key}": f"{value:.3f}" for key, value in self.timings_ms.items()})
        values.update({f"check.{check.name}": "ok" if check.holds else "FAIL" for check in self.checks})
        return values


class FactorMismatch(BaseModel):
    """First factor on which a pipeline and its oracle disagree."""
    index: int = Field(..., ge=1, description="1-based factor index")
    expected: Optional[OracleFactor] = None
    actual: Optional[OracleFactor] = None


class VerificationResult(BaseModel):
    """Comparison of one pipeline against one oracle."""
    algorithm: Algorithm
    pipeline: str
    oracle: str
    n: int
    z: int
    matched: bool
    mismatch: Optional[FactorMismatch] = None
