# ============================================================================
# MODULE CONTEXT - PAYOFF MODELS
# ============================================================================
# STATUS: Foundation - contingent claim records
# PURPOSE: The five two-asset claims and their strike
# EXPORTS: PayoffKind, Payoff, RegularityReport
# PYDANTIC_MODELS: Payoff
# DEPENDENCIES: pydantic
# ============================================================================

"""
Payoff records.

    DIGITAL           H = K 1{S1 >= S2}
    QUANTO_DOMESTIC   H = S2 (S1 - K)^+
    QUANTO_FOREIGN    H = (S1 - K / S2)^+
    OUTPERFORMANCE    H = (max(S1, S2) - K)^+
    SPREAD            H = (S1 - S2 - K)^+
"""

from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class PayoffKind(str, Enum):
    """Claim type; values double as CLI names."""
    DIGITAL = "digital"
    QUANTO_DOMESTIC = "quanto-dom"
    QUANTO_FOREIGN = "quanto-for"
    OUTPERFORMANCE = "outperf"
    SPREAD = "spread"


class Payoff(BaseModel):
    """A claim type with its strike K > 0."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: PayoffKind = Field(description="Claim type")
    strike: float = Field(gt=0, description="Strike K")


@dataclass(frozen=True)
class RegularityReport:
    """Whether the weighted payoff can be flat on a set of positive measure."""
    satisfied: bool
    reason: str = ""
