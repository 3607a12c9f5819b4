from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from vemmhd.forms import ModelParams

Kind = Literal["hartmann", "convergence"]


class ExpectedRates(BaseModel):
    """Inclusive bounds on the finest-pair observed rates; None means unchecked."""

    e_u0: Optional[List[float]] = None
    e_u1: Optional[List[float]] = None
    e_b0: Optional[List[float]] = None
    e_b1: Optional[List[float]] = None
    e_p0_min: Optional[float] = None

    def violations(self, rates: Dict[str, Optional[float]]) -> List[str]:
        """Human-readable list of rates outside their bounds (missing rates count as violations)."""
        out: List[str] = []
        for norm in ("e_u0", "e_u1", "e_b0", "e_b1"):
            bounds = getattr(self, norm)
            if bounds is None:
                continue
            lo, hi = bounds
            rate = rates.get("rate_" + norm[2:])
            if rate is None or not lo <= rate <= hi:
                out.append(f"{norm} rate {rate} outside [{lo}, {hi}]")
        if self.e_p0_min is not None:
            rate = rates.get("rate_p0")
            if rate is None or rate < self.e_p0_min:
                out.append(f"e_p0 rate {rate} below {self.e_p0_min}")
        return out


class Preset(BaseModel):
    name: str
    description: str
    kind: Kind
    params: ModelParams = Field(default_factory=ModelParams)
    k: int = Field(default=1, ge=1)
    family: Literal["tri", "quad", "perturbed_quad", "voronoi"] = "quad"
    levels: List[int] = Field(default_factory=lambda: [4, 8, 16])
    G: float = Field(default=0.1, ge=0)
    expected: ExpectedRates = Field(default_factory=ExpectedRates)
