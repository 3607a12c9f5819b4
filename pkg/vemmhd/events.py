from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Dict, Literal


# Payloads handed to the optional ``on_step`` callback of the Oseen driver.

EventType = Literal["oseen_step"]


@dataclass(frozen=True)
class OseenStepEvent:
    iteration: int
    increment: float
    velocity_increment: float
    magnetic_increment: float
    pressure_increment: float
    type: Literal["oseen_step"] = "oseen_step"


def asdict(event: OseenStepEvent) -> Dict[str, Any]:
    """Flat dict of an event, ready for a log line or a CSV row."""
    return dataclasses.asdict(event)
