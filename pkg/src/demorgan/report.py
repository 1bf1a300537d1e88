"""Structured analysis reports.

A report is a plain JSON-compatible document: the echoed input (enough to
re-run the exact analysis), the verdict or simulation results with their
evidence, the tool version, and a timing field.  Two runs of the same
analysis produce byte-identical JSON except for ``timing_ms``; numbers are
serialized with full round-trip precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .birthdeath import Classification
from .convergence import Verdict
from .walk import RWClassification, SimulationReport

SCHEMA_VERSION = 1
TOOL_NAME = "demorgan"


def _tool_info() -> dict[str, Any]:
    from . import __version__

    return {"name": TOOL_NAME, "version": __version__}


@dataclass
class Report:
    mode: str  # series | bdp | rwalk | simulate | iterlog
    input: dict[str, Any]
    result: dict[str, Any]
    timing_ms: float | None = None
    schema_version: int = SCHEMA_VERSION
    tool: dict[str, Any] = field(default_factory=_tool_info)

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        doc = {
            "schema_version": self.schema_version,
            "tool": self.tool,
            "mode": self.mode,
            "input": self.input,
            "result": self.result,
        }
        if include_timing:
            doc["timing_ms"] = self.timing_ms
        return doc

    def to_json(self, indent: int | None = 2, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing=include_timing), indent=indent)


def verdict_to_dict(v: Verdict) -> dict[str, Any]:
    return {
        "decision": v.decision.value,
        "level": v.level,
        "window": list(v.window),
        "s_min": v.s_min,
        "s_max": v.s_max,
        "margin": v.margin,
        "dropped_samples": v.dropped,
        "note": v.note,
        "samples": [[p.n, p.value, p.usable] for p in v.samples],
        "trace": [
            {
                "level": r.level,
                "window": list(r.window),
                "decision": r.decision.value,
                "s_min": r.s_min,
                "s_max": r.s_max,
                "usable": r.usable,
                "dropped": r.dropped,
                "escalated": r.escalated,
                "guard": None if r.guard is None else {
                    "passed": r.guard.passed,
                    "growth": r.guard.growth,
                    "required": r.guard.required,
                    "n_lo": r.guard.n_lo,
                    "n_hi": r.guard.n_hi,
                },
            }
            for r in v.trace
        ],
    }


def classification_to_dict(c: Classification) -> dict[str, Any]:
    return {
        "decision": c.decision.value,
        "series_verdict": verdict_to_dict(c.series_verdict),
    }


def rw_classification_to_dict(c: RWClassification) -> dict[str, Any]:
    return {
        "decision": c.decision.value,
        "chain": classification_to_dict(c.chain),
    }


def simulation_to_dict(r: SimulationReport) -> dict[str, Any]:
    return {
        "n_paths": r.n_paths,
        "horizon": r.horizon,
        "seed": r.seed,
        "returned_paths": r.returned_paths,
        "returned_fraction": r.returned_fraction,
        "mean_first_return": r.mean_first_return,
        "max_excursion": r.max_excursion,
        "final_positions": {
            "mean": r.final_positions.mean,
            "median": r.final_positions.median,
            "min": r.final_positions.min,
            "max": r.final_positions.max,
        },
    }
