"""Horizontal-vertical analysis: aggregate comparison scores.

Each stage holds horizontal groups (e.g. comparisons across time) and
vertical groups (comparisons within a category). A stage scores the sum of
all its group sums; the whole analysis scores the sum of its stages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence


@dataclass
class ComparisonStage:
    horizontal_groups: list[list[float]] = field(default_factory=list)
    vertical_groups: list[list[float]] = field(default_factory=list)

    def __post_init__(self):
        for name in ("horizontal_groups", "vertical_groups"):
            for j, g in enumerate(getattr(self, name)):
                if len(g) == 0:
                    raise ValueError(f"{name}[{j}] is empty")

    @classmethod
    def from_json(cls, data: dict) -> "ComparisonStage":
        return cls([[float(v) for v in g] for g in data.get("horizontal", [])],
                   [[float(v) for v in g] for g in data.get("vertical", [])])


@dataclass
class Analysis:
    stages: list[ComparisonStage] = field(default_factory=list)

    @classmethod
    def from_json(cls, data) -> "Analysis":
        stages = data["stages"] if isinstance(data, dict) else data
        return cls([ComparisonStage.from_json(s) for s in stages])


def group_sums(groups: Sequence[Sequence[float]]) -> list[float]:
    return [math.fsum(g) for g in groups]


def stage_score(stage: ComparisonStage) -> float:
    """Sum of horizontal group sums plus sum of vertical group sums."""
    return math.fsum(group_sums(stage.horizontal_groups)) + math.fsum(group_sums(stage.vertical_groups))


def total_score(analysis: Analysis) -> tuple[float, list[float]]:
    per_stage = [stage_score(s) for s in analysis.stages]
    return math.fsum(per_stage), per_stage
