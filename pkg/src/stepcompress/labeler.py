"""Step labels and training losses.

Hard labels call a step good when anything correct ever flowed through it
(q > 0); soft labels keep q itself. Both losses are means over the steps of
one sample; a summed form would differ by exactly the step count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .trie import PathSample

_CLAMP_EPS = 1e-12


def _check_unit_interval(value: Fraction | float, what: str) -> None:
    if value < 0 or value > 1:
        raise ValueError(f"{what} must lie in [0, 1], got {value}")


def hard_label(q: Fraction | float) -> int:
    _check_unit_interval(q, "q")
    return 1 if q > 0 else 0


def soft_label(q: Fraction | float) -> Fraction:
    _check_unit_interval(q, "q")
    return Fraction(q)


def _check_pair(predictions: list[float], targets: list[float]) -> None:
    if not predictions:
        raise ValueError("loss needs at least one step")
    if len(predictions) != len(targets):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions vs "
            f"{len(targets)} targets"
        )
    for value in predictions:
        _check_unit_interval(value, "prediction")
    for value in targets:
        _check_unit_interval(value, "target")


def bce_loss(predictions: list[float], targets: list[float]) -> float:
    """Mean binary cross entropy; predictions are clamped away from 0 and 1
    by 1e-12 so endpoints stay finite."""
    _check_pair(predictions, targets)
    total = 0.0
    for p, y in zip(predictions, targets):
        p = min(max(float(p), _CLAMP_EPS), 1.0 - _CLAMP_EPS)
        y = float(y)
        total -= y * math.log(p) + (1.0 - y) * math.log(1.0 - p)
    return total / len(predictions)


def mse_loss(predictions: list[float], targets: list[float]) -> float:
    """Mean squared error (non-negative)."""
    _check_pair(predictions, targets)
    total = 0.0
    for p, y in zip(predictions, targets):
        total += (float(y) - float(p)) ** 2
    return total / len(predictions)


@dataclass(frozen=True)
class LabeledStep:
    text: str
    q: Fraction
    hard: int
    soft: Fraction


@dataclass
class LabeledSample:
    problem_id: str
    steps: list[LabeledStep]
    weight: int


def label_paths(paths: list[PathSample]) -> list[LabeledSample]:
    """Turn extracted trie paths into labeled samples, both label kinds
    populated."""
    samples: list[LabeledSample] = []
    for path in paths:
        steps = [
            LabeledStep(
                text=step.text,
                q=step.q,
                hard=hard_label(step.q),
                soft=soft_label(step.q),
            )
            for step in path.steps
        ]
        samples.append(
            LabeledSample(
                problem_id=path.problem_id, steps=steps, weight=path.weight
            )
        )
    return samples
