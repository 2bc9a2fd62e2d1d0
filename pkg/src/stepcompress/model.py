"""Core domain types: problems, solutions, run configuration, cost units."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction


class CommentStrategy(Enum):
    DISTINCT = "distinct"
    REPLACEMENT = "replacement"
    SKIPPING = "skipping"


class LabelMode(Enum):
    HARD = "hard"
    SOFT = "soft"
    BOTH = "both"


@dataclass(frozen=True)
class Problem:
    """A math problem with its canonical answer string."""

    id: str
    statement: str
    ground_truth_answer: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("problem id must be non-empty")
        if not self.statement:
            raise ValueError(f"problem {self.id}: statement must be non-empty")


@dataclass(frozen=True)
class Step:
    """One solution step: 1-based index plus its text (natural language
    before translation, code after)."""

    index: int
    text: str

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"step index must be >= 1, got {self.index}")


@dataclass
class Solution:
    problem_id: str
    steps: list[Step]
    final_answer: str
    is_correct: bool

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError(
                f"solution for {self.problem_id}: needs at least one step"
            )
        for position, step in enumerate(self.steps, start=1):
            if step.index != position:
                raise ValueError(
                    f"solution for {self.problem_id}: step indices must be "
                    f"contiguous from 1, got {step.index} at position {position}"
                )


@dataclass
class RunConfig:
    """Knobs for a full annotation run.

    Confidence bounds are both exclusive: a problem is kept when
    confidence_min < c < confidence_max.
    """

    n_solutions: int = 64
    confidence_min: float = 0.75
    confidence_max: float = 1.0
    comment_strategy: CommentStrategy = CommentStrategy.DISTINCT
    label_mode: LabelMode = LabelMode.BOTH
    sampling_temperature: float = 0.8
    sampling_top_p: float = 0.8
    sampling_max_tokens: int = 2048
    translation_temperature: float = 0.0
    translation_max_tokens: int = 2048
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_solutions < 1:
            raise ValueError("n_solutions must be >= 1")
        if not (0 <= self.confidence_min < self.confidence_max <= 1):
            raise ValueError(
                "confidence bounds must satisfy "
                "0 <= confidence_min < confidence_max <= 1, got "
                f"({self.confidence_min}, {self.confidence_max})"
            )
        for name in ("sampling_temperature", "sampling_top_p"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.sampling_max_tokens < 1 or self.translation_max_tokens < 1:
            raise ValueError("max token budgets must be >= 1")


@dataclass(frozen=True)
class GenerationCost:
    """Generation effort in whole units: one full-solution (or completion)
    generation counts as one unit, independent of token length."""

    units: int = 0

    def __post_init__(self) -> None:
        if self.units < 0:
            raise ValueError("generation cost cannot be negative")

    def __add__(self, other: "GenerationCost") -> "GenerationCost":
        return GenerationCost(self.units + other.units)


@dataclass
class ProblemBundle:
    """A problem together with its (possibly empty) solution set."""

    problem: Problem
    solutions: list[Solution] = field(default_factory=list)


def model_confidence(solutions: list[Solution]) -> Fraction:
    """Fraction of correct solutions, exact.

    This is the root q of the compressed trie for the same solution set.
    """
    if not solutions:
        raise ValueError("model confidence is undefined for no solutions")
    correct = sum(1 for solution in solutions if solution.is_correct)
    return Fraction(correct, len(solutions))


@dataclass
class FilterDecision:
    problem_id: str
    confidence: Fraction
    n_solutions: int
    retained: bool
    reason: str


def filter_problems(
    corpus: list[ProblemBundle], config: RunConfig
) -> tuple[list[ProblemBundle], list[FilterDecision]]:
    """Keep problems whose confidence lies strictly inside the configured
    band; everything else is reported with its confidence and a reason.

    Comparisons are exact: the confidence is a Fraction and the float bounds
    compare exactly against it, so c == confidence_min is always rejected.
    """
    retained: list[ProblemBundle] = []
    report: list[FilterDecision] = []
    for bundle in corpus:
        confidence = model_confidence(bundle.solutions)
        if confidence <= config.confidence_min:
            reason = (
                f"confidence {confidence} <= lower bound {config.confidence_min}"
            )
            keep = False
        elif confidence >= config.confidence_max:
            reason = (
                f"confidence {confidence} >= upper bound {config.confidence_max}"
            )
            keep = False
        else:
            reason = "retained"
            keep = True
        report.append(
            FilterDecision(
                problem_id=bundle.problem.id,
                confidence=confidence,
                n_solutions=len(bundle.solutions),
                retained=keep,
                reason=reason,
            )
        )
        if keep:
            retained.append(bundle)
    return retained, report
