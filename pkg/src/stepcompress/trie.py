"""Per-problem prefix tree over canonical step keys, with one-pass q values.

Solutions are inserted in canonical id order so the result is identical for
any input permutation. Nodes count every solution passing through
(pass_total / pass_correct) and, separately, the solutions that end at the
node (end_total / end_correct): a solution whose key sequence is a proper
prefix of another's terminates mid-tree, and both the q recursion and the
path extraction account for it. With no mid-tree endings this reduces to the
plain leaves-only picture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .model import CommentStrategy
from .numeric import format_fixed
from .normalize import COMMENT_SENTINEL, StepKey, StepKeyKind


class TrieError(Exception):
    pass


@dataclass
class KeyedSolution:
    """One solution reduced to its key sequence, before any comment
    strategy is applied."""

    solution_id: str
    keys: list[StepKey]
    is_correct: bool
    step_texts: list[str]

    def __post_init__(self) -> None:
        if len(self.keys) != len(self.step_texts):
            raise ValueError(
                f"solution {self.solution_id}: {len(self.keys)} keys vs "
                f"{len(self.step_texts)} texts"
            )


@dataclass(frozen=True)
class SkippedStep:
    position: int  # 1-based position in the original step sequence
    text: str


@dataclass
class PreparedSolution:
    solution_id: str
    keys: list[StepKey]
    is_correct: bool
    step_texts: list[str]
    original_length: int
    skipped: list[SkippedStep] = field(default_factory=list)


def apply_strategy(
    solutions: list[KeyedSolution], strategy: CommentStrategy
) -> tuple[list[PreparedSolution], list[tuple[str, str]]]:
    """Rewrite key sequences according to the comment handling strategy.

    distinct: comment keys pass through (distinct texts, distinct nodes).
    replacement: every comment key becomes the fixed sentinel key.
    skipping: comment steps are dropped, with an alignment record kept so
    extraction can re-expand them; a solution left empty is rejected.
    """
    prepared: list[PreparedSolution] = []
    rejected: list[tuple[str, str]] = []
    for solution in solutions:
        if not solution.keys:
            rejected.append((solution.solution_id, "empty key sequence"))
            continue
        if strategy is CommentStrategy.DISTINCT:
            prepared.append(
                PreparedSolution(
                    solution.solution_id,
                    list(solution.keys),
                    solution.is_correct,
                    list(solution.step_texts),
                    original_length=len(solution.keys),
                )
            )
            continue
        if strategy is CommentStrategy.REPLACEMENT:
            keys = [
                StepKey(StepKeyKind.COMMENT_ONLY, COMMENT_SENTINEL)
                if key.kind is StepKeyKind.COMMENT_ONLY
                else key
                for key in solution.keys
            ]
            prepared.append(
                PreparedSolution(
                    solution.solution_id,
                    keys,
                    solution.is_correct,
                    list(solution.step_texts),
                    original_length=len(solution.keys),
                )
            )
            continue
        # skipping
        keys: list[StepKey] = []
        texts: list[str] = []
        skipped: list[SkippedStep] = []
        for position, (key, text) in enumerate(
            zip(solution.keys, solution.step_texts), start=1
        ):
            if key.kind is StepKeyKind.COMMENT_ONLY:
                skipped.append(SkippedStep(position=position, text=text))
            else:
                keys.append(key)
                texts.append(text)
        if not keys:
            rejected.append(
                (solution.solution_id, "all steps comment-only under skipping")
            )
            continue
        prepared.append(
            PreparedSolution(
                solution.solution_id,
                keys,
                solution.is_correct,
                texts,
                original_length=len(solution.keys),
                skipped=skipped,
            )
        )
    return prepared, rejected


@dataclass
class TrieNode:
    key: StepKey
    children: dict[StepKey, "TrieNode"] = field(default_factory=dict)
    pass_total: int = 0
    pass_correct: int = 0
    end_total: int = 0
    end_correct: int = 0
    q_value: Fraction | None = None
    origin_steps: list[tuple[str, int]] = field(default_factory=list)
    rep_text: str = ""
    end_solution_ids: list[str] = field(default_factory=list)

    def is_leaf(self) -> bool:
        return not self.children

    def sorted_children(self) -> list["TrieNode"]:
        return [
            self.children[key]
            for key in sorted(self.children, key=lambda k: k.sort_key)
        ]


@dataclass
class SolutionTrie:
    problem_id: str
    root: TrieNode
    strategy: CommentStrategy
    raw_step_count: int
    node_count: int
    solutions_inserted: int
    skipped_by_solution: dict[str, list[SkippedStep]] = field(default_factory=dict)


def build_trie(
    keyed_solutions: list[KeyedSolution],
    strategy: CommentStrategy | None = None,
    problem_id: str = "",
) -> SolutionTrie:
    """Merge solutions into a prefix tree, canonical id order.

    Raises TrieError when a solution has no insertable steps; callers that
    want a rejection report instead should screen with apply_strategy first.
    """
    strategy = strategy or CommentStrategy.DISTINCT
    prepared, rejected = apply_strategy(keyed_solutions, strategy)
    if rejected:
        solution_id, reason = rejected[0]
        raise TrieError(f"solution {solution_id}: {reason}")

    prepared.sort(key=lambda solution: solution.solution_id)
    root = TrieNode(key=StepKey(StepKeyKind.CODE, "<root>"))
    node_count = 0
    skipped_by_solution: dict[str, list[SkippedStep]] = {}
    for solution in prepared:
        node = root
        node.pass_total += 1
        node.pass_correct += int(solution.is_correct)
        for position, (key, text) in enumerate(
            zip(solution.keys, solution.step_texts), start=1
        ):
            child = node.children.get(key)
            if child is None:
                child = TrieNode(key=key, rep_text=text)
                node.children[key] = child
                node_count += 1
            child.pass_total += 1
            child.pass_correct += int(solution.is_correct)
            child.origin_steps.append((solution.solution_id, position))
            node = child
        node.end_total += 1
        node.end_correct += int(solution.is_correct)
        node.end_solution_ids.append(solution.solution_id)
        if solution.skipped:
            skipped_by_solution[solution.solution_id] = solution.skipped

    raw_step_count = sum(solution.original_length for solution in prepared)
    return SolutionTrie(
        problem_id=problem_id,
        root=root,
        strategy=strategy,
        raw_step_count=raw_step_count,
        node_count=node_count,
        solutions_inserted=len(prepared),
        skipped_by_solution=skipped_by_solution,
    )


def compute_q(trie: SolutionTrie) -> SolutionTrie:
    """Annotate every node with its exact q in a single bottom-up pass.

    A node's value is the count-weighted mean of its children's q plus its
    own ending solutions; at the root this is exactly the model confidence
    of the inserted set.
    """
    if trie.root.pass_total == 0:
        raise TrieError("cannot compute q on an empty trie")

    def visit(node: TrieNode) -> tuple[Fraction, int]:
        total_value = Fraction(node.end_correct)
        total_count = node.end_total
        for child in node.sorted_children():
            child_q, child_count = visit(child)
            total_value += child_q * child_count
            total_count += child_count
        node.q_value = total_value / total_count
        return node.q_value, total_count

    visit(trie.root)
    return trie


@dataclass(frozen=True)
class PathStep:
    key: StepKey
    text: str
    q: Fraction


@dataclass
class PathSample:
    """One extracted root-to-terminal path: a training sample."""

    problem_id: str
    steps: list[PathStep]
    weight: int
    solution_id: str  # representative ender, first in canonical order

    @property
    def sort_key(self) -> tuple:
        return tuple(step.key.sort_key for step in self.steps)


def extract_paths(trie: SolutionTrie) -> list[PathSample]:
    """One sample per node where at least one solution ends, weighted by how
    many end there. Under the skipping strategy, the representative ender's
    comment steps are re-expanded in place with the q of the preceding
    emitted step (root q for a leading comment)."""
    if trie.root.q_value is None:
        compute_q(trie)
    root_q = trie.root.q_value
    assert root_q is not None

    samples: list[PathSample] = []

    def visit(node: TrieNode, prefix: list[PathStep]) -> None:
        if node.end_total > 0:
            rep = node.end_solution_ids[0]
            steps = _expand_path(trie, prefix, rep, root_q)
            samples.append(
                PathSample(
                    problem_id=trie.problem_id,
                    steps=steps,
                    weight=node.end_total,
                    solution_id=rep,
                )
            )
        for child in node.sorted_children():
            assert child.q_value is not None
            prefix.append(PathStep(key=child.key, text=child.rep_text, q=child.q_value))
            visit(child, prefix)
            prefix.pop()

    visit(trie.root, [])
    samples.sort(key=lambda sample: sample.sort_key)
    return samples


def _expand_path(
    trie: SolutionTrie,
    prefix: list[PathStep],
    solution_id: str,
    root_q: Fraction,
) -> list[PathStep]:
    skipped = trie.skipped_by_solution.get(solution_id, [])
    if not skipped:
        return list(prefix)
    total = len(prefix) + len(skipped)
    by_position = {entry.position: entry for entry in skipped}
    steps: list[PathStep] = []
    node_iter = iter(prefix)
    for position in range(1, total + 1):
        entry = by_position.get(position)
        if entry is not None:
            inherited = steps[-1].q if steps else root_q
            steps.append(
                PathStep(
                    key=StepKey(StepKeyKind.COMMENT_ONLY, COMMENT_SENTINEL),
                    text=entry.text,
                    q=inherited,
                )
            )
        else:
            steps.append(next(node_iter))
    return steps


def compression_rate(trie: SolutionTrie) -> Fraction:
    """Distinct nodes over raw (pre-strategy) step count, in (0, 1]."""
    if trie.raw_step_count == 0:
        raise TrieError("compression rate undefined: no raw steps")
    return Fraction(trie.node_count, trie.raw_step_count)


def dump_tree(trie: SolutionTrie) -> str:
    """Text rendering, one node per line: key | total | correct | q."""
    lines: list[str] = []

    def line(node: TrieNode, depth: int, label: str) -> None:
        q_text = "?" if node.q_value is None else format_fixed(node.q_value)
        lines.append(
            f"{'  ' * depth}{label} | {node.pass_total} | "
            f"{node.pass_correct} | {q_text}"
        )

    def visit(node: TrieNode, depth: int) -> None:
        for child in node.sorted_children():
            line(child, depth, child.key.key)
            visit(child, depth + 1)

    line(trie.root, 0, "<root>")
    visit(trie.root, 1)
    return "\n".join(lines)
