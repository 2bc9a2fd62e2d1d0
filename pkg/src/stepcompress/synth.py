"""Synthetic solution worlds with known step values.

A world is a finite tree: internal nodes carry branch probabilities, leaves
carry a success probability. Sampling a solution walks root to leaf with a
seeded Mersenne Twister (`random.Random`), recording the symbol sequence,
then draws correctness at the leaf. Because the tree is finite, the true
value of every prefix is an exact rational, which gives an external oracle
for the trie's one-pass estimates and a cost yardstick against per-step
Monte Carlo completion.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .model import GenerationCost
from .normalize import StepKey, StepKeyKind
from .trie import KeyedSolution, SolutionTrie, TrieNode, build_trie, compute_q

_MAX_DEPTH = 64


class WorldError(Exception):
    pass


@dataclass
class WorldNode:
    symbol: str
    probability: Fraction
    success: Fraction | None = None
    children: list[WorldNode] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class SyntheticWorld:
    name: str
    children: list[WorldNode]

    def is_deterministic(self) -> bool:
        """True when sampling has a single possible outcome: at most one
        child everywhere and every leaf success exactly 0 or 1."""

        def walk(nodes: list[WorldNode]) -> bool:
            if len(nodes) > 1:
                return False
            for node in nodes:
                if node.is_leaf:
                    if node.success not in (Fraction(0), Fraction(1)):
                        return False
                elif not walk(node.children):
                    return False
            return True

        return walk(self.children)

    def node_at(self, prefix: tuple[str, ...]) -> WorldNode:
        nodes = self.children
        node: WorldNode | None = None
        for symbol in prefix:
            node = next((n for n in nodes if n.symbol == symbol), None)
            if node is None:
                raise WorldError(f"no node for prefix {prefix!r}")
            nodes = node.children
        if node is None:
            raise WorldError("empty prefix has no node")
        return node


def _as_fraction(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise WorldError(f"{where}: expected a number, got {value!r}")
    return Fraction(value)


def _parse_node(data: dict, path: str, depth: int) -> WorldNode:
    if depth > _MAX_DEPTH:
        raise WorldError(f"{path}: deeper than {_MAX_DEPTH} levels")
    if not isinstance(data, dict):
        raise WorldError(f"{path}: node must be an object")
    symbol = data.get("symbol")
    if not isinstance(symbol, str) or not symbol:
        raise WorldError(f"{path}: missing symbol")
    probability = _as_fraction(data.get("probability", 1), f"{path}/probability")
    if not 0 <= probability <= 1:
        raise WorldError(f"{path}: probability {probability} outside [0, 1]")
    raw_children = data.get("children", [])
    raw_success = data.get("success")
    if raw_children and raw_success is not None:
        raise WorldError(f"{path}: node has both children and success")
    if not raw_children:
        if raw_success is None:
            raise WorldError(f"{path}: leaf needs a success probability")
        success = _as_fraction(raw_success, f"{path}/success")
        if not 0 <= success <= 1:
            raise WorldError(f"{path}: success {success} outside [0, 1]")
        return WorldNode(symbol=symbol, probability=probability, success=success)
    children = _parse_children(raw_children, f"{path}/{symbol}", depth + 1)
    return WorldNode(symbol=symbol, probability=probability, children=children)


def _parse_children(raw: list, path: str, depth: int) -> list[WorldNode]:
    if not isinstance(raw, list) or not raw:
        raise WorldError(f"{path}: children must be a non-empty list")
    children = [_parse_node(item, path, depth) for item in raw]
    symbols = [child.symbol for child in children]
    if len(set(symbols)) != len(symbols):
        raise WorldError(f"{path}: duplicate child symbols")
    total = sum((child.probability for child in children), Fraction(0))
    if total != 1:
        raise WorldError(f"{path}: branch probabilities sum to {total}, not 1")
    return children


def world_from_dict(data: dict, name: str = "world") -> SyntheticWorld:
    if not isinstance(data, dict):
        raise WorldError("world document must be an object")
    children = _parse_children(data.get("children", []), name, 1)
    return SyntheticWorld(name=str(data.get("name", name)), children=children)


def load_world(path: str | Path) -> SyntheticWorld:
    """Load a world JSON file. Decimal probabilities in the file are parsed
    straight to Fraction, so `0.3` means exactly 3/10."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise WorldError(f"cannot read world file {path}: {exc}") from exc
    try:
        data = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise WorldError(f"world file {path} is not valid JSON: {exc}") from exc
    return world_from_dict(data, name=Path(path).stem)


# --------------------------------------------------------------------------
# Sampling and exact values
# --------------------------------------------------------------------------

def _walk_to_leaf(
    rng: random.Random, children: list[WorldNode], prefix: list[str]
) -> WorldNode:
    nodes = children
    while True:
        if len(nodes) == 1:
            node = nodes[0]
        else:
            draw = rng.random()
            cumulative = 0.0
            node = nodes[-1]
            for candidate in nodes:
                cumulative += float(candidate.probability)
                if draw < cumulative:
                    node = candidate
                    break
        prefix.append(node.symbol)
        if node.is_leaf:
            return node
        nodes = node.children


def generate_solutions(
    world: SyntheticWorld, n: int, seed: int = 0
) -> tuple[list[tuple[tuple[str, ...], bool]], GenerationCost]:
    """Sample n root-to-leaf walks. Cost is one unit per solution, the same
    accounting the annotator is charged under."""
    rng = random.Random(seed)
    out: list[tuple[tuple[str, ...], bool]] = []
    for _ in range(n):
        prefix: list[str] = []
        leaf = _walk_to_leaf(rng, world.children, prefix)
        correct = rng.random() < float(leaf.success)
        out.append((tuple(prefix), correct))
    return out, GenerationCost(units=n)


def true_q(world: SyntheticWorld, prefix: tuple[str, ...]) -> Fraction:
    """Exact probability that a walk continuing from `prefix` ends correct.
    The empty prefix gives the overall success probability."""

    def value(node: WorldNode) -> Fraction:
        if node.is_leaf:
            assert node.success is not None
            return node.success
        return sum(
            (child.probability * value(child) for child in node.children),
            Fraction(0),
        )

    if not prefix:
        return sum(
            (child.probability * value(child) for child in world.children),
            Fraction(0),
        )
    return value(world.node_at(prefix))


def solutions_to_keyed(
    samples: list[tuple[tuple[str, ...], bool]]
) -> list[KeyedSolution]:
    """Wrap sampled symbol walks as keyed solutions ready for the trie."""
    keyed = []
    for index, (symbols, correct) in enumerate(samples):
        keyed.append(
            KeyedSolution(
                solution_id=f"s{index:06d}",
                keys=[StepKey(StepKeyKind.CODE, symbol) for symbol in symbols],
                is_correct=correct,
                step_texts=list(symbols),
            )
        )
    return keyed


def build_world_trie(
    world: SyntheticWorld, n: int, seed: int = 0
) -> tuple[SolutionTrie, GenerationCost]:
    samples, cost = generate_solutions(world, n, seed=seed)
    trie = build_trie(solutions_to_keyed(samples), problem_id=world.name)
    compute_q(trie)
    return trie, cost


def mc_estimate(
    world: SyntheticWorld,
    samples: list[tuple[tuple[str, ...], bool]],
    completions_per_step: int = 8,
    seed: int = 1,
) -> tuple[dict[tuple[str, ...], Fraction], GenerationCost]:
    """Per-step Monte Carlo baseline: for every step prefix of every sampled
    solution, roll `completions_per_step` fresh continuations and pool the
    outcomes by prefix. Cost is one unit per continuation, i.e. steps times
    completions summed over solutions."""
    rng = random.Random(seed)
    successes: dict[tuple[str, ...], int] = {}
    draws: dict[tuple[str, ...], int] = {}
    units = 0
    for symbols, _ in samples:
        for length in range(1, len(symbols) + 1):
            prefix = symbols[:length]
            node = world.node_at(prefix)
            for _ in range(completions_per_step):
                units += 1
                if node.is_leaf:
                    leaf = node
                else:
                    tail: list[str] = []
                    leaf = _walk_to_leaf(rng, node.children, tail)
                hit = rng.random() < float(leaf.success)
                draws[prefix] = draws.get(prefix, 0) + 1
                if hit:
                    successes[prefix] = successes.get(prefix, 0) + 1
    estimates = {
        prefix: Fraction(successes.get(prefix, 0), count)
        for prefix, count in draws.items()
    }
    return estimates, GenerationCost(units=units)


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NodeCheck:
    prefix: tuple[str, ...]
    pass_total: int
    estimate: Fraction
    truth: Fraction
    bound: float
    ok: bool


@dataclass
class ValidationReport:
    world: str
    n_solutions: int
    sigma: float
    min_passes: int
    checks: list[NodeCheck]
    deterministic_exact: bool | None
    annotator_units: int
    mc_units: int

    @property
    def eligible(self) -> int:
        return len(self.checks)

    @property
    def within_bound(self) -> int:
        return sum(1 for check in self.checks if check.ok)

    @property
    def pass_fraction(self) -> Fraction:
        if not self.checks:
            return Fraction(1)
        return Fraction(self.within_bound, self.eligible)

    @property
    def cost_ratio(self) -> Fraction:
        return Fraction(self.mc_units, self.annotator_units)

    def summary_lines(self) -> list[str]:
        lines = [
            f"world: {self.world}",
            f"solutions sampled: {self.n_solutions}",
            f"nodes checked (>= {self.min_passes} passes): {self.eligible}",
            f"within {self.sigma:g} sigma: {self.within_bound}"
            f" ({float(self.pass_fraction):.4f})",
            f"annotation cost: {self.annotator_units} units",
            f"per-step monte carlo cost: {self.mc_units} units"
            f" (ratio {float(self.cost_ratio):g})",
        ]
        if self.deterministic_exact is not None:
            verdict = "exact" if self.deterministic_exact else "MISMATCH"
            lines.append(f"deterministic world check: {verdict}")
        return lines


def validate_estimates(
    world: SyntheticWorld,
    n: int,
    seed: int = 0,
    sigma: float = 4.0,
    min_passes: int = 100,
    completions_per_step: int = 8,
) -> ValidationReport:
    """Sample a corpus, build the trie, and compare every well-visited
    node's one-pass estimate against the exact tree value, with the binomial
    tolerance sigma * sqrt(p(1-p)/n + 1e-9). Also prices the per-step Monte
    Carlo alternative on the same corpus without running its full rollouts.
    """
    samples, annot_cost = generate_solutions(world, n, seed=seed)
    trie = build_trie(solutions_to_keyed(samples), problem_id=world.name)
    compute_q(trie)

    checks: list[NodeCheck] = []
    exact_ok: bool | None = None

    def visit(node: TrieNode, prefix: tuple[str, ...]) -> None:
        for child in node.sorted_children():
            child_prefix = prefix + (child.key.key,)
            truth = true_q(world, child_prefix)
            if child.pass_total >= min_passes:
                assert child.q_value is not None
                p = float(truth)
                bound = sigma * math.sqrt(
                    p * (1.0 - p) / child.pass_total + 1e-9
                )
                deviation = abs(float(child.q_value) - p)
                checks.append(
                    NodeCheck(
                        prefix=child_prefix,
                        pass_total=child.pass_total,
                        estimate=child.q_value,
                        truth=truth,
                        bound=bound,
                        ok=deviation <= bound,
                    )
                )
            visit(child, child_prefix)

    visit(trie.root, ())

    if world.is_deterministic():
        exact_ok = True

        def visit_exact(node: TrieNode, prefix: tuple[str, ...]) -> None:
            nonlocal exact_ok
            for child in node.sorted_children():
                child_prefix = prefix + (child.key.key,)
                if child.q_value != true_q(world, child_prefix):
                    exact_ok = False
                visit_exact(child, child_prefix)

        visit_exact(trie.root, ())

    mc_units = sum(len(symbols) * completions_per_step for symbols, _ in samples)
    return ValidationReport(
        world=world.name,
        n_solutions=n,
        sigma=sigma,
        min_passes=min_passes,
        checks=checks,
        deterministic_exact=exact_ok,
        annotator_units=annot_cost.units,
        mc_units=mc_units,
    )
