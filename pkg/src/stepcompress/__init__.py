"""Step-level value annotation by solution compression.

Sampled step-by-step solutions are translated to restricted Python,
canonicalized so equivalent steps collide, merged into one prefix tree per
problem, and scored in a single pass: each node's value is the exact success
rate of the solutions flowing through it. Labeled samples then cost O(N)
generations per problem instead of the O(N * M * K) of per-step Monte Carlo
completion.
"""

from .labeler import (
    LabeledSample,
    LabeledStep,
    bce_loss,
    hard_label,
    label_paths,
    mse_loss,
    soft_label,
)
from .model import (
    CommentStrategy,
    FilterDecision,
    GenerationCost,
    LabelMode,
    Problem,
    ProblemBundle,
    RunConfig,
    Solution,
    Step,
    filter_problems,
    model_confidence,
)
from .normalize import (
    AliasTable,
    CanonicalizedSolution,
    StepKey,
    StepKeyKind,
    canonical_keys,
    normalize_solution,
)
from .parser import Block, ParseError, parse_block, pretty_print
from .pipeline import Pipeline, check_answer, ingest_corpus
from .synth import SyntheticWorld, load_world, true_q, validate_estimates
from .translator import (
    AlignmentError,
    ChatClient,
    FixtureStore,
    build_prompt,
    parse_tagged_response,
)
from .trie import (
    KeyedSolution,
    PathSample,
    SolutionTrie,
    build_trie,
    compression_rate,
    compute_q,
    dump_tree,
    extract_paths,
)

__version__ = "0.1.0"

__all__ = [
    "AliasTable",
    "AlignmentError",
    "Block",
    "CanonicalizedSolution",
    "ChatClient",
    "CommentStrategy",
    "FilterDecision",
    "FixtureStore",
    "GenerationCost",
    "KeyedSolution",
    "LabelMode",
    "LabeledSample",
    "LabeledStep",
    "ParseError",
    "PathSample",
    "Pipeline",
    "Problem",
    "ProblemBundle",
    "RunConfig",
    "Solution",
    "SolutionTrie",
    "Step",
    "StepKey",
    "StepKeyKind",
    "SyntheticWorld",
    "bce_loss",
    "build_prompt",
    "build_trie",
    "canonical_keys",
    "check_answer",
    "compression_rate",
    "compute_q",
    "dump_tree",
    "extract_paths",
    "filter_problems",
    "hard_label",
    "ingest_corpus",
    "label_paths",
    "load_world",
    "model_confidence",
    "mse_loss",
    "normalize_solution",
    "parse_block",
    "parse_tagged_response",
    "pretty_print",
    "soft_label",
    "true_q",
    "validate_estimates",
    "__version__",
]
