"""Staged annotation pipeline with content-addressed caching.

Stages run in a fixed order (ingest, sample, filter, translate, normalize,
compress, label), each reading the previous stage's artifact from the output
directory and writing its own. A manifest keyed by config fingerprint plus
input-file hashes lets a rerun skip everything that is already up to date,
which doubles as crash resume.

Every artifact is deterministic: problems are ordered by id, solutions by
their zero-padded ids, paths by their key sequences, and all fractional
numbers are rendered as exact 6-digit decimals through the package's own
JSON writer (floats never pass through `json.dumps`). Wall-clock timings go
to a separate timings.json so the data artifacts stay byte-stable.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from fractions import Fraction
from pathlib import Path

from .config import AppConfig
from .model import (
    LabelMode,
    Problem,
    ProblemBundle,
    Solution,
    Step,
    filter_problems,
    model_confidence,
)
from .labeler import label_paths
from .normalize import StepKey, StepKeyKind, canonical_keys
from .numeric import answers_match, format_fixed, serialize_rational
from .translator import (
    AlignmentError,
    ChatClient,
    FixtureStore,
    sample_solutions,
    translate_many,
    translate_solution,
)
from .trie import (
    KeyedSolution,
    SolutionTrie,
    apply_strategy,
    build_trie,
    compression_rate,
    compute_q,
    dump_tree,
    extract_paths,
)

log = logging.getLogger(__name__)

STAGE_ORDER = [
    "ingest", "sample", "filter", "translate", "normalize", "compress", "label",
]


class PipelineError(Exception):
    pass


class IngestError(Exception):
    pass


def check_answer(final_answer: str, ground_truth: str) -> bool:
    """Answer equivalence: compare the extracted answers as exact rationals
    when both parse, else as collapsed case-sensitive strings."""
    return answers_match(final_answer, ground_truth)


# --------------------------------------------------------------------------
# Deterministic JSON
# --------------------------------------------------------------------------

class RawJson(str):
    """A pre-rendered JSON token (used for fixed-digit decimals) inserted
    into the output verbatim."""


def fixed6(value: Fraction) -> RawJson:
    return RawJson(format_fixed(value))


def render_json(value, indent: int | None = None) -> str:
    """Render to JSON with insertion-ordered keys and no floats allowed;
    fractional values must arrive pre-rendered as RawJson."""
    return _render(value, indent, 0)


def _render(value, indent: int | None, level: int) -> str:
    if isinstance(value, RawJson):
        return str(value)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        raise TypeError("render_json forbids floats; wrap the digits in RawJson")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = [
            (json.dumps(str(key)), _render(item, indent, level + 1))
            for key, item in value.items()
        ]
        return _join("{", "}", [f"{k}: {v}" for k, v in items], indent, level)
    if isinstance(value, (list, tuple)):
        rendered = [_render(item, indent, level + 1) for item in value]
        return _join("[", "]", rendered, indent, level)
    raise TypeError(f"render_json cannot serialize {type(value).__name__}")


def _join(opening: str, closing: str, parts: list[str], indent, level) -> str:
    if not parts:
        return opening + closing
    if indent is None:
        return opening + ", ".join(parts) + closing
    pad = " " * (indent * (level + 1))
    closing_pad = " " * (indent * level)
    body = (",\n" + pad).join(parts)
    return f"{opening}\n{pad}{body}\n{closing_pad}{closing}"


def write_jsonl(path: Path, rows: list[dict]) -> None:
    text = "".join(render_json(row) + "\n" for row in rows)
    path.write_text(text, encoding="utf-8")


def read_jsonl(path: Path) -> list[dict]:
    rows = []
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


# --------------------------------------------------------------------------
# Corpus ingest
# --------------------------------------------------------------------------

def solution_id_for(index: int) -> str:
    """Canonical id for the index-th solution of a problem (0-based in,
    1-based zero-padded out so lexicographic order equals numeric order)."""
    return f"s{index + 1:06d}"


def _require(condition: bool, line_number: int, byte_offset: int, message: str):
    if not condition:
        raise IngestError(f"line {line_number} (byte {byte_offset}): {message}")


def ingest_corpus(path: str | Path) -> list[ProblemBundle]:
    """Read a JSONL corpus of problems with optional solution sets.

    Required per line: problem_id, statement, ground_truth_answer. Optional:
    solutions, each with steps (non-empty list of strings), final_answer,
    and is_correct; a missing is_correct is derived by checking the final
    answer against the ground truth. Unknown fields are ignored. Malformed
    lines and duplicate problem ids are hard errors naming the line.
    """
    bundles: list[ProblemBundle] = []
    seen: dict[str, int] = {}
    byte_offset = 0
    with Path(path).open("rb") as handle:
        for line_number, raw_line in enumerate(handle, start=1):
            offset = byte_offset
            byte_offset += len(raw_line)
            line = raw_line.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(
                    f"line {line_number} (byte {offset}): invalid JSON: {exc}"
                ) from None
            _require(isinstance(record, dict), line_number, offset,
                     "each line must be a JSON object")
            problem_id = record.get("problem_id")
            _require(isinstance(problem_id, str) and bool(problem_id),
                     line_number, offset, "problem_id must be a non-empty string")
            if problem_id in seen:
                raise IngestError(
                    f"line {line_number} (byte {offset}): duplicate problem_id "
                    f"{problem_id!r} (first seen on line {seen[problem_id]})"
                )
            seen[problem_id] = line_number
            statement = record.get("statement")
            _require(isinstance(statement, str) and bool(statement.strip()),
                     line_number, offset, "statement must be a non-empty string")
            truth = record.get("ground_truth_answer")
            _require(isinstance(truth, str) and bool(truth.strip()),
                     line_number, offset,
                     "ground_truth_answer must be a non-empty string")
            problem = Problem(
                id=problem_id, statement=statement, ground_truth_answer=truth
            )
            raw_solutions = record.get("solutions", [])
            _require(isinstance(raw_solutions, list), line_number, offset,
                     "solutions must be a list")
            solutions: list[Solution] = []
            for sol_index, raw in enumerate(raw_solutions):
                where = f"solutions[{sol_index}]"
                _require(isinstance(raw, dict), line_number, offset,
                         f"{where} must be an object")
                steps_raw = raw.get("steps")
                _require(
                    isinstance(steps_raw, list) and bool(steps_raw)
                    and all(isinstance(s, str) and s.strip() for s in steps_raw),
                    line_number, offset,
                    f"{where}.steps must be a non-empty list of non-empty strings",
                )
                final_answer = raw.get("final_answer", "")
                _require(isinstance(final_answer, str), line_number, offset,
                         f"{where}.final_answer must be a string")
                is_correct = raw.get("is_correct")
                if is_correct is None:
                    is_correct = check_answer(final_answer, truth)
                _require(isinstance(is_correct, bool), line_number, offset,
                         f"{where}.is_correct must be a boolean")
                solutions.append(
                    Solution(
                        problem_id=problem_id,
                        steps=[
                            Step(index=i, text=text)
                            for i, text in enumerate(steps_raw, start=1)
                        ],
                        final_answer=final_answer,
                        is_correct=is_correct,
                    )
                )
            bundles.append(ProblemBundle(problem=problem, solutions=solutions))
    bundles.sort(key=lambda bundle: bundle.problem.id)
    return bundles


def bundle_to_record(bundle: ProblemBundle) -> dict:
    return {
        "problem_id": bundle.problem.id,
        "statement": bundle.problem.statement,
        "ground_truth_answer": bundle.problem.ground_truth_answer,
        "solutions": [
            {
                "solution_id": solution_id_for(index),
                "steps": [step.text for step in solution.steps],
                "final_answer": solution.final_answer,
                "is_correct": solution.is_correct,
            }
            for index, solution in enumerate(bundle.solutions)
        ],
    }


def record_to_bundle(record: dict) -> ProblemBundle:
    problem = Problem(
        id=record["problem_id"],
        statement=record["statement"],
        ground_truth_answer=record["ground_truth_answer"],
    )
    solutions = [
        Solution(
            problem_id=problem.id,
            steps=[
                Step(index=i, text=text)
                for i, text in enumerate(raw["steps"], start=1)
            ],
            final_answer=raw["final_answer"],
            is_correct=raw["is_correct"],
        )
        for raw in record["solutions"]
    ]
    return ProblemBundle(problem=problem, solutions=solutions)


# --------------------------------------------------------------------------
# Pipeline
# --------------------------------------------------------------------------

_ARTIFACTS = {
    "ingest": ["corpus.valid.jsonl"],
    "sample": ["corpus.sampled.jsonl"],
    "filter": ["filter.json"],
    "translate": ["translations.jsonl"],
    "normalize": ["keys.jsonl"],
    "compress": ["tries.jsonl"],
    "label": ["labeled.jsonl", "rejections.jsonl", "metrics.json"],
}

_STAGE_INPUTS = {
    "ingest": [],
    "sample": ["corpus.valid.jsonl"],
    "filter": ["corpus.sampled.jsonl"],
    "translate": ["corpus.sampled.jsonl", "filter.json"],
    "normalize": ["corpus.sampled.jsonl", "translations.jsonl"],
    "compress": ["corpus.sampled.jsonl", "filter.json", "keys.jsonl"],
    "label": [
        "corpus.sampled.jsonl", "filter.json", "translations.jsonl", "keys.jsonl",
    ],
}


def _file_sha(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_fingerprint(config: AppConfig) -> dict:
    run = config.run
    translator = config.translator
    return {
        "run": {
            "n_solutions": run.n_solutions,
            "confidence_min": RawJson(repr(run.confidence_min)),
            "confidence_max": RawJson(repr(run.confidence_max)),
            "comment_strategy": run.comment_strategy.value,
            "label_mode": run.label_mode.value,
            "sampling_temperature": RawJson(repr(run.sampling_temperature)),
            "sampling_top_p": RawJson(repr(run.sampling_top_p)),
            "sampling_max_tokens": run.sampling_max_tokens,
            "translation_temperature": RawJson(repr(run.translation_temperature)),
            "translation_max_tokens": run.translation_max_tokens,
            "seed": run.seed,
        },
        "translator": {
            "endpoint": translator.endpoint,
            "model": translator.model,
            "tag_scheme": translator.tag_scheme,
        },
        "aliases": {
            key: config.aliases.mapping[key]
            for key in sorted(config.aliases.mapping)
        },
    }


class Pipeline:
    def __init__(
        self,
        config: AppConfig,
        out_dir: str | Path,
        corpus_path: str | Path | None = None,
        fixtures_dir: str | Path | None = None,
        record: bool = False,
        force: bool = False,
    ):
        self.config = config
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.corpus_path = Path(corpus_path) if corpus_path else None
        self.fixtures_dir = Path(fixtures_dir) if fixtures_dir else None
        self.record = record
        self.force = force
        self.timings: dict[str, dict] = {}
        self._manifest = self._load_manifest()

    # -- manifest plumbing --------------------------------------------------

    def _manifest_path(self) -> Path:
        return self.out_dir / "manifest.json"

    def _load_manifest(self) -> dict:
        path = self._manifest_path()
        if path.exists():
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
                if isinstance(data, dict) and data.get("format") == 1:
                    return data
            except (json.JSONDecodeError, OSError):
                log.warning("unreadable manifest at %s; starting fresh", path)
        return {"format": 1, "stages": {}}

    def _save_manifest(self) -> None:
        self._manifest_path().write_text(
            render_json(self._manifest, indent=2) + "\n", encoding="utf-8"
        )

    def _artifact(self, name: str) -> Path:
        return self.out_dir / name

    def _input_hash(self, stage: str) -> str:
        inputs: dict[str, str] = {}
        if stage == "ingest":
            if self.corpus_path is not None:
                inputs["corpus"] = _file_sha(self.corpus_path)
        for name in _STAGE_INPUTS[stage]:
            path = self._artifact(name)
            if not path.exists():
                raise PipelineError(
                    f"stage {stage} needs {name}, which an earlier stage "
                    "should have produced"
                )
            inputs[name] = _file_sha(path)
        payload = {
            "stage": stage,
            "config": config_fingerprint(self.config),
            "inputs": inputs,
        }
        return hashlib.sha256(render_json(payload).encode("utf-8")).hexdigest()

    def _is_cached(self, stage: str, input_hash: str) -> bool:
        if self.force:
            return False
        entry = self._manifest["stages"].get(stage)
        if not entry or entry.get("hash") != input_hash:
            return False
        for name, expected_sha in entry.get("artifacts", {}).items():
            path = self._artifact(name)
            if not path.exists() or _file_sha(path) != expected_sha:
                return False
        return True

    # -- stage driver --------------------------------------------------------

    def run_until(self, last_stage: str) -> None:
        if last_stage not in STAGE_ORDER:
            raise PipelineError(f"unknown stage {last_stage!r}")
        for stage in STAGE_ORDER[: STAGE_ORDER.index(last_stage) + 1]:
            self._run_stage(stage)
        self._write_timings()

    def run(self) -> None:
        self.run_until("label")

    def _run_stage(self, stage: str) -> None:
        if stage == "ingest" and self.corpus_path is None:
            if self._artifact("corpus.valid.jsonl").exists():
                log.info("stage ingest: reusing existing corpus artifact")
                self.timings[stage] = {"cached": True}
                return
            raise PipelineError(
                "no input corpus given and no corpus.valid.jsonl present"
            )
        input_hash = self._input_hash(stage)
        if self._is_cached(stage, input_hash):
            log.info("stage %s: cached", stage)
            self.timings[stage] = {"cached": True}
            return
        log.info("stage %s: running", stage)
        started = time.perf_counter()
        getattr(self, f"_stage_{stage}")()
        elapsed = time.perf_counter() - started
        artifacts = {
            name: _file_sha(self._artifact(name)) for name in _ARTIFACTS[stage]
        }
        self._manifest["stages"][stage] = {
            "hash": input_hash, "artifacts": artifacts,
        }
        self._save_manifest()
        self.timings[stage] = {"seconds": round(elapsed, 6)}
        log.info("stage %s: done in %.3fs", stage, elapsed)

    def _write_timings(self) -> None:
        payload = {"stages": self.timings, "unix_time": time.time()}
        (self.out_dir / "timings.json").write_text(
            json.dumps(payload, indent=2) + "\n", encoding="utf-8"
        )

    # -- shared readers -------------------------------------------------------

    def _read_bundles(self, artifact: str) -> list[ProblemBundle]:
        return [
            record_to_bundle(row) for row in read_jsonl(self._artifact(artifact))
        ]

    def _retained_ids(self) -> list[str]:
        data = json.loads(
            self._artifact("filter.json").read_text(encoding="utf-8")
        )
        return list(data["retained"])

    def _make_client(self) -> ChatClient:
        translator = self.config.translator
        fixtures = (
            FixtureStore(self.fixtures_dir) if self.fixtures_dir is not None else None
        )
        return ChatClient(
            endpoint=translator.endpoint,
            model=translator.model,
            token_env=translator.token_env,
            max_retries=translator.max_retries,
            backoff_base=translator.backoff_base,
            timeout=translator.timeout,
            fixtures=fixtures,
            record=self.record,
        )

    # -- stages ---------------------------------------------------------------

    def _stage_ingest(self) -> None:
        assert self.corpus_path is not None
        bundles = ingest_corpus(self.corpus_path)
        if not bundles:
            raise PipelineError(f"corpus {self.corpus_path} holds no problems")
        write_jsonl(
            self._artifact("corpus.valid.jsonl"),
            [bundle_to_record(bundle) for bundle in bundles],
        )

    def _stage_sample(self) -> None:
        bundles = self._read_bundles("corpus.valid.jsonl")
        missing = [bundle for bundle in bundles if not bundle.solutions]
        if missing:
            client = self._make_client()
            for bundle in missing:
                truth = bundle.problem.ground_truth_answer
                bundle.solutions = sample_solutions(
                    client,
                    bundle.problem,
                    self.config.run.n_solutions,
                    self.config.run,
                    check=lambda answer, t=truth: check_answer(answer, t),
                )
                log.info(
                    "sampled %d solutions for %s",
                    len(bundle.solutions), bundle.problem.id,
                )
        write_jsonl(
            self._artifact("corpus.sampled.jsonl"),
            [bundle_to_record(bundle) for bundle in bundles],
        )

    def _stage_filter(self) -> None:
        bundles = self._read_bundles("corpus.sampled.jsonl")
        retained, decisions = filter_problems(bundles, self.config.run)
        payload = {
            "retained": [bundle.problem.id for bundle in retained],
            "decisions": [
                {
                    "problem_id": decision.problem_id,
                    "n_solutions": decision.n_solutions,
                    "confidence": fixed6(decision.confidence),
                    "confidence_exact": serialize_rational(decision.confidence),
                    "retained": decision.retained,
                    "reason": decision.reason,
                }
                for decision in decisions
            ],
        }
        self._artifact("filter.json").write_text(
            render_json(payload, indent=2) + "\n", encoding="utf-8"
        )

    def _stage_translate(self) -> None:
        bundles = {
            bundle.problem.id: bundle
            for bundle in self._read_bundles("corpus.sampled.jsonl")
        }
        retained = self._retained_ids()
        jobs = []
        for problem_id in retained:
            bundle = bundles[problem_id]
            for index, solution in enumerate(bundle.solutions):
                jobs.append((bundle.problem, solution, solution_id_for(index)))
        scheme = self.config.translator.tag_scheme

        def worker(job) -> dict:
            problem, solution, solution_id = job
            client = self._make_client()
            try:
                translated = translate_solution(
                    client, problem, solution, self.config.run,
                    solution_id=solution_id, scheme=scheme,
                )
            except AlignmentError as exc:
                return {
                    "problem_id": problem.id,
                    "solution_id": solution_id,
                    "imports": "",
                    "steps": [],
                    "error": {
                        "type": "alignment",
                        "index": exc.index,
                        "message": exc.reason,
                    },
                }
            return {
                "problem_id": problem.id,
                "solution_id": solution_id,
                "imports": translated.imports_block,
                "steps": [
                    {
                        "index": step.index,
                        "code": step.code,
                        "comment_only": step.comment_only,
                    }
                    for step in translated.code_steps
                ],
                "error": None,
            }

        rows = translate_many(
            jobs, worker, max_workers=self.config.translator.max_workers
        )
        write_jsonl(self._artifact("translations.jsonl"), rows)

    def _stage_normalize(self) -> None:
        bundles = {
            bundle.problem.id: bundle
            for bundle in self._read_bundles("corpus.sampled.jsonl")
        }
        rows = []
        for translation in read_jsonl(self._artifact("translations.jsonl")):
            if translation["error"] is not None:
                continue
            bundle = bundles[translation["problem_id"]]
            index = int(translation["solution_id"][1:]) - 1
            nl_texts = [step.text for step in bundle.solutions[index].steps]
            sources = [step["code"] for step in translation["steps"]]
            canonical = canonical_keys(sources, self.config.aliases)
            rows.append(
                {
                    "problem_id": translation["problem_id"],
                    "solution_id": translation["solution_id"],
                    "keys": [
                        {"kind": key.kind.value, "key": key.key}
                        for key in canonical.keys
                    ],
                    "texts": nl_texts,
                }
            )
        write_jsonl(self._artifact("keys.jsonl"), rows)

    def _keyed_by_problem(self) -> dict[str, list[KeyedSolution]]:
        bundles = {
            bundle.problem.id: bundle
            for bundle in self._read_bundles("corpus.sampled.jsonl")
        }
        grouped: dict[str, list[KeyedSolution]] = {}
        for row in read_jsonl(self._artifact("keys.jsonl")):
            problem_id = row["problem_id"]
            index = int(row["solution_id"][1:]) - 1
            is_correct = bundles[problem_id].solutions[index].is_correct
            keyed = KeyedSolution(
                solution_id=row["solution_id"],
                keys=[
                    StepKey(StepKeyKind(item["kind"]), item["key"])
                    for item in row["keys"]
                ],
                is_correct=is_correct,
                step_texts=list(row["texts"]),
            )
            grouped.setdefault(problem_id, []).append(keyed)
        return grouped

    def _build_tries(self) -> tuple[dict[str, SolutionTrie], list[dict]]:
        """Build one scored trie per retained problem; returns the tries and
        the compress-stage rejection rows (strategy drops, empty problems)."""
        strategy = self.config.run.comment_strategy
        grouped = self._keyed_by_problem()
        tries: dict[str, SolutionTrie] = {}
        rejections: list[dict] = []
        for problem_id in self._retained_ids():
            keyed = grouped.get(problem_id, [])
            prepared, rejected = apply_strategy(keyed, strategy)
            for solution_id, reason in rejected:
                rejections.append(
                    {
                        "stage": "compress",
                        "problem_id": problem_id,
                        "solution_id": solution_id,
                        "solutions_affected": 1,
                        "reason": reason,
                    }
                )
            kept_ids = {p.solution_id for p in prepared}
            kept = [k for k in keyed if k.solution_id in kept_ids]
            if not kept:
                rejections.append(
                    {
                        "stage": "compress",
                        "problem_id": problem_id,
                        "solution_id": None,
                        "solutions_affected": 0,
                        "reason": "no solutions left to merge",
                    }
                )
                continue
            trie = build_trie(kept, strategy=strategy, problem_id=problem_id)
            compute_q(trie)
            tries[problem_id] = trie
        return tries, rejections

    def _stage_compress(self) -> None:
        tries, rejections = self._build_tries()
        rejections_by_problem: dict[str, list[dict]] = {}
        for row in rejections:
            rejections_by_problem.setdefault(row["problem_id"], []).append(row)
        rows = []
        for problem_id in self._retained_ids():
            trie = tries.get(problem_id)
            local_rejects = [
                {"solution_id": row["solution_id"], "reason": row["reason"]}
                for row in rejections_by_problem.get(problem_id, [])
            ]
            if trie is None:
                rows.append(
                    {
                        "problem_id": problem_id,
                        "strategy": self.config.run.comment_strategy.value,
                        "solutions_inserted": 0,
                        "raw_step_count": 0,
                        "node_count": 0,
                        "compression_rate": None,
                        "compression_exact": None,
                        "rejected": local_rejects,
                        "tree": "",
                    }
                )
                continue
            rate = compression_rate(trie)
            rows.append(
                {
                    "problem_id": problem_id,
                    "strategy": trie.strategy.value,
                    "solutions_inserted": trie.solutions_inserted,
                    "raw_step_count": trie.raw_step_count,
                    "node_count": trie.node_count,
                    "compression_rate": fixed6(rate),
                    "compression_exact": serialize_rational(rate),
                    "rejected": local_rejects,
                    "tree": dump_tree(trie),
                }
            )
        write_jsonl(self._artifact("tries.jsonl"), rows)

    def _stage_label(self) -> None:
        mode = self.config.run.label_mode
        tries, compress_rejections = self._build_tries()
        labeled_rows: list[dict] = []
        labeled_stats: dict[str, tuple[int, int]] = {}
        for problem_id in self._retained_ids():
            trie = tries.get(problem_id)
            if trie is None:
                continue
            samples = label_paths(extract_paths(trie))
            weight_sum = 0
            for sample in samples:
                steps_payload = []
                for step in sample.steps:
                    item: dict = {"text": step.text, "q": fixed6(step.q)}
                    if mode in (LabelMode.HARD, LabelMode.BOTH):
                        item["hard"] = step.hard
                    if mode in (LabelMode.SOFT, LabelMode.BOTH):
                        item["soft"] = fixed6(step.soft)
                    steps_payload.append(item)
                labeled_rows.append(
                    {
                        "problem_id": sample.problem_id,
                        "weight": sample.weight,
                        "steps": steps_payload,
                    }
                )
                weight_sum += sample.weight
            labeled_stats[problem_id] = (len(samples), weight_sum)
        write_jsonl(self._artifact("labeled.jsonl"), labeled_rows)
        self._write_rejections(compress_rejections)
        self._write_metrics(tries, labeled_stats)

    # -- reporting artifacts ----------------------------------------------------

    def _translate_rejections(self) -> list[dict]:
        rows = []
        for translation in read_jsonl(self._artifact("translations.jsonl")):
            error = translation["error"]
            if error is None:
                continue
            rows.append(
                {
                    "stage": "translate",
                    "problem_id": translation["problem_id"],
                    "solution_id": translation["solution_id"],
                    "solutions_affected": 1,
                    "reason": f"{error['type']} at step {error['index']}: "
                              f"{error['message']}",
                }
            )
        return rows

    def _filter_rejections(self) -> list[dict]:
        data = json.loads(self._artifact("filter.json").read_text(encoding="utf-8"))
        rows = []
        for decision in data["decisions"]:
            if decision["retained"]:
                continue
            rows.append(
                {
                    "stage": "filter",
                    "problem_id": decision["problem_id"],
                    "solution_id": None,
                    "solutions_affected": decision["n_solutions"],
                    "reason": decision["reason"],
                }
            )
        return rows

    def _write_rejections(self, compress_rejections: list[dict]) -> None:
        rows = (
            self._filter_rejections()
            + self._translate_rejections()
            + compress_rejections
        )
        rows.sort(
            key=lambda row: (row["problem_id"], row["stage"],
                             row["solution_id"] or "")
        )
        write_jsonl(self._artifact("rejections.jsonl"), rows)

    def _write_metrics(
        self,
        tries: dict[str, SolutionTrie],
        labeled_stats: dict[str, tuple[int, int]],
    ) -> None:
        bundles = self._read_bundles("corpus.sampled.jsonl")
        retained = set(self._retained_ids())
        translate_errors: dict[str, int] = {}
        for row in self._translate_rejections():
            translate_errors[row["problem_id"]] = (
                translate_errors.get(row["problem_id"], 0) + 1
            )
        key_stats: dict[str, tuple[int, int, int]] = {}
        for row in read_jsonl(self._artifact("keys.jsonl")):
            total, comments, opaques = key_stats.get(row["problem_id"], (0, 0, 0))
            for item in row["keys"]:
                total += 1
                if item["kind"] == StepKeyKind.COMMENT_ONLY.value:
                    comments += 1
                elif item["kind"] == StepKeyKind.OPAQUE.value:
                    opaques += 1
            key_stats[row["problem_id"]] = (total, comments, opaques)

        problems_payload = []
        totals = {
            "solutions": 0, "rejected": 0, "labeled_samples": 0,
            "labeled_weight": 0, "raw_steps": 0, "nodes": 0,
            "keys": 0, "comment_keys": 0, "opaque_keys": 0, "units": 0,
        }
        for bundle in bundles:
            problem_id = bundle.problem.id
            n_solutions = len(bundle.solutions)
            confidence = model_confidence(bundle.solutions)
            kept = problem_id in retained
            trie = tries.get(problem_id)
            samples, weight = labeled_stats.get(problem_id, (0, 0))
            aligned_failures = translate_errors.get(problem_id, 0)
            if not kept:
                rejected = n_solutions
            else:
                inserted = trie.solutions_inserted if trie else 0
                rejected = n_solutions - inserted
                if weight != inserted:
                    raise PipelineError(
                        f"{problem_id}: labeled weight {weight} does not match "
                        f"inserted solutions {inserted}"
                    )
            totals["solutions"] += n_solutions
            totals["rejected"] += rejected
            totals["labeled_samples"] += samples
            totals["labeled_weight"] += weight
            totals["units"] += n_solutions
            key_total, key_comments, key_opaques = key_stats.get(
                problem_id, (0, 0, 0)
            )
            totals["keys"] += key_total
            totals["comment_keys"] += key_comments
            totals["opaque_keys"] += key_opaques
            entry: dict = {
                "problem_id": problem_id,
                "n_solutions": n_solutions,
                "confidence": fixed6(confidence),
                "confidence_exact": serialize_rational(confidence),
                "retained": kept,
                "translate_failures": aligned_failures,
                "solutions_rejected": rejected,
                "labeled_samples": samples,
                "labeled_weight": weight,
                "generation_units": n_solutions,
            }
            if trie is not None:
                rate = compression_rate(trie)
                totals["raw_steps"] += trie.raw_step_count
                totals["nodes"] += trie.node_count
                entry.update(
                    {
                        "raw_step_count": trie.raw_step_count,
                        "node_count": trie.node_count,
                        "compression_rate": fixed6(rate),
                        "compression_exact": serialize_rational(rate),
                    }
                )
            else:
                entry.update(
                    {
                        "raw_step_count": 0,
                        "node_count": 0,
                        "compression_rate": None,
                        "compression_exact": None,
                    }
                )
            entry["step_keys"] = key_total
            entry["comment_only_keys"] = key_comments
            entry["opaque_keys"] = key_opaques
            problems_payload.append(entry)

        if totals["labeled_weight"] + totals["rejected"] != totals["solutions"]:
            raise PipelineError(
                "solution accounting failed: "
                f"{totals['labeled_weight']} labeled + {totals['rejected']} "
                f"rejected != {totals['solutions']} inputs"
            )

        overall_rate = (
            Fraction(totals["nodes"], totals["raw_steps"])
            if totals["raw_steps"]
            else None
        )
        comment_fraction = (
            Fraction(totals["comment_keys"], totals["keys"])
            if totals["keys"]
            else None
        )
        payload = {
            "problems": problems_payload,
            "aggregate": {
                "problems_total": len(bundles),
                "problems_retained": len(retained),
                "solutions_total": totals["solutions"],
                "solutions_rejected": totals["rejected"],
                "labeled_samples": totals["labeled_samples"],
                "labeled_weight": totals["labeled_weight"],
                "raw_steps_total": totals["raw_steps"],
                "nodes_total": totals["nodes"],
                "compression_rate_overall":
                    fixed6(overall_rate) if overall_rate is not None else None,
                "comment_only_fraction":
                    fixed6(comment_fraction)
                    if comment_fraction is not None else None,
                "opaque_keys_total": totals["opaque_keys"],
                "generation_units_total": totals["units"],
                "accounting_balanced": True,
            },
            "config": config_fingerprint(self.config),
        }
        self._artifact("metrics.json").write_text(
            render_json(payload, indent=2) + "\n", encoding="utf-8"
        )
