"""Translation of natural-language steps into tagged code blocks.

The prompt asks for one code block per step wrapped in <STEP_START_i> /
<STEP_END_i> tags, imports in a dedicated <IMPORT_START> block. Some models
answer with <CODE_i> headers instead; that scheme is supported behind a
flag. Block indices are authoritative: out-of-order blocks are reordered,
anything missing, duplicated, or interleaved raises AlignmentError and the
solution is dropped upstream.

The HTTP client talks to a chat-completion endpoint with retries and
exponential backoff, and supports record/replay against a fixture directory
keyed by a content hash, so test and demo runs never touch the network.
"""

from __future__ import annotations

import hashlib
import logging
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .model import Problem, RunConfig, Solution, Step
from .numeric import extract_answer_text

log = logging.getLogger(__name__)

PROMPT_TEMPLATE = """You are a Python expert. I will provide a math problem along with a step-by-step solution. Please present each step of the solution as Python code. Ensure the following requirements are met:

1. Clearly separate each step and save them in different code blocks, using <STEP_START_i> and <STEP_END_i> to separate them, where i represents the i-th step.
2. All calculations should be done in python code. Provide concise reasoning and thinking in the comments of the code.
3. If libraries are required, import them before the first step, using <IMPORT_START> and <IMPORT_END> tags. The most related python packages include 'math', 'sympy', 'scipy', and 'numpy'.
4. Do not use any custom defined functions. Do implement the functionality with the simplest code.
5. Ensure there is corresponding code for each step, even if the code is empty.

Math Problem:
{statement}

Solution:
{steps}"""

SAMPLING_PROMPT_TEMPLATE = """Solve the following math problem step by step. Write each step on its own line starting with "Step k:". Finish with a line "Final Answer: \\boxed{{...}}".

Math Problem:
{statement}"""


def build_prompt(problem: Problem, step_texts: list[str]) -> str:
    """Fill the translation prompt with the problem statement and the
    numbered solution steps."""
    numbered = "\n".join(
        f"Step {i}: {text}" for i, text in enumerate(step_texts, start=1)
    )
    return PROMPT_TEMPLATE.format(statement=problem.statement, steps=numbered)


@dataclass(frozen=True)
class ChatRequest:
    endpoint: str
    model: str
    prompt: str
    temperature: float = 0.0
    top_p: float = 1.0
    max_new_tokens: int = 2048


@dataclass(frozen=True)
class CodeStep:
    index: int
    code: str
    comment_only: bool


@dataclass
class TranslatedSolution:
    problem_id: str
    solution_id: str
    imports_block: str
    code_steps: list[CodeStep]


class AlignmentError(Exception):
    """Tagged response does not line up with the expected step count."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"step {index}: {reason}")
        self.index = index
        self.reason = reason


_FENCE_RE = re.compile(r"^```[^\n]*\n?")
_STEP_TAG_RE = re.compile(r"<STEP_(START|END)_(\d+)>")
_CODE_TAG_RE = re.compile(r"<CODE_(\d+)>")
_IMPORT_RE = re.compile(r"<IMPORT_START>(.*?)<IMPORT_END>", re.DOTALL)


def strip_fences(text: str) -> str:
    """Remove surrounding markdown code-fence markers, if any."""
    out = text.strip()
    if out.startswith("```"):
        out = _FENCE_RE.sub("", out, count=1)
    if out.rstrip().endswith("```"):
        out = out.rstrip()[:-3]
    return out.strip("\n")


def is_comment_only(code: str) -> bool:
    """True when the block holds no executable line (empty or comments)."""
    for line in code.splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            return False
    return True


def _extract_import_block(raw: str) -> tuple[str, str]:
    """Pull the import block out, returning (imports, remaining_text)."""
    matches = list(_IMPORT_RE.finditer(raw))
    if not matches:
        if "<IMPORT_START>" in raw:
            raise AlignmentError(0, "unterminated import block")
        return "", raw
    if len(matches) > 1:
        raise AlignmentError(0, "duplicate import block")
    match = matches[0]
    remaining = raw[: match.start()] + raw[match.end():]
    return strip_fences(match.group(1)), remaining


def _check_indices(seen: list[int], expected_steps: int) -> None:
    counts: dict[int, int] = {}
    for index in seen:
        counts[index] = counts.get(index, 0) + 1
    duplicates = sorted(i for i, c in counts.items() if c > 1)
    if duplicates:
        raise AlignmentError(duplicates[0], "duplicate step index")
    expected = set(range(1, expected_steps + 1))
    missing = sorted(expected - set(seen))
    if missing:
        raise AlignmentError(
            missing[0],
            f"missing step block (got {len(seen)} of {expected_steps})",
        )
    extra = sorted(set(seen) - expected)
    if extra:
        raise AlignmentError(
            extra[0],
            f"unexpected step index (expected 1..{expected_steps})",
        )


def _parse_step_scheme(raw: str, expected_steps: int) -> list[tuple[int, str]]:
    blocks: list[tuple[int, str]] = []
    open_index: int | None = None
    open_end = 0
    for match in _STEP_TAG_RE.finditer(raw):
        kind = match.group(1)
        index = int(match.group(2))
        if kind == "START":
            if open_index is not None:
                raise AlignmentError(
                    index, f"start tag while step {open_index} is open"
                )
            open_index = index
            open_end = match.end()
        else:
            if open_index is None:
                raise AlignmentError(index, "end tag without matching start")
            if index != open_index:
                raise AlignmentError(
                    index, f"end tag interleaved with step {open_index}"
                )
            blocks.append((index, raw[open_end : match.start()]))
            open_index = None
    if open_index is not None:
        raise AlignmentError(open_index, "step block never closed")
    return blocks


def _parse_code_scheme(raw: str, expected_steps: int) -> list[tuple[int, str]]:
    matches = list(_CODE_TAG_RE.finditer(raw))
    blocks: list[tuple[int, str]] = []
    for position, match in enumerate(matches):
        start = match.end()
        end = matches[position + 1].start() if position + 1 < len(matches) else len(raw)
        blocks.append((int(match.group(1)), raw[start:end]))
    return blocks


def parse_tagged_response(
    raw: str, expected_steps: int, scheme: str = "step"
) -> tuple[str, list[CodeStep]]:
    """Classify a raw model response into an import block plus exactly
    `expected_steps` code blocks, or raise AlignmentError naming the first
    offending index (0 stands for the import block)."""
    if scheme not in ("step", "code"):
        raise ValueError(f"unknown tag scheme {scheme!r}")
    imports, remaining = _extract_import_block(raw)
    if scheme == "step":
        blocks = _parse_step_scheme(remaining, expected_steps)
    else:
        blocks = _parse_code_scheme(remaining, expected_steps)
    _check_indices([index for index, _ in blocks], expected_steps)
    blocks.sort(key=lambda item: item[0])
    steps = []
    for index, text in blocks:
        code = strip_fences(text)
        steps.append(
            CodeStep(index=index, code=code, comment_only=is_comment_only(code))
        )
    return imports, steps


# --------------------------------------------------------------------------
# Transport with record/replay
# --------------------------------------------------------------------------

class TransportError(Exception):
    pass


class FixtureMissError(Exception):
    def __init__(self, digest: str):
        super().__init__(
            f"no recorded response for prompt hash {digest}; run with "
            "--record against a live endpoint to create it"
        )
        self.digest = digest


class FixtureStore:
    """Directory of recorded responses, one file per content hash."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    @staticmethod
    def digest(content: str) -> str:
        return hashlib.sha256(content.encode("utf-8")).hexdigest()

    def path_for(self, content: str) -> Path:
        return self.directory / f"{self.digest(content)}.txt"

    def load(self, content: str) -> str | None:
        path = self.path_for(content)
        if not path.exists():
            return None
        return path.read_text(encoding="utf-8")

    def save(self, content: str, response: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(content)
        path.write_text(response, encoding="utf-8")
        return path


_RETRY_STATUSES = {429, 500, 502, 503, 504}
DEFAULT_TOKEN_ENV = "STEPCOMPRESS_API_TOKEN"


class ChatClient:
    """Chat-completion client with bounded retries and optional
    record/replay. In replay mode (fixtures set, record off) the network is
    never touched: a missing fixture is an error naming the prompt hash."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        token_env: str = DEFAULT_TOKEN_ENV,
        max_retries: int = 4,
        backoff_base: float = 0.25,
        timeout: float = 60.0,
        fixtures: FixtureStore | None = None,
        record: bool = False,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.token_env = token_env
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.timeout = timeout
        self.fixtures = fixtures
        self.record = record
        self.session = session or requests.Session()

    def complete(self, request: ChatRequest, fixture_content: str | None = None) -> str:
        content = fixture_content if fixture_content is not None else request.prompt
        if self.fixtures is not None and not self.record:
            recorded = self.fixtures.load(content)
            if recorded is None:
                raise FixtureMissError(FixtureStore.digest(content))
            return recorded
        response = self._post(request)
        if self.fixtures is not None and self.record:
            self.fixtures.save(content, response)
        return response

    def _post(self, request: ChatRequest) -> str:
        payload = {
            "model": request.model or self.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "top_p": request.top_p,
            "max_tokens": request.max_new_tokens,
        }
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        url = request.endpoint or self.endpoint
        last_error = "no attempt made"
        for attempt in range(self.max_retries + 1):
            if attempt:
                delay = self.backoff_base * (2 ** (attempt - 1))
                log.warning(
                    "retrying request (attempt %d of %d) after %s: sleeping %.2fs",
                    attempt, self.max_retries, last_error, delay,
                )
                time.sleep(delay)
            try:
                reply = self.session.post(
                    url, json=payload, headers=headers, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = f"connection error: {exc}"
                continue
            if reply.status_code in _RETRY_STATUSES:
                last_error = f"HTTP {reply.status_code}"
                continue
            if reply.status_code != 200:
                raise TransportError(
                    f"HTTP {reply.status_code} from {url}: {reply.text[:200]}"
                )
            try:
                data = reply.json()
                return data["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise TransportError(f"malformed completion payload: {exc}") from exc
        raise TransportError(
            f"request failed after {self.max_retries} retries ({last_error})"
        )


def request_translation(client: ChatClient, request: ChatRequest) -> str:
    """One completion for a translation request (temperature 0 upstream)."""
    return client.complete(request)


def translate_solution(
    client: ChatClient,
    problem: Problem,
    solution: Solution,
    config: RunConfig,
    solution_id: str = "",
    scheme: str = "step",
) -> TranslatedSolution:
    """Prompt for, fetch, and align one solution's translation."""
    step_texts = [step.text for step in solution.steps]
    prompt = build_prompt(problem, step_texts)
    raw = client.complete(
        ChatRequest(
            endpoint=client.endpoint,
            model=client.model,
            prompt=prompt,
            temperature=config.translation_temperature,
            top_p=1.0,
            max_new_tokens=config.translation_max_tokens,
        )
    )
    imports, steps = parse_tagged_response(raw, len(step_texts), scheme=scheme)
    return TranslatedSolution(
        problem_id=problem.id,
        solution_id=solution_id,
        imports_block=imports,
        code_steps=steps,
    )


def translate_many(jobs: list, worker, max_workers: int = 8) -> list:
    """Run `worker` over jobs with a bounded pool; results come back in
    input order regardless of completion order."""
    if max_workers <= 1 or len(jobs) <= 1:
        return [worker(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(worker, jobs))


# --------------------------------------------------------------------------
# Solution sampling
# --------------------------------------------------------------------------

_STEP_MARKER_RE = re.compile(r"^\s*Step\s+(\d+)\s*[:.]\s*(.*)$", re.IGNORECASE)
_FINAL_ANSWER_RE = re.compile(r"^\s*Final Answer\s*[:.]", re.IGNORECASE)


def split_sampled_text(text: str) -> tuple[list[str], str]:
    """Split a sampled solution into step texts plus a final-answer string.

    Lines starting with "Step k:" delimit steps when present; otherwise
    blank-line paragraphs do. The final answer is whatever the answer
    extractor finds (boxed expression or last number)."""
    final_answer = extract_answer_text(text)
    step_lines: list[list[str]] = []
    saw_marker = False
    for line in text.splitlines():
        if _FINAL_ANSWER_RE.match(line):
            break
        marker = _STEP_MARKER_RE.match(line)
        if marker:
            saw_marker = True
            step_lines.append([marker.group(2).strip()])
        elif saw_marker and step_lines and line.strip():
            step_lines[-1].append(line.strip())
    if saw_marker:
        steps = [" ".join(parts).strip() for parts in step_lines]
        steps = [s for s in steps if s]
    else:
        paragraphs = re.split(r"\n\s*\n", text)
        steps = [collapse for collapse in (p.strip() for p in paragraphs) if collapse]
    return steps, final_answer


def sample_solutions(
    client: ChatClient,
    problem: Problem,
    n: int,
    config: RunConfig,
    check=None,
) -> list[Solution]:
    """Draw n independent solutions for a problem at the sampling
    temperature. Each completion replays under its own fixture key (prompt
    plus ordinal). `check` maps a final answer to is_correct; when absent
    every solution is marked incorrect."""
    prompt = SAMPLING_PROMPT_TEMPLATE.format(statement=problem.statement)
    request = ChatRequest(
        endpoint=client.endpoint,
        model=client.model,
        prompt=prompt,
        temperature=config.sampling_temperature,
        top_p=config.sampling_top_p,
        max_new_tokens=config.sampling_max_tokens,
    )
    solutions: list[Solution] = []
    for ordinal in range(n):
        raw = client.complete(request, fixture_content=f"{prompt}\x00sample={ordinal}")
        step_texts, final_answer = split_sampled_text(raw)
        if not step_texts:
            step_texts = [raw.strip() or "(empty completion)"]
        steps = [Step(index=i, text=t) for i, t in enumerate(step_texts, start=1)]
        is_correct = bool(check(final_answer)) if check is not None else False
        solutions.append(
            Solution(
                problem_id=problem.id,
                steps=steps,
                final_answer=final_answer,
                is_correct=is_correct,
            )
        )
    return solutions
