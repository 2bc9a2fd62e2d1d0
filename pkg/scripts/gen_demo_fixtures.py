#!/usr/bin/env python3
"""Regenerate the recorded translator/sampler responses for the demo runs.

Fixture files are named by the SHA-256 of the request content, so any edit
to the demo corpus texts or to the prompt templates changes the hashes;
rerun this script afterwards to refresh tests/data/demo/fixtures/.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from stepcompress.model import Problem  # noqa: E402
from stepcompress.translator import (  # noqa: E402
    SAMPLING_PROMPT_TEMPLATE,
    FixtureStore,
    build_prompt,
)

FIXTURES = FixtureStore(REPO / "tests" / "data" / "demo" / "fixtures")

DEMO_TRANSLATIONS = {
    # steps of solution 1; the first block carries a comment and the parens
    # force the addition before doubling
    (
        "Twice the sum of 3 and 4 gives 14.",
        "So the answer is 14.",
    ): """<STEP_START_1>
# double the sum of 3 and 4
x = (3 + 4) * 2
<STEP_END_1>
<STEP_START_2>
answer = x
<STEP_END_2>""",
    (
        "Adding 4 and 3 then doubling yields 14.",
        "Hence the result is 14.",
    ): """<IMPORT_START>
import math
<IMPORT_END>
<STEP_START_1>
total = (4 + 3) * 2
<STEP_END_1>
<STEP_START_2>
answer = total
<STEP_END_2>""",
    (
        "Two times the sum of 4 and 3 is 14.",
        "Subtracting 3 gives the answer 11.",
    ): """<STEP_START_1>
y = 2 * (4 + 3)
<STEP_END_1>
<STEP_START_2>
answer = y - 3
<STEP_END_2>""",
    (
        "The quantity equals 14.",
        "Multiplying by one keeps it 14.",
    ): """<STEP_START_1>
```python
v = 14
```
<STEP_END_1>
<STEP_START_2>
answer = v * 1
<STEP_END_2>""",
}

SAMPLED_CORRECT = """Step 1: Add 5 and 2.
Step 2: The total is 7.
Final Answer: \\boxed{7}"""

SAMPLED_WRONG = """Step 1: Add 5 and 3.
Step 2: The total is 8.
Final Answer: \\boxed{8}"""

SAMPLED_TRANSLATIONS = {
    ("Add 5 and 2.", "The total is 7."): """<STEP_START_1>
total = 5 + 2
<STEP_END_1>
<STEP_START_2>
answer = total
<STEP_END_2>""",
    ("Add 5 and 3.", "The total is 8."): """<STEP_START_1>
total = 5 + 3
<STEP_END_1>
<STEP_START_2>
answer = total
<STEP_END_2>""",
}


def load_problem(path: Path) -> Problem:
    record = json.loads(path.read_text(encoding="utf-8").splitlines()[0])
    return Problem(
        id=record["problem_id"],
        statement=record["statement"],
        ground_truth_answer=record["ground_truth_answer"],
    )


def main() -> None:
    demo = load_problem(REPO / "tests" / "data" / "demo" / "corpus.jsonl")
    for steps, response in DEMO_TRANSLATIONS.items():
        prompt = build_prompt(demo, list(steps))
        print("translation", FIXTURES.save(prompt, response).name)

    sampled = load_problem(REPO / "tests" / "data" / "demo" / "sample_corpus.jsonl")
    sampling_prompt = SAMPLING_PROMPT_TEMPLATE.format(statement=sampled.statement)
    for ordinal in range(4):
        response = SAMPLED_WRONG if ordinal == 2 else SAMPLED_CORRECT
        key = f"{sampling_prompt}\x00sample={ordinal}"
        print(f"sample {ordinal}", FIXTURES.save(key, response).name)
    for steps, response in SAMPLED_TRANSLATIONS.items():
        prompt = build_prompt(sampled, list(steps))
        print("translation", FIXTURES.save(prompt, response).name)


if __name__ == "__main__":
    main()
