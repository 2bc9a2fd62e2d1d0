"""Fixture suite for the tagged-response protocol.

Each case is (name, raw_response, expected_steps, scheme, expected) where
expected is ("ok", imports, [step codes]) for responses that must parse, or
("error", index, reason_fragment) for responses that must raise an
alignment error naming that index. Index 0 refers to the import block.
"""

OK = "ok"
ERR = "error"

CASES = [
    (
        "two_steps_plain",
        "<STEP_START_1>\na = 1\n<STEP_END_1>\n<STEP_START_2>\nb = a + 1\n<STEP_END_2>",
        2, "step",
        (OK, "", ["a = 1", "b = a + 1"]),
    ),
    (
        "three_steps_with_imports",
        "<IMPORT_START>\nimport math\n<IMPORT_END>\n"
        "<STEP_START_1>\nr = 2\n<STEP_END_1>\n"
        "<STEP_START_2>\narea = math.pi * r ** 2\n<STEP_END_2>\n"
        "<STEP_START_3>\nanswer = area\n<STEP_END_3>",
        3, "step",
        (OK, "import math", ["r = 2", "area = math.pi * r ** 2", "answer = area"]),
    ),
    (
        "fenced_blocks",
        "<STEP_START_1>\n```python\nx = 5 * 3\n```\n<STEP_END_1>\n"
        "<STEP_START_2>\n```\ny = x - 1\n```\n<STEP_END_2>",
        2, "step",
        (OK, "", ["x = 5 * 3", "y = x - 1"]),
    ),
    (
        "comment_only_block",
        "<STEP_START_1>\n# restate the goal\n<STEP_END_1>\n"
        "<STEP_START_2>\nz = 4\n<STEP_END_2>",
        2, "step",
        (OK, "", ["# restate the goal", "z = 4"]),
    ),
    (
        "empty_block",
        "<STEP_START_1>\n<STEP_END_1>\n<STEP_START_2>\nw = 9\n<STEP_END_2>",
        2, "step",
        (OK, "", ["", "w = 9"]),
    ),
    (
        "reordered_blocks",
        "<STEP_START_2>\nsecond = 2\n<STEP_END_2>\n"
        "<STEP_START_1>\nfirst = 1\n<STEP_END_1>",
        2, "step",
        (OK, "", ["first = 1", "second = 2"]),
    ),
    (
        "prose_between_blocks",
        "Sure, here is the code.\n<STEP_START_1>\na = 7\n<STEP_END_1>\n"
        "And the second step:\n<STEP_START_2>\nb = a\n<STEP_END_2>\nDone!",
        2, "step",
        (OK, "", ["a = 7", "b = a"]),
    ),
    (
        "inline_comment_is_code",
        "<STEP_START_1>\ntotal = 3 + 4  # combine\n<STEP_END_1>",
        1, "step",
        (OK, "", ["total = 3 + 4  # combine"]),
    ),
    (
        "all_blocks_comment_only",
        "<STEP_START_1>\n# setup\n<STEP_END_1>\n<STEP_START_2>\n# finish\n<STEP_END_2>",
        2, "step",
        (OK, "", ["# setup", "# finish"]),
    ),
    (
        "missing_second_step",
        "<STEP_START_1>\nonly = 1\n<STEP_END_1>",
        2, "step",
        (ERR, 2, "missing"),
    ),
    (
        "no_blocks_at_all",
        "I could not produce code for this.",
        2, "step",
        (ERR, 1, "missing"),
    ),
    (
        "duplicate_index",
        "<STEP_START_1>\na = 1\n<STEP_END_1>\n<STEP_START_1>\nb = 2\n<STEP_END_1>",
        2, "step",
        (ERR, 1, "duplicate"),
    ),
    (
        "start_inside_open_block",
        "<STEP_START_1>\na = 1\n<STEP_START_2>\nb = 2\n<STEP_END_2>\n<STEP_END_1>",
        2, "step",
        (ERR, 2, "open"),
    ),
    (
        "end_without_start",
        "<STEP_END_1>\n<STEP_START_2>\nb = 2\n<STEP_END_2>",
        2, "step",
        (ERR, 1, "without matching start"),
    ),
    (
        "mismatched_end_index",
        "<STEP_START_1>\na = 1\n<STEP_END_2>",
        2, "step",
        (ERR, 2, "interleaved"),
    ),
    (
        "block_never_closed",
        "<STEP_START_1>\na = 1\n<STEP_END_1>\n<STEP_START_2>\nb = 2",
        2, "step",
        (ERR, 2, "never closed"),
    ),
    (
        "unexpected_extra_index",
        "<STEP_START_1>\na = 1\n<STEP_END_1>\n<STEP_START_2>\nb = 2\n<STEP_END_2>\n"
        "<STEP_START_3>\nc = 3\n<STEP_END_3>",
        2, "step",
        (ERR, 3, "unexpected"),
    ),
    (
        "import_never_closed",
        "<IMPORT_START>\nimport math\n<STEP_START_1>\na = 1\n<STEP_END_1>",
        1, "step",
        (ERR, 0, "unterminated import"),
    ),
    (
        "two_import_blocks",
        "<IMPORT_START>\nimport math\n<IMPORT_END>\n"
        "<IMPORT_START>\nimport sympy\n<IMPORT_END>\n"
        "<STEP_START_1>\na = 1\n<STEP_END_1>",
        1, "step",
        (ERR, 0, "duplicate import"),
    ),
    (
        "code_scheme_plain",
        "<CODE_1>\nu = 6\n<CODE_2>\nv = u * 2",
        2, "code",
        (OK, "", ["u = 6", "v = u * 2"]),
    ),
    (
        "code_scheme_with_imports",
        "<IMPORT_START>\nimport sympy as sp\n<IMPORT_END>\n"
        "<CODE_1>\nhalf = sp.Rational(1, 2)\n<CODE_2>\nanswer = half * 4",
        2, "code",
        (OK, "import sympy as sp", ["half = sp.Rational(1, 2)", "answer = half * 4"]),
    ),
    (
        "code_scheme_reordered",
        "<CODE_2>\nlater = 2\n<CODE_1>\nearlier = 1",
        2, "code",
        (OK, "", ["earlier = 1", "later = 2"]),
    ),
    (
        "code_scheme_missing",
        "<CODE_1>\nlonely = 1",
        3, "code",
        (ERR, 2, "missing"),
    ),
    (
        "code_scheme_duplicate",
        "<CODE_1>\na = 1\n<CODE_1>\nb = 2",
        2, "code",
        (ERR, 1, "duplicate"),
    ),
    (
        "code_scheme_extra_index",
        "<CODE_1>\na = 1\n<CODE_5>\nb = 2",
        1, "code",
        (ERR, 5, "unexpected"),
    ),
]
