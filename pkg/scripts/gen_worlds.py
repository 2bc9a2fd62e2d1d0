#!/usr/bin/env python3
"""Regenerate the synthetic world fixtures under tests/data/worlds/.

depth6.json: full binary tree, six levels deep, branch probabilities
0.55/0.45 everywhere, leaf success keyed to how many left turns the path
took. Every walk is exactly six steps, which pins the realized mean step
count at 6 for the cost-ratio check.

chain.json: a three-step deterministic world (single children, success 1),
where the trie estimates must match the true values exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "data" / "worlds"
DEPTH = 6


def depth6_node(symbol: str, probability: float, level: int, lefts: int) -> dict:
    if level == DEPTH:
        return {
            "symbol": symbol,
            "probability": probability,
            "success": (3 * lefts + 1) / 20,
        }
    return {
        "symbol": symbol,
        "probability": probability,
        "children": [
            depth6_node("L", 0.55, level + 1, lefts + 1),
            depth6_node("R", 0.45, level + 1, lefts),
        ],
    }


def build_depth6() -> dict:
    return {
        "name": "depth6",
        "children": [
            depth6_node("L", 0.55, 1, 1),
            depth6_node("R", 0.45, 1, 0),
        ],
    }


def build_chain() -> dict:
    return {
        "name": "chain",
        "children": [
            {
                "symbol": "setup",
                "probability": 1,
                "children": [
                    {
                        "symbol": "solve",
                        "probability": 1,
                        "children": [
                            {
                                "symbol": "conclude",
                                "probability": 1,
                                "success": 1,
                            }
                        ],
                    }
                ],
            }
        ],
    }


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for name, payload in (("depth6", build_depth6()), ("chain", build_chain())):
        path = OUT_DIR / f"{name}.json"
        path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
