import json
from fractions import Fraction

import pytest

from stepcompress.synth import (
    WorldError,
    build_world_trie,
    generate_solutions,
    load_world,
    mc_estimate,
    solutions_to_keyed,
    true_q,
    validate_estimates,
    world_from_dict,
)


def leaf(symbol, probability, success):
    return {"symbol": symbol, "probability": probability, "success": success}


def small_world():
    """Two first steps; the left branch splits again."""
    return world_from_dict({
        "name": "small",
        "children": [
            {
                "symbol": "plan", "probability": Fraction(3, 5),
                "children": [
                    leaf("solve", Fraction(1, 2), Fraction(9, 10)),
                    leaf("guess", Fraction(1, 2), Fraction(1, 10)),
                ],
            },
            leaf("skip", Fraction(2, 5), Fraction(1, 4)),
        ],
    })


def test_true_q_hand_computed():
    world = small_world()
    assert true_q(world, ("plan", "solve")) == Fraction(9, 10)
    assert true_q(world, ("plan", "guess")) == Fraction(1, 10)
    assert true_q(world, ("plan",)) == Fraction(1, 2)
    assert true_q(world, ("skip",)) == Fraction(1, 4)
    # root: 3/5 * 1/2 + 2/5 * 1/4 = 2/5
    assert true_q(world, ()) == Fraction(2, 5)


def test_node_at_unknown_prefix():
    with pytest.raises(WorldError):
        small_world().node_at(("nonsense",))


@pytest.mark.parametrize("mutate,fragment", [
    (lambda d: d["children"][0]["children"].pop(),
     "probabilities sum"),
    (lambda d: d["children"][0]["children"][0].update(symbol="guess"),
     "duplicate child symbols"),
    (lambda d: d["children"][1].pop("success"),
     "leaf needs a success"),
    (lambda d: d["children"][1].update(children=[leaf("x", 1, 1)]),
     "both children and success"),
    (lambda d: d["children"][1].update(success=Fraction(3, 2)),
     "outside [0, 1]"),
    (lambda d: d["children"][0].pop("symbol"),
     "missing symbol"),
])
def test_world_validation_errors(mutate, fragment):
    doc = {
        "name": "bad",
        "children": [
            {
                "symbol": "plan", "probability": Fraction(3, 5),
                "children": [
                    leaf("solve", Fraction(1, 2), Fraction(9, 10)),
                    leaf("guess", Fraction(1, 2), Fraction(1, 10)),
                ],
            },
            leaf("skip", Fraction(2, 5), Fraction(1, 4)),
        ],
    }
    mutate(doc)
    with pytest.raises(WorldError) as info:
        world_from_dict(doc)
    assert fragment in str(info.value)


def test_load_world_parses_decimals_exactly(tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps({
        "children": [
            {"symbol": "a", "probability": 0.3, "success": 0.1},
            {"symbol": "b", "probability": 0.7, "success": 1},
        ]
    }))
    world = load_world(path)
    assert world.children[0].probability == Fraction(3, 10)
    assert world.children[0].success == Fraction(1, 10)
    # 0.3 + 0.7 only sums to 1 when parsed exactly, not as binary floats
    assert true_q(world, ()) == Fraction(3, 100) + Fraction(7, 10)


def test_generate_solutions_is_seeded_and_cost_is_n():
    world = small_world()
    first, cost = generate_solutions(world, 50, seed=7)
    second, _ = generate_solutions(world, 50, seed=7)
    third, _ = generate_solutions(world, 50, seed=8)
    assert first == second
    assert first != third
    assert cost.units == 50
    assert all(
        symbols in (("plan", "solve"), ("plan", "guess"), ("skip",))
        for symbols, _ in first
    )


def test_solutions_to_keyed_ids_are_dense():
    world = small_world()
    samples, _ = generate_solutions(world, 5, seed=0)
    keyed = solutions_to_keyed(samples)
    assert [k.solution_id for k in keyed] == [
        "s000000", "s000001", "s000002", "s000003", "s000004",
    ]
    assert keyed[0].step_texts == list(samples[0][0])


def test_build_world_trie_conserves_solutions():
    world = small_world()
    trie, cost = build_world_trie(world, 200, seed=3)
    assert cost.units == 200
    assert trie.root.pass_total == 200

    def enders(node):
        return node.end_total + sum(enders(c) for c in node.sorted_children())

    assert enders(trie.root) == 200


def test_mc_estimate_pools_by_prefix_and_prices_per_step():
    world = small_world()
    samples, _ = generate_solutions(world, 30, seed=2)
    estimates, cost = mc_estimate(world, samples, completions_per_step=8, seed=5)
    total_steps = sum(len(symbols) for symbols, _ in samples)
    assert cost.units == total_steps * 8
    for prefix, estimate in estimates.items():
        assert 0 <= estimate <= 1
        assert prefix in {
            ("plan",), ("skip",), ("plan", "solve"), ("plan", "guess"),
        }


def test_validate_estimates_small_world():
    report = validate_estimates(small_world(), 2000, seed=0)
    assert report.eligible > 0
    assert report.within_bound == report.eligible
    assert report.deterministic_exact is None
    assert report.annotator_units == 2000
    # every sampled step prefix costs eight continuations
    assert report.mc_units % 8 == 0
    assert report.cost_ratio > 1


def test_validate_deterministic_world_is_exact():
    world = world_from_dict({
        "children": [{
            "symbol": "setup", "probability": 1,
            "children": [{
                "symbol": "solve", "probability": 1,
                "children": [leaf("conclude", 1, 1)],
            }],
        }],
    })
    assert world.is_deterministic()
    report = validate_estimates(world, 64, seed=1)
    assert report.deterministic_exact is True
    assert report.cost_ratio == Fraction(64 * 3 * 8, 64)


def test_summary_lines_name_the_checks():
    report = validate_estimates(small_world(), 500, seed=4)
    text = "\n".join(report.summary_lines())
    assert "world: small" in text
    assert "solutions sampled: 500" in text
    assert "within 4 sigma" in text
    assert "ratio" in text
