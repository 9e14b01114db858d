import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xrtlx import CLASSIC6, XR11
from xrtlx.errors import (
    InconsistentWeightsError,
    InvalidModeError,
    ValidationError,
)
from xrtlx.scoring import (
    PairwiseChoice,
    all_pairs,
    choices_from_wire,
    compute_raw_score,
    compute_weighted_score,
    format_score,
    generate_pairs,
    pair_count,
    score_session,
    tally_weights,
    weighted_mean,
)

from .conftest import dominance_choices, random_choices, random_ratings, winners_to_choices
from .oracles import (
    TASK_IDS,
    TECH_IDS,
    naive_score_session,
    naive_weighted_score,
    naive_weights,
)

TASK_RANKING = list(CLASSIC6.task_ids)


def test_canonical_dimension_ids_are_stable():
    # wire contract: these exact ids appear in every format
    assert list(CLASSIC6.ids) == TASK_IDS
    assert list(XR11.ids) == TASK_IDS + TECH_IDS
    assert all(d.prompt for d in XR11.dimensions)
    assert [d.group.value for d in XR11.dimensions] == ["task"] * 6 + ["technology"] * 5


# --- pair generation ---------------------------------------------------------


def test_classic_pair_count_is_15():
    assert len(generate_pairs(CLASSIC6, "classic")) == 15


def test_ten_dimension_full_pairing_is_45():
    assert len(all_pairs([f"dim_{i}" for i in range(10)])) == 45


def test_grouped_pair_count_is_25():
    pairs = generate_pairs(XR11, "xr_grouped")
    assert len(pairs) == 25
    task = set(XR11.task_ids)
    assert all(a in task and b in task for a, b in pairs[:15])
    tech = set(XR11.technology_ids)
    assert all(a in tech and b in tech for a, b in pairs[15:])


def test_full_pair_count_is_55():
    assert len(generate_pairs(XR11, "xr_full")) == 55


@pytest.mark.parametrize("n", range(2, 13))
def test_pair_count_formula(n):
    ids = [f"d{i:02d}" for i in range(n)]
    assert len(all_pairs(ids)) == n * (n - 1) // 2 == pair_count(n)


def test_pairs_unique_and_never_self():
    for dims, mode in [(CLASSIC6, "classic"), (XR11, "xr_grouped"), (XR11, "xr_full")]:
        pairs = generate_pairs(dims, mode)
        assert all(a != b for a, b in pairs)
        assert len({frozenset(p) for p in pairs}) == len(pairs)


def test_unseeded_pairs_are_lexicographic():
    pairs = generate_pairs(CLASSIC6, "classic")
    assert pairs == sorted(tuple(sorted(p)) for p in pairs)


def test_seeded_pairs_deterministic_and_same_set():
    base = generate_pairs(XR11, "xr_grouped")
    shuffled = generate_pairs(XR11, "xr_grouped", seed=7)
    assert shuffled == generate_pairs(XR11, "xr_grouped", seed=7)
    assert {frozenset(p) for p in shuffled} == {frozenset(p) for p in base}
    # grouped mode keeps task comparisons first even when shuffled
    task = set(XR11.task_ids)
    assert all(a in task for a, _ in shuffled[:15])


def test_mode_variant_compatibility():
    with pytest.raises(InvalidModeError):
        generate_pairs(CLASSIC6, "xr_grouped")
    with pytest.raises(InvalidModeError):
        generate_pairs(CLASSIC6, "xr_full")
    with pytest.raises(InvalidModeError):
        generate_pairs(XR11, "classic")


# --- weight tallies ----------------------------------------------------------


def test_dimension_winning_all_its_pairs_gets_weight_5():
    pairs = generate_pairs(CLASSIC6, "classic")
    choices = [
        PairwiseChoice(pair=p, chosen="mental_demand" if "mental_demand" in p else p[0])
        for p in pairs
    ]
    weights = tally_weights(choices, CLASSIC6, "classic")
    assert weights["mental_demand"] == 5


def test_lexicographic_winners_match_naive_count():
    pairs = generate_pairs(CLASSIC6, "classic")
    choices = [PairwiseChoice(pair=p, chosen=min(p)) for p in pairs]
    expected = naive_weights([(c.pair, c.chosen) for c in choices], TASK_IDS)
    assert tally_weights(choices, CLASSIC6, "classic") == expected


def test_ease_of_use_winning_all_technology_pairs():
    pairs = generate_pairs(XR11, "xr_grouped")
    tech = set(XR11.technology_ids)
    choices = []
    for pair in pairs:
        if pair[0] in tech and "ease_of_use" in pair:
            chosen = "ease_of_use"
        else:
            chosen = pair[0]
        choices.append(PairwiseChoice(pair=pair, chosen=chosen))
    weights = tally_weights(choices, XR11, "xr_grouped")
    assert weights["ease_of_use"] == 4
    others = sum(weights[d] for d in XR11.technology_ids if d != "ease_of_use")
    assert others == 6


def test_missing_and_duplicate_pairs_all_reported():
    pairs = generate_pairs(CLASSIC6, "classic")
    choices = [PairwiseChoice(pair=p, chosen=p[0]) for p in pairs]
    broken = choices[2:] + [choices[-1]]  # drop two, duplicate one
    with pytest.raises(ValidationError) as excinfo:
        tally_weights(broken, CLASSIC6, "classic")
    details = excinfo.value.details
    assert sum("missing pair" in d for d in details) == 2
    assert sum("duplicate pair" in d for d in details) == 1
    dropped_a, dropped_b = choices[0].pair
    assert any(dropped_a in d and dropped_b in d for d in details)


def test_unknown_dimension_rejected():
    pairs = generate_pairs(CLASSIC6, "classic")
    choices = [PairwiseChoice(pair=p, chosen=p[0]) for p in pairs[1:]]
    choices.append(PairwiseChoice(pair=("mental_demand", "bogus"), chosen="bogus"))
    with pytest.raises(ValidationError) as excinfo:
        tally_weights(choices, CLASSIC6, "classic")
    assert any("bogus" in d for d in excinfo.value.details)


def test_chosen_outside_pair_rejected():
    with pytest.raises(ValidationError):
        PairwiseChoice(pair=("effort", "performance"), chosen="frustration")
    with pytest.raises(ValidationError):
        PairwiseChoice(pair=("effort", "effort"), chosen="effort")


def test_choices_from_wire_collects_every_problem():
    items = [
        {"pair": ["effort", "performance"], "chosen": "frustration"},
        {"pair": ["effort"], "chosen": "effort"},
        {"chosen": "effort"},
        {"pair": ["mental_demand", "physical_demand"], "chosen": "mental_demand"},
    ]
    with pytest.raises(ValidationError) as excinfo:
        choices_from_wire(items)
    assert len(excinfo.value.details) == 3


# --- score arithmetic ----------------------------------------------------------


def test_weighted_score_zero_ratings():
    weights = dict(zip(TASK_IDS, (5, 4, 3, 2, 1, 0)))
    ratings = {d: 0 for d in TASK_IDS}
    assert compute_weighted_score(weights, ratings, TASK_IDS) == 0


def test_weighted_score_uniform_ratings_fixed_point():
    weights = dict(zip(TASK_IDS, (5, 4, 3, 2, 1, 0)))
    ratings = {d: 45 for d in TASK_IDS}
    assert compute_weighted_score(weights, ratings, TASK_IDS) == 45


def test_weighted_score_worked_example():
    # hand arithmetic: (5*100 + 4*80 + 3*60 + 2*40 + 1*20 + 0*0) / 15 = 1100/15
    weights = dict(zip(TASK_IDS, (5, 4, 3, 2, 1, 0)))
    ratings = dict(zip(TASK_IDS, (100, 80, 60, 40, 20, 0)))
    score = compute_weighted_score(weights, ratings, TASK_IDS)
    assert score == Fraction(1100, 15)
    assert abs(float(score) - naive_weighted_score(weights, ratings, TASK_IDS)) < 1e-12
    assert format_score(score) == "73.33"


def test_weight_sum_mismatch_rejected():
    weights = dict(zip(TASK_IDS, (5, 4, 3, 2, 1, 1)))
    ratings = {d: 50 for d in TASK_IDS}
    with pytest.raises(InconsistentWeightsError):
        compute_weighted_score(weights, ratings, TASK_IDS)


def test_missing_rating_rejected():
    weights = dict(zip(TASK_IDS, (5, 4, 3, 2, 1, 0)))
    ratings = {d: 50 for d in TASK_IDS[:-1]}
    with pytest.raises(ValidationError):
        compute_weighted_score(weights, ratings, TASK_IDS)


def test_raw_score_examples():
    assert compute_raw_score({d: 0 for d in TASK_IDS}, TASK_IDS) == 0
    assert compute_raw_score({d: 100 for d in TASK_IDS}, TASK_IDS) == 100
    ratings = dict(zip(TASK_IDS, (10, 20, 30, 40, 50, 60)))
    assert compute_raw_score(ratings, TASK_IDS) == 35


def test_raw_score_empty_group_rejected():
    with pytest.raises(ValidationError):
        compute_raw_score({}, [])


def test_weighted_mean_zero_weights_is_zero():
    assert weighted_mean({d: 0 for d in TECH_IDS}, {d: 80 for d in TECH_IDS}, TECH_IDS) == 0


# --- full sessions ---------------------------------------------------------------


def test_classic_uniform_50():
    pairs = generate_pairs(CLASSIC6, "classic")
    choices = [PairwiseChoice(pair=p, chosen=p[0]) for p in pairs]
    score = score_session(choices, {d: 50 for d in TASK_IDS}, CLASSIC6, "classic")
    assert score.weighted_task == 50
    assert score.raw_task == 50
    assert score.weighted_technology is None
    assert score.to_wire() == {
        "mode": "classic",
        "raw_task": "50.00",
        "weighted_task": "50.00",
    }


def test_grouped_worked_example():
    # task: weights (5,4,3,2,1,0) x ratings (100,80,60,40,20,0) -> 1100/15
    # technology: weights (4,3,2,1,0) x ratings (100,75,50,25,0) -> 750/10
    pairs = generate_pairs(XR11, "xr_grouped")
    ranking = TASK_RANKING + list(XR11.technology_ids)
    choices = dominance_choices(pairs, ranking)
    ratings = dict(zip(TASK_IDS, (100, 80, 60, 40, 20, 0)))
    ratings.update(zip(XR11.technology_ids, (100, 75, 50, 25, 0)))
    score = score_session(choices, ratings, XR11, "xr_grouped")
    assert score.weighted_task == Fraction(1100, 15)
    assert score.weighted_technology == 75
    assert score.to_wire()["weighted_technology"] == "75.00"


def test_full_mode_matches_naive():
    rng = random.Random(11)
    pairs = generate_pairs(XR11, "xr_full")
    choices = random_choices(rng, pairs)
    ratings = random_ratings(rng, XR11.ids)
    score = score_session(choices, ratings, XR11, "xr_full")
    raw, combined, tech = naive_score_session(
        [(c.pair, c.chosen) for c in choices], ratings, "xr_full"
    )
    assert abs(float(score.raw_task) - raw) < 1e-9
    assert abs(float(score.weighted_task) - combined) < 1e-9
    assert abs(float(score.weighted_technology) - tech) < 1e-9


def test_rating_validation():
    pairs = generate_pairs(CLASSIC6, "classic")
    choices = [PairwiseChoice(pair=p, chosen=p[0]) for p in pairs]
    ratings = {d: 50 for d in TASK_IDS}
    ratings["effort"] = 47
    with pytest.raises(ValidationError):
        score_session(choices, ratings, CLASSIC6, "classic")
    ratings["effort"] = 105
    with pytest.raises(ValidationError):
        score_session(choices, ratings, CLASSIC6, "classic")


def test_instrument_scale_bounds():
    # reported whole-instrument scores always land on the 0-100 scale
    for value in (55, 54, 13, 22, 33, 42, 27, 44):
        assert 0 <= value <= 100


# --- properties -------------------------------------------------------------------


CLASSIC_PAIRS = generate_pairs(CLASSIC6, "classic")
GROUPED_PAIRS = generate_pairs(XR11, "xr_grouped")
FULL_PAIRS = generate_pairs(XR11, "xr_full")

classic_winners = st.lists(st.booleans(), min_size=15, max_size=15)
grouped_winners = st.lists(st.booleans(), min_size=25, max_size=25)
full_winners = st.lists(st.booleans(), min_size=55, max_size=55)
rating_values = st.sampled_from(range(0, 101, 5))


@given(classic_winners, rating_values)
def test_uniform_ratings_fixed_point_classic(winners, level):
    choices = winners_to_choices(CLASSIC_PAIRS, winners)
    score = score_session(choices, {d: level for d in TASK_IDS}, CLASSIC6, "classic")
    assert score.weighted_task == level
    assert score.raw_task == level


@given(grouped_winners, rating_values)
def test_uniform_ratings_fixed_point_grouped(winners, level):
    choices = winners_to_choices(GROUPED_PAIRS, winners)
    ids = list(XR11.ids)
    score = score_session(choices, {d: level for d in ids}, XR11, "xr_grouped")
    assert score.weighted_task == level
    assert score.weighted_technology == level


@given(full_winners, rating_values)
def test_uniform_ratings_fixed_point_full(winners, level):
    choices = winners_to_choices(FULL_PAIRS, winners)
    score = score_session(choices, {d: level for d in XR11.ids}, XR11, "xr_full")
    assert score.weighted_task == level


@given(grouped_winners)
def test_weight_conservation(winners):
    choices = winners_to_choices(GROUPED_PAIRS, winners)
    weights = tally_weights(choices, XR11, "xr_grouped")
    task_sum = sum(weights[d] for d in XR11.task_ids)
    tech_sum = sum(weights[d] for d in XR11.technology_ids)
    assert task_sum == 15
    assert tech_sum == 10
    assert all(weights[d] <= 5 for d in XR11.task_ids)
    assert all(weights[d] <= 4 for d in XR11.technology_ids)


@given(
    classic_winners,
    st.lists(rating_values, min_size=6, max_size=6),
    st.integers(0, 5),
    st.sampled_from(range(5, 101, 5)),
)
def test_monotone_in_each_rating(winners, levels, index, bump):
    choices = winners_to_choices(CLASSIC_PAIRS, winners)
    ratings = dict(zip(TASK_IDS, levels))
    bumped_dim = TASK_IDS[index]
    if ratings[bumped_dim] + bump > 100:
        bump = 100 - ratings[bumped_dim]
    if bump == 0:
        return
    higher = dict(ratings)
    higher[bumped_dim] += bump
    before = score_session(choices, ratings, CLASSIC6, "classic")
    after = score_session(choices, higher, CLASSIC6, "classic")
    weights = tally_weights(choices, CLASSIC6, "classic")
    if weights[bumped_dim] > 0:
        assert after.weighted_task > before.weighted_task
    else:
        assert after.weighted_task == before.weighted_task


@given(grouped_winners, st.lists(rating_values, min_size=11, max_size=11), st.randoms())
def test_permutation_invariance(winners, levels, rng):
    choices = winners_to_choices(GROUPED_PAIRS, winners)
    ratings = dict(zip(XR11.ids, levels))
    score = score_session(choices, ratings, XR11, "xr_grouped")

    shuffled = list(choices)
    rng.shuffle(shuffled)
    reversed_ratings = dict(reversed(list(ratings.items())))
    again = score_session(shuffled, reversed_ratings, XR11, "xr_grouped")
    assert again == score
    assert again.to_wire() == score.to_wire()


@settings(max_examples=200)
@given(full_winners, st.lists(rating_values, min_size=11, max_size=11))
def test_scores_always_in_range(winners, levels):
    choices = winners_to_choices(FULL_PAIRS, winners)
    ratings = dict(zip(XR11.ids, levels))
    score = score_session(choices, ratings, XR11, "xr_full")
    for value in (score.raw_task, score.weighted_task, score.weighted_technology):
        assert 0 <= value <= 100


def test_oracle_equivalence_random_sessions():
    rng = random.Random(2024)
    cases = [
        (CLASSIC6, "classic", CLASSIC_PAIRS),
        (XR11, "xr_grouped", GROUPED_PAIRS),
        (XR11, "xr_full", FULL_PAIRS),
    ]
    for _ in range(300):
        dims, mode, pairs = cases[rng.randrange(3)]
        choices = random_choices(rng, pairs)
        ratings = random_ratings(rng, dims.ids)
        mine = score_session(choices, ratings, dims, mode)
        raw, main, tech = naive_score_session(
            [(c.pair, c.chosen) for c in choices], ratings, mode
        )
        assert abs(float(mine.raw_task) - raw) < 1e-9
        assert abs(float(mine.weighted_task) - main) < 1e-9
        if tech is None:
            assert mine.weighted_technology is None
        else:
            assert abs(float(mine.weighted_technology) - tech) < 1e-9
