import random
from fractions import Fraction

import pytest

from regretgames import (
    AssumptionError,
    BiddingSpec,
    InputError,
    bidding_utility,
    closed_form_competitive,
    closed_form_rational,
    make_bidding_game,
    minimax_regret,
    rational_restriction,
    verify_claims,
)
from support import random_bidding_spec


def test_utility_first_price_examples():
    spec = BiddingSpec((6, 4), 10, 1)
    assert bidding_utility(spec, (5, 3), 0) == Fraction(1, 10)
    assert bidding_utility(spec, (5, 3), 1) == 0
    # tie splits the surplus: each top bidder gets half
    assert bidding_utility(spec, (4, 4), 0) == Fraction(1, 10)
    assert bidding_utility(spec, (4, 4), 1) == 0
    # the split applies to negative surplus too
    assert bidding_utility(spec, (7, 7), 0) == Fraction(-1, 20)


def test_utility_third_price_example():
    spec = BiddingSpec((8, 6, 3), 10, 2)
    assert bidding_utility(spec, (8, 6, 3), 0) == Fraction(2, 10)
    assert bidding_utility(spec, (8, 6, 3), 1) == 0
    assert bidding_utility(spec, (8, 6, 3), 2) == 0


def test_utility_support_only_top_bidders():
    spec = BiddingSpec((8, 6, 3), 10, 3)
    rng = random.Random(1)
    for _ in range(200):
        bids = tuple(rng.randint(0, 10) for _ in range(3))
        top = max(bids)
        for player in range(3):
            value = bidding_utility(spec, bids, player)
            if bids[player] != top:
                assert value == 0


def test_utility_validation():
    spec = BiddingSpec((6, 4), 10, 1)
    with pytest.raises(InputError):
        bidding_utility(spec, (11, 0), 0)
    with pytest.raises(InputError):
        bidding_utility(spec, (5,), 0)


def test_spec_invariants():
    with pytest.raises(AssumptionError, match="distinct"):
        BiddingSpec((6, 6), 10, 1)
    with pytest.raises(AssumptionError, match="valuation < grid"):
        BiddingSpec((6, 4), 3, 1)
    with pytest.raises(AssumptionError, match="grid size >= player count"):
        BiddingSpec((2, 3, 4, 5), 3, 1)
    with pytest.raises(AssumptionError, match="price rank"):
        BiddingSpec((6, 4), 10, 3)
    with pytest.raises(AssumptionError, match="2 players"):
        BiddingSpec((6,), 10, 1)


def test_game_construction_matches_utility():
    spec = BiddingSpec((6, 4), 10, 1)
    game = make_bidding_game(spec)
    assert game.strategy_counts == (11, 11)
    assert game.payoff((5, 3), 0) == bidding_utility(spec, (5, 3), 0)
    assert game.is_dense


def test_lazy_fallback_above_cap():
    spec = BiddingSpec((6, 4), 10, 1)
    lazy = make_bidding_game(spec, dense_cap=50)
    assert not lazy.is_dense
    dense = make_bidding_game(spec)
    for bids in ((0, 0), (5, 3), (10, 10), (4, 4)):
        for p in (0, 1):
            assert lazy.payoff(bids, p) == dense.payoff(bids, p)


def test_closed_forms_first_price():
    spec = BiddingSpec((6, 4), 10, 1)
    plain = closed_form_competitive(spec, 0)
    assert plain.predicted_regret == Fraction(3, 10)
    assert plain.predicted_bid is None
    rational = closed_form_rational(spec, 0)
    assert rational.predicted_regret == Fraction(1, 10)


def test_closed_forms_second_price():
    spec = BiddingSpec((6, 4), 10, 2)
    plain = closed_form_competitive(spec, 1)
    assert (plain.predicted_bid, plain.predicted_regret) == (4, 0)
    rational = closed_form_rational(spec, 1)
    assert (rational.predicted_bid, rational.predicted_regret) == (4, 0)


def test_closed_forms_third_price():
    spec = BiddingSpec((8, 6, 3), 10, 3)
    assert closed_form_competitive(spec, 1).predicted_bid == 10  # min(12, 10)
    assert closed_form_rational(spec, 0).predicted_bid == 10  # min(16-3, 10)
    assert closed_form_rational(spec, 1).predicted_bid == 9  # min(12-3, 10)
    low = closed_form_rational(spec, 2)
    assert (low.predicted_bid, low.predicted_regret) == (3, 0)


def test_no_closed_form_above_three():
    spec = BiddingSpec((2, 3, 4, 5), 10, 4)
    assert closed_form_competitive(spec, 0) is None
    assert closed_form_rational(spec, 0) is None
    with pytest.raises(InputError, match="no closed forms"):
        verify_claims(spec)


# Frozen solver values for the l=(6,4), T=10, k=1 instance, computed by
# exhaustive enumeration over all 11x11 bid profiles and checked by hand.
FIRST_PRICE_ORACLE = {
    ("full", 0): ("1/5", (2, 3)),
    ("full", 1): ("1/10", (1, 2)),
    ("rational", 0): ("1/10", (3,)),
    ("rational", 1): ("1/20", (2,)),
}


def test_first_price_oracle_anchors():
    spec = BiddingSpec((6, 4), 10, 1)
    game = make_bidding_game(spec)
    restriction = rational_restriction(game)
    for (mode, player), (value, argmin) in FIRST_PRICE_ORACLE.items():
        report = minimax_regret(game, player, restriction if mode == "rational" else None)
        assert str(report.minimax_value) == value
        assert report.argmin == argmin


def test_verify_claims_second_price_all_match():
    report = verify_claims(BiddingSpec((6, 4), 10, 2))
    assert report.all_match
    for entry in report.entries:
        assert entry.oracle_minimax == 0
        assert entry.predicted_bid in entry.oracle_argmin


def test_verify_claims_first_price_divergences_are_recorded():
    report = verify_claims(BiddingSpec((6, 4), 10, 1))
    flagged = {
        (e.mode, e.player): (str(e.predicted_regret), str(e.oracle_minimax))
        for e in report.mismatches()
    }
    assert flagged == {
        ("full", 0): ("3/10", "1/5"),
        ("full", 1): ("1/5", "1/10"),
        ("rational", 1): ("1/10", "1/20"),
    }
    # deterministic: byte-identical reports on repeat runs
    assert verify_claims(BiddingSpec((6, 4), 10, 1)).to_json() == report.to_json()


def test_verify_claims_third_price_example_matches():
    report = verify_claims(BiddingSpec((8, 6, 3), 10, 3))
    assert report.all_match


def test_divergence_text_table():
    text = verify_claims(BiddingSpec((6, 4), 10, 1)).to_text()
    lines = text.splitlines()
    assert lines[0].startswith("player")
    assert any("NO" in line for line in lines)


def test_subset_monotonicity_on_random_specs():
    rng = random.Random(5)
    for _ in range(5):
        spec = random_bidding_spec(rng, price_rank=rng.randint(1, 2), max_grid=9)
        game = make_bidding_game(spec)
        restriction = rational_restriction(game)
        for player in range(spec.player_count):
            assert (
                minimax_regret(game, player, restriction).minimax_value
                <= minimax_regret(game, player).minimax_value
            )
