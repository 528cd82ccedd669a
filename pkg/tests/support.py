"""Shared generators and fixtures for the test suite (seeded, deterministic)."""

from __future__ import annotations

import random

from regretgames import BiddingSpec, Game, GameSequence, make_dense_game


def anchor_game() -> Game:
    """The running 2x2 example: minimax regret 1 at strategy 1 for player 0."""
    return make_dense_game((2, 2), [[[4, 0], [0, 3]], [[3, 1], [3, 2]]])


def random_dense_game(rng: random.Random, max_players=3, max_strategies=5,
                      low=-9, high=9) -> Game:
    n = rng.randint(2, max_players)
    counts = tuple(rng.randint(1, max_strategies) for _ in range(n))
    cells = []
    total = 1
    for c in counts:
        total *= c
    for _ in range(total):
        cells.append(tuple(rng.randint(low, high) for _ in range(n)))
    return Game.from_cells(counts, cells)


def random_bidding_spec(rng: random.Random, price_rank: int, players=(2, 3),
                        max_grid=15) -> BiddingSpec:
    n = rng.choice(players)
    grid = rng.randint(max(4, n + 2), max_grid)
    valuations = tuple(rng.sample(range(2, grid), n))
    return BiddingSpec(valuations, grid, price_rank)


def random_stage_game(rng: random.Random, high=29) -> Game:
    """2x2 stage game: distinct non-negative payoffs per player, with the
    highest at least twice the second highest for both players."""
    while True:
        per_player = []
        for _ in range(2):
            values = rng.sample(range(0, high + 1), 4)
            ranked = sorted(values, reverse=True)
            if ranked[0] < 2 * ranked[1]:
                break
            per_player.append(values)
        if len(per_player) == 2:
            v0, v1 = per_player
            cells = [
                [[v0[0], v1[0]], [v0[1], v1[1]]],
                [[v0[2], v1[2]], [v0[3], v1[3]]],
            ]
            return make_dense_game((2, 2), cells)


def random_stage_pair(rng: random.Random) -> tuple[Game, Game]:
    """Two stage games jointly satisfying the cross-stage payoff condition."""
    while True:
        a, b = random_stage_game(rng), random_stage_game(rng)
        seq = GameSequence((a, b))
        from regretgames import folk_condition_holds

        if all(folk_condition_holds(seq, p) for p in (0, 1)):
            return a, b
