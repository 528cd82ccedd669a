"""Worst-case additive regret and the strategies that minimize it.

The regret of a profile for a player is the best-response payoff against the
profile's opponents minus the payoff actually achieved. A strategy minimizing
the worst-case regret over a set of opponent behaviors is reported together
with the full per-strategy worst cases, so callers can check membership
rather than rely on tie-breaking.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .game import Game, OpponentProfile, Restriction


@dataclass(frozen=True)
class RegretReport:
    """Per-player summary: worst-case regret by strategy plus the minimizers.

    Every member of ``argmin`` attains ``minimax_value``; every non-member
    strictly exceeds it. ``restriction`` names the opponent universe used.
    """

    player: int
    restriction: str
    minimax_value: Fraction
    argmin: tuple[int, ...]
    worst_regret_per_strategy: tuple[Fraction, ...]

    @property
    def canonical_pick(self) -> int:
        """Lowest-index minimizer, used where a single strategy is needed."""
        return self.argmin[0]

    def to_json(self) -> dict:
        return {
            "player": self.player,
            "restriction": self.restriction,
            "minimax_regret": str(self.minimax_value),
            "argmin": list(self.argmin),
            "worst_regret_per_strategy": [str(v) for v in self.worst_regret_per_strategy],
        }


def regret(game: Game, player: int, profile) -> Fraction:
    """Best-response payoff against the profile's opponents minus the achieved payoff."""
    achieved = game.payoff(profile, player)
    opponents = tuple(c for i, c in enumerate(profile) if i != player)
    return game.best_response_value(player, OpponentProfile(player, opponents)) - achieved


def _selected_opponent_indices(game: Game, player: int, restriction: Restriction | None):
    """Indices into the lexicographic opponent enumeration chosen by a restriction."""
    if restriction is None:
        return range(game.opponent_profile_count(player))
    restriction.validate_for(game)
    others = [j for j in range(game.player_count) if j != player]
    strides = [1] * len(others)
    for i in range(len(others) - 2, -1, -1):
        strides[i] = strides[i + 1] * game.strategy_counts[others[i + 1]]
    return [
        sum(choice * stride for choice, stride in zip(combo, strides))
        for combo in itertools.product(*(restriction.allowed[j] for j in others))
    ]


def worst_case_regret(
    game: Game, player: int, own_strategy: int, restriction: Restriction | None = None
) -> Fraction:
    """Max regret of one strategy over all restricted opponent profiles.

    The inner best response always ranges over the player's full strategy
    set; only the opponents are restricted.
    """
    rows = game.payoff_matrix(player)
    if not 0 <= own_strategy < len(rows):
        raise InputError(f"strategy {own_strategy} out of range for player {player}")
    selected = _selected_opponent_indices(game, player, restriction)
    own_row = rows[own_strategy]
    return max(max(row[q] for row in rows) - own_row[q] for q in selected)


def minimax_regret(
    game: Game, player: int, restriction: Restriction | None = None
) -> RegretReport:
    """Solve one player: per-strategy worst regrets and the argmin set.

    Candidate strategies range over the player's full set regardless of any
    restriction; best-response values are computed once per opponent profile
    and reused across candidates.
    """
    rows = game.payoff_matrix(player)
    selected = _selected_opponent_indices(game, player, restriction)
    best = [max(row[q] for row in rows) for q in selected]
    worst = tuple(
        max(b - row[q] for b, q in zip(best, selected)) for row in rows
    )
    minimax = min(worst)
    argmin = tuple(s for s, w in enumerate(worst) if w == minimax)
    label = "full" if restriction is None else restriction.label
    return RegretReport(player, label, minimax, argmin, worst)


def all_player_reports(game: Game, mode: str = "full") -> list[RegretReport]:
    """One report per player, FULL or RATIONAL opponents."""
    if mode == "full":
        restriction = None
    elif mode == "rational":
        from .dominance import rational_restriction

        restriction = rational_restriction(game)
    else:
        raise InputError(f"mode must be 'full' or 'rational', got {mode!r}")
    return [minimax_regret(game, player, restriction) for player in range(game.player_count)]
