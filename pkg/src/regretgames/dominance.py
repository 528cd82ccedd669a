"""Weak dominance between pure strategies and the surviving strategy sets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InputError
from .game import Game, Restriction


@dataclass(frozen=True)
class RationalSet:
    """Strategies of one player that no other strategy weakly dominates.

    ``eliminated`` pairs each removed strategy with its lowest-index
    dominating witness, so reports stay auditable.
    """

    player: int
    allowed: tuple[int, ...]
    eliminated: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "player": self.player,
            "allowed": list(self.allowed),
            "eliminated": [
                {"strategy": s, "dominated_by": w} for s, w in self.eliminated
            ],
        }


def _dominates_on(rows, s: int, s_prime: int, opponent_indices) -> bool:
    # s weakly dominates s_prime: never worse, strictly better somewhere.
    row_s, row_p = rows[s], rows[s_prime]
    strict = False
    for q in opponent_indices:
        a, b = row_s[q], row_p[q]
        if a < b:
            return False
        if a > b:
            strict = True
    return strict


def weakly_dominates(game: Game, player: int, s: int, s_prime: int) -> bool:
    """True iff strategy ``s`` weakly dominates ``s_prime`` for ``player``."""
    rows = game.payoff_matrix(player)
    for idx in (s, s_prime):
        if not 0 <= idx < len(rows):
            raise InputError(f"strategy {idx} out of range for player {player}")
    if s == s_prime:
        return False
    return _dominates_on(rows, s, s_prime, range(len(rows[0])))


def _surviving(rows, candidates, opponent_indices):
    """Split candidates into (allowed, eliminated-with-witness) by pairwise scan."""
    allowed = []
    eliminated = []
    for s in candidates:
        witness = None
        for s_prime in candidates:
            if s_prime != s and _dominates_on(rows, s_prime, s, opponent_indices):
                witness = s_prime
                break  # candidates scan ascending, so the first hit is the lowest index
        if witness is None:
            allowed.append(s)
        else:
            eliminated.append((s, witness))
    return allowed, eliminated


def rational_set(game: Game, player: int) -> RationalSet:
    """Single elimination round against the opponents' full profile space."""
    rows = game.payoff_matrix(player)
    allowed, eliminated = _surviving(
        rows, list(range(len(rows))), range(game.opponent_profile_count(player))
    )
    return RationalSet(player, tuple(allowed), tuple(eliminated))


def _opponent_indices_for(game, player, allowed_sets):
    others = [j for j in range(game.player_count) if j != player]
    strides = [1] * len(others)
    for i in range(len(others) - 2, -1, -1):
        strides[i] = strides[i + 1] * game.strategy_counts[others[i + 1]]
    return [
        sum(choice * stride for choice, stride in zip(combo, strides))
        for combo in itertools.product(*(allowed_sets[j] for j in others))
    ]


def iterated_rational_sets(game: Game, rounds: int) -> list[RationalSet]:
    """Re-run elimination on the surviving strategies, up to ``rounds`` times.

    All players update simultaneously each round; round 1 equals
    :func:`rational_set` exactly. Stops early at a fixed point. This is an
    opt-in extension; single-round elimination is the default everywhere else.
    """
    if not isinstance(rounds, int) or rounds < 1:
        raise InputError(f"rounds must be a positive integer, got {rounds!r}")
    n = game.player_count
    allowed = [list(range(c)) for c in game.strategy_counts]
    eliminated: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for _ in range(rounds):
        new_allowed = []
        new_eliminated = []
        for player in range(n):
            rows = game.payoff_matrix(player)
            indices = _opponent_indices_for(game, player, allowed)
            kept, removed = _surviving(rows, allowed[player], indices)
            new_allowed.append(kept)
            new_eliminated.append(removed)
        if new_allowed == allowed:
            break
        allowed = new_allowed
        for player in range(n):
            eliminated[player].extend(new_eliminated[player])
    return [
        RationalSet(player, tuple(allowed[player]), tuple(eliminated[player]))
        for player in range(n)
    ]


def rational_restriction(game: Game) -> Restriction:
    """Package every player's surviving set for the solver's RATIONAL mode."""
    return Restriction(
        tuple(rational_set(game, player).allowed for player in range(game.player_count)),
        "rational",
    )
