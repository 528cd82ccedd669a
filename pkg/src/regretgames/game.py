"""Finite normal-form games with exact rational payoffs.

Games are immutable once built. Payoffs come either from a dense table or
from a pure evaluation rule ``(profile, player) -> Fraction``; all arithmetic
uses :class:`fractions.Fraction` end to end, so nothing ever rounds and
repeated queries of the same profile always agree.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Sequence

from .errors import InputError
from .rational import coerce_rational, format_rational, parse_rational

#: Largest profile count for which builders materialize a dense payoff table.
DEFAULT_DENSE_CAP = 10**6

PayoffRule = Callable[[tuple[int, ...], int], Fraction]


@dataclass(frozen=True)
class OpponentProfile:
    """Strategy choices for everyone except ``player``, in ascending player order."""

    player: int
    choices: tuple[int, ...]

    def combine(self, own_choice: int) -> tuple[int, ...]:
        """Insert ``own_choice`` at the excluded player's slot, giving a full profile."""
        full = list(self.choices)
        full.insert(self.player, own_choice)
        return tuple(full)


@dataclass(frozen=True)
class Restriction:
    """Allowed strategy index sets per player.

    Restrictions describe the universe of opponent behavior a worst case is
    taken over. ``label`` tags where the sets came from ("full", "rational",
    or "custom") and is echoed in reports.
    """

    allowed: tuple[tuple[int, ...], ...]
    label: str = "custom"

    def __post_init__(self):
        normalized = tuple(tuple(sorted(set(s))) for s in self.allowed)
        object.__setattr__(self, "allowed", normalized)

    @classmethod
    def full(cls, game: "Game") -> "Restriction":
        return cls(tuple(tuple(range(c)) for c in game.strategy_counts), "full")

    def validate_for(self, game: "Game") -> None:
        if len(self.allowed) != game.player_count:
            raise InputError(
                f"restriction covers {len(self.allowed)} players, game has {game.player_count}"
            )
        for player, strategies in enumerate(self.allowed):
            if not strategies:
                raise InputError(f"restriction allows no strategies for player {player}")
            for s in strategies:
                if not 0 <= s < game.strategy_counts[player]:
                    raise InputError(
                        f"restriction lists strategy {s} for player {player}, "
                        f"valid range is 0..{game.strategy_counts[player] - 1}"
                    )


class Game:
    """An n-player finite game (n >= 2) with exact rational utilities."""

    def __init__(self, strategy_counts: Sequence[int], *, table=None, rule=None, labels=None):
        counts = tuple(int(c) for c in strategy_counts)
        if len(counts) < 2:
            raise InputError(f"a game needs at least 2 players, got {len(counts)}")
        if any(c < 1 for c in counts):
            raise InputError(f"every player needs at least one strategy, got {counts}")
        if (table is None) == (rule is None):
            raise InputError("exactly one of a dense table or an evaluation rule is required")
        self._counts = counts
        self._labels = self._check_labels(labels, counts)
        # strides for flattening profiles in lexicographic order
        strides = [1] * len(counts)
        for i in range(len(counts) - 2, -1, -1):
            strides[i] = strides[i + 1] * counts[i + 1]
        self._strides = tuple(strides)
        self._cells = table  # flat list of per-player payoff tuples, or None
        self._rule = rule
        self._matrix_cache: dict[int, tuple] = {}

    @staticmethod
    def _check_labels(labels, counts):
        if labels is None:
            return None
        if len(labels) != len(counts):
            raise InputError("labels must list one label set per player")
        out = []
        for i, per_player in enumerate(labels):
            per_player = tuple(str(x) for x in per_player)
            if len(per_player) != counts[i]:
                raise InputError(
                    f"player {i} has {counts[i]} strategies but {len(per_player)} labels"
                )
            out.append(per_player)
        return tuple(out)

    @classmethod
    def from_cells(cls, strategy_counts, cells, labels=None) -> "Game":
        """Build a dense game from a flat lex-ordered list of payoff tuples."""
        game = cls(strategy_counts, table=list(cells), labels=labels)
        expected = game.profile_count
        if len(game._cells) != expected:
            raise InputError(f"expected {expected} cells, got {len(game._cells)}")
        return game

    @classmethod
    def from_rule(cls, strategy_counts, rule: PayoffRule, labels=None) -> "Game":
        """Build a lazily evaluated game from a pure payoff rule."""
        return cls(strategy_counts, rule=rule, labels=labels)

    # -- basic shape -------------------------------------------------------

    @property
    def player_count(self) -> int:
        return len(self._counts)

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return self._counts

    @property
    def strategy_labels(self):
        return self._labels

    @property
    def is_dense(self) -> bool:
        return self._cells is not None

    @property
    def profile_count(self) -> int:
        total = 1
        for c in self._counts:
            total *= c
        return total

    def profiles(self) -> Iterator[tuple[int, ...]]:
        """All strategy profiles in lexicographic order."""
        return itertools.product(*(range(c) for c in self._counts))

    def _flat_index(self, profile) -> int:
        return sum(c * s for c, s in zip(profile, self._strides))

    def validate_profile(self, profile) -> tuple[int, ...]:
        profile = tuple(profile)
        if len(profile) != self.player_count:
            raise InputError(
                f"profile length {len(profile)} does not match {self.player_count} players"
            )
        for i, choice in enumerate(profile):
            if not isinstance(choice, int) or isinstance(choice, bool):
                raise InputError(f"profile entry for player {i} is not an integer: {choice!r}")
            if not 0 <= choice < self._counts[i]:
                raise InputError(
                    f"strategy {choice} out of range 0..{self._counts[i] - 1} for player {i}"
                )
        return profile

    def _validate_player(self, player) -> int:
        if not isinstance(player, int) or isinstance(player, bool):
            raise InputError(f"player index must be an integer, got {player!r}")
        if not 0 <= player < self.player_count:
            raise InputError(f"player {player} out of range 0..{self.player_count - 1}")
        return player

    # -- payoff access -----------------------------------------------------

    def payoff(self, profile, player: int) -> Fraction:
        """Utility of ``player`` at ``profile``."""
        profile = self.validate_profile(profile)
        player = self._validate_player(player)
        if self._cells is not None:
            return self._cells[self._flat_index(profile)][player]
        return self._evaluate_rule(profile, player)

    def payoff_cell(self, profile) -> tuple[Fraction, ...]:
        """All players' utilities at ``profile``."""
        profile = self.validate_profile(profile)
        if self._cells is not None:
            return self._cells[self._flat_index(profile)]
        return tuple(self._evaluate_rule(profile, p) for p in range(self.player_count))

    def _evaluate_rule(self, profile, player) -> Fraction:
        value = self._rule(profile, player)
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise InputError(
                f"payoff rule returned {value!r} for profile {profile}; "
                "rules must return exact rationals"
            )
        return Fraction(value)

    # -- enumeration and best responses -------------------------------------

    def opponent_profiles(self, player: int) -> Iterator[OpponentProfile]:
        """Everyone-but-``player`` choice combinations, lexicographic in player order."""
        player = self._validate_player(player)
        others = [c for i, c in enumerate(self._counts) if i != player]
        for choices in itertools.product(*(range(c) for c in others)):
            yield OpponentProfile(player, choices)

    def opponent_profile_count(self, player: int) -> int:
        player = self._validate_player(player)
        total = 1
        for i, c in enumerate(self._counts):
            if i != player:
                total *= c
        return total

    def best_response_value(self, player: int, opponents) -> Fraction:
        """Highest utility ``player`` can get against fixed opponent choices."""
        player = self._validate_player(player)
        if isinstance(opponents, OpponentProfile):
            if opponents.player != player:
                raise InputError(
                    f"opponent profile excludes player {opponents.player}, not {player}"
                )
            choices = opponents.choices
        else:
            choices = tuple(opponents)
        opp = OpponentProfile(player, choices)
        return max(self.payoff(opp.combine(t), player) for t in range(self._counts[player]))

    def payoff_matrix(self, player: int):
        """Rows of ``player``'s payoffs, one row per own strategy.

        Returns ``rows`` with ``rows[s][q]`` the payoff of own strategy ``s``
        against the ``q``-th opponent profile in lexicographic order. The rows
        are built once per player and cached; games are immutable so the cache
        never invalidates.
        """
        player = self._validate_player(player)
        cached = self._matrix_cache.get(player)
        if cached is not None:
            return cached
        own = self._counts[player]
        rows = [[] for _ in range(own)]
        for opp in self.opponent_profiles(player):
            partial = list(opp.choices)
            partial.insert(player, 0)
            for s in range(own):
                partial[player] = s
                if self._cells is not None:
                    rows[s].append(self._cells[self._flat_index(partial)][player])
                else:
                    rows[s].append(self._evaluate_rule(tuple(partial), player))
        result = tuple(tuple(r) for r in rows)
        self._matrix_cache[player] = result
        return result

    # -- transforms ----------------------------------------------------------

    def affine_transform(self, player: int, scale, shift) -> "Game":
        """New game with this player's utilities mapped to ``scale*u + shift``."""
        player = self._validate_player(player)
        scale = coerce_rational(scale, "scale")
        shift = coerce_rational(shift, "shift")
        if scale <= 0:
            raise InputError(f"scale must be positive, got {scale}")
        if self._cells is not None:
            cells = [
                tuple(scale * v + shift if i == player else v for i, v in enumerate(cell))
                for cell in self._cells
            ]
            return Game.from_cells(self._counts, cells, labels=self._labels)
        base = self._rule

        def transformed(profile, p):
            value = base(profile, p)
            if p == player:
                return scale * Fraction(value) + shift
            return value

        return Game.from_rule(self._counts, transformed, labels=self._labels)

    # -- equality (dense only) ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Game):
            return NotImplemented
        if self._cells is None or other._cells is None:
            return self is other
        return (
            self._counts == other._counts
            and self._labels == other._labels
            and self._cells == other._cells
        )

    def __repr__(self):
        source = "dense" if self.is_dense else "lazy"
        return f"Game(players={self.player_count}, strategies={self._counts}, {source})"


def make_dense_game(strategy_counts, payoff_table, labels=None) -> Game:
    """Build a game from a nested payoff table.

    The table nests one level per player in player order; the innermost lists
    hold one exact rational per player ("p/q" strings or integers). Dimension
    errors name the offending axis.
    """
    counts = tuple(int(c) for c in strategy_counts)
    n = len(counts)
    cells: list[tuple[Fraction, ...]] = []

    def walk(node, depth, path):
        if depth == n:
            if not isinstance(node, (list, tuple)) or len(node) != n:
                raise InputError(
                    f"cell at {path} must list {n} payoffs, got {node!r}"
                )
            cells.append(tuple(parse_rational(v) for v in node))
            return
        if not isinstance(node, (list, tuple)) or len(node) != counts[depth]:
            have = len(node) if isinstance(node, (list, tuple)) else node
            raise InputError(
                f"axis {depth} (player {depth}) expects {counts[depth]} entries, "
                f"got {have!r} at {path}"
            )
        for i, child in enumerate(node):
            walk(child, depth + 1, path + (i,))

    walk(payoff_table, 0, ())
    return Game.from_cells(counts, cells, labels=labels)


# -- JSON interface ----------------------------------------------------------


def game_to_json(game: Game) -> dict:
    """Serialize a game to the dense JSON form (bit-exact round trip)."""
    if not game.is_dense:
        if game.profile_count > DEFAULT_DENSE_CAP:
            raise InputError(
                "cannot serialize a lazy game with more profiles than the dense cap"
            )
    counts = game.strategy_counts

    def build(depth, prefix):
        if depth == len(counts):
            return [format_rational(v) for v in game.payoff_cell(prefix)]
        return [build(depth + 1, prefix + (i,)) for i in range(counts[depth])]

    obj = {
        "players": game.player_count,
        "strategy_counts": list(counts),
    }
    if game.strategy_labels is not None:
        obj["labels"] = [list(ls) for ls in game.strategy_labels]
    obj["payoffs"] = build(0, ())
    return obj


def game_from_json(obj) -> Game:
    if not isinstance(obj, dict):
        raise InputError(f"game JSON must be an object, got {type(obj).__name__}")
    missing = {"players", "strategy_counts", "payoffs"} - set(obj)
    if missing:
        raise InputError(f"game JSON is missing keys: {sorted(missing)}")
    counts = obj["strategy_counts"]
    if not isinstance(counts, list):
        raise InputError("strategy_counts must be a list")
    if obj["players"] != len(counts):
        raise InputError(
            f"players={obj['players']} but strategy_counts lists {len(counts)} players"
        )
    return make_dense_game(counts, obj["payoffs"], labels=obj.get("labels"))


def save_game(game: Game, path) -> None:
    Path(path).write_text(json.dumps(game_to_json(game), indent=2) + "\n", encoding="utf-8")


def load_game(path) -> Game:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read game file {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"game file {path} is not valid JSON: {exc}") from exc
    return game_from_json(obj)
