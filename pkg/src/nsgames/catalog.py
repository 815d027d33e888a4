"""Built-in games and reference strategies, plus seeded random game generation.

The random generator is pinned to a fixed, documented algorithm (Python's
Mersenne Twister via ``random.Random(seed)``, drawing ``getrandbits(16)`` per
distribution cell in input order and ``random()`` per predicate cell in
(input-major, output-minor) order) so identical seeds reproduce identical
games everywhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import _mixedradix as mr
from .errors import DomainError
from .game_model import Correlation, Game

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class GameSpec:
    """A catalog entry: a named game and optional reference strategies."""

    name: str
    game: Game
    strategies: tuple[tuple[str, Correlation, str], ...] = field(default_factory=tuple)
    # strategies hold (label, correlation, note); notes say what the strategy does


def anticorrelation_game() -> Game:
    """Three players with binary inputs/outputs; queries are uniform over
    011, 101, 110 (all-ones never asked); whenever two players receive input
    1 their outputs must differ."""
    inputs = (2, 2, 2)
    outputs = (2, 2, 2)
    third = Fraction(1, 3)
    distribution = []
    for x in range(8):
        tup = mr.decode(x, inputs)
        distribution.append(third if sum(tup) == 2 else _ZERO)
    predicate = []
    for x in range(8):
        x_tup = mr.decode(x, inputs)
        ones = [i for i in range(3) if x_tup[i] == 1]
        for a in range(8):
            a_tup = mr.decode(a, outputs)
            ok = all(
                a_tup[i] != a_tup[j] for pos, i in enumerate(ones) for j in ones[pos + 1 :]
            )
            predicate.append(1 if ok else 0)
    return Game(inputs, outputs, tuple(distribution), tuple(predicate))


def example_snos_strategy() -> Correlation:
    """The classic sub-normalized strategy winning the anticorrelation game
    with certainty: abstain on the never-asked all-ones query, answer
    uniformly when at most one input is 1, and perfectly anti-correlate the
    two players whose inputs are 1 otherwise."""
    inputs = (2, 2, 2)
    outputs = (2, 2, 2)
    eighth = Fraction(1, 8)
    quarter = Fraction(1, 4)
    densities = []
    for x in range(8):
        x_tup = mr.decode(x, inputs)
        ones = [i for i in range(3) if x_tup[i] == 1]
        for a in range(8):
            a_tup = mr.decode(a, outputs)
            if len(ones) == 3:
                densities.append(_ZERO)
            elif len(ones) <= 1:
                densities.append(eighth)
            else:
                i, j = ones
                densities.append(quarter if a_tup[i] != a_tup[j] else _ZERO)
    return Correlation(inputs, outputs, tuple(densities))


def chsh_game() -> Game:
    """Two players, binary everything, uniform queries; win iff the XOR of
    the outputs equals the AND of the inputs."""
    inputs = (2, 2)
    outputs = (2, 2)
    quarter = Fraction(1, 4)
    distribution = (quarter,) * 4
    predicate = []
    for x in range(4):
        x1, x2 = mr.decode(x, inputs)
        for a in range(4):
            a1, a2 = mr.decode(a, outputs)
            predicate.append(1 if (a1 ^ a2) == (x1 & x2) else 0)
    return Game(inputs, outputs, distribution, tuple(predicate))


def pr_box() -> Correlation:
    """The no-signalling correlation winning the XOR-of-AND game with
    certainty: mass 1/2 on each output pair consistent with the predicate."""
    inputs = (2, 2)
    outputs = (2, 2)
    half = Fraction(1, 2)
    densities = []
    for x in range(4):
        x1, x2 = mr.decode(x, inputs)
        for a in range(4):
            a1, a2 = mr.decode(a, outputs)
            densities.append(half if (a1 ^ a2) == (x1 & x2) else _ZERO)
    return Correlation(inputs, outputs, tuple(densities))


def random_game(
    seed: int,
    players: int,
    input_sizes: tuple[int, ...] | list[int],
    output_sizes: tuple[int, ...] | list[int],
    *,
    full_support: bool = False,
    predicate_density: float = 0.5,
) -> Game:
    """A seeded random game; identical arguments give identical games.

    The distribution is quantized to denominator 2**16: raw weights are drawn
    as 16-bit integers, scaled by integer division, and the rounding residual
    is assigned to the last input so the table sums to exactly one (this also
    keeps LP coefficient bit-sizes bounded).  With ``full_support`` every
    input receives weight at least 2**-16.  Each predicate entry is 1 with
    probability ``predicate_density``.
    """
    if not 0 <= predicate_density <= 1:
        raise DomainError("predicate_density must lie in [0, 1]")
    input_sizes = tuple(int(s) for s in input_sizes)
    output_sizes = tuple(int(s) for s in output_sizes)
    if len(input_sizes) != players or len(output_sizes) != players:
        raise DomainError("alphabet size lists must have one entry per player")
    rng = random.Random(seed)
    n_x = mr.table_size(input_sizes)
    n_a = mr.table_size(output_sizes)
    denom = 1 << 16

    raw = [rng.getrandbits(16) + (1 if full_support else 0) for _ in range(n_x)]
    total_raw = sum(raw)
    weights = [0] * n_x
    if total_raw == 0:
        weights[-1] = denom
    elif full_support:
        budget = denom - n_x
        if budget < 0:
            raise DomainError("full support needs at least 2**16 inputs' worth of mass")
        weights = [1 + (budget * r) // total_raw for r in raw]
        weights[-1] += denom - sum(weights)
    else:
        weights = [(denom * r) // total_raw for r in raw]
        weights[-1] += denom - sum(weights)
    distribution = tuple(Fraction(w, denom) for w in weights)

    predicate = tuple(
        1 if rng.random() < predicate_density else 0 for _ in range(n_x * n_a)
    )
    return Game(input_sizes, output_sizes, distribution, predicate)


def builtin_catalog() -> dict[str, GameSpec]:
    """The named catalog entries, each with its reference strategies."""
    a3 = anticorrelation_game()
    chsh = chsh_game()
    return {
        "a3": GameSpec(
            "a3",
            a3,
            (
                (
                    "abstaining-anticorrelation",
                    example_snos_strategy(),
                    "sub-normalized strategy winning every asked query with certainty",
                ),
            ),
        ),
        "chsh": GameSpec(
            "chsh",
            chsh,
            (
                (
                    "pr-box",
                    pr_box(),
                    "no-signalling strategy winning every query with certainty",
                ),
            ),
        ),
    }
