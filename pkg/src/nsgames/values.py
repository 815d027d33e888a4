"""Exact game values for the no-signalling, sub-no-signalling and classical
strategy classes.

The NS and SNOS values are linear programs over the correlation table:

* NS:   maximize sum T.V.P  over P >= 0, normalized per input, with the
  complement-of-a-singleton marginal equalities (sufficient for NS; the
  returned witness is nevertheless re-verified against *all* subsets).
* SNOS: same objective over P >= 0 with auxiliary dominator tables
  M_I(a_I, x_I) per nonempty strict subset, the constraints
  P(a_I|x) <= M_I(a_I, x_I), per-x_I dominator mass at most 1, and total
  mass at most 1 per input.

Both LPs are assembled in a symmetry-reduced variable space: entries of P
(and of the M tables) that lie in one orbit of the game's verified symmetry
group share a single variable.  Averaging an optimal solution over the group
is again feasible with the same objective, so the quotient LP has exactly the
original optimum; the expanded witness is re-verified after every solve.  The
caller can pass `rounds=n` for games built by `repeat_game`/`threshold_game`
to enable round-permutation symmetries — candidates are checked exactly
against (T, V) before use, so a wrong hint can only cost speed, never
correctness.

The classical value is a brute-force maximum over all deterministic
strategies (the extreme points of the classical set), which doubles as an
LP-free oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import _mixedradix as mr
from ._symmetry import (
    Symmetry,
    index_action,
    player_permutation_candidates,
    round_permutation_candidates,
    subset_action,
    symmetry_group,
)
from .errors import NsGamesError, ResourceLimitError, ShapeError
from .exact_lp import LpProblem, LpSolution, lp_solve
from .game_model import (
    DEFAULT_TABLE_CAP,
    Correlation,
    Game,
    input_projection,
    singles_complement_subsets,
    strict_subsets,
    winning_probability,
)
from .polytopes import NS_MODE_ALL, is_ns, is_snos

#: Default cap on the deterministic-strategy enumeration of value_classical.
DEFAULT_STRATEGY_CAP = 10**8

_ZERO = Fraction(0)
_ONE = Fraction(1)

MODEL_NS = "ns"
MODEL_SNOS = "snos"
MODEL_CLASSICAL = "classical"


@dataclass(frozen=True)
class ValueResult:
    """An exact game value together with an optimal strategy witness.

    The witness always passes the membership check of its model and achieves
    the reported value exactly (both re-verified before this object is
    returned).
    """

    model: str
    value: Fraction
    strategy: Correlation


# --- symmetry plumbing ------------------------------------------------------


def _base_alphabets(sizes: tuple[int, ...], rounds: int) -> tuple[int, ...]:
    base = []
    for size in sizes:
        root = mr.integer_nth_root(size, rounds)
        if root is None:
            raise ShapeError(
                f"rounds={rounds} given, but alphabet size {size} has no exact integer root"
            )
        base.append(root)
    return tuple(base)


def _group_perms(
    game: Game, rounds: int, use_symmetry: bool
) -> list[tuple[Symmetry, list[int], list[int]]]:
    candidates: list[Symmetry] = []
    if use_symmetry:
        candidates.extend(player_permutation_candidates(game))
    if rounds > 1:
        base_in = _base_alphabets(game.input_alphabets, rounds)
        base_out = _base_alphabets(game.output_alphabets, rounds)
        candidates.extend(round_permutation_candidates(base_in, base_out, rounds))
    group = symmetry_group(game, candidates)
    return [
        (
            sym,
            index_action(sym, game.input_alphabets, sym.input_perms),
            index_action(sym, game.output_alphabets, sym.output_perms),
        )
        for sym in group
    ]


def _pair_orbits(
    n_x: int, n_a: int, group: list[tuple[Symmetry, list[int], list[int]]]
) -> tuple[list[int], int]:
    """Orbit id per P-table index (x * n_a + a), ids in first-seen order."""
    orbit_of = [-1] * (n_x * n_a)
    count = 0
    for seed in range(n_x * n_a):
        if orbit_of[seed] >= 0:
            continue
        stack = [seed]
        orbit_of[seed] = count
        while stack:
            cur = stack.pop()
            x, a = divmod(cur, n_a)
            for _, px, pa in group[1:]:
                img = px[x] * n_a + pa[a]
                if orbit_of[img] < 0:
                    orbit_of[img] = count
                    stack.append(img)
        count += 1
    return orbit_of, count


def _output_groups(
    output_alphabets: tuple[int, ...], members: tuple[int, ...]
) -> tuple[int, list[list[int]]]:
    """(n_a_I, lists of joint outputs sharing each a_I restriction)."""
    out_sizes = tuple(output_alphabets[i] for i in members)
    n_a_i = mr.table_size(out_sizes)
    groups: list[list[int]] = [[] for _ in range(n_a_i)]
    for a in range(mr.table_size(output_alphabets)):
        tup = mr.decode(a, output_alphabets)
        groups[mr.encode(tuple(tup[i] for i in members), out_sizes)].append(a)
    return n_a_i, groups


class _QuotientRows:
    """Accumulates full-space constraint rows projected onto orbit variables.

    Rows of one symmetry orbit project to identical quotient rows, so a
    dedupe by canonical form yields exactly one row per constraint orbit.
    """

    def __init__(self) -> None:
        self._rows: dict[tuple, tuple[dict[int, Fraction], str, Fraction]] = {}

    def add(self, entries: dict[int, Fraction], relation: str, rhs: Fraction) -> None:
        clean = {var: c for var, c in entries.items() if c != 0}
        if not clean:
            return  # the orbit identification already enforces this row
        key = (relation, rhs, tuple(sorted(clean.items())))
        self._rows.setdefault(key, (clean, relation, rhs))

    def to_constraints(self, n_vars: int) -> tuple:
        out = []
        for clean, relation, rhs in self._rows.values():
            row = [_ZERO] * n_vars
            for var, coeff in clean.items():
                row[var] = coeff
            out.append((tuple(row), relation, rhs))
        return tuple(out)


def _project(entries: dict[int, Fraction], orbit_of: list[int]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for idx, coeff in entries.items():
        var = orbit_of[idx]
        out[var] = out.get(var, _ZERO) + coeff
    return out


def _objective(game: Game, orbit_of: list[int], n_orbits: int, extra: int) -> tuple:
    obj = [_ZERO] * (n_orbits + extra)
    n_a = game.n_outputs
    for x in range(game.n_inputs):
        t = game.distribution[x]
        if t == 0:
            continue
        row = x * n_a
        for a in range(n_a):
            if game.predicate[row + a]:
                obj[orbit_of[row + a]] += t
    return tuple(obj)


def _check_cap(game: Game, table_cap: int, what: str) -> None:
    required = game.n_inputs * game.n_outputs
    if required > table_cap:
        raise ResourceLimitError(
            f"{what} needs an LP over a correlation table of {required} entries "
            f"(cap {table_cap})"
        )


def _expand_witness(
    values: tuple[Fraction, ...], orbit_of: list[int], game: Game
) -> Correlation:
    densities = tuple(values[orbit_of[idx]] for idx in range(game.n_inputs * game.n_outputs))
    return Correlation(game.input_alphabets, game.output_alphabets, densities)


def _solved(problem: LpProblem, pivoting: str, what: str) -> LpSolution:
    solution = lp_solve(problem, pivoting=pivoting)
    if solution.status != "optimal":
        raise NsGamesError(f"internal error: the {what} LP reported {solution.status}")
    return solution


def value_ns(
    game: Game,
    *,
    rounds: int = 1,
    use_symmetry: bool = True,
    table_cap: int = DEFAULT_TABLE_CAP,
    pivoting: str = "dantzig-lex",
) -> ValueResult:
    """Exact NS value and an optimal no-signalling witness."""
    _check_cap(game, table_cap, "value_ns")
    group = _group_perms(game, rounds, use_symmetry)
    n_x, n_a = game.n_inputs, game.n_outputs
    orbit_of, n_orbits = _pair_orbits(n_x, n_a, group)

    rows = _QuotientRows()
    for x in range(n_x):
        rows.add(_project({x * n_a + a: _ONE for a in range(n_a)}, orbit_of), "=", _ONE)
    for subset in singles_complement_subsets(game.players):
        members = subset.members
        x_proj = input_projection(game.input_alphabets, members)
        n_a_i, out_groups = _output_groups(game.output_alphabets, members)
        blocks: dict[int, list[int]] = {}
        for x in range(n_x):
            blocks.setdefault(x_proj[x], []).append(x)
        for xs in blocks.values():
            ref = xs[0]
            for x in xs[1:]:
                for a_i in range(n_a_i):
                    entries: dict[int, Fraction] = {}
                    for a in out_groups[a_i]:
                        entries[x * n_a + a] = entries.get(x * n_a + a, _ZERO) + _ONE
                        entries[ref * n_a + a] = entries.get(ref * n_a + a, _ZERO) - _ONE
                    rows.add(_project(entries, orbit_of), "=", _ZERO)

    problem = LpProblem(
        _objective(game, orbit_of, n_orbits, 0),
        rows.to_constraints(n_orbits),
        maximize=True,
    )
    solution = _solved(problem, pivoting, "NS value")
    strategy = _expand_witness(solution.witness, orbit_of, game)
    return _verified(MODEL_NS, solution.value, game, strategy)


def value_snos(
    game: Game,
    *,
    rounds: int = 1,
    use_symmetry: bool = True,
    table_cap: int = DEFAULT_TABLE_CAP,
    pivoting: str = "dantzig-lex",
) -> ValueResult:
    """Exact SNOS value and an optimal sub-no-signalling witness."""
    _check_cap(game, table_cap, "value_snos")
    group = _group_perms(game, rounds, use_symmetry)
    n_x, n_a = game.n_inputs, game.n_outputs
    orbit_of, n_orbits = _pair_orbits(n_x, n_a, group)

    # dominator variables M_I(a_I, x_I), orbit-reduced like the P table
    m_entries: list[tuple[int, int, int]] = []  # (mask, x_i, a_i)
    m_pos: dict[tuple[int, int, int], int] = {}
    mask_info: dict[int, tuple] = {}
    for subset in strict_subsets(game.players, include_empty=False):
        members = subset.members
        in_sizes = tuple(game.input_alphabets[i] for i in members)
        out_sizes = tuple(game.output_alphabets[i] for i in members)
        mask_info[subset.mask()] = (members, in_sizes, out_sizes)
        for x_i in range(mr.table_size(in_sizes)):
            for a_i in range(mr.table_size(out_sizes)):
                m_pos[(subset.mask(), x_i, a_i)] = len(m_entries)
                m_entries.append((subset.mask(), x_i, a_i))

    m_orbit_of = [-1] * len(m_entries)
    n_m_orbits = 0
    for seed in range(len(m_entries)):
        if m_orbit_of[seed] >= 0:
            continue
        stack = [seed]
        m_orbit_of[seed] = n_m_orbits
        while stack:
            mask, x_i, a_i = m_entries[stack.pop()]
            members, in_sizes, out_sizes = mask_info[mask]
            a_tup = mr.decode(a_i, out_sizes)
            x_tup = mr.decode(x_i, in_sizes)
            for sym, _, _ in group[1:]:
                nm, na, nx = subset_action(sym, members, a_tup, x_tup)
                nmask = sum(1 << i for i in nm)
                _, nin, nout = mask_info[nmask]
                img = m_pos[(nmask, mr.encode(nx, nin), mr.encode(na, nout))]
                if m_orbit_of[img] < 0:
                    m_orbit_of[img] = n_m_orbits
                    stack.append(img)
        n_m_orbits += 1

    def m_var(mask: int, x_i: int, a_i: int) -> int:
        return n_orbits + m_orbit_of[m_pos[(mask, x_i, a_i)]]

    rows = _QuotientRows()
    for x in range(n_x):  # empty subset: total mass at most 1 per input
        rows.add(_project({x * n_a + a: _ONE for a in range(n_a)}, orbit_of), "<=", _ONE)
    for mask, (members, in_sizes, out_sizes) in mask_info.items():
        x_proj = input_projection(game.input_alphabets, members)
        n_a_i, out_groups = _output_groups(game.output_alphabets, members)
        for x in range(n_x):
            for a_i in range(n_a_i):
                entries = _project(
                    {x * n_a + a: _ONE for a in out_groups[a_i]}, orbit_of
                )
                var = m_var(mask, x_proj[x], a_i)
                entries[var] = entries.get(var, _ZERO) - _ONE
                rows.add(entries, "<=", _ZERO)
        for x_i in range(mr.table_size(in_sizes)):
            entries = {}
            for a_i in range(n_a_i):
                var = m_var(mask, x_i, a_i)
                entries[var] = entries.get(var, _ZERO) + _ONE
            rows.add(entries, "<=", _ONE)

    n_vars = n_orbits + n_m_orbits
    problem = LpProblem(
        _objective(game, orbit_of, n_orbits, n_m_orbits),
        rows.to_constraints(n_vars),
        maximize=True,
    )
    solution = _solved(problem, pivoting, "SNOS value")
    strategy = _expand_witness(solution.witness, orbit_of, game)
    return _verified(MODEL_SNOS, solution.value, game, strategy)


def _verified(model: str, value: Fraction, game: Game, strategy: Correlation) -> ValueResult:
    """Defense against LP assembly bugs: cheap exact re-checks of the witness."""
    achieved = winning_probability(game, strategy)
    if achieved != value:
        raise NsGamesError(
            f"internal error: {model} witness wins with {achieved}, LP reported {value}"
        )
    if model == MODEL_NS:
        report = is_ns(strategy, NS_MODE_ALL)
    elif model == MODEL_SNOS:
        report = is_snos(strategy)
    else:
        report = is_ns(strategy, NS_MODE_ALL)  # deterministic strategies are NS
    if not report.member:
        raise NsGamesError(f"internal error: {model} witness failed membership: {report.violation}")
    return ValueResult(model, value, strategy)


def value_classical(game: Game, *, strategy_cap: int = DEFAULT_STRATEGY_CAP) -> ValueResult:
    """Exact classical value by exhaustive deterministic-strategy enumeration.

    Convexity puts the optimum at a deterministic strategy, so enumeration is
    both the computation and an independent oracle.  Ties resolve to the
    lexicographically smallest strategy (players ordered, inputs ordered).
    """
    players = game.players
    counts = [game.output_alphabets[i] ** game.input_alphabets[i] for i in range(players)]
    total = 1
    for c in counts:
        total *= c
    if total > strategy_cap:
        raise ResourceLimitError(
            f"value_classical would enumerate {total} deterministic strategies "
            f"(cap {strategy_cap}); no LP-free bound is available"
        )

    support = [
        (x, game.distribution[x], mr.decode(x, game.input_alphabets))
        for x in range(game.n_inputs)
        if game.distribution[x] != 0
    ]
    tables = [
        list(itertools.product(range(game.output_alphabets[i]), repeat=game.input_alphabets[i]))
        for i in range(players)
    ]
    n_a = game.n_outputs
    out_sizes = game.output_alphabets
    best_value = None
    best_choice = None
    for choice in itertools.product(*tables):
        value = _ZERO
        for x, t, x_tup in support:
            a = mr.encode(tuple(choice[i][x_tup[i]] for i in range(players)), out_sizes)
            if game.predicate[x * n_a + a]:
                value += t
        if best_value is None or value > best_value:
            best_value = value
            best_choice = choice

    densities = [_ZERO] * (game.n_inputs * n_a)
    for x in range(game.n_inputs):
        x_tup = mr.decode(x, game.input_alphabets)
        a = mr.encode(tuple(best_choice[i][x_tup[i]] for i in range(players)), out_sizes)
        densities[x * n_a + a] = _ONE
    strategy = Correlation(game.input_alphabets, game.output_alphabets, tuple(densities))
    return _verified(MODEL_CLASSICAL, best_value, game, strategy)
