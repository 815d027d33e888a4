"""nsgames: multi-player non-local games under no-signalling and
sub-no-signalling strategies, with everything computed exactly.

The package models finite games (query distribution + 0/1 predicate), decides
membership of correlations in the no-signalling (NS) and sub-no-signalling
(SNOS) polytopes with witnesses, computes exact NS/SNOS/classical game values
by rational linear programming, builds parallel-repetition and threshold
games, implements the constructive repair procedures (two-player bump-up,
maximal-coupling marginal replacement, multi-marginal and SNOS
reconstruction, nearest-NS projection), and evaluates the closed-form
exponential repetition/concentration bounds next to exactly computed values.
"""

from .bounds import (
    BoundParams,
    BoundReport,
    bound_cor1,
    bound_thm1_concentration,
    bound_thm1_repetition,
    bound_thm3,
    c_ell,
    definetti_prefactor,
    dominates,
    split_bound,
    split_epsilon_concentration,
    split_epsilon_repetition,
    verify_domination,
    verify_sandwich,
)
from .catalog import (
    GameSpec,
    anticorrelation_game,
    builtin_catalog,
    chsh_game,
    example_snos_strategy,
    pr_box,
    random_game,
)
from .errors import (
    DomainError,
    NsGamesError,
    ResourceLimitError,
    ShapeError,
    UnsupportedError,
)
from .exact_lp import LpProblem, LpSolution, lp_solve, objective_value, residuals, satisfies
from .game_model import (
    DEFAULT_TABLE_CAP,
    Correlation,
    Game,
    JointDistribution,
    MarginalTable,
    SubsetIndex,
    correlation_from_json_dict,
    correlation_to_json_dict,
    game_from_json_dict,
    game_to_json_dict,
    marginal,
    permute_players,
    permute_players_correlation,
    repeat_game,
    singles_complement_subsets,
    strict_subsets,
    symmetrize,
    tensor_power,
    threshold_game,
    winning_probability,
)
from .polytopes import (
    NS_MODE_ALL,
    NS_MODE_SINGLES,
    MarginalBound,
    MembershipReport,
    Violation,
    fidelity,
    is_ns,
    is_snos,
    marginal_consistency_distance,
    minimal_dominating_marginal,
    p_epsilon_membership,
    tilde_fidelity,
    trace_distance,
)
from .rationals import Rational, as_rational, format_rational, parse_rational
from .repair import (
    ReconstructionProblem,
    bump_up,
    coupling_adjust,
    maximal_coupling,
    nearest_ns,
    reconstruct_multi_marginal,
    reconstruct_snos,
)
from .values import (
    DEFAULT_STRATEGY_CAP,
    MODEL_CLASSICAL,
    MODEL_NS,
    MODEL_SNOS,
    ValueResult,
    value_classical,
    value_ns,
    value_snos,
)

__version__ = "0.1.0"
