"""Values and optimal equilibria of multi-player competitive Dynkin games."""

from .geometry import (
    OrthantSpec,
    inner_product,
    norm,
    penalized_projection,
    project_hyperplane,
    project_orthant,
    project_orthant_exhaustive,
)
from .model import (
    SATURATED,
    STRICT,
    TOL,
    SinglePeriodGame,
    WeightSystem,
    exercise_difference,
    exercise_set,
    mask_of,
    members,
    payoff_single,
    profile_from_mask,
    subgame_reduce,
    weight,
)
from .solver import (
    QuittingGame,
    Scenario,
    ScenarioSet,
    SolveResult,
    SubgamePerfectStrategy,
    quitting_payoff,
    solve_quitting,
    solve_quitting_subgame_perfect,
    solve_single,
    solve_single_stochastic,
)
from .stopping import (
    EventTree,
    Node,
    StoppingRule,
    ValueProcess,
    equilibrium_stopping,
    evaluate_natural_variant,
    evaluate_stopping_profile,
    stopping_rule,
    stopping_strategies,
    value_process,
)

__version__ = "0.1.0"
