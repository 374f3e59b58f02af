"""Values of dynamic programming problems under arbitrary stage evaluations.

Computes theta-values by backward induction for finitely supported (or
certified-truncated) stage-weight distributions, reachability sets, the
inf-sup limit-value candidate on finite instances, stochastic (gambling
house) extensions, and the numerical checks that tie them together.
"""

from .errors import (ConfigError, DegenerateEvaluationError, EnumerationGuardError,
                     HorizonError, InvalidEvaluationError, InvalidInstanceError,
                     LimitDPError, NotUncontrolledError, UnknownStateError)
from .evaluations import (Evaluation, Materialized, block_average, cesaro, delay,
                          dirac, discounted, first_weight, from_weights, materialize,
                          shift, sup_weight, total_variation)
from .gambling import (FiniteDistribution, GamblingHouse, affinity_check,
                       extend_reward, from_problem, gh_reach_closure, gh_v_star,
                       gh_value, gh_value_function, mixed_value, support_successors,
                       to_problem)
from .oracle import OracleResult, brute_value
from .problems import (Play, Problem, forced_play, reach_closure, reach_exact,
                       reach_within, successors)
from .values import (CheckReport, SandwichReport, SweepResult, UncontrolledBoundReport,
                     ValueFunction, VStarReport, bellman_consistency_check,
                     convergence_sweep, default_cesaro_family, delayed_value,
                     fixpoint_residual_check, lemma1_check, payoff, sandwich_check,
                     uncontrolled_bound_check, v_star_finite, v_star_report, value,
                     value_discounted_fixpoint, value_function)

__version__ = "0.1.0"
