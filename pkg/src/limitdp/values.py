"""Value computations: payoffs, theta-values by backward induction, discounted
fixed points, delayed values, the inf-sup limit candidate, and the numerical
checks (one-step bound, sandwich chain, uncontrolled block bound, sweeps).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from . import evaluations as ev
from .errors import InvalidEvaluationError, NotUncontrolledError
from .problems import Play, Problem, reach_closure, reach_exact

DEFAULT_TAIL_TOL = 1e-9
FLOAT_SLACK = 1e-9
VSTAR_TV_THRESHOLD = 1e-2


@dataclass(frozen=True)
class ValueFunction:
    """Per-state values in [0,1] with the truncation error bound of the
    evaluation that produced them (true value lies in [v, v + error])."""

    problem: Problem
    evaluation: ev.Evaluation
    values: dict
    error: float

    def __getitem__(self, z) -> float:
        return self.values[z]

    def d_inf(self, other) -> float:
        other_values = other.values if isinstance(other, ValueFunction) else other
        return max(abs(self.values[z] - other_values[z]) for z in self.values)


def payoff(p: Problem, play: Play, theta: ev.Evaluation,
           tail_tol: float = DEFAULT_TAIL_TOL) -> tuple[float, float]:
    """theta-payoff of a play prefix; error bounds the mass beyond the prefix."""
    mat = ev.materialize(theta, tail_tol)
    rewards = [p.rewards[z] for z in play.prefix]
    horizon = min(len(rewards), mat.support)
    total = 0.0
    for t in range(horizon - 1, -1, -1):  # backward sum, matching the induction order
        total = mat.raw[t] * rewards[t] + total
    value = total / mat.scale
    shortfall = sum(mat.raw[len(rewards):], 0.0) / mat.scale
    return value, mat.tail + shortfall


def value_function(p: Problem, theta: ev.Evaluation,
                   tail_tol: float = DEFAULT_TAIL_TOL) -> ValueFunction:
    """theta-value at every state by finite-horizon backward induction."""
    mat = ev.materialize(theta, tail_tol)
    n = len(p.states)
    succ = [[p.index(z2) for z2 in p.successors_map[z]] for z in p.states]
    r = [p.rewards[z] for z in p.states]
    v = [0.0] * n
    for t in range(mat.support - 1, -1, -1):
        w = mat.raw[t]
        v = [max(w * r[j] + v[j] for j in succ[i]) for i in range(n)]
    values = {z: v[i] / mat.scale for i, z in enumerate(p.states)}
    return ValueFunction(problem=p, evaluation=theta, values=values, error=mat.tail)


def value(p: Problem, theta: ev.Evaluation, z,
          tail_tol: float = DEFAULT_TAIL_TOL) -> tuple[float, float]:
    """theta-value of the problem started at z."""
    vf = value_function(p, theta, tail_tol)
    p.index(z)
    return vf[z], vf.error


def value_discounted_fixpoint(p: Problem, lam: float, tol: float = DEFAULT_TAIL_TOL) -> ValueFunction:
    """Discounted value by Bellman iteration from 0; sup-distance to the true
    fixed point is at most tol."""
    if not 0.0 < lam <= 1.0:
        raise InvalidEvaluationError(f"discount rate must lie in (0, 1], got {lam}")
    if tol <= 0.0:
        raise InvalidEvaluationError(f"tolerance must be positive, got {tol}")
    n = len(p.states)
    succ = [[p.index(z2) for z2 in p.successors_map[z]] for z in p.states]
    r = [p.rewards[z] for z in p.states]
    v = [0.0] * n
    while True:
        nv = [max(lam * r[j] + (1.0 - lam) * v[j] for j in succ[i]) for i in range(n)]
        change = max(abs(nv[i] - v[i]) for i in range(n))
        v = nv
        if change <= tol * lam:
            break
    values = {z: v[i] for i, z in enumerate(p.states)}
    return ValueFunction(problem=p, evaluation=ev.discounted(lam), values=values, error=tol)


def delayed_value(p: Problem, theta: ev.Evaluation, m: int, z,
                  tail_tol: float = DEFAULT_TAIL_TOL) -> tuple[float, float]:
    """Best theta-value reachable after exactly m steps from z."""
    vf = value_function(p, theta, tail_tol)
    return max(vf[z2] for z2 in reach_exact(p, z, m)), vf.error


def _validate_family(family, tv_threshold: float) -> list[float]:
    if not family:
        raise InvalidEvaluationError("empty evaluation family")
    tvs = [ev.total_variation(theta) for theta in family]
    for a, b in zip(tvs, tvs[1:]):
        if b > 2.0 * a + 1e-15:
            raise InvalidEvaluationError(
                "family total variation must be non-increasing up to a factor 2")
    if min(tvs) > tv_threshold:
        warnings.warn(
            f"family is too impatient (min TV {min(tvs):.3g} > {tv_threshold:.3g}); "
            "the result is only an upper bound on the limit value", stacklevel=3)
    return tvs


@dataclass(frozen=True)
class VStarReport:
    """Per-state inf-sup values with (family index, attaining state) witnesses."""

    values: dict
    witnesses: dict
    saturated: bool


def v_star_report(p: Problem, family, tv_threshold: float = VSTAR_TV_THRESHOLD,
                  tail_tol: float = DEFAULT_TAIL_TOL) -> VStarReport:
    """min over the family of the best value on the reachable closure.

    Exact on fully saturated instances, where the sup over delays of the
    delayed value equals the sup of the value over the reachable closure.
    """
    _validate_family(family, tv_threshold)
    vfs = [value_function(p, theta, tail_tol) for theta in family]
    values, witnesses = {}, {}
    saturated_all = True
    for z in p.states:
        closure, saturated = reach_closure(p, z)
        saturated_all = saturated_all and saturated
        ordered = [z2 for z2 in p.states if z2 in closure]
        best = None
        for k, vf in enumerate(vfs):
            sup_state = max(ordered, key=lambda z2: vf[z2])
            sup_val = vf[sup_state]
            if best is None or sup_val < best[0]:
                best = (sup_val, k, sup_state)
        values[z] = best[0]
        witnesses[z] = (best[1], best[2])
    return VStarReport(values=values, witnesses=witnesses, saturated=saturated_all)


def v_star_finite(p: Problem, z, family, tv_threshold: float = VSTAR_TV_THRESHOLD,
                  tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Limit-value candidate at z: inf over the family of sup over delays."""
    return v_star_report(p, family, tv_threshold, tail_tol).values[z]


def default_cesaro_family(max_n: int = 128) -> list[ev.Evaluation]:
    """Doubling-horizon uniform evaluations, TV halving down to 1/max_n."""
    ns = [2]
    while ns[-1] < max_n:
        ns.append(min(2 * ns[-1], max_n))
    return [ev.cesaro(n) for n in ns]


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a numerical check: worst violation against its budget."""

    name: str
    max_violation: float
    budget: float
    passed: bool
    details: dict = field(default_factory=dict)


def lemma1_check(p: Problem, theta: ev.Evaluation,
                 tail_tol: float = DEFAULT_TAIL_TOL) -> CheckReport:
    """One-step bound: |v(z) - max over F(z) of v| <= theta_1 + TV(theta)."""
    vf = value_function(p, theta, tail_tol)
    bound = ev.first_weight(theta) + ev.total_variation(theta)
    budget = 2.0 * tail_tol + FLOAT_SLACK
    worst, worst_state = 0.0, None
    for z in p.states:
        gap = abs(vf[z] - max(vf[z2] for z2 in p.successors_map[z])) - bound
        if gap > worst:
            worst, worst_state = gap, z
    return CheckReport(name="lemma1", max_violation=worst, budget=budget,
                       passed=worst <= budget,
                       details={"bound": bound, "worst_state": worst_state})


def bellman_consistency_check(p: Problem, theta: ev.Evaluation,
                              tail_tol: float = DEFAULT_TAIL_TOL) -> CheckReport:
    """v_theta(z) == max over F(z) of theta_1*r + (1-theta_1)*v_shifted."""
    theta1 = ev.first_weight(theta)
    if theta1 >= 1.0:
        raise InvalidEvaluationError("consistency check requires theta_1 < 1")
    vf = value_function(p, theta, tail_tol)
    vf_shift = value_function(p, ev.shift(theta), tail_tol)
    budget = 2.0 * tail_tol + FLOAT_SLACK
    worst, worst_state = 0.0, None
    for z in p.states:
        rhs = max(theta1 * p.rewards[z2] + (1.0 - theta1) * vf_shift[z2]
                  for z2 in p.successors_map[z])
        gap = abs(vf[z] - rhs)
        if gap > worst:
            worst, worst_state = gap, z
    return CheckReport(name="bellman", max_violation=worst, budget=budget,
                       passed=worst <= budget, details={"worst_state": worst_state})


def fixpoint_residual_check(p: Problem, lam: float, tol: float = DEFAULT_TAIL_TOL) -> CheckReport:
    """Residual of the discounted fixed-point equation is at most 2*tol."""
    vf = value_discounted_fixpoint(p, lam, tol)
    worst = max(
        abs(vf[z] - max(lam * p.rewards[z2] + (1.0 - lam) * vf[z2]
                        for z2 in p.successors_map[z]))
        for z in p.states)
    budget = 2.0 * tol
    return CheckReport(name="fixpoint", max_violation=worst, budget=budget,
                       passed=worst <= budget, details={"lambda": lam})


@dataclass(frozen=True)
class SandwichReport:
    """The four terms of the inf-sup sandwich around the value sequence."""

    lower: float          # min over family of best delayed value, delays <= m0
    liminf_half: float    # min of v_theta(z) over the tail half of the family
    limsup_half: float    # max of v_theta(z) over the tail half
    upper: float          # min over family of best value on the closure
    tolerance: float
    holds: bool
    sequence: tuple[float, ...]


def sandwich_check(p: Problem, z, family, m0: int,
                   tail_tol: float = DEFAULT_TAIL_TOL) -> SandwichReport:
    """Check lower <= liminf <= limsup <= upper within 2*m0*max-tail-TV.

    liminf/limsup are approximated by min/max over the tail half of the
    family; the raw value sequence is reported so the approximation is
    auditable.
    """
    if not family:
        raise InvalidEvaluationError("empty evaluation family")
    vfs = [value_function(p, theta, tail_tol) for theta in family]
    seq = tuple(vf[z] for vf in vfs)
    half = len(family) // 2
    tail_vals = seq[half:]
    tvs = [ev.total_variation(theta) for theta in family]
    eps = 2.0 * m0 * max(tvs[half:])

    reach_sets = [reach_exact(p, z, m) for m in range(m0 + 1)]
    lower = min(max(max(vf[z2] for z2 in rs) for rs in reach_sets) for vf in vfs)
    closure, _ = reach_closure(p, z)
    upper = min(max(vf[z2] for z2 in closure) for vf in vfs)
    liminf_half, limsup_half = min(tail_vals), max(tail_vals)
    slack = 2.0 * tail_tol + FLOAT_SLACK
    holds = (lower <= liminf_half + eps + slack
             and liminf_half <= limsup_half + slack
             and limsup_half <= upper + eps + slack)
    return SandwichReport(lower=lower, liminf_half=liminf_half, limsup_half=limsup_half,
                          upper=upper, tolerance=eps, holds=holds, sequence=seq)


@dataclass(frozen=True)
class UncontrolledBoundReport:
    """Block-decomposition bound |v_theta - v*| <= N*TV(theta) + epsilon."""

    n_block: int
    tv: float
    epsilon: float
    gap: float
    bound: float
    holds: bool


def uncontrolled_bound_check(p: Problem, theta: ev.Evaluation, N: int, z0,
                             family=None,
                             tail_tol: float = DEFAULT_TAIL_TOL) -> UncontrolledBoundReport:
    """On a single-valued transition map, the gap between any theta-value and
    the limit value is at most N*TV(theta) + epsilon, where epsilon is the
    measured sup-distance between the N-stage average value and the limit."""
    for z in p.states:
        if len(p.successors_map[z]) != 1:
            raise NotUncontrolledError(f"state {z!r} has {len(p.successors_map[z])} successors")
    if family is None:
        family = default_cesaro_family()
    vstar = v_star_report(p, family, tail_tol=tail_tol).values
    vbar_n = value_function(p, ev.cesaro(N), tail_tol)
    epsilon = max(abs(vbar_n[z] - vstar[z]) for z in p.states)
    v_theta, err = value(p, theta, z0, tail_tol)
    gap = abs(v_theta - vstar[z0])
    tv = ev.total_variation(theta)
    bound = N * tv + epsilon + err + tail_tol + FLOAT_SLACK
    return UncontrolledBoundReport(n_block=N, tv=tv, epsilon=epsilon, gap=gap,
                                   bound=bound, holds=gap <= bound)


CSV_HEADER = ("family", "k", "tv", "state", "value", "error", "dist_to_vstar")


@dataclass(frozen=True)
class SweepResult:
    """Rows for the sweep CSV plus per-family convergence summaries."""

    rows: tuple[dict, ...]
    summaries: dict


def convergence_sweep(p: Problem, families: dict, states,
                      vstar_family=None,
                      tail_tol: float = DEFAULT_TAIL_TOL) -> SweepResult:
    """Tabulate values per (family, k, state) with distances to the limit value.

    ``families`` maps a name to a list of (label, evaluation) pairs.  The limit
    value is computed from ``vstar_family`` (default: doubling uniform family),
    independent of the swept families, which may oscillate.
    """
    if vstar_family is None:
        vstar_family = default_cesaro_family()
    vstar = v_star_report(p, vstar_family, tail_tol=tail_tol).values
    states = list(states)
    rows = []
    summaries = {}
    for name in families:
        members = families[name]
        per_k = []
        for label, theta in members:
            vf = value_function(p, theta, tail_tol)
            tv = ev.total_variation(theta)
            dist = max(abs(vf[z] - vstar[z]) for z in states)
            per_k.append((label, theta, vf, dist))
            for z in states:
                rows.append({"family": name, "k": label, "tv": tv, "state": z,
                             "value": vf[z], "error": vf.error, "dist_to_vstar": dist})
        half = len(per_k) // 2
        tail = per_k[half:]
        cauchy = max((a[2].d_inf(b[2]) for i, a in enumerate(tail) for b in tail[i + 1:]),
                     default=0.0)
        summaries[name] = {
            "final_dist_to_vstar": per_k[-1][3],
            "tail_cauchy_gap": cauchy,
            "oscillating": cauchy > 0.1,
            "tv_trajectory": [ev.total_variation(theta) for _, theta, _, _ in per_k],
            "sup_weight_trajectory": [ev.sup_weight(theta) for _, theta, _, _ in per_k],
        }
    return SweepResult(rows=tuple(rows), summaries=summaries)
