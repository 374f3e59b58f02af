"""Stochastic transitions: houses whose moves pick finite-support distributions
over states.  Rewards and values extend affinely to mixed states; the value
recursion stays polynomial because selections decompose state-wise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import evaluations as ev
from .errors import EnumerationGuardError, InvalidInstanceError, UnknownStateError
from .problems import Problem

PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class FiniteDistribution:
    """Finite-support probability distribution; entries strictly positive."""

    items: tuple[tuple[object, float], ...]

    @classmethod
    def from_mapping(cls, mapping) -> "FiniteDistribution":
        items = []
        for x, prob in mapping.items():
            prob = float(prob)
            if prob < 0.0:
                raise InvalidInstanceError(f"negative probability {prob} for {x!r}")
            if prob > 0.0:
                items.append((x, prob))
        if not items:
            raise InvalidInstanceError("empty distribution")
        total = sum(prob for _, prob in items)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise InvalidInstanceError(f"probabilities sum to {total!r}, expected 1")
        items.sort(key=lambda item: str(item[0]))
        return cls(items=tuple(items))

    @classmethod
    def point_mass(cls, x) -> "FiniteDistribution":
        return cls(items=((x, 1.0),))

    @property
    def support(self) -> tuple:
        return tuple(x for x, _ in self.items)

    def prob(self, x) -> float:
        for y, prob in self.items:
            if y == x:
                return prob
        return 0.0

    def is_point_mass(self) -> bool:
        return len(self.items) == 1

    def to_mapping(self) -> dict:
        return dict(self.items)


@dataclass(frozen=True)
class GamblingHouse:
    """States, per-state menus of finite-support distributions, rewards in [0,1]."""

    states: tuple
    transitions: dict
    rewards: dict
    name: str = "house"

    def __post_init__(self):
        known = set(self.states)
        if not known:
            raise InvalidInstanceError("house has no states")
        for x in self.states:
            menu = self.transitions.get(x)
            if not menu:
                raise InvalidInstanceError(f"state {x!r} has an empty transition menu")
            for dist in menu:
                for y in dist.support:
                    if y not in known:
                        raise InvalidInstanceError(f"distribution at {x!r} reaches unknown {y!r}")
            r = self.rewards.get(x)
            if r is None or not 0.0 <= r <= 1.0:
                raise InvalidInstanceError(f"reward of {x!r} is {r!r}, must lie in [0, 1]")

    @classmethod
    def from_json(cls, obj: dict, name: str = "house") -> "GamblingHouse":
        try:
            states = tuple(obj["states"])
            transitions = {
                x: tuple(FiniteDistribution.from_mapping(d) for d in obj["transitions"][x])
                for x in states
            }
            rewards = {x: float(obj["rewards"][x]) for x in states}
        except (KeyError, TypeError) as exc:
            raise InvalidInstanceError(f"malformed house JSON: {exc}") from None
        return cls(states=states, transitions=transitions, rewards=rewards, name=name)

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "transitions": {x: [d.to_mapping() for d in menu]
                            for x, menu in self.transitions.items()},
            "rewards": dict(self.rewards),
        }


def extend_reward(g: GamblingHouse, u: FiniteDistribution) -> float:
    """Affine extension of the reward to a mixed state."""
    total = 0.0
    for x, prob in u.items:
        if x not in g.rewards:
            raise UnknownStateError(f"unknown state {x!r} in distribution support")
        total += prob * g.rewards[x]
    return total


def gh_value_function(g: GamblingHouse, theta: ev.Evaluation,
                      tail_tol: float = 1e-9) -> tuple[dict, float]:
    """theta-value at every state by backward induction over the menus."""
    mat = ev.materialize(theta, tail_tol)
    v = {x: 0.0 for x in g.states}
    for t in range(mat.support - 1, -1, -1):
        w = mat.raw[t]
        v = {x: max(sum(prob * (w * g.rewards[y] + v[y]) for y, prob in dist.items)
                    for dist in g.transitions[x])
             for x in g.states}
    return {x: v[x] / mat.scale for x in g.states}, mat.tail


def gh_value(g: GamblingHouse, theta: ev.Evaluation, x,
             tail_tol: float = 1e-9) -> tuple[float, float]:
    if x not in g.rewards:
        raise UnknownStateError(f"unknown state {x!r}")
    values, err = gh_value_function(g, theta, tail_tol)
    return values[x], err


def mixed_value(g: GamblingHouse, theta: ev.Evaluation, u: FiniteDistribution,
                tail_tol: float = 1e-9, guard: int = 500_000) -> float:
    """theta-value started from a mixed state, by direct enumeration of
    state-wise selections (one distribution chosen per support state at each
    step).  Exponential; intended as an independent cross-check on small
    houses."""
    for x in u.support:
        if x not in g.rewards:
            raise UnknownStateError(f"unknown state {x!r} in distribution support")
    mat = ev.materialize(theta, tail_tol)
    horizon = mat.support
    memo: dict = {}
    nodes = 0

    def step(u_items, selection):
        combined: dict = {}
        for (x, prob), dist in zip(u_items, selection):
            for y, q in dist.items:
                combined[y] = combined.get(y, 0.0) + prob * q
        return tuple(sorted(((y, q) for y, q in combined.items()), key=lambda it: str(it[0])))

    def best_from(t, u_items):
        nonlocal nodes
        if t == horizon:
            return 0.0
        key = (t, tuple((x, round(prob, 12)) for x, prob in u_items))
        if key in memo:
            return memo[key]
        nodes += 1
        if nodes > guard:
            raise EnumerationGuardError(f"mixed-state enumeration exceeded {guard} nodes")
        menus = [g.transitions[x] for x, _ in u_items]
        best = -1.0
        for selection in itertools.product(*menus):
            u_next = step(u_items, selection)
            reward = sum(q * g.rewards[y] for y, q in u_next)
            val = mat.raw[t] * reward + best_from(t + 1, u_next)
            if val > best:
                best = val
        memo[key] = best
        return best

    return best_from(0, u.items) / mat.scale


@dataclass(frozen=True)
class AffinityReport:
    mixed: float
    affine_combination: float
    gap: float
    passed: bool


def affinity_check(g: GamblingHouse, theta: ev.Evaluation, u: FiniteDistribution,
                   tol: float = 1e-9, tail_tol: float = 1e-9) -> AffinityReport:
    """The mixed-state value equals the affine combination of per-state values."""
    lhs = mixed_value(g, theta, u, tail_tol)
    values, _ = gh_value_function(g, theta, tail_tol)
    rhs = sum(prob * values[x] for x, prob in u.items)
    gap = abs(lhs - rhs)
    return AffinityReport(mixed=lhs, affine_combination=rhs, gap=gap, passed=gap <= tol)


def support_successors(g: GamblingHouse, x) -> frozenset:
    """States reachable from x in one step through some menu distribution."""
    if x not in g.rewards:
        raise UnknownStateError(f"unknown state {x!r}")
    return frozenset(y for dist in g.transitions[x] for y in dist.support)


def gh_reach_closure(g: GamblingHouse, x) -> frozenset:
    seen = {x} if x in g.rewards else None
    if seen is None:
        raise UnknownStateError(f"unknown state {x!r}")
    current = {x}
    while current:
        current = {y for x1 in current for y in support_successors(g, x1)} - seen
        seen |= current
    return frozenset(seen)


def gh_v_star(g: GamblingHouse, x, family, tail_tol: float = 1e-9) -> float:
    """inf over the family of the best value on the support-reachable closure."""
    closure = gh_reach_closure(g, x)
    best = None
    for theta in family:
        values, _ = gh_value_function(g, theta, tail_tol)
        sup_val = max(values[y] for y in closure)
        if best is None or sup_val < best:
            best = sup_val
    return best


def to_problem(g: GamblingHouse) -> Problem:
    """Deterministic embedding; requires every distribution to be a point mass."""
    succ = {}
    for x in g.states:
        menu = g.transitions[x]
        if not all(dist.is_point_mass() for dist in menu):
            raise InvalidInstanceError("house has non-Dirac transitions")
        succ[x] = tuple(dist.support[0] for dist in menu)
    return Problem(states=g.states, successors_map=succ,
                   rewards=dict(g.rewards), name=g.name)


def from_problem(p: Problem) -> GamblingHouse:
    """Embed a deterministic problem as an all-point-mass house."""
    transitions = {
        z: tuple(FiniteDistribution.point_mass(z2) for z2 in p.successors_map[z])
        for z in p.states
    }
    return GamblingHouse(states=p.states, transitions=transitions,
                         rewards=dict(p.rewards), name=p.name)
