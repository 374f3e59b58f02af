"""Named instances and seeded generators.

Registry names: "example1_cycle", "example2_tree", "example3_line", "random",
"uncontrolled_cycle".  Construction is deterministic: the same spec always
yields the identical instance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import evaluations as ev
from .errors import InvalidInstanceError
from .gambling import FiniteDistribution, GamblingHouse
from .problems import Problem

REWARD_GRID = 32  # rewards are multiples of 1/32: dyadic, so sums stay exact


def example1_cycle() -> Problem:
    """Two-state cycle z0 <-> z1 with reward only at z1."""
    return Problem(states=("z0", "z1"),
                   successors_map={"z0": ("z1",), "z1": ("z0",)},
                   rewards={"z0": 0.0, "z1": 1.0},
                   name="example1_cycle")


def example2_tree(branching_cap: int = 8, depth_cap: int = 64) -> Problem:
    """Self-similar tree: from any node one can continue along the current
    branch or restart any branch.  On branch n the rewards are n zeros, then
    n ones, then zeros.  The root is encoded (0, 0), branch positions (n, p).
    Capping the countable branching can only lower values."""
    if branching_cap < 2 or depth_cap < 2:
        raise InvalidInstanceError("branching and depth caps must be at least 2")
    root = (0, 0)
    starts = tuple((n, 1) for n in range(1, branching_cap + 1))
    states = [root]
    succ = {root: starts}
    rewards = {root: 0.0}
    frontier = []
    for n in range(1, branching_cap + 1):
        for p in range(1, depth_cap + 1):
            z = (n, p)
            states.append(z)
            rewards[z] = 1.0 if n < p <= 2 * n else 0.0
            if p < depth_cap:
                succ[z] = ((n, p + 1),) + starts
            else:
                succ[z] = starts
                frontier.append(z)
    return Problem(states=tuple(states), successors_map=succ, rewards=rewards,
                   truncated=True, frontier=frozenset(frontier),
                   name=f"example2_tree({branching_cap},{depth_cap})")


def example3_line(window: int = 50) -> Problem:
    """Integer line with the shift transition, reward 1 only at 0, restricted
    to [-window, window].  The right end self-loops: rewards vanish there, so
    every value within the window matches the unbounded line."""
    if window < 1:
        raise InvalidInstanceError("window must be at least 1")
    states = tuple(range(-window, window + 1))
    succ = {z: (z + 1,) for z in states}
    succ[window] = (window,)
    rewards = {z: 1.0 if z == 0 else 0.0 for z in states}
    return Problem(states=states, successors_map=succ, rewards=rewards,
                   truncated=True, frontier=frozenset({window}),
                   name=f"example3_line({window})")


def random_problem(n_states: int, max_branching: int, seed: int) -> Problem:
    """Seeded problem with 1..max_branching successors per state and rewards
    on the dyadic grid k/32."""
    if n_states < 1 or max_branching < 1:
        raise InvalidInstanceError("need at least one state and one successor")
    rng = random.Random(("problem", n_states, max_branching, seed).__repr__())
    states = tuple(f"s{i}" for i in range(n_states))
    succ = {}
    rewards = {}
    for z in states:
        k = rng.randint(1, min(max_branching, n_states))
        succ[z] = tuple(sorted(rng.sample(states, k)))
        rewards[z] = rng.randint(0, REWARD_GRID) / REWARD_GRID
    return Problem(states=states, successors_map=succ, rewards=rewards,
                   name=f"random({n_states},{max_branching},{seed})")


def uncontrolled_cycle(period: int, reward_pattern) -> Problem:
    """Deterministic cycle c0 -> c1 -> ... -> c0 with the given rewards."""
    pattern = tuple(float(x) for x in reward_pattern)
    if len(pattern) != period or period < 1:
        raise InvalidInstanceError("reward pattern length must equal the period")
    states = tuple(f"c{i}" for i in range(period))
    succ = {states[i]: (states[(i + 1) % period],) for i in range(period)}
    rewards = {states[i]: pattern[i] for i in range(period)}
    return Problem(states=states, successors_map=succ, rewards=rewards,
                   name=f"uncontrolled_cycle({period})")


def random_house(n_states: int, max_menus: int, seed: int,
                 max_support: int = 3) -> GamblingHouse:
    """Seeded house; probabilities are eighths so supports sum to 1 exactly."""
    if n_states < 1 or max_menus < 1:
        raise InvalidInstanceError("need at least one state and one menu entry")
    rng = random.Random(("house", n_states, max_menus, seed).__repr__())
    states = tuple(f"x{i}" for i in range(n_states))

    def random_dist() -> FiniteDistribution:
        size = rng.randint(1, min(max_support, n_states))
        support = rng.sample(states, size)
        cuts = sorted(rng.sample(range(1, 8), size - 1)) if size > 1 else []
        parts = [b - a for a, b in zip([0] + cuts, cuts + [8])]
        return FiniteDistribution.from_mapping(
            {x: part / 8 for x, part in zip(support, parts)})

    transitions = {x: tuple(random_dist() for _ in range(rng.randint(1, max_menus)))
                   for x in states}
    rewards = {x: rng.randint(0, REWARD_GRID) / REWARD_GRID for x in states}
    return GamblingHouse(states=states, transitions=transitions, rewards=rewards,
                         name=f"random_house({n_states},{max_menus},{seed})")


def random_explicit_evaluation(max_support: int, rng: random.Random) -> ev.Evaluation:
    """Random finite-support evaluation with weights in 64ths (sums exactly 1)."""
    size = rng.randint(1, max_support)
    cuts = sorted(rng.sample(range(1, 64), size - 1)) if size > 1 else []
    parts = [b - a for a, b in zip([0] + cuts, cuts + [64])]
    return ev.from_weights([part / 64 for part in parts])


# --- comb evaluation families for the two-state cycle ----------------------

def odd_comb(k: int) -> ev.Evaluation:
    """Weight 1/k on each of the k odd stages 1, 3, ..., 2k-1."""
    w = [0.0] * (2 * k - 1)
    for t in range(1, k + 1):
        w[2 * t - 2] = 1.0 / k
    return ev.from_weights(w)


def even_comb(k: int) -> ev.Evaluation:
    """Weight 1/k on each of the k even stages 2, 4, ..., 2k."""
    w = [0.0] * (2 * k)
    for t in range(1, k + 1):
        w[2 * t - 1] = 1.0 / k
    return ev.from_weights(w)


def alternating_comb(k: int) -> ev.Evaluation:
    """odd_comb for even k, even_comb for odd k: sup weight vanishes but the
    total variation stays near 2, and cycle values oscillate."""
    return odd_comb(k) if k % 2 == 0 else even_comb(k)


# --- registry ---------------------------------------------------------------

REGISTRY = {
    "example1_cycle": example1_cycle,
    "example2_tree": example2_tree,
    "example3_line": example3_line,
    "random": random_problem,
    "uncontrolled_cycle": uncontrolled_cycle,
}


@dataclass(frozen=True)
class InstanceSpec:
    """Registry name plus parameters; building is deterministic."""

    name: str
    params: dict

    def build(self) -> Problem:
        return build_instance(self.name, self.params)


def build_instance(name: str, params: dict | None = None) -> Problem:
    if name not in REGISTRY:
        raise InvalidInstanceError(
            f"unknown instance {name!r}; known: {sorted(REGISTRY)}")
    params = dict(params or {})
    if name == "random":
        return random_problem(params.pop("states", 6), params.pop("max_branching", 3),
                              params.pop("seed", 0))
    if name == "uncontrolled_cycle":
        pattern = params.pop("pattern", [0.0, 1.0])
        return uncontrolled_cycle(params.pop("period", len(pattern)), pattern)
    return REGISTRY[name](**params)
