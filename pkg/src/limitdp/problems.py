"""Deterministic problems (states, successor correspondence, rewards) and
reachability: states reachable in exactly n steps, within m steps, or ever.

Instances built from windowed/capped generators record which states had their
true successor sets altered by the cap (the ``frontier``), so reachability
closures can report whether they are exact or merely cap-limited.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from .errors import InvalidInstanceError, UnknownStateError

State = Hashable


@dataclass(frozen=True)
class Problem:
    """Finite-explicit problem. ``states`` fixes the canonical state order."""

    states: tuple[State, ...]
    successors_map: dict[State, tuple[State, ...]]
    rewards: dict[State, float]
    truncated: bool = False
    frontier: frozenset = frozenset()
    name: str = "problem"

    def __post_init__(self):
        if not self.states:
            raise InvalidInstanceError("problem has no states")
        known = set(self.states)
        if len(known) != len(self.states):
            raise InvalidInstanceError("duplicate states")
        for z in self.states:
            succ = self.successors_map.get(z)
            if not succ:
                raise InvalidInstanceError(f"state {z!r} has an empty successor set")
            for z2 in succ:
                if z2 not in known:
                    raise InvalidInstanceError(f"successor {z2!r} of {z!r} is not a state")
            r = self.rewards.get(z)
            if r is None or not 0.0 <= r <= 1.0:
                raise InvalidInstanceError(f"reward of {z!r} is {r!r}, must lie in [0, 1]")

    def index(self, z: State) -> int:
        try:
            return self.states.index(z)
        except ValueError:
            raise UnknownStateError(f"unknown state {z!r}") from None

    def state_from_string(self, text: str) -> State:
        for z in self.states:
            if str(z) == text:
                return z
        raise UnknownStateError(f"no state prints as {text!r}")

    @classmethod
    def from_json(cls, obj: dict, name: str = "problem") -> "Problem":
        """Load ``{"states": [...], "transitions": {...}, "rewards": {...}}``."""
        try:
            states = tuple(obj["states"])
            transitions = {z: tuple(obj["transitions"][z]) for z in states}
            rewards = {z: float(obj["rewards"][z]) for z in states}
        except (KeyError, TypeError) as exc:
            raise InvalidInstanceError(f"malformed problem JSON: {exc}") from None
        return cls(states=states, successors_map=transitions, rewards=rewards, name=name)

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "transitions": {z: list(s) for z, s in self.successors_map.items()},
            "rewards": dict(self.rewards),
        }


def successors(p: Problem, z: State) -> tuple[State, ...]:
    """F(z), in canonical order."""
    if z not in p.rewards:
        raise UnknownStateError(f"unknown state {z!r}")
    return p.successors_map[z]


def reach_exact(p: Problem, z: State, n: int) -> frozenset:
    """F^n(z): states reachable in exactly n steps."""
    if n < 0:
        raise ValueError("step count must be nonnegative")
    current = {z} if z in p.rewards else None
    if current is None:
        raise UnknownStateError(f"unknown state {z!r}")
    for _ in range(n):
        current = {z2 for z1 in current for z2 in p.successors_map[z1]}
    return frozenset(current)


def reach_within(p: Problem, z: State, m: int) -> frozenset:
    """G^m(z): union of F^n(z) over n <= m."""
    if m < 0:
        raise ValueError("step count must be nonnegative")
    seen = {z} if z in p.rewards else None
    if seen is None:
        raise UnknownStateError(f"unknown state {z!r}")
    current = {z}
    for _ in range(m):
        current = {z2 for z1 in current for z2 in p.successors_map[z1]} - seen
        if not current:
            break
        seen |= current
    return frozenset(seen)


def reach_closure(p: Problem, z: State) -> tuple[frozenset, bool]:
    """G^inf(z) by breadth-first saturation, plus a saturation flag.

    The flag is False when the closure touches a frontier state, i.e. a state
    whose true successor set was altered by a construction cap; the reported
    set is then only the closure of the capped instance.
    """
    if z not in p.rewards:
        raise UnknownStateError(f"unknown state {z!r}")
    seen = {z}
    current = {z}
    while current:
        current = {z2 for z1 in current for z2 in p.successors_map[z1]} - seen
        seen |= current
    saturated = not (p.truncated and (seen & p.frontier))
    return frozenset(seen), saturated


@dataclass(frozen=True)
class Play:
    """Finite feasible prefix of a play: origin z_0 and states (z_1, ..., z_T)."""

    origin: State
    prefix: tuple[State, ...]

    def __post_init__(self):
        if not self.prefix:
            raise InvalidInstanceError("play prefix must contain at least one state")

    @classmethod
    def from_states(cls, p: Problem, origin: State, prefix: Iterable[State]) -> "Play":
        """Build and certify feasibility against p."""
        prefix = tuple(prefix)
        here = origin
        for z in prefix:
            if z not in successors(p, here):
                raise InvalidInstanceError(f"infeasible step {here!r} -> {z!r}")
            here = z
        return cls(origin=origin, prefix=prefix)

    def __len__(self) -> int:
        return len(self.prefix)


def forced_play(p: Problem, z: State, horizon: int) -> Play:
    """The unique play from z on an uncontrolled problem (first successor otherwise)."""
    prefix = []
    here = z
    for _ in range(horizon):
        here = successors(p, here)[0]
        prefix.append(here)
    return Play(origin=z, prefix=tuple(prefix))
