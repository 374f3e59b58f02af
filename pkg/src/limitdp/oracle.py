"""Brute-force verifier: enumerate every feasible play up to a horizon and
maximize the payoff directly.  Independent of the backward-induction engine;
the two must agree exactly on instances where both run.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import evaluations as ev
from .errors import EnumerationGuardError, HorizonError
from .problems import Play, Problem

DEFAULT_GUARD = 10_000_000


@dataclass(frozen=True)
class OracleResult:
    value: float
    play: Play
    plays_enumerated: int


def brute_value(p: Problem, theta: ev.Evaluation, z, horizon: int,
                guard: int = DEFAULT_GUARD,
                tail_tol: float = 1e-9) -> OracleResult:
    """Exact max of the theta-payoff over all length-``horizon`` prefixes.

    The guard counts leaves (complete plays) and aborts early when exceeded.
    """
    mat = ev.materialize(theta, tail_tol)
    if mat.tail > 0.0 or mat.support > horizon:
        raise HorizonError(
            f"evaluation support {mat.support} (tail {mat.tail}) exceeds horizon {horizon}")
    raw = mat.raw + (0.0,) * (horizon - mat.support)
    rewards = p.rewards
    succ = p.successors_map
    p.index(z)

    best_value = -1.0
    best_path: tuple = ()
    count = 0
    path = [None] * horizon

    def descend(state, depth):
        nonlocal best_value, best_path, count
        if depth == horizon:
            count += 1
            if count > guard:
                raise EnumerationGuardError(f"more than {guard} plays at horizon {horizon}")
            total = 0.0
            for t in range(horizon - 1, -1, -1):  # same summation order as the engine
                total = raw[t] * rewards[path[t]] + total
            val = total / mat.scale
            if val > best_value:
                best_value = val
                best_path = tuple(path)
            return
        for nxt in succ[state]:
            path[depth] = nxt
            descend(nxt, depth + 1)

    descend(z, 0)
    return OracleResult(value=best_value,
                        play=Play(origin=z, prefix=best_path),
                        plays_enumerated=count)
