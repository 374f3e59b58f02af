"""Stage evaluations: probability distributions over positive-integer stages.

An evaluation assigns weight ``theta_t`` to the reward collected at stage t.
Supported kinds: explicit finite weight vectors, uniform ("cesaro") weights on
the first n stages, geometric ("discounted") weights, a Dirac mass on a single
stage, and delayed copies of any of those.  Parametric kinds carry closed-form
total variation and shift so truncation error never contaminates identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DegenerateEvaluationError, InvalidEvaluationError

SUM_TOL = 1e-12


@dataclass(frozen=True)
class Materialized:
    """Finite prefix of an evaluation.

    ``raw`` holds the weights multiplied by ``scale``; dividing the final
    backward-induction total by ``scale`` once (instead of multiplying tiny
    per-stage weights) keeps uniform-weight values exact on dyadic rewards.
    """

    raw: tuple[float, ...]
    scale: float
    tail: float

    @property
    def weights(self) -> tuple[float, ...]:
        if self.scale == 1.0:
            return self.raw
        return tuple(w / self.scale for w in self.raw)

    @property
    def support(self) -> int:
        return len(self.raw)


@dataclass(frozen=True)
class Evaluation:
    """Immutable evaluation; build via :func:`cesaro`, :func:`discounted`,
    :func:`dirac`, :func:`from_weights` or :func:`delay`."""

    kind: str
    n: Optional[int] = None
    lam: Optional[float] = None
    t: Optional[int] = None
    m: Optional[int] = None
    base: Optional["Evaluation"] = None
    w: Optional[tuple[float, ...]] = None

    def __repr__(self) -> str:
        if self.kind == "cesaro":
            return f"cesaro({self.n})"
        if self.kind == "discounted":
            return f"discounted({self.lam})"
        if self.kind == "dirac":
            return f"dirac({self.t})"
        if self.kind == "delayed":
            return f"delay({self.base!r}, {self.m})"
        return f"weights({list(self.w)})"


def cesaro(n: int) -> Evaluation:
    """Uniform weight 1/n on stages 1..n."""
    if not isinstance(n, int) or n < 1:
        raise InvalidEvaluationError(f"cesaro horizon must be a positive integer, got {n}")
    return Evaluation(kind="cesaro", n=n)


def discounted(lam: float) -> Evaluation:
    """Geometric weights lam*(1-lam)**(t-1)."""
    if not 0.0 < lam <= 1.0:
        raise InvalidEvaluationError(f"discount rate must lie in (0, 1], got {lam}")
    return Evaluation(kind="discounted", lam=float(lam))


def dirac(t: int) -> Evaluation:
    """All weight on stage t."""
    if not isinstance(t, int) or t < 1:
        raise InvalidEvaluationError(f"dirac stage must be a positive integer, got {t}")
    return Evaluation(kind="dirac", t=t)


def from_weights(weights) -> Evaluation:
    """Explicit finite weight vector; must be nonnegative and sum to 1."""
    w = tuple(float(x) for x in weights)
    if not w:
        raise InvalidEvaluationError("empty weight vector")
    if any(x < 0.0 for x in w):
        raise InvalidEvaluationError("negative stage weight")
    if abs(sum(w) - 1.0) > SUM_TOL:
        raise InvalidEvaluationError(f"weights sum to {sum(w)!r}, expected 1")
    while len(w) > 1 and w[-1] == 0.0:
        w = w[:-1]
    return Evaluation(kind="weights", w=w)


def delay(theta: Evaluation, m: int) -> Evaluation:
    """Push theta back by m stages (weight 0 on stages 1..m)."""
    if not isinstance(m, int) or m < 0:
        raise InvalidEvaluationError(f"delay must be a nonnegative integer, got {m}")
    if m == 0:
        return theta
    if theta.kind == "dirac":
        return dirac(theta.t + m)
    if theta.kind == "delayed":
        return Evaluation(kind="delayed", m=theta.m + m, base=theta.base)
    return Evaluation(kind="delayed", m=m, base=theta)


def first_weight(theta: Evaluation) -> float:
    """theta_1."""
    if theta.kind == "cesaro":
        return 1.0 / theta.n
    if theta.kind == "discounted":
        return theta.lam
    if theta.kind == "dirac":
        return 1.0 if theta.t == 1 else 0.0
    if theta.kind == "delayed":
        return 0.0
    return theta.w[0]


def sup_weight(theta: Evaluation) -> float:
    """sup_t theta_t."""
    if theta.kind == "cesaro":
        return 1.0 / theta.n
    if theta.kind == "discounted":
        return theta.lam
    if theta.kind == "dirac":
        return 1.0
    if theta.kind == "delayed":
        return sup_weight(theta.base)
    return max(theta.w)


def total_variation(theta: Evaluation) -> float:
    """TV(theta) = sum over t of |theta_{t+1} - theta_t|.

    Closed form for parametric kinds; direct summation for explicit weights
    (the final drop to 0 past the support counts).  A delayed evaluation picks
    up one extra rise |theta_1 - 0| at the end of its leading zeros.
    """
    if theta.kind == "cesaro":
        return 1.0 / theta.n
    if theta.kind == "discounted":
        return theta.lam
    if theta.kind == "dirac":
        return 1.0 if theta.t == 1 else 2.0
    if theta.kind == "delayed":
        return first_weight(theta.base) + total_variation(theta.base)
    w = theta.w
    tv = sum(abs(w[i + 1] - w[i]) for i in range(len(w) - 1))
    return tv + w[-1]


def shift(theta: Evaluation) -> Evaluation:
    """Shifted evaluation (theta_{t+1} / (1 - theta_1))_t; requires theta_1 < 1."""
    if theta.kind == "cesaro":
        if theta.n == 1:
            raise DegenerateEvaluationError("cannot shift an evaluation with full mass on stage 1")
        return cesaro(theta.n - 1)
    if theta.kind == "discounted":
        if theta.lam == 1.0:
            raise DegenerateEvaluationError("cannot shift an evaluation with full mass on stage 1")
        return theta
    if theta.kind == "dirac":
        if theta.t == 1:
            raise DegenerateEvaluationError("cannot shift an evaluation with full mass on stage 1")
        return dirac(theta.t - 1)
    if theta.kind == "delayed":
        if theta.m == 1:
            return theta.base
        return Evaluation(kind="delayed", m=theta.m - 1, base=theta.base)
    w = theta.w
    if w[0] >= 1.0 - SUM_TOL:
        raise DegenerateEvaluationError("cannot shift an evaluation with full mass on stage 1")
    rest = 1.0 - w[0]
    shifted = tuple(x / rest for x in w[1:])
    if not shifted:
        raise DegenerateEvaluationError("cannot shift an evaluation with full mass on stage 1")
    return Evaluation(kind="weights", w=shifted)


def cumulative_mass(theta: Evaluation, T: int) -> float:
    """Mass of stages 1..T, exact for parametric kinds."""
    if T <= 0:
        return 0.0
    if theta.kind == "cesaro":
        return min(T, theta.n) / theta.n
    if theta.kind == "discounted":
        return 1.0 - (1.0 - theta.lam) ** T
    if theta.kind == "dirac":
        return 1.0 if theta.t <= T else 0.0
    if theta.kind == "delayed":
        return cumulative_mass(theta.base, T - theta.m)
    return sum(theta.w[:T])


def block_average(theta: Evaluation, T: int) -> float:
    """Arithmetic mean of theta_1..theta_T."""
    if not isinstance(T, int) or T < 1:
        raise InvalidEvaluationError(f"block length must be a positive integer, got {T}")
    return cumulative_mass(theta, T) / T


def materialize(theta: Evaluation, tail_tol: float = 1e-9) -> Materialized:
    """Finite prefix carrying all but at most ``tail_tol`` of the mass.

    Exact (zero tail) for every kind except discounted, which truncates at
    T = ceil(log(tail_tol) / log(1 - lam)).
    """
    if tail_tol <= 0.0:
        raise InvalidEvaluationError(f"tail tolerance must be positive, got {tail_tol}")
    if theta.kind == "cesaro":
        return Materialized(raw=(1.0,) * theta.n, scale=float(theta.n), tail=0.0)
    if theta.kind == "dirac":
        return Materialized(raw=(0.0,) * (theta.t - 1) + (1.0,), scale=1.0, tail=0.0)
    if theta.kind == "discounted":
        lam = theta.lam
        if lam == 1.0:
            return Materialized(raw=(1.0,), scale=1.0, tail=0.0)
        T = max(1, math.ceil(math.log(tail_tol) / math.log(1.0 - lam)))
        raw = tuple(lam * (1.0 - lam) ** (t - 1) for t in range(1, T + 1))
        return Materialized(raw=raw, scale=1.0, tail=(1.0 - lam) ** T)
    if theta.kind == "delayed":
        mb = materialize(theta.base, tail_tol)
        return Materialized(raw=(0.0,) * theta.m + mb.raw, scale=mb.scale, tail=mb.tail)
    return Materialized(raw=theta.w, scale=1.0, tail=0.0)


def to_json(theta: Evaluation) -> dict:
    """JSON-ready dict; field names are part of the wire format."""
    if theta.kind == "cesaro":
        return {"kind": "cesaro", "n": theta.n}
    if theta.kind == "discounted":
        return {"kind": "discounted", "lambda": theta.lam}
    if theta.kind == "dirac":
        return {"kind": "dirac", "t": theta.t}
    if theta.kind == "delayed":
        return {"kind": "delayed", "m": theta.m, "base": to_json(theta.base)}
    return {"kind": "weights", "w": list(theta.w)}


def from_json(obj: dict) -> Evaluation:
    """Inverse of :func:`to_json`."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidEvaluationError(f"not an evaluation object: {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "cesaro":
            return cesaro(obj["n"])
        if kind == "discounted":
            return discounted(obj["lambda"])
        if kind == "dirac":
            return dirac(obj["t"])
        if kind == "delayed":
            return delay(from_json(obj["base"]), obj["m"])
        if kind == "weights":
            return from_weights(obj["w"])
    except KeyError as exc:
        raise InvalidEvaluationError(f"missing field {exc} in evaluation {obj!r}") from None
    raise InvalidEvaluationError(f"unknown evaluation kind {kind!r}")
