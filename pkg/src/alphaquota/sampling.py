"""Seeded synthetic approval profiles.

Both generators draw from a SplitMix64 stream so that any consumer, in
any language, can reproduce an instance from (seed) alone.  All draws
happen in a fixed documented order; nothing is resampled, and empty
ballots are kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import Instance, ValidationError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(value: int) -> int:
    """SplitMix64 finalizer (Steele, Lea, Flood's constants)."""
    value &= _MASK64
    value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & _MASK64
    return value ^ (value >> 31)


class SplitMix64:
    """Counter-based 64-bit generator: state += golden gamma, output =
    mix(state).  Tiny, portable, and equidistributed enough for profile
    sampling; not for cryptography."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def random_open(self) -> float:
        """Uniform float in (0, 1], safe as a log argument."""
        return ((self.next_u64() >> 11) + 1) * 2.0**-53

    def gauss_pair(self) -> tuple[float, float]:
        """Two independent standard normals via Box-Muller."""
        radius = math.sqrt(-2.0 * math.log(self.random_open()))
        angle = 2.0 * math.pi * self.random()
        return radius * math.cos(angle), radius * math.sin(angle)


def derive_seed(master: int, *lanes: int) -> int:
    """Stable sub-seed for a (master, lane, ...) coordinate.

    Each lane folds in through the bijective finalizer, so distinct
    lane tuples of equal length give distinct streams and the result
    depends only on the coordinates, not on evaluation order.
    """
    acc = _mix(master & _MASK64)
    for lane in lanes:
        acc = _mix(acc ^ _mix((lane + _GOLDEN) & _MASK64))
    return acc


@dataclass(frozen=True)
class SamplerConfig:
    """One profile-generation request.

    model "ic" ignores t/sigma; model "euclidean" ignores p.  candidates
    chooses the candidate layout under the Euclidean model: "uniform"
    places them on the [-1, 1] square, "gaussian" draws them like voters.
    """

    model: str
    n: int
    m: int
    k: int
    seed: int
    p: Optional[float] = None
    t: Optional[float] = None
    sigma: float = 0.5
    candidates: str = "uniform"

    def __post_init__(self):
        if self.model not in ("ic", "euclidean"):
            raise ValidationError(f"unknown sampler model {self.model!r}")
        if not 1 <= self.k <= self.m:
            raise ValidationError("need 1 <= k <= m")
        if self.n < 1:
            raise ValidationError("need at least one voter")
        if self.model == "ic":
            if self.p is None or not 0 <= self.p <= 1:
                raise ValidationError("ic model needs p in [0, 1]")
        else:
            if self.t is None or self.t < 0:
                raise ValidationError("euclidean model needs t >= 0")
            if self.sigma <= 0:
                raise ValidationError("sigma must be positive")
            if self.candidates not in ("uniform", "gaussian"):
                raise ValidationError(
                    f"unknown candidate layout {self.candidates!r}"
                )


def sample_ic(cfg: SamplerConfig) -> Instance:
    """Impartial culture: every (voter, candidate) pair approved
    independently with probability p.  Draw order: voter-major."""
    if cfg.model != "ic":
        raise ValidationError("sample_ic needs an ic config")
    rng = SplitMix64(cfg.seed)
    approvals = [
        [c for c in range(cfg.m) if rng.random() < cfg.p]
        for _ in range(cfg.n)
    ]
    return Instance.from_approvals(n=cfg.n, m=cfg.m, k=cfg.k, approvals=approvals)


def sample_euclidean(cfg: SamplerConfig) -> Instance:
    """Threshold model on the plane: voters Gaussian around the origin
    (sigma per axis), candidates per cfg.candidates, approval iff the
    Euclidean distance is at most t.  Draw order: all voters (one
    Box-Muller pair each), then all candidates (two draws each)."""
    if cfg.model != "euclidean":
        raise ValidationError("sample_euclidean needs a euclidean config")
    rng = SplitMix64(cfg.seed)
    voters = []
    for _ in range(cfg.n):
        gx, gy = rng.gauss_pair()
        voters.append((cfg.sigma * gx, cfg.sigma * gy))
    candidates = []
    for _ in range(cfg.m):
        if cfg.candidates == "uniform":
            candidates.append((2.0 * rng.random() - 1.0, 2.0 * rng.random() - 1.0))
        else:
            gx, gy = rng.gauss_pair()
            candidates.append((cfg.sigma * gx, cfg.sigma * gy))
    reach = cfg.t * cfg.t
    approvals = []
    for vx, vy in voters:
        ballot = [
            c
            for c, (cx, cy) in enumerate(candidates)
            if (vx - cx) ** 2 + (vy - cy) ** 2 <= reach
        ]
        approvals.append(ballot)
    return Instance.from_approvals(n=cfg.n, m=cfg.m, k=cfg.k, approvals=approvals)


def sample(cfg: SamplerConfig) -> Instance:
    if cfg.model == "ic":
        return sample_ic(cfg)
    return sample_euclidean(cfg)
