"""Core data model: approval instances, exact rationals, committees, file formats.

Conventions used throughout the package:

* voters and candidates are 0-indexed, in memory and in files;
* every alpha value is an exact ``fractions.Fraction``, never a float;
* a ballot is stored as an integer bitmask over candidate indices, so
  intersection tests are single ``&`` operations;
* a committee is a sorted tuple of distinct candidate indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Rational = Fraction

Committee = tuple[int, ...]


class AlphaQuotaError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(AlphaQuotaError):
    """Malformed or inconsistent input data (bad file, bad committee, bad flag)."""


class InfeasibleError(AlphaQuotaError):
    """A requested optimization or search has no solution."""


class BudgetExceededError(AlphaQuotaError):
    """An enumeration exceeded its configured budget.

    Budgets are hard limits by design: results are never silently truncated.
    """


@dataclass(frozen=True)
class Budgets:
    """Enumeration budgets threaded through verification and optimization.

    subset_nodes bounds the number of candidate-subset nodes visited while
    maximizing deficient-voter support at one level; committees bounds the
    number of committees enumerated by the exact EJR optimizer.
    """

    subset_nodes: int = 10_000_000
    committees: int = 1_000_000


DEFAULT_BUDGETS = Budgets()


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def bits_of(mask: int) -> tuple[int, ...]:
    """Indices set in ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


@dataclass(frozen=True)
class Instance:
    """An approval election: n voters, m candidates, committee size k.

    ``ballots[v]`` is the bitmask of candidates approved by voter v.
    Construct via :meth:`from_approvals` unless you already hold masks.
    """

    n: int
    m: int
    k: int
    ballots: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"need at least one voter, got n={self.n}")
        if self.m < 1:
            raise ValidationError(f"need at least one candidate, got m={self.m}")
        if not 1 <= self.k <= self.m:
            raise ValidationError(f"committee size k={self.k} outside [1, m={self.m}]")
        if len(self.ballots) != self.n:
            raise ValidationError(
                f"got {len(self.ballots)} ballots for n={self.n} voters"
            )
        full = (1 << self.m) - 1
        for v, ballot in enumerate(self.ballots):
            if ballot & ~full:
                raise ValidationError(
                    f"ballot of voter {v} mentions a candidate index >= m={self.m}"
                )

    @classmethod
    def from_approvals(
        cls, n: int, m: int, k: int, approvals: Sequence[Sequence[int]]
    ) -> "Instance":
        """Build an instance from per-voter lists of approved candidate indices.

        Duplicate indices inside one ballot are a hard error (they usually mean
        a generator bug), as are out-of-range indices.
        """
        if len(approvals) != n:
            raise ValidationError(f"got {len(approvals)} ballots for n={n} voters")
        ballots = []
        for v, ballot in enumerate(approvals):
            seen = 0
            for c in ballot:
                if not isinstance(c, int) or isinstance(c, bool):
                    raise ValidationError(
                        f"ballot of voter {v}: candidate index {c!r} is not an integer"
                    )
                if not 0 <= c < m:
                    raise ValidationError(
                        f"ballot of voter {v}: candidate index {c} outside [0, {m})"
                    )
                bit = 1 << c
                if seen & bit:
                    raise ValidationError(
                        f"ballot of voter {v}: duplicate candidate index {c}"
                    )
                seen |= bit
            ballots.append(seen)
        return cls(n=n, m=m, k=k, ballots=tuple(ballots))

    def approval_sets(self) -> tuple[tuple[int, ...], ...]:
        """Per-voter approved candidate indices, each ascending."""
        return tuple(bits_of(b) for b in self.ballots)

    @cached_property
    def supporter_masks(self) -> tuple[int, ...]:
        """Per-candidate bitmask over voters: bit v set iff v approves c."""
        masks = [0] * self.m
        for v, ballot in enumerate(self.ballots):
            vbit = 1 << v
            rest = ballot
            while rest:
                low = rest & -rest
                masks[low.bit_length() - 1] |= vbit
                rest ^= low
        return tuple(masks)

    @cached_property
    def full_voter_mask(self) -> int:
        return (1 << self.n) - 1

    def supporters(self, c: int) -> tuple[int, ...]:
        return bits_of(self.supporter_masks[c])


def quota(inst: Instance, alpha: Rational, level: int) -> Rational:
    """Cohesive-group size threshold alpha * level * n / k, exactly."""
    if level < 1:
        raise ValidationError(f"cohesiveness level must be >= 1, got {level}")
    if alpha < 0:
        raise ValidationError(f"alpha must be >= 0, got {alpha}")
    return Fraction(alpha) * level * inst.n / inst.k


def validate_committee(inst: Instance, members: Iterable[int]) -> Committee:
    """Normalize ``members`` into a sorted size-k committee tuple, or raise."""
    seen = set()
    for c in members:
        if not 0 <= c < inst.m:
            raise ValidationError(f"committee member {c} outside [0, {inst.m})")
        if c in seen:
            raise ValidationError(f"duplicate committee member {c}")
        seen.add(c)
    if len(seen) != inst.k:
        raise ValidationError(f"committee has {len(seen)} members, expected k={inst.k}")
    return tuple(sorted(seen))


def committee_mask(committee: Iterable[int]) -> int:
    return mask_of(committee)


def parse_committee(text: str, inst: Instance | None = None) -> Committee:
    """Parse the CLI committee format, e.g. ``0,2,5``."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValidationError("empty committee argument")
    try:
        members = [int(p) for p in parts]
    except ValueError as exc:
        raise ValidationError(f"bad committee argument {text!r}") from exc
    if inst is not None:
        return validate_committee(inst, members)
    return tuple(sorted(set(members)))


def parse_rational(text: str) -> Rational:
    """Parse ``p/q`` or a plain integer into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad rational {text!r}; expected p/q") from exc


def format_rational(value: Rational) -> str:
    """Serialize a Fraction as ``p/q`` (integers stay bare, e.g. ``0``)."""
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


# ---------------------------------------------------------------------------
# file formats


def parse_instance_json(text: str) -> Instance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON instance: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValidationError("JSON instance must be an object")
    missing = {"n", "m", "k", "approvals"} - obj.keys()
    if missing:
        raise ValidationError(f"JSON instance missing fields: {sorted(missing)}")
    n, m, k = obj["n"], obj["m"], obj["k"]
    for name, val in (("n", n), ("m", m), ("k", k)):
        if not isinstance(val, int) or isinstance(val, bool):
            raise ValidationError(f'field "{name}" must be an integer')
    approvals = obj["approvals"]
    if not isinstance(approvals, list) or not all(
        isinstance(b, list) for b in approvals
    ):
        raise ValidationError('field "approvals" must be an array of arrays')
    return Instance.from_approvals(n, m, k, approvals)


def parse_instance_plain(text: str) -> Instance:
    """Parse the plain format: header line ``n m k``, then one ballot per line.

    A blank ballot line is an empty ballot.  Exactly n ballot lines are
    required; trailing whitespace-only lines beyond them are tolerated.
    """
    lines = text.split("\n")
    if not lines or not lines[0].strip():
        raise ValidationError("plain instance: missing header line 'n m k'")
    header = lines[0].split()
    if len(header) != 3:
        raise ValidationError(
            f"plain instance: header must be 'n m k', got {lines[0]!r}"
        )
    try:
        n, m, k = (int(h) for h in header)
    except ValueError as exc:
        raise ValidationError(f"plain instance: non-integer header {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) < n:
        raise ValidationError(
            f"plain instance: expected {n} ballot lines, found {len(body)}"
        )
    for extra in body[n:]:
        if extra.strip():
            raise ValidationError(
                f"plain instance: unexpected content after {n} ballots: {extra!r}"
            )
    approvals = []
    for v in range(n):
        fields = body[v].split()
        try:
            approvals.append([int(f) for f in fields])
        except ValueError as exc:
            raise ValidationError(
                f"plain instance: ballot line {v} has a non-integer entry: {body[v]!r}"
            ) from exc
    return Instance.from_approvals(n, m, k, approvals)


def parse_instance(text: str, fmt: str = "auto") -> Instance:
    """Parse an instance from text in ``json``, ``plain``, or ``auto`` format."""
    if fmt == "json":
        return parse_instance_json(text)
    if fmt == "plain":
        return parse_instance_plain(text)
    if fmt == "auto":
        stripped = text.lstrip()
        if stripped.startswith("{"):
            return parse_instance_json(text)
        return parse_instance_plain(text)
    raise ValidationError(f"unknown instance format {fmt!r}")


def load_instance(path: str, fmt: str = "auto") -> Instance:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read instance file {path}: {exc}") from exc
    if fmt == "auto" and path.endswith(".json"):
        fmt = "json"
    return parse_instance(text, fmt)


def instance_to_json(inst: Instance) -> str:
    obj = {
        "n": inst.n,
        "m": inst.m,
        "k": inst.k,
        "approvals": [list(b) for b in inst.approval_sets()],
    }
    return json.dumps(obj)


def instance_to_plain(inst: Instance) -> str:
    lines = [f"{inst.n} {inst.m} {inst.k}"]
    for ballot in inst.approval_sets():
        lines.append(" ".join(str(c) for c in ballot))
    return "\n".join(lines) + "\n"


def serialize_instance(inst: Instance, fmt: str = "json") -> str:
    if fmt == "json":
        return instance_to_json(inst)
    if fmt == "plain":
        return instance_to_plain(inst)
    raise ValidationError(f"unknown instance format {fmt!r}")
