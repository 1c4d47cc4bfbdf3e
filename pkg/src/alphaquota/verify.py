"""Committee verification: exact alpha values and violation witnesses.

For a committee W, each axiom's alpha value is the largest scaling
factor at which some voter group still has a justified complaint; W
satisfies the axiom at scale alpha exactly when alpha exceeds that
value.  All values are exact rationals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional, Sequence

from .core import (
    Budgets,
    BudgetExceededError,
    Committee,
    DEFAULT_BUDGETS,
    Instance,
    Rational,
    bits_of,
    committee_mask,
    validate_committee,
)


class Axiom(enum.Enum):
    JR = "jr"
    EJR = "ejr"
    EJR_PLUS = "ejrplus"


@dataclass(frozen=True)
class Violation:
    """A voter group with a justified complaint against a committee.

    Every voter in `voters` approves every candidate in `candidates` and
    approves fewer than `level` committee members.  `alpha` is the
    largest scale at which the group qualifies, |S|*k/(level*n).  For
    single-candidate complaints the candidate set has one element
    regardless of level.
    """

    voters: tuple[int, ...]
    candidates: tuple[int, ...]
    level: int
    alpha: Rational


@dataclass(frozen=True)
class AxiomResult:
    alpha_value: Rational
    witness: Optional[Violation]
    axiom: Axiom


def coverage_counts(inst: Instance, wmask: int) -> list[int]:
    """Number of committee members each voter approves."""
    return [(ballot & wmask).bit_count() for ballot in inst.ballots]


def s_max_jr(inst: Instance, committee: Sequence[int]) -> tuple[int, Optional[int]]:
    """Largest uncovered-supporter count over candidates outside W.

    Returns the count together with the smallest attaining candidate
    index, or (0, None) when every complaint is empty.
    """
    w = validate_committee(inst, committee)
    wmask = committee_mask(w)
    uncovered = 0
    for v, ballot in enumerate(inst.ballots):
        if ballot & wmask == 0 and ballot != 0:
            uncovered |= 1 << v
    best, best_c = 0, None
    for c in range(inst.m):
        if (wmask >> c) & 1:
            continue
        size = (inst.supporter_masks[c] & uncovered).bit_count()
        if size > best:
            best, best_c = size, c
    return best, best_c


def alpha_jr(inst: Instance, committee: Sequence[int]) -> AxiomResult:
    w = validate_committee(inst, committee)
    size, cand = s_max_jr(inst, w)
    value = Fraction(size * inst.k, inst.n)
    witness = None
    if size > 0:
        wmask = committee_mask(w)
        supporters = inst.supporter_masks[cand]
        voters = tuple(
            v for v in bits_of(supporters) if inst.ballots[v] & wmask == 0
        )
        witness = Violation(voters=voters, candidates=(cand,), level=1, alpha=value)
    return AxiomResult(alpha_value=value, witness=witness, axiom=Axiom.JR)


def _deficient_mask(inst: Instance, wmask: int, level: int) -> int:
    mask = 0
    for v, ballot in enumerate(inst.ballots):
        if (ballot & wmask).bit_count() < level:
            mask |= 1 << v
    return mask


def largest_common_group(
    cands: Sequence[tuple[int, int]],
    universe: int,
    level: int,
    node_budget: int,
    floor: int = 0,
) -> tuple[int, Optional[tuple[int, ...]]]:
    """Core subset miner shared by verification and optimization.

    `cands` pairs candidate indices (ascending) with masks of the voters
    to count; `universe` is the mask of all countable voters.  Returns
    the largest intersection size over `level`-subsets together with the
    lexicographically smallest attaining subset, ignoring sizes <=
    `floor` (callers that only care whether `floor` can be beaten pass
    their incumbent).
    """
    best_size = floor
    best_t: Optional[tuple[int, ...]] = None
    nodes = 0

    # Depth-first over candidates in ascending index order, sharing the
    # running intersection.  Updating only on strict improvement makes
    # the first maximal set found the lexicographically smallest one;
    # pruning branches whose intersection cannot beat the incumbent
    # never discards a strictly better set.
    stack = [(0, universe, ())]
    while stack:
        start, inter, prefix = stack.pop()
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(
                f"subset enumeration exceeded budget {node_budget}"
            )
        depth = len(prefix)
        if depth == level:
            size = inter.bit_count()
            if size > best_size:
                best_size = size
                best_t = prefix
            continue
        remaining = level - depth
        # Reversed push order keeps ascending-index exploration.
        for idx in range(len(cands) - remaining, start - 1, -1):
            c, mask = cands[idx]
            child = inter & mask
            if child.bit_count() <= best_size:
                continue
            stack.append((idx + 1, child, prefix + (c,)))
    return best_size, best_t


def deficient_supporter_masks(
    inst: Instance, deficient: int
) -> list[tuple[int, int]]:
    """Per-candidate masks of deficient supporters, dropping candidates
    absent from every deficient ballot (they can never enter a scoring
    common-candidate set)."""
    return [
        (c, inst.supporter_masks[c] & deficient)
        for c in range(inst.m)
        if inst.supporter_masks[c] & deficient
    ]


def s_max_ejr(
    inst: Instance,
    committee: Sequence[int],
    level: int,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> tuple[int, Optional[tuple[int, ...]]]:
    """Largest deficient group sharing `level` common candidates.

    Maximizes |{v : |A_v cap W| < level and T subseteq A_v}| over all
    candidate sets T of size `level`; returns the count and the
    lexicographically smallest attaining T.  Only sets contained in some
    deficient voter's ballot are enumerated, which leaves the maximum
    unchanged since any other T scores zero.
    """
    if not 1 <= level <= inst.k:
        raise ValueError(f"level must be in [1, {inst.k}], got {level}")
    if comb(inst.m, level) > budgets.subset_nodes:
        raise BudgetExceededError(
            f"enumeration over {inst.m} choose {level} subsets exceeds "
            f"budget {budgets.subset_nodes}"
        )
    w = validate_committee(inst, committee)
    wmask = committee_mask(w)
    deficient = _deficient_mask(inst, wmask, level)
    if deficient == 0:
        return 0, None
    cands = deficient_supporter_masks(inst, deficient)
    return largest_common_group(cands, deficient, level, budgets.subset_nodes)


def alpha_ejr(
    inst: Instance,
    committee: Sequence[int],
    budgets: Budgets = DEFAULT_BUDGETS,
) -> AxiomResult:
    """Exact EJR alpha value with an attaining witness.

    Maximizes s_max(W, level)*k/(level*n) over level in [1..k]; the
    witness keeps the smallest attaining level.
    """
    w = validate_committee(inst, committee)
    wmask = committee_mask(w)
    best = Fraction(0)
    witness = None
    for level in range(1, inst.k + 1):
        size, t = s_max_ejr(inst, w, level, budgets)
        if size == 0:
            continue
        value = Fraction(size * inst.k, level * inst.n)
        if value > best:
            best = value
            tmask = committee_mask(t)
            voters = tuple(
                v
                for v in range(inst.n)
                if inst.ballots[v] & tmask == tmask
                and (inst.ballots[v] & wmask).bit_count() < level
            )
            witness = Violation(voters=voters, candidates=t, level=level, alpha=value)
    return AxiomResult(alpha_value=best, witness=witness, axiom=Axiom.EJR)


def alpha_ejr_plus(inst: Instance, committee: Sequence[int]) -> AxiomResult:
    """Exact EJR+ alpha value via the single-candidate complaint scan.

    For each candidate c outside W and level in [1..k], counts the
    supporters of c approving fewer than `level` committee members and
    maximizes count*k/(level*n).  Runs in O(m*(n+k)).
    """
    w = validate_committee(inst, committee)
    wmask = committee_mask(w)
    coverage = coverage_counts(inst, wmask)
    best = Fraction(0)
    best_c = best_level = None
    for c in range(inst.m):
        if (wmask >> c) & 1:
            continue
        hist = [0] * (inst.k + 1)
        for v in bits_of(inst.supporter_masks[c]):
            t = coverage[v]
            if t < inst.k:
                hist[t] += 1
        deficient_below = 0
        for level in range(1, inst.k + 1):
            deficient_below += hist[level - 1]
            if deficient_below == 0:
                continue
            value = Fraction(deficient_below * inst.k, level * inst.n)
            if value > best:
                best = value
                best_c, best_level = c, level
    witness = None
    if best > 0:
        voters = tuple(
            v
            for v in bits_of(inst.supporter_masks[best_c])
            if coverage[v] < best_level
        )
        witness = Violation(
            voters=voters, candidates=(best_c,), level=best_level, alpha=best
        )
    return AxiomResult(alpha_value=best, witness=witness, axiom=Axiom.EJR_PLUS)


def alpha_of(
    inst: Instance,
    committee: Sequence[int],
    axiom: Axiom,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> AxiomResult:
    if axiom is Axiom.JR:
        return alpha_jr(inst, committee)
    if axiom is Axiom.EJR:
        return alpha_ejr(inst, committee, budgets)
    if axiom is Axiom.EJR_PLUS:
        return alpha_ejr_plus(inst, committee)
    raise ValueError(f"unknown axiom: {axiom!r}")


def satisfies(
    inst: Instance,
    committee: Sequence[int],
    alpha: Rational,
    axiom: Axiom,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> bool:
    """True iff W meets the axiom at scale alpha.

    Satisfaction is strict: at alpha equal to the committee's alpha
    value a tight violating group still exists, and at alpha = 0 every
    nonempty voter group qualifies, so the answer there is always False.
    """
    if Fraction(alpha) < 0:
        raise ValueError("alpha must be non-negative")
    return Fraction(alpha) > alpha_of(inst, committee, axiom, budgets).alpha_value
