"""Instance-level optimization: the smallest achievable alpha values.

The JR optimum comes from a feasibility search equivalent to an integer
program over committee membership, binary-searched along the value grid.
The EJR and EJR+ optima come from complete committee enumeration with
pruning that never discards a strictly better committee.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import IO, Optional

from .core import (
    AlphaQuotaError,
    Budgets,
    BudgetExceededError,
    Committee,
    DEFAULT_BUDGETS,
    Instance,
    Rational,
)
from .verify import (
    Axiom,
    coverage_counts,
    deficient_supporter_masks,
    largest_common_group,
)


@dataclass(frozen=True)
class AlphaGrid:
    values: tuple[Rational, ...]
    axiom: Axiom


@dataclass(frozen=True)
class OptimizationOutcome:
    alpha_star: Rational
    committee: Committee
    method: str
    explored: int


def alpha_grid(inst: Instance, axiom: Axiom) -> AlphaGrid:
    """All values the committee-wise alpha can take, ascending.

    JR values are j*k/n for j up to ceil(n/k)-1; EJR values additionally
    divide by the group level, merged over levels 1..k.
    """
    n, k = inst.n, inst.k
    if axiom is Axiom.JR:
        r = -(-n // k) - 1
        values = tuple(Fraction(j * k, n) for j in range(r + 1))
        return AlphaGrid(values=values, axiom=axiom)
    if axiom is Axiom.EJR:
        seen = set()
        for level in range(1, k + 1):
            top = -(-n * level // k) - 1
            for j in range(top + 1):
                seen.add(Fraction(j * k, level * n))
        return AlphaGrid(values=tuple(sorted(seen)), axiom=axiom)
    raise ValueError(f"no value grid for axiom {axiom!r}")


def _uncovered_bound_violated(
    inst: Instance, covered: int, hopeless_from: int, bound: int
) -> bool:
    """True when some candidate already has more than `bound` supporters
    that are uncovered and approve no candidate with index >= hopeless_from."""
    dead = 0
    suffix = ((1 << inst.m) - 1) >> hopeless_from << hopeless_from
    for v, ballot in enumerate(inst.ballots):
        if not (covered >> v) & 1 and ballot and ballot & suffix == 0:
            dead |= 1 << v
    if dead == 0:
        return False
    return any(
        (mask & dead).bit_count() > bound for mask in inst.supporter_masks
    )


def _feasible_committee(
    inst: Instance, bound: int, node_budget: int
) -> tuple[Optional[Committee], int]:
    """Lexicographically smallest size-k committee leaving every
    candidate with at most `bound` uncovered supporters, or None.

    Depth-first over include/exclude decisions per candidate; a branch
    dies as soon as voters that can no longer be covered pile more than
    `bound` complaints onto any single candidate.
    """
    m, k = inst.m, inst.k
    sup = inst.supporter_masks
    nodes = 0
    found: Optional[Committee] = None

    def dfs(idx: int, chosen: list[int], covered: int) -> None:
        nonlocal nodes, found
        if found is not None:
            return
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(
                f"feasibility search exceeded node budget {node_budget}"
            )
        rem = k - len(chosen)
        if rem == 0:
            if not _uncovered_bound_violated(inst, covered, m, bound):
                found = tuple(chosen)
            return
        if m - idx < rem:
            return
        if _uncovered_bound_violated(inst, covered, idx, bound):
            return
        chosen.append(idx)
        dfs(idx + 1, chosen, covered | sup[idx])
        chosen.pop()
        dfs(idx + 1, chosen, covered)

    dfs(0, [], 0)
    return found, nodes


def exists_committee_jr(
    inst: Instance,
    alpha: Rational,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> Optional[Committee]:
    """A committee where every candidate keeps at most ceil(alpha*n/k)-1
    uncovered supporters, or None when no such committee exists."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    bound = math.ceil(alpha * inst.n / inst.k) - 1
    committee, _ = _feasible_committee(inst, bound, budgets.committees)
    return committee


def optimal_alpha_jr(
    inst: Instance, budgets: Budgets = DEFAULT_BUDGETS
) -> OptimizationOutcome:
    """Smallest achievable JR alpha, via binary search on the complaint
    bound (feasibility is monotone in it)."""
    r = -(-inst.n // inst.k) - 1
    probes: dict[int, Optional[Committee]] = {}
    total_nodes = 0

    def probe(bound: int) -> Optional[Committee]:
        nonlocal total_nodes
        if bound not in probes:
            committee, nodes = _feasible_committee(
                inst, bound, budgets.committees
            )
            total_nodes += nodes
            probes[bound] = committee
        return probes[bound]

    lo, hi = 0, r
    while lo < hi:
        mid = (lo + hi) // 2
        if probe(mid) is not None:
            hi = mid
        else:
            lo = mid + 1
    committee = probe(lo)
    if committee is None:
        raise AlphaQuotaError(
            "no committee meets the one-per-seat complaint bound; "
            "this contradicts greedy coverage and indicates a bug"
        )
    return OptimizationOutcome(
        alpha_star=Fraction(lo * inst.k, inst.n),
        committee=committee,
        method="ilp_bnb",
        explored=total_nodes,
    )


def _alpha_jr_value(inst: Instance, wmask: int) -> Fraction:
    uncovered = 0
    for v, ballot in enumerate(inst.ballots):
        if ballot and ballot & wmask == 0:
            uncovered |= 1 << v
    if uncovered == 0:
        return Fraction(0)
    s = max((mask & uncovered).bit_count() for mask in inst.supporter_masks)
    return Fraction(s * inst.k, inst.n)


def _alpha_ejr_below(
    inst: Instance, wmask: int, cap: Optional[Fraction], budgets: Budgets
) -> Optional[Fraction]:
    """Exact EJR alpha of the committee if it is below `cap`, else None.

    Levels whose cheap upper bound cannot raise the running maximum are
    skipped outright, which never changes the final maximum; the scan
    aborts once the running maximum reaches `cap`, at which point the
    committee cannot improve on the incumbent.
    """
    n, k = inst.n, inst.k
    coverage = coverage_counts(inst, wmask)
    partial = Fraction(0)
    for level in range(1, k + 1):
        deficient = 0
        for v, t in enumerate(coverage):
            if t < level and inst.ballots[v]:
                deficient |= 1 << v
        if deficient == 0:
            continue
        cands = deficient_supporter_masks(inst, deficient)
        if len(cands) < level:
            continue
        counts = sorted((mask.bit_count() for _, mask in cands), reverse=True)
        optimistic = min(deficient.bit_count(), counts[level - 1])
        # Group sizes at or below this floor cannot raise the running
        # maximum, so the miner may ignore them without changing it.
        floor = math.floor(partial * level * n / k)
        if optimistic <= floor:
            continue
        size, t = largest_common_group(
            cands, deficient, level, budgets.subset_nodes, floor=floor
        )
        if t is None:
            continue
        partial = Fraction(size * k, level * n)
        if cap is not None and partial >= cap:
            return None
    return partial


def optimal_alpha_ejr(
    inst: Instance, budgets: Budgets = DEFAULT_BUDGETS
) -> OptimizationOutcome:
    """Smallest achievable EJR alpha by complete committee enumeration.

    The JR value of each committee is a lower bound on its EJR value, so
    committees whose JR value already matches the incumbent are skipped;
    ties keep the first committee in lexicographic order.
    """
    m, k = inst.m, inst.k
    if comb(m, k) > budgets.committees:
        raise BudgetExceededError(
            f"{m} choose {k} committees exceed budget {budgets.committees}"
        )
    best: Optional[Fraction] = None
    best_committee: Optional[Committee] = None
    explored = 0
    for w in itertools.combinations(range(m), k):
        explored += 1
        wmask = 0
        for c in w:
            wmask |= 1 << c
        if best is not None and _alpha_jr_value(inst, wmask) >= best:
            continue
        value = _alpha_ejr_below(inst, wmask, best, budgets)
        if value is None:
            continue
        if best is None or value < best:
            best, best_committee = value, w
            if best == 0:
                break
    return OptimizationOutcome(
        alpha_star=best,
        committee=best_committee,
        method="brute_force",
        explored=explored,
    )


def _alpha_ejr_plus_value(inst: Instance, wmask: int) -> Fraction:
    coverage = coverage_counts(inst, wmask)
    n, k = inst.n, inst.k
    best = Fraction(0)
    for c in range(inst.m):
        if (wmask >> c) & 1:
            continue
        hist = [0] * (k + 1)
        for v in range(n):
            if (inst.supporter_masks[c] >> v) & 1 and coverage[v] < k:
                hist[coverage[v]] += 1
        running = 0
        for level in range(1, k + 1):
            running += hist[level - 1]
            if running:
                value = Fraction(running * k, level * n)
                if value > best:
                    best = value
    return best


def optimal_alpha_ejr_plus(
    inst: Instance, budgets: Budgets = DEFAULT_BUDGETS
) -> OptimizationOutcome:
    """Smallest achievable EJR+ alpha by complete committee enumeration."""
    m, k = inst.m, inst.k
    if comb(m, k) > budgets.committees:
        raise BudgetExceededError(
            f"{m} choose {k} committees exceed budget {budgets.committees}"
        )
    best: Optional[Fraction] = None
    best_committee: Optional[Committee] = None
    explored = 0
    for w in itertools.combinations(range(m), k):
        explored += 1
        wmask = 0
        for c in w:
            wmask |= 1 << c
        if best is not None and _alpha_jr_value(inst, wmask) >= best:
            continue
        value = _alpha_ejr_plus_value(inst, wmask)
        if best is None or value < best:
            best, best_committee = value, w
            if best == 0:
                break
    return OptimizationOutcome(
        alpha_star=best,
        committee=best_committee,
        method="brute_force",
        explored=explored,
    )


def optimal_alpha_jr_brute(
    inst: Instance, budgets: Budgets = DEFAULT_BUDGETS
) -> OptimizationOutcome:
    """JR optimum by plain enumeration; oracle for the search version."""
    m, k = inst.m, inst.k
    if comb(m, k) > budgets.committees:
        raise BudgetExceededError(
            f"{m} choose {k} committees exceed budget {budgets.committees}"
        )
    best: Optional[Fraction] = None
    best_committee: Optional[Committee] = None
    explored = 0
    for w in itertools.combinations(range(m), k):
        explored += 1
        wmask = 0
        for c in w:
            wmask |= 1 << c
        value = _alpha_jr_value(inst, wmask)
        if best is None or value < best:
            best, best_committee = value, w
            if best == 0:
                break
    return OptimizationOutcome(
        alpha_star=best,
        committee=best_committee,
        method="brute_force",
        explored=explored,
    )


def optimal_alpha(
    inst: Instance,
    axiom: Axiom,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> OptimizationOutcome:
    if axiom is Axiom.JR:
        return optimal_alpha_jr(inst, budgets)
    if axiom is Axiom.EJR:
        return optimal_alpha_ejr(inst, budgets)
    if axiom is Axiom.EJR_PLUS:
        return optimal_alpha_ejr_plus(inst, budgets)
    raise ValueError(f"unknown axiom: {axiom!r}")


def export_lp(inst: Instance, alpha: Rational, out: IO[str]) -> None:
    """Write the membership/coverage integer program in LP text format.

    Variables x_c select candidates, y_v mark covered voters.  One seat
    row fixes the committee size; per-voter rows tie y_v to the selected
    ballot; per-candidate rows cap uncovered supporters by
    ceil(alpha*n/k)-1, rewritten as a lower bound on the covered ones so
    every coefficient is an integer.
    """
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    bound = math.ceil(alpha * inst.n / inst.k) - 1
    out.write("Minimize\n")
    out.write(" obj: 0 x_0\n")
    out.write("Subject To\n")
    seat_terms = " + ".join(f"x_{c}" for c in range(inst.m))
    out.write(f" seats: {seat_terms} = {inst.k}\n")
    approval_sets = inst.approval_sets()
    for v in range(inst.n):
        terms = "".join(f" - x_{c}" for c in approval_sets[v])
        out.write(f" cover_{v}: y_{v}{terms} <= 0\n")
    for c in range(inst.m):
        supporters = [v for v in range(inst.n) if c in approval_sets[v]]
        rhs = len(supporters) - bound
        terms = " + ".join(f"y_{v}" for v in supporters)
        if not terms:
            terms = "0 y_0"
        out.write(f" complaints_{c}: {terms} >= {rhs}\n")
    out.write("Binary\n")
    names = [f"x_{c}" for c in range(inst.m)] + [
        f"y_{v}" for v in range(inst.n)
    ]
    out.write(" " + " ".join(names) + "\n")
    out.write("End\n")
