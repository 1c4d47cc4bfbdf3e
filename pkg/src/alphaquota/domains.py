"""Structured profiles: party lists and interval domains.

Party-list profiles get a closed-form seat allocation; voter-interval
(VI) and candidate-interval (CI) profiles get greedy sweep algorithms
for the JR search plus quadratic interval scans for EJR verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from .core import (
    Budgets,
    BudgetExceededError,
    Committee,
    DEFAULT_BUDGETS,
    InfeasibleError,
    Instance,
    Rational,
    bits_of,
    validate_committee,
)
from .optimize import OptimizationOutcome, _alpha_jr_value
from .pqtree import consecutive_ones_order
from .verify import Axiom, AxiomResult, Violation, alpha_ejr, alpha_jr


# --- party lists ------------------------------------------------------------


@dataclass(frozen=True)
class PartyStructure:
    """Disjoint voter blocks with identical ballots, ordered by their
    smallest voter index."""

    parties: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    sizes: tuple[int, ...]


def party_list_obstruction(inst: Instance) -> Optional[tuple[int, int]]:
    """First voter pair whose ballots overlap without being equal."""
    for i in range(inst.n):
        a = inst.ballots[i]
        if not a:
            continue
        for j in range(i + 1, inst.n):
            b = inst.ballots[j]
            if b and a & b and a != b:
                return i, j
    return None


def detect_party_list(inst: Instance) -> Optional[PartyStructure]:
    if party_list_obstruction(inst) is not None:
        return None
    groups: dict[int, list[int]] = {}
    for v, ballot in enumerate(inst.ballots):
        if ballot:
            groups.setdefault(ballot, []).append(v)
    for ballot in groups:
        if ballot.bit_count() < inst.k:
            return None
    blocks = sorted(groups.items(), key=lambda item: item[1][0])
    parties = tuple(
        (tuple(voters), tuple(bits_of(ballot))) for ballot, voters in blocks
    )
    return PartyStructure(
        parties=parties, sizes=tuple(len(voters) for voters, _ in parties)
    )


def party_list_optimal_ejr(
    inst: Instance, parties: PartyStructure
) -> OptimizationOutcome:
    """Seats go one at a time to a party maximizing s_p/(w_p + 1); the
    resulting allocation minimizes the worst proportionality factor.

    A party holding all k seats cannot anchor a violation (levels stop
    at k), so it drops out of the final maximum.
    """
    pool = sum(len(cands) for _, cands in parties.parties)
    if pool < inst.k:
        raise InfeasibleError(
            f"parties offer {pool} candidates for {inst.k} seats"
        )
    seats = [0] * len(parties.parties)
    for _ in range(inst.k):
        best = max(
            range(len(seats)),
            key=lambda p: (Fraction(parties.sizes[p], seats[p] + 1), -p),
        )
        seats[best] += 1
    committee: list[int] = []
    for (_, cands), w in zip(parties.parties, seats):
        committee.extend(cands[:w])
    alpha_star = Fraction(0)
    for size, w in zip(parties.sizes, seats):
        if w < inst.k:
            alpha_star = max(
                alpha_star, Fraction(size * inst.k, (w + 1) * inst.n)
            )
    return OptimizationOutcome(
        alpha_star=alpha_star,
        committee=tuple(sorted(committee)),
        method="partylist",
        explored=inst.k,
    )


# --- interval recognition ----------------------------------------------------


@dataclass(frozen=True)
class VoterOrder:
    order: tuple[int, ...]


@dataclass(frozen=True)
class CandidateOrder:
    order: tuple[int, ...]


def recognize_vi(inst: Instance) -> Optional[VoterOrder]:
    """Voter order making every candidate's supporters consecutive."""
    sets = [tuple(bits_of(mask)) for mask in inst.supporter_masks if mask]
    order = consecutive_ones_order(inst.n, sets)
    return VoterOrder(tuple(order)) if order is not None else None


def recognize_ci(inst: Instance) -> Optional[CandidateOrder]:
    """Candidate order making every ballot consecutive."""
    sets = [tuple(bits_of(ballot)) for ballot in inst.ballots if ballot]
    order = consecutive_ones_order(inst.m, sets)
    return CandidateOrder(tuple(order)) if order is not None else None


def verify_order(inst: Instance, order: Sequence[int], kind: str) -> bool:
    if kind == "vi":
        ground, sets = inst.n, [mask for mask in inst.supporter_masks if mask]
    elif kind == "ci":
        ground, sets = inst.m, [ballot for ballot in inst.ballots if ballot]
    else:
        raise ValueError(f"unknown order kind {kind!r}")
    if sorted(order) != list(range(ground)):
        raise ValueError("order is not a permutation of the ground set")
    position = {e: i for i, e in enumerate(order)}
    for mask in sets:
        spots = sorted(position[e] for e in bits_of(mask))
        if spots[-1] - spots[0] + 1 != len(spots):
            return False
    return True


def _as_order(order, wrapper) -> tuple[int, ...]:
    if isinstance(order, wrapper):
        return order.order
    return tuple(order)


# --- voter-interval algorithms ----------------------------------------------


def _vi_sweep(
    inst: Instance,
    order: tuple[int, ...],
    threshold,
    limit: Optional[int] = None,
) -> list[tuple[int, int]]:
    """One pass of the prefix-repair sweep at a fixed group threshold.

    A group counts as a violation when at least `threshold` uncovered
    prefix voters share an unelected candidate; adding the current
    voter's candidate with the farthest-right supporter interval repairs
    it, and no other candidate can be over threshold afterwards.
    Returns (trigger position, candidate) pairs in selection order;
    `limit` stops the sweep after that many voters.
    """
    right_end = {}
    position = {v: i for i, v in enumerate(order)}
    for c in range(inst.m):
        mask = inst.supporter_masks[c]
        if mask:
            right_end[c] = max(position[v] for v in bits_of(mask))
    chosen: list[tuple[int, int]] = []
    wmask = 0
    counts = [0] * inst.m
    stop = len(order) if limit is None else min(limit, len(order))
    for i in range(stop):
        v = order[i]
        ballot = inst.ballots[v]
        if not ballot or ballot & wmask:
            continue
        hit = False
        for c in bits_of(ballot):
            counts[c] += 1
            if counts[c] >= threshold:
                hit = True
        if not hit:
            continue
        pick = -1
        pick_end = -1
        for c in bits_of(ballot):
            if right_end[c] > pick_end:
                pick, pick_end = c, right_end[c]
        chosen.append((i, pick))
        wmask |= 1 << pick
        counts = [0] * inst.m
        for j in range(i + 1):
            u = order[j]
            b = inst.ballots[u]
            if b and not b & wmask:
                for c in bits_of(b):
                    counts[c] += 1
    return chosen


def vi_greedy_jr(inst: Instance, order, alpha: Rational) -> tuple[int, ...]:
    """Smallest candidate set whose prefix sweep clears every group of
    uncovered voters at the given scale; may exceed k."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    seq = _as_order(order, VoterOrder)
    threshold = alpha * inst.n / inst.k
    return tuple(sorted(c for _, c in _vi_sweep(inst, seq, threshold)))


def _grid_threshold_search(
    inst: Instance, feasible_at
) -> tuple[Fraction, tuple[int, ...], int]:
    """Smallest integer group threshold whose repair set fits in k
    seats, by bisection; thresholds index the JR value grid."""
    lo, hi = 1, -(-inst.n // inst.k)
    probes = 0
    best: Optional[tuple[int, ...]] = None
    while lo < hi:
        mid = (lo + hi) // 2
        result = feasible_at(mid)
        probes += 1
        if len(result) <= inst.k:
            hi, best = mid, result
        else:
            lo = mid + 1
    if best is None:
        best = feasible_at(lo)
        probes += 1
    alpha_star = Fraction((lo - 1) * inst.k, inst.n)
    return alpha_star, best, probes


def _pad_lex(inst: Instance, chosen: Sequence[int]) -> Committee:
    out = list(chosen)
    have = set(out)
    for c in range(inst.m):
        if len(out) >= inst.k:
            break
        if c not in have:
            out.append(c)
    return tuple(sorted(out))


def vi_optimal_alpha_jr(inst: Instance, order) -> OptimizationOutcome:
    seq = _as_order(order, VoterOrder)
    alpha_star, chosen, probes = _grid_threshold_search(
        inst, lambda b: [c for _, c in _vi_sweep(inst, seq, b)]
    )
    return OptimizationOutcome(
        alpha_star=alpha_star,
        committee=_pad_lex(inst, chosen),
        method="vi_greedy",
        explored=probes,
    )


def vi_alpha_ejr(inst: Instance, order, committee) -> AxiomResult:
    """Exact EJR factor from voter-interval structure: every cohesive
    group lies inside a contiguous run of the order, so scanning runs
    and their common ballots covers all witnesses in O(n^2 k)."""
    seq = _as_order(order, VoterOrder)
    w = validate_committee(inst, committee)
    wmask = 0
    for c in w:
        wmask |= 1 << c
    coverage = [(ballot & wmask).bit_count() for ballot in inst.ballots]
    best = Fraction(0)
    witness: Optional[Violation] = None
    full = (1 << inst.m) - 1
    for start in range(inst.n):
        common = full
        short = [0] * (inst.k + 2)
        for stop in range(start, inst.n):
            v = seq[stop]
            common &= inst.ballots[v]
            if not common:
                break
            for level in range(coverage[v] + 1, inst.k + 1):
                short[level] += 1
            top = min(inst.k, common.bit_count())
            for level in range(1, top + 1):
                value = Fraction(short[level] * inst.k, level * inst.n)
                if value > best:
                    best = value
                    group = tuple(
                        seq[i]
                        for i in range(start, stop + 1)
                        if coverage[seq[i]] < level
                    )
                    shared = tuple(bits_of(common))[:level]
                    witness = Violation(
                        voters=group,
                        candidates=shared,
                        level=level,
                        alpha=value,
                    )
    return AxiomResult(alpha_value=best, witness=witness, axiom=Axiom.EJR)


# --- candidate-interval algorithms --------------------------------------------


def _ci_prune(inst: Instance, order: tuple[int, ...], threshold) -> list[int]:
    """Drop candidates along the order whenever removal leaves every
    uncovered group below the threshold."""
    limit = Fraction(threshold) * inst.k / inst.n
    keep = set(range(inst.m))
    for c in order:
        trial = keep - {c}
        wmask = 0
        for x in trial:
            wmask |= 1 << x
        if _alpha_jr_value(inst, wmask) < limit:
            keep = trial
    return sorted(keep)


def ci_greedy_jr(inst: Instance, order, alpha: Rational) -> tuple[int, ...]:
    """Minimal candidate set keeping every uncovered group under the
    scale, pruning from the full slate along the candidate order."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    seq = _as_order(order, CandidateOrder)
    threshold = alpha * inst.n / inst.k
    return tuple(_ci_prune(inst, seq, threshold))


def ci_optimal_alpha_jr(inst: Instance, order) -> OptimizationOutcome:
    seq = _as_order(order, CandidateOrder)
    alpha_star, chosen, probes = _grid_threshold_search(
        inst, lambda b: _ci_prune(inst, seq, b)
    )
    out = list(chosen)
    have = set(out)
    for c in seq:
        if len(out) >= inst.k:
            break
        if c not in have:
            out.append(c)
    return OptimizationOutcome(
        alpha_star=alpha_star,
        committee=tuple(sorted(out)),
        method="ci_greedy",
        explored=probes,
    )


def ci_alpha_ejr(inst: Instance, order, committee) -> AxiomResult:
    """Exact EJR factor from candidate-interval structure: a ballot
    contains a candidate set iff it spans the set's run, so runs of the
    order enumerate every possible shared slate."""
    seq = _as_order(order, CandidateOrder)
    w = validate_committee(inst, committee)
    wmask = 0
    for c in w:
        wmask |= 1 << c
    position = {c: i for i, c in enumerate(seq)}
    spans: list[Optional[tuple[int, int]]] = []
    coverage = []
    for ballot in inst.ballots:
        coverage.append((ballot & wmask).bit_count())
        if ballot:
            spots = [position[c] for c in bits_of(ballot)]
            spans.append((min(spots), max(spots)))
        else:
            spans.append(None)
    best = Fraction(0)
    witness: Optional[Violation] = None
    for start in range(inst.m):
        for stop in range(start, inst.m):
            width = stop - start + 1
            holders = [
                v
                for v, span in enumerate(spans)
                if span is not None and span[0] <= start and stop <= span[1]
            ]
            if not holders:
                break
            for level in range(1, min(inst.k, width) + 1):
                group = tuple(v for v in holders if coverage[v] < level)
                value = Fraction(len(group) * inst.k, level * inst.n)
                if value > best:
                    shared = tuple(sorted(seq[start : stop + 1]))[:level]
                    best = value
                    witness = Violation(
                        voters=group,
                        candidates=shared,
                        level=level,
                        alpha=value,
                    )
    return AxiomResult(alpha_value=best, witness=witness, axiom=Axiom.EJR)


# --- enumeration with fast interval verification ------------------------------


def _interval_optimal_ejr(
    inst: Instance,
    evaluate,
    method: str,
    budgets: Budgets,
) -> OptimizationOutcome:
    total = comb(inst.m, inst.k)
    if total > budgets.committees:
        raise BudgetExceededError(
            f"{total} committees exceed the enumeration budget"
        )
    best: Optional[Fraction] = None
    best_committee: Optional[Committee] = None
    evaluated = 0
    for committee in combinations(range(inst.m), inst.k):
        wmask = 0
        for c in committee:
            wmask |= 1 << c
        if best is not None and _alpha_jr_value(inst, wmask) >= best:
            continue
        evaluated += 1
        value = evaluate(committee).alpha_value
        if best is None or value < best:
            best, best_committee = value, committee
            if best == 0:
                break
    assert best is not None and best_committee is not None
    return OptimizationOutcome(
        alpha_star=best,
        committee=best_committee,
        method=method,
        explored=evaluated,
    )


def vi_optimal_alpha_ejr(
    inst: Instance, order, budgets: Budgets = DEFAULT_BUDGETS
) -> OptimizationOutcome:
    seq = _as_order(order, VoterOrder)
    return _interval_optimal_ejr(
        inst,
        lambda w: vi_alpha_ejr(inst, seq, w),
        "vi_enumeration",
        budgets,
    )


def ci_optimal_alpha_ejr(
    inst: Instance, order, budgets: Budgets = DEFAULT_BUDGETS
) -> OptimizationOutcome:
    seq = _as_order(order, CandidateOrder)
    return _interval_optimal_ejr(
        inst,
        lambda w: ci_alpha_ejr(inst, seq, w),
        "ci_enumeration",
        budgets,
    )


# --- routing ------------------------------------------------------------------


def detect_structures(inst: Instance) -> dict:
    return {
        "partylist": detect_party_list(inst),
        "vi": recognize_vi(inst),
        "ci": recognize_ci(inst),
    }


def structured_optimal_alpha(
    inst: Instance,
    axiom: Axiom,
    domain: str = "auto",
    budgets: Budgets = DEFAULT_BUDGETS,
) -> tuple[str, OptimizationOutcome]:
    """Route the search to a structure-specific algorithm.

    `domain` names one structure or "auto", which tries party lists,
    then voter intervals, then candidate intervals, and reports
    "generic" if nothing matches.  Asking for an absent structure raises
    InfeasibleError.
    """
    from .optimize import optimal_alpha

    if axiom not in (Axiom.JR, Axiom.EJR):
        raise ValueError(f"no optimizer for axiom {axiom.value}")

    def by_party():
        parties = detect_party_list(inst)
        if parties is None:
            return None
        if axiom is Axiom.JR:
            return None
        return party_list_optimal_ejr(inst, parties)

    def by_vi():
        order = recognize_vi(inst)
        if order is None:
            return None
        if axiom is Axiom.JR:
            return vi_optimal_alpha_jr(inst, order)
        return vi_optimal_alpha_ejr(inst, order, budgets)

    def by_ci():
        order = recognize_ci(inst)
        if order is None:
            return None
        if axiom is Axiom.JR:
            return ci_optimal_alpha_jr(inst, order)
        return ci_optimal_alpha_ejr(inst, order, budgets)

    routes = {"partylist": by_party, "vi": by_vi, "ci": by_ci}
    if domain == "auto":
        for name, attempt in routes.items():
            outcome = attempt()
            if outcome is not None:
                return name, outcome
        return "generic", optimal_alpha(inst, axiom, budgets=budgets)
    if domain == "generic":
        return "generic", optimal_alpha(inst, axiom, budgets=budgets)
    if domain not in routes:
        raise ValueError(f"unknown domain {domain!r}")
    if domain == "partylist" and axiom is Axiom.JR:
        if detect_party_list(inst) is None:
            raise InfeasibleError("instance lacks the partylist structure")
        return "generic", optimal_alpha(inst, axiom, budgets=budgets)
    outcome = routes[domain]()
    if outcome is None:
        raise InfeasibleError(f"instance lacks the {domain} structure")
    return domain, outcome
