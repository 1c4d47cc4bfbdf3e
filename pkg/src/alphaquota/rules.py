"""The eight committee rules, each reporting up to a configurable
number of tied or alternative committees.

Sequential rules branch on ties breadth-first, exploring the smallest
candidate index first; `adversarial=True` instead explores branches and
keeps the single committee with the worst (largest) JR alpha value,
which reproduces the worst-case constructions.  Rules that select fewer
than k candidates fill the remaining seats with the smallest unelected
indices and note the padding in the trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Optional, Sequence

from .core import (
    AlphaQuotaError,
    Budgets,
    BudgetExceededError,
    Committee,
    DEFAULT_BUDGETS,
    Instance,
    Rational,
    bits_of,
)
from .optimize import alpha_grid
from .verify import Axiom, alpha_jr

ADVERSARIAL_BRANCH_BUDGET = 4096


@dataclass(frozen=True)
class RuleOutcome:
    rule: str
    committees: tuple[Committee, ...]
    trace: Optional[tuple[str, ...]]
    padded_seats: tuple[int, ...]


@dataclass
class _Branch:
    chosen: list[int]
    state: object
    log: list[str]
    padded: int = 0
    done: bool = False


def _pad(inst: Instance, chosen: list[int], log: list[str], want: int) -> int:
    added = 0
    for c in range(inst.m):
        if len(chosen) >= want:
            break
        if c not in chosen:
            chosen.append(c)
            added += 1
    if added:
        log.append(f"pad: filled {added} empty seat(s) by index")
    return added


def _finalize(
    inst: Instance,
    rule: str,
    branches: list[_Branch],
    max_committees: int,
    adversarial: bool,
    want_trace: bool,
) -> RuleOutcome:
    seen: set[Committee] = set()
    committees: list[Committee] = []
    pads: list[int] = []
    logs: list[str] = []
    for i, br in enumerate(branches):
        committee = tuple(sorted(br.chosen))
        if committee in seen:
            continue
        seen.add(committee)
        committees.append(committee)
        pads.append(br.padded)
        if want_trace:
            logs.extend(f"branch {len(committees) - 1}: {line}" for line in br.log)
    if adversarial:
        scored = [
            (alpha_jr(inst, w).alpha_value, w, p)
            for w, p in zip(committees, pads)
        ]
        worst = max(v for v, _, _ in scored)
        value, committee, padded = min(
            (v, w, p) for v, w, p in scored if v == worst
        )
        if want_trace:
            logs.append(
                f"adversarial: kept {list(committee)} with jr value {value}"
            )
        committees, pads = [committee], [padded]
    else:
        committees = committees[:max_committees]
        pads = pads[:max_committees]
    return RuleOutcome(
        rule=rule,
        committees=tuple(committees),
        trace=tuple(logs) if want_trace else None,
        padded_seats=tuple(pads),
    )


def _cap(branches: list[_Branch], adversarial: bool, max_committees: int) -> list[_Branch]:
    limit = ADVERSARIAL_BRANCH_BUDGET if adversarial else max_committees
    return branches[:limit]


def _run_rounds(
    inst: Instance,
    rule: str,
    initial_state: object,
    expand: Callable[[_Branch], list[tuple[int, object, str]]],
    max_committees: int,
    adversarial: bool,
    want_trace: bool,
) -> RuleOutcome:
    """Breadth-first tie exploration for one-candidate-per-round rules.

    `expand` returns the tied best options for a live branch as
    (candidate, next_state, note) triples in ascending candidate order;
    an empty list stalls the branch, which is then padded.
    """
    frontier = [_Branch(chosen=[], state=initial_state, log=[])]
    for _ in range(inst.k):
        nxt: list[_Branch] = []
        for br in frontier:
            if br.done:
                nxt.append(br)
                continue
            options = expand(br)
            if not options:
                br.padded = _pad(inst, br.chosen, br.log, inst.k)
                br.done = True
                nxt.append(br)
                continue
            for cand, state, note in options:
                child = _Branch(
                    chosen=br.chosen + [cand],
                    state=state,
                    log=br.log + [note] if want_trace else br.log,
                )
                nxt.append(child)
        frontier = _cap(nxt, adversarial, max_committees)
    return _finalize(inst, rule, frontier, max_committees, adversarial, want_trace)


# --- score rules -----------------------------------------------------------


def cc_score(inst: Instance, committee: Sequence[int]) -> int:
    wmask = 0
    for c in committee:
        wmask |= 1 << c
    return sum(1 for ballot in inst.ballots if ballot & wmask)


def pav_score(inst: Instance, committee: Sequence[int]) -> Rational:
    wmask = 0
    for c in committee:
        wmask |= 1 << c
    scale = lcm(*range(1, inst.k + 1))
    total = 0
    for ballot in inst.ballots:
        t = (ballot & wmask).bit_count()
        total += sum(scale // j for j in range(1, t + 1))
    return Fraction(total, scale)


def _enumerate_optima(
    inst: Instance,
    marginal: Callable[[int, tuple[int, ...]], int],
    value_of: Callable[[tuple[int, ...]], int],
    max_committees: int,
    node_budget: int,
) -> tuple[int, list[Committee]]:
    """Shared enumerator for cc and pav.

    Walks candidates in index order deciding include/exclude, keeping
    every leaf whose exact score ties the incumbent (up to the cap) and
    pruning on an optimistic bound: current value plus the largest
    possible remaining marginals, which only overestimates because both
    objectives have shrinking marginal gains.
    """
    m, k = inst.m, inst.k
    best = -1
    found: list[Committee] = []
    nodes = 0

    def dfs(idx: int, chosen: tuple[int, ...]) -> None:
        nonlocal best, found, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(
                f"score enumeration exceeded node budget {node_budget}"
            )
        if len(chosen) == k:
            score = value_of(chosen)
            if score > best:
                best = score
                found = [chosen]
            elif score == best and len(found) < max_committees:
                found.append(chosen)
            return
        if m - idx < k - len(chosen):
            return
        rem = k - len(chosen)
        gains = sorted(
            (marginal(c, chosen) for c in range(idx, m)), reverse=True
        )[:rem]
        bound = value_of(chosen) + sum(gains)
        if bound < best or (bound == best and len(found) >= max_committees):
            return
        dfs(idx + 1, chosen + (idx,))
        dfs(idx + 1, chosen)

    dfs(0, ())
    return best, found


def cc(
    inst: Instance,
    *,
    max_committees: int = 5,
    adversarial: bool = False,
    trace: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> RuleOutcome:
    """Committees maximizing the number of covered voters."""

    def value_of(chosen: tuple[int, ...]) -> int:
        return cc_score(inst, chosen)

    def marginal(c: int, chosen: tuple[int, ...]) -> int:
        covered = 0
        for x in chosen:
            covered |= inst.supporter_masks[x]
        return (inst.supporter_masks[c] & ~covered).bit_count()

    cap = ADVERSARIAL_BRANCH_BUDGET if adversarial else max_committees
    score, found = _enumerate_optima(
        inst, marginal, value_of, cap, budgets.committees
    )
    logs = (f"optimum coverage {score}",) if trace else None
    outcome = RuleOutcome(
        rule="cc",
        committees=tuple(found),
        trace=logs,
        padded_seats=tuple(0 for _ in found),
    )
    if adversarial:
        return _worst_of(inst, outcome, trace)
    return outcome


def pav(
    inst: Instance,
    *,
    max_committees: int = 5,
    adversarial: bool = False,
    trace: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> RuleOutcome:
    """Committees maximizing the harmonic-weighted approval score."""
    scale = lcm(*range(1, inst.k + 1))
    weight = [0] * (inst.k + 1)
    for t in range(1, inst.k + 1):
        weight[t] = weight[t - 1] + scale // t

    def value_of(chosen: tuple[int, ...]) -> int:
        wmask = 0
        for c in chosen:
            wmask |= 1 << c
        return sum(
            weight[(ballot & wmask).bit_count()] for ballot in inst.ballots
        )

    def marginal(c: int, chosen: tuple[int, ...]) -> int:
        wmask = 0
        for x in chosen:
            wmask |= 1 << x
        gain = 0
        for v in bits_of(inst.supporter_masks[c]):
            t = (inst.ballots[v] & wmask).bit_count()
            gain += scale // (t + 1)
        return gain

    cap = ADVERSARIAL_BRANCH_BUDGET if adversarial else max_committees
    score, found = _enumerate_optima(
        inst, marginal, value_of, cap, budgets.committees
    )
    logs = (f"optimum score {Fraction(score, scale)}",) if trace else None
    outcome = RuleOutcome(
        rule="pav",
        committees=tuple(found),
        trace=logs,
        padded_seats=tuple(0 for _ in found),
    )
    if adversarial:
        return _worst_of(inst, outcome, trace)
    return outcome


def _worst_of(inst: Instance, outcome: RuleOutcome, want_trace: bool) -> RuleOutcome:
    scored = [
        (alpha_jr(inst, w).alpha_value, w, p)
        for w, p in zip(outcome.committees, outcome.padded_seats)
    ]
    worst = max(v for v, _, _ in scored)
    value, committee, padded = min(
        (v, w, p) for v, w, p in scored if v == worst
    )
    logs = outcome.trace
    if want_trace:
        logs = (outcome.trace or ()) + (
            f"adversarial: kept {list(committee)} with jr value {value}",
        )
    return RuleOutcome(
        rule=outcome.rule,
        committees=(committee,),
        trace=logs,
        padded_seats=(padded,),
    )


# --- sequential coverage ---------------------------------------------------


def seq_cc(
    inst: Instance,
    *,
    max_committees: int = 5,
    adversarial: bool = False,
    trace: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> RuleOutcome:
    """Greedy coverage: each round adds a candidate covering the most
    voters not covered yet, branching on ties."""

    def expand(br: _Branch) -> list[tuple[int, object, str]]:
        covered: int = br.state  # type: ignore[assignment]
        gains = {}
        for c in range(inst.m):
            if c in br.chosen:
                continue
            gains[c] = (inst.supporter_masks[c] & ~covered).bit_count()
        top = max(gains.values())
        return [
            (c, covered | inst.supporter_masks[c], f"+{c} covers {g} new")
            for c, g in sorted(gains.items())
            if g == top
        ]

    return _run_rounds(
        inst, "seqcc", 0, expand, max_committees, adversarial, trace
    )


# --- sequential Phragmen ---------------------------------------------------


def _phragmen_expand(inst: Instance):
    def expand(br: _Branch) -> list[tuple[int, object, str]]:
        loads: tuple[Fraction, ...] = br.state  # type: ignore[assignment]
        best_t: Optional[Fraction] = None
        ties: list[int] = []
        for c in range(inst.m):
            if c in br.chosen:
                continue
            sup = inst.supporter_masks[c]
            if sup == 0:
                continue
            size = sup.bit_count()
            t = (1 + sum(loads[v] for v in bits_of(sup))) / size
            if best_t is None or t < best_t:
                best_t, ties = t, [c]
            elif t == best_t:
                ties.append(c)
        options = []
        for c in ties:
            new_loads = list(loads)
            for v in bits_of(inst.supporter_masks[c]):
                new_loads[v] = best_t
            options.append((c, tuple(new_loads), f"+{c} load {best_t}"))
        return options

    return expand


def seq_phragmen(
    inst: Instance,
    *,
    max_committees: int = 5,
    adversarial: bool = False,
    trace: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> RuleOutcome:
    """Each round adds the candidate whose balanced supporter load is
    smallest; supporters of the winner move to that load."""
    start = tuple(Fraction(0) for _ in range(inst.n))
    return _run_rounds(
        inst,
        "seqphragmen",
        start,
        _phragmen_expand(inst),
        max_committees,
        adversarial,
        trace,
    )


# --- method of equal shares ------------------------------------------------


def _mes_price(budgets_by_voter: list[Fraction]) -> Optional[Fraction]:
    """Smallest per-voter payment collecting a total of one unit, with
    each voter capped by their remaining budget; None if unaffordable."""
    values = sorted(budgets_by_voter)
    s = len(values)
    prefix = Fraction(0)
    for i in range(s):
        q = (1 - prefix) / (s - i)
        if q <= values[i]:
            return q
        prefix += values[i]
    return None


def mes(
    inst: Instance,
    budget_per_voter: Rational,
    *,
    stop_after: Optional[int] = None,
) -> list[int]:
    """Purchase sequence at a fixed per-voter budget, smallest-index
    tie-breaking; may be shorter or longer than k unless capped."""
    b = Fraction(budget_per_voter)
    if b < 0:
        raise ValueError("budget must be non-negative")
    budgets = [b] * inst.n
    bought: list[int] = []
    while stop_after is None or len(bought) < stop_after:
        step = _mes_step(inst, budgets, bought)
        if step is None:
            break
        options, price = step
        c = options[0]
        bought.append(c)
        for v in bits_of(inst.supporter_masks[c]):
            budgets[v] -= min(budgets[v], price)
    return bought


def _mes_step(
    inst: Instance, budgets: list[Fraction], bought: list[int]
) -> Optional[tuple[list[int], Fraction]]:
    """Tied cheapest affordable candidates and their price, or None."""
    best_q: Optional[Fraction] = None
    ties: list[int] = []
    for c in range(inst.m):
        if c in bought:
            continue
        sup = list(bits_of(inst.supporter_masks[c]))
        if not sup:
            continue
        if sum(budgets[v] for v in sup) < 1:
            continue
        q = _mes_price([budgets[v] for v in sup])
        if q is None:
            continue
        if best_q is None or q < best_q:
            best_q, ties = q, [c]
        elif q == best_q:
            ties.append(c)
    if best_q is None:
        return None
    return ties, best_q


def _mes_phase_expand(inst: Instance, stop_at: int):
    def expand(br: _Branch) -> list[tuple[int, object, str]]:
        if len(br.chosen) >= stop_at:
            return []
        budgets: tuple[Fraction, ...] = br.state  # type: ignore[assignment]
        step = _mes_step(inst, list(budgets), br.chosen)
        if step is None:
            return []
        options, price = step
        out = []
        for c in options:
            nb = list(budgets)
            for v in bits_of(inst.supporter_masks[c]):
                nb[v] -= min(nb[v], price)
            out.append((c, tuple(nb), f"+{c} price {price}"))
        return out

    return expand


def mes_completed(
    inst: Instance,
    *,
    max_committees: int = 5,
    adversarial: bool = False,
    trace: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> RuleOutcome:
    """Purchases at the standard per-voter budget k/n, then fills any
    remaining seats by the balanced-load rounds, with each voter's spent
    amount carried over as an initial load."""
    b0 = Fraction(inst.k, inst.n)
    mes_expand = _mes_phase_expand(inst, inst.k)
    phragmen_expand = _phragmen_expand(inst)

    def expand(br: _Branch) -> list[tuple[int, object, str]]:
        phase, payload = br.state  # type: ignore[misc]
        if phase == "mes":
            options = mes_expand(
                _Branch(chosen=br.chosen, state=payload, log=br.log)
            )
            if options:
                return [
                    (c, ("mes", state), note) for c, state, note in options
                ]
            spent = tuple(b0 - bv for bv in payload)
            phase, payload = "phragmen", spent
        options = phragmen_expand(
            _Branch(chosen=br.chosen, state=payload, log=br.log)
        )
        return [(c, ("phragmen", state), note) for c, state, note in options]

    start = ("mes", tuple(Fraction(b0) for _ in range(inst.n)))
    return _run_rounds(
        inst, "mes", start, expand, max_committees, adversarial, trace
    )


def _simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """The rational with smallest denominator strictly inside (a, b)."""
    if not a < b:
        raise ValueError("empty interval")
    floor_a = a.numerator // a.denominator
    if Fraction(floor_a + 1) < b:
        return Fraction(floor_a + 1)
    fx, fy = a - floor_a, b - floor_a
    if fx == 0:
        q = (1 / fy).numerator // (1 / fy).denominator + 1
        return floor_a + Fraction(1, q)
    return floor_a + 1 / _simplest_between(1 / fy, 1 / fx)


def minimal_mes_budget(inst: Instance) -> Fraction:
    """Smallest per-voter budget whose purchase run reaches k candidates
    (or every supported candidate when fewer exist).

    Brackets the threshold, bisects, then snaps to the simplest rational
    in the final interval and checks the run there; purchase counts are
    taken from the smallest-index run, making the value canonical.
    """
    supported = sum(1 for c in range(inst.m) if inst.supporter_masks[c])
    target = min(inst.k, supported)
    if target == 0:
        return Fraction(0)

    def enough(b: Fraction) -> bool:
        return len(mes(inst, b, stop_after=target)) >= target

    hi = Fraction(inst.k * (inst.k + 1), inst.n)
    for _ in range(64):
        if enough(hi):
            break
        hi *= 2
    else:
        raise AlphaQuotaError("purchase threshold bracket failed to close")
    lo = Fraction(0)
    tolerance = Fraction(1, inst.n**4 * inst.k**4 * 100)
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        if enough(mid):
            hi = mid
        else:
            lo = mid
    snapped = _simplest_between(lo, hi)
    if hi.denominator < snapped.denominator:
        snapped = hi
    if enough(snapped):
        return snapped
    return hi


def alpha_mes(
    inst: Instance,
    *,
    max_committees: int = 5,
    adversarial: bool = False,
    trace: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> RuleOutcome:
    """Runs the purchase rule at the minimal budget that buys k
    candidates, keeping the first k purchases."""
    b_star = minimal_mes_budget(inst)
    supported = sum(1 for c in range(inst.m) if inst.supporter_masks[c])
    stop = min(inst.k, supported)
    start = tuple(Fraction(b_star) for _ in range(inst.n))
    outcome = _run_rounds(
        inst,
        "alphames",
        start,
        _mes_phase_expand(inst, stop),
        max_committees,
        adversarial,
        trace,
    )
    if trace and outcome.trace is not None:
        outcome = RuleOutcome(
            rule=outcome.rule,
            committees=outcome.committees,
            trace=(f"minimal budget {b_star}",) + outcome.trace,
            padded_seats=outcome.padded_seats,
        )
    return outcome


# --- greedy justified candidate rule ---------------------------------------


def _gjcr_branches(
    inst: Instance,
    threshold_of: Callable[[int], Fraction],
    stop_at_k: bool,
    adversarial: bool,
    max_committees: int,
    want_trace: bool,
) -> list[_Branch]:
    """Level-descending greedy selection with tie branching.

    Each addition recomputes, for candidates outside the committee, the
    supporters still approving fewer than `level` members; a candidate
    whose count meets the level's threshold may enter, largest count
    first.  Prices split each addition's unit cost over those voters.
    """
    limit = ADVERSARIAL_BRANCH_BUDGET if adversarial else max_committees
    start = _Branch(
        chosen=[], state=(inst.k, tuple(Fraction(0) for _ in range(inst.n))), log=[]
    )
    frontier = [start]
    done: list[_Branch] = []
    while frontier:
        nxt: list[_Branch] = []
        for br in frontier:
            level, prices = br.state  # type: ignore[misc]
            if stop_at_k and len(br.chosen) == inst.k:
                br.done = True
                done.append(br)
                continue
            wmask = 0
            for c in br.chosen:
                wmask |= 1 << c
            coverage = [
                (ballot & wmask).bit_count() for ballot in inst.ballots
            ]
            selected = None
            while level >= 1:
                counts = {}
                for c in range(inst.m):
                    if c in br.chosen:
                        continue
                    size = sum(
                        1
                        for v in bits_of(inst.supporter_masks[c])
                        if coverage[v] < level
                    )
                    counts[c] = size
                threshold = threshold_of(level)
                qualifying = {
                    c: s for c, s in counts.items() if s >= threshold
                }
                if qualifying:
                    top = max(qualifying.values())
                    selected = sorted(
                        c for c, s in qualifying.items() if s == top
                    )
                    break
                level -= 1
            if selected is None:
                br.done = True
                done.append(br)
                continue
            for c in selected:
                members = [
                    v
                    for v in bits_of(inst.supporter_masks[c])
                    if coverage[v] < level
                ]
                share = Fraction(1, len(members)) if members else Fraction(0)
                new_prices = list(prices)
                for v in members:
                    new_prices[v] += share
                nxt.append(
                    _Branch(
                        chosen=br.chosen + [c],
                        state=(level, tuple(new_prices)),
                        log=br.log
                        + (
                            [f"+{c} level {level} group {len(members)}"]
                            if want_trace
                            else []
                        ),
                    )
                )
        frontier = nxt[:limit]
    return done


def gjcr(
    inst: Instance,
    *,
    max_committees: int = 5,
    adversarial: bool = False,
    trace: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> RuleOutcome:
    """Repeatedly adds the candidate backed by the largest group of
    supporters still short of the current level, from level k down."""

    def threshold(level: int) -> Fraction:
        return Fraction(level * inst.n, inst.k)

    branches = _gjcr_branches(
        inst, threshold, False, adversarial, max_committees, trace
    )
    for br in branches:
        if len(br.chosen) > inst.k:
            raise AlphaQuotaError(
                "greedy selection exceeded the committee size; "
                "threshold accounting is broken"
            )
        br.padded = _pad(inst, br.chosen, br.log, inst.k)
    return _finalize(inst, "gjcr", branches, max_committees, adversarial, trace)


def alpha_gjcr(
    inst: Instance,
    *,
    max_committees: int = 5,
    adversarial: bool = False,
    trace: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> RuleOutcome:
    """Lowers the qualifying scale along the EJR value grid until the
    greedy selection fills k seats, then reruns with tie branching."""
    grid = alpha_grid(inst, Axiom.EJR).values
    chosen_alpha = Fraction(0)
    for alpha in sorted(grid, reverse=True):

        def threshold(level: int, _a: Fraction = alpha) -> Fraction:
            return _a * level * inst.n / inst.k

        lex = _gjcr_branches(inst, threshold, True, False, 1, False)
        if lex and len(lex[0].chosen) >= inst.k:
            chosen_alpha = alpha
            break

    def threshold(level: int) -> Fraction:
        return chosen_alpha * level * inst.n / inst.k

    branches = _gjcr_branches(
        inst, threshold, True, adversarial, max_committees, trace
    )
    for br in branches:
        br.padded = _pad(inst, br.chosen, br.log, inst.k)
        if trace:
            br.log.insert(0, f"qualifying scale {chosen_alpha}")
    return _finalize(
        inst, "alphagjcr", branches, max_committees, adversarial, trace
    )


RULES: dict[str, Callable[..., RuleOutcome]] = {
    "cc": cc,
    "seqcc": seq_cc,
    "pav": pav,
    "seqphragmen": seq_phragmen,
    "mes": mes_completed,
    "alphames": alpha_mes,
    "gjcr": gjcr,
    "alphagjcr": alpha_gjcr,
}
