import io
import itertools
import math
import random
from fractions import Fraction

import pytest

from alphaquota.core import Budgets, BudgetExceededError
from alphaquota.optimize import (
    alpha_grid,
    exists_committee_jr,
    export_lp,
    optimal_alpha_ejr,
    optimal_alpha_ejr_plus,
    optimal_alpha_jr,
    optimal_alpha_jr_brute,
)
from alphaquota.verify import Axiom, alpha_ejr, alpha_ejr_plus, alpha_jr

from instances import (
    block_residue_family,
    blocks_and_singletons,
    build,
    ejr_jr_gap,
    two_party_bridge,
)

from test_verify import (
    brute_alpha_ejr,
    brute_alpha_ejr_plus,
    random_committee,
    random_instance,
)


def test_jr_grid_bridge():
    inst = two_party_bridge()
    grid = alpha_grid(inst, Axiom.JR)
    assert grid.values == tuple(Fraction(j, 5) for j in range(5))


def test_jr_grid_degenerate_n_equals_k():
    inst = build(2, 2, 2, [[0], [1]])
    assert alpha_grid(inst, Axiom.JR).values == (Fraction(0),)


def test_ejr_grid_contains_both_level_scales():
    inst = ejr_jr_gap()
    values = set(alpha_grid(inst, Axiom.EJR).values)
    assert Fraction(1, 3) in values
    assert Fraction(1, 6) in values
    assert values == {Fraction(j, 6) for j in range(0, 6) if j / 6 < 1} | {
        Fraction(0)
    }


def test_grid_sizes_and_sortedness():
    rng = random.Random(404)
    for _ in range(50):
        inst = random_instance(rng, max_n=12, max_m=8)
        jr = alpha_grid(inst, Axiom.JR).values
        ejr = alpha_grid(inst, Axiom.EJR).values
        assert list(jr) == sorted(set(jr))
        assert list(ejr) == sorted(set(ejr))
        assert len(jr) <= inst.n + 1
        assert len(ejr) <= inst.n * inst.k + 1
        assert set(jr) <= set(ejr)


def test_exists_committee_blocks_fixture():
    inst = blocks_and_singletons()
    w = exists_committee_jr(inst, Fraction(1, 3))
    assert w is not None
    assert alpha_jr(inst, w).alpha_value <= Fraction(1, 3)
    assert exists_committee_jr(inst, Fraction(1, 4)) is None


def test_exists_committee_rejects_nonpositive_alpha():
    inst = ejr_jr_gap()
    with pytest.raises(ValueError):
        exists_committee_jr(inst, Fraction(0))


def test_exists_committee_above_droop_always_succeeds():
    rng = random.Random(7712)
    for _ in range(100):
        inst = random_instance(rng)
        alpha = Fraction(inst.k, inst.k + 1) + Fraction(1, 100)
        assert exists_committee_jr(inst, alpha) is not None


def _bound_feasible_brute(inst, bound):
    approvals = [set(b) for b in inst.approval_sets()]
    for w in itertools.combinations(range(inst.m), inst.k):
        wset = set(w)
        uncovered = [a for a in approvals if a and not (a & wset)]
        ok = all(
            sum(1 for a in uncovered if c in a) <= bound
            for c in range(inst.m)
        )
        if ok:
            return w
    return None


def test_search_matches_enumeration_on_grid():
    rng = random.Random(1133)
    checked = 0
    while checked < 60:
        inst = random_instance(rng, max_n=8, max_m=6)
        for alpha in alpha_grid(inst, Axiom.JR).values:
            if alpha == 0:
                continue
            bound = math.ceil(alpha * inst.n / inst.k) - 1
            ours = exists_committee_jr(inst, alpha)
            brute = _bound_feasible_brute(inst, bound)
            assert (ours is None) == (brute is None)
            if ours is not None:
                assert ours == brute
            checked += 1


def test_feasibility_monotone_in_alpha():
    rng = random.Random(9021)
    for _ in range(40):
        inst = random_instance(rng)
        grid = alpha_grid(inst, Axiom.JR).values
        feasible = [
            exists_committee_jr(inst, a) is not None for a in grid if a > 0
        ]
        assert feasible == sorted(feasible)


def test_optimal_jr_bridge_is_zero():
    res = optimal_alpha_jr(two_party_bridge())
    assert res.alpha_star == 0
    assert res.committee == (0, 1)
    assert res.method == "ilp_bnb"


def test_optimal_jr_blocks_is_quarter():
    res = optimal_alpha_jr(blocks_and_singletons())
    assert res.alpha_star == Fraction(1, 4)
    assert alpha_jr(blocks_and_singletons(), res.committee).alpha_value == res.alpha_star


def test_optimal_jr_block_residue_family():
    res = optimal_alpha_jr(block_residue_family(2))
    assert res.alpha_star == Fraction(2, 9)


def test_optimal_jr_matches_brute_force():
    rng = random.Random(60601)
    for _ in range(300):
        inst = random_instance(rng)
        fast = optimal_alpha_jr(inst)
        brute = optimal_alpha_jr_brute(inst)
        assert fast.alpha_star == brute.alpha_star
        assert alpha_jr(inst, fast.committee).alpha_value == fast.alpha_star


def test_optimal_jr_grid_membership():
    rng = random.Random(2214)
    for _ in range(100):
        inst = random_instance(rng)
        res = optimal_alpha_jr(inst)
        assert res.alpha_star in alpha_grid(inst, Axiom.JR).values


def test_optimal_ejr_gap_is_droop():
    inst = ejr_jr_gap()
    res = optimal_alpha_ejr(inst)
    assert res.alpha_star == Fraction(2, 3)
    for w in itertools.combinations(range(inst.m), inst.k):
        assert alpha_ejr(inst, w).alpha_value == Fraction(2, 3)


def test_gap_between_jr_and_ejr_optima():
    inst = ejr_jr_gap()
    assert optimal_alpha_jr(inst).alpha_star == 0
    assert optimal_alpha_ejr(inst).alpha_star == Fraction(2, 3)


def test_optimal_ejr_zero_case():
    inst = build(4, 4, 2, [[0], [0], [1], [1]])
    res = optimal_alpha_ejr(inst)
    assert res.alpha_star == 0
    assert res.committee == (0, 1)


def test_optimal_ejr_matches_unpruned_enumeration():
    rng = random.Random(818283)
    for _ in range(300):
        inst = random_instance(rng)
        res = optimal_alpha_ejr(inst)
        values = {
            w: brute_alpha_ejr(inst, w)
            for w in itertools.combinations(range(inst.m), inst.k)
        }
        expected = min(values.values())
        assert res.alpha_star == expected
        assert values[res.committee] == expected
        first = min(w for w, v in values.items() if v == expected)
        assert res.committee == first


def test_optimal_ejr_grid_membership():
    rng = random.Random(6401)
    for _ in range(100):
        inst = random_instance(rng)
        res = optimal_alpha_ejr(inst)
        assert res.alpha_star in alpha_grid(inst, Axiom.EJR).values


def test_optimal_ejr_plus_matches_enumeration():
    rng = random.Random(515253)
    for _ in range(200):
        inst = random_instance(rng)
        res = optimal_alpha_ejr_plus(inst)
        expected = min(
            brute_alpha_ejr_plus(inst, w)
            for w in itertools.combinations(range(inst.m), inst.k)
        )
        assert res.alpha_star == expected
        assert alpha_ejr_plus(inst, res.committee).alpha_value == expected


def test_droop_ceiling_on_random_instances():
    rng = random.Random(424242)
    droop_ok = 0
    for _ in range(500):
        inst = random_instance(rng)
        bound = Fraction(inst.k, inst.k + 1)
        assert optimal_alpha_ejr_plus(inst).alpha_star <= bound
        assert optimal_alpha_ejr(inst).alpha_star <= bound
        droop_ok += 1
    assert droop_ok == 500


def test_enumeration_budget_errors():
    inst = build(3, 10, 5, [[0], [1], [2]])
    with pytest.raises(BudgetExceededError):
        optimal_alpha_ejr(inst, budgets=Budgets(committees=10))
    with pytest.raises(BudgetExceededError):
        optimal_alpha_ejr_plus(inst, budgets=Budgets(committees=10))
    with pytest.raises(BudgetExceededError):
        optimal_alpha_jr(inst, budgets=Budgets(committees=2))


def test_export_lp_shape_bridge():
    inst = two_party_bridge()
    buf = io.StringIO()
    export_lp(inst, Fraction(1, 5), buf)
    text = buf.getvalue()
    lines = text.splitlines()
    assert lines[0] == "Minimize"
    assert "Subject To" in lines
    assert lines[-1] == "End"
    assert sum(1 for l in lines if l.startswith(" cover_")) == 10
    assert sum(1 for l in lines if l.startswith(" complaints_")) == 4
    assert sum(1 for l in lines if l.startswith(" seats:")) == 1
    binary_line = lines[lines.index("Binary") + 1]
    assert binary_line.split() == [f"x_{c}" for c in range(4)] + [
        f"y_{v}" for v in range(10)
    ]


def test_export_lp_bound_arithmetic():
    inst = blocks_and_singletons()
    buf = io.StringIO()
    export_lp(inst, Fraction(1, 3), buf)
    # bound = ceil((1/3)*12/3) - 1 = 1; candidate 0 has 4 supporters.
    assert " complaints_0: y_0 + y_1 + y_2 + y_3 >= 3" in buf.getvalue()


def test_export_lp_zero_slack_forces_full_coverage():
    inst = blocks_and_singletons()
    buf = io.StringIO()
    export_lp(inst, Fraction(1, 4), buf)
    # bound = 0: each complaint row demands every supporter be covered.
    assert " complaints_3: y_4 + y_5 + y_6 >= 3" in buf.getvalue()


def test_export_lp_rejects_nonpositive_alpha():
    buf = io.StringIO()
    with pytest.raises(ValueError):
        export_lp(two_party_bridge(), Fraction(0), buf)
