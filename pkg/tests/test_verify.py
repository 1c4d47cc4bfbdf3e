import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from alphaquota.core import Budgets, BudgetExceededError, ValidationError
from alphaquota.verify import (
    Axiom,
    alpha_ejr,
    alpha_ejr_plus,
    alpha_jr,
    alpha_of,
    s_max_ejr,
    s_max_jr,
    satisfies,
)

from instances import (
    block_residue_family,
    blocks_and_singletons,
    build,
    ejr_jr_gap,
    two_party_bridge,
)


# Brute-force oracles working straight from the definitions, with no
# shared code or shortcuts.

def brute_alpha_jr(inst, w):
    wset = set(w)
    best = 0
    for c in range(inst.m):
        if c in wset:
            continue
        count = sum(
            1
            for v, approvals in enumerate(inst.approval_sets())
            if c in approvals and not (set(approvals) & wset)
        )
        best = max(best, count)
    return Fraction(best * inst.k, inst.n)


def brute_alpha_ejr(inst, w):
    wset = set(w)
    approvals = [set(b) for b in inst.approval_sets()]
    best = Fraction(0)
    for level in range(1, inst.k + 1):
        for t in itertools.combinations(range(inst.m), level):
            tset = set(t)
            size = sum(
                1
                for a in approvals
                if tset <= a and len(a & wset) < level
            )
            best = max(best, Fraction(size * inst.k, level * inst.n))
    return best


def brute_alpha_ejr_plus(inst, w):
    wset = set(w)
    approvals = [set(b) for b in inst.approval_sets()]
    best = Fraction(0)
    for c in range(inst.m):
        if c in wset:
            continue
        for level in range(1, inst.k + 1):
            size = sum(
                1 for a in approvals if c in a and len(a & wset) < level
            )
            best = max(best, Fraction(size * inst.k, level * inst.n))
    return best


def random_instance(rng, max_n=8, max_m=6):
    n = rng.randint(1, max_n)
    m = rng.randint(1, max_m)
    k = rng.randint(1, m)
    approvals = [
        [c for c in range(m) if rng.random() < 0.45] for _ in range(n)
    ]
    return build(n, m, k, approvals)


def random_committee(rng, inst):
    return tuple(sorted(rng.sample(range(inst.m), inst.k)))


def test_s_max_jr_bridge_fixture():
    inst = two_party_bridge()
    assert s_max_jr(inst, (2, 3)) == (4, 0)
    assert s_max_jr(inst, (0, 1)) == (0, None)


def test_s_max_jr_blocks_fixture():
    inst = blocks_and_singletons()
    size, cand = s_max_jr(inst, (0, 1, 2))
    assert size == 3
    assert cand in (3, 5)


def test_alpha_jr_bridge_values():
    inst = two_party_bridge()
    assert alpha_jr(inst, (2, 3)).alpha_value == Fraction(4, 5)
    assert alpha_jr(inst, (0, 1)).alpha_value == 0


def test_alpha_jr_block_residue_family():
    inst = block_residue_family(2)
    assert alpha_jr(inst, (0, 1)).alpha_value == Fraction(2, 3)
    assert alpha_jr(inst, (3, 4)).alpha_value == Fraction(2, 9)


def test_alpha_jr_witness_contents():
    inst = two_party_bridge()
    res = alpha_jr(inst, (2, 3))
    assert res.witness is not None
    assert res.witness.candidates == (0,)
    assert res.witness.voters == (0, 1, 2, 3)
    assert res.witness.level == 1
    assert res.witness.alpha == res.alpha_value


def test_alpha_jr_no_witness_at_zero():
    inst = two_party_bridge()
    res = alpha_jr(inst, (0, 1))
    assert res.witness is None


def test_s_max_ejr_gap_fixture():
    inst = ejr_jr_gap()
    assert s_max_ejr(inst, (0, 2), 2) == (4, (0, 1))
    assert s_max_ejr(inst, (0, 1), 1) == (2, (2,))


def test_alpha_ejr_gap_values():
    inst = ejr_jr_gap()
    res_a = alpha_ejr(inst, (0, 2))
    assert res_a.alpha_value == Fraction(2, 3)
    assert res_a.witness.level == 2
    assert res_a.witness.candidates == (0, 1)
    assert len(res_a.witness.voters) == 4
    res_b = alpha_ejr(inst, (0, 1))
    assert res_b.alpha_value == Fraction(2, 3)
    assert res_b.witness.level == 1


def test_alpha_ejr_zero_when_everyone_fully_served():
    # Each voter approves at least min(|ballot|, k) committee members.
    inst = build(4, 3, 2, [[0], [1], [0, 1], []])
    assert alpha_ejr(inst, (0, 1)).alpha_value == 0
    assert alpha_ejr(inst, (0, 1)).witness is None


def test_alpha_ejr_plus_gap_and_bridge():
    gap = ejr_jr_gap()
    assert alpha_ejr_plus(gap, (0, 2)).alpha_value == Fraction(2, 3)
    bridge = two_party_bridge()
    res = alpha_ejr_plus(bridge, (0, 1))
    assert res.alpha_value == Fraction(1, 5)
    assert res.witness.candidates == (2,)
    assert res.witness.level == 2
    assert res.witness.voters == (4, 5)


def test_alpha_ejr_plus_zero_when_committee_covers_all_ballots():
    inst = build(3, 2, 2, [[0], [1], [0, 1]])
    assert alpha_ejr_plus(inst, (0, 1)).alpha_value == 0


def test_satisfies_strictness_and_zero():
    inst = two_party_bridge()
    assert satisfies(inst, (2, 3), Fraction(1), Axiom.JR)
    assert not satisfies(inst, (2, 3), Fraction(4, 5), Axiom.JR)
    assert satisfies(inst, (2, 3), Fraction(4, 5) + Fraction(1, 1000), Axiom.JR)
    for axiom in Axiom:
        assert not satisfies(inst, (2, 3), Fraction(0), axiom)
        assert not satisfies(inst, (0, 1), Fraction(0), axiom)


def test_satisfies_rejects_negative_alpha():
    inst = two_party_bridge()
    with pytest.raises(ValueError):
        satisfies(inst, (0, 1), Fraction(-1, 2), Axiom.JR)


def test_level_out_of_range_rejected():
    inst = ejr_jr_gap()
    with pytest.raises(ValueError):
        s_max_ejr(inst, (0, 1), 0)
    with pytest.raises(ValueError):
        s_max_ejr(inst, (0, 1), 3)


def test_committee_validation_applies():
    inst = ejr_jr_gap()
    with pytest.raises(ValidationError):
        alpha_jr(inst, (0,))


def test_subset_budget_error():
    inst = build(2, 6, 3, [[0, 1, 2], [3, 4, 5]])
    with pytest.raises(BudgetExceededError):
        s_max_ejr(inst, (0, 1, 2), 3, budgets=Budgets(subset_nodes=5))


def test_oracle_agreement_random_instances():
    rng = random.Random(20240817)
    for _ in range(500):
        inst = random_instance(rng)
        w = random_committee(rng, inst)
        assert alpha_jr(inst, w).alpha_value == brute_alpha_jr(inst, w)
        assert alpha_ejr(inst, w).alpha_value == brute_alpha_ejr(inst, w)
        assert alpha_ejr_plus(inst, w).alpha_value == brute_alpha_ejr_plus(inst, w)


def test_ordering_chain_random_instances():
    rng = random.Random(99173)
    for _ in range(500):
        inst = random_instance(rng, max_n=10, max_m=7)
        w = random_committee(rng, inst)
        a_jr = alpha_jr(inst, w).alpha_value
        a_ejr = alpha_ejr(inst, w).alpha_value
        a_plus = alpha_ejr_plus(inst, w).alpha_value
        assert a_jr <= a_ejr <= a_plus


def test_s_max_ejr_level_one_matches_s_max_jr():
    rng = random.Random(5511)
    for _ in range(200):
        inst = random_instance(rng)
        w = random_committee(rng, inst)
        assert s_max_ejr(inst, w, 1)[0] == s_max_jr(inst, w)[0]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_witness_invariants(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    w = random_committee(rng, inst)
    for axiom in Axiom:
        res = alpha_of(inst, w, axiom)
        assert res.alpha_value >= 0
        assert (res.witness is not None) == (res.alpha_value > 0)
        if res.witness is None:
            continue
        wit = res.witness
        assert wit.alpha == res.alpha_value
        approvals = inst.approval_sets()
        wset = set(w)
        for v in wit.voters:
            assert set(wit.candidates) <= set(approvals[v])
            assert len(set(approvals[v]) & wset) < wit.level
        expected = Fraction(len(wit.voters) * inst.k, wit.level * inst.n)
        assert wit.alpha == expected


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.fractions(min_value=0, max_value=2),
    st.fractions(min_value=Fraction(1, 100), max_value=1),
)
def test_satisfies_monotone_in_alpha(seed, alpha, bump):
    rng = random.Random(seed)
    inst = random_instance(rng)
    w = random_committee(rng, inst)
    for axiom in Axiom:
        if satisfies(inst, w, alpha, axiom):
            assert satisfies(inst, w, alpha + bump, axiom)


def test_attaining_level_scaling_is_integral():
    rng = random.Random(31337)
    for _ in range(200):
        inst = random_instance(rng)
        w = random_committee(rng, inst)
        res = alpha_ejr(inst, w)
        if res.witness is None:
            continue
        scaled = res.alpha_value * res.witness.level * inst.n / inst.k
        assert scaled.denominator == 1
