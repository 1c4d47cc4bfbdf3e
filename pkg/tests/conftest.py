import pytest

from instances import (
    block_residue_family,
    block_residue_tiefree,
    blocks_and_singletons,
    ci_chain,
    ejr_jr_gap,
    two_parties,
    two_party_bridge,
    vi_intervals,
)


@pytest.fixture
def fig_bridge():
    return two_party_bridge()


@pytest.fixture
def fig_blocks():
    return blocks_and_singletons()


@pytest.fixture
def gap_instance():
    return ejr_jr_gap()


@pytest.fixture
def family_k2():
    return block_residue_family(2)


@pytest.fixture
def tiefree_k5():
    return block_residue_tiefree(5)


@pytest.fixture
def vi_fixture():
    return vi_intervals()


@pytest.fixture
def ci_fixture():
    return ci_chain()


@pytest.fixture
def party_fixture():
    return two_parties()
