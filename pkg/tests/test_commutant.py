import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gcompact import oracles
from gcompact.commutant import (
    EquivRelation,
    commutant_profile,
    commutator_set,
    criterion_P_squared,
    intersect_thick_powers,
    invariant_core,
    normality_check,
    orbit_partition,
    power_set,
    product_set,
    relation_thickness,
    subgroups_between,
    thickness_brute,
    thickness_index,
)
from gcompact.constructions import quadratic_structure
from gcompact.errors import CarrierMismatch, MemberNotThick, NotSubgroup, NotSymmetric, RelationNotOrbit
from gcompact.fstruct import (
    FiniteStructure,
    RelationSymbol,
    Signature,
    automorphisms,
    group_as_structure,
    orbit_equivalence,
)
from gcompact.grp import FIXTURE_NAMES, cyclic, derived_subgroup, fixture, symmetric


def s3_parts():
    G = symmetric(3)
    threes = [x for x in range(6) if G.element_order(x) == 3]
    twos = [x for x in range(6) if G.element_order(x) == 2]
    return G, threes, twos


# -- E-commutators -------------------------------------------------------------


def test_commutator_set_examples():
    G, threes, _ = s3_parts()
    assert commutator_set(G, EquivRelation.equality(6)) == (G.identity,)
    assert set(commutator_set(G, EquivRelation.conjugacy(G))) == {G.identity, *threes}
    assert commutator_set(G, EquivRelation.full(6)) == tuple(range(6))


def test_carrier_mismatch():
    with pytest.raises(CarrierMismatch):
        commutator_set(symmetric(3), EquivRelation.equality(5))


def test_profile_examples():
    G = symmetric(3)
    p = commutant_profile(G, EquivRelation.equality(6))
    assert p.width == 1 and p.commutant == (G.identity,) and p.index == 6
    p = commutant_profile(G, EquivRelation.conjugacy(G))
    assert p.width == 1 and p.commutant == derived_subgroup(G) and p.index == 2


def test_quadratic_form_b0_outside():
    qs = quadratic_structure(1)
    # orbits of the form structure, not of the bare group
    A = automorphisms(qs.structure)
    E = EquivRelation.from_orbits(orbit_equivalence(qs.structure, A.generators, 1))
    assert qs.b0 not in commutant_profile(qs.group, E).X_E


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_conjugacy_matches_oracle(name):
    G = fixture(name)
    p = commutant_profile(G, EquivRelation.conjugacy(G))
    X = oracles.commutator_set(G, oracles.conjugacy_blocks(G))
    assert set(p.X_E) == X
    assert set(p.commutant) == oracles.derived(G) == set(derived_subgroup(G))
    assert [set(q) for q in p.powers] == oracles.power_chain(G, X)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FIXTURE_NAMES), st.data())
def test_profile_properties(name, data):
    G = fixture(name)
    k = data.draw(st.integers(1, G.order))
    blocks = data.draw(st.lists(st.integers(0, k - 1), min_size=G.order, max_size=G.order))
    E = EquivRelation.from_blocks(blocks)
    p = commutant_profile(G, E)
    assert G.identity in p.X_E
    for a, b in zip(p.powers, p.powers[1:]):
        assert set(a) < set(b)
    assert p.width <= G.order
    assert set(p.commutant) == oracles.closure(G, p.X_E)
    assert p.index <= E.block_count


def test_product_sets_against_loops():
    G = fixture("S4")
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = rng.choice(24, size=5, replace=False).tolist()
        B = rng.choice(24, size=4, replace=False).tolist()
        assert set(product_set(G, A, B)) == {G.op(a, b) for a in A for b in B}
    P = [0, 1, 2]
    assert set(power_set(G, P, 3)) == {G.op(G.op(a, b), c) for a in P for b in P for c in P}


# -- normality -------------------------------------------------------------------


def test_normality_examples():
    G = symmetric(3)
    A = automorphisms(group_as_structure(G))
    E = orbit_partition(G, A.generators)
    assert normality_check(G, E, A.generators).normal
    assert normality_check(G, EquivRelation.conjugacy(G), certify=False).normal
    assert normality_check(G, EquivRelation.equality(6), [], certify=True).normal


def test_non_orbit_partition():
    G, _, twos = s3_parts()
    t = twos[0]
    # one block {e, t}: X_E = {e, t} generates a non-normal subgroup of order 2
    blocks = [0 if x in (G.identity, t) else x + 1 for x in range(6)]
    E = EquivRelation.from_blocks(blocks)
    A = automorphisms(group_as_structure(G))
    with pytest.raises(RelationNotOrbit):
        normality_check(G, E, A.generators)
    res = normality_check(G, E, certify=False)
    assert not res.normal and set(res.commutant) == {G.identity, t}
    g, x = res.witness
    assert G.conj(x, g) not in res.commutant


# -- thickness -------------------------------------------------------------------


def test_thickness_examples():
    G, threes, _ = s3_parts()
    assert thickness_index(G, range(6)).thickness == 2
    assert thickness_index(G, [G.identity]).thickness == 7
    t = thickness_index(G, [G.identity, *threes])
    assert t.thickness == 3 == thickness_brute(G, [G.identity, *threes])
    # the free sequence has no quotient in P
    P = {G.identity, *threes}
    seq = t.free_sequence
    assert len(seq) == 2
    assert all(G.op(G.inverse(a), b) not in P for i, a in enumerate(seq) for b in seq[i + 1:])


def test_thickness_rejects_asymmetric_and_handles_no_identity():
    G = cyclic(5)
    with pytest.raises(NotSymmetric):
        thickness_index(G, [0, 1])
    assert thickness_index(G, [1, 4]).thickness is None
    assert thickness_brute(G, [1, 4], 6) is None


@pytest.mark.parametrize("name", ["C2", "C3", "C4", "C5", "C6", "S3", "D4", "Q8"])
def test_thickness_against_sequence_search(name):
    G = fixture(name)
    for P in oracles.symmetric_subsets_with_identity(G):
        assert thickness_index(G, P).thickness == thickness_brute(G, P, G.order + 1)


def one_sort(n, tuples):
    sig = Signature(("V",), (RelationSymbol("R", ("V", "V")),), (), ())
    return FiniteStructure(sig, {"V": n}, {"R": tuples})


def test_relation_thickness_examples():
    full = [(a, b) for a in range(4) for b in range(4)]
    assert relation_thickness(one_sort(4, full), "R") == 2
    assert relation_thickness(one_sort(4, [(a, a) for a in range(4)]), "R") == 5
    assert relation_thickness(one_sort(3, [(0, 0), (1, 1)]), "R") is None
    with pytest.raises(NotSymmetric):
        relation_thickness(one_sort(3, [(0, 1), (0, 0), (1, 1), (2, 2)]), "R")


def test_intersect_thick_powers_examples():
    G, threes, twos = s3_parts()
    e = G.identity
    assert intersect_thick_powers(G, [range(6)], 1) == tuple(range(6))
    P = [e, *threes]
    assert intersect_thick_powers(G, [P, range(6)], 1) == tuple(sorted(P))
    Q = [e, *twos]
    want = set(power_set(G, P, 2)) & set(power_set(G, Q, 2))
    brute = {G.op(a, b) for a in P for b in P} & {G.op(a, b) for a in Q for b in Q}
    assert set(intersect_thick_powers(G, [P, Q], 2)) == want == brute
    with pytest.raises(MemberNotThick) as err:
        intersect_thick_powers(G, [P, threes], 1)
    assert err.value.index == 1


# -- invariant core and the P^2 criterion ---------------------------------------------


def brute_core(G, index_bound):
    A = automorphisms(group_as_structure(G))
    perms = [g.component("G") for g in A.elements()]
    subs = {frozenset(oracles.closure(G, [a, b])) for a in range(G.order) for b in range(G.order)}
    subs |= {frozenset(oracles.closure(G, [a, b, c])) for a in range(G.order) for b in range(G.order)
             for c in range(min(G.order, 8))}
    core = set(range(G.order))
    for H in subs:
        if G.order // len(H) <= index_bound and all({p(h) for h in H} == H for p in perms):
            core &= H
    return core


def test_invariant_core_examples():
    G, threes, _ = s3_parts()
    A = automorphisms(group_as_structure(G))
    assert invariant_core(G, A, 1) == tuple(range(6))
    assert set(invariant_core(G, A, 2)) == {G.identity, *threes}
    C = cyclic(4)
    assert invariant_core(C, automorphisms(group_as_structure(C)), 2) == (0, 2)


@pytest.mark.parametrize("name", ["S3", "D4", "Q8", "A4", "C6", "S4"])
@pytest.mark.parametrize("bound", [2, 3, 4])
def test_invariant_core_against_enumeration(name, bound):
    G = fixture(name)
    A = automorphisms(group_as_structure(G))
    assert set(invariant_core(G, A, bound)) == brute_core(G, bound)


def test_invariant_core_descent_agrees_with_enumeration():
    G = fixture("S4")
    A = automorphisms(group_as_structure(G))
    for bound in (2, 3):
        assert invariant_core(G, A, bound, limit=8) == invariant_core(G, A, bound)


def test_subgroups_between_counts():
    assert len(subgroups_between(symmetric(3), [0])) == 6
    assert len(subgroups_between(fixture("S4"), [0])) == 30


def test_criterion_examples():
    G, threes, _ = s3_parts()
    e = G.identity
    D = derived_subgroup(G)
    assert criterion_P_squared(G, range(6), D) == (True, None)
    ok, w = criterion_P_squared(G, [e], range(6))
    assert not ok and w != e
    assert criterion_P_squared(G, [e, *threes], D) == (True, None)
    with pytest.raises(NotSubgroup):
        criterion_P_squared(G, [e], [e, threes[0]])
