import itertools

import pytest

from gcompact.affine import (
    affine_from_group,
    as_map,
    build_affine,
    check_composition_laws,
    compose,
    decompose,
    lift_f,
    lift_g,
    stabilizer_form,
    verify_semidirect,
)
from gcompact.errors import (
    GroupMismatch,
    IndexOutOfRange,
    NotAnAutomorphism,
    NotRegular,
    NotSubstructure,
    OrbitMismatch,
)
from gcompact.fstruct import (
    MultiSortPermutation,
    automorphisms,
    automorphisms_brute,
    check_automorphism,
    group_as_structure,
)
from gcompact.grp import cyclic, fixture, symmetric
from gcompact.grp.finite import group_from_cayley


def test_build_affine_shape():
    G = symmetric(3)
    N = affine_from_group(G)
    assert N.structure.sizes["X"] == 6
    assert N.point(G.identity) == 0
    for g in range(6):
        for h in range(6):
            assert N.action[g, N.point(h)] == N.point(G.op(g, h))
    assert len(N.structure.relations["act"]) == 36


def test_point_sort_renamed_on_clash():
    from gcompact.fstruct import FiniteStructure, RelationSymbol, Signature
    G = cyclic(2)
    M = group_as_structure(G)
    sig = Signature(M.signature.sorts + ("X",), M.signature.relations,
                    M.signature.functions, M.signature.constants)
    M2 = FiniteStructure(sig, {**M.sizes, "X": 1}, M.relations, M.functions, M.constants)
    assert build_affine(M2).point_sort == "X'"


def test_custom_action_and_not_regular():
    G = cyclic(3)
    M = group_as_structure(G)
    act = [[(x + g) % 3 for x in range(3)] for g in range(3)]
    N = build_affine(M, G, action=act)
    assert N.point_of.tolist() == [0, 1, 2]
    trivial = [[0, 1, 2]] * 3
    with pytest.raises(NotRegular):
        build_affine(M, G, action=trivial)
    with pytest.raises(NotRegular):
        build_affine(M, G, action=[[0, 1], [1, 0]])


def test_group_mismatch():
    M = group_as_structure(cyclic(3))
    with pytest.raises(GroupMismatch):
        build_affine(M, cyclic(2))
    with pytest.raises(GroupMismatch):
        build_affine(M, mul="nothing")


def test_lifts():
    G = symmetric(3)
    N = affine_from_group(G)
    A = automorphisms(N.base)
    f = A.generators[0]
    F = as_map(N, lift_f(N, f))
    check_automorphism(N.structure, F)
    # f̄ maps h·x0 to f(h)·x0
    for h in range(6):
        assert F(N.point_sort, N.point(h)) == N.point(f("G", h))
    for g in range(6):
        gb = as_map(N, lift_g(N, g))
        check_automorphism(N.structure, gb)
        for h in range(6):
            assert gb(N.point_sort, N.point(h)) == N.point(G.op(h, G.inverse(g)))
        assert gb.component("G").is_identity()
    with pytest.raises(IndexOutOfRange):
        lift_g(N, 6)
    bad = MultiSortPermutation.from_global(N.base, [1, 0, 2, 3, 4, 5])
    with pytest.raises(NotAnAutomorphism):
        lift_f(N, bad)


def test_lift_g_is_a_homomorphism():
    G = symmetric(3)
    N = affine_from_group(G)
    for g1, g2 in itertools.product(range(6), repeat=2):
        lhs = as_map(N, lift_g(N, g1)) * as_map(N, lift_g(N, g2))
        assert lhs == as_map(N, lift_g(N, G.op(g1, g2)))


@pytest.mark.parametrize("name", ["C3", "S3", "D4"])
def test_composition_laws(name):
    N = affine_from_group(fixture(name))
    laws = check_composition_laws(N)
    assert all(r.passed and r.checked for r in laws.values())


def test_decompose_round_trip():
    N = affine_from_group(symmetric(3))
    autN = automorphisms(N.structure)
    forms = set()
    for F in autN.elements():
        a = decompose(N, F)
        assert as_map(N, a) == F
        forms.add(a)
    assert len(forms) == autN.order == 36
    els = autN.elements()
    for F1, F2 in zip(els[:8], els[3:11]):
        assert as_map(N, compose(N, decompose(N, F1), decompose(N, F2))) == F1 * F2


@pytest.mark.parametrize("name,order", [("C3", 6), ("S3", 36), ("C2", 2), ("C4", 8)])
def test_verify_semidirect(name, order):
    rep = verify_semidirect(affine_from_group(fixture(name)))
    assert rep.passed and rep.aut_N_order == order
    assert rep.aut_N_order == rep.group_order * rep.aut_M_order


def test_trivial_group():
    G = group_from_cayley([[0]])
    rep = verify_semidirect(affine_from_group(G))
    assert rep.passed and rep.aut_N_order == 1


def test_brute_force_automorphisms_of_N():
    N = affine_from_group(cyclic(3))
    assert set(automorphisms_brute(N.structure, 12)) == set(automorphisms(N.structure).elements())


def test_stabilizer_form():
    G = symmetric(3)
    N = affine_from_group(G)
    # trivial substructure: everything fixing x0 versus conjugated lifts
    rep = stabilizer_form(N, {"G": [G.identity]}, 0)
    assert rep.equal and rep.stabilizer_order == rep.conjugated_lifts == 6
    threes = [x for x in range(6) if G.element_order(x) == 3] + [G.identity]
    h0 = next(x for x in range(6) if G.element_order(x) == 2)
    rep = stabilizer_form(N, {"G": threes}, h0)
    assert rep.equal and len(rep.fixed_X) == 3
    rep = stabilizer_form(N, {"G": range(6)}, 0)
    assert rep.equal and rep.stabilizer_order == 1
    with pytest.raises(NotSubstructure):
        stabilizer_form(N, {"G": [h0, threes[0]]}, 0)
    with pytest.raises(OrbitMismatch):
        stabilizer_form(N, {"G": threes}, 0, sub_X=[0, 1])
    with pytest.raises(IndexOutOfRange):
        stabilizer_form(N, {"G": [G.identity]}, 9)
