import itertools

import pytest

from gcompact.commutant import commutator_set
from gcompact.constructions import (
    aut_orbit_relation,
    b0_exclusion_check,
    build_product,
    complete_group_check,
    complete_group_report,
    extend_factor_automorphism,
    quadratic_structure,
    star_check,
)
from gcompact.errors import InputError, SizeBoundExceeded
from gcompact.fstruct import automorphisms, is_automorphism
from gcompact.grp import cyclic, fixture, symmetric


def test_single_factor_product():
    G = symmetric(3)
    P = build_product([G])
    assert P.product.order == 6
    assert all(P.coordinates(u) == (u,) for u in range(6))
    rep = star_check(P, 0)
    assert rep.subset_holds and rep.equality_holds


def test_c2_c2_coordinates():
    C = cyclic(2)
    P = build_product([C, C])
    assert P.strides == (2, 1)
    for u in range(4):
        assert P.element(P.coordinates(u)) == u
    for u, v in itertools.product(range(4), repeat=2):
        w = P.product.op(u, v)
        assert P.coordinates(w) == tuple((a + b) % 2 for a, b in zip(P.coordinates(u), P.coordinates(v)))


def test_projections_are_homomorphisms():
    P = build_product([symmetric(3), cyclic(3)])
    for k, (G, _) in enumerate(P.factors):
        p = P.projections[k]
        for u, v in itertools.product(range(P.product.order), repeat=2):
            assert p[P.product.op(u, v)] == G.op(p[u], p[v])


def test_factor_automorphisms_extend():
    P = build_product([symmetric(3), symmetric(3)])
    for k, (_, A) in enumerate(P.factors):
        for f in A.generators:
            assert is_automorphism(P.expanded, extend_factor_automorphism(P, k, f.perms[0]))


def test_star_on_s3_squared():
    P = build_product([symmetric(3), symmetric(3)])
    for k in range(2):
        rep = star_check(P, k)
        assert rep.subset_holds and rep.equality_holds and rep.extensions_witnessed
        assert rep.factor_aut_order == 6


def test_star_brute_projection():
    G, H = cyclic(3), symmetric(3)
    P = build_product([G, H])
    rep = star_check(P, 1)
    X = commutator_set(H, aut_orbit_relation(H))
    assert rep.rhs == X
    assert set(rep.lhs) <= set(X)


def test_product_bounds():
    with pytest.raises(SizeBoundExceeded):
        build_product([])
    with pytest.raises(SizeBoundExceeded):
        build_product([fixture("S4")] * 3)
    with pytest.raises(InputError):
        star_check(build_product([cyclic(2)]), 3)


@pytest.mark.parametrize("name,complete", [("S3", True), ("S4", True), ("C3", False), ("C2", True),
                                           ("D4", False), ("Q8", False), ("A4", False)])
def test_complete_groups(name, complete):
    assert complete_group_check(fixture(name)) is complete


def test_complete_report_values():
    rep = complete_group_report(fixture("D4"))
    assert rep == {"autOrder": 8, "innOrder": 4, "centerOrder": 2, "complete": False}


@pytest.mark.parametrize("k", [1, 2])
def test_quadratic_form_values(k):
    qs = quadratic_structure(k)
    assert qs.size == 2 ** (2 * k + 1)
    for v in range(qs.size):
        bits = [(v >> i) & 1 for i in range(2 * k + 1)]
        want = (bits[0] + sum(bits[2 * j - 1] * bits[2 * j] for j in range(1, k + 1))) % 2
        assert qs.q(v) == want
    assert qs.radical == (0, qs.b0)
    for a, b, c in itertools.product(range(qs.size), range(qs.size), [1, 2, 3, 6]):
        assert qs.bilinear(a ^ b, c) == qs.bilinear(a, c) ^ qs.bilinear(b, c)


def test_quadratic_form_radical_brute():
    qs = quadratic_structure(1)
    rad = [a for a in range(qs.size) if all(qs.bilinear(a, b) == 0 for b in range(qs.size))]
    assert tuple(rad) == qs.radical


def test_quadratic_form_automorphisms_fix_b0():
    qs = quadratic_structure(1)
    A = automorphisms(qs.structure)
    assert all(F("V", qs.b0) == qs.b0 for F in A.elements())


@pytest.mark.parametrize("k", [1, 2])
def test_b0_exclusion(k):
    rep = b0_exclusion_check(k)
    assert rep["radicalIsZeroB0"] and rep["zeroInX"] and not rep["b0InX"]


def test_quadratic_form_bounds():
    with pytest.raises(InputError):
        quadratic_structure(0)
    with pytest.raises(SizeBoundExceeded):
        quadratic_structure(7)
