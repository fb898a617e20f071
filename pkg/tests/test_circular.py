import json
from fractions import Fraction
from itertools import combinations

import pytest

from gcompact.circular import (
    Arc,
    CVStructure,
    apply_linear,
    arc_members,
    check_class_C,
    cut_split,
    direct_sum,
    embed_circle,
    enum_terms,
    f2_rank,
    f_orbits,
    free_algebra,
    load_cvstructure,
    nested_chain,
    orbit_of,
    term_count,
)
from gcompact.circular.terms import FSum, Var
from gcompact.errors import (
    AngleCollision,
    DegenerateArc,
    DepthExhausted,
    InputError,
    OrbitIncomplete,
    ParseError,
    PeriodViolation,
    SizeBoundExceeded,
)


def brute_terms(n_vars, depth, m):
    """Terms as strings, built level by level without the library's classes."""
    base = {f"f^{p}(x{v})" for v in range(n_vars) for p in range(m)}
    level = set(base)
    for _ in range(depth):
        items = sorted(level)
        sums = set()
        for k in range(2, len(items) + 1):
            for S in combinations(items, k):
                for p in range(1, m):
                    sums.add(f"f^{p}[{','.join(S)}]")
        level = base | sums
    return level


# -- terms -------------------------------------------------------------------


def test_term_counts():
    assert len(enum_terms(1, 0)) == 3
    assert len(enum_terms(1, 1)) == 11
    assert len(enum_terms(2, 0)) == 6
    assert term_count(1, 2) == 4075
    assert len(enum_terms(2, 1)) == term_count(2, 1) == 6 + 2 * (2**6 - 7)


@pytest.mark.parametrize("n,d,m", [(1, 0, 3), (1, 1, 3), (2, 1, 3), (1, 1, 4), (1, 1, 5), (1, 2, 3)])
def test_enumeration_against_brute(n, d, m):
    terms = enum_terms(n, d, m)
    assert len(terms) == len(set(terms)) == term_count(n, d, m) == len(brute_terms(n, d, m))


def test_term_shapes():
    with pytest.raises(InputError):
        FSum(0, frozenset({Var(0, 0), Var(0, 1)}))
    with pytest.raises(InputError):
        FSum(1, frozenset({Var(0, 0)}))
    with pytest.raises(InputError):
        enum_terms(1, 1, 2)
    with pytest.raises(SizeBoundExceeded):
        enum_terms(1, 3)
    t = FSum(2, frozenset({Var(0, 0), Var(0, 1)}))
    assert str(t) == "f^2(x0 + f(x0))" and t.depth == 1


# -- spaces ------------------------------------------------------------------


def test_linear_helpers():
    assert f2_rank([1, 2, 3]) == 2
    assert f2_rank([1, 2, 4, 7]) == 3
    assert f2_rank([]) == 0
    assert apply_linear([2, 4, 1], 0b011) == 6


def test_free_algebra_basic():
    V = free_algebra(1, 1)
    assert V.dimension == 11
    assert V.apply_f(0) == 0
    orbits = f_orbits(V)
    assert all(len(o) == 3 for o in orbits)
    for o in orbits:
        for x in o:
            assert V.f_power(x, 3) == x
    # f is injective where defined
    assert len(set(V.f.values())) == len(V.f)


def test_free_algebra_terms_independent():
    V = free_algebra(1, 1)
    a = 1  # x0 is the least basis term
    vals = [V.evaluate(t, a) for t in enum_terms(1, 1)]
    assert f2_rank(vals) == 11


def test_direct_sum():
    V = free_algebra(1, 0)
    U, i1, i2 = direct_sum(V, V)
    assert U.dimension == 6 and i1 == [1, 2, 4] and i2 == [8, 16, 32]
    assert U.f[8] == V.f[1] << 3
    with pytest.raises(InputError):
        direct_sum(V, free_algebra(1, 0, 4))


def test_embed_spread_and_seed():
    V = free_algebra(1, 0)
    E = embed_circle(V)
    assert sorted(E.angles.values()) == [0, Fraction(1, 3), Fraction(2, 3)]
    S = embed_circle(V, {1: "1/12"})
    assert sorted(S.angles.values()) == [Fraction(1, 12), Fraction(5, 12), Fraction(3, 4)]


def test_embed_seed_errors():
    V = free_algebra(1, 0)
    with pytest.raises(AngleCollision):
        embed_circle(V, {1: "0", 2: "1/2"})
    with pytest.raises(OrbitIncomplete):
        embed_circle(free_algebra(1, 1), {(1 << 11) - 1: "0"})
    U, _, _ = direct_sum(V, V)
    with pytest.raises(AngleCollision):
        embed_circle(U, {1: "0", 8: "1/3"})


def test_embed_fills_widest_gap():
    U, _, _ = direct_sum(free_algebra(1, 0), free_algebra(1, 0))
    E = embed_circle(U, {1: "0"})
    assert E.angles[8] == Fraction(1, 6)


def test_period_violation():
    V = CVStructure(1, f={1: 1})
    with pytest.raises(PeriodViolation):
        f_orbits(V)
    assert orbit_of(CVStructure(2, f={1: 2}), 1) is None


def test_class_c_pipeline():
    V = embed_circle(free_algebra(1, 1))
    rep = check_class_C(V, 1)
    assert rep["ok"]
    assert rep["4"]["checked"] >= 1 and rep["4"]["terms"] == 11


def test_class_c_fixed_point_fails_rotation():
    V = CVStructure(1, f={1: 1}, angles={1: Fraction(0)})
    rep = check_class_C(V, 0)
    assert not rep["3"]["ok"]
    assert any(v["law"] == "period" for v in rep["3"]["violations"])


def test_class_c_linear_f_fails_independence():
    # f the linear cyclic shift on F2^3: f(x + f(x)) lies in the span of the orbit of x
    shift = [2, 4, 1]
    V = CVStructure(3, f={v: apply_linear(shift, v) for v in range(8)})
    rep = check_class_C(V, 1)
    assert not rep["4"]["ok"]
    assert rep["4"]["violations"][0]["rank"] < 11


def test_class_c_order_violation():
    V = embed_circle(free_algebra(1, 0))
    # reverse the rotation: f now runs clockwise
    bad = V.with_angles({1: Fraction(0), 2: Fraction(2, 3), 4: Fraction(1, 3)})
    rep = check_class_C(bad, 0)
    assert rep["2"]["ok"] and not rep["3"]["ok"]
    tie = V.with_angles({1: Fraction(0), 2: Fraction(0), 4: Fraction(1, 3)})
    assert not check_class_C(tie, 0)["2"]["ok"]


def test_structure_validation_and_round_trip(tmp_path):
    with pytest.raises(InputError):
        CVStructure(2, period=2)
    with pytest.raises(InputError):
        CVStructure(1, f={1: 4})
    with pytest.raises(InputError):
        CVStructure(1, angles={1: Fraction(3, 2)})
    V = embed_circle(free_algebra(1, 1))
    p = tmp_path / "v.json"
    p.write_text(json.dumps(V.to_json()))
    W = load_cvstructure(p)
    assert W.f == V.f and W.angles == V.angles and W.dimension == 11
    (tmp_path / "bad.json").write_text("{\n nope")
    with pytest.raises(ParseError):
        load_cvstructure(tmp_path / "bad.json")
    with pytest.raises(InputError):
        CVStructure.from_json({"f": []})


def test_depth_exhausted_on_missing_f():
    V = free_algebra(1, 1)
    with pytest.raises(DepthExhausted):
        V.apply_f((1 << 11) - 1)


# -- arcs and cuts -------------------------------------------------------------


def test_arcs():
    A = Arc(Fraction(3, 4), Fraction(1, 4))
    assert A.length == Fraction(1, 2)
    assert Fraction(0) in A and Fraction(1, 2) not in A and Fraction(3, 4) not in A
    assert A.closed_left(Fraction(3, 4))
    with pytest.raises(DegenerateArc):
        Arc(Fraction(1, 3), Fraction(4, 3))
    pts = {1: Fraction(1, 10), 2: Fraction(9, 10), 3: Fraction(1, 2)}
    assert arc_members(pts, Fraction(3, 4), Fraction(1, 4)) == [2, 1]
    assert arc_members(pts.values(), 0, Fraction(3, 5)) == [Fraction(1, 10), Fraction(1, 2)]


def test_cut_split():
    A = Arc(Fraction(3, 4), Fraction(1, 4))
    c = cut_split([Fraction(1, 10), Fraction(9, 10), Fraction(0)], A, Fraction(0))
    assert c.lower == (Fraction(9, 10),) and c.upper == (Fraction(0), Fraction(1, 10))
    with pytest.raises(InputError):
        cut_split([Fraction(1, 2)], A, 0)


# -- chains ------------------------------------------------------------------


@pytest.mark.parametrize("length", [1, 2, 3])
def test_nested_chain(length):
    V = embed_circle(free_algebra(1, 1))
    res = nested_chain(V, length)
    assert len(res.blocks) == length and res.ok
    assert len(res.checks) == length * (length - 1) // 2
    assert check_class_C(res.structure, 1)["ok"]


def test_nested_chain_windows_by_hand():
    V = embed_circle(free_algebra(1, 1))
    res = nested_chain(V, 3, splits=[1, 0, 2])
    th = res.structure.angles
    f = res.structure.f
    for m, bm in enumerate(res.blocks):
        a, fa = th[bm.generator], th[f[bm.generator]]
        pos = lambda x: (th[x] - a) % 1
        for bn in res.blocks[m + 1:]:
            for x in bn.window:
                assert 0 < pos(x) < (fa - a) % 1
                assert all(pos(c) < pos(x) for c in bm.lower)
                assert all(pos(x) < pos(c) for c in bm.upper)


def test_nested_chain_limits():
    V = embed_circle(free_algebra(1, 0))
    with pytest.raises(DepthExhausted):
        nested_chain(V, 0)
    with pytest.raises(DepthExhausted):
        nested_chain(V, 20)
    with pytest.raises(DepthExhausted):
        nested_chain(V, 2, splits=[9, 0])
