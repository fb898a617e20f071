"""The affine copy N = (M, X, act) of a group G interpreted in M.

Points of X are identified with G through ``h -> h·x0``; ``x0`` is point 0.
Automorphisms are kept in the normal form ``F = ḡ ∘ f̄`` where
``f̄(h·x0) = f(h)·x0`` and ``ḡ(h·x0) = (h g^-1)·x0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    GroupMismatch,
    IndexOutOfRange,
    InputError,
    NotAnAutomorphism,
    NotRegular,
    NotSubstructure,
    OrbitMismatch,
)
from .fstruct import (
    DEFAULT_AUT_BOUND,
    FiniteStructure,
    MultiSortPermutation,
    RelationSymbol,
    Signature,
    automorphisms,
    automorphisms_brute,
    check_automorphism,
    group_as_structure,
)
from .grp.finite import FiniteGroup, generate_subgroup, group_from_cayley
from .grp.perms import Permutation

BRUTE_CROSS_CHECK_LIMIT = 12


@dataclass
class AffineStructure:
    base: FiniteStructure
    group: FiniteGroup
    group_sort: str
    point_sort: str
    action: np.ndarray            # action[g, x] = g·x
    structure: FiniteStructure    # the two-sorted N
    point_of: np.ndarray = field(repr=False)    # h -> h·x0
    element_of: np.ndarray = field(repr=False)  # inverse of point_of

    base_point = 0

    def point(self, h: int) -> int:
        return int(self.point_of[h])

    def element(self, x: int) -> int:
        return int(self.element_of[x])


@dataclass(frozen=True, order=True)
class AffineAutomorphism:
    """``ḡ ∘ f̄`` with ``f`` an automorphism of the base."""

    g: int
    f: MultiSortPermutation

    def to_json(self) -> dict:
        return {"g": self.g, "f": self.f.to_json()}


def _group_from_relation(M: FiniteStructure, sort: str, mul: str) -> FiniteGroup:
    n = M.sizes[sort]
    table = np.full((n, n), -1, dtype=np.int64)
    for x, y, z in M.relations[mul]:
        if table[x, y] >= 0:
            raise GroupMismatch(f"relation {mul} is not the graph of a function at {(x, y)}")
        table[x, y] = z
    if (table < 0).any():
        raise GroupMismatch(f"relation {mul} is not total")
    return group_from_cayley(table)


def build_affine(M: FiniteStructure, G: FiniteGroup | None = None, group_sort: str = "G",
                 mul: str = "mul", action: Sequence[Sequence[int]] | None = None,
                 point_sort: str = "X") -> AffineStructure:
    """Adjoin a sort X with a regular G-action to M.

    Without ``action`` the points are ``h·x0`` listed identity first, then the
    other elements ascending, and ``g·(h·x0) = (gh)·x0``.
    """
    if group_sort not in M.signature.sorts:
        raise GroupMismatch(f"M has no sort {group_sort}")
    sym = next((r for r in M.signature.relations if r.name == mul), None)
    if sym is None or sym.sorts != (group_sort,) * 3:
        raise GroupMismatch(f"M has no ternary relation {mul} on {group_sort}")
    recovered = _group_from_relation(M, group_sort, mul)
    if G is None:
        G = recovered
    elif G.order != recovered.order or not np.array_equal(G.mul, recovered.mul):
        raise GroupMismatch("group table differs from the interpretation in M")
    n = G.order
    while point_sort in M.signature.sorts:
        point_sort += "'"
    if action is None:
        order = [G.identity] + [h for h in range(n) if h != G.identity]
        point_of = np.empty(n, dtype=np.int64)
        point_of[order] = np.arange(n)
        act = point_of[G.mul[:, order]]
    else:
        act = np.array(action, dtype=np.int64)
        if act.shape != (n, n):
            raise NotRegular(None, None, None)
        for g in range(n):
            if sorted(act[g].tolist()) != list(range(n)):
                raise NotRegular(g, None, None)
            if g != G.identity:
                fixed = np.flatnonzero(act[g] == np.arange(n))
                if fixed.size:
                    raise NotRegular(g, int(fixed[0]), int(fixed[0]))
        for x in range(n):
            col = act[:, x]
            if len(set(col.tolist())) != n:
                y = next(int(v) for v in col if (col == v).sum() > 1)
                raise NotRegular(None, x, y)
        for g in range(n):
            for h in range(n):
                if not np.array_equal(act[G.mul[g, h]], act[g][act[h]]):
                    raise GroupMismatch(f"not an action: ({g}*{h})·x differs from {g}·({h}·x)")
        point_of = act[:, 0].copy()
    element_of = np.empty(n, dtype=np.int64)
    element_of[point_of] = np.arange(n)
    act.setflags(write=False)
    sig = M.signature
    nsig = Signature(sig.sorts + (point_sort,),
                     sig.relations + (RelationSymbol("act", (group_sort, point_sort, point_sort)),),
                     sig.functions, sig.constants)
    rels = dict(M.relations)
    rels["act"] = [(g, x, int(act[g, x])) for g in range(n) for x in range(n)]
    sizes = dict(M.sizes)
    sizes[point_sort] = n
    N = FiniteStructure(nsig, sizes, rels, dict(M.functions), dict(M.constants))
    return AffineStructure(M, G, group_sort, point_sort, act, N, point_of, element_of)


def affine_from_group(G: FiniteGroup) -> AffineStructure:
    return build_affine(group_as_structure(G), G)


def lift_f(N: AffineStructure, f: MultiSortPermutation) -> AffineAutomorphism:
    check_automorphism(N.base, f)
    return AffineAutomorphism(N.group.identity, f)


def lift_g(N: AffineStructure, g: int) -> AffineAutomorphism:
    if not 0 <= g < N.group.order:
        raise IndexOutOfRange(g, N.group.order)
    return AffineAutomorphism(int(g), MultiSortPermutation.identity(N.base))


def as_map(N: AffineStructure, F: AffineAutomorphism) -> MultiSortPermutation:
    """The total map on N: ``f`` on M and ``h·x0 -> (f(h) g^-1)·x0`` on X."""
    G = N.group
    fG = np.array(F.f.component(N.group_sort).image)
    hs = N.element_of                          # point -> h
    img = N.point_of[G.mul[fG[hs], G.inv[F.g]]]
    return MultiSortPermutation(N.structure.signature.sorts,
                                F.f.perms + (Permutation(tuple(int(v) for v in img)),))


def decompose(N: AffineStructure, F: MultiSortPermutation) -> AffineAutomorphism:
    """Normal form of an automorphism of N: ``f = F|M`` and ``F(x0) = g^-1·x0``."""
    check_automorphism(N.structure, F)
    f = MultiSortPermutation(N.base.signature.sorts, F.perms[:-1])
    g = N.group.inverse(N.element(F.component(N.point_sort)(N.base_point)))
    out = AffineAutomorphism(g, f)
    if as_map(N, out) != F:
        raise NotAnAutomorphism("act", None)
    return out


def compose(N: AffineStructure, A: AffineAutomorphism, B: AffineAutomorphism) -> AffineAutomorphism:
    """Normal form of ``A ∘ B``."""
    return decompose(N, as_map(N, A) * as_map(N, B))


def _apply_f(N: AffineStructure, f: MultiSortPermutation, g: int) -> int:
    return f.component(N.group_sort)(g)


@dataclass
class LawReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"checked": self.checked, "passed": self.passed, "failures": self.failures[:10]}


def check_composition_laws(N: AffineStructure, aut_gens: Sequence[MultiSortPermutation] | None = None) -> dict:
    """Both lift composition laws for f over Aut(M) generators (and the identity), g over G.

    Also checks that lift_g is a homomorphism: ``ḡ1 ∘ ḡ2 = (g1 g2)‾``.
    """
    if aut_gens is None:
        aut_gens = automorphisms(N.base).generators
    fs = [MultiSortPermutation.identity(N.base)] + list(aut_gens)
    G = N.group
    law1, law2, hom = LawReport(), LawReport(), LawReport()
    for i, f in enumerate(fs):
        fbar = as_map(N, lift_f(N, f))
        finv = f.inverse()
        for g in range(G.order):
            gbar = as_map(N, lift_g(N, g))
            fg = as_map(N, lift_g(N, _apply_f(N, f, g)))
            law1.checked += 1
            if fbar * gbar != fg * fbar:
                law1.failures.append({"f": i, "g": g})
            law2.checked += 1
            fig = as_map(N, lift_g(N, _apply_f(N, finv, g)))
            if gbar * fbar != fbar * fig:
                law2.failures.append({"f": i, "g": g})
    for g1 in range(G.order):
        for g2 in range(G.order):
            hom.checked += 1
            lhs = as_map(N, lift_g(N, g1)) * as_map(N, lift_g(N, g2))
            if lhs != as_map(N, lift_g(N, G.op(g1, g2))):
                hom.failures.append({"g1": g1, "g2": g2})
    return {"fBarGBar": law1, "gBarFBar": law2, "liftGHomomorphism": hom}


@dataclass
class SemidirectReport:
    aut_N_order: int
    aut_M_order: int
    group_order: int
    order_law: bool
    normal_form_bijective: bool
    conjugation_law: LawReport
    trivial_intersection: bool
    composition_laws: dict
    brute_order: int | None

    @property
    def passed(self) -> bool:
        return (self.order_law and self.normal_form_bijective and self.conjugation_law.passed
                and self.trivial_intersection and all(r.passed for r in self.composition_laws.values())
                and (self.brute_order is None or self.brute_order == self.aut_N_order))

    def to_json(self) -> dict:
        return {
            "autNOrder": self.aut_N_order,
            "autMOrder": self.aut_M_order,
            "groupOrder": self.group_order,
            "orderLaw": self.order_law,
            "normalFormBijective": self.normal_form_bijective,
            "conjugationLaw": self.conjugation_law.to_json(),
            "trivialIntersection": self.trivial_intersection,
            "compositionLaws": {k: v.to_json() for k, v in self.composition_laws.items()},
            "bruteForceOrder": self.brute_order,
            "passed": self.passed,
        }


def verify_semidirect(N: AffineStructure, bound: int = DEFAULT_AUT_BOUND,
                      brute_limit: int = BRUTE_CROSS_CHECK_LIMIT) -> SemidirectReport:
    autN = automorphisms(N.structure, bound)
    autM = automorphisms(N.base, bound)
    G = N.group
    order_law = autN.order == G.order * autM.order

    elemsN = autN.elements()
    forms = [decompose(N, F) for F in elemsN]
    elemsM = set(autM.elements())
    pairs = {(a.g, a.f) for a in forms}
    bijective = (len(pairs) == len(forms) == G.order * len(elemsM)
                 and all(a.f in elemsM for a in forms))

    conj = LawReport()
    for i, f in enumerate(autM.generators):
        fbar = as_map(N, lift_f(N, f))
        for g in range(G.order):
            conj.checked += 1
            lhs = fbar * as_map(N, lift_g(N, g)) * fbar.inverse()
            if lhs != as_map(N, lift_g(N, _apply_f(N, f, g))):
                conj.failures.append({"f": i, "g": g})

    gbars = {as_map(N, lift_g(N, g)) for g in range(G.order)}
    fbars = {as_map(N, lift_f(N, f)) for f in elemsM}
    trivial = gbars & fbars == {MultiSortPermutation.identity(N.structure)}

    laws = check_composition_laws(N, autM.generators)
    brute = None
    if N.structure.total_size <= brute_limit:
        found = automorphisms_brute(N.structure, brute_limit)
        brute = len(found) if found == elemsN else -len(found)
    return SemidirectReport(autN.order, autM.order, G.order, order_law, bijective, conj, trivial, laws, brute)


@dataclass
class StabilizerReport:
    fixed_M: dict
    fixed_X: tuple[int, ...]
    h0: int
    stabilizer_order: int
    conjugated_lifts: int
    equal: bool
    note: str = ("substructures are taken closed under functions, constants and the action; "
                 "this is the finite stand-in for an elementary substructure")

    def to_json(self) -> dict:
        return {"fixedM": self.fixed_M, "fixedX": list(self.fixed_X), "h0": self.h0,
                "stabilizerOrder": self.stabilizer_order, "conjugatedLifts": self.conjugated_lifts,
                "equal": self.equal, "note": self.note}


def _close_substructure(N: AffineStructure, sub: Mapping[str, Iterable[int]]) -> dict[str, set[int]]:
    M = N.base
    out = {s: {int(v) for v in sub.get(s, ())} for s in M.signature.sorts}
    for s, vs in out.items():
        for v in vs:
            if not 0 <= v < M.sizes[s]:
                raise IndexOutOfRange(v, M.sizes[s])
    for c in M.signature.constants:
        if M.constants[c.name] not in out[c.sort]:
            raise NotSubstructure(f"constant {c.name} missing")
    for f in M.signature.functions:
        table = M.functions[f.name]
        for args in itertools.product(*(sorted(out[s]) for s in f.args)):
            if int(table[args]) not in out[f.result]:
                raise NotSubstructure(f"not closed under {f.name} at {args}")
    Gp = out[N.group_sort]
    if set(generate_subgroup(N.group, Gp)) != Gp:
        raise NotSubstructure("group part is not a subgroup")
    return out


def stabilizer_form(N: AffineStructure, sub_M: Mapping[str, Iterable[int]], h0: int,
                    sub_X: Iterable[int] | None = None, bound: int = DEFAULT_AUT_BOUND) -> StabilizerReport:
    """Automorphisms fixing N' pointwise versus ``ḡ_{h0}^-1 ∘ f̄ ∘ ḡ_{h0}`` for f fixing M'."""
    G = N.group
    if not 0 <= h0 < G.order:
        raise IndexOutOfRange(h0, G.order)
    closed = _close_substructure(N, sub_M)
    Gp = sorted(closed[N.group_sort])
    orbit = tuple(sorted(N.point(G.op(g, h0)) for g in Gp))
    if sub_X is not None and tuple(sorted({int(x) for x in sub_X})) != orbit:
        raise OrbitMismatch(f"X-part must be the G'-orbit of h0·x0, i.e. {list(orbit)}")

    def fixes_M(F: MultiSortPermutation) -> bool:
        return all(F(s, v) == v for s, vs in closed.items() for v in vs)

    autN = automorphisms(N.structure, bound)
    lhs = set()
    for F in autN.elements():
        if fixes_M(F) and all(F(N.point_sort, x) == x for x in orbit):
            lhs.add(F)
    autM = automorphisms(N.base, bound)
    h = as_map(N, lift_g(N, h0))
    rhs = set()
    for f in autM.elements():
        if all(f(s, v) == v for s, vs in closed.items() for v in vs):
            rhs.add(h.inverse() * as_map(N, lift_f(N, f)) * h)
    fixed_M = {s: sorted(vs) for s, vs in closed.items()}
    return StabilizerReport(fixed_M, orbit, h0, len(lhs), len(rhs), lhs == rhs)
