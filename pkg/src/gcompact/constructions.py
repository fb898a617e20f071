"""Finite products with projection relations, complete groups, and a degenerate
quadratic form over F2."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .commutant import EquivRelation, commutator_set, power_set
from .errors import InputError, SizeBoundExceeded
from .fstruct import (
    DEFAULT_AUT_BOUND,
    AutGroup,
    ConstantSymbol,
    FiniteStructure,
    FunctionSymbol,
    MultiSortPermutation,
    RelationSymbol,
    Signature,
    automorphisms,
    group_as_structure,
    is_automorphism,
    orbit_equivalence,
)
from .grp.finite import ElementSet, FiniteGroup, direct_product, group_from_cayley, inner_automorphisms
from .grp.perms import Permutation

PRODUCT_ORDER_BOUND = 4096
MAX_FACTORS = 6
QFORM_MAX_DIMENSION = 13


@dataclass
class ProductStructure:
    """``G_0 × … × G_{n-1}`` expanded by E_k and the quotient maps onto each factor.

    Product element ``u`` has coordinates ``u(k) = (u // stride[k]) % |G_k|``.
    """

    factors: list[tuple[FiniteGroup, AutGroup]]
    product: FiniteGroup
    strides: tuple[int, ...]
    projections: list[np.ndarray] = field(repr=False)
    relationsE: list[EquivRelation] = field(repr=False)
    expanded: FiniteStructure = field(repr=False)

    def coordinates(self, u: int) -> tuple[int, ...]:
        return tuple(int(p[u]) for p in self.projections)

    def element(self, coords: Sequence[int]) -> int:
        return int(sum(c * s for c, s in zip(coords, self.strides)))

    def factor_sort(self, k: int) -> str:
        return f"{k}.G"


def build_product(factors: Sequence[FiniteGroup], bound: int = PRODUCT_ORDER_BOUND) -> ProductStructure:
    if not 1 <= len(factors) <= MAX_FACTORS:
        raise SizeBoundExceeded("number of factors", len(factors), MAX_FACTORS)
    order = int(np.prod([G.order for G in factors], dtype=object))
    if order > bound:
        raise SizeBoundExceeded("product order", order, bound)
    prod = factors[0]
    for G in factors[1:]:
        prod = direct_product(prod, G)
    strides = []
    s = 1
    for G in reversed(factors):
        strides.append(s)
        s *= G.order
    strides = tuple(reversed(strides))
    ar = np.arange(order)
    projections = [(ar // st) % G.order for G, st in zip(factors, strides)]
    for p in projections:
        p.setflags(write=False)
    relsE = [EquivRelation.from_blocks(p) for p in projections]

    sorts = ["P"]
    rels = [RelationSymbol("mul", ("P", "P", "P"))]
    funs = []
    consts = [ConstantSymbol("e", "P")]
    sizes = {"P": order}
    rdata = {"mul": [(x, y, int(prod.mul[x, y])) for x in range(order) for y in range(order)]}
    fdata = {}
    cdata = {"e": prod.identity}
    for k, (G, p) in enumerate(zip(factors, projections)):
        sk = f"{k}.G"
        sorts.append(sk)
        sizes[sk] = G.order
        rels.append(RelationSymbol(f"E{k}", ("P", "P")))
        blocks = [np.flatnonzero(p == v) for v in range(G.order)]
        rdata[f"E{k}"] = [(int(a), int(b)) for B in blocks for a in B for b in B]
        rels.append(RelationSymbol(f"{k}.mul", (sk, sk, sk)))
        rdata[f"{k}.mul"] = [(x, y, int(G.mul[x, y])) for x in range(G.order) for y in range(G.order)]
        funs.append(FunctionSymbol(f"pi{k}", ("P",), sk))
        fdata[f"pi{k}"] = p
        consts.append(ConstantSymbol(f"{k}.e", sk))
        cdata[f"{k}.e"] = G.identity
    sig = Signature(tuple(sorts), tuple(rels), tuple(funs), tuple(consts))
    expanded = FiniteStructure(sig, sizes, rdata, fdata, cdata)
    fac = [(G, automorphisms(group_as_structure(G))) for G in factors]
    return ProductStructure(fac, prod, strides, projections, relsE, expanded)


def aut_orbit_relation(G: FiniteGroup, A: AutGroup | None = None) -> EquivRelation:
    """Orbits of Aut(G) (as a structure with multiplication and identity) on G."""
    M = group_as_structure(G)
    if A is None:
        A = automorphisms(M)
    return EquivRelation.from_orbits(orbit_equivalence(M, A.generators, 1))


def extend_factor_automorphism(P: ProductStructure, k: int, f: Permutation) -> MultiSortPermutation:
    """``f`` on coordinate k (and on the k-th quotient sort), identity elsewhere."""
    ar = np.arange(P.product.order)
    fk = np.array(f.image)
    img = ar + (fk[P.projections[k]] - P.projections[k]) * P.strides[k]
    perms = []
    for s in P.expanded.signature.sorts:
        if s == "P":
            perms.append(Permutation(tuple(int(v) for v in img)))
        elif s == P.factor_sort(k):
            perms.append(f)
        else:
            perms.append(Permutation.identity(P.expanded.sizes[s]))
    return MultiSortPermutation(P.expanded.signature.sorts, tuple(perms))


@dataclass
class StarReport:
    k: int
    lhs: ElementSet
    rhs: ElementSet
    subset_holds: bool
    equality_holds: bool
    extensions_witnessed: bool
    expanded_aut_order: int
    factor_aut_order: int

    def to_json(self) -> dict:
        return {"k": self.k, "lhs": list(self.lhs), "rhs": list(self.rhs),
                "subsetHolds": self.subset_holds, "equalityHolds": self.equality_holds,
                "extensionsWitnessed": self.extensions_witnessed,
                "expandedAutOrder": self.expanded_aut_order, "factorAutOrder": self.factor_aut_order}


def star_check(P: ProductStructure, k: int, bound: int = DEFAULT_AUT_BOUND) -> StarReport:
    """Compare ``π_k[X_≡]`` on the expanded product with ``X_≡`` on factor k."""
    if not 0 <= k < len(P.factors):
        raise InputError(f"factor index {k} out of range")
    A = automorphisms(P.expanded, bound)
    orbits = orbit_equivalence(P.expanded, A.generators, ("P",))
    X = commutator_set(P.product, EquivRelation.from_orbits(orbits))
    lhs = tuple(sorted({int(P.projections[k][u]) for u in X}))
    G, AG = P.factors[k]
    rhs = commutator_set(G, aut_orbit_relation(G, AG))
    witnessed = all(is_automorphism(P.expanded, extend_factor_automorphism(P, k, f.perms[0]))
                    for f in AG.generators)
    return StarReport(k, lhs, rhs, set(lhs) <= set(rhs), lhs == rhs, witnessed, A.order, AG.order)


def complete_group_check(G: FiniteGroup, bound: int = DEFAULT_AUT_BOUND) -> bool:
    """Aut(G) equals Inn(G) as permutation groups on the carrier."""
    return complete_group_report(G, bound)["complete"]


def complete_group_report(G: FiniteGroup, bound: int = DEFAULT_AUT_BOUND) -> dict:
    A = automorphisms(group_as_structure(G), bound).perm_group
    inn = inner_automorphisms(G)
    same = A.order == inn.order and inn.is_subgroup_of(A) and A.is_subgroup_of(inn)
    return {"autOrder": A.order, "innOrder": inn.order, "centerOrder": len(G.center()), "complete": same}


# -- quadratic form --------------------------------------------------------------


def _popparity(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    out = np.zeros_like(x)
    while x.any():
        out ^= x & 1
        x >>= 1
    return out


class QuadraticFormStructure:
    """``F2^(2k+1)`` with ``Q(Σ λ_i b_i) = λ0 + λ1λ2 + λ3λ4 + …``.

    Vectors are bitmasks: bit i is the coordinate at ``b_i``.
    """

    def __init__(self, k: int):
        if k < 1:
            raise InputError("k must be at least 1")
        self.k = k
        self.dimension = 2 * k + 1
        if self.dimension > QFORM_MAX_DIMENSION:
            raise SizeBoundExceeded("quadratic form dimension", self.dimension, QFORM_MAX_DIMENSION)
        self.size = 1 << self.dimension
        v = np.arange(self.size, dtype=np.int64)
        q = v & 1
        for j in range(1, k + 1):
            q = q ^ (((v >> (2 * j - 1)) & 1) & ((v >> (2 * j)) & 1))
        self.Q = q.astype(np.uint8)
        self.Q.setflags(write=False)
        self.b0 = 1
        self.radical = self._radical()

    def basis(self, i: int) -> int:
        return 1 << i

    def q(self, v: int) -> int:
        return int(self.Q[v])

    def bilinear(self, a: int, b: int) -> int:
        return int(self.Q[a ^ b] ^ self.Q[a] ^ self.Q[b])

    def bilinear_row(self, a: int) -> np.ndarray:
        v = np.arange(self.size)
        return self.Q[a ^ v] ^ self.Q[a] ^ self.Q

    def _radical(self) -> ElementSet:
        # by bilinearity it suffices to test the basis
        rad = np.ones(self.size, dtype=bool)
        for i in range(self.dimension):
            rad &= self.bilinear_row(1 << i) == 0
        return tuple(int(v) for v in np.flatnonzero(rad))

    @cached_property
    def group(self) -> FiniteGroup:
        v = np.arange(self.size)
        return group_from_cayley(v[:, None] ^ v[None, :])

    @cached_property
    def structure(self) -> FiniteStructure:
        sig = Signature(("V",), (RelationSymbol("Q", ("V",)),),
                        (FunctionSymbol("add", ("V", "V"), "V"),), (ConstantSymbol("0", "V"),))
        v = np.arange(self.size)
        return FiniteStructure(sig, {"V": self.size},
                               {"Q": [(int(x),) for x in np.flatnonzero(self.Q)]},
                               {"add": v[:, None] ^ v[None, :]}, {"0": 0})


def quadratic_structure(k: int) -> QuadraticFormStructure:
    return QuadraticFormStructure(k)


def b0_exclusion_check(k: int, bound: int = DEFAULT_AUT_BOUND) -> dict:
    """X_E for E the Aut-orbit relation; b0 must be outside, square coverage only reported."""
    qs = quadratic_structure(k)
    A = automorphisms(qs.structure, bound)
    E = EquivRelation.from_orbits(orbit_equivalence(qs.structure, A.generators, 1))
    X = commutator_set(qs.group, E)
    X2 = set(power_set(qs.group, X, 2))
    target = set(range(qs.size)) - {0, qs.b0}
    return {
        "k": k,
        "dimension": qs.dimension,
        "radical": list(qs.radical),
        "radicalIsZeroB0": qs.radical == (0, qs.b0),
        "autOrder": A.order,
        "orbitCount": E.block_count,
        "X_E": list(X),
        "zeroInX": 0 in X,
        "b0InX": qs.b0 in X,
        "squareSize": len(X2),
        "squareCoversComplement": target <= X2,
    }
