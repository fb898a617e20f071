"""E-commutators, generation width, thickness and invariant cores."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CarrierMismatch,
    InputError,
    InternalIndexBoundViolated,
    MemberNotThick,
    NotAnAutomorphism,
    NotSubgroup,
    NotSymmetric,
    RelationNotOrbit,
    SizeBoundExceeded,
)
from .fstruct import AutGroup, FiniteStructure, MultiSortPermutation, OrbitRelation, canonical_blocks
from .grp.finite import ElementSet, FiniteGroup, generate_subgroup, is_normal
from .grp.perms import Permutation

SUBGROUP_ENUMERATION_LIMIT = 64


@dataclass(frozen=True)
class EquivRelation:
    """Partition of ``{0..size-1}`` as a block-id table, ids numbered by first occurrence."""

    size: int
    block_ids: tuple[int, ...]
    block_count: int

    @classmethod
    def from_blocks(cls, ids: Sequence[int]) -> "EquivRelation":
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        if ids.size == 0:
            raise InputError("empty relation")
        canon, k = canonical_blocks(ids)
        return cls(len(ids), tuple(int(v) for v in canon), k)

    @classmethod
    def equality(cls, n: int) -> "EquivRelation":
        return cls.from_blocks(range(n))

    @classmethod
    def full(cls, n: int) -> "EquivRelation":
        return cls.from_blocks([0] * n)

    @classmethod
    def conjugacy(cls, G: FiniteGroup) -> "EquivRelation":
        m, i = G.mul, G.inv
        ar = np.arange(G.order)
        # conj[g, x] = g^-1 x g
        conj = m[m[i[ar][:, None], ar[None, :]], ar[:, None]]
        ids = np.full(G.order, -1, dtype=np.int64)
        for x in range(G.order):
            if ids[x] < 0:
                ids[np.unique(conj[:, x])] = x
        return cls.from_blocks(ids)

    @classmethod
    def from_orbits(cls, rel: OrbitRelation) -> "EquivRelation":
        if len(rel.sorts) != 1:
            raise InputError("orbit relation must be on single elements")
        return cls.from_blocks(rel.block_ids)

    def related(self, a: int, b: int) -> bool:
        return self.block_ids[a] == self.block_ids[b]

    def blocks(self) -> list[ElementSet]:
        out: list[list[int]] = [[] for _ in range(self.block_count)]
        for x, b in enumerate(self.block_ids):
            out[b].append(x)
        return [tuple(b) for b in out]


def _mask_to_set(mask: np.ndarray) -> ElementSet:
    return tuple(int(v) for v in np.flatnonzero(mask))


def _as_index_array(G: FiniteGroup, S: Iterable[int]) -> np.ndarray:
    arr = np.array(sorted({int(s) for s in S}), dtype=np.int64)
    G.check_elements(arr.tolist())
    return arr


def product_set(G: FiniteGroup, A: Iterable[int], B: Iterable[int]) -> ElementSet:
    """``{ab : a in A, b in B}``."""
    a, b = _as_index_array(G, A), _as_index_array(G, B)
    mask = np.zeros(G.order, dtype=bool)
    if a.size and b.size:
        mask[G.mul[np.ix_(a, b)].reshape(-1)] = True
    return _mask_to_set(mask)


def power_set(G: FiniteGroup, P: Iterable[int], n: int) -> ElementSet:
    """n-fold product ``P·P·…·P`` (n >= 1)."""
    if n < 1:
        raise InputError("power must be at least 1")
    base = tuple(sorted({int(p) for p in P}))
    cur = base
    for _ in range(n - 1):
        cur = product_set(G, cur, base)
    return cur


def _check_carrier(G: FiniteGroup, E: EquivRelation) -> None:
    if E.size != G.order:
        raise CarrierMismatch(E.size, G.order)


def commutator_set(G: FiniteGroup, E: EquivRelation) -> ElementSet:
    """``X_E = {a^-1 b : E(a, b)}``."""
    _check_carrier(G, E)
    mask = np.zeros(G.order, dtype=bool)
    for block in E.blocks():
        b = np.array(block)
        mask[G.mul[np.ix_(G.inv[b], b)].reshape(-1)] = True
    return _mask_to_set(mask)


@dataclass(frozen=True)
class WidthProfile:
    X_E: ElementSet
    powers: tuple[ElementSet, ...]
    width: int
    commutant: ElementSet
    index: int
    block_count: int

    def to_json(self) -> dict:
        return {
            "X_E": list(self.X_E),
            "powerSizes": [len(p) for p in self.powers],
            "width": self.width,
            "commutant": list(self.commutant),
            "index": self.index,
            "quotientSize": self.block_count,
        }


def commutant_profile(G: FiniteGroup, E: EquivRelation) -> WidthProfile:
    X = commutator_set(G, E)
    xs = np.array(X)
    powers = [X]
    mask = np.zeros(G.order, dtype=bool)
    mask[xs] = True
    while True:
        cur = np.flatnonzero(mask)
        nxt = np.zeros(G.order, dtype=bool)
        nxt[G.mul[np.ix_(cur, xs)].reshape(-1)] = True
        if np.array_equal(nxt, mask):
            break
        mask = nxt
        powers.append(_mask_to_set(mask))
    commutant = powers[-1]
    index = G.order // len(commutant)
    if index > E.block_count:
        raise InternalIndexBoundViolated(f"[G:G_E] = {index} exceeds |G/E| = {E.block_count}")
    return WidthProfile(X, tuple(powers), len(powers), commutant, index, E.block_count)


def _carrier_perm(G: FiniteGroup, h) -> Permutation:
    if isinstance(h, MultiSortPermutation):
        h = h.perms[0]
    if not isinstance(h, Permutation):
        h = Permutation(tuple(int(v) for v in h))
    return h


def _check_group_automorphism(G: FiniteGroup, p: Permutation) -> None:
    if p.degree != G.order:
        raise NotAnAutomorphism("mul", None)
    a = np.array(p.image)
    bad = np.argwhere(a[G.mul] != G.mul[np.ix_(a, a)])
    if bad.size:
        x, y = bad[0]
        raise NotAnAutomorphism("mul", (int(x), int(y)))


def orbit_partition(G: FiniteGroup, automorphisms: Sequence) -> EquivRelation:
    """Orbits on the carrier of the group generated by the given automorphisms."""
    perms = [_carrier_perm(G, h) for h in automorphisms]
    for p in perms:
        _check_group_automorphism(G, p)
    ids = list(range(G.order))

    def find(x):
        while ids[x] != x:
            ids[x] = ids[ids[x]]
            x = ids[x]
        return x

    for p in perms:
        for x in range(G.order):
            a, b = find(x), find(p(x))
            if a != b:
                ids[max(a, b)] = min(a, b)
    return EquivRelation.from_blocks([find(x) for x in range(G.order)])


@dataclass(frozen=True)
class NormalityResult:
    normal: bool
    witness: tuple[int, int] | None
    commutant: ElementSet


def normality_check(G: FiniteGroup, E: EquivRelation, automorphisms: Sequence | None = None,
                    certify: bool = True) -> NormalityResult:
    """Is ``G_E`` normal? Witness ``(g, x)``: ``x`` in ``G_E`` with ``g^-1 x g`` outside.

    With ``certify`` the relation must equal the orbit partition of the given
    automorphisms.
    """
    _check_carrier(G, E)
    if certify:
        if automorphisms is None:
            raise InputError("certification needs the generating automorphisms")
        orbit = orbit_partition(G, automorphisms)
        if orbit.block_ids != E.block_ids:
            x = next(i for i in range(G.order) if orbit.block_ids[i] != E.block_ids[i])
            raise RelationNotOrbit(x)
    GE = commutant_profile(G, E).commutant
    ok, witness = is_normal(G, GE)
    return NormalityResult(ok, witness, GE)


# -- thickness ---------------------------------------------------------------


def check_symmetric(G: FiniteGroup, P: Iterable[int]) -> ElementSet:
    Ps = tuple(sorted({int(p) for p in P}))
    G.check_elements(Ps)
    members = set(Ps)
    for p in Ps:
        if G.inverse(p) not in members:
            raise NotSymmetric(p)
    return Ps


def max_independent_set(adj: Sequence[int], n: int, start: int | None = None) -> list[int]:
    """Maximum independent set of a graph given by bitmask adjacency rows.

    Branch and bound with a greedy clique-cover bound. ``start`` forces a vertex
    into the set (vertex-transitive graphs only need one starting point).
    """
    best: list[int] = []
    full = (1 << n) - 1
    non = [(full & ~adj[v]) & ~(1 << v) for v in range(n)]   # non-neighbours

    def cover_bound(cand: int) -> int:
        # an independent set meets every clique at most once
        k = 0
        while cand:
            k += 1
            v = (cand & -cand).bit_length() - 1
            clique = 1 << v
            rest = cand & adj[v]
            while rest:
                u = (rest & -rest).bit_length() - 1
                clique |= 1 << u
                rest &= adj[u]
            cand &= ~clique
        return k

    def rec(chosen: list[int], cand: int):
        nonlocal best
        if not cand:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        if len(chosen) + cover_bound(cand) <= len(best):
            return
        v = (cand & -cand).bit_length() - 1
        chosen.append(v)
        rec(chosen, cand & non[v])
        chosen.pop()
        rec(chosen, cand & ~(1 << v))

    if start is None:
        rec([], full)
    else:
        rec([start], full & non[start])
    return sorted(best)


@dataclass(frozen=True)
class ThickSubset:
    size: int
    members: ElementSet
    symmetric: bool
    thickness: int | None
    free_sequence: ElementSet = field(default=())   # a longest sequence with no quotient in P

    def to_json(self) -> dict:
        return {"members": list(self.members), "symmetric": self.symmetric,
                "thickness": self.thickness, "freeSequence": list(self.free_sequence)}


def thickness_index(G: FiniteGroup, P: Iterable[int]) -> ThickSubset:
    """Least n with every length-n sequence hitting ``g_i^-1 g_j in P`` for some i < j."""
    Ps = check_symmetric(G, P)
    if G.identity not in Ps:
        return ThickSubset(G.order, Ps, True, None)
    mask = np.zeros(G.order, dtype=bool)
    mask[list(Ps)] = True
    mask[G.identity] = False
    n = G.order
    # x ~ y iff x^-1 y in P \ {e}
    quot = G.mul[G.inv[:, None], np.arange(n)[None, :]]
    adj = [sum(1 << int(y) for y in np.flatnonzero(mask[quot[x]])) for x in range(n)]
    free = max_independent_set(adj, n, start=G.identity)
    return ThickSubset(n, Ps, True, len(free) + 1, tuple(free))


def thickness_brute(G: FiniteGroup, P: Iterable[int], max_length: int = 12) -> int | None:
    """Oracle by explicit search over sequences with repeats allowed.

    Returns ``None`` when P-free sequences longer than ``max_length`` exist.
    """
    members = {int(p) for p in P}
    best = 0

    def rec(seq):
        nonlocal best
        best = max(best, len(seq))
        if best > max_length:
            return
        for g in range(G.order):
            if all(G.op(G.inverse(a), g) not in members for a in seq):
                seq.append(g)
                rec(seq)
                seq.pop()
                if best > max_length:
                    return

    rec([])
    return None if best > max_length else best + 1


def relation_thickness(M: FiniteStructure, R: str | Iterable[Sequence[int]], sort: str | None = None) -> int | None:
    """Thickness of a symmetric binary relation on one sort; ``None`` if not reflexive."""
    if isinstance(R, str):
        sym = M.relation_symbol(R)
        if len(sym.sorts) != 2 or sym.sorts[0] != sym.sorts[1]:
            raise InputError(f"relation {R} is not binary on a single sort")
        sort = sym.sorts[0]
        pairs = set(M.relations[R])
    else:
        if sort is None:
            if len(M.signature.sorts) != 1:
                raise InputError("sort required")
            sort = M.signature.sorts[0]
        pairs = {tuple(int(v) for v in p) for p in R}
    n = M.sizes[sort]
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise InputError(f"pair {(a, b)} outside sort {sort}")
        if (b, a) not in pairs:
            raise NotSymmetric((a, b))
    if any((x, x) not in pairs for x in range(n)):
        return None
    adj = [0] * n
    for a, b in pairs:
        if a != b:
            adj[a] |= 1 << b
    return len(max_independent_set(adj, n)) + 1


def intersect_thick_powers(G: FiniteGroup, family: Sequence[Iterable[int]], n: int) -> ElementSet:
    """``∩ P_i^n`` over a family of symmetric thick subsets."""
    if not family:
        raise InputError("empty family")
    result: set[int] | None = None
    for i, P in enumerate(family):
        try:
            t = thickness_index(G, P)
        except NotSymmetric:
            raise MemberNotThick(i) from None
        if t.thickness is None:
            raise MemberNotThick(i)
        pw = set(power_set(G, t.members, n))
        result = pw if result is None else result & pw
    return tuple(sorted(result))


# -- invariant core ------------------------------------------------------------


def _automorphism_perms(G: FiniteGroup, A) -> list[Permutation]:
    if isinstance(A, AutGroup):
        gens = A.generators
    else:
        gens = list(A)
    perms = [_carrier_perm(G, h) for h in gens]
    for p in perms:
        _check_group_automorphism(G, p)
    return perms


def normal_closure(G: FiniteGroup, S: Iterable[int]) -> ElementSet:
    S = {int(s) for s in S}
    while True:
        H = generate_subgroup(G, S)
        conj = {G.conj(x, g) for x in H for g in range(G.order)}
        if conj <= set(H):
            return H
        S = set(H) | conj


def subgroups_between(G: FiniteGroup, W: Iterable[int], limit: int = SUBGROUP_ENUMERATION_LIMIT) -> list[ElementSet]:
    """All subgroups containing the normal subgroup ``W`` (joins of cyclic extensions)."""
    W = generate_subgroup(G, W)
    if G.order // len(W) > limit:
        raise SizeBoundExceeded("subgroup enumeration (quotient order)", G.order // len(W), limit)
    start = frozenset(W)
    seen = {start}
    queue = [start]
    elems = range(G.order)
    for H in queue:
        for g in elems:
            if g in H:
                continue
            K = frozenset(generate_subgroup(G, set(H) | {g}))
            if K not in seen:
                seen.add(K)
                queue.append(K)
    return sorted(tuple(sorted(H)) for H in seen)


def invariant_core(G: FiniteGroup, A, index_bound: int,
                   limit: int = SUBGROUP_ENUMERATION_LIMIT) -> ElementSet:
    """Intersection of the subgroups of index <= ``index_bound`` fixed setwise by ``A``.

    Up to ``limit`` elements every subgroup is enumerated. Above, the search is
    restricted to subgroups containing the normal closure of all
    ``g^(index_bound!)``, which lies inside every subgroup of index at most
    ``index_bound``.
    """
    if index_bound < 1:
        raise InputError("index bound must be at least 1")
    perms = _automorphism_perms(G, A)
    if index_bound == 1:
        return tuple(range(G.order))
    if G.order <= limit:
        W: ElementSet = (G.identity,)
    else:
        e = math.factorial(index_bound)
        powers = set()
        for g in range(G.order):
            y = G.identity
            for bit in bin(e)[2:]:
                y = G.op(y, y)
                if bit == "1":
                    y = G.op(y, g)
            powers.add(y)
        W = normal_closure(G, powers)
    core = set(range(G.order))
    for H in subgroups_between(G, W, limit):
        if G.order // len(H) > index_bound:
            continue
        Hs = set(H)
        if all({p(h) for h in H} == Hs for p in perms):
            core &= Hs
    return tuple(sorted(core))


def criterion_P_squared(G: FiniteGroup, P: Iterable[int], H: Iterable[int]) -> tuple[bool, int | None]:
    """Whether ``H ⊆ P^2``; otherwise the least element of H outside."""
    Ps = check_symmetric(G, P)
    Hs = tuple(sorted({int(h) for h in H}))
    G.check_elements(Hs)
    if G.identity not in Hs:
        raise NotSubgroup(G.identity, G.identity)
    hset = set(Hs)
    for x in Hs:
        for y in Hs:
            if G.op(G.inverse(x), y) not in hset:
                raise NotSubgroup(x, y)
    sq = set(product_set(G, Ps, Ps))
    for h in Hs:
        if h not in sq:
            return False, h
    return True, None
