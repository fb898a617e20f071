"""Finite groups given by Cayley tables.

Elements are dense indices ``0..n-1``; the identity is located, never assumed
to be 0. Element sets are returned as ascending tuples.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..errors import (
    ActionNotAutomorphism,
    ActionNotHomomorphism,
    IndexOutOfRange,
    InputError,
    NoIdentity,
    NoInverse,
    NotAssociative,
    SizeBoundExceeded,
)
from .perms import Permutation, PermGroup

EAGER_ASSOCIATIVITY_LIMIT = 512
SPOT_CHECK_TRIPLES = 10_000

ElementSet = tuple[int, ...]


class FiniteGroup:
    """A validated finite group.

    ``mul`` is a read-only ``(n, n)`` integer array with ``mul[x, y] = x*y``.
    """

    __slots__ = ("order", "mul", "inv", "identity", "labels")

    def __init__(self, mul: np.ndarray, inv: np.ndarray, identity: int, labels: tuple[str, ...] | None):
        self.order = int(mul.shape[0])
        mul.setflags(write=False)
        inv.setflags(write=False)
        self.mul = mul
        self.inv = inv
        self.identity = int(identity)
        self.labels = labels

    # -- element helpers ------------------------------------------------------

    def op(self, x: int, y: int) -> int:
        return int(self.mul[x, y])

    def inverse(self, x: int) -> int:
        return int(self.inv[x])

    def conj(self, x: int, g: int) -> int:
        """``g^-1 x g``."""
        return int(self.mul[self.mul[self.inv[g], x], g])

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = int(self.mul[y, x])
            k += 1
        return k

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def index_of(self, label: str) -> int:
        if not self.labels or label not in self.labels:
            raise KeyError(label)
        return self.labels.index(label)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def center(self) -> ElementSet:
        return tuple(int(z) for z in range(self.order) if np.array_equal(self.mul[z, :], self.mul[:, z]))

    def check_elements(self, S: Iterable[int]) -> None:
        for s in S:
            if not 0 <= int(s) < self.order:
                raise IndexOutOfRange(int(s), self.order)

    def to_dict(self) -> dict:
        d = {"order": self.order, "mul": self.mul.tolist()}
        if self.labels:
            d["labels"] = list(self.labels)
        return d

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def _check_associative(mul: np.ndarray, seed: int = 0) -> None:
    n = mul.shape[0]
    if n <= EAGER_ASSOCIATIVITY_LIMIT:
        # (x*y)*z vs x*(y*z), one x-slab at a time
        for x in range(n):
            left = mul[mul[x, :], :]          # left[y, z] = (x*y)*z
            right = mul[x, :][mul]            # right[y, z] = x*(y*z)
            bad = np.argwhere(left != right)
            if bad.size:
                y, z = bad[0]
                raise NotAssociative(x, int(y), int(z))
        return
    rng = np.random.default_rng(seed)
    xs, ys, zs = rng.integers(0, n, size=(3, SPOT_CHECK_TRIPLES))
    left = mul[mul[xs, ys], zs]
    right = mul[xs, mul[ys, zs]]
    bad = np.flatnonzero(left != right)
    if bad.size:
        i = bad[0]
        raise NotAssociative(int(xs[i]), int(ys[i]), int(zs[i]))


def group_from_cayley(table: Sequence[Sequence[int]] | np.ndarray, labels: Sequence[str] | None = None,
                      seed: int = 0) -> FiniteGroup:
    """Validate a Cayley table and locate identity and inverses."""
    try:
        mul = np.array(table, dtype=np.int64)
    except (ValueError, TypeError) as exc:
        raise InputError(f"Cayley table is not a rectangular integer array: {exc}") from None
    if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
        raise InputError(f"Cayley table must be square and non-empty, got shape {mul.shape}")
    n = mul.shape[0]
    if mul.min() < 0 or mul.max() >= n:
        bad = int(mul[(mul < 0) | (mul >= n)][0])
        raise IndexOutOfRange(bad, n)
    if labels is not None and len(labels) != n:
        raise InputError(f"{len(labels)} labels for a group of order {n}")
    ar = np.arange(n)
    ids = [e for e in range(n) if np.array_equal(mul[e, :], ar) and np.array_equal(mul[:, e], ar)]
    if not ids:
        raise NoIdentity()
    e = ids[0]
    inv = np.full(n, -1, dtype=np.int64)
    for x in range(n):
        cands = np.flatnonzero((mul[x, :] == e) & (mul[:, x] == e))
        if cands.size == 0:
            raise NoInverse(x)
        inv[x] = cands[0]
    _check_associative(mul, seed)
    return FiniteGroup(mul, inv, e, tuple(labels) if labels is not None else None)


def group_from_permutations(generators: Sequence[Permutation], degree: int | None = None,
                            limit: int = 100_000) -> FiniteGroup:
    """Regular representation of the permutation group generated by ``generators``.

    Elements are sorted by image tuple, so the identity is element 0. Labels are
    cycle strings on the points ``1..degree``.
    """
    if degree is None:
        if not generators:
            raise InputError("degree required for an empty generator list")
        degree = generators[0].degree
    pg = PermGroup(degree, generators)
    if pg.order > limit:
        raise SizeBoundExceeded("permutation group", pg.order, limit)
    elems = sorted(pg.elements())
    index = {p.image: i for i, p in enumerate(elems)}
    mul = np.array([[index[(p * q).image] for q in elems] for p in elems], dtype=np.int64)
    return group_from_cayley(mul, [p.cycle_string(offset=1) for p in elems])


def generate_subgroup(G: FiniteGroup, S: Iterable[int]) -> ElementSet:
    """Least subgroup containing ``S`` (breadth-first closure)."""
    gens = sorted({int(s) for s in S})
    G.check_elements(gens)
    mul = G.mul
    seen = np.zeros(G.order, dtype=bool)
    seen[G.identity] = True
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = int(mul[x, s])
                if not seen[y]:
                    seen[y] = True
                    nxt.append(y)
        frontier = nxt
    return tuple(int(i) for i in np.flatnonzero(seen))


def is_subgroup(G: FiniteGroup, H: Iterable[int]) -> bool:
    Hs = sorted(set(int(h) for h in H))
    if not Hs or G.identity not in Hs:
        return False
    mask = np.zeros(G.order, dtype=bool)
    mask[Hs] = True
    idx = np.array(Hs)
    prods = G.mul[np.ix_(G.inv[idx], idx)]
    return bool(mask[prods].all())


def generating_set(G: FiniteGroup, H: Iterable[int] | None = None) -> ElementSet:
    """Greedy generating set of ``H`` (default all of G): smallest missing index first."""
    target = set(range(G.order)) if H is None else set(int(h) for h in H)
    gens: list[int] = []
    cur = {G.identity}
    for x in sorted(target):
        if x not in cur:
            gens.append(x)
            cur = set(generate_subgroup(G, gens))
    return tuple(gens)


def commutator(G: FiniteGroup, a: int, b: int) -> int:
    """``a^-1 b^-1 a b``."""
    m, i = G.mul, G.inv
    return int(m[m[m[i[a], i[b]], a], b])


def derived_subgroup(G: FiniteGroup) -> ElementSet:
    m, i = G.mul, G.inv
    ar = np.arange(G.order)
    comms = m[m[m[i[ar][:, None], i[ar][None, :]], ar[:, None]], ar[None, :]]
    return generate_subgroup(G, np.unique(comms).tolist())


def is_normal(G: FiniteGroup, H: Iterable[int]) -> tuple[bool, tuple[int, int] | None]:
    """Whether ``H`` is closed under conjugation; witness ``(g, x)`` with ``g^-1 x g`` outside."""
    Hs = sorted(set(int(h) for h in H))
    mask = np.zeros(G.order, dtype=bool)
    mask[Hs] = True
    for g in range(G.order):
        for x in Hs:
            if not mask[G.conj(x, g)]:
                return False, (g, x)
    return True, None


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Elements ``(g, h)`` are indexed ``g * |H| + h``."""
    return semidirect_product(G, H, None)


def semidirect_product(G: FiniteGroup, H: FiniteGroup, action: Sequence[Sequence[int]] | None) -> FiniteGroup:
    """``G ⋊ H`` with ``(g1,h1)(g2,h2) = (g1·h1(g2), h1h2)``.

    ``action[h]`` is the image table of the automorphism of G attached to h;
    ``None`` means the trivial action.
    """
    n, k = G.order, H.order
    if action is None:
        act = np.tile(np.arange(n), (k, 1))
    else:
        act = np.array(action, dtype=np.int64)
        if act.shape != (k, n):
            raise InputError(f"action table must have shape ({k}, {n}), got {act.shape}")
        for h in range(k):
            a = act[h]
            if sorted(a.tolist()) != list(range(n)):
                raise ActionNotAutomorphism(h, None, None)
            bad = np.argwhere(a[G.mul] != G.mul[np.ix_(a, a)])
            if bad.size:
                x, y = bad[0]
                raise ActionNotAutomorphism(h, int(x), int(y))
        for h1 in range(k):
            for h2 in range(k):
                if not np.array_equal(act[H.mul[h1, h2]], act[h1][act[h2]]):
                    raise ActionNotHomomorphism(h1, h2)
    g1 = np.repeat(np.arange(n), k)          # element index -> g component
    h1 = np.tile(np.arange(k), n)              # element index -> h component
    # mul[(g1,h1),(g2,h2)] = (g1 * act[h1][g2], h1*h2)
    gpart = G.mul[g1[:, None], act[h1[:, None], g1[None, :]]]
    hpart = H.mul[h1[:, None], h1[None, :]]
    mul = gpart * k + hpart
    labels = None
    if G.labels or H.labels:
        labels = [f"({G.label(int(a))},{H.label(int(b))})" for a, b in zip(g1, h1)]
    return group_from_cayley(mul, labels)


def conjugation_perm(G: FiniteGroup, g: int) -> Permutation:
    """``x -> g^-1 x g`` as a permutation of the carrier."""
    m, i = G.mul, G.inv
    return Permutation(tuple(int(v) for v in m[m[i[g], :], g]))


def inner_automorphisms(G: FiniteGroup) -> PermGroup:
    gens = [conjugation_perm(G, g) for g in generating_set(G)]
    gens = sorted({p for p in gens if not p.is_identity()})
    return PermGroup(G.order, gens)


def find_isomorphism(G: FiniteGroup, H: FiniteGroup, limit: int = 16) -> tuple[int, ...] | None:
    """Brute-force isomorphism search for small groups; returns the image table."""
    if G.order != H.order:
        return None
    if G.order > limit:
        raise SizeBoundExceeded("isomorphism search", G.order, limit)
    gens = generating_set(G)
    gord = [G.element_order(x) for x in gens]
    hord = [H.element_order(y) for y in range(H.order)]
    if sorted(G.element_order(x) for x in range(G.order)) != sorted(hord):
        return None

    def extend(images):
        phi = {G.identity: H.identity}
        frontier = [G.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s, t in zip(gens, images):
                    y = G.op(x, s)
                    v = H.op(phi[x], t)
                    if y in phi:
                        if phi[y] != v:
                            return None
                    else:
                        phi[y] = v
                        nxt.append(y)
            frontier = nxt
        table = tuple(phi[x] for x in range(G.order))
        if len(set(table)) != G.order:
            return None
        return table

    def rec(i, images):
        if i == len(gens):
            return extend(images)
        for y in range(H.order):
            if hord[y] == gord[i] and y not in images:
                r = rec(i + 1, images + [y])
                if r is not None:
                    return r
        return None

    return rec(0, [])
