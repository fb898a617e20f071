"""Slow reference computations used to cross-check the fast routes.

Everything here works element by element through ``G.op`` and plain sets, with
no shared code beyond the group's multiplication.
"""

from __future__ import annotations

from itertools import combinations

from .grp.finite import FiniteGroup


def closure(G: FiniteGroup, S) -> frozenset:
    """Subgroup generated by S, by repeated multiplication until nothing new appears."""
    H = {G.identity} | set(S)
    while True:
        new = {G.op(a, b) for a in H for b in H} - H
        if not new:
            return frozenset(H)
        H |= new


def conjugacy_blocks(G: FiniteGroup) -> list[int]:
    """Block id of each element: the least member of its conjugacy class."""
    out = []
    for x in range(G.order):
        cls = {G.op(G.op(G.inverse(g), x), g) for g in range(G.order)}
        out.append(min(cls))
    return out


def commutator_set(G: FiniteGroup, blocks) -> frozenset:
    return frozenset(G.op(G.inverse(a), b)
                     for a in range(G.order) for b in range(G.order) if blocks[a] == blocks[b])


def power_chain(G: FiniteGroup, X) -> list[frozenset]:
    """``X, X^2, …`` up to the first repetition."""
    chain = [frozenset(X)]
    while True:
        nxt = frozenset(G.op(a, b) for a in chain[-1] for b in X)
        if nxt == chain[-1]:
            return chain
        chain.append(nxt)


def derived(G: FiniteGroup) -> frozenset:
    comms = {G.op(G.op(G.inverse(a), G.inverse(b)), G.op(a, b))
             for a in range(G.order) for b in range(G.order)}
    return closure(G, comms)


def is_normal(G: FiniteGroup, H) -> bool:
    H = set(H)
    return all(G.op(G.op(G.inverse(g), h), g) in H for g in range(G.order) for h in H)


def symmetric_subsets_with_identity(G: FiniteGroup):
    """Every inverse-closed subset containing the identity."""
    pairs = sorted({frozenset((x, G.inverse(x))) for x in range(G.order) if x != G.identity},
                   key=min)
    for k in range(len(pairs) + 1):
        for chosen in combinations(pairs, k):
            yield frozenset({G.identity}.union(*chosen))
