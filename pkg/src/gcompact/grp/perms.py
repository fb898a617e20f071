"""Permutations and permutation groups.

Composition is right-to-left: ``(p * q)(x) == p(q(x))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from ..errors import DegreeMismatch, InputError


@dataclass(frozen=True, order=True)
class Permutation:
    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise InputError(f"not a permutation: {self.image}")

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        img = list(range(degree))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a] = b
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.image)

    def __call__(self, x: int) -> int:
        return self.image[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise DegreeMismatch(self.degree, other.degree)
        img = self.image
        return Permutation(tuple(img[j] for j in other.image))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.image))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(self.degree):
            if i in seen or self.image[i] == i:
                continue
            cyc = [i]
            seen.add(i)
            j = self.image[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self.image[j]
            out.append(tuple(cyc))
        return out

    def cycle_string(self, offset: int = 0) -> str:
        cs = self.cycles()
        if not cs:
            return "()"
        return "".join("(" + " ".join(str(c + offset) for c in cyc) + ")" for cyc in cs)

    def __repr__(self):
        return f"Permutation({self.cycle_string()})"


def _mul(p: tuple, q: tuple) -> tuple:
    return tuple(p[j] for j in q)


def _inv(p: tuple) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


@dataclass
class StabChain:
    """Base, strong generators per level and Schreier-vector style transversals.

    ``transversals[i][pt]`` maps ``base[i]`` to ``pt`` and fixes ``base[:i]``.
    """

    degree: int
    base: list[int] = field(default_factory=list)
    strong: list[list[tuple]] = field(default_factory=list)
    transversals: list[dict[int, tuple]] = field(default_factory=list)

    @property
    def order(self) -> int:
        n = 1
        for t in self.transversals:
            n *= len(t)
        return n

    def strip(self, g: tuple) -> tuple[tuple, int]:
        for i, b in enumerate(self.base):
            beta = g[b]
            u = self.transversals[i].get(beta)
            if u is None:
                return g, i
            g = _mul(_inv(u), g)
        return g, len(self.base)


def _orbit_transversal(b: int, gens: list[tuple], degree: int) -> dict[int, tuple]:
    ident = tuple(range(degree))
    trans = {b: ident}
    queue = [b]
    for pt in queue:
        u = trans[pt]
        for g in gens:
            q = g[pt]
            if q not in trans:
                trans[q] = _mul(g, u)
                queue.append(q)
    return trans


def _build_chain(degree: int, gens: list[tuple]) -> StabChain:
    ident = tuple(range(degree))
    gens = sorted({g for g in gens if g != ident})
    chain = StabChain(degree)
    if not gens:
        return chain

    def moved(g):
        return next(i for i in range(degree) if g[i] != i)

    def extend_base(g):
        # ensure g moves some base point
        if all(g[b] == b for b in chain.base):
            chain.base.append(moved(g))
            chain.strong.append([])
            chain.transversals.append({chain.base[-1]: ident})

    for g in gens:
        extend_base(g)
        chain.strong[0].append(g)
    chain.transversals[0] = _orbit_transversal(chain.base[0], chain.strong[0], degree)

    # Deterministic Schreier-Sims, processing levels bottom-up.
    i = len(chain.base) - 1
    while i >= 0:
        restart = False
        b = chain.base[i]
        trans = _orbit_transversal(b, chain.strong[i], degree)
        chain.transversals[i] = trans
        for pt in sorted(trans):
            u = trans[pt]
            for s in chain.strong[i]:
                us = _mul(s, u)
                schreier = _mul(_inv(trans[us[b]]), us)
                if schreier == ident:
                    continue
                # sift through levels below i
                h, j = _sift_from(chain, schreier, i + 1)
                if h != ident:
                    if j == len(chain.base):
                        chain.base.append(moved(h))
                        chain.strong.append([])
                        chain.transversals.append({chain.base[-1]: ident})
                    for level in range(i + 1, j + 1):
                        chain.strong[level].append(h)
                    i = j
                    restart = True
                    break
            if restart:
                break
        if not restart:
            i -= 1
    for lvl in range(len(chain.base)):
        chain.transversals[lvl] = _orbit_transversal(chain.base[lvl], chain.strong[lvl], degree)
    return chain


def _sift_from(chain: StabChain, g: tuple, start: int) -> tuple[tuple, int]:
    for i in range(start, len(chain.base)):
        u = chain.transversals[i].get(g[chain.base[i]])
        if u is None:
            return g, i
        g = _mul(_inv(u), g)
    return g, len(chain.base)


class PermGroup:
    """Group generated by permutations of ``{0, ..., degree-1}``.

    The stabiliser chain is built on first use (see :func:`schreier_sims`).
    """

    def __init__(self, degree: int, generators: Iterable[Permutation] = ()):
        self.degree = degree
        gens = list(generators)
        for g in gens:
            if g.degree != degree:
                raise DegreeMismatch(degree, g.degree)
        self.generators: tuple[Permutation, ...] = tuple(gens)
        self._chain: StabChain | None = None

    @property
    def chain(self) -> StabChain:
        if self._chain is None:
            self._chain = _build_chain(self.degree, [g.image for g in self.generators])
        return self._chain

    @property
    def order(self) -> int:
        return self.chain.order

    def __contains__(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            raise DegreeMismatch(self.degree, p.degree)
        h, level = self.chain.strip(p.image)
        return level == len(self.chain.base) and h == tuple(range(self.degree))

    def contains(self, p: Permutation) -> bool:
        return p in self

    def elements(self, limit: int = 1_000_000) -> Iterator[Permutation]:
        """All elements in a deterministic order (product of transversal reps)."""
        if self.order > limit:
            from ..errors import SizeBoundExceeded
            raise SizeBoundExceeded("group enumeration", self.order, limit)
        chain = self.chain
        reps = [[t[k] for k in sorted(t)] for t in chain.transversals]
        ident = tuple(range(self.degree))

        def rec(level, acc):
            if level == len(reps):
                yield Permutation(acc)
                return
            for u in reps[level]:
                yield from rec(level + 1, _mul(acc, u))

        yield from rec(0, ident)

    def orbit(self, point: int) -> list[int]:
        return sorted(_orbit_transversal(point, [g.image for g in self.generators], self.degree))

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(g in other for g in self.generators)

    def __eq__(self, other):
        if not isinstance(other, PermGroup) or other.degree != self.degree:
            return NotImplemented
        return self.order == other.order and self.is_subgroup_of(other)

    __hash__ = None

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, ngens={len(self.generators)})"


def schreier_sims(group: PermGroup) -> PermGroup:
    """Return ``group`` with its base and strong generating set computed."""
    group.chain
    return group


def closure(degree: int, generators: Iterable[Permutation]) -> list[Permutation]:
    """Explicit closure of the generators, sorted. Brute force; degree <= 10."""
    ident = Permutation.identity(degree)
    gens = list(generators)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g * x
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)
