"""Chains of fresh generators whose windows ``[a_n, f(a_n))`` nest inside cuts.

The window of a block is the set of its own points in ``[a_n, f(a_n))``, one per
f-orbit. Block n is placed so that its window sits strictly between ``C-(a_m)``
and ``C+(a_m)`` for every earlier block m, and inside ``(a_m, f(a_m))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..errors import ArcTooCrowded, DepthExhausted
from .arcs import Arc
from .cvspace import CVStructure, direct_sum, f_orbits, free_algebra

MAX_CHAIN_LENGTH = 16


@dataclass
class ChainBlock:
    generator: int                 # a_n as a vector of the extended space
    window: list[int]              # block points in [a_n, f(a_n)), in arc order
    lower: list[int]               # C-(a_n)
    upper: list[int]               # C+(a_n)


@dataclass
class ChainResult:
    structure: CVStructure
    blocks: list[ChainBlock]
    checks: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_json(self) -> dict:
        th = self.structure.angles
        fmt = lambda x: f"{th[x].numerator}/{th[x].denominator}"
        return {
            "points": [b.generator for b in self.blocks],
            "angles": [fmt(b.generator) for b in self.blocks],
            "blocks": [{"generator": b.generator, "window": b.window, "lower": b.lower, "upper": b.upper}
                       for b in self.blocks],
            "checks": self.checks,
            "ok": self.ok,
        }


def _gap_inside(occupied: list[Fraction], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Widest open sub-interval of (lo, hi) free of occupied points (lifted reals)."""
    inner = sorted(t for t in occupied if lo < t < hi)
    edges = [lo] + inner + [hi]
    best = max(range(len(edges) - 1), key=lambda i: (edges[i + 1] - edges[i], -i))
    a, b = edges[best], edges[best + 1]
    if a >= b:
        raise ArcTooCrowded("empty interval")
    return a, b


def nested_chain(V: CVStructure, length: int, depth: int = 1,
                 splits: Sequence[int] | None = None, max_length: int = MAX_CHAIN_LENGTH) -> ChainResult:
    """Append ``length`` fresh free(1, depth) blocks with nested windows.

    ``splits[n]`` is the size of ``C-(a_n)`` among the window points after
    ``a_n``; the default splits them in half.
    """
    if length < 1:
        raise DepthExhausted(None, "chain length must be positive")
    if length > max_length:
        raise DepthExhausted(None, f"chain length {length} exceeds the budget {max_length}")
    m = V.period
    step = Fraction(1, m)
    U = V
    blocks: list[ChainBlock] = []
    # interval for the next window, as lifted reals [base, base + 1)
    lo = hi = None
    for n in range(length):
        F = free_algebra(1, depth, m)
        orbits = f_orbits(F)
        shift = U.dimension
        U, _, _ = direct_sum(U, F)
        orbs = [[x << shift for x in o] for o in orbits]
        existing = list(U.angles.values())
        if lo is None:
            if existing:
                # widest gap between consecutive existing angles (never wider than 1/m)
                pts = sorted(existing)
                gaps = [(pts[(i + 1) % len(pts)] + (1 if i + 1 == len(pts) else 0) - pts[i], i)
                        for i in range(len(pts))]
                g, i = max(gaps, key=lambda p: (p[0], -p[1]))
                lo, hi = pts[i], pts[i] + g
            else:
                lo, hi = Fraction(0), step
            occupied = []
        else:
            occupied = [t + k for t in existing for k in (0, 1, 2)]
        a, b = _gap_inside(occupied, lo, hi) if occupied else (lo, hi)
        if b - a > step:
            b = a + step
        # one point per orbit in the window, the generator first
        gen = orbs[0][0]
        K = len(orbs)
        angles = dict(U.angles)
        window = []
        for k, orb in enumerate(orbs):
            t = a + (b - a) * (k + 1) / (K + 1)
            for j, x in enumerate(orb):
                angles[x] = (t + j * step) % 1
            window.append(orb[0])
        U = U.with_angles(angles)
        U.depth_bound = depth
        rest = window[1:]
        k = len(rest) // 2 if splits is None else int(splits[n])
        if not 0 <= k <= len(rest):
            raise DepthExhausted(None, f"split {k} outside 0..{len(rest)}")
        lower, upper = rest[:k], rest[k:]
        blocks.append(ChainBlock(gen, window, lower, upper))
        # next window lies strictly between C- and C+ of this block
        ta = angles[gen]
        base = a + (b - a) / (K + 1)            # lifted angle of the generator
        lifted = {x: base + ((angles[x] - ta) % 1) for x in window}
        lo = lifted[lower[-1]] if lower else base
        hi = lifted[upper[0]] if upper else base + step
        if lo >= hi:
            raise ArcTooCrowded("cut leaves no room")
    res = ChainResult(U, blocks)
    res.checks = verify_chain(U, blocks)
    return res


def verify_chain(U: CVStructure, blocks: list[ChainBlock]) -> list[dict]:
    """Every later window lies in ``(a_m, f(a_m))`` strictly between the cut parts."""
    th = U.angles
    out = []
    for m_, bm in enumerate(blocks):
        arc = Arc(th[bm.generator], th[U.f[bm.generator]])
        for n, bn in enumerate(blocks):
            if n <= m_:
                continue
            inside = all(th[x] in arc for x in bn.window)
            pos = [arc.position(th[x]) for x in bn.window]
            low = [arc.position(th[c]) for c in bm.lower]
            up = [arc.position(th[c]) for c in bm.upper]
            below = all(c < p for c in low for p in pos)
            above = all(p < c for c in up for p in pos)
            out.append({"m": m_, "n": n, "insideArc": inside, "aboveLower": below, "belowUpper": above,
                        "ok": inside and below and above})
    return out
