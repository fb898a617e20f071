"""Amalgamation of class-C structures over a common substructure.

``V3`` is ``V1 ⊕_{V0} V2``: the basis of V1 followed by a complement of
``e2(V0)`` in V2. f is the union of the transported maps, then extended in
stages by new cycles through fresh basis vectors on mixed sums, and the angles
are merged so both inclusions keep the circular order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ..errors import (
    DepthExhausted,
    EmbeddingNotInjective,
    EmbeddingsDisagreeOnV0,
    InputError,
    SizeBoundExceeded,
)
from .cvspace import CVStructure, apply_linear, check_class_C, direct_sum, embed_circle, f2_rank, f_orbits, free_algebra
from .terms import FSum, Var

MAX_STAGES = 3
DEFAULT_AMALGAM_BOUND = 512


@dataclass
class AmalgamResult:
    structure: CVStructure
    iota1: list[int]            # images of V1 basis vectors in V3
    iota2: list[int]            # images of V2 basis vectors in V3
    report: dict

    @property
    def ok(self) -> bool:
        r = self.report
        return r["commutes"] and r["orderPreserved"] and r["fPreserved"] and r["classC"]["ok"]

    def to_json(self) -> dict:
        return {"structure": self.structure.to_json(), "iota1": self.iota1, "iota2": self.iota2,
                "report": self.report, "ok": self.ok}


class _Reducer:
    """Incremental F2 elimination that remembers how each pivot was formed."""

    def __init__(self):
        self.pivots: dict[int, tuple[int, int]] = {}   # top bit -> (vector, combination)

    def reduce(self, v: int) -> tuple[int, int]:
        comb = 0
        while v:
            h = v.bit_length() - 1
            if h not in self.pivots:
                break
            pv, pc = self.pivots[h]
            v ^= pv
            comb ^= pc
        return v, comb

    def add(self, v: int, label: int) -> bool:
        r, comb = self.reduce(v)
        if not r:
            return False
        self.pivots[r.bit_length() - 1] = (r, comb ^ label)
        return True

    def coordinates(self, v: int) -> int:
        r, comb = self.reduce(v)
        if r:
            raise InputError("vector outside the span")
        return comb


def _cyclic_descents(values: Sequence[Fraction]) -> int:
    n = len(values)
    return sum(1 for i in range(n) if values[i] > values[(i + 1) % n])


def _order_preserved(src: Mapping[int, Fraction], dst: Mapping[int, Fraction], images: Mapping[int, int]) -> bool:
    """The angled points of src keep their cyclic order under ``images``."""
    pts = sorted((x for x in src if x in images), key=lambda x: src[x])
    if len(pts) < 3:
        return True
    vals = [dst[images[x]] for x in pts]
    return len(set(vals)) == len(vals) and _cyclic_descents(vals) == 1


def _check_embedding(V0: CVStructure, V: CVStructure, e: Sequence[int], side: int) -> None:
    if len(e) != V0.dimension:
        raise InputError(f"embedding {side} needs {V0.dimension} images, got {len(e)}")
    top = 1 << V.dimension
    if any(not 0 <= y < top for y in e):
        raise InputError(f"embedding {side} leaves the target space")
    if f2_rank(e) != V0.dimension:
        raise EmbeddingNotInjective(f"embedding {side} has rank {f2_rank(e)} < {V0.dimension}")
    for x in sorted(V0.f):
        if x == 0:
            continue
        ex = apply_linear(e, x)
        want = apply_linear(e, V0.f[x])
        if V.f.get(ex) != want:
            raise EmbeddingsDisagreeOnV0(x, f"embedding {side} does not commute with f")
    images = {x: apply_linear(e, x) for x in V0.angles}
    for x, y in images.items():
        if y not in V.angles:
            raise EmbeddingsDisagreeOnV0(x, f"embedding {side} drops the angle")
    if not _order_preserved(V0.angles, V.angles, images):
        raise EmbeddingsDisagreeOnV0(min(images), f"embedding {side} breaks the circular order")


def _merge_angles(V1: CVStructure, V2: CVStructure, i1: Sequence[int], i2: Sequence[int]) -> dict[int, Fraction]:
    """Angles on ``i1(V1) ∪ i2(V2)``: V1 keeps its angles, V2-only points go
    into the matching gaps between shared points, after the V1 points there."""
    m = V1.period
    step = Fraction(1, m)
    theta = {apply_linear(i1, x): a for x, a in V1.angles.items()}
    anchors, loose = [], []
    for y in sorted(V2.angles):
        z = apply_linear(i2, y)
        if z in theta:
            anchors.append((V2.angles[y], theta[z]))
        else:
            loose.append((V2.angles[y], z))
    if not loose:
        return theta
    if anchors:
        anchors.sort()
        if _cyclic_descents([a1 for _, a1 in anchors]) > 1 or len({a1 for _, a1 in anchors}) < len(anchors):
            raise EmbeddingsDisagreeOnV0(None, "the two sides order the shared points differently")
        K = len(anchors)
        own = [t for t in theta.values() if t not in {a1 for _, a1 in anchors}]
        per_gap: dict[int, list[tuple[Fraction, int]]] = {}
        for a2, z in loose:
            # gap i runs from anchor i to anchor i+1 in the V2 order
            i = max((k for k in range(K) if anchors[k][0] < a2), default=K - 1)
            per_gap.setdefault(i, []).append(((a2 - anchors[i][0]) % 1, z))
        for i, pts in per_gap.items():
            start = anchors[i][1]
            length = (anchors[(i + 1) % K][1] - start) % 1 or Fraction(1)
            inner = [(t - start) % 1 for t in own]
            lo = max((p for p in inner if 0 < p < length), default=Fraction(0))
            pts.sort()
            for k, (_, z) in enumerate(pts):
                theta[z] = (start + lo + (length - lo) * (k + 1) / (len(pts) + 1)) % 1
        return theta
    if not theta:
        theta.update({z: a2 for a2, z in loose})
        return theta
    # no shared points: squeeze the V2 residues into the widest V1 gap
    pts = sorted(theta.values())
    gaps = [((pts[(i + 1) % len(pts)] - pts[i]) % 1 or Fraction(1), i) for i in range(len(pts))]
    width, i = max(gaps, key=lambda g: (g[0], -g[1]))
    lo = pts[i]
    width = min(width, step)
    residues = sorted({a2 % step for a2, _ in loose})
    rank = {r: k for k, r in enumerate(residues)}
    for a2, z in loose:
        r = a2 % step
        level = (a2 - r) / step
        theta[z] = (lo + width * (rank[r] + 1) / (len(residues) + 1) + level * step) % 1
    return theta


def amalgamate(V0: CVStructure, V1: CVStructure, V2: CVStructure, e1: Sequence[int], e2: Sequence[int],
               depth: int = 1, stages: int = 1, bound: int = DEFAULT_AMALGAM_BOUND) -> AmalgamResult:
    """Amalgamate V1 and V2 over the images ``e1``, ``e2`` of the V0 basis."""
    if not V0.period == V1.period == V2.period:
        raise InputError("periods differ")
    if not 0 <= stages <= MAX_STAGES:
        raise DepthExhausted(None, f"{stages} stages requested, at most {MAX_STAGES} supported")
    m = V0.period
    e1, e2 = [int(v) for v in e1], [int(v) for v in e2]
    _check_embedding(V0, V1, e1, 1)
    _check_embedding(V0, V2, e2, 2)
    n0, n1, n2 = V0.dimension, V1.dimension, V2.dimension

    # basis of V2 adapted to e2(V0): first the images, then a greedy complement
    red = _Reducer()
    for i, v in enumerate(e2):
        red.add(v, 1 << i)
    complement = []
    for i in range(n2):
        if red.add(1 << i, 1 << (n0 + len(complement))):
            complement.append(1 << i)
    n3 = n1 + len(complement)
    iota1 = [1 << i for i in range(n1)]
    iota2 = []
    for i in range(n2):
        c = red.coordinates(1 << i)
        img = apply_linear(e1, c & ((1 << n0) - 1)) ^ ((c >> n0) << n1)
        iota2.append(img)
    stage0 = n3

    f: dict[int, int] = {}
    for x, y in V1.f.items():
        f[apply_linear(iota1, x)] = apply_linear(iota1, y)
    for x, y in V2.f.items():
        u, w = apply_linear(iota2, x), apply_linear(iota2, y)
        if f.get(u, w) != w:
            raise EmbeddingsDisagreeOnV0(u, "the two f maps differ on a shared vector")
        f[u] = w
    theta = _merge_angles(V1, V2, iota1, iota2)

    # stagewise extension: each mixed sum starts a new cycle through fresh vectors
    span1 = _Reducer()
    for v in e1:
        span1.add(v, 0)
    span2 = _Reducer()
    for v in e2:
        span2.add(v, 0)
    reps1 = [apply_linear(iota1, o[0]) for o in f_orbits(V1) if span1.reduce(o[0])[0]]
    reps2 = [apply_linear(iota2, o[0]) for o in f_orbits(V2) if span2.reduce(o[0])[0]]
    frontier = reps1
    added = []
    for s in range(stages):
        mixed = sorted({a ^ b for a in frontier for b in reps2} - set(f))
        if s > 0:
            mixed = sorted(set(mixed) | ({a ^ b for a in frontier for b in reps1} - set(f)))
            mixed = [z for z in mixed if z]
        if n3 + (m - 1) * len(mixed) > bound:
            raise SizeBoundExceeded("amalgam dimension", n3 + (m - 1) * len(mixed), bound)
        for z in mixed:
            cycle = [z] + [1 << (n3 + j) for j in range(m - 1)]
            n3 += m - 1
            for j in range(m):
                f[cycle[j]] = cycle[(j + 1) % m]
        added.append(len(mixed))
        frontier = mixed
    basis = tuple(V1.basis) + tuple(f"{V2.basis[(c.bit_length() - 1)]}'" for c in complement) \
        + tuple(f"w{k}" for k in range(n3 - stage0))
    raw = CVStructure(n3, basis, m, f, {}, depth)
    V3 = embed_circle(raw, theta)
    V3.depth_bound = depth

    shown = range(1, 1 << n0) if n0 <= 16 else (1 << i for i in range(n0))
    commutes = all(apply_linear(iota1, apply_linear(e1, v)) == apply_linear(iota2, apply_linear(e2, v))
                   for v in shown)
    order_ok = _order_preserved(V1.angles, V3.angles, {x: apply_linear(iota1, x) for x in V1.angles}) \
        and _order_preserved(V2.angles, V3.angles, {x: apply_linear(iota2, x) for x in V2.angles}) \
        and _order_preserved(_union_angles(V1, V2, iota1, iota2, V3), V3.angles,
                             {z: z for z in V3.angles})
    f_ok = all(V3.f.get(apply_linear(iota1, x)) == apply_linear(iota1, y) for x, y in V1.f.items()) \
        and all(V3.f.get(apply_linear(iota2, x)) == apply_linear(iota2, y) for x, y in V2.f.items())
    report = {
        "stage0Dimension": stage0,
        "dimension": n3,
        "stages": stages,
        "freshCycles": added,
        "commutes": commutes,
        "orderPreserved": order_ok,
        "fPreserved": f_ok,
        "classC": check_class_C(V3, depth),
    }
    return AmalgamResult(V3, iota1, iota2, report)


def _union_angles(V1, V2, iota1, iota2, V3) -> dict[int, Fraction]:
    # points coming from either side, at their V3 angles
    pts = {apply_linear(iota1, x) for x in V1.angles} | {apply_linear(iota2, x) for x in V2.angles}
    return {z: V3.angles[z] for z in pts}


# -- random instances ------------------------------------------------------------


def _shift_term(t, s: int, m: int):
    if isinstance(t, Var):
        return Var(t.var, (t.power + s) % m)
    return FSum(t.power, frozenset(_shift_term(u, s, m) for u in t.operands))


def term_shift(V: CVStructure, s: int) -> list[int]:
    """Images of the basis under the substitution ``x -> f^s(x)`` of a free algebra."""
    index = {t: i for i, t in enumerate(V.basis)}
    return [1 << index[_shift_term(t, s, V.period)] for t in V.basis]


def _copy(V: CVStructure, sigma: Sequence[int], delta: Fraction) -> CVStructure:
    """The structure carried over along the basis permutation sigma, angles rotated."""
    f = {apply_linear(sigma, x): apply_linear(sigma, y) for x, y in V.f.items()}
    inv = {apply_linear(sigma, 1 << i): i for i in range(V.dimension)}
    basis = tuple(V.basis[inv[1 << i]] for i in range(V.dimension))
    angles = {apply_linear(sigma, x): (a + delta) % 1 for x, a in V.angles.items()}
    return CVStructure(V.dimension, basis, V.period, f, angles, V.depth_bound)


def _random_angle(rng: random.Random) -> Fraction:
    return Fraction(rng.randrange(1, 997), 997)


def _extend(rng: random.Random, A: CVStructure, sigma: list[int]) -> tuple[CVStructure, list[int]]:
    """A, optionally plus a fresh embedded free(1, 1), in random block order."""
    if rng.random() < 0.25 and A.dimension:
        return A, sigma
    F = free_algebra(1, 1, A.period)
    first = rng.random() < 0.5
    if first:
        U, _, inA = direct_sum(F, A)
    else:
        U, inA, _ = direct_sum(A, F)
    emb = [apply_linear(inA, v) for v in sigma]
    residues = {a % Fraction(1, A.period) for a in A.angles.values()}
    fresh = f_orbits(F)[0][0] << (0 if first else A.dimension)
    while True:
        t = _random_angle(rng)
        if t % Fraction(1, A.period) not in residues:
            break
    return embed_circle(U, {fresh: t}), emb


def random_triple(rng: random.Random) -> tuple[CVStructure, CVStructure, CVStructure, list[int], list[int]]:
    """A seeded instance ``(V0, V1, V2, e1, e2)`` of depth-1 structures."""
    if rng.random() < 0.3:
        V0 = CVStructure(0, (), 3, {}, {}, 1)
    else:
        F = free_algebra(1, 1)
        orbs = f_orbits(F)
        seeds = {orbs[0][0]: _random_angle(rng)}
        if rng.random() < 0.5:
            seeds[orbs[1][0]] = _random_angle(rng)
            if seeds[orbs[1][0]] % Fraction(1, 3) == seeds[orbs[0][0]] % Fraction(1, 3):
                del seeds[orbs[1][0]]
        V0 = embed_circle(F, seeds)
    out = []
    for _ in range(2):
        if V0.dimension:
            sigma = term_shift(V0, rng.randrange(V0.period))
        else:
            sigma = []
        A = _copy(V0, sigma, _random_angle(rng))
        out.append(_extend(rng, A, sigma))
    (V1, e1), (V2, e2) = out
    return V0, V1, V2, e1, e2
