"""F2-spaces with a partial period-m map f and a circular order given by angles.

Vectors are Python ints read as bitmasks over the basis. The circular order is
``R(x, y, z)`` iff the angles of x, y, z occur in that anticlockwise order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import (
    AngleCollision,
    DepthExhausted,
    InputError,
    OrbitIncomplete,
    ParseError,
    PeriodViolation,
    SizeBoundExceeded,
)
from .terms import DEFAULT_TERM_BOUND, FSum, FTerm, Var, enum_terms

DEFAULT_DIMENSION_BOUND = 10**4
TRIPLE_SCAN_LIMIT = 400


# -- linear algebra over F2 --------------------------------------------------


def f2_rank(vectors: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    for v in vectors:
        while v:
            h = v.bit_length() - 1
            if h not in pivots:
                pivots[h] = v
                break
            v ^= pivots[h]
    return len(pivots)


def apply_linear(images: Sequence[int], v: int) -> int:
    """Image of ``v`` under the linear map sending basis vector i to ``images[i]``."""
    out, i = 0, 0
    while v:
        if v & 1:
            out ^= images[i]
        v >>= 1
        i += 1
    return out


def bits(v: int) -> list[int]:
    out, i = [], 0
    while v:
        if v & 1:
            out.append(i)
        v >>= 1
        i += 1
    return out


# -- structure ---------------------------------------------------------------


@dataclass
class CVStructure:
    dimension: int
    basis: tuple = ()
    period: int = 3
    f: dict[int, int] = field(default_factory=dict)
    angles: dict[int, Fraction] = field(default_factory=dict)
    depth_bound: int | None = None

    def __post_init__(self):
        if self.period < 3:
            raise InputError("period must be at least 3")
        if not self.basis:
            self.basis = tuple(f"b{i}" for i in range(self.dimension))
        if len(self.basis) != self.dimension:
            raise InputError("one label per basis vector required")
        top = 1 << self.dimension
        for x, y in self.f.items():
            if not (0 <= x < top and 0 <= y < top):
                raise InputError(f"f entry {x} -> {y} outside the space")
        for x, a in self.angles.items():
            if not 0 < x < top:
                raise InputError(f"angle on vector {x} outside the nonzero carrier")
            if not 0 <= a < 1:
                raise InputError(f"angle {a} outside [0, 1)")

    def apply_f(self, v: int) -> int:
        if v == 0:
            return 0
        try:
            return self.f[v]
        except KeyError:
            raise DepthExhausted(v) from None

    def f_power(self, v: int, k: int) -> int:
        for _ in range(k):
            v = self.apply_f(v)
        return v

    def R(self, x: int, y: int, z: int) -> bool:
        a, b, c = self.angles[x], self.angles[y], self.angles[z]
        if a == b or b == c or a == c:
            return False
        return (b - a) % 1 < (c - a) % 1

    def evaluate(self, term: FTerm, a: int) -> int:
        """Value of a one-variable term at ``a``."""
        if isinstance(term, Var):
            return self.f_power(a, term.power)
        s = 0
        for t in term.operands:
            s ^= self.evaluate(t, a)
        return self.f_power(s, term.power)

    def with_angles(self, angles: Mapping[int, Fraction]) -> "CVStructure":
        return replace(self, f=dict(self.f), angles=dict(angles))

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "period": self.period,
            "depthBound": self.depth_bound,
            "basis": [str(b) for b in self.basis],
            "f": [[x, self.f[x]] for x in sorted(self.f)],
            "angles": [[x, f"{a.numerator}/{a.denominator}"] for x, a in sorted(self.angles.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CVStructure":
        try:
            angles = {int(x): Fraction(a) for x, a in data.get("angles", [])}
            return cls(int(data["dimension"]), tuple(data.get("basis", ())), int(data.get("period", 3)),
                       {int(x): int(y) for x, y in data.get("f", [])}, angles, data.get("depthBound"))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"malformed structure: {exc}") from None


def load_cvstructure(path: str | Path) -> CVStructure:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(path, exc.strerror or "cannot read file") from None
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.msg, exc.lineno) from None
    return CVStructure.from_json(data)


# -- free algebras -----------------------------------------------------------


def free_algebra(generators: int, depth: int, period: int = 3,
                 bound: int = DEFAULT_DIMENSION_BOUND) -> CVStructure:
    """Span of the terms of depth <= ``depth``, with f on basis terms and on the
    sums whose f-image is still a term."""
    terms = enum_terms(generators, depth, period, max(bound, 1))
    if len(terms) > bound:
        raise SizeBoundExceeded("free algebra dimension", len(terms), bound)
    index = {t: i for i, t in enumerate(terms)}
    f: dict[int, int] = {}
    for t, i in index.items():
        if isinstance(t, Var):
            f[1 << i] = 1 << index[Var(t.var, (t.power + 1) % period)]
        elif t.power + 1 < period:
            f[1 << i] = 1 << index[FSum(t.power + 1, t.operands)]
        else:
            # f^m is the identity on the bare sum
            f[1 << i] = sum(1 << index[s] for s in t.operands)
    for t, i in index.items():
        if isinstance(t, FSum) and t.power == 1:
            f[sum(1 << index[s] for s in t.operands)] = 1 << i
    return CVStructure(len(terms), tuple(terms), period, f, {}, depth)


def direct_sum(V: CVStructure, W: CVStructure) -> tuple[CVStructure, list[int], list[int]]:
    """``V ⊕ W`` with f and angles defined blockwise; returns the two inclusions."""
    if V.period != W.period:
        raise InputError("periods differ")
    s = V.dimension
    f = dict(V.f)
    f.update({x << s: y << s for x, y in W.f.items()})
    angles = dict(V.angles)
    angles.update({x << s: a for x, a in W.angles.items()})
    depth = None if V.depth_bound is None or W.depth_bound is None else min(V.depth_bound, W.depth_bound)
    U = CVStructure(V.dimension + W.dimension, tuple(V.basis) + tuple(W.basis), V.period, f, angles, depth)
    return U, [1 << i for i in range(V.dimension)], [1 << (s + i) for i in range(W.dimension)]


# -- orbits and the circle embedding --------------------------------------------


def orbit_of(V: CVStructure, x: int) -> list[int] | None:
    """``[x, f(x), …]`` if the cycle closes; ``None`` if f runs out first."""
    orb = [x]
    y = x
    for _ in range(V.period):
        if y not in V.f:
            return None
        y = V.f[y]
        if y == x:
            return orb
        orb.append(y)
    return orb + [None]   # no return within the period


def f_orbits(V: CVStructure) -> list[list[int]]:
    """Cycles of f on the nonzero part of its domain, each starting at its least vector."""
    seen: set[int] = set()
    out = []
    for x in sorted(V.f):
        if x == 0 or x in seen:
            continue
        orb = orbit_of(V, x)
        if orb is None:
            raise OrbitIncomplete(x)
        if orb[-1] is None or len(orb) != V.period:
            raise PeriodViolation(x, len(orb) if orb[-1] is not None else None, V.period)
        r = orb.index(min(orb))
        orb = orb[r:] + orb[:r]
        seen.update(orb)
        out.append(orb)
    out.sort(key=lambda o: o[0])
    return out


def _residue(a: Fraction, m: int) -> Fraction:
    return a % Fraction(1, m)


def embed_circle(V: CVStructure, seed_angles: Mapping[int, Fraction | str] | None = None) -> CVStructure:
    """Give every f-orbit angles ``θ + j/m``; returns a new structure.

    Existing angles and seeds fix θ for their orbits. Unseeded orbits are
    spread evenly when nothing is seeded, and otherwise placed one by one at the
    midpoint of the widest free residue gap.
    """
    m = V.period
    step = Fraction(1, m)
    seeds = dict(V.angles)
    for x, a in (seed_angles or {}).items():
        seeds[int(x)] = Fraction(a) % 1
    orbits = f_orbits(V)
    where = {x: (k, j) for k, orb in enumerate(orbits) for j, x in enumerate(orb)}
    theta: dict[int, Fraction] = {}
    witness: dict[int, int] = {}
    for x in sorted(seeds):
        if x not in where:
            raise OrbitIncomplete(x)
        k, j = where[x]
        t = (seeds[x] - j * step) % 1
        if k in theta and theta[k] != t:
            raise AngleCollision(witness[k], x)
        theta[k] = t
        witness.setdefault(k, x)
    used: dict[Fraction, int] = {}
    for k in sorted(theta):
        r = _residue(theta[k], m)
        if r in used:
            raise AngleCollision(orbits[used[r]][0], orbits[k][0])
        used[r] = k
    free = [k for k in range(len(orbits)) if k not in theta]
    if free and not theta:
        K = len(orbits)
        for k in free:
            theta[k] = Fraction(k, m * K)
    else:
        residues = sorted(used)
        for k in free:
            # widest gap, cyclically in [0, 1/m)
            best, lo = None, None
            for i, r in enumerate(residues):
                nxt = residues[i + 1] if i + 1 < len(residues) else residues[0] + step
                if best is None or nxt - r > best:
                    best, lo = nxt - r, r
            t = (lo + best / 2) % step
            theta[k] = t
            residues = sorted(residues + [t])
    angles = {}
    for k, orb in enumerate(orbits):
        for j, x in enumerate(orb):
            angles[x] = (theta[k] + j * step) % 1
    return V.with_angles(angles)


# -- class checks ------------------------------------------------------------


def _angle_ranks(V: CVStructure):
    pts = sorted(V.angles)
    vals = [V.angles[x] for x in pts]
    order = sorted(range(len(pts)), key=lambda i: vals[i])
    ranks = np.empty(len(pts), dtype=np.int64)
    ties = None
    r = -1
    prev = None
    for i in order:
        if prev is None or vals[i] != prev:
            r += 1
        elif ties is None:
            ties = (pts[order[order.index(i) - 1]], pts[i])
        ranks[i] = r
        prev = vals[i]
    return pts, ranks, ties


def _circular_tensor(ranks: np.ndarray) -> np.ndarray:
    n = len(ranks)
    ri, rj, rk = ranks[:, None, None], ranks[None, :, None], ranks[None, None, :]
    distinct = (ri != rj) & (rj != rk) & (ri != rk)
    span = int(ranks.max()) + 1 if n else 1
    return distinct & (((rj - ri) % span) < ((rk - ri) % span))


def _limited(items: list, k: int = 10) -> list:
    return items[:k]


def check_class_C(V: CVStructure, depth_bound: int | None = None) -> dict:
    """Class conditions (1)-(4) at finite scale; violations carry witnesses."""
    m = V.period
    depth = V.depth_bound if depth_bound is None else depth_bound
    if depth is None:
        depth = 0
    report: dict = {}
    report["1"] = {"ok": V.dimension >= 1, "dimension": V.dimension,
                   "note": "finite dimension stands in for infinite dimension"}

    pts, ranks, ties = _angle_ranks(V)
    n = len(pts)
    if n > TRIPLE_SCAN_LIMIT:
        raise SizeBoundExceeded("circular-order triple scan", n, TRIPLE_SCAN_LIMIT)
    R = _circular_tensor(ranks) if n else np.zeros((0, 0, 0), dtype=bool)
    viol2 = []
    if ties is not None:
        viol2.append({"axiom": "injective", "witness": list(ties)})
    idx = np.arange(n)
    distinct = (idx[:, None, None] != idx[None, :, None]) & (idx[None, :, None] != idx[None, None, :]) \
        & (idx[:, None, None] != idx[None, None, :])
    cyc = np.argwhere(R & ~R.transpose(1, 2, 0))
    if cyc.size:
        viol2.append({"axiom": "cyclic", "witness": [pts[i] for i in cyc[0]]})
    asym = np.argwhere(R & R.transpose(0, 2, 1))
    if asym.size:
        viol2.append({"axiom": "asymmetric", "witness": [pts[i] for i in asym[0]]})
    tot = np.argwhere(distinct & ~R & ~R.transpose(0, 2, 1))
    if tot.size:
        viol2.append({"axiom": "total", "witness": [pts[i] for i in tot[0]]})
    # for fixed x, y <_x z iff R(x, y, z) is a tournament; it is transitive iff
    # its score sequence is 0, 1, ..., n-2
    for i in range(n):
        scores = np.sort(R[i].sum(axis=1)[idx != i])
        if not np.array_equal(scores, np.arange(n - 1)):
            viol2.append({"axiom": "transitive", "witness": [pts[i]]})
            break
    report["2"] = {"ok": not viol2, "points": n, "violations": viol2}

    viol3 = []
    if V.f.get(0, 0) != 0:
        viol3.append({"law": "f(0)=0", "witness": 0})
    images: dict[int, int] = {}
    for x in sorted(V.f):
        if x == 0:
            continue
        y = V.f[x]
        if y in images:
            viol3.append({"law": "injective", "witness": [images[y], x]})
        images[y] = x
        orb = orbit_of(V, x)
        if orb is not None and (orb[-1] is None or len(orb) != m):
            viol3.append({"law": "period", "witness": x})
    pos = {x: i for i, x in enumerate(pts)}
    fidx = np.array([pos.get(V.f.get(x, -1), -1) for x in pts], dtype=np.int64)
    has = fidx >= 0
    if n:
        sub = idx[has]
        if sub.size:
            lhs = R[np.ix_(sub, sub, sub)]
            rhs = R[np.ix_(fidx[sub], fidx[sub], fidx[sub])]
            bad = np.argwhere(lhs & ~rhs)
            if bad.size:
                viol3.append({"law": "respects R", "witness": [pts[sub[i]] for i in bad[0]]})
    rot = 0
    for x in pts:
        y = V.f.get(x)
        z = V.f.get(y) if y is not None else None
        if y in pos and z in pos:
            rot += 1
            if not V.R(x, y, z):
                viol3.append({"law": "R(x,f(x),f^2(x))", "witness": x})
    report["3"] = {"ok": not viol3, "rotationTriples": rot, "violations": _limited(viol3)}

    terms = enum_terms(1, depth, m, DEFAULT_TERM_BOUND)
    viol4, checked, skipped = [], 0, 0
    for a in sorted(V.f):
        if a == 0:
            continue
        try:
            vals = [V.evaluate(t, a) for t in terms]
        except DepthExhausted:
            skipped += 1
            continue
        checked += 1
        r = f2_rank(vals)
        if r != len(terms):
            viol4.append({"witness": a, "rank": r, "terms": len(terms)})
    report["4"] = {"ok": not viol4, "depth": depth, "terms": len(terms), "checked": checked,
                   "skipped": skipped, "violations": _limited(viol4)}
    report["ok"] = all(report[k]["ok"] for k in "1234")
    return report
