"""Open arcs of the circle and cuts of finite point sets inside them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from ..errors import DegenerateArc, InputError


@dataclass(frozen=True)
class Arc:
    """``(a, b)``: points met strictly after a and before b going anticlockwise."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a) % 1)
        object.__setattr__(self, "b", Fraction(self.b) % 1)
        if self.a == self.b:
            raise DegenerateArc(f"arc from {self.a} to itself")

    @property
    def length(self) -> Fraction:
        return (self.b - self.a) % 1

    def position(self, c) -> Fraction:
        """Distance from a; the arc's linear order compares positions."""
        return (Fraction(c) - self.a) % 1

    def __contains__(self, c) -> bool:
        p = self.position(c)
        return 0 < p < self.length

    def closed_left(self, c) -> bool:
        """Membership in ``[a, b)``."""
        return self.position(c) < self.length


@dataclass(frozen=True)
class Cut:
    lower: tuple
    upper: tuple
    arc: Arc


def arc_members(points: Mapping[int, Fraction] | Iterable[Fraction], a, b) -> list:
    """Members of the open arc ``(a, b)`` in the arc's order.

    ``points`` is either a map from vectors to angles (vectors are returned) or
    a collection of angles.
    """
    arc = Arc(a, b)
    if isinstance(points, Mapping):
        inside = [x for x, t in points.items() if t in arc]
        return sorted(inside, key=lambda x: arc.position(points[x]))
    inside = [Fraction(t) for t in points if t in arc]
    return sorted(set(inside), key=arc.position)


def cut_split(S: Iterable[Fraction], arc: Arc, pivot) -> Cut:
    """Split S at ``pivot``: ``C-`` strictly before it, ``C+`` from it on."""
    pts = sorted({Fraction(s) % 1 for s in S}, key=arc.position)
    for s in pts:
        if s not in arc:
            raise InputError(f"point {s} is not inside the arc")
    p = arc.position(pivot)
    lower = tuple(s for s in pts if arc.position(s) < p)
    upper = tuple(s for s in pts if arc.position(s) >= p)
    return Cut(lower, upper, arc)
