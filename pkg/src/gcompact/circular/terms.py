"""Terms built from variables by applying f and summing sets of terms.

``Var(v, p)`` is ``f^p(x_v)``; ``FSum(p, S)`` is ``f^p(ΣS)`` with ``p >= 1``, so a
bare sum is never a term.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Union

from ..errors import InputError, SizeBoundExceeded

DEFAULT_TERM_BOUND = 10**5


@dataclass(frozen=True)
class Var:
    var: int
    power: int

    depth = 0

    @property
    def key(self) -> tuple:
        return (0, self.var, self.power)

    def __str__(self):
        x = f"x{self.var}"
        return x if self.power == 0 else (f"f({x})" if self.power == 1 else f"f^{self.power}({x})")


@dataclass(frozen=True)
class FSum:
    power: int
    operands: frozenset

    def __post_init__(self):
        if self.power < 1:
            raise InputError("a sum needs at least one application of f")
        if len(self.operands) < 2:
            raise InputError("a sum needs at least two distinct operands")

    @cached_property
    def depth(self) -> int:
        return 1 + max(t.depth for t in self.operands)

    @cached_property
    def sorted_operands(self) -> tuple:
        return tuple(sorted(self.operands, key=lambda t: t.key))

    @cached_property
    def key(self) -> tuple:
        return (self.depth, len(self.operands), tuple(t.key for t in self.sorted_operands), self.power)

    def __str__(self):
        inner = " + ".join(str(t) for t in self.sorted_operands)
        return f"f({inner})" if self.power == 1 else f"f^{self.power}({inner})"


FTerm = Union[Var, FSum]


def sum_count(n: int) -> int:
    """Number of subsets of size >= 2 of an n-set."""
    return 2**n - n - 1


def term_count(var_count: int, depth: int, period: int = 3) -> int:
    """Count from the recursion ``N(d+1) = N(0) + (m-1)(2^N(d) - N(d) - 1)``."""
    base = var_count * period
    n = base
    for _ in range(depth):
        n = base + (period - 1) * sum_count(n)
    return n


def enum_terms(var_count: int, depth: int, period: int = 3, bound: int = DEFAULT_TERM_BOUND) -> list[FTerm]:
    """All terms of nesting depth <= ``depth``, sorted by ``key``."""
    if var_count < 1 or depth < 0 or period < 3:
        raise InputError("need var_count >= 1, depth >= 0, period >= 3")
    expected = term_count(var_count, depth, period)
    if expected > bound:
        raise SizeBoundExceeded("term enumeration", expected, bound)
    base = [Var(v, p) for v in range(var_count) for p in range(period)]
    level = list(base)
    for _ in range(depth):
        sums = [FSum(p, frozenset(S)) for k in range(2, len(level) + 1)
                for S in combinations(level, k) for p in range(1, period)]
        level = base + sums
    return sorted(level, key=lambda t: t.key)
