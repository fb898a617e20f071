"""Finite multi-sorted structures, their automorphism groups and orbit relations.

All sorts are merged into one vertex set for the search; functions take part as
the relations given by their graphs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    IndexOutOfRange,
    NotAnAutomorphism,
    ParseError,
    SizeBoundExceeded,
    StructureError,
)
from .grp.finite import FiniteGroup
from .grp.perms import Permutation, PermGroup

DEFAULT_AUT_BOUND = 4096
DEFAULT_TUPLE_BOUND = 10**6


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    sorts: tuple[str, ...]


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    args: tuple[str, ...]
    result: str


@dataclass(frozen=True)
class ConstantSymbol:
    name: str
    sort: str


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...]
    relations: tuple[RelationSymbol, ...] = ()
    functions: tuple[FunctionSymbol, ...] = ()
    constants: tuple[ConstantSymbol, ...] = ()

    def __post_init__(self):
        names = [r.name for r in self.relations] + [f.name for f in self.functions] + [c.name for c in self.constants]
        for group in (list(self.sorts), names):
            dup = {n for n in group if group.count(n) > 1}
            if dup:
                raise StructureError(f"duplicate names: {sorted(dup)}")
        known = set(self.sorts)
        for r in self.relations:
            if not r.sorts:
                raise StructureError(f"relation {r.name} has arity 0")
            if not set(r.sorts) <= known:
                raise StructureError(f"relation {r.name} uses unknown sorts")
        for f in self.functions:
            if not f.args:
                raise StructureError(f"function {f.name} has no arguments; use a constant")
            if not set(f.args) <= known or f.result not in known:
                raise StructureError(f"function {f.name} uses unknown sorts")
        for c in self.constants:
            if c.sort not in known:
                raise StructureError(f"constant {c.name} has unknown sort {c.sort}")


class FiniteStructure:
    """Interpretation of a signature on finite domains ``{0..size-1}`` per sort.

    ``relations`` maps names to sorted tuples of index tuples, ``functions``
    maps names to integer arrays indexed by the arguments, ``constants`` maps
    names to indices.
    """

    def __init__(self, signature: Signature, sizes: Mapping[str, int],
                 relations: Mapping[str, Iterable[Sequence[int]]] | None = None,
                 functions: Mapping[str, object] | None = None,
                 constants: Mapping[str, int] | None = None):
        self.signature = signature
        self.sizes = {s: int(sizes[s]) for s in signature.sorts}
        relations = dict(relations or {})
        functions = dict(functions or {})
        constants = dict(constants or {})
        for s, n in self.sizes.items():
            if n < 1:
                raise StructureError(f"sort {s} must be non-empty")
        self.relations: dict[str, tuple[tuple[int, ...], ...]] = {}
        for r in signature.relations:
            tuples = sorted({tuple(int(v) for v in t) for t in relations.get(r.name, ())})
            for t in tuples:
                if len(t) != len(r.sorts):
                    raise StructureError(f"relation {r.name}: tuple {t} has wrong arity")
                for v, s in zip(t, r.sorts):
                    if not 0 <= v < self.sizes[s]:
                        raise IndexOutOfRange(v, self.sizes[s])
            self.relations[r.name] = tuple(tuples)
        self.functions: dict[str, np.ndarray] = {}
        for f in signature.functions:
            if f.name not in functions:
                raise StructureError(f"function {f.name} has no table")
            table = np.array(functions[f.name], dtype=np.int64)
            shape = tuple(self.sizes[s] for s in f.args)
            if table.shape != shape:
                raise StructureError(f"function {f.name}: table shape {table.shape}, expected {shape}")
            n = self.sizes[f.result]
            if table.size and (table.min() < 0 or table.max() >= n):
                raise IndexOutOfRange(int(table[(table < 0) | (table >= n)][0]), n)
            table.setflags(write=False)
            self.functions[f.name] = table
        self.constants: dict[str, int] = {}
        for c in signature.constants:
            if c.name not in constants:
                raise StructureError(f"constant {c.name} is not interpreted")
            v = int(constants[c.name])
            if not 0 <= v < self.sizes[c.sort]:
                raise IndexOutOfRange(v, self.sizes[c.sort])
            self.constants[c.name] = v
        off, self.offsets = 0, {}
        for s in signature.sorts:
            self.offsets[s] = off
            off += self.sizes[s]
        self.total_size = off

    def relation_symbol(self, name: str) -> RelationSymbol:
        return next(r for r in self.signature.relations if r.name == name)

    def graph_tuples(self, name: str) -> np.ndarray:
        """Rows ``(args..., value)`` of a function's graph, lexicographic."""
        table = self.functions[name]
        idx = np.indices(table.shape).reshape(table.ndim, -1).T
        return np.hstack([idx, table.reshape(-1, 1)])

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        sig = self.signature
        return {
            "sorts": [{"name": s, "size": self.sizes[s]} for s in sig.sorts],
            "relations": [{"name": r.name, "sorts": list(r.sorts), "tuples": [list(t) for t in self.relations[r.name]]}
                          for r in sig.relations],
            "functions": [{"name": f.name, "args": list(f.args), "result": f.result,
                           "table": self.functions[f.name].tolist()} for f in sig.functions],
            "constants": [{"name": c.name, "sort": c.sort, "value": self.constants[c.name]} for c in sig.constants],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteStructure":
        try:
            sorts = [(d["name"], int(d["size"])) for d in data["sorts"]]
            rels = data.get("relations", [])
            funs = data.get("functions", [])
            consts = data.get("constants", [])
            sig = Signature(
                tuple(n for n, _ in sorts),
                tuple(RelationSymbol(r["name"], tuple(r["sorts"])) for r in rels),
                tuple(FunctionSymbol(f["name"], tuple(f["args"]), f["result"]) for f in funs),
                tuple(ConstantSymbol(c["name"], c["sort"]) for c in consts),
            )
            return cls(sig, dict(sorts),
                       {r["name"]: r["tuples"] for r in rels},
                       {f["name"]: f["table"] for f in funs},
                       {c["name"]: c["value"] for c in consts})
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed structure data: missing or bad field {exc}") from None

    def __repr__(self):
        return f"FiniteStructure(sizes={self.sizes})"


def load_structure(path: str | Path) -> FiniteStructure:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(path, exc.strerror or "cannot read file") from None
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.msg, exc.lineno) from None
    return FiniteStructure.from_dict(data)


def group_as_structure(G: FiniteGroup) -> FiniteStructure:
    """One sort ``G``; ternary ``mul`` = {(x, y, xy)}; constant ``e``."""
    sig = Signature(("G",), (RelationSymbol("mul", ("G", "G", "G")),), (), (ConstantSymbol("e", "G"),))
    n = G.order
    tuples = [(x, y, int(G.mul[x, y])) for x in range(n) for y in range(n)]
    return FiniteStructure(sig, {"G": n}, {"mul": tuples}, {}, {"e": G.identity})


# -- automorphisms -----------------------------------------------------------


@dataclass(frozen=True, order=True)
class MultiSortPermutation:
    """One permutation per sort, in signature sort order."""

    sorts: tuple[str, ...]
    perms: tuple[Permutation, ...]

    def __post_init__(self):
        if len(self.sorts) != len(self.perms):
            raise StructureError("one permutation per sort required")

    @classmethod
    def identity(cls, M: FiniteStructure) -> "MultiSortPermutation":
        s = M.signature.sorts
        return cls(s, tuple(Permutation.identity(M.sizes[x]) for x in s))

    @classmethod
    def from_global(cls, M: FiniteStructure, image: Sequence[int]) -> "MultiSortPermutation":
        perms = []
        for s in M.signature.sorts:
            o, n = M.offsets[s], M.sizes[s]
            perms.append(Permutation(tuple(int(v) - o for v in image[o:o + n])))
        return cls(M.signature.sorts, tuple(perms))

    def component(self, sort: str) -> Permutation:
        return self.perms[self.sorts.index(sort)]

    def __call__(self, sort: str, x: int) -> int:
        return self.component(sort)(x)

    def __mul__(self, other: "MultiSortPermutation") -> "MultiSortPermutation":
        return MultiSortPermutation(self.sorts, tuple(p * q for p, q in zip(self.perms, other.perms)))

    def inverse(self) -> "MultiSortPermutation":
        return MultiSortPermutation(self.sorts, tuple(p.inverse() for p in self.perms))

    def is_identity(self) -> bool:
        return all(p.is_identity() for p in self.perms)

    def to_global(self, M: FiniteStructure) -> np.ndarray:
        return np.concatenate([np.array(p.image, dtype=np.int64) + M.offsets[s]
                               for s, p in zip(self.sorts, self.perms)])

    def to_json(self) -> dict:
        return {s: list(p.image) for s, p in zip(self.sorts, self.perms)}


def automorphism_violation(M: FiniteStructure, m: MultiSortPermutation):
    """First symbol and tuple not preserved by ``m`` or ``None``."""
    for c in M.signature.constants:
        v = M.constants[c.name]
        if m(c.sort, v) != v:
            return c.name, (v,)
    for r in M.signature.relations:
        tuples = M.relations[r.name]
        tset = set(tuples)
        comps = [m.component(s).image for s in r.sorts]
        for t in tuples:
            img = tuple(p[v] for p, v in zip(comps, t))
            if img not in tset:
                return r.name, t
    for f in M.signature.functions:
        table = M.functions[f.name]
        args = [np.array(m.component(s).image) for s in f.args]
        res = np.array(m.component(f.result).image)
        # f(m(x)) == m(f(x))
        lhs = table[np.ix_(*args)]
        rhs = res[table]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            return f.name, tuple(int(v) for v in bad[0])
    return None


def is_automorphism(M: FiniteStructure, m: MultiSortPermutation) -> bool:
    return automorphism_violation(M, m) is None


def check_automorphism(M: FiniteStructure, m: MultiSortPermutation) -> None:
    bad = automorphism_violation(M, m)
    if bad is not None:
        raise NotAnAutomorphism(*bad)


class AutGroup:
    """Subgroup of Aut(M) given by generators; ``perm_group`` acts on the merged carrier."""

    def __init__(self, structure: FiniteStructure, generators: Sequence[MultiSortPermutation]):
        self.structure = structure
        self.generators = tuple(sorted(generators))
        M = structure
        self.perm_group = PermGroup(M.total_size, [Permutation(tuple(int(v) for v in g.to_global(M)))
                                                   for g in self.generators])

    @property
    def order(self) -> int:
        return self.perm_group.order

    def __contains__(self, m: MultiSortPermutation) -> bool:
        return Permutation(tuple(int(v) for v in m.to_global(self.structure))) in self.perm_group

    def elements(self, limit: int = 100_000) -> list[MultiSortPermutation]:
        M = self.structure
        return sorted(MultiSortPermutation.from_global(M, p.image) for p in self.perm_group.elements(limit))

    def sort_action(self, sort: str) -> list[Permutation]:
        """Generators restricted to one sort."""
        return [g.component(sort) for g in self.generators]

    def __repr__(self):
        return f"AutGroup(order={self.order}, ngens={len(self.generators)})"


_M1 = np.uint64(0x9E3779B97F4A7C15)
_M2 = np.uint64(0xBF58476D1CE4E5B9)
_M3 = np.uint64(0x94D049BB133111EB)


def _mix(x: np.ndarray) -> np.ndarray:
    x = x + _M1
    x = (x ^ (x >> np.uint64(30))) * _M2
    x = (x ^ (x >> np.uint64(27))) * _M3
    return x ^ (x >> np.uint64(31))


def _rank_pairs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    order = np.lexsort((b, a))
    sa, sb = a[order], b[order]
    change = np.empty(len(a), dtype=bool)
    change[0] = True
    change[1:] = (sa[1:] != sa[:-1]) | (sb[1:] != sb[:-1])
    out = np.empty(len(a), dtype=np.int64)
    out[order] = np.cumsum(change) - 1
    return out


class _Search:
    """Individualization-refinement over the merged vertex set."""

    def __init__(self, M: FiniteStructure):
        self.M = M
        self.N = M.total_size
        self.edges: list[np.ndarray] = []
        for r in M.signature.relations:
            offs = np.array([M.offsets[s] for s in r.sorts], dtype=np.int64)
            t = np.array(M.relations[r.name], dtype=np.int64).reshape(-1, len(r.sorts))
            self.edges.append(t + offs)
        for f in M.signature.functions:
            offs = np.array([M.offsets[s] for s in f.args] + [M.offsets[f.result]], dtype=np.int64)
            self.edges.append(M.graph_tuples(f.name) + offs)
        # verification keys and hashing salts
        self.keys = [np.sort(self._encode(E)) for E in self.edges]
        self.salts = [[_mix(np.full(1, (i * 64 + p + 1) * 0x100000001B3, dtype=np.uint64))[0]
                       for p in range(E.shape[1] + 1)] for i, E in enumerate(self.edges)]
        init = np.zeros(self.N, dtype=np.int64)
        for i, s in enumerate(M.signature.sorts):
            init[M.offsets[s]:M.offsets[s] + M.sizes[s]] = i
        colors = init
        for c in M.signature.constants:
            mark = np.zeros(self.N, dtype=np.int64)
            mark[M.offsets[c.sort] + M.constants[c.name]] = 1
            colors = _rank_pairs(colors, mark)
        self.root = self.refine(colors)

    def _encode(self, E: np.ndarray) -> np.ndarray:
        code = np.zeros(len(E), dtype=np.int64)
        for p in range(E.shape[1]):
            code = code * self.N + E[:, p]
        return code

    def refine(self, colors: np.ndarray) -> np.ndarray:
        ncol = int(colors.max()) + 1 if len(colors) else 0
        with np.errstate(over="ignore"):
            while True:
                acc = np.zeros(self.N, dtype=np.uint64)
                cu = colors.astype(np.uint64)
                for E, salt in zip(self.edges, self.salts):
                    if not len(E):
                        continue
                    h = np.full(len(E), salt[0], dtype=np.uint64)
                    for p in range(E.shape[1]):
                        h = _mix(h ^ cu[E[:, p]])
                    for p in range(E.shape[1]):
                        np.add.at(acc, E[:, p], _mix(h ^ salt[p + 1]))
                new = _rank_pairs(colors, acc)
                k = int(new.max()) + 1
                if k == ncol:
                    return new
                colors, ncol = new, k

    def individualize(self, colors: np.ndarray, v: int) -> np.ndarray:
        mark = np.zeros(self.N, dtype=np.int64)
        mark[v] = 1
        return self.refine(_rank_pairs(colors, mark))

    @staticmethod
    def target_cell(colors: np.ndarray) -> np.ndarray | None:
        counts = np.bincount(colors)
        big = np.flatnonzero(counts > 1)
        if not big.size:
            return None
        return np.flatnonzero(colors == big[0])

    def verify(self, phi: np.ndarray) -> bool:
        for E, key in zip(self.edges, self.keys):
            if not np.array_equal(np.sort(self._encode(phi[E])), key):
                return False
        return True

    def run(self) -> list[np.ndarray]:
        path_colors = [self.root]
        path_vertices: list[int] = []
        c = self.root
        while (cell := self.target_cell(c)) is not None:
            v = int(cell[0])
            path_vertices.append(v)
            c = self.individualize(c, v)
            path_colors.append(c)
        self.leaf = c
        self.path_colors = path_colors
        self.hists = [np.bincount(pc) for pc in path_colors]
        gens: list[np.ndarray] = []
        for level in range(len(path_vertices) - 1, -1, -1):
            parent = path_colors[level]
            v = path_vertices[level]
            orbit = self._orbit(v, gens)
            for w in self.target_cell(parent):
                w = int(w)
                if w in orbit:
                    continue
                sigma = self._find_leaf(self.individualize(parent, w), level + 1)
                if sigma is not None:
                    gens.append(sigma)
                    orbit = self._orbit(v, gens)
        return gens

    def _find_leaf(self, c: np.ndarray, depth: int) -> np.ndarray | None:
        h = np.bincount(c)
        if depth >= len(self.hists) or not np.array_equal(h, self.hists[depth]):
            return None
        cell = self.target_cell(c)
        if cell is None:
            inv = np.empty(self.N, dtype=np.int64)
            inv[c] = np.arange(self.N)
            sigma = inv[self.leaf]
            return sigma if self.verify(sigma) else None
        for w in cell:
            r = self._find_leaf(self.individualize(c, int(w)), depth + 1)
            if r is not None:
                return r
        return None

    @staticmethod
    def _orbit(v: int, gens: list[np.ndarray]) -> set[int]:
        orbit, queue = {v}, [v]
        for x in queue:
            for g in gens:
                y = int(g[x])
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        return orbit


def automorphisms(M: FiniteStructure, bound: int = DEFAULT_AUT_BOUND) -> AutGroup:
    """Generators of the full automorphism group of ``M``."""
    if M.total_size > bound:
        raise SizeBoundExceeded("automorphism search domain", M.total_size, bound)
    gens = _Search(M).run()
    msps = [MultiSortPermutation.from_global(M, g.tolist()) for g in gens]
    for m in msps:
        check_automorphism(M, m)
    return AutGroup(M, msps)


def automorphisms_brute(M: FiniteStructure, limit: int = 12) -> list[MultiSortPermutation]:
    """All automorphisms by filtering every sort-preserving bijection.

    Sorts are fixed one at a time; symbols whose sorts are all fixed already are
    checked before the next sort is enumerated.
    """
    if M.total_size > limit:
        raise SizeBoundExceeded("brute-force automorphism filter", M.total_size, limit)
    sig = M.signature
    sorts = sig.sorts
    symbols = ([(set(r.sorts), "r", r) for r in sig.relations]
               + [(set(f.args) | {f.result}, "f", f) for f in sig.functions]
               + [({c.sort}, "c", c) for c in sig.constants])
    tsets = {r.name: set(M.relations[r.name]) for r in sig.relations}

    def ok(kind, sym, maps):
        if kind == "c":
            v = M.constants[sym.name]
            return maps[sym.sort][v] == v
        if kind == "r":
            comps = [maps[s] for s in sym.sorts]
            return all(tuple(p[v] for p, v in zip(comps, t)) in tsets[sym.name] for t in M.relations[sym.name])
        table = M.functions[sym.name]
        args = [np.array(maps[s]) for s in sym.args]
        return bool(np.array_equal(table[np.ix_(*args)], np.array(maps[sym.result])[table]))

    out: list[MultiSortPermutation] = []

    def rec(i, maps):
        if i == len(sorts):
            out.append(MultiSortPermutation(sorts, tuple(Permutation(maps[s]) for s in sorts)))
            return
        done = set(sorts[:i + 1])
        due = [(k, s) for ss, k, s in symbols if sorts[i] in ss and ss <= done]
        for p in itertools.permutations(range(M.sizes[sorts[i]])):
            maps[sorts[i]] = p
            if all(ok(k, s, maps) for k, s in due):
                rec(i + 1, maps)
        del maps[sorts[i]]

    rec(0, {})
    return sorted(out)


# -- orbit relations ---------------------------------------------------------


@dataclass
class OrbitRelation:
    structure: FiniteStructure
    generators: tuple[MultiSortPermutation, ...]
    sorts: tuple[str, ...]
    block_ids: np.ndarray = field(repr=False)
    block_count: int = 0

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.structure.sizes[s] for s in self.sorts)

    def index(self, t: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(t), self.shape))

    def block_of(self, t: Sequence[int]) -> int:
        return int(self.block_ids[self.index(t)])

    def related(self, s: Sequence[int], t: Sequence[int]) -> bool:
        return self.block_of(s) == self.block_of(t)

    def blocks(self) -> list[list[tuple[int, ...]]]:
        out: list[list[tuple[int, ...]]] = [[] for _ in range(self.block_count)]
        for i, b in enumerate(self.block_ids.tolist()):
            out[b].append(tuple(int(v) for v in np.unravel_index(i, self.shape)))
        return out


def canonical_blocks(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Renumber block labels by first occurrence."""
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inv.reshape(-1)], len(first)


def orbit_equivalence(M: FiniteStructure, generators: Sequence[MultiSortPermutation],
                      sorts: Sequence[str] | int, bound: int = DEFAULT_TUPLE_BOUND) -> OrbitRelation:
    """Orbits of the subgroup generated by ``generators`` on tuples of the given sorts.

    An integer ``sorts`` means that many copies of the only sort.
    """
    if isinstance(sorts, int):
        if len(M.signature.sorts) != 1:
            raise StructureError("tuple sorts must be named for multi-sorted structures")
        sorts = (M.signature.sorts[0],) * sorts
    sorts = tuple(sorts)
    if not sorts or not set(sorts) <= set(M.signature.sorts):
        raise StructureError(f"bad tuple sorts {sorts}")
    gens = tuple(generators)
    for g in gens:
        check_automorphism(M, g)
    shape = tuple(M.sizes[s] for s in sorts)
    size = int(np.prod(shape, dtype=object))
    if size > bound:
        raise SizeBoundExceeded("tuple space", size, bound)
    coords = np.indices(shape).reshape(len(shape), -1)
    src, dst = [], []
    ar = np.arange(size)
    for g in gens:
        img = tuple(np.array(g.component(s).image)[coords[p]] for p, s in enumerate(sorts))
        src.append(ar)
        dst.append(np.ravel_multi_index(img, shape))
    if src:
        rows, cols = np.concatenate(src), np.concatenate(dst)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    _, labels = connected_components(graph, directed=True, connection="weak")
    ids, count = canonical_blocks(labels)
    return OrbitRelation(M, tuple(sorted(gens)), sorts, ids, count)


def orbits_brute(M: FiniteStructure, generators: Sequence[MultiSortPermutation],
                 sorts: Sequence[str]) -> list[frozenset]:
    """Oracle: closure of each tuple under the generators by explicit search."""
    sorts = tuple(sorts)
    space = itertools.product(*(range(M.sizes[s]) for s in sorts))
    seen, out = set(), []
    for t in space:
        if t in seen:
            continue
        orb, queue = {t}, [t]
        for u in queue:
            for g in generators:
                v = tuple(g(s, x) for s, x in zip(sorts, u))
                if v not in orb:
                    orb.add(v)
                    queue.append(v)
        seen |= orb
        out.append(frozenset(orb))
    return out
