import itertools
import json

import numpy as np
import pytest

from gcompact.errors import NotAnAutomorphism, SizeBoundExceeded, StructureError
from gcompact.fstruct import (
    ConstantSymbol,
    FiniteStructure,
    FunctionSymbol,
    MultiSortPermutation,
    RelationSymbol,
    Signature,
    automorphisms,
    automorphisms_brute,
    group_as_structure,
    is_automorphism,
    load_structure,
    orbit_equivalence,
    orbits_brute,
)
from gcompact.grp import FIXTURE_NAMES, Permutation, cyclic, fixture, symmetric


def graph(n, edges):
    sig = Signature(("V",), (RelationSymbol("E", ("V", "V")),), (), ())
    return FiniteStructure(sig, {"V": n}, {"E": edges})


def all_bijection_filter(M):
    """Oracle for one-sorted structures: every bijection, kept if it preserves M."""
    n = M.sizes["V"]
    return [p for p in itertools.permutations(range(n))
            if is_automorphism(M, MultiSortPermutation(("V",), (Permutation(p),)))]


CYCLE3 = [(0, 1), (1, 2), (2, 0)]
K3 = [(a, b) for a in range(3) for b in range(3) if a != b]


def test_directed_cycle_and_complete_graph():
    for edges, order in ((CYCLE3, 3), (K3, 6)):
        M = graph(3, edges)
        A = automorphisms(M)
        assert A.order == order == len(all_bijection_filter(M))
        assert all(is_automorphism(M, g) for g in A.generators)


def test_constants_naming_everything():
    sig = Signature(("V",), (), (), tuple(ConstantSymbol(f"c{i}", "V") for i in range(4)))
    M = FiniteStructure(sig, {"V": 4}, {}, {}, {f"c{i}": i for i in range(4)})
    assert automorphisms(M).order == 1


def test_group_structures():
    M = group_as_structure(cyclic(2))
    assert len(M.relations["mul"]) == 4
    assert automorphisms(group_as_structure(cyclic(3))).order == 2
    S = group_as_structure(symmetric(3))
    assert automorphisms(S).order == 6
    brute = automorphisms_brute(S, 6)
    assert len(brute) == 6 and sorted(automorphisms(S).elements()) == brute


def test_generators_sorted_and_verified():
    for name in FIXTURE_NAMES:
        A = automorphisms(group_as_structure(fixture(name)))
        assert list(A.generators) == sorted(A.generators)
        for g in A.generators:
            assert is_automorphism(A.structure, g)


def random_structure(rng):
    sorts = ("A", "B")[: rng.integers(1, 3)]
    sizes = {s: int(rng.integers(1, 5)) for s in sorts}
    rels, data = [], {}
    for i in range(int(rng.integers(0, 3))):
        ar = tuple(sorts[int(rng.integers(len(sorts)))] for _ in range(int(rng.integers(1, 3))))
        space = list(itertools.product(*(range(sizes[s]) for s in ar)))
        keep = [t for t in space if rng.random() < 0.4]
        rels.append(RelationSymbol(f"R{i}", ar))
        data[f"R{i}"] = keep
    funs, tables = [], {}
    if rng.random() < 0.4:
        a, r = sorts[0], sorts[-1]
        funs.append(FunctionSymbol("f", (a,), r))
        tables["f"] = rng.integers(0, sizes[r], size=sizes[a])
    consts, cvals = [], {}
    if rng.random() < 0.3:
        consts.append(ConstantSymbol("c", sorts[0]))
        cvals["c"] = int(rng.integers(sizes[sorts[0]]))
    return FiniteStructure(Signature(sorts, tuple(rels), tuple(funs), tuple(consts)), sizes, data, tables, cvals)


def test_random_structures_against_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(150):
        M = random_structure(rng)
        A = automorphisms(M)
        brute = automorphisms_brute(M, 8)
        assert A.order == len(brute)
        assert sorted(A.elements()) == brute


def test_size_bound():
    with pytest.raises(SizeBoundExceeded):
        automorphisms(graph(10, []), bound=5)
    with pytest.raises(SizeBoundExceeded):
        automorphisms_brute(graph(13, []))


# -- orbits ------------------------------------------------------------------------


def blocks_of(rel):
    return sorted(sorted(b) for b in rel.blocks())


def test_orbit_examples():
    M = graph(3, CYCLE3)
    assert orbit_equivalence(M, [], 1).block_count == 3
    A = automorphisms(M)
    assert orbit_equivalence(M, A.generators, 1).block_count == 1
    rel = orbit_equivalence(M, A.generators, 2)
    blocks = blocks_of(rel)
    assert len(blocks) == 3
    assert sorted(blocks) == sorted([sorted((i, i) for i in range(3)), sorted(CYCLE3),
                                     sorted((b, a) for a, b in CYCLE3)])
    assert sorted(map(sorted, orbits_brute(M, A.generators, ("V", "V")))) == blocks


def test_orbit_rejects_non_automorphism():
    M = graph(3, CYCLE3)
    swap = MultiSortPermutation(("V",), (Permutation((1, 0, 2)),))
    with pytest.raises(NotAnAutomorphism):
        orbit_equivalence(M, [swap], 1)


def test_orbits_refine_relations_and_full_is_coarsest():
    for name in ("S3", "D4", "Q8", "C6"):
        M = group_as_structure(fixture(name))
        A = automorphisms(M)
        full = orbit_equivalence(M, A.generators, ("G", "G", "G"))
        mul = set(M.relations["mul"])
        for b in full.blocks():
            assert all(t in mul for t in b) or not any(t in mul for t in b)
        ids = np.asarray(orbit_equivalence(M, A.generators, 1).block_ids)
        for g in A.generators:
            sub = np.asarray(orbit_equivalence(M, [g], 1).block_ids)
            # every block of the subgroup lies in a block of the full group
            for b in set(sub.tolist()):
                assert len(set(ids[sub == b].tolist())) == 1


def test_multisorted_orbits_match_oracle():
    rng = np.random.default_rng(1)
    for _ in range(40):
        M = random_structure(rng)
        A = automorphisms(M)
        sorts = M.signature.sorts[:1] * 2
        rel = orbit_equivalence(M, A.generators, sorts)
        assert blocks_of(rel) == sorted(map(sorted, orbits_brute(M, A.generators, sorts)))


# -- validation and files ----------------------------------------------------------


def test_structure_validation():
    sig = Signature(("V",), (RelationSymbol("E", ("V", "V")),), (), ())
    with pytest.raises(StructureError):
        FiniteStructure(sig, {"V": 2}, {"E": [(0,)]})
    with pytest.raises(Exception):
        Signature(("V", "V"), (), (), ())


def test_structure_file_roundtrip(tmp_path):
    M = group_as_structure(symmetric(3))
    p = tmp_path / "m.json"
    p.write_text(json.dumps(M.to_dict()))
    N = load_structure(p)
    assert N.relations == M.relations and N.constants == M.constants
    assert automorphisms(N).order == 6
