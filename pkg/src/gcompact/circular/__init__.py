from .amalgam import AmalgamResult, amalgamate, random_triple, term_shift
from .arcs import Arc, Cut, arc_members, cut_split
from .chain import ChainBlock, ChainResult, nested_chain, verify_chain
from .cvspace import (
    CVStructure,
    apply_linear,
    check_class_C,
    direct_sum,
    embed_circle,
    f2_rank,
    f_orbits,
    free_algebra,
    load_cvstructure,
    orbit_of,
)
from .terms import FSum, FTerm, Var, enum_terms, sum_count, term_count
