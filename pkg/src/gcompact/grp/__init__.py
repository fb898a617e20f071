from .finite import (
    FiniteGroup,
    commutator,
    conjugation_perm,
    derived_subgroup,
    direct_product,
    find_isomorphism,
    generate_subgroup,
    generating_set,
    group_from_cayley,
    group_from_permutations,
    inner_automorphisms,
    is_normal,
    is_subgroup,
    semidirect_product,
)
from .perms import Permutation, PermGroup, closure, schreier_sims
from .catalog import (
    FIXTURE_NAMES,
    alternating,
    builtin,
    cyclic,
    dihedral,
    fixture,
    group_from_dict,
    load_group,
    quaternion,
    save_group,
    symmetric,
)
