"""Command-line front end. Reports go to stdout (or ``--out``) as canonical JSON;
a short summary and the timing go to stderr."""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .acceptance import SUITES, run_acceptance
from .affine import affine_from_group, build_affine, verify_semidirect
from .circular import (
    CVStructure,
    amalgamate,
    check_class_C,
    embed_circle,
    free_algebra,
    nested_chain,
    random_triple,
)
from .commutant import (
    EquivRelation,
    commutant_profile,
    invariant_core,
    normality_check,
    thickness_index,
)
from .constructions import b0_exclusion_check, build_product, complete_group_report, star_check
from .errors import GCompactError, InputError, ParseError
from .fstruct import automorphisms, group_as_structure, load_structure, orbit_equivalence
from .grp import builtin, derived_subgroup, load_group
from .reports import dumps, error_report, make_report, validate, verdict

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def read_group(spec: str):
    """``builtin:NAME`` or a path to a group file."""
    if spec.startswith("builtin:"):
        return builtin(spec.split(":", 1)[1])
    return load_group(spec)


def _read_json(path: str):
    p = Path(path)
    try:
        return json.loads(p.read_text())
    except OSError as exc:
        raise ParseError(p, exc.strerror or "cannot read file") from None
    except json.JSONDecodeError as exc:
        raise ParseError(p, exc.msg, exc.lineno) from None


def read_relation(G, name: str) -> EquivRelation:
    if name == "equality":
        return EquivRelation.equality(G.order)
    if name == "full":
        return EquivRelation.full(G.order)
    if name == "conjugacy":
        return EquivRelation.conjugacy(G)
    if name == "aut-orbit":
        M = group_as_structure(G)
        return EquivRelation.from_orbits(orbit_equivalence(M, automorphisms(M).generators, 1))
    data = _read_json(name)
    ids = data.get("blocks") if isinstance(data, dict) else data
    if not isinstance(ids, list) or len(ids) != G.order:
        raise InputError(f"{name}: expected a block-id array of length {G.order}")
    return EquivRelation.from_blocks(ids)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"expected integers, got {text!r}") from None


def _circ_input(args) -> CVStructure:
    """A structure file, or a report of ``circ free``/``circ embed``."""
    data = _read_json(args.structure)
    if isinstance(data, dict) and "results" in data:
        data = data["results"].get("structure")
    if not isinstance(data, dict):
        raise InputError(f"{args.structure}: no structure found")
    return CVStructure.from_json(data)


# -- handlers: each returns (inputs, results, verdicts) ----------------------


def cmd_group(args):
    G = read_group(args.group)
    inputs = {"group": args.group}
    if args.action == "validate":
        return inputs, {"order": G.order, "identity": G.identity}, [verdict("group axioms", True)]
    res = {
        "order": G.order,
        "identity": G.identity,
        "labels": list(G.labels),
        "abelian": G.is_abelian(),
        "center": list(G.center()),
        "derivedSubgroup": list(derived_subgroup(G)),
        "elementOrders": [G.element_order(x) for x in range(G.order)],
    }
    return inputs, res, []


def _structure_or_group(args):
    if args.structure:
        return {"structure": args.structure}, load_structure(args.structure)
    if not args.group:
        raise InputError("give --group or --structure")
    return {"group": args.group}, group_as_structure(read_group(args.group))


def cmd_aut(args):
    inputs, M = _structure_or_group(args)
    A = automorphisms(M, args.bound)
    res = {"order": A.order, "generators": [g.to_json() for g in A.generators]}
    return inputs, res, []


def cmd_orbit(args):
    inputs, M = _structure_or_group(args)
    sorts = args.sorts.split(",") if args.sorts else args.arity
    inputs.update({"sorts": args.sorts, "arity": args.arity})
    A = automorphisms(M, args.bound)
    rel = orbit_equivalence(M, A.generators, sorts)
    res = {"autOrder": A.order, "sorts": list(rel.sorts), "blockCount": rel.block_count,
           "blockIds": rel.block_ids.tolist()}
    return inputs, res, []


def cmd_commutant(args):
    G = read_group(args.group)
    E = read_relation(G, args.relation)
    prof = commutant_profile(G, E)
    res = prof.to_json()
    ver = [verdict("index bound", prof.index <= E.block_count, {"index": prof.index, "quotient": E.block_count})]
    if args.relation == "aut-orbit":
        M = group_as_structure(G)
        n = normality_check(G, E, automorphisms(M).generators)
        ver.append(verdict("commutant normal", n.normal, n.witness))
    return {"group": args.group, "relation": args.relation}, res, ver


def cmd_thickness(args):
    G = read_group(args.group)
    P = range(G.order) if args.subset == "all" else _int_list(args.subset)
    t = thickness_index(G, P)
    return {"group": args.group, "subset": args.subset}, t.to_json(), []


def cmd_invariant_core(args):
    G = read_group(args.group)
    M = group_as_structure(G)
    A = automorphisms(M, args.bound)
    core = invariant_core(G, A, args.index_bound)
    return {"group": args.group, "indexBound": args.index_bound}, \
        {"core": list(core), "size": len(core), "index": G.order // len(core)}, []


def cmd_affine(args):
    if args.structure:
        N = build_affine(load_structure(args.structure))
        inputs = {"structure": args.structure}
    else:
        N = affine_from_group(read_group(args.group))
        inputs = {"group": args.group}
    rep = verify_semidirect(N, args.bound)
    return inputs, rep.to_json(), [verdict("semidirect decomposition", rep.passed)]


def cmd_star(args):
    groups = [read_group(g) for g in args.factors]
    P = build_product(groups, args.bound)
    rows = [star_check(P, k) for k in ([args.k] if args.k is not None else range(len(groups)))]
    ver = [verdict(f"subset k={r.k}", r.subset_holds) for r in rows]
    return {"factors": list(args.factors), "k": args.k}, {"checks": [r.to_json() for r in rows]}, ver


def cmd_complete(args):
    G = read_group(args.group)
    return {"group": args.group}, complete_group_report(G, args.bound), []


def cmd_qform(args):
    rep = b0_exclusion_check(args.k, args.bound)
    ver = [verdict("radical is {0, b0}", rep["radicalIsZeroB0"]), verdict("b0 outside X_E", not rep["b0InX"])]
    return {"k": args.k}, rep, ver


def cmd_circ(args):
    act = args.action
    if act == "free":
        V = free_algebra(args.generators, args.depth, args.period)
        return {"generators": args.generators, "depth": args.depth, "period": args.period}, \
            {"structure": V.to_json()}, []
    if act == "embed":
        V = _circ_input(args)
        seeds = {}
        for item in args.angle or []:
            x, _, a = item.partition("=")
            try:
                seeds[int(x)] = Fraction(a)
            except (ValueError, ZeroDivisionError):
                raise InputError(f"bad seed angle {item!r}; use VECTOR=P/Q") from None
        W = embed_circle(V, seeds)
        return {"structure": args.structure, "angles": args.angle or []}, {"structure": W.to_json()}, []
    if act == "check":
        V = _circ_input(args)
        rep = check_class_C(V, args.depth)
        return {"structure": args.structure, "depth": args.depth}, rep, \
            [verdict(f"condition {k}", rep[k]["ok"]) for k in "1234"]
    if act == "amalgamate":
        if args.triple:
            data = _read_json(args.triple)
            try:
                V0, V1, V2 = (CVStructure.from_json(data[k]) for k in ("V0", "V1", "V2"))
                e1, e2 = data["e1"], data["e2"]
            except (KeyError, TypeError) as exc:
                raise InputError(f"{args.triple}: bad triple file ({exc})") from None
            inputs = {"triple": args.triple}
        else:
            V0, V1, V2, e1, e2 = random_triple(random.Random(args.seed))
            inputs = {"randomSeed": args.seed}
        inputs.update({"depth": args.depth, "stages": args.stages})
        res = amalgamate(V0, V1, V2, e1, e2, args.depth, args.stages)
        ver = [verdict("commuting square", res.report["commutes"]),
               verdict("class C", res.report["classC"]["ok"])]
        return inputs, res.to_json(), ver
    if act == "chain":
        V = _circ_input(args) if args.structure else embed_circle(free_algebra(1, 1))
        splits = _int_list(args.splits) if args.splits else None
        res = nested_chain(V, args.length, args.depth, splits)
        return {"structure": args.structure, "length": args.length, "depth": args.depth,
                "splits": splits}, res.to_json(), [verdict("nesting", res.ok)]
    raise InputError(f"unknown circ action {act}")


def cmd_accept(args):
    def progress(row):
        print(f"  [{'PASS' if row['passed'] else 'FAIL'}] {row['criterion']}. {row['name']}", file=sys.stderr)

    rep = run_acceptance(args.suite, args.seed, args.fixtures, progress)
    return rep["inputs"], rep["results"], rep["verdicts"]


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bound", type=int, default=4096, help="size bound for searches")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--depth", type=int, default=1)
    common.add_argument("--period", type=int, default=3)
    common.add_argument("--out", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="gcompact", description=__doc__)
    p.add_argument("--version", action="version", version=f"gcompact {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=fn)
        return sp

    sp = add("group", cmd_group, help="validate or describe a group")
    sp.add_argument("action", choices=["validate", "info"])
    sp.add_argument("group", help="group file or builtin:NAME")

    for name, fn, hlp in (("aut", cmd_aut, "automorphism group"), ("orbit", cmd_orbit, "orbit relation")):
        sp = add(name, fn, help=hlp)
        sp.add_argument("--group")
        sp.add_argument("--structure")
        if name == "orbit":
            sp.add_argument("--arity", type=int, default=1)
            sp.add_argument("--sorts", help="comma separated sort names (multi-sorted structures)")

    sp = add("commutant-profile", cmd_commutant, help="X_E, powers, width and G_E")
    sp.add_argument("--group", required=True)
    sp.add_argument("--relation", default="conjugacy",
                    help="equality, conjugacy, aut-orbit, full, or a block-id file")

    sp = add("thickness", cmd_thickness, help="thickness of a symmetric subset")
    sp.add_argument("--group", required=True)
    sp.add_argument("--subset", required=True, help="element indices, or 'all'")

    sp = add("invariant-core", cmd_invariant_core, help="intersection of invariant bounded-index subgroups")
    sp.add_argument("--group", required=True)
    sp.add_argument("--index-bound", type=int, required=True)

    sp = add("affine-check", cmd_affine, help="semidirect decomposition of Aut(N)")
    sp.add_argument("--group")
    sp.add_argument("--structure")

    sp = add("star-check", cmd_star, help="projection identity on a finite product")
    sp.add_argument("factors", nargs="+", help="group files or builtin:NAME")
    sp.add_argument("--k", type=int)

    sp = add("complete-check", cmd_complete, help="Aut(G) = Inn(G)?")
    sp.add_argument("--group", required=True)

    sp = add("qform", cmd_qform, help="degenerate quadratic form over F2")
    sp.add_argument("--k", type=int, default=1)

    sp = add("circ", cmd_circ, help="circular-order structures")
    sp.add_argument("action", choices=["free", "embed", "check", "amalgamate", "chain"])
    sp.add_argument("structure", nargs="?", help="structure file")
    sp.add_argument("--generators", type=int, default=1)
    sp.add_argument("--angle", action="append", help="seed angle VECTOR=P/Q (embed)")
    sp.add_argument("--triple", help="JSON file with V0, V1, V2, e1, e2 (amalgamate)")
    sp.add_argument("--stages", type=int, default=1)
    sp.add_argument("--length", type=int, default=3)
    sp.add_argument("--splits", help="cut sizes per block (chain)")

    sp = add("accept", cmd_accept, help="run the acceptance suite")
    sp.add_argument("suite", nargs="?", default="all", choices=SUITES)
    sp.add_argument("--fixtures", help="directory of fixture groups (default: bundled)")
    return p


def _subcommand(args) -> str:
    action = getattr(args, "action", None)
    return f"{args.command} {action}" if args.command in ("group", "circ") else args.command


def _emit(report: dict, out: str | None) -> None:
    validate(report)
    text = dumps(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = _subcommand(args)
    start = time.perf_counter()
    try:
        if args.command == "circ" and args.action in ("embed", "check") and not args.structure:
            raise InputError(f"circ {args.action} needs a structure file")
        inputs, results, verdicts = args.func(args)
        report = make_report(name, inputs, results, verdicts)
        code = EXIT_OK if report["passed"] else EXIT_FAIL
    except InputError as exc:
        report, code = error_report(name, {}, exc), EXIT_INPUT
    except GCompactError as exc:
        report, code = error_report(name, {}, exc), EXIT_FAIL
    _emit(report, args.out)
    status = "ok" if code == EXIT_OK else ("input error" if code == EXIT_INPUT else "failed")
    if "error" in report:
        print(f"{name}: {report['error']['type']}: {report['error']['message']}", file=sys.stderr)
    print(f"{name}: {status} ({time.perf_counter() - start:.2f}s)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
