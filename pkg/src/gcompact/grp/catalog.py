"""Small named groups and the JSON group file format."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..errors import FixtureMissing, InputError, ParseError
from .finite import FiniteGroup, group_from_cayley, group_from_permutations
from .perms import Permutation

FIXTURE_NAMES = ("C2", "C3", "C4", "C5", "C6", "C7", "C8", "S3", "S4", "A4", "D4", "Q8")


def cyclic(n: int) -> FiniteGroup:
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return group_from_cayley(table, [f"c^{i}" for i in range(n)])


def symmetric(n: int) -> FiniteGroup:
    if n == 1:
        return group_from_cayley([[0]], ["()"])
    gens = [Permutation.from_cycles(n, [(0, 1)])]
    if n > 2:
        gens.append(Permutation.from_cycles(n, [tuple(range(n))]))
    return group_from_permutations(gens, n)


def alternating(n: int) -> FiniteGroup:
    if n < 3:
        return group_from_cayley([[0]], ["()"])
    gens = [Permutation.from_cycles(n, [(0, 1, i)]) for i in range(2, n)]
    return group_from_permutations(gens, n)


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = Permutation.from_cycles(n, [tuple(range(n))])
    ref = Permutation(tuple((-i) % n for i in range(n)))
    return group_from_permutations([rot, ref], n)


def quaternion() -> FiniteGroup:
    # elements ±1, ±i, ±j, ±k encoded as (sign, unit) -> index sign*4 + unit
    names = ["1", "i", "j", "k"]
    # unit products: table[a][b] = (sign, unit)
    prod = {
        (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
        (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
        (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
        (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0),
    }
    table = []
    for x in range(8):
        row = []
        for y in range(8):
            s, u = prod[(x % 4, y % 4)]
            row.append(((x // 4 + y // 4 + s) % 2) * 4 + u)
        table.append(row)
    labels = names + ["-" + n for n in names]
    return group_from_cayley(table, labels)


def builtin(name: str) -> FiniteGroup:
    """Group by catalog name such as ``S3``, ``C5``, ``D4``, ``A4``, ``Q8``."""
    key = name.strip()
    kind, rest = key[:1].upper(), key[1:]
    if key.upper() == "Q8":
        return quaternion()
    if not rest.isdigit() or kind not in "CSADc":
        raise InputError(f"unknown built-in group {name!r}")
    n = int(rest)
    if n < 1:
        raise InputError(f"unknown built-in group {name!r}")
    return {"C": cyclic, "S": symmetric, "A": alternating, "D": dihedral}[kind](n)


def group_from_dict(data: dict) -> FiniteGroup:
    if "mul" in data:
        g = group_from_cayley(data["mul"], data.get("labels"))
        if "order" in data and data["order"] != g.order:
            raise InputError(f"declared order {data['order']} but table has {g.order} rows")
        return g
    if "generators" in data:
        degree = int(data["degree"])
        gens = [Permutation(tuple(img)) for img in data["generators"]]
        return group_from_permutations(gens, degree)
    raise InputError("group file needs either 'mul' or 'degree'/'generators'")


def load_group(path: str | Path) -> FiniteGroup:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(path, exc.strerror or "cannot read file") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.msg, exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError(path, "expected a JSON object")
    return group_from_dict(data)


def save_group(G: FiniteGroup, path: str | Path) -> None:
    Path(path).write_text(json.dumps(G.to_dict(), separators=(",", ":")) + "\n")


def fixture(name: str, directory: str | Path | None = None) -> FiniteGroup:
    """Load a bundled fixture group (or one from ``directory``)."""
    if directory is None:
        res = resources.files("gcompact") / "data" / "groups" / f"{name}.json"
    else:
        res = Path(directory) / f"{name}.json"
    try:
        data = json.loads(res.read_text())
        return group_from_dict(data)
    except (OSError, json.JSONDecodeError, InputError, KeyError, TypeError) as exc:
        raise FixtureMissing(f"fixture {name}: {exc}") from None


def write_fixtures(directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in FIXTURE_NAMES:
        save_group(builtin(name), directory / f"{name}.json")
