"""Exception hierarchy.

Every error carries the witnessing data as attributes so callers (and the
CLI) can report it without parsing messages.
"""


class GCompactError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GCompactError):
    """Malformed input data (exit code 2 in the CLI)."""


class ParseError(InputError):
    def __init__(self, path, message, line=None):
        self.path = str(path)
        self.line = line
        where = self.path if line is None else f"{self.path}:{line}"
        super().__init__(f"{where}: {message}")


class UnknownSubcommand(InputError):
    pass


class FixtureMissing(InputError):
    pass


class SizeBoundExceeded(GCompactError):
    def __init__(self, what, size, bound):
        self.what, self.size, self.bound = what, size, bound
        super().__init__(f"{what}: size {size} exceeds bound {bound}")


class IndexOutOfRange(InputError):
    def __init__(self, index, size):
        self.index, self.size = index, size
        super().__init__(f"index {index} out of range [0, {size})")


# --- groups -----------------------------------------------------------------

class GroupError(InputError):
    pass


class NotAssociative(GroupError):
    def __init__(self, x, y, z):
        self.witness = (x, y, z)
        super().__init__(f"(x*y)*z != x*(y*z) for x={x}, y={y}, z={z}")


class NoIdentity(GroupError):
    def __init__(self):
        super().__init__("no two-sided identity element")


class NoInverse(GroupError):
    def __init__(self, x):
        self.witness = x
        super().__init__(f"element {x} has no two-sided inverse")


class DegreeMismatch(GroupError):
    def __init__(self, expected, got):
        self.expected, self.got = expected, got
        super().__init__(f"permutation of degree {got}, expected {expected}")


class ActionNotAutomorphism(GroupError):
    def __init__(self, h, x, y):
        self.witness = (h, x, y)
        super().__init__(f"action of {h} is not an automorphism (fails on {x}, {y})")


class ActionNotHomomorphism(GroupError):
    def __init__(self, h1, h2):
        self.witness = (h1, h2)
        super().__init__(f"action(h1*h2) != action(h1)∘action(h2) for h1={h1}, h2={h2}")


class NotSubgroup(GroupError):
    def __init__(self, x, y):
        self.witness = (x, y)
        super().__init__(f"not closed: {x}^-1 * {y} escapes the set")


# --- structures -------------------------------------------------------------

class StructureError(InputError):
    pass


class NotAnAutomorphism(GCompactError):
    def __init__(self, symbol, tuple_=None):
        self.symbol, self.tuple = symbol, tuple_
        msg = f"map does not preserve {symbol}"
        if tuple_ is not None:
            msg += f" (witness {tuple_})"
        super().__init__(msg)


# --- commutant --------------------------------------------------------------

class CarrierMismatch(InputError):
    def __init__(self, relation_size, group_order):
        super().__init__(f"relation on {relation_size} points, group of order {group_order}")


class InternalIndexBoundViolated(GCompactError):
    """[G : G_E] exceeded |G/E|; this indicates a bug, never bad input."""


class NotSymmetric(InputError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"set is not symmetric: witness {witness}")


class MemberNotThick(InputError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"family member {index} is not thick")


class RelationNotOrbit(InputError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"relation is not the orbit relation of the given automorphisms (witness {witness})")


# --- affine -----------------------------------------------------------------

class NotRegular(InputError):
    def __init__(self, g, x, y=None):
        self.witness = (g, x, y)
        super().__init__(f"action is not regular (witness g={g}, x={x}, y={y})")


class GroupMismatch(InputError):
    pass


class NotSubstructure(InputError):
    pass


class OrbitMismatch(InputError):
    pass


# --- circular ---------------------------------------------------------------

class DepthExhausted(GCompactError):
    def __init__(self, vector, detail="f is undefined here"):
        self.vector = vector
        super().__init__(f"{detail}: {vector:#x}" if isinstance(vector, int) else detail)


class AngleCollision(InputError):
    def __init__(self, x, y):
        self.witness = (x, y)
        super().__init__(f"angles of {x} and {y} lie in the same rotation coset")


class OrbitIncomplete(GCompactError):
    def __init__(self, vector):
        self.vector = vector
        super().__init__(f"f-orbit of {vector} is not a complete cycle of the period")


class EmbeddingNotInjective(InputError):
    pass


class EmbeddingsDisagreeOnV0(InputError):
    def __init__(self, vector, detail):
        self.vector = vector
        super().__init__(f"V0 vector {vector}: {detail}")


class DegenerateArc(InputError):
    pass


class ArcTooCrowded(GCompactError):
    """No rational angle satisfies the constraints; indicates a bug."""


class PeriodViolation(InputError):
    def __init__(self, vector, length, period):
        self.vector, self.length = vector, length
        super().__init__(f"f-orbit of {vector} has length {length}, expected exactly {period}")
