"""Finite interpretations as multi-relational graphs plus their sufficient statistics.

A world over domain [n] is stored as one 1-type index per element and one
realized 2-table index per unordered pair {q, r} with q < r (the table is read
with x bound to q and y bound to r).  This is a bijection with truth
assignments over the ground atoms.  The canonical per-pair record orients each
pair so that the smaller 1-type comes first, dualizing the table when the pair
is flipped.
"""

from dataclasses import dataclass
from itertools import product
import re

from .errors import EnumerationCapError, ParseError, ValidationError
from .fol import And, Atom, Distinct, Formula, Iff, Implies, Language, Not, Or
from .util import iter_pairs, pair_index

GroundAtom = tuple[str, tuple[int, ...]]

ENUMERATION_CAP = 24


@dataclass(frozen=True)
class World:
    """An interpretation over [n]: per-element 1-types and per-pair realized 2-tables."""

    lang: Language
    n: int
    types: tuple[int, ...]
    tables: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("domain size must be >= 1")
        if len(self.types) != self.n:
            raise ValidationError(f"expected {self.n} element types, got {len(self.types)}")
        if len(self.tables) != self.n * (self.n - 1) // 2:
            raise ValidationError("wrong number of pair tables")
        if any(not 1 <= t <= self.lang.num_one_types for t in self.types):
            raise ValidationError("1-type index out of range")
        if any(not 1 <= t <= self.lang.num_two_tables for t in self.tables):
            raise ValidationError("2-table index out of range")

    def table(self, q: int, r: int) -> int:
        """Realized 2-table for the ordered pair (q, r), q != r."""
        if q < r:
            return self.tables[pair_index(self.n, q, r)]
        return self.lang.dual(self.tables[pair_index(self.n, r, q)])

    def canonical_pair(self, q: int, r: int) -> tuple[int, int, int]:
        """Canonical (i, j, l) record of pair {q, r}, q < r, with i <= j."""
        i, j = self.types[q - 1], self.types[r - 1]
        l = self.tables[pair_index(self.n, q, r)]
        if i <= j:
            return i, j, l
        return j, i, self.lang.dual(l)

    def canonical_pairs(self) -> dict[tuple[int, int], tuple[int, int, int]]:
        return {(q, r): self.canonical_pair(q, r) for q, r in iter_pairs(self.n)}

    def ground(self, pred: str, args: tuple[int, ...]) -> bool:
        """Truth value of one ground atom."""
        arity = self.lang.arity(pred)
        if len(args) != arity:
            raise ValidationError(f"predicate {pred} has arity {arity}, got {len(args)} arguments")
        for c in args:
            if not 1 <= c <= self.n:
                raise ValidationError(f"constant {c} outside domain [1..{self.n}]")
        if arity == 1 or args[0] == args[1]:
            c = args[0]
            one_type = self.lang.one_types[self.types[c - 1] - 1]
            key = (pred, ("x",) if arity == 1 else ("x", "x"))
            return one_type.bits[self.lang.single_var_atom_pos[key]]
        c, d = args
        table = self.lang.two_tables[self.table(c, d) - 1]
        return table.bits[self.lang.two_var_atom_pos[(pred, ("x", "y"))]]

    def true_atoms(self) -> frozenset[GroundAtom]:
        atoms = set()
        for c in range(1, self.n + 1):
            one_type = self.lang.one_types[self.types[c - 1] - 1]
            for bit, (name, args) in zip(one_type.bits, self.lang.single_var_atoms):
                if bit:
                    atoms.add((name, tuple(c for _ in args)))
        for q, r in iter_pairs(self.n):
            table = self.lang.two_tables[self.tables[pair_index(self.n, q, r)] - 1]
            for bit, (name, args) in zip(table.bits, self.lang.two_var_atoms):
                if bit:
                    atoms.add((name, tuple(q if a == "x" else r for a in args)))
        return frozenset(atoms)


@dataclass(frozen=True)
class SufficientStats:
    """1-type counts and canonical 2-type counts of a world.

    `type_counts[i-1]` is the number of elements realizing 1-type i;
    `pair_counts` maps canonical (i, j, l) with i <= j to the number of pairs
    realizing it, where for i = j the table is further canonicalized to
    min(l, dual(l)).  Keys with zero count are absent.
    """

    n: int
    type_counts: tuple[int, ...]
    pair_counts: dict[tuple[int, int, int], int]


def stats(world: World) -> SufficientStats:
    lang = world.lang
    k = [0] * lang.num_one_types
    for t in world.types:
        k[t - 1] += 1
    h: dict[tuple[int, int, int], int] = {}
    for q, r in iter_pairs(world.n):
        i, j, l = world.canonical_pair(q, r)
        if i == j:
            l = min(l, lang.dual(l))
        key = (i, j, l)
        h[key] = h.get(key, 0) + 1
    return SufficientStats(n=world.n, type_counts=tuple(k), pair_counts=h)


def pair_slots(type_counts, i: int, j: int) -> int:
    """Number of unordered element pairs with 1-types i and j (i <= j)."""
    ki = type_counts[i - 1]
    if i == j:
        return ki * (ki - 1) // 2
    return ki * type_counts[j - 1]


# ---------------------------------------------------------------------------
# Construction and restriction
# ---------------------------------------------------------------------------

def world_from_atoms(lang: Language, n: int, true_atoms) -> World:
    """Build the world whose set of true ground atoms is exactly `true_atoms`."""
    atom_set = set()
    for pred, args in true_atoms:
        if not lang.has(pred):
            raise ValidationError(f"unknown predicate {pred}")
        if lang.arity(pred) != len(args):
            raise ValidationError(f"predicate {pred} has arity {lang.arity(pred)}, got {len(args)} arguments")
        for c in args:
            if not 1 <= c <= n:
                raise ValidationError(f"constant {c} outside domain [1..{n}]")
        atom_set.add((pred, tuple(args)))

    types = []
    for c in range(1, n + 1):
        code = 0
        for p, (name, args) in enumerate(lang.single_var_atoms):
            if (name, tuple(c for _ in args)) in atom_set:
                code |= 1 << p
        types.append(code + 1)

    tables = []
    for q, r in iter_pairs(n):
        code = 0
        for p, (name, args) in enumerate(lang.two_var_atoms):
            if (name, tuple(q if a == "x" else r for a in args)) in atom_set:
                code |= 1 << p
        tables.append(code + 1)

    return World(lang=lang, n=n, types=tuple(types), tables=tuple(tables))


def restrict(world: World, subset) -> World:
    """The world induced on `subset`, relabeled to 1..m in the given order."""
    subset = list(subset)
    if not subset:
        raise ValidationError("subset must be non-empty")
    if len(set(subset)) != len(subset):
        raise ValidationError("subset elements must be distinct")
    for c in subset:
        if not 1 <= c <= world.n:
            raise ValidationError(f"element {c} outside domain [1..{world.n}]")
    m = len(subset)
    types = tuple(world.types[c - 1] for c in subset)
    tables = tuple(world.table(subset[a - 1], subset[b - 1]) for a, b in iter_pairs(m))
    return World(lang=world.lang, n=m, types=types, tables=tables)


def enumerate_worlds(lang: Language, n: int, max_atoms: int = ENUMERATION_CAP):
    """Yield every world over [n] exactly once, in a fixed deterministic order.

    The number of worlds is 2**(number of ground atoms); refuse to enumerate
    past `max_atoms` ground atoms.
    """
    num_unary = sum(1 for _, a in lang.predicates if a == 1)
    num_binary = sum(1 for _, a in lang.predicates if a == 2)
    num_ground = num_unary * n + num_binary * n * n
    if num_ground > max_atoms:
        raise EnumerationCapError(
            f"{num_ground} ground atoms exceed the cap of {max_atoms}; "
            f"pass max_atoms explicitly to override"
        )

    def generate():
        u = lang.num_one_types
        b = lang.num_two_tables
        npairs = n * (n - 1) // 2
        for types in product(range(1, u + 1), repeat=n):
            for tables in product(range(1, b + 1), repeat=npairs):
                yield World(lang=lang, n=n, types=types, tables=tables)

    return generate()


# ---------------------------------------------------------------------------
# Ground evaluation of formulas on a world
# ---------------------------------------------------------------------------

def evaluate_ground(formula: Formula, world: World, assignment: dict) -> bool:
    """Evaluate a formula on a world under a variable-to-constant assignment."""
    if isinstance(formula, Atom):
        return world.ground(formula.pred, tuple(assignment[a] for a in formula.args))
    if isinstance(formula, Distinct):
        return assignment[formula.left] != assignment[formula.right]
    if isinstance(formula, Not):
        return not evaluate_ground(formula.inner, world, assignment)
    if isinstance(formula, And):
        return evaluate_ground(formula.left, world, assignment) and evaluate_ground(formula.right, world, assignment)
    if isinstance(formula, Or):
        return evaluate_ground(formula.left, world, assignment) or evaluate_ground(formula.right, world, assignment)
    if isinstance(formula, Implies):
        return (not evaluate_ground(formula.left, world, assignment)) or evaluate_ground(formula.right, world, assignment)
    if isinstance(formula, Iff):
        return evaluate_ground(formula.left, world, assignment) == evaluate_ground(formula.right, world, assignment)
    raise TypeError(f"not a formula node: {formula!r}")


def count_groundings(formula: Formula, world: World) -> int:
    """Number of true groundings over the formula's own variables."""
    variables = sorted(formula.variables())
    n = world.n
    if not variables:
        raise ValidationError("formula has no variables")
    if len(variables) == 1:
        v = variables[0]
        return sum(1 for c in range(1, n + 1) if evaluate_ground(formula, world, {v: c}))
    return sum(
        1
        for c in range(1, n + 1)
        for d in range(1, n + 1)
        if evaluate_ground(formula, world, {"x": c, "y": d})
    )


def satisfies_universally(formula: Formula, world: World) -> bool:
    """True when every grounding over both variables holds (the meaning of forall x y)."""
    n = world.n
    return all(
        evaluate_ground(formula, world, {"x": c, "y": d})
        for c in range(1, n + 1)
        for d in range(1, n + 1)
    )


# ---------------------------------------------------------------------------
# World file format
# ---------------------------------------------------------------------------

_GROUND_ATOM_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\(([0-9, ]+)\)")


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def parse_world(text: str, lang: Language) -> World:
    """Parse the world file format: `domain N`, then whitespace-separated ground atoms."""
    n = None
    atoms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if n is None:
            m = re.fullmatch(r"domain\s+(\d+)", line)
            if m is None:
                raise ParseError("world file must start with 'domain N'", line=lineno)
            n = int(m.group(1))
            continue
        for token in line.split():
            m = _GROUND_ATOM_RE.fullmatch(token)
            if m is None:
                raise ParseError(f"bad ground atom {token!r}", line=lineno)
            args = tuple(int(s) for s in m.group(2).replace(",", " ").split())
            atoms.append((m.group(1), args))
    if n is None:
        raise ParseError("world file must start with 'domain N'")
    return world_from_atoms(lang, n, atoms)


def format_world(world: World) -> str:
    lines = [f"domain {world.n}"]
    for pred, args in sorted(world.true_atoms()):
        lines.append(f"{pred}({','.join(str(c) for c in args)})")
    return "\n".join(lines) + "\n"
