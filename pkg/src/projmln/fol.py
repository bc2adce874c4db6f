"""FO2 language declarations, formula syntax, and the 1-type / 2-table machinery.

A language fixes an ordered vocabulary of unary and binary predicate symbols.
From it we derive two atom lists:

  * single-variable atoms: P(x) for unary P and R(x,x) for binary R;
  * two-variable atoms: R(x,y) and R(y,x) for binary R.

Both lists are sorted lexicographically by (predicate name, argument tuple).
A 1-type is a truth assignment to the single-variable atoms, a 2-table a truth
assignment to the two-variable atoms; indices are 1-based with the first atom
acting as the least significant bit, so `index = 1 + bits-as-binary`.
"""

from dataclasses import dataclass
from functools import cached_property
import re

from .errors import ParseError, ValidationError

VARIABLES = ("x", "y")


# ---------------------------------------------------------------------------
# Language
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Language:
    """An FO2 vocabulary: ordered (name, arity) pairs, arity 1 or 2."""

    predicates: tuple[tuple[str, int], ...]

    def __post_init__(self):
        preds = tuple((str(n), int(a)) for n, a in self.predicates)
        seen = set()
        for name, arity in preds:
            if arity not in (1, 2):
                raise ValidationError(f"predicate {name}/{arity}: arity must be 1 or 2")
            if name in seen:
                raise ValidationError(f"duplicate predicate name {name}")
            seen.add(name)
        object.__setattr__(self, "predicates", tuple(sorted(preds)))

    def arity(self, name: str) -> int:
        for pname, parity in self.predicates:
            if pname == name:
                return parity
        raise ValidationError(f"unknown predicate {name}")

    def has(self, name: str) -> bool:
        return any(pname == name for pname, _ in self.predicates)

    @cached_property
    def single_var_atoms(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        atoms = []
        for name, arity in self.predicates:
            atoms.append((name, ("x",) if arity == 1 else ("x", "x")))
        return tuple(sorted(atoms))

    @cached_property
    def two_var_atoms(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        atoms = []
        for name, arity in self.predicates:
            if arity == 2:
                atoms.append((name, ("x", "y")))
                atoms.append((name, ("y", "x")))
        return tuple(sorted(atoms))

    @cached_property
    def single_var_atom_pos(self) -> dict:
        return {atom: p for p, atom in enumerate(self.single_var_atoms)}

    @cached_property
    def two_var_atom_pos(self) -> dict:
        return {atom: p for p, atom in enumerate(self.two_var_atoms)}

    @property
    def num_one_types(self) -> int:
        return 1 << len(self.single_var_atoms)

    @property
    def num_two_tables(self) -> int:
        return 1 << len(self.two_var_atoms)

    @cached_property
    def one_types(self) -> tuple["OneType", ...]:
        m = len(self.single_var_atoms)
        return tuple(
            OneType(index=code + 1, bits=tuple((code >> p) & 1 == 1 for p in range(m)))
            for code in range(self.num_one_types)
        )

    @cached_property
    def two_tables(self) -> tuple["TwoTable", ...]:
        atoms = self.two_var_atoms
        m = len(atoms)
        # position of the x/y-swapped counterpart of each two-variable atom
        swapped = [atoms.index((name, (args[1], args[0]))) for name, args in atoms]
        tables = []
        for code in range(self.num_two_tables):
            bits = tuple((code >> p) & 1 == 1 for p in range(m))
            dual_code = sum((1 << p) for p in range(m) if bits[swapped[p]])
            tables.append(TwoTable(index=code + 1, bits=bits, dual_index=dual_code + 1))
        return tuple(tables)

    def dual(self, table_index: int) -> int:
        return self.two_tables[table_index - 1].dual_index


@dataclass(frozen=True)
class OneType:
    """Maximally consistent conjunction of single-variable literals."""

    index: int
    bits: tuple[bool, ...]

    def as_formula(self, lang: "Language", var: str = "x") -> "Formula":
        lits = []
        for bit, (name, args) in zip(self.bits, lang.single_var_atoms):
            atom = Atom(name, tuple(var for _ in args))
            lits.append(atom if bit else Not(atom))
        return conjoin(lits)


@dataclass(frozen=True)
class TwoTable:
    """Maximally consistent conjunction of literals with exactly two variables."""

    index: int
    bits: tuple[bool, ...]
    dual_index: int

    def as_formula(self, lang: "Language") -> "Formula":
        lits = []
        for bit, (name, args) in zip(self.bits, lang.two_var_atoms):
            atom = Atom(name, args)
            lits.append(atom if bit else Not(atom))
        return conjoin(lits)


# ---------------------------------------------------------------------------
# Formula AST
# ---------------------------------------------------------------------------

class Formula:
    """Base class of quantifier-free FO2 formula nodes."""

    def variables(self) -> frozenset:
        raise NotImplementedError

    def substitute(self, mapping: dict) -> "Formula":
        raise NotImplementedError

    def atom_nodes(self) -> tuple:
        raise NotImplementedError

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple[str, ...]

    def variables(self):
        return frozenset(self.args)

    def substitute(self, mapping):
        return Atom(self.pred, tuple(mapping.get(a, a) for a in self.args))

    def atom_nodes(self):
        return (self,)

    def __str__(self):
        return f"{self.pred}({','.join(self.args)})"


@dataclass(frozen=True)
class Distinct(Formula):
    """The x != y marker; true exactly when its two arguments differ."""

    left: str = "x"
    right: str = "y"

    def variables(self):
        return frozenset((self.left, self.right))

    def substitute(self, mapping):
        return Distinct(mapping.get(self.left, self.left), mapping.get(self.right, self.right))

    def atom_nodes(self):
        return ()

    def __str__(self):
        return f"({self.left} != {self.right})"


@dataclass(frozen=True)
class Not(Formula):
    inner: Formula

    def variables(self):
        return self.inner.variables()

    def substitute(self, mapping):
        return Not(self.inner.substitute(mapping))

    def atom_nodes(self):
        return self.inner.atom_nodes()

    def __str__(self):
        return f"!{self.inner}"


class _Binary(Formula):
    symbol = "?"

    def variables(self):
        return self.left.variables() | self.right.variables()

    def substitute(self, mapping):
        return type(self)(self.left.substitute(mapping), self.right.substitute(mapping))

    def atom_nodes(self):
        return self.left.atom_nodes() + self.right.atom_nodes()

    def __str__(self):
        return f"({self.left} {self.symbol} {self.right})"


@dataclass(frozen=True)
class And(_Binary):
    left: Formula
    right: Formula
    symbol = "&"


@dataclass(frozen=True)
class Or(_Binary):
    left: Formula
    right: Formula
    symbol = "|"


@dataclass(frozen=True)
class Implies(_Binary):
    left: Formula
    right: Formula
    symbol = "->"


@dataclass(frozen=True)
class Iff(_Binary):
    left: Formula
    right: Formula
    symbol = "<->"


def conjoin(parts) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("cannot conjoin zero formulas")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def validate_formula(formula: Formula, lang: Language) -> None:
    """Check every atom against the language; raise ValidationError otherwise."""
    for atom in formula.atom_nodes():
        if not lang.has(atom.pred):
            raise ValidationError(f"unknown predicate {atom.pred}")
        if lang.arity(atom.pred) != len(atom.args):
            raise ValidationError(
                f"predicate {atom.pred} has arity {lang.arity(atom.pred)}, got {len(atom.args)} arguments"
            )
        for a in atom.args:
            if a not in VARIABLES:
                raise ValidationError(f"variable {a} is not allowed (only x, y)")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_DECL_RE = re.compile(r"^predicate\s+([A-Za-z_][A-Za-z0-9_]*)\s*/\s*(\d+)\s*$")


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def parse_language(text: str) -> Language:
    """Parse `predicate NAME/ARITY` declaration lines into a Language."""
    preds = []
    names = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _DECL_RE.match(line)
        if m is None:
            raise ParseError(f"expected 'predicate NAME/ARITY', got {line!r}", line=lineno, column=1)
        name, arity = m.group(1), int(m.group(2))
        if arity not in (1, 2):
            raise ParseError(f"predicate {name}/{arity}: arity must be 1 or 2", line=lineno)
        if name in names:
            raise ParseError(f"duplicate predicate name {name}", line=lineno)
        names.add(name)
        preds.append((name, arity))
    return Language(tuple(preds))


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><->|->|!=|[!&|(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", column=pos + 1)
        group = "name" if m.group("name") else "op"
        tokens.append((m.group(group), m.start(group) + 1))
        pos = m.end()
    return tokens


class _FormulaParser:
    """Recursive-descent parser for the ASCII connective grammar.

    Precedence (tightest first): ! > & > | > -> > <->, with -> right
    associative and <-> left associative.
    """

    def __init__(self, text: str, lang: Language):
        self.tokens = _tokenize(text)
        self.lang = lang
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def next(self):
        if self.pos >= len(self.tokens):
            raise ParseError("unexpected end of formula")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, symbol):
        tok, col = self.next()
        if tok != symbol:
            raise ParseError(f"expected {symbol!r}, got {tok!r}", column=col)

    def parse(self) -> Formula:
        f = self.parse_iff()
        if self.pos != len(self.tokens):
            tok, col = self.tokens[self.pos]
            raise ParseError(f"unexpected trailing token {tok!r}", column=col)
        return f

    def parse_iff(self):
        f = self.parse_implies()
        while self.peek() == "<->":
            self.next()
            f = Iff(f, self.parse_implies())
        return f

    def parse_implies(self):
        f = self.parse_or()
        if self.peek() == "->":
            self.next()
            return Implies(f, self.parse_implies())
        return f

    def parse_or(self):
        f = self.parse_and()
        while self.peek() == "|":
            self.next()
            f = Or(f, self.parse_and())
        return f

    def parse_and(self):
        f = self.parse_unary()
        while self.peek() == "&":
            self.next()
            f = And(f, self.parse_unary())
        return f

    def parse_unary(self):
        tok, col = self.next()
        if tok == "!":
            return Not(self.parse_unary())
        if tok == "(":
            f = self.parse_iff()
            self.expect(")")
            return f
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            if self.peek() == "(":
                return self.parse_atom(tok, col)
            if self.peek() == "!=":
                self.next()
                other, ocol = self.next()
                for v, c in ((tok, col), (other, ocol)):
                    if v not in VARIABLES:
                        raise ParseError(f"variable {v} is not allowed (only x, y)", column=c)
                return Distinct(tok, other)
            raise ParseError(f"bare identifier {tok!r} (expected an atom or distinctness test)", column=col)
        raise ParseError(f"unexpected token {tok!r}", column=col)

    def parse_atom(self, name, col):
        if not self.lang.has(name):
            raise ParseError(f"unknown predicate {name}", column=col)
        self.expect("(")
        args = []
        while True:
            tok, tcol = self.next()
            if tok not in VARIABLES:
                raise ParseError(f"variable {tok} is not allowed (only x, y)", column=tcol)
            args.append(tok)
            tok, tcol = self.next()
            if tok == ")":
                break
            if tok != ",":
                raise ParseError(f"expected ',' or ')', got {tok!r}", column=tcol)
        arity = self.lang.arity(name)
        if arity != len(args):
            raise ParseError(f"predicate {name} has arity {arity}, got {len(args)} arguments", column=col)
        return Atom(name, tuple(args))


def parse_formula(text: str, lang: Language) -> Formula:
    """Parse a formula in ASCII syntax, validated against `lang`."""
    return _FormulaParser(text, lang).parse()


# ---------------------------------------------------------------------------
# Lifted interpretations and the 2-type model count
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftedInterpretation:
    """A total boolean assignment to the first-order atoms over {x, y}."""

    assignment: dict

    @staticmethod
    def from_types(lang: Language, i: OneType, j: OneType, l: TwoTable) -> "LiftedInterpretation":
        """The single interpretation determined by the 2-type i(x), j(y), l(x,y)."""
        tau = {}
        for bit, (name, args) in zip(i.bits, lang.single_var_atoms):
            tau[(name, args)] = bit
        for bit, (name, args) in zip(j.bits, lang.single_var_atoms):
            tau[(name, tuple("y" for _ in args))] = bit
        for bit, (name, args) in zip(l.bits, lang.two_var_atoms):
            tau[(name, args)] = bit
        return LiftedInterpretation(tau)

    def value(self, pred: str, args: tuple[str, ...]) -> bool:
        return self.assignment[(pred, args)]


def evaluate_lifted(formula: Formula, tau: LiftedInterpretation) -> bool:
    """Classical propositional evaluation; Distinct is true for distinct arguments."""
    if isinstance(formula, Atom):
        return tau.value(formula.pred, formula.args)
    if isinstance(formula, Distinct):
        return formula.left != formula.right
    if isinstance(formula, Not):
        return not evaluate_lifted(formula.inner, tau)
    if isinstance(formula, And):
        return evaluate_lifted(formula.left, tau) and evaluate_lifted(formula.right, tau)
    if isinstance(formula, Or):
        return evaluate_lifted(formula.left, tau) or evaluate_lifted(formula.right, tau)
    if isinstance(formula, Implies):
        return (not evaluate_lifted(formula.left, tau)) or evaluate_lifted(formula.right, tau)
    if isinstance(formula, Iff):
        return evaluate_lifted(formula.left, tau) == evaluate_lifted(formula.right, tau)
    raise TypeError(f"not a formula node: {formula!r}")


def closure_parts(formula: Formula) -> tuple[Formula, Formula, Formula, Formula]:
    """The four substitution instances whose conjunction closes the formula over {x, y}."""
    xx = formula.substitute({"y": "x"})
    xy = formula
    yx = formula.substitute({"x": "y", "y": "x"})
    yy = formula.substitute({"x": "y"})
    return xx, xy, yx, yy


def n_ijl(formula: Formula, lang: Language, i: OneType, j: OneType, l: TwoTable) -> int:
    """Number of lifted interpretations extending 2-type (i, j, l) that satisfy
    the closure of `formula` over both variables.  The 2-type determines every
    atom, so the count is 0 or 1.
    """
    tau = LiftedInterpretation.from_types(lang, i, j, l)
    return 1 if all(evaluate_lifted(part, tau) for part in closure_parts(formula)) else 0


def n_ij(formula: Formula, lang: Language, i: OneType, j: OneType) -> int:
    """Number of admissible 2-tables between 1-types i and j: sum of n_ijl over l."""
    return sum(n_ijl(formula, lang, i, j, l) for l in lang.two_tables)
