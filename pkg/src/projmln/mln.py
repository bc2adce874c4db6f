"""Markov logic networks over FO2, their parametric normal form, and exact inference.

A network is a list of weighted quantifier-free clauses.  Normalization splits
every genuinely two-variable clause into a diagonal copy (both variables equal)
and an off-diagonal copy conjoined with the distinctness marker, then reads off

  * one multiplicative weight per 1-type (from the single-variable clauses),
  * one multiplicative weight per 2-type (from the two-variable clauses,
    counting both argument orders),

all kept in log space, with -inf encoding the exact zeros introduced by hard
clauses.  The partition function is then a sum over 1-type count vectors
rather than over worlds.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError
from .fol import (
    And,
    Distinct,
    Formula,
    Language,
    evaluate_lifted,
    LiftedInterpretation,
    n_ijl,
    parse_formula,
    parse_language,
    validate_formula,
)
from .util import compositions, format_number, logsumexp, multinomial_coefficient
from .worlds import (
    SufficientStats,
    World,
    count_groundings,
    enumerate_worlds,
    pair_slots,
    satisfies_universally,
    stats,
)


class _Hard:
    """Weight marker for clauses that must hold in every world."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "HARD"


HARD = _Hard()


@dataclass(frozen=True)
class MLN:
    lang: Language
    clauses: tuple[tuple[Formula, object], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple((f, w) for f, w in self.clauses))
        for formula, weight in self.clauses:
            validate_formula(formula, self.lang)
            if weight is not HARD:
                if not isinstance(weight, (int, float)) or not math.isfinite(weight):
                    raise ValidationError(f"clause weight must be a finite real or HARD, got {weight!r}")


@dataclass(frozen=True, eq=False)
class NormalForm:
    """The (type weight, pair weight, pair sum) parameterization of an MLN.

    All arrays are log-valued with -inf for hard zeros.  `log_pair_weight` is
    the full (u, u, b) tensor; entry (i, j, l) always equals entry
    (j, i, dual(l)).  `log_pair_sum[i, j]` is log of the sum over tables of
    the pair weight.
    """

    lang: Language
    log_type_weight: np.ndarray
    log_pair_weight: np.ndarray
    log_pair_sum: np.ndarray

    @property
    def admissible_types(self) -> np.ndarray:
        return self.log_type_weight > -np.inf

    @property
    def admissible_pair_types(self) -> np.ndarray:
        return self.log_pair_weight > -np.inf

    def type_weights(self) -> np.ndarray:
        return np.exp(self.log_type_weight)

    def pair_weights(self) -> np.ndarray:
        return np.exp(self.log_pair_weight)

    def pair_sums(self) -> np.ndarray:
        return np.exp(self.log_pair_sum)


def split_clauses(mln: MLN) -> tuple[list, list]:
    """Theorem-style preprocessing of the clause list.

    Returns (single, pair) where `single` holds (formula-in-x, weight) clauses
    and `pair` holds (formula, weight) clauses entailing x != y.  A clause
    using both variables contributes one entry to each list; a clause using
    only y is renamed to x.
    """
    single = []
    pair = []
    for formula, weight in mln.clauses:
        fvars = formula.variables()
        if fvars <= {"x"}:
            single.append((formula, weight))
        elif fvars <= {"y"}:
            single.append((formula.substitute({"y": "x"}), weight))
        else:
            single.append((formula.substitute({"y": "x"}), weight))
            pair.append((And(formula, Distinct()), weight))
    return single, pair


def normalize(mln: MLN) -> NormalForm:
    lang = mln.lang
    u, b = lang.num_one_types, lang.num_two_tables
    single, pair = split_clauses(mln)

    log_s = np.zeros(u)
    for i, one_type in enumerate(lang.one_types):
        tau = LiftedInterpretation.from_types(lang, one_type, one_type, lang.two_tables[0])
        for formula, weight in single:
            holds = evaluate_lifted(formula, tau)
            if weight is HARD:
                if not holds:
                    log_s[i] = -np.inf
            elif holds:
                log_s[i] += weight

    log_t = np.zeros((u, u, b))
    for i, ti in enumerate(lang.one_types):
        for j, tj in enumerate(lang.one_types):
            if log_s[i] == -np.inf or log_s[j] == -np.inf:
                log_t[i, j, :] = -np.inf
                continue
            for l, tl in enumerate(lang.two_tables):
                tau = LiftedInterpretation.from_types(lang, ti, tj, tl)
                acc = 0.0
                for formula, weight in pair:
                    fwd = evaluate_lifted(formula, tau)
                    bwd = evaluate_lifted(formula.substitute({"x": "y", "y": "x"}), tau)
                    if weight is HARD:
                        # both groundings of the pair must hold
                        if not (fwd and bwd):
                            acc = -np.inf
                            break
                    else:
                        acc += weight * (int(fwd) + int(bwd))
                log_t[i, j, l] = acc

    log_f = np.full((u, u), -np.inf)
    for i in range(u):
        for j in range(u):
            log_f[i, j] = logsumexp(list(log_t[i, j, :]))

    for arr in (log_s, log_t, log_f):
        arr.setflags(write=False)
    return NormalForm(lang=lang, log_type_weight=log_s, log_pair_weight=log_t, log_pair_sum=log_f)


# ---------------------------------------------------------------------------
# Weights, partition function, probabilities
# ---------------------------------------------------------------------------

def world_log_weight(nf: NormalForm, st: SufficientStats) -> float:
    """Log of the unnormalized world weight from its sufficient statistics."""
    total = 0.0
    for i, count in enumerate(st.type_counts):
        if count == 0:
            continue
        ls = nf.log_type_weight[i]
        if ls == -np.inf:
            return -math.inf
        total += count * ls
    for (i, j, l), count in st.pair_counts.items():
        lt = nf.log_pair_weight[i - 1, j - 1, l - 1]
        if lt == -np.inf:
            return -math.inf
        total += count * lt
    return total


def partition_function(nf: NormalForm, n: int) -> float:
    """Log partition function via the sum over 1-type count vectors."""
    if n < 1:
        raise ValidationError("domain size must be >= 1")
    u = nf.lang.num_one_types
    log_s = nf.log_type_weight
    log_f = nf.log_pair_sum
    terms = []
    for k in compositions(u, n):
        log_term = math.log(multinomial_coefficient(k))
        dead = False
        for i in range(u):
            if k[i] == 0:
                continue
            if log_s[i] == -np.inf:
                dead = True
                break
            log_term += k[i] * log_s[i]
        if dead:
            continue
        for i in range(u):
            if k[i] == 0:
                continue
            for j in range(i, u):
                if k[j] == 0:
                    continue
                slots = pair_slots(k, i + 1, j + 1)
                if slots == 0:
                    continue
                if log_f[i, j] == -np.inf:
                    dead = True
                    break
                log_term += slots * log_f[i, j]
            if dead:
                break
        if not dead:
            terms.append(log_term)
    return logsumexp(terms)


def partition_function_oracle(mln: MLN, n: int, max_atoms: int = 24) -> float:
    """Brute-force log partition function: sum world weights over all worlds."""
    nf = normalize(mln)
    terms = [world_log_weight(nf, stats(w)) for w in enumerate_worlds(mln.lang, n, max_atoms)]
    return logsumexp(terms)


def world_probability(nf: NormalForm, world: World) -> float:
    return math.exp(world_log_weight(nf, stats(world)) - partition_function(nf, world.n))


def grounding_log_weight(mln: MLN, world: World) -> float:
    """Log weight straight from the defining sum of weighted true grounding counts.

    Independent of the normal form: used to check that normalization preserves
    the distribution.  Hard clauses send violating worlds to -inf.
    """
    total = 0.0
    for formula, weight in mln.clauses:
        if weight is HARD:
            fvars = formula.variables()
            full = world.n ** 2 if len(fvars) == 2 else world.n
            if count_groundings(formula, world) != full:
                return -math.inf
        else:
            total += weight * count_groundings(formula, world)
    return total


# ---------------------------------------------------------------------------
# First-order model counting
# ---------------------------------------------------------------------------

def fomc(formula: Formula, lang: Language, n: int) -> int:
    """Exact number of worlds over [n] satisfying the universal closure of `formula`."""
    if n < 1:
        raise ValidationError("domain size must be >= 1")
    validate_formula(formula, lang)
    u = lang.num_one_types
    diag = formula.substitute({"y": "x"})
    admissible = []
    for one_type in lang.one_types:
        tau = LiftedInterpretation.from_types(lang, one_type, one_type, lang.two_tables[0])
        admissible.append(evaluate_lifted(diag, tau))

    counts = {}
    for i in range(u):
        for j in range(i, u):
            if admissible[i] and admissible[j]:
                counts[(i, j)] = sum(
                    n_ijl(formula, lang, lang.one_types[i], lang.one_types[j], tl)
                    for tl in lang.two_tables
                )

    total = 0
    for k in compositions(u, n):
        if any(k[i] > 0 and not admissible[i] for i in range(u)):
            continue
        term = multinomial_coefficient(k)
        for i in range(u):
            if k[i] == 0:
                continue
            for j in range(i, u):
                if k[j] == 0:
                    continue
                slots = pair_slots(k, i + 1, j + 1)
                if slots:
                    term *= counts[(i, j)] ** slots
        total += term
    return total


def fomc_oracle(formula: Formula, lang: Language, n: int, max_atoms: int = 24) -> int:
    """Count satisfying worlds by exhaustive enumeration."""
    return sum(1 for w in enumerate_worlds(lang, n, max_atoms) if satisfies_universally(formula, w))


# ---------------------------------------------------------------------------
# MLN file format
# ---------------------------------------------------------------------------

def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def parse_mln(text: str) -> MLN:
    """Parse an MLN file: declaration lines, then `WEIGHT :: FORMULA` clause lines."""
    decl_lines = []
    clause_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if line and "::" in line:
            clause_lines.append((lineno, line))
            decl_lines.append("")  # keep declaration line numbers aligned
        else:
            decl_lines.append(raw)
    lang = parse_language("\n".join(decl_lines))
    clauses = []
    for lineno, line in clause_lines:
        head, _, body = line.partition("::")
        head = head.strip()
        body = body.strip()
        if head == "HARD":
            weight = HARD
        else:
            if not re.fullmatch(r"[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?", head):
                raise ParseError(f"bad clause weight {head!r}", line=lineno)
            weight = float(head)
        try:
            formula = parse_formula(body, lang)
        except ParseError as exc:
            raise ParseError(f"in clause on line {lineno}: {exc}") from exc
        clauses.append((formula, weight))
    return MLN(lang=lang, clauses=tuple(clauses))


def format_mln(mln: MLN) -> str:
    lines = [f"predicate {name}/{arity}" for name, arity in mln.lang.predicates]
    for formula, weight in mln.clauses:
        head = "HARD" if weight is HARD else format_number(weight)
        lines.append(f"{head} :: {formula}")
    return "\n".join(lines) + "\n"
