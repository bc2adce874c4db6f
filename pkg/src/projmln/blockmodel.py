"""The relational block model: the generative form of projective two-variable MLNs.

Elements draw 1-types i.i.d. from a type distribution; each unordered pair
draws its 2-table from a distribution conditioned on the endpoint types.  The
table tensor is stored in full (u, u, b) form with entry (i, j, l) equal to
entry (j, i, dual(l)); for i = j the row must additionally be invariant under
dualization, since an i-i pair has no distinguished orientation.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotProjectiveError, ParseError, ValidationError
from .fol import And, Distinct, Language, Not, parse_language
from .mln import HARD, MLN, NormalForm
from .projectivity import DEFAULT_TOLERANCE, check_projective
from .util import format_number, iter_pairs, logsumexp
from .worlds import World, pair_slots, stats

ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class BlockModel:
    """Parameters (type distribution, conditional table tensor) of a block model.

    `observed` marks type pairs whose table row carries information; rows for
    pairs never seen by an estimator are filled uniformly and flagged False.
    """

    lang: Language
    type_probs: np.ndarray
    table_probs: np.ndarray
    observed: np.ndarray = field(default=None)

    def __post_init__(self):
        u, b = self.lang.num_one_types, self.lang.num_two_tables
        p = np.array(self.type_probs, dtype=float).reshape(u)
        w = np.array(self.table_probs, dtype=float).reshape(u, u, b)
        obs = self.observed
        obs = np.ones((u, u), dtype=bool) if obs is None else np.array(obs, dtype=bool).reshape(u, u)
        for arr in (p, w, obs):
            arr.setflags(write=False)
        object.__setattr__(self, "type_probs", p)
        object.__setattr__(self, "table_probs", w)
        object.__setattr__(self, "observed", obs)

    # -- validation ---------------------------------------------------------

    def validate(self) -> list[str]:
        """All invariant violations, checked to 1e-12; empty list when valid."""
        lang = self.lang
        u, b = lang.num_one_types, lang.num_two_tables
        p, w = self.type_probs, self.table_probs
        problems = []
        if (p < -ATOL).any() or (p > 1 + ATOL).any():
            problems.append("type probabilities must lie in [0, 1]")
        if abs(float(p.sum()) - 1.0) > ATOL:
            problems.append(f"type probabilities sum to {float(p.sum()):.15g}, not 1")
        if (w < -ATOL).any() or (w > 1 + ATOL).any():
            problems.append("table probabilities must lie in [0, 1]")
        for i in range(u):
            for j in range(i, u):
                row_sum = float(w[i, j].sum())
                if abs(row_sum - 1.0) > ATOL:
                    problems.append(f"table row ({i + 1},{j + 1}) sums to {row_sum:.15g}, not 1")
        for i in range(u):
            for l in range(b):
                dl = lang.dual(l + 1) - 1
                if abs(w[i, i, l] - w[i, i, dl]) > ATOL:
                    problems.append(
                        f"table row ({i + 1},{i + 1}) breaks dual symmetry at table {l + 1}: "
                        f"{w[i, i, l]:.15g} != {w[i, i, dl]:.15g}"
                    )
        for i in range(u):
            for j in range(i + 1, u):
                for l in range(b):
                    dl = lang.dual(l + 1) - 1
                    if abs(w[i, j, l] - w[j, i, dl]) > ATOL:
                        problems.append(
                            f"tensor entries ({i + 1},{j + 1},{l + 1}) and its flipped dual disagree"
                        )
        return problems

    def require_valid(self) -> "BlockModel":
        problems = self.validate()
        if problems:
            raise ValidationError("invalid block model: " + "; ".join(problems))
        return self

    # -- probability and sampling -------------------------------------------

    def log_prob(self, world: World) -> float:
        """Log probability of a world; -inf when it realizes a zero parameter."""
        if world.lang != self.lang:
            raise ValidationError("world language does not match the model")
        st = stats(world)
        total = 0.0
        for i, count in enumerate(st.type_counts):
            if count == 0:
                continue
            p = self.type_probs[i]
            if p == 0.0:
                return -math.inf
            total += count * math.log(p)
        for (i, j, l), count in st.pair_counts.items():
            w = self.table_probs[i - 1, j - 1, l - 1]
            if w == 0.0:
                return -math.inf
            total += count * math.log(w)
        return total

    def sample(self, n: int, seed: int) -> World:
        """Draw a world of size n; identical seeds give identical worlds.

        Uses a counter-based generator; the n node draws come first, then one
        draw per pair in row-major order, so output is reproducible.
        """
        if n < 1:
            raise ValidationError("domain size must be >= 1")
        self.require_valid()
        u, b = self.lang.num_one_types, self.lang.num_two_tables
        rng = np.random.Generator(np.random.Philox(key=seed))
        node_u = rng.random(n)
        pair_u = rng.random(n * (n - 1) // 2)

        cum_p = np.cumsum(self.type_probs)
        types = np.minimum(np.searchsorted(cum_p, node_u, side="right"), u - 1) + 1

        qs, rs = np.triu_indices(n, k=1)  # row-major pair order
        rows = np.cumsum(self.table_probs, axis=2)[types[qs] - 1, types[rs] - 1]
        tables = np.minimum((rows <= pair_u[:, None]).sum(axis=1), b - 1) + 1

        return World(lang=self.lang, n=n, types=tuple(int(t) for t in types), tables=tuple(int(t) for t in tables))

    # -- conversion to a network --------------------------------------------

    def to_mln(self) -> MLN:
        """A network whose distribution equals this model at every domain size.

        One clause per 1-type weighted by its log probability and one per
        canonical 2-type weighted by the log table probability, halved for
        same-type pairs where both argument orders hit the same clause set.
        Zero-probability parameters become hard exclusion clauses; weight-zero
        clauses are dropped.
        """
        self.require_valid()
        lang = self.lang
        clauses = []
        for one_type in lang.one_types:
            p = self.type_probs[one_type.index - 1]
            formula = one_type.as_formula(lang)
            if p == 0.0:
                clauses.append((Not(formula), HARD))
            elif p < 1.0:
                clauses.append((formula, math.log(p)))
        for ti in lang.one_types:
            for tj in lang.one_types:
                if ti.index > tj.index:
                    continue
                for tl in lang.two_tables:
                    w = self.table_probs[ti.index - 1, tj.index - 1, tl.index - 1]
                    formula = And(
                        And(And(ti.as_formula(lang, "x"), tj.as_formula(lang, "y")), tl.as_formula(lang)),
                        Distinct(),
                    )
                    if w == 0.0:
                        clauses.append((Not(formula), HARD))
                    elif w < 1.0:
                        weight = math.log(w)
                        if ti.index == tj.index:
                            weight *= 0.5
                        clauses.append((formula, weight))
        return MLN(lang=lang, clauses=tuple(clauses))


def block_model_from_normal_form(nf: NormalForm, tol: float = DEFAULT_TOLERANCE) -> BlockModel:
    """Renormalize a projective network into its block model.

    Type probabilities are the type weights over their sum; each table row is
    the pair weights over the pair sum.  Raises NotProjectiveError (reporting
    the spread) when the pair sums disagree.
    """
    verdict = check_projective(nf, tol)
    if not verdict.projective:
        raise NotProjectiveError(verdict.spread)
    lang = nf.lang
    u, b = lang.num_one_types, lang.num_two_tables
    log_sum = logsumexp([v for v in nf.log_type_weight if v > -np.inf])
    p = np.array([math.exp(v - log_sum) if v > -np.inf else 0.0 for v in nf.log_type_weight])
    w = np.full((u, u, b), 1.0 / b)
    observed = np.zeros((u, u), dtype=bool)
    for i in range(u):
        for j in range(u):
            if nf.log_pair_sum[i, j] == -np.inf:
                continue  # only reachable via hard-excluded types; keep uniform fill
            observed[i, j] = True
            for l in range(b):
                lt = nf.log_pair_weight[i, j, l]
                w[i, j, l] = math.exp(lt - nf.log_pair_sum[i, j]) if lt > -np.inf else 0.0
    return BlockModel(lang=lang, type_probs=p, table_probs=w, observed=observed)


def fit_block_model(world: World) -> BlockModel:
    """Closed-form maximum likelihood estimate from one observed world.

    Type probabilities are relative frequencies; each observed table row is
    the relative pair frequencies, with same-type counts split evenly between
    a table and its dual.  Rows for type pairs with no element pair are filled
    uniformly and flagged unobserved.
    """
    lang = world.lang
    u, b = lang.num_one_types, lang.num_two_tables
    st = stats(world)
    p = np.array([c / world.n for c in st.type_counts])
    w = np.full((u, u, b), 1.0 / b)
    observed = np.zeros((u, u), dtype=bool)
    for i in range(1, u + 1):
        for j in range(i, u + 1):
            slots = pair_slots(st.type_counts, i, j)
            if slots == 0:
                continue
            observed[i - 1, j - 1] = True
            observed[j - 1, i - 1] = True
            w[i - 1, j - 1, :] = 0.0
            w[j - 1, i - 1, :] = 0.0
    for (i, j, l), count in st.pair_counts.items():
        slots = pair_slots(st.type_counts, i, j)
        if i < j:
            w[i - 1, j - 1, l - 1] = count / slots
            w[j - 1, i - 1, lang.dual(l) - 1] = count / slots
        else:
            dl = lang.dual(l)
            if dl == l:
                w[i - 1, i - 1, l - 1] = count / slots
            else:
                w[i - 1, i - 1, l - 1] = count / (2 * slots)
                w[i - 1, i - 1, dl - 1] = count / (2 * slots)
    return BlockModel(lang=lang, type_probs=p, table_probs=w, observed=observed)


# ---------------------------------------------------------------------------
# Parameter file format
# ---------------------------------------------------------------------------

def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def parse_block_model(text: str) -> BlockModel:
    """Parse the parameter file: declarations, `p I V` lines, `w I J L V` lines."""
    decl_lines = []
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if line and (line.startswith("p ") or line.startswith("w ")):
            entries.append((lineno, line.split()))
            decl_lines.append("")
        else:
            decl_lines.append(raw)
    lang = parse_language("\n".join(decl_lines))
    u, b = lang.num_one_types, lang.num_two_tables
    p = np.zeros(u)
    w = np.zeros((u, u, b))
    for lineno, parts in entries:
        try:
            if parts[0] == "p":
                if len(parts) != 3:
                    raise ValueError
                i, value = int(parts[1]), float(parts[2])
                if not 1 <= i <= u:
                    raise ParseError(f"1-type index {i} outside [1..{u}]", line=lineno)
                p[i - 1] = value
            else:
                if len(parts) != 5:
                    raise ValueError
                i, j, l, value = int(parts[1]), int(parts[2]), int(parts[3]), float(parts[4])
                if not (1 <= i <= u and 1 <= j <= u and 1 <= l <= b):
                    raise ParseError(f"index ({i},{j},{l}) out of range", line=lineno)
                if i > j:
                    raise ParseError(f"w entries must use canonical order i <= j, got ({i},{j})", line=lineno)
                w[i - 1, j - 1, l - 1] = value
                w[j - 1, i - 1, lang.dual(l) - 1] = value
        except (ValueError, IndexError):
            raise ParseError(f"bad parameter line {' '.join(parts)!r}", line=lineno) from None
    model = BlockModel(lang=lang, type_probs=p, table_probs=w)
    return model.require_valid()


def format_block_model(model: BlockModel) -> str:
    lang = model.lang
    lines = [f"predicate {name}/{arity}" for name, arity in lang.predicates]
    for i in range(lang.num_one_types):
        lines.append(f"p {i + 1} {format_number(float(model.type_probs[i]))}")
    for i in range(lang.num_one_types):
        for j in range(i, lang.num_one_types):
            note = "" if model.observed[i, j] else "  # unobserved"
            for l in range(lang.num_two_tables):
                value = format_number(float(model.table_probs[i, j, l]))
                lines.append(f"w {i + 1} {j + 1} {l + 1} {value}{note}")
    return "\n".join(lines) + "\n"
