"""Likelihood evaluation and constrained maximum-likelihood fitting.

A *structure* is a network whose clause list is fixed but whose weights are
the free parameter vector.  Because type and pair weights are log-linear in
the weights, the whole objective reduces to two indicator matrices computed
once per structure: entailment of each clause's diagonal copy by each 1-type,
and the two-sided entailment of each clause's off-diagonal copy by each
2-type.

The projectivity constraint (all pair sums equal) is enforced by quadratic
penalty continuation on the squared log pair-sum differences.
"""

import math
from dataclasses import dataclass

import numpy as np

from .blockmodel import BlockModel, fit_block_model
from .errors import NotConvergedError, ValidationError
from .fol import And, Distinct, LiftedInterpretation, evaluate_lifted
from .mln import HARD, MLN
from .worlds import SufficientStats, World, restrict, stats

LAMBDA_SCHEDULE = (1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6)


# ---------------------------------------------------------------------------
# Indicator maps of a structure
# ---------------------------------------------------------------------------

class StructureMaps:
    """Per-clause indicator tensors making weights log-linear.

    `single[i, q]` counts how many single-variable copies of clause q the
    1-type i entails (0 or 1); `pair[i, j, l, q]` counts entailments of the
    two-variable copy of clause q by the 2-type (i, j, l) in both argument
    orders (0, 1, or 2).
    """

    def __init__(self, structure: MLN):
        if not structure.clauses:
            raise ValidationError("structure has no free weight")
        lang = structure.lang
        u, b = lang.num_one_types, lang.num_two_tables
        num_clauses = len(structure.clauses)
        self.lang = lang
        self.theta0 = np.zeros(num_clauses)
        self.single = np.zeros((u, num_clauses))
        self.pair = np.zeros((u, u, b, num_clauses))
        for q, (formula, weight) in enumerate(structure.clauses):
            if weight is HARD:
                raise ValidationError("structures must not contain hard clauses")
            self.theta0[q] = weight
            fvars = formula.variables()
            diagonal = formula.substitute({"y": "x"})
            offdiag = And(formula, Distinct()) if fvars == {"x", "y"} else None
            for i, ti in enumerate(lang.one_types):
                tau = LiftedInterpretation.from_types(lang, ti, ti, lang.two_tables[0])
                if evaluate_lifted(diagonal, tau):
                    self.single[i, q] = 1.0
            if offdiag is None:
                continue
            swapped = offdiag.substitute({"x": "y", "y": "x"})
            for i, ti in enumerate(lang.one_types):
                for j, tj in enumerate(lang.one_types):
                    for l, tl in enumerate(lang.two_tables):
                        tau = LiftedInterpretation.from_types(lang, ti, tj, tl)
                        self.pair[i, j, l, q] = int(evaluate_lifted(offdiag, tau)) + int(
                            evaluate_lifted(swapped, tau)
                        )

    def log_pair_sums(self, theta: np.ndarray) -> np.ndarray:
        """Matrix of log pair sums at the given weights."""
        scores = self.pair @ theta  # (u, u, b)
        hi = scores.max(axis=2)
        return hi + np.log(np.exp(scores - hi[:, :, None]).sum(axis=2))


def _linear_term(maps: StructureMaps, st: SufficientStats) -> np.ndarray:
    vec = np.array(st.type_counts, dtype=float) @ maps.single
    for (i, j, l), count in st.pair_counts.items():
        vec = vec + count * maps.pair[i - 1, j - 1, l - 1]
    return vec


def _softmax(scores: np.ndarray) -> np.ndarray:
    hi = scores.max()
    e = np.exp(scores - hi)
    return e / e.sum()


def projective_log_likelihood(structure: MLN, theta, st: SufficientStats):
    """Value and gradient of the projective log likelihood at `theta`.

    The normalizer uses the closed form for projective networks (sum of type
    weights to the n, pair sum of the first type pair to the number of pairs)
    exactly as the estimation objective states it, even at weights where the
    constraint does not yet hold.
    """
    maps = structure if isinstance(structure, StructureMaps) else StructureMaps(structure)
    theta = np.asarray(theta, dtype=float)
    value, grad = _objective(maps, _linear_term(maps, st), st.n, theta)
    return value, grad


def _objective(maps: StructureMaps, linear: np.ndarray, n: int, theta: np.ndarray):
    npairs = n * (n - 1) // 2
    type_scores = maps.single @ theta  # (u,)
    hi = type_scores.max()
    log_sum_s = hi + math.log(np.exp(type_scores - hi).sum())
    first_scores = maps.pair[0, 0] @ theta  # (b,)
    hi2 = first_scores.max()
    log_f11 = hi2 + math.log(np.exp(first_scores - hi2).sum())
    value = float(linear @ theta - n * log_sum_s - npairs * log_f11)
    grad = (
        linear
        - n * (_softmax(type_scores) @ maps.single)
        - npairs * (_softmax(first_scores) @ maps.pair[0, 0])
    )
    return value, grad


def _penalty(maps: StructureMaps, theta: np.ndarray):
    """Sum of squared log pair-sum gaps to the first pair, with gradient."""
    u = maps.lang.num_one_types
    scores = maps.pair @ theta  # (u, u, b)
    value = 0.0
    grad = np.zeros_like(theta)
    hi = scores[0, 0].max()
    log_f00 = hi + math.log(np.exp(scores[0, 0] - hi).sum())
    g00 = _softmax(scores[0, 0]) @ maps.pair[0, 0]
    for i in range(u):
        for j in range(i, u):
            if i == 0 and j == 0:
                continue
            hi = scores[i, j].max()
            log_f = hi + math.log(np.exp(scores[i, j] - hi).sum())
            diff = log_f - log_f00
            value += diff * diff
            gij = _softmax(scores[i, j]) @ maps.pair[i, j]
            grad += 2.0 * diff * (gij - g00)
    return value, grad


def constraint_residual(maps: StructureMaps, theta: np.ndarray) -> float:
    """Largest absolute log pair-sum gap to the first type pair."""
    log_f = maps.log_pair_sums(theta)
    u = maps.lang.num_one_types
    return max(abs(float(log_f[i, j] - log_f[0, 0])) for i in range(u) for j in range(i, u))


# ---------------------------------------------------------------------------
# Penalty-continuation fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FitResult:
    theta: np.ndarray
    log_likelihood: float
    constraint_residual: float
    iterations: int
    converged: bool
    residual_path: tuple[float, ...]


def fit_projective_mln(
    structure: MLN,
    world: World,
    gtol: float = 1e-8,
    ctol: float = 1e-6,
    max_iterations_per_stage: int = 5000,
    lambdas=LAMBDA_SCHEDULE,
) -> FitResult:
    """Maximize the projective likelihood of one world over the structure weights.

    Each penalty stage runs gradient ascent with a backtracking (and
    re-expanding) line search until the penalized gradient norm drops below
    `gtol` or the iteration cap is hit.
    """
    maps = StructureMaps(structure)
    st = stats(world)
    linear = _linear_term(maps, st)
    theta = maps.theta0.copy()
    total_iterations = 0
    residual_path = []
    grad_ok = False

    for lam in lambdas:

        def penalized(t):
            value, grad = _objective(maps, linear, st.n, t)
            pvalue, pgrad = _penalty(maps, t)
            return value - lam * pvalue, grad - lam * pgrad

        step = 1.0
        value, grad = penalized(theta)
        prev_theta = None
        prev_grad = None
        grad_ok = False
        for _ in range(max_iterations_per_stage):
            gnorm = float(np.linalg.norm(grad))
            if gnorm <= gtol:
                grad_ok = True
                break
            total_iterations += 1
            if prev_grad is not None:
                # Barzilai-Borwein trial step: secant estimate of inverse curvature
                dtheta = theta - prev_theta
                dgrad = grad - prev_grad
                denom = -float(dtheta @ dgrad)
                if denom > 0:
                    bb = float(dtheta @ dtheta) / denom
                    if math.isfinite(bb) and bb > 0:
                        step = bb
            accepted = False
            trial = step
            while trial >= 1e-18:
                candidate = theta + trial * grad
                cand_value, cand_grad = penalized(candidate)
                armijo = cand_value >= value + 1e-4 * trial * gnorm * gnorm
                # near the optimum the value improvement drowns in float noise;
                # accept a step at noise-level value change if it strictly
                # shrinks the gradient (bounds total drift by iterations * noise)
                noise = 1e-12 * max(1.0, abs(value))
                stalled = cand_value >= value - noise and float(np.linalg.norm(cand_grad)) < gnorm
                if armijo or stalled:
                    prev_theta, prev_grad = theta, grad
                    theta, value, grad = candidate, cand_value, cand_grad
                    step = trial * 2.0
                    accepted = True
                    break
                trial *= 0.5
            if not accepted:
                break
        else:
            gnorm = float(np.linalg.norm(grad))
            grad_ok = gnorm <= gtol
        residual_path.append(constraint_residual(maps, theta))

    final_value, _ = _objective(maps, linear, st.n, theta)
    residual = residual_path[-1]
    theta.setflags(write=False)
    return FitResult(
        theta=theta,
        log_likelihood=final_value,
        constraint_residual=residual,
        iterations=total_iterations,
        converged=grad_ok and residual <= ctol,
        residual_path=tuple(residual_path),
    )


# ---------------------------------------------------------------------------
# Dominance of the block-model estimate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DominanceRecord:
    block_model_log_likelihood: float
    projective_log_likelihood: float

    @property
    def margin(self) -> float:
        return self.block_model_log_likelihood - self.projective_log_likelihood


def compare_with_rbm(structure: MLN, world: World, slack: float = 1e-6) -> DominanceRecord:
    """Fit both estimators on one world and check the block model dominates."""
    result = fit_projective_mln(structure, world)
    if not result.converged:
        raise NotConvergedError(
            f"projective fit did not converge (residual {result.constraint_residual:.3g})"
        )
    best = fit_block_model(world)
    record = DominanceRecord(
        block_model_log_likelihood=best.log_prob(world),
        projective_log_likelihood=result.log_likelihood,
    )
    if record.margin < -slack:
        raise ValidationError(
            f"block-model estimate beaten by {-record.margin:.3g}; this should be impossible"
        )
    return record


# ---------------------------------------------------------------------------
# Subsample consistency experiment
# ---------------------------------------------------------------------------

def parameter_ids(lang) -> list[tuple]:
    ids = [("p", i) for i in range(1, lang.num_one_types + 1)]
    for i in range(1, lang.num_one_types + 1):
        for j in range(i, lang.num_one_types + 1):
            for l in range(1, lang.num_two_tables + 1):
                ids.append(("w", i, j, l))
    return ids


def parameter_label(pid: tuple) -> str:
    if pid[0] == "p":
        return f"p[{pid[1]}]"
    return f"w[{pid[1]},{pid[2]},{pid[3]}]"


def _parameter_value(model: BlockModel, pid: tuple) -> float:
    if pid[0] == "p":
        return float(model.type_probs[pid[1] - 1])
    _, i, j, l = pid
    if not model.observed[i - 1, j - 1]:
        return math.nan
    return float(model.table_probs[i - 1, j - 1, l - 1])


@dataclass(frozen=True)
class ParameterSummary:
    mean: float
    standard_error: float
    true_value: float
    count: int
    ok: bool


@dataclass(frozen=True, eq=False)
class ConsistencyReport:
    true_model: BlockModel
    n: int
    m_values: tuple[int, ...]
    seeds: tuple[int, ...]
    estimates: dict  # (m, seed, pid) -> float, NaN for unobserved
    summary: dict  # (m, pid) -> ParameterSummary
    passed: bool


def subsample_consistency_experiment(
    true_model: BlockModel,
    n: int,
    m_values,
    num_seeds: int,
    seed_base: int = 0,
) -> ConsistencyReport:
    """Sample worlds of size n, fit on random m-subsets, and check estimator centering.

    For every parameter and every m, the true value must lie within three
    standard errors of the Monte Carlo mean of the subsample estimates; a
    parameter whose estimates never vary must be matched exactly.
    """
    for m in m_values:
        if not 1 <= m <= n:
            raise ValidationError(f"subsample size {m} outside [1..{n}]")
    true_model.require_valid()
    pids = parameter_ids(true_model.lang)
    seeds = tuple(range(seed_base, seed_base + num_seeds))
    estimates = {}
    for seed in seeds:
        world = true_model.sample(n, seed)
        for m in m_values:
            subset_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, m))))
            subset = sorted(int(c) + 1 for c in subset_rng.choice(n, size=m, replace=False))
            fitted = fit_block_model(restrict(world, subset))
            for pid in pids:
                estimates[(m, seed, pid)] = _parameter_value(fitted, pid)

    summary = {}
    passed = True
    for m in m_values:
        for pid in pids:
            values = [estimates[(m, seed, pid)] for seed in seeds]
            values = [v for v in values if not math.isnan(v)]
            true_value = _parameter_value(true_model, pid)
            count = len(values)
            if count == 0:
                summary[(m, pid)] = ParameterSummary(math.nan, math.nan, true_value, 0, False)
                passed = False
                continue
            mean = sum(values) / count
            if count > 1:
                var = sum((v - mean) ** 2 for v in values) / (count - 1)
                se = math.sqrt(var / count)
            else:
                se = 0.0
            ok = abs(true_value - mean) <= 3.0 * se if se > 0 else abs(true_value - mean) <= 1e-12
            summary[(m, pid)] = ParameterSummary(mean, se, true_value, count, ok)
            passed = passed and ok
    return ConsistencyReport(
        true_model=true_model,
        n=n,
        m_values=tuple(m_values),
        seeds=seeds,
        estimates=estimates,
        summary=summary,
        passed=passed,
    )
