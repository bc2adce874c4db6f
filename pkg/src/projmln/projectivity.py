"""Deciding projectivity and verifying it against brute-force marginalization.

A two-variable network is projective exactly when the per-pair weight sums
agree across all pairs of admissible 1-types.  The decision procedure compares
those sums in log space; the semantic verifier marginalizes the size-n
distribution onto [m] by exhaustive enumeration and compares with the size-m
distribution directly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .mln import MLN, NormalForm, normalize, world_log_weight
from .util import logsumexp
from .worlds import enumerate_worlds, restrict, stats

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class ProjectivityVerdict:
    projective: bool
    log_pair_sums: np.ndarray
    common_value: float | None
    spread: float
    tolerance: float

    def __str__(self):
        status = "PROJECTIVE" if self.projective else "NOT-PROJECTIVE"
        return f"{status} spread={self.spread:.6g}"


def check_projective(nf: NormalForm, tol: float = DEFAULT_TOLERANCE) -> ProjectivityVerdict:
    """Compare log pair sums across admissible 1-type pairs.

    Inadmissible (hard-excluded) 1-types are left out of the comparison: the
    equality criterion assumes strictly positive type weights.
    """
    admissible = nf.admissible_types
    if not admissible.any():
        raise ValidationError("no admissible 1-type: hard clauses are inconsistent")
    entries = [
        nf.log_pair_sum[i, j]
        for i in range(len(admissible))
        for j in range(len(admissible))
        if admissible[i] and admissible[j]
    ]
    finite = [v for v in entries if v > -np.inf]
    if not finite:
        # every admissible pair is hard-excluded: no world with >= 2 elements
        return ProjectivityVerdict(
            projective=False,
            log_pair_sums=nf.log_pair_sum,
            common_value=None,
            spread=math.inf,
            tolerance=tol,
        )
    if len(finite) < len(entries):
        spread = math.inf
    else:
        spread = max(finite) - min(finite)
    projective = spread <= tol
    common = math.exp(sum(finite) / len(finite)) if projective else None
    return ProjectivityVerdict(
        projective=projective,
        log_pair_sums=nf.log_pair_sum,
        common_value=common,
        spread=spread,
        tolerance=tol,
    )


def projective_log_partition(nf: NormalForm, verdict: ProjectivityVerdict, n: int) -> float:
    """Closed-form log partition function valid when the verdict is projective."""
    if not verdict.projective:
        raise ValidationError("closed form requires a projective network")
    log_sum_s = logsumexp([v for v in nf.log_type_weight if v > -np.inf])
    return n * (n - 1) // 2 * math.log(verdict.common_value) + n * log_sum_s


def verify_marginal_consistency(mln: MLN, n: int, m: int, max_atoms: int = 24) -> float:
    """Max distance between the marginalized size-n distribution and the size-m one.

    Both sides are computed by exhaustive enumeration, normalizing each world
    list by its own log-sum, so the check does not rely on the lifted
    partition function.
    """
    if not 1 <= m < n:
        raise ValidationError("need 1 <= m < n")
    nf = normalize(mln)

    big = list(enumerate_worlds(mln.lang, n, max_atoms))
    big_logw = [world_log_weight(nf, stats(w)) for w in big]
    big_logz = logsumexp(big_logw)
    if big_logz == -math.inf:
        raise ValidationError("hard clauses leave no admissible world")
    marginal: dict = {}
    subset = list(range(1, m + 1))
    for world, logw in zip(big, big_logw):
        if logw == -math.inf:
            continue
        key = restrict(world, subset)
        marginal[key] = marginal.get(key, 0.0) + math.exp(logw - big_logz)

    small = list(enumerate_worlds(mln.lang, m, max_atoms))
    small_logw = [world_log_weight(nf, stats(w)) for w in small]
    small_logz = logsumexp(small_logw)

    deviation = 0.0
    for world, logw in zip(small, small_logw):
        direct = math.exp(logw - small_logz) if logw > -math.inf else 0.0
        deviation = max(deviation, abs(direct - marginal.get(world, 0.0)))
    return deviation


# ---------------------------------------------------------------------------
# Comparison with the same-variables syntactic criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaWitness:
    clause_index: int
    first_atom: str
    second_atom: str


def is_sigma_determinate(mln: MLN) -> tuple[bool, SigmaWitness | None]:
    """True when, clause by clause, every atom uses the same variable set.

    The distinctness marker counts as using both variables.  On failure the
    witness names the first clause and offending atom pair.
    """
    for idx, (formula, _) in enumerate(mln.clauses):
        parts = list(formula.atom_nodes())
        varsets = [frozenset(a.args) for a in parts]
        for p in range(1, len(parts)):
            if varsets[p] != varsets[0]:
                return False, SigmaWitness(
                    clause_index=idx,
                    first_atom=str(parts[0]),
                    second_atom=str(parts[p]),
                )
    return True, None


def check_sigma_consequence(nf: NormalForm, tol: float = 1e-12) -> bool:
    """True when, for each table, the pair weight is constant across 1-type pairs."""
    u = nf.lang.num_one_types
    b = nf.lang.num_two_tables
    for l in range(b):
        ref = nf.log_pair_weight[0, 0, l]
        for i in range(u):
            for j in range(u):
                v = nf.log_pair_weight[i, j, l]
                if v == -np.inf and ref == -np.inf:
                    continue
                if v == -np.inf or ref == -np.inf or abs(v - ref) > tol:
                    return False
    return True
