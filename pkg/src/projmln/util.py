"""Small numeric helpers: composition enumeration, multinomials, stable log sums."""

import math
from typing import Iterator, Sequence


def compositions(length: int, total: int) -> Iterator[tuple[int, ...]]:
    """Yield every tuple of `length` nonnegative integers summing to `total`.

    Order is colexicographic (last coordinate ascending, then the one before,
    and so on), so iteration is reproducible across runs.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if length == 1:
        yield (total,)
        return
    for last in range(total + 1):
        for rest in compositions(length - 1, total - last):
            yield rest + (last,)


def multinomial_coefficient(counts: Sequence[int]) -> int:
    """Exact multinomial coefficient (sum counts)! / prod(counts!)."""
    result = 1
    partial = 0
    for c in counts:
        partial += c
        result *= math.comb(partial, c)
    return result


def logsumexp(values: Sequence[float]) -> float:
    """log(sum(exp(v))) with a single max-shift pass; empty or all -inf gives -inf."""
    hi = max(values, default=-math.inf)
    if hi == -math.inf:
        return -math.inf
    acc = 0.0
    for v in values:
        acc += math.exp(v - hi)
    return hi + math.log(acc)


def format_number(x: float) -> str:
    """Render a scalar with 12 significant digits, stable across runs."""
    return f"{x:.12g}"


def pair_index(n: int, q: int, r: int) -> int:
    """Row-major position of the unordered pair {q, r}, 1 <= q < r <= n.

    Pairs are ordered (1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n).
    """
    if not (1 <= q < r <= n):
        raise ValueError(f"bad pair ({q},{r}) for domain size {n}")
    return (q - 1) * (2 * n - q) // 2 + (r - q - 1)


def iter_pairs(n: int) -> Iterator[tuple[int, int]]:
    """All unordered pairs of [n] in row-major order."""
    for q in range(1, n + 1):
        for r in range(q + 1, n + 1):
            yield q, r
