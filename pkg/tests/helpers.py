"""Shared builders for randomized and fixed test inputs."""

import numpy as np

from projmln import MLN, BlockModel, parse_formula, parse_language

LANG_R = parse_language("predicate R/2")
LANG_AR = parse_language("predicate A/1\npredicate R/2")

CLAUSE_POOL = {
    LANG_R: (
        "R(x,y)",
        "R(x,x)",
        "R(x,y) -> R(y,x)",
        "R(x,y) & R(y,x)",
        "R(x,y) | R(y,x)",
        "R(x,y) <-> R(y,x)",
        "R(x,x) -> R(x,y)",
        "!R(x,y)",
    ),
    LANG_AR: (
        "A(x)",
        "R(x,y)",
        "A(x) & R(x,y)",
        "A(x) -> R(x,y)",
        "R(x,y) -> A(y)",
        "A(x) & A(y) -> R(x,y)",
        "R(x,y) -> R(y,x)",
        "A(x) & R(x,x)",
    ),
}

SIGMA_POOL = {
    LANG_R: (
        "R(x,y) -> R(y,x)",
        "R(x,y) & R(y,x)",
        "R(x,y) <-> R(y,x)",
        "R(x,x)",
        "!R(x,y) | R(y,x)",
    ),
    LANG_AR: (
        "R(x,y) -> R(y,x)",
        "R(x,y) & R(y,x)",
        "A(x)",
        "A(x) & R(x,x)",
        "R(x,x)",
    ),
}


def random_mln(lang, rng, pool=None, max_clauses=2, low=-2.0, high=2.0):
    pool = CLAUSE_POOL[lang] if pool is None else pool
    count = rng.randint(1, max_clauses)
    texts = rng.sample(list(pool), count)
    return MLN(lang, tuple((parse_formula(t, lang), rng.uniform(low, high)) for t in texts))


def random_block_model(lang, rng: np.random.Generator) -> BlockModel:
    """Strictly positive random parameters satisfying all invariants."""
    u, b = lang.num_one_types, lang.num_two_tables
    p = rng.dirichlet(np.ones(u))
    w = np.zeros((u, u, b))
    for i in range(1, u + 1):
        for j in range(i, u + 1):
            if i == j:
                classes = []
                seen = set()
                for l in range(1, b + 1):
                    if l in seen:
                        continue
                    dl = lang.dual(l)
                    seen.add(l)
                    seen.add(dl)
                    classes.append((l, dl))
                mass = rng.dirichlet(np.ones(len(classes)))
                for (l, dl), m in zip(classes, mass):
                    if l == dl:
                        w[i - 1, i - 1, l - 1] = m
                    else:
                        w[i - 1, i - 1, l - 1] = m / 2
                        w[i - 1, i - 1, dl - 1] = m / 2
            else:
                row = rng.dirichlet(np.ones(b))
                w[i - 1, j - 1, :] = row
                for l in range(1, b + 1):
                    w[j - 1, i - 1, lang.dual(l) - 1] = row[l - 1]
    return BlockModel(lang=lang, type_probs=p, table_probs=w)


def homophily_model() -> BlockModel:
    """Two node classes, mutual edges with probability 0.9 within and 0.1 across."""
    w = np.zeros((2, 2, 4))
    for i, j, edge in ((0, 0, 0.9), (1, 1, 0.9), (0, 1, 0.1), (1, 0, 0.1)):
        w[i, j, 3] = edge
        w[i, j, 0] = 1.0 - edge
    return BlockModel(lang=LANG_R, type_probs=[0.5, 0.5], table_probs=w)
