"""Command-line front-end: one verb per pipeline stage, deterministic output.

Exit codes: 0 on success, 1 on a domain error (bad input file, failed
precondition), 2 on a usage error.
"""

import argparse
import sys

from . import blockmodel, learn, mln, projectivity, worlds
from .errors import Error
from .fol import parse_formula, parse_language
from .util import format_number


def _read(path):
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write_output(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _load_mln(path):
    return mln.parse_mln(_read(path))


def render_normal_form(nf) -> str:
    lang = nf.lang
    u, b = lang.num_one_types, lang.num_two_tables
    lines = [f"one-types {u}", "s:"]
    s = nf.type_weights()
    for i in range(u):
        lines.append(f"  s {i + 1} {format_number(float(s[i]))}")
    lines.append(f"two-tables {b}")
    lines.append("t:")
    t = nf.pair_weights()
    for i in range(u):
        for j in range(i, u):
            for l in range(b):
                lines.append(f"  t {i + 1} {j + 1} {l + 1} {format_number(float(t[i, j, l]))}")
    lines.append("f:")
    f = nf.pair_sums()
    for i in range(u):
        for j in range(i, u):
            lines.append(f"  f {i + 1} {j + 1} {format_number(float(f[i, j]))}")
    return "\n".join(lines) + "\n"


def render_verdict(verdict) -> str:
    if verdict.projective:
        return (
            f"PROJECTIVE spread={format_number(verdict.spread)} "
            f"S={format_number(verdict.common_value)}\n"
        )
    return f"NOT-PROJECTIVE spread={format_number(verdict.spread)}\n"


def render_fit_result(result) -> str:
    lines = ["theta:"]
    for q, value in enumerate(result.theta):
        lines.append(f"  theta {q + 1} {format_number(float(value))}")
    lines.append(f"logL = {format_number(result.log_likelihood)}")
    lines.append(f"constraint-residual = {format_number(result.constraint_residual)}")
    lines.append(f"iterations = {result.iterations}")
    lines.append(f"converged = {'yes' if result.converged else 'no'}")
    return "\n".join(lines) + "\n"


def render_consistency_csv(report) -> str:
    rows = ["m,seed,parameter,estimate"]
    for m in report.m_values:
        for seed in report.seeds:
            for pid in learn.parameter_ids(report.true_model.lang):
                value = report.estimates[(m, seed, pid)]
                rows.append(f"{m},{seed},{learn.parameter_label(pid)},{format_number(value)}")
    return "\n".join(rows) + "\n"


def render_consistency_summary(report) -> str:
    lines = []
    for m in report.m_values:
        for pid in learn.parameter_ids(report.true_model.lang):
            s = report.summary[(m, pid)]
            lines.append(
                f"m={m} {learn.parameter_label(pid)} true={format_number(s.true_value)} "
                f"mean={format_number(s.mean)} se={format_number(s.standard_error)} "
                f"{'ok' if s.ok else 'FAIL'}"
            )
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines) + "\n"


def render_report(report) -> str:
    """Deterministic text for any of the reporting types."""
    if isinstance(report, projectivity.ProjectivityVerdict):
        return render_verdict(report)
    if isinstance(report, learn.FitResult):
        return render_fit_result(report)
    if isinstance(report, learn.ConsistencyReport):
        return render_consistency_csv(report)
    raise TypeError(f"cannot render {type(report).__name__}")


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def cmd_normalize(args):
    nf = mln.normalize(_load_mln(args.mln))
    _write_output(render_normal_form(nf), args.output)
    return 0


def cmd_partition(args):
    network = _load_mln(args.mln)
    if args.oracle:
        value = mln.partition_function_oracle(network, args.n, max_atoms=args.max_atoms)
    else:
        value = mln.partition_function(mln.normalize(network), args.n)
    _write_output(f"logZ = {value:.12f}\n", args.output)
    return 0


def cmd_fomc(args):
    text = _read(args.formula_file)
    decl_lines = []
    formula_lines = []
    for raw in text.splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("predicate"):
            decl_lines.append(stripped)
        else:
            formula_lines.append(stripped)
    lang = parse_language("\n".join(decl_lines))
    if len(formula_lines) != 1:
        raise Error(f"formula file must contain exactly one formula line, got {len(formula_lines)}")
    formula = parse_formula(formula_lines[0], lang)
    count = mln.fomc(formula, lang, args.n)
    _write_output(f"{count}\n", args.output)
    return 0


def cmd_check_projective(args):
    nf = mln.normalize(_load_mln(args.mln))
    verdict = projectivity.check_projective(nf, tol=args.tol)
    _write_output(render_verdict(verdict), args.output)
    return 0


def cmd_verify_marginals(args):
    deviation = projectivity.verify_marginal_consistency(
        _load_mln(args.mln), args.n, args.m, max_atoms=args.max_atoms
    )
    _write_output(f"max-deviation = {format_number(deviation)}\n", args.output)
    return 0


def cmd_to_rbm(args):
    nf = mln.normalize(_load_mln(args.mln))
    model = blockmodel.block_model_from_normal_form(nf, tol=args.tol)
    _write_output(blockmodel.format_block_model(model), args.output)
    return 0


def cmd_rbm_to_mln(args):
    model = blockmodel.parse_block_model(_read(args.rbm))
    _write_output(mln.format_mln(model.to_mln()), args.output)
    return 0


def cmd_sample(args):
    model = blockmodel.parse_block_model(_read(args.rbm))
    world = model.sample(args.n, args.seed)
    _write_output(worlds.format_world(world), args.output)
    return 0


def cmd_fit_rbm(args):
    lang = parse_language(_read(args.lang))
    world = worlds.parse_world(_read(args.world), lang)
    model = blockmodel.fit_block_model(world)
    _write_output(blockmodel.format_block_model(model), args.output)
    return 0


def cmd_fit_projective(args):
    structure = _load_mln(args.structure)
    world = worlds.parse_world(_read(args.world), structure.lang)
    result = learn.fit_projective_mln(structure, world, gtol=args.gtol, ctol=args.ctol)
    _write_output(render_fit_result(result), args.output)
    return 0


def cmd_consistency(args):
    config = _parse_config(_read(args.config))
    model = blockmodel.parse_block_model(_read(config["params"]))
    if "lang" in config:
        declared = parse_language(_read(config["lang"]))
        if declared != model.lang:
            raise Error("language in config does not match the parameter file")
    report = learn.subsample_consistency_experiment(
        model,
        n=int(config["n"]),
        m_values=[int(v) for v in config["m_list"].split(",")],
        num_seeds=int(config["seeds"]),
        seed_base=int(config.get("seed_base", "0")),
    )
    with open(config["output"], "w", encoding="utf-8") as handle:
        handle.write(render_consistency_csv(report))
    _write_output(render_consistency_summary(report), args.output)
    return 0 if report.passed else 1


def _parse_config(text):
    """key = value lines; `#` comments."""
    config = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise Error(f"bad config line {lineno}: expected 'key = value'")
        config[key.strip()] = value.strip()
    for required in ("params", "n", "m_list", "seeds", "output"):
        if required not in config:
            raise Error(f"config is missing required key {required!r}")
    return config


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="projmln",
        description="Projective Markov logic networks in the two-variable fragment.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        p.add_argument("--output", "-o", default=None, help="write to a file instead of stdout")
        return p

    p = add("normalize", cmd_normalize, help="print the (s, t, f) tables of a network")
    p.add_argument("mln")

    p = add("partition", cmd_partition, help="log partition function at domain size n")
    p.add_argument("mln")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="brute-force enumeration instead of the lifted sum")
    p.add_argument("--max-atoms", type=int, default=24)

    p = add("fomc", cmd_fomc, help="exact model count of a universally quantified formula")
    p.add_argument("formula_file")
    p.add_argument("--n", type=int, required=True)

    p = add("check-projective", cmd_check_projective, help="decide projectivity")
    p.add_argument("mln")
    p.add_argument("--tol", type=float, default=projectivity.DEFAULT_TOLERANCE)

    p = add("verify-marginals", cmd_verify_marginals, help="brute-force marginal consistency check")
    p.add_argument("mln")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--max-atoms", type=int, default=24)

    p = add("to-rbm", cmd_to_rbm, help="convert a projective network to block-model parameters")
    p.add_argument("mln")
    p.add_argument("--tol", type=float, default=projectivity.DEFAULT_TOLERANCE)

    p = add("rbm-to-mln", cmd_rbm_to_mln, help="convert block-model parameters to a network")
    p.add_argument("rbm")

    p = add("sample", cmd_sample, help="draw a world from block-model parameters")
    p.add_argument("rbm")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = add("fit-rbm", cmd_fit_rbm, help="closed-form block-model estimate from a world")
    p.add_argument("world")
    p.add_argument("--lang", required=True, help="predicate declaration file")

    p = add("fit-projective", cmd_fit_projective, help="constrained fit of structure weights")
    p.add_argument("world")
    p.add_argument("--structure", required=True, help="network file providing clauses and initial weights")
    p.add_argument("--gtol", type=float, default=1e-8)
    p.add_argument("--ctol", type=float, default=1e-6)

    p = add("consistency", cmd_consistency, help="subsample consistency experiment from a config file")
    p.add_argument("--config", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
