"""Command-line entry point for pgl2-invariants.

Usage:
    python scripts/pgl2_invariants.py dims --n 8 --valence 1
    python scripts/pgl2_invariants.py straighten "n=4; 1-3 2-4" --oracle
    python scripts/pgl2_invariants.py kernel --n 8 --degree 2
    python scripts/pgl2_invariants.py decompose --n 8 --space sym2
    python scripts/pgl2_invariants.py verify --suite quick --out reports/quick.json
    python scripts/pgl2_invariants.py catalog
    python scripts/pgl2_invariants.py hilbert --n 5 --weights 2 --kmax 4

Every command accepts --debug, --config, --seed, --field, --mode
{full,sampled}, --cache-dir, --no-cache and --format {text,json}. Exit status is 0 on success, 1 on an
error or a failing verification check.
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

# Add scripts directory to path so we can import sibling modules
sys.path.insert(0, str(Path(__file__).parent))

from cache import ResultCache
from debug_utils import enable_debug_mode, setup_logger
from exactfield import FieldSpec
from graphalg import (
    GraphPolynomial,
    StraighteningError,
    enumerate_noncrossing,
    format_polynomial,
    is_noncrossing,
    parse_graph,
    straighten,
    straighten_by_solve,
)
from invring import format_kernel_dump, hilbert_function
from relcat import catalog, format_catalog
from report import CheckContext, RunConfig, format_report_text, run_suite
from symrep import (
    decompose,
    format_multiplicities,
    graded_piece_character,
    hook_dimension,
    sym_power_character,
)
from utils import ensure_directory, get_settings

SPACES = ("r1", "r2", "sym2", "sym3", "ideal2")


def parse_int_list(text: str, n: int, what: str) -> tuple[int, ...]:
    """``"1"`` means the constant vector; ``"2,2,1,1"`` lists every entry."""
    try:
        values = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"{what} must be an integer or a comma-separated list, got '{text}'")
    if len(values) == 1:
        values = values * n
    if len(values) != n:
        raise ValueError(f"{what} {text} does not have {n} entries")
    if any(x < 0 for x in values):
        raise ValueError(f"{what} entries must be nonnegative")
    return values


def read_relation_file(path: Path, field: FieldSpec) -> GraphPolynomial:
    """Sum of ``<coefficient> n=<int>; a-b ...`` lines; ``#`` starts a comment."""
    items = []
    n = None
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        cut = line.find("n=")
        if cut < 0:
            raise ValueError(f"{path}:{lineno}: expected a graph literal 'n=<int>; ...'")
        coeff = line[:cut].strip().rstrip("·*").strip() or "1"
        if coeff in ("+", "-"):
            coeff += "1"
        g = parse_graph(line[cut:])
        n = g.n if n is None else n
        items.append((field.convert(Fraction(coeff)), g))
    if not items:
        raise ValueError(f"{path}: no terms")
    return GraphPolynomial.from_monomials(items, field, n)


def emit(args, text: str, data: dict) -> None:
    if args.format == "json":
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


# --- commands -------------------------------------------------------------------

def cmd_dims(args, config: RunConfig, ctx: CheckContext, log) -> int:
    if args.valence is not None:
        v = parse_int_list(args.valence, args.n, "valence")
    else:
        v = tuple(args.k * x for x in config.weights)
    field = config.field_spec()
    dim = ctx.dimension(args.n, v, field, config.budget())
    count = len(enumerate_noncrossing(args.n, v))
    log.log_variable("valence", v)
    log.log_variable("mode", config.mode or "auto")
    log.info(f"dims n={args.n} v={v}: rank {dim}, non-crossing {count}")
    emit(args, f"n={args.n} valence={','.join(map(str, v))} field={field.label}: "
               f"dimension {dim} (non-crossing graphs: {count})",
         {"n": args.n, "valence": list(v), "field": str(field),
          "dimension": dim, "noncrossing": count})
    return 0


def cmd_straighten(args, config: RunConfig, ctx: CheckContext, log) -> int:
    field = config.field_spec()
    if args.file:
        p = read_relation_file(Path(args.file), field)
    else:
        if not args.literal:
            raise ValueError("give a graph literal or --file")
        p = GraphPolynomial.from_monomials([parse_graph(args.literal)], field)
    result = straighten(p, config.straighten_step_cap)
    data = {"input": format_polynomial(p), "output": format_polynomial(result)}
    text = format_polynomial(result)
    if args.oracle:
        agrees = straighten_by_solve(p) == result
        data["oracle"] = "agree" if agrees else "disagree"
        text += f"\noracle: {data['oracle']}"
        if not agrees:
            emit(args, text, data)
            raise StraighteningError("straightening disagrees with the linear-solve oracle")
    if all(is_noncrossing(g) for _, g in p.monomials()):
        log.debug("input was already non-crossing")
    emit(args, text, data)
    return 0


def cmd_kernel(args, config: RunConfig, ctx: CheckContext, log) -> int:
    field = config.field_spec()
    w = tuple(config.weights)
    kernel = ctx.kernel(args.n, args.degree, field, config.budget(), w)
    log.log_variable("sym_dimension", kernel.sym_dimension)
    log.log_variable("image_rank", kernel.image_rank)
    settings = args.settings
    out = Path(args.out) if args.out else (
        ensure_directory(settings["reports_dir"], "reports directory")
        / f"kernel_n{args.n}_d{args.degree}_{str(field).replace(':', '')}.txt")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_kernel_dump(kernel), encoding="utf-8")
    log.info(f"Kernel dump written to {out}")
    emit(args, f"kernel of Sym^{args.degree} R_{','.join(map(str, w))} (n={args.n}, "
               f"{field.label}): dimension {kernel.dimension}\n  dump: {out}",
         {"n": args.n, "weights": list(w), "degree": args.degree, "field": str(field),
          "dimension": kernel.dimension, "sym_dimension": kernel.sym_dimension,
          "image_rank": kernel.image_rank, "dump": str(out)})
    return 0


def cmd_decompose(args, config: RunConfig, ctx: CheckContext, log) -> int:
    n = args.n
    if args.space == "r1":
        chi = ctx.character(n, 1)
    elif args.space == "r2":
        chi = ctx.character(n, 2)
    elif args.space == "sym2":
        chi = sym_power_character(ctx.character(n, 1), 2)
    elif args.space == "sym3":
        chi = sym_power_character(ctx.character(n, 1), 3)
    else:
        chi = sym_power_character(ctx.character(n, 1), 2) - ctx.character(n, 2)
    mv = decompose(chi)
    total = int(chi.degree)
    emit(args, f"{args.space} on {n} points\n" + format_multiplicities(mv, total).rstrip(),
         {"n": n, "space": args.space, "dimension": total, "multiplicities": mv.as_dict(),
          "dimensions": {k: hook_dimension(lam) for k, lam in
                         zip(mv.as_dict(), mv.support)}})
    return 0


def cmd_verify(args, config: RunConfig, ctx: CheckContext, log) -> int:
    report = run_suite(config, ctx.cache)
    body = report.to_json()
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(body, encoding="utf-8")
        log.info(f"Report written to {out}")
        print(format_report_text(report), end="")
    elif args.format == "json":
        print(body, end="")
    else:
        print(format_report_text(report), end="")
    counts = report.counts()
    log.info(f"verify: {counts}")
    return 1 if report.failed else 0


def cmd_catalog(args, config: RunConfig, ctx: CheckContext, log) -> int:
    entries = catalog(config.field_spec(), include_skew=not args.no_skew)
    emit(args, format_catalog(entries).rstrip(),
         {"entries": [{"name": e.name.value, "n": e.relation.n, "degree": e.relation.degree,
                       "relation": e.relation.format(), "provenance": e.provenance}
                      for e in entries]})
    return 0


def cmd_hilbert(args, config: RunConfig, ctx: CheckContext, log) -> int:
    w = tuple(config.weights)
    field = config.field_spec() if args.exact else None
    dims = hilbert_function(args.n, w, args.kmax, field)
    emit(args, "  ".join(f"k={k}:{d}" for k, d in enumerate(dims)),
         {"n": args.n, "weights": list(w), "dimensions": dims})
    return 0


COMMANDS = {
    "dims": cmd_dims,
    "straighten": cmd_straighten,
    "kernel": cmd_kernel,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
    "catalog": cmd_catalog,
    "hilbert": cmd_hilbert,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--debug", action="store_true", help="Verbose logging")
    common.add_argument("--config", help="Settings file (default config/settings.yaml)")
    common.add_argument("--seed", type=int, help="Random seed (default 0)")
    common.add_argument("--field", help="q (rationals) or fp:<prime>")
    common.add_argument("--mode", choices=("full", "sampled"),
                        help="Coordinates for graded pieces (default: chosen by size)")
    common.add_argument("--cache-dir", help="Result cache directory")
    common.add_argument("--no-cache", action="store_true", help="Compute everything afresh")
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(
        description="Graphical algebra of invariants of points on the projective line")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", parents=[common], help="Dimension of a graded piece")
    p.add_argument("--n", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--valence", help="Valence vector, or one value for all points")
    group.add_argument("--weights", help="Weight vector (with --k)")
    p.add_argument("--k", type=int, default=1, help="Multiple of the weights")

    p = sub.add_parser("straighten", parents=[common], help="Straighten a graph polynomial")
    p.add_argument("literal", nargs="?", help='Graph literal, e.g. "n=4; 1-3 2-4"')
    p.add_argument("--file", help="Relation file: one '<coefficient> <literal>' per line")
    p.add_argument("--oracle", action="store_true", help="Cross-check with a linear solve")

    p = sub.add_parser("kernel", parents=[common], help="Relations of a given degree")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weights", default="1")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--out", help="Dump file (default under reports_dir)")

    p = sub.add_parser("decompose", parents=[common], help="Irreducible summands")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--space", choices=SPACES, default="r1")

    p = sub.add_parser("verify", parents=[common], help="Run the verification suite")
    p.add_argument("--suite", choices=("quick", "full"), default="quick")
    p.add_argument("--claim", action="append", default=[], help="Run only this claim id")
    p.add_argument("--stretch", action="store_true", help="Include stretch checks")
    p.add_argument("--out", help="Write the JSON report here")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("catalog", parents=[common], help="Print every named relation")
    p.add_argument("--no-skew", action="store_true", help="Leave out the skew cubic family")

    p = sub.add_parser("hilbert", parents=[common], help="Hilbert function of the quotient")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weights", default="1")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--exact", action="store_true",
                   help="Recompute each dimension as a rank over --field")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    debug = args.debug or enable_debug_mode([])
    try:
        settings = get_settings(args.config, quiet=args.format == "json")
    except Exception as e:
        print(f"[!] ERROR loading settings: {e}")
        return 1
    args.settings = settings
    log = setup_logger("pgl2_invariants", debug=debug, log_dir=settings["log_dir"])
    log.log_function_entry("main", command=args.command)

    try:
        weights = None
        if getattr(args, "weights", None) is not None:
            weights = list(parse_int_list(args.weights, args.n, "weights"))
        config = RunConfig.from_settings(
            settings,
            command=args.command,
            seed=args.seed,
            field=args.field,
            mode=args.mode,
            cache_dir=args.cache_dir,
            output_format=args.format,
            n=getattr(args, "n", None),
            weights=weights,
            degree=getattr(args, "degree", None),
            suite=getattr(args, "suite", None),
            claims=getattr(args, "claim", None) or None,
            stretch=getattr(args, "stretch", None) or None,
            workers=getattr(args, "workers", None),
        )
        log.log_run_config(config)
        cache = ResultCache(config.cache_dir, enabled=not args.no_cache)
        ctx = CheckContext(config, cache)
        with log.stage(args.command):
            status = COMMANDS[args.command](args, config, ctx, log)
        log.log_cache_stats(cache)
    except KeyboardInterrupt:
        print("\n✗ Interrupted")
        return 1
    except Exception as e:
        print(f"[!] ERROR: {e}")
        log.exception(f"{args.command} failed")
        return 1

    log.log_function_exit("main", result=status)
    return status


if __name__ == "__main__":
    sys.exit(main())
