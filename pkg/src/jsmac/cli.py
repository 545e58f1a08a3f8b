"""Command-line front end.

Exit codes: 0 success, 1 verification or property failure, 2 usage or parse
error, 3 spec-file invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _backend
from .fourier_motzkin import (
    build_system,
    closed_form_system,
    eliminate_all_randomization,
    var_names,
)
from .infotheory import BoundTable, bound_table, joint_distribution
from .oracle import NumericSystem, _fm_step, cross_check, numeric_wiretap_system, remove_redundant
from .region import closed_form_region, vertices
from .specfile import SpecInvariantError, SpecParseError, load_spec
from .subsets import (
    SetFamily,
    compact_form_direct,
    nonempty_subsets,
    parse_subset,
    presence_vector,
    t_max,
)
from . import sweeps

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SPEC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _err(msg: str):
    print(f"jsmac: {msg}", file=sys.stderr)


def _load_table(path: str) -> BoundTable:
    spec = load_spec(path)
    return bound_table(joint_distribution(spec.channel, spec.policy))


def _format_table(bt: BoundTable) -> str:
    lines = [f"{'J':<12}{'b+':>12}{'b-':>12}{'b+ - b-':>12}"]
    for J in nonempty_subsets(bt.k):
        lines.append(f"{str(J):<12}{bt.plus(J):>12.6f}{bt.minus(J):>12.6f}{bt.gap(J):>12.6f}")
    return "\n".join(lines)


def _format_numeric_row(a, b, names) -> str:
    terms = []
    for v, n in zip(a, names):
        if abs(v) < 1e-15:
            continue
        mag = abs(v)
        body = n if abs(mag - 1.0) < 1e-12 else f"{mag:.6f}*{n}"
        terms.append(body if not terms and v > 0 else f"-{body}" if not terms else f"{'+' if v > 0 else '-'} {body}")
    return f"{' '.join(terms) or '0'} <= {b:.6f}"


# ------------------------------------------------------------------ commands


def cmd_region(args) -> int:
    bt = _load_table(args.spec)
    region = closed_form_region(bt)
    print("bound table (bits):")
    print(_format_table(bt))
    print("\nregion (with R_i >= 0):")
    names = [f"R{i}" for i in range(1, bt.k + 1)]
    for a, c in region.inequalities:
        print("  " + _format_numeric_row(a, c, names))
    empty = region.is_empty()
    print(f"\nstatus: {'empty' if empty else 'nonempty'}")
    if args.vertices or args.vertices_json:
        vs = vertices(region)
        print(f"vertices: {len(vs)}")
        if args.vertices:
            Path(args.vertices).write_text(vs.to_csv())
            print(f"wrote {args.vertices}")
        if args.vertices_json:
            Path(args.vertices_json).write_text(vs.to_json() + "\n")
            print(f"wrote {args.vertices_json}")
    return EXIT_OK


def cmd_fm(args) -> int:
    if args.symbolic is not None:
        k = args.symbolic
        if not 1 <= k <= 8:
            raise UsageError(f"--symbolic needs 1 <= k <= 8, got {k}")
        system = build_system(k)
        print(f"initial system ({len(system)} rows):")
        print(system.format())
        names = var_names(k)
        rng = np.random.default_rng(args.seed) if args.paranoid else None

        def step(var, before, after, pruned):
            print(f"eliminate {names[var]}: {before} -> {after} rows, {pruned} after pruning")

        print()
        final = eliminate_all_randomization(system, prune=not args.no_prune, paranoid=args.paranoid,
                                            rng=rng, on_step=step)
        print(f"\nfinal system ({len(final)} rows):")
        print(final.format())
        closed = closed_form_system(k)
        if args.no_prune:
            # redundant rows survive without pruning; only containment is expected
            same = set(closed.rows) <= set(final.rows)
            print(f"\ncontains closed form: {'yes' if same else 'no'}")
        else:
            same = final == closed
            print(f"\nmatches closed form: {'yes' if same else 'no'}")
        return EXIT_OK if same else EXIT_FAIL

    if args.spec is None:
        raise UsageError("fm needs a spec path or --symbolic K")
    bt = _load_table(args.spec)
    k = bt.k
    system = numeric_wiretap_system(bt)
    names = var_names(k)
    print(f"initial system ({len(system)} rows):")
    for a, b in zip(system.A, system.b):
        print("  " + _format_numeric_row(a, b, names))
    A, b = system.A, system.b
    for var in range(2 * k - 1, k - 1, -1):
        before = len(b)
        A, b = _fm_step(A, b, var)
        after = len(b)
        if not args.no_prune:
            red = remove_redundant(NumericSystem(A, b))
            A, b = red.A, red.b
        print(f"eliminate {names[var]}: {before} -> {after} rows, {len(b)} after pruning")
    print(f"\nfinal system ({len(b)} rows):")
    for a, c in zip(A[:, :k], b):
        print("  " + _format_numeric_row(a, c, names[:k]))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.random is not None:
        if args.k is None:
            raise UsageError("--random needs --k")
        results = sweeps.equivalence_sweep(args.random, args.k, args.seed, args.tol, eve_noise=args.eve_noise)
    elif args.spec is not None:
        bt = _load_table(args.spec)
        results = [(0, cross_check(bt, args.tol), bt)]
    else:
        raise UsageError("verify needs a spec path or --random N --k K")
    failed = 0
    for i, ok, bt in results:
        print(f"trial {i}: {'pass' if ok else 'FAIL'}")
        if not ok:
            failed += 1
            print("counterexample bound table:")
            print(_format_table(bt))
    print(f"{len(results) - failed}/{len(results)} pass")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_props(args) -> int:
    reports = []
    if not args.no_exhaustive:
        reports += sweeps.exhaustive_compact_sweep(args.exhaustive_k, args.exhaustive_t)
    if args.random:
        tables = sweeps.random_tables(args.random, args.k, args.seed)
        reports.append(sweeps.modularity_sweep(tables))
        fams = sweeps.random_families(args.families, args.k, args.seed + 1)
        reports.append(sweeps.dominance_sweep(tables, fams))
    else:
        print("no random channels requested; random sweeps pass vacuously")
    for rep in reports:
        print(rep.line())
        for f in rep.failures[:5]:
            print(f"  violating instance: {f}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_compact(args) -> int:
    try:
        F = SetFamily(tuple(parse_subset(s, args.k) for s in args.sets), args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    p = presence_vector(F)
    print(f"family: {F}")
    print(f"presence vector: {p}")
    print(f"t_max: {t_max(p)}")
    print(f"compact form: {compact_form_direct(F)}")
    return EXIT_OK


# ------------------------------------------------------------------ parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jsmac", description="Joint-secrecy rate regions of the K-user wiretap MAC.")
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({_backend.backend_name()} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="bound table and closed-form region of a spec")
    p.add_argument("spec")
    p.add_argument("--vertices", metavar="CSV", help="write region vertices as CSV")
    p.add_argument("--vertices-json", metavar="JSON", help="write region vertices as a JSON array")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("fm", help="Fourier-Motzkin elimination of the randomization rates")
    p.add_argument("spec", nargs="?")
    p.add_argument("--symbolic", type=int, metavar="K", help="eliminate symbolically for K transmitters")
    p.add_argument("--no-prune", action="store_true", help="skip redundancy pruning")
    p.add_argument("--paranoid", action="store_true", help="re-verify every pruned row on sampled bound tables")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fm)

    p = sub.add_parser("verify", help="brute-force elimination vs closed form")
    p.add_argument("spec", nargs="?")
    p.add_argument("--random", type=int, metavar="N")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--eve-noise", type=float, default=0.0, help="mix the eavesdropper output with noise")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("props", help="sub/supermodularity, dominance and compact-form sweeps")
    p.add_argument("--random", type=int, default=0, metavar="N")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--families", type=int, default=100, help="random families per channel for the dominance sweep")
    p.add_argument("--exhaustive-k", type=int, default=4)
    p.add_argument("--exhaustive-t", type=int, default=4)
    p.add_argument("--no-exhaustive", action="store_true")
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("compact", help="presence vector and compact form of a family")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("sets", nargs="+", help="comma-separated 1-based elements, e.g. 1,2 ('{}' for the empty set)")
    p.set_defaults(func=cmd_compact)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except SpecParseError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except SpecInvariantError as exc:
        _err(str(exc))
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
