"""Command-line surface: machine-readable reports over the library.

Every subcommand prints one JSON object with sorted keys, so identical
inputs and seeds give byte-identical output.  --pretty switches to an
aligned key/value table for humans.  Exit codes: 0 success, 2 when a
truncation bound is too small for the question, 3 on ingestion problems,
1 for everything else.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import cache as cache_mod
from .dynamics import (
    build_flow,
    check_frequency_independence,
    compare_fields,
    norm_image,
    recover_split_with_escalation,
)
from .errors import BcinvError, BoundTooSmallError, IngestionError, UnstabilizedBoundError
from .fieldfile import load_field
from .fields import FieldSpec, split_type
from .ideal_lattices import (
    class_window,
    stabilization_bound,
    target_class_group,
    truncated_P1,
)
from .prim_space import crt_orbit_solver, gamma_S_approx, residue_vector
from .representations import build_rho, check_irreducible, random_character

DEFAULT_SEED = 1729


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 means "bound too small"
    # in our taxonomy, so route usage problems through an exception instead
    def error(self, message):
        raise UsageError(message)


def provenance_of(field: FieldSpec) -> str:
    return "ingested, not computed" if field.kind == "table" else "computed"


def _add_common(sub, bound_default):
    sub.add_argument("--field", required=True, help="path to a field description file")
    sub.add_argument("--bound", type=int, default=bound_default, help="window norm bound")
    sub.add_argument("--pretty", action="store_true", help="aligned table instead of JSON")


def _add_cache_flags(sub):
    sub.add_argument("--cache-dir", default=None, help="cache directory (default: env or ~/.cache)")
    sub.add_argument("--no-cache", action="store_true", help="skip reading and writing the cache")


def build_parser() -> _Parser:
    parser = _Parser(prog="bcinv", description=__doc__.split("\n", 1)[0])
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub = subs.add_parser("classgroup", help="narrow class group of the window")
    _add_common(sub, 50)
    _add_cache_flags(sub)

    sub = subs.add_parser("reps", help="build and check finite-dimensional models")
    _add_common(sub, 30)
    sub.add_argument("--characters", type=int, default=5, help="random characters to sample")
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)

    sub = subs.add_parser("dynamics", help="frequency data of the induced flow")
    _add_common(sub, 20)

    sub = subs.add_parser("prim", help="zero-set isotropy approximant")
    _add_common(sub, 20)
    sub.add_argument("--zero", default="", help="comma-separated window prime labels")
    sub.add_argument("--precision", type=int, default=2)
    sub.add_argument("--height", type=int, default=1000)

    sub = subs.add_parser("split-recover", help="read off prime splitting from the norm image")
    sub.add_argument("--field", required=True)
    sub.add_argument("--prime", type=int, required=True)
    sub.add_argument("--degree", type=int, default=None, help="default: the field degree")
    sub.add_argument("--bound", type=int, default=None, help="starting bound (default max(1000, p^degree))")
    sub.add_argument("--pretty", action="store_true")

    sub = subs.add_parser("compare", help="distinguish two fields by flow invariants")
    sub.add_argument("--left", required=True)
    sub.add_argument("--right", required=True)
    sub.add_argument("--bound", type=int, default=50)
    sub.add_argument("--pretty", action="store_true")

    sub = subs.add_parser("selftest", help="small cross-module consistency matrix")
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--pretty", action="store_true")

    return parser


def _cmd_classgroup(args) -> dict:
    field = load_field(args.field)
    lines = None
    root = None
    if not args.no_cache:
        root = cache_mod.cache_root(args.cache_dir)
        lines = cache_mod.load_entry(root, field, args.bound, "classgroup")
    if lines is not None:
        order, factors, stab = lines
        h = int(order.split()[1])
        structure = [int(x) for x in factors.split()[1:]]
        stabilized_at = None if stab.split()[1] == "-" else int(stab.split()[1])
    else:
        group = target_class_group(field)
        h = group.order()
        structure = [f for f in group.invariant_factors if f > 1]
        win = class_window(field, args.bound)
        if win.stabilized:
            stabilized_at = stabilization_bound(field)
        else:
            stabilized_at = None
        if root is not None:
            cache_mod.save_entry(
                root,
                field,
                args.bound,
                "classgroup",
                [
                    f"order {h}",
                    "factors " + " ".join(str(x) for x in structure),
                    f"stabilized_at {stabilized_at if stabilized_at is not None else '-'}",
                ],
            )
    return {
        "field": field.canonical_id,
        "bound": args.bound,
        "h_narrow": h,
        "structure": structure,
        "stabilized_at": stabilized_at,
        "provenance": provenance_of(field),
    }


def _cmd_reps(args) -> dict:
    field = load_field(args.field)
    rng = random.Random(args.seed)
    dimension = None
    all_irreducible = True
    for _ in range(args.characters):
        rep = build_rho(field, args.bound, random_character(field, args.bound, rng))
        dimension = rep.matrix(0).shape[0]
        all_irreducible = all_irreducible and check_irreducible(rep)
    return {
        "field": field.canonical_id,
        "bound": args.bound,
        "characters": args.characters,
        "seed": args.seed,
        "dimension": dimension,
        "all_irreducible": all_irreducible,
        "provenance": provenance_of(field),
    }


def _cmd_dynamics(args) -> dict:
    field = load_field(args.field)
    flow = build_flow(field, args.bound)
    image = norm_image(field, args.bound)
    return {
        "field": field.canonical_id,
        "bound": args.bound,
        "free_rank": flow.free_rank,
        "fixed_rank": flow.fixed_rank,
        "frequencies": [str(q.value()) for q in flow.frequencies],
        "independent": check_frequency_independence(flow),
        "norm_image_rank": image.lattice().rank,
        "provenance": provenance_of(field),
    }


def _cmd_prim(args) -> dict:
    field = load_field(args.field)
    labels = [part.strip() for part in args.zero.split(",") if part.strip()]
    approx = gamma_S_approx(field, labels, args.bound, args.precision, args.height)
    return {
        "field": field.canonical_id,
        "bound": args.bound,
        "zero_set": sorted(approx.zero_set),
        "precision": args.precision,
        "height_bound": args.height,
        "rank": approx.lattice.rank,
        "rows": [list(row) for row in approx.lattice.basis.entries],
        "stable": approx.stable,
        "provenance": provenance_of(field),
    }


def _cmd_split_recover(args) -> dict:
    field = load_field(args.field)
    degree = args.degree if args.degree is not None else field.degree
    verdict = recover_split_with_escalation(field, args.prime, degree, start_bound=args.bound)
    try:
        oracle = split_type(field, args.prime)
        oracle_agrees = (verdict.verdict == "inert") == (oracle == "inert")
    except (IngestionError, ValueError):
        oracle = None
        oracle_agrees = None
    return {
        "field": field.canonical_id,
        "prime": args.prime,
        "degree": degree,
        "bound": verdict.bound,
        "verdict": verdict.verdict,
        "generator": verdict.generator,
        "oracle": oracle,
        "oracle_agrees": oracle_agrees,
        "notes": list(verdict.notes),
        "provenance": provenance_of(field),
    }


def _cmd_compare(args) -> dict:
    left = load_field(args.left)
    right = load_field(args.right)
    verdict = compare_fields(left, right, args.bound)
    return {
        "left": left.canonical_id,
        "right": right.canonical_id,
        "bound": verdict.bound,
        "verdict": verdict.verdict,
        "invariant": verdict.invariant,
        "witness": verdict.witness,
        "provenance": {"left": provenance_of(left), "right": provenance_of(right)},
    }


def _selftest_checks(seed: int):
    from .forms import form_class_group
    from .ideal_lattices import narrow_class_group_truncated

    rng = random.Random(seed)

    def two_route_class_groups():
        for disc in (-20, -23, -24, 8, 12, 40, 60, 229):
            field = FieldSpec.from_discriminant(disc)
            b = stabilization_bound(field)
            truncated = narrow_class_group_truncated(field, b)
            forms, _ = form_class_group(disc)
            if tuple(f for f in truncated.invariant_factors if f > 1) != tuple(
                f for f in forms.invariant_factors if f > 1
            ):
                return False
        return True

    def split_recovery_matches_oracle():
        field = FieldSpec.quadratic(-5)
        image = norm_image(field, 200)
        from .dynamics import recover_split

        for p in (2, 3, 5, 7, 11, 13):
            verdict = recover_split(image, p, 2)
            if (verdict.verdict == "inert") != (split_type(field, p) == "inert"):
                return False
        return True

    def orbit_solver_verifies():
        from .ideals import QuadInt

        field = FieldSpec.quadratic(-5)
        disc = field.discriminant
        primes = (3, 7)
        for _ in range(10):
            pairs = []
            for p in primes:
                while True:
                    u, v = rng.randrange(p * p), rng.randrange(p * p)
                    if QuadInt(disc, u, v).norm() % p:
                        pairs.append((u, v))
                        break
            rho = residue_vector(field, primes, 2, pairs)
            lam = crt_orbit_solver(field, rho, rho)
            if lam is None:
                return False
        return True

    def comparison_distinguishes():
        verdict = compare_fields(FieldSpec.quadratic(2), FieldSpec.quadratic(3), 50)
        return verdict.verdict == "distinguished"

    def window_rep_is_irreducible():
        field = FieldSpec.quadratic(-5)
        rep = build_rho(field, 20, random_character(field, 20, rng))
        return check_irreducible(rep)

    return [
        ("two_route_class_groups", two_route_class_groups),
        ("split_recovery_matches_oracle", split_recovery_matches_oracle),
        ("orbit_solver_verifies", orbit_solver_verifies),
        ("comparison_distinguishes", comparison_distinguishes),
        ("window_rep_is_irreducible", window_rep_is_irreducible),
    ]


def _cmd_selftest(args) -> dict:
    checks = []
    ok = True
    for name, run in _selftest_checks(args.seed):
        passed = bool(run())
        ok = ok and passed
        checks.append({"name": name, "ok": passed})
    return {"checks": checks, "ok": ok, "seed": args.seed}


_HANDLERS = {
    "classgroup": _cmd_classgroup,
    "reps": _cmd_reps,
    "dynamics": _cmd_dynamics,
    "prim": _cmd_prim,
    "split-recover": _cmd_split_recover,
    "compare": _cmd_compare,
    "selftest": _cmd_selftest,
}


def _render(report: dict, pretty: bool) -> str:
    if not pretty:
        return json.dumps(report, sort_keys=True)
    width = max(len(k) for k in report)
    lines = []
    for key in sorted(report):
        value = report[key]
        if not isinstance(value, (str, int, float, bool, type(None))):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key.ljust(width)}  {value}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report = _HANDLERS[args.command](args)
    except UsageError as exc:
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"bcinv: error: {exc}", file=sys.stderr)
        return 1
    except (BoundTooSmallError, UnstabilizedBoundError) as exc:
        print(json.dumps({"error": str(exc), "kind": "bound_too_small"}, sort_keys=True))
        return 2
    except IngestionError as exc:
        payload = {"error": str(exc), "kind": "ingestion"}
        if exc.line is not None:
            payload["line"] = exc.line
        print(json.dumps(payload, sort_keys=True))
        return 3
    except (BcinvError, ValueError) as exc:
        print(json.dumps({"error": str(exc), "kind": "other"}, sort_keys=True))
        return 1
    print(_render(report, getattr(args, "pretty", False)))
    if args.command == "selftest" and not report["ok"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
