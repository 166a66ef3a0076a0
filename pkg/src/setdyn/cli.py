"""Command-line front end (``svd``).

Exit status: 0 on success (including a property counterexample, which is a
finding), 1 for failed mathematical preconditions or bad arguments, 2 for
system-file parse errors, 3 when a resource limit is hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import entropy, inverse_limit, measures, orbits, properties
from .errors import ResourceLimitError, SetDynError
from .metric_relation import format_adjacency_list, is_surjective
from .sysfile import SystemFileError, load_systems


def _fractions(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if "." in tok or "e" in tok.lower():
            raise argparse.ArgumentTypeError(f"{tok!r} is not an exact rational; write p/q")
        out.append(Fraction(tok))
    return out


def _fraction(text: str) -> Fraction:
    (value,) = _fractions(text)
    return value


def _ints(text: str) -> list:
    return [int(t) for t in text.split(",") if t.strip()]


def _seed(text: str) -> int:
    value = int(text)
    if not -(2**63) <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _config(args) -> dict:
    cfg = {}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        if isinstance(value, Fraction):
            value = _frac_str(value)
        elif isinstance(value, list):
            value = [_frac_str(v) if isinstance(v, Fraction) else v for v in value]
        cfg[key] = value
    return cfg


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, report):
    _emit(args, json.dumps({"config": _config(args), "report": report}, indent=2) + "\n")


def _system(args):
    systems = load_systems(args.file)
    return systems[args.index]


# -- subcommands -------------------------------------------------------------

def cmd_system_validate(args):
    systems = load_systems(args.file)
    rows = []
    for s in systems:
        surj, missing = is_surjective(s.relation)
        rows.append({
            "name": s.name,
            "points": s.space.size,
            "edges": sum(len(img) for img in s.relation.images),
            "surjective": surj,
            "unreachable": missing,
            "adjacency": format_adjacency_list(s.relation),
        })
    _emit_json(args, {"property": "system", "verdict": "valid", "systems": rows})


def cmd_orbits(args):
    system = _system(args)
    F = system.relation
    if args.periodic:
        recs = orbits.find_periodic_orbits(F, args.periodic, cap=args.cap)
        segs = [orbits.OrbitSegment(r.cycle) for r in recs]
    elif args.random is not None:
        segs = [orbits.random_orbit(F, args.start or 0, args.length, seed=args.random)]
    elif args.start is not None:
        segs = orbits.enumerate_partial_orbits(F, args.start, args.length, cap=args.cap)
    else:
        segs = orbits.enumerate_all_partial_orbits(F, args.length, cap=args.cap)
    if args.format == "json":
        _emit_json(args, {"property": "orbits", "count": len(segs),
                          "segments": [list(s.points) for s in segs]})
    else:
        _emit(args, f"# config={json.dumps(_config(args))}\n" + orbits.segments_to_csv(segs))


def cmd_entropy(args):
    system = _system(args)
    table = entropy.entropy_estimate_table(
        system.relation, args.n, args.eps, basis=args.basis, mode=args.mode,
        threads=args.threads, cap=args.cap,
    )
    if args.format == "json":
        rows = [{"n": r.n, "epsilon": _frac_str(r.epsilon), "basis": r.basis, "mode": r.mode,
                 "count": r.count, "rate": r.rate} for r in table.rows]
        _emit_json(args, {"property": "entropy", "rows": rows})
    else:
        _emit(args, f"# config={json.dumps(_config(args))}\n" + table.to_csv(args.decimal))


def cmd_properties(args):
    system = _system(args)
    F = system.relation
    battery = properties.SpecBattery(args.max_length, args.gap_window, args.max_segments)
    if args.check == "mixing":
        report = properties.check_mixing(F).to_dict()
    elif args.check == "specification":
        report = properties.check_specification(F, args.eps, args.horizon, battery).to_dict()
    elif args.check == "shadowing":
        report = properties.check_shadowing(
            F, args.eps, args.delta, args.length, budget=args.budget, seed=args.seed
        ).to_dict()
    else:
        verdict = properties.verify_spec_implies_mixing(F, args.eps, args.horizon, battery)
        report = {
            "property": "spec-implies-mixing",
            "verdict": "skipped" if verdict is None else ("holds" if verdict else "violated"),
            "parameters": {"epsilon": _frac_str(args.eps)},
        }
    _emit_json(args, report)


def cmd_invlim(args):
    system = _system(args)
    F = system.relation
    if args.check == "enumerate":
        pts = inverse_limit.enumerate_truncated(F, args.depth, cap=args.cap)
        report = {"property": "invlim-enumerate", "depth": args.depth, "count": len(pts),
                  "points": [inverse_limit.format_point(p) for p in pts]}
    elif args.check == "reversal":
        ok = inverse_limit.co_equals_invlim_inverse(F, args.depth, cap=args.cap)
        report = {"property": "complete-orbits-equal-inverse-limit",
                  "verdict": "equal" if ok else "different",
                  "parameters": {"depth": args.depth}}
    else:
        battery = properties.SpecBattery(args.max_length, args.gap_window, args.max_segments)
        ok = inverse_limit.spec_transfer_check(F, args.eps, args.horizon, battery)
        report = {"property": "spec-transfer", "verdict": "agree" if ok else "disagree",
                  "parameters": {"epsilon": _frac_str(args.eps), "horizon": args.horizon}}
    _emit_json(args, report)


def _read_measure(path, size):
    with open(path, encoding="utf-8") as fh:
        return measures.FiniteMeasure.from_json(fh.read(), size)


def _measure_report(mu, F):
    out = {"measure": json.loads(mu.to_json()),
           "support": sorted(measures.support(mu)),
           "invariant_flow": measures.is_invariant_flow(mu, F)}
    if F.size <= measures.EXHAUSTIVE_LIMIT:
        ok, bad = measures.is_invariant_exhaustive(mu, F)
        out["invariant_exhaustive"] = ok
        out["violating_set"] = sorted(bad) if bad else None
    return out


def cmd_measures(args):
    system = _system(args)
    F = system.relation
    n = F.size
    if args.build == "periodic":
        if not args.cycle:
            raise SetDynError("--build periodic needs --cycle")
        rec = orbits.PeriodicOrbitRecord(tuple(args.cycle))
        if not rec.is_valid(F):
            raise SetDynError(f"{rec.cycle} is not a cycle of the relation")
        mu = measures.periodic_measure(rec, n)
        report = {"property": "measure", "kind": "periodic", **_measure_report(mu, F)}
    elif args.build == "full-support":
        recs = orbits.find_periodic_orbits(F, args.max_period, cap=args.cap)
        cover, seen = [], set()
        for rec in recs:
            if not set(rec.cycle) <= seen:
                cover.append(rec)
                seen |= set(rec.cycle)
        mu = measures.full_support_measure(F, cover)
        report = {"property": "measure", "kind": "full-support",
                  "cover": [list(r.cycle) for r in cover],
                  "coefficients": [_frac_str(c) for c in measures.full_support_coefficients(len(cover))],
                  **_measure_report(mu, F)}
    elif args.mix:
        nu = _read_measure(args.mix[0], n)
        mu = _read_measure(args.mix[1], n)
        mixed = measures.mix_measures(nu, mu, args.eps)
        report = {"property": "measure", "kind": "mixture", **_measure_report(mixed, F)}
    elif args.check:
        mu = _read_measure(args.check, n)
        report = {"property": "measure", "kind": "check", **_measure_report(mu, F)}
    else:
        raise SetDynError("choose one of --build, --mix, --check")
    _emit_json(args, report)


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svd", description="Set-valued dynamics on finite spaces.")
    parser.add_argument("--out", help="write the artifact here instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--cap", type=int, default=orbits.DEFAULT_CAP)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(p):
        p.add_argument("file")
        p.add_argument("--index", type=int, default=0, help="document index inside the file")
        return p

    def with_battery(p):
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--max-length", type=int, default=3)
        p.add_argument("--gap-window", type=int, default=None)
        p.add_argument("--max-segments", type=int, default=2)

    system = sub.add_parser("system", help="system-file utilities")
    system_sub = system.add_subparsers(dest="action", required=True)
    validate = system_sub.add_parser("validate")
    validate.add_argument("file")
    validate.set_defaults(func=cmd_system_validate)

    p = with_file(sub.add_parser("orbits"))
    p.add_argument("--length", type=int, default=2)
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--periodic", type=int, default=None, metavar="MAX_PERIOD")
    p.add_argument("--random", type=_seed, default=None, metavar="SEED")
    p.set_defaults(func=cmd_orbits, default_format="csv")

    p = with_file(sub.add_parser("entropy"))
    p.add_argument("--n", type=_ints, default=[1, 2, 3])
    p.add_argument("--eps", type=_fractions, default=[Fraction(1, 2)])
    p.add_argument("--basis", choices=("separated", "spanning"), default="separated")
    p.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    p.add_argument("--decimal", action="store_true", help="add a decimal epsilon column")
    p.set_defaults(func=cmd_entropy, default_format="csv")

    p = with_file(sub.add_parser("properties"))
    p.add_argument("--check", choices=("mixing", "specification", "shadowing", "spec-implies-mixing"),
                   default="mixing")
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
    p.add_argument("--delta", type=_fraction, default=Fraction(1, 4))
    p.add_argument("--length", type=int, default=4, help="shadowing horizon")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--seed", type=_seed, default=0)
    with_battery(p)
    p.set_defaults(func=cmd_properties, default_format="json")

    p = with_file(sub.add_parser("invlim"))
    p.add_argument("--check", choices=("enumerate", "reversal", "spec-transfer"), default="enumerate")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
    with_battery(p)
    p.set_defaults(func=cmd_invlim, default_format="json")

    p = with_file(sub.add_parser("measures"))
    p.add_argument("--build", choices=("periodic", "full-support"), default=None)
    p.add_argument("--cycle", type=_ints, default=None)
    p.add_argument("--max-period", type=int, default=8)
    p.add_argument("--check", default=None, metavar="MEASURE_JSON")
    p.add_argument("--mix", nargs=2, default=None, metavar=("NU_JSON", "MU_JSON"))
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 2))
    p.set_defaults(func=cmd_measures, default_format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = getattr(args, "default_format", "json")
    try:
        args.func(args)
    except SystemFileError as exc:
        print(f"svd: parse error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"svd: resource limit: {exc}", file=sys.stderr)
        return 3
    except (SetDynError, OSError) as exc:
        print(f"svd: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
