"""Command line front end: ``toric-dk <command> [scenario.json] [flags]``.

Scenarios are strict JSON objects; reports are JSON (or CSV/DOT where a
command supports it) with every number written as an exact ``"p/q"``
string.  Exit status: 0 success, 2 validation error, 3 failed verdict,
4 internal limit.
"""

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import __version__, kernels
from .cohom import rounded_hom_sheaf, verify_vanishing
from .errors import OutOfRange, ParseError, ToricError, ValidationError
from .fm import DIRECTIONS, apply_functor, hom_graded_compare, range_bound
from .stacky import (
    Case,
    MonomialLineBundle,
    build_config,
    cone_index,
    crepancy_compare,
    direction_check,
    discrepancy_of_ray,
    fans_of,
    hj_resolution,
    orthant_fan,
    resolution_is_smooth,
    weighted_blowup,
)
from .suite import run_all
from .tilting import build_tilting, enumerate_range_classes, export_quiver

EXIT_OK, EXIT_VALIDATION, EXIT_VERDICT, EXIT_LIMIT = 0, 2, 3, 4

SCENARIO_FIELDS = {"case", "n", "n′", "n″", "n'", "n''", "a", "r", "s", "bundles", "box", "seed"}
COMMANDS = ("check", "fm", "homcmp", "cohom", "range", "tilting", "examples", "suite")
EXAMPLES = ("z8-quotient", "weighted-blowup", "plane-blowup", "flop")


# scenario parsing


def _int_list(value, name):
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise ParseError(f"field {name!r} must be a list of integers")
    return value


def _int(value, name):
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"field {name!r} must be an integer")
    return value


def parse_scenario(text):
    """Validate scenario JSON text; returns ``(config, bundles, box, seed)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")
    unknown = sorted(set(doc) - SCENARIO_FIELDS)
    if unknown:
        raise ParseError(f"unknown scenario fields: {', '.join(unknown)}")
    for required in ("case", "n", "r"):
        if required not in doc:
            raise ParseError(f"missing field {required!r}")
    case = _int(doc["case"], "case")
    if case not in (1, 2, 3, 4):
        raise ParseError("field 'case' must be 1, 2, 3 or 4")
    n = _int(doc["n"], "n")
    n1 = doc.get("n′", doc.get("n'"))
    n2 = doc.get("n″", doc.get("n''"))
    config = build_config(
        case,
        n,
        a=_int_list(doc.get("a", []), "a"),
        r=_int_list(doc["r"], "r"),
        s=_int_list(doc["s"], "s") if "s" in doc else None,
        n1=None if n1 is None else _int(n1, "n′"),
        n2=None if n2 is None else _int(n2, "n″"),
    )
    raw = doc.get("bundles", [])
    if not isinstance(raw, list):
        raise ParseError("field 'bundles' must be a list of integer lists")
    size = config.n if config.case in (Case.REWEIGHT, Case.CONTRACTION) else config.n + 1
    bundles = []
    for k in raw:
        k = _int_list(k, "bundles")
        if len(k) != size:
            raise ValidationError(f"bundle {k} has {len(k)} entries, the source side has {size} rays")
        bundles.append(MonomialLineBundle(k))
    box = _int(doc["box"], "box") if "box" in doc else None
    seed = _int(doc["seed"], "seed") if "seed" in doc else 0
    return config, bundles, box, seed


# output encoding


def q(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def encode(obj):
    """Recursively turn numbers into ``"p/q"`` strings and tuples into lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, Fraction)):
        return q(obj)
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dump(doc):
    return json.dumps(encode(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _config_doc(config):
    doc = {
        "case": int(config.case),
        "n": config.n,
        "n′": config.n1,
        "n″": config.n2,
        "a": list(config.a),
        "r": list(config.r),
    }
    if config.s:
        doc["s"] = list(config.s)
    if config.lam is not None:
        doc["lambda"] = config.lam
        doc["v_res"] = list(config.v_res)
    return doc


def _fan_doc(fan):
    return {
        "rays": {str(lab): list(v) for lab, v in zip(fan.labels, fan.rays)},
        "mults": {str(lab): r for lab, r in zip(fan.labels, fan.mults)},
        "cones": sorted(sorted(c) for c in fan.max_cones),
    }


# commands


def _exceptional_discrepancies(config):
    """Log discrepancies of the exceptional rays over the base pairs."""
    fan_x, fan_y, _ = fans_of(config)
    n = config.n
    rays = config.rays()
    out = {}
    if config.case in (Case.CONTRACTION, Case.INVERSE_CONTRACTION):
        out[str(n + 1)] = discrepancy_of_ray(fan_y, rays[n + 1], set(range(1, n + 1)))
    elif config.case == Case.FLIP:
        cone_x = next(c for c in fan_x.max_cones if _contains(fan_x, c, rays[n + 2]))
        cone_y = next(c for c in fan_y.max_cones if _contains(fan_y, c, rays[n + 2]))
        out[f"{n + 2} over X"] = discrepancy_of_ray(fan_x, rays[n + 2], cone_x)
        out[f"{n + 2} over Y"] = discrepancy_of_ray(fan_y, rays[n + 2], cone_y)
    return out


def _contains(fan, cone, w):
    try:
        discrepancy_of_ray(fan, w, cone)
        return True
    except ValidationError:
        return False


def cmd_check(config, bundles, args):
    verdict, value = crepancy_compare(config)
    report = direction_check(config)
    fan_x, fan_y, fan_w = fans_of(config)
    doc = {
        "config": _config_doc(config),
        "crepancy": {"verdict": verdict.value, "sum": value},
        "direction": {
            "accepted": report.accepted,
            "statistic": report.statistic,
            "bound": report.bound,
        },
        "fans": {"X": _fan_doc(fan_x), "Y": _fan_doc(fan_y), "W": _fan_doc(fan_w)},
        "discrepancies": _exceptional_discrepancies(config),
    }
    if report.alternate_bound is not None:
        doc["direction"]["alternate_bound"] = report.alternate_bound
        doc["direction"]["alternate_accepted"] = report.alternate_accepted
    if config.case in (Case.FLIP, Case.INVERSE_CONTRACTION):
        doc["range_bound"] = range_bound(config)
    return doc, EXIT_OK


def cmd_fm(config, bundles, args):
    images = []
    for b in bundles:
        res = apply_functor(b, config)
        images.append(
            {
                "source": list(res.source.k),
                "target": list(res.target.k),
                "direction": "->".join(res.direction),
                "charts": {str(key): list(v) for key, v in sorted(res.charts.items(), key=lambda t: str(t[0]))},
                "certificate": res.certificate,
            }
        )
    return {"config": _config_doc(config), "images": images}, EXIT_OK


def _pairs(bundles):
    if len(bundles) < 2:
        raise ValidationError("this command needs at least two bundles")
    return [(a, b) for a in bundles for b in bundles]


def cmd_homcmp(config, bundles, args):
    if args.format == "csv":
        if len(bundles) != 2:
            raise ValidationError("CSV output needs exactly two bundles (L′ then L)")
        rep = hom_graded_compare(bundles[0], bundles[1], config, args.box, args.backend)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"u{i + 1}" for i in range(config.n)] + ["dim_src", "dim_tgt"])
        for u, ds, dt in rep.rows():
            writer.writerow([q(x) for x in u] + [q(ds), q(dt)])
        status = EXIT_OK if rep.verdict.value == "Bijective" else EXIT_VERDICT
        return buf.getvalue(), status
    out = []
    status = EXIT_OK
    for src, tgt in _pairs(bundles):
        rep = hom_graded_compare(src, tgt, config, args.box, args.backend)
        if rep.verdict.value != "Bijective":
            status = EXIT_VERDICT
        out.append(
            {
                "source": list(src.k),
                "target": list(tgt.k),
                "box": rep.box,
                "verdict": rep.verdict.value,
                "counts": {f"{a}{b}": c for (a, b), c in sorted(rep.counts.items())},
                "mismatches": [{"degree": list(u), "dims": list(d)} for u, d in rep.mismatches],
            }
        )
    return {"config": _config_doc(config), "comparisons": out}, status


def cmd_cohom(config, bundles, args):
    box = args.box or 48
    out = []
    status = EXIT_OK
    home = DIRECTIONS[config.case][0]
    for src, tgt in _pairs(bundles):
        for side in ("X", "Y"):
            entry = {"source": list(src.k), "target": list(tgt.k), "side": side}
            try:
                fan, div = rounded_hom_sheaf(src, tgt, side, config)
            except OutOfRange as exc:
                if side == home:
                    raise
                entry["skipped"] = exc.code
                out.append(entry)
                continue
            rep = verify_vanishing(fan, div, box, 1, args.workers, args.backend)
            if not rep.clean:
                status = EXIT_VERDICT
            entry.update(
                {
                    "divisor": {str(k): v for k, v in rep.divisor.items()},
                    "box": rep.box,
                    "totals": {str(p): d for p, d in rep.totals.items()},
                    "witnesses": [{"degree": list(m), "p": p} for m, p in rep.witnesses],
                    "witness_degrees": rep.witness_count,
                    "clean": rep.clean,
                }
            )
            out.append(entry)
    return {"config": _config_doc(config), "sheaves": out}, status


def cmd_range(config, bundles, args):
    classes = enumerate_range_classes(config)
    return {
        "config": _config_doc(config),
        "bound": range_bound(config),
        "count": len(classes),
        "classes": [list(c.k) for c in classes],
    }, EXIT_OK


def cmd_tilting(config, bundles, args):
    data = build_tilting(config, args.box or 48, args.workers, args.backend)
    status = EXIT_OK if data.clean else EXIT_VERDICT
    return export_quiver(data, "dot" if args.format == "dot" else "json"), status


def example_z8():
    ledger = hj_resolution(8, 3)
    return {
        "example": "z8-quotient",
        "continued_fraction": list(ledger.continued_fraction),
        "rays": [list(e.ray) for e in ledger.entries],
        "self_intersections": [e.self_intersection for e in ledger.entries],
        "discrepancies": ledger.discrepancies,
        "smooth": resolution_is_smooth(ledger),
    }


def example_weighted():
    base = orthant_fan((3, 3))
    fan = weighted_blowup((1, 2), (3, 3, 1))
    return {
        "example": "weighted-blowup",
        "boundary": base.boundary(),
        "ray": [1, 2],
        "discrepancy": discrepancy_of_ray(base, (1, 2), {1, 2}),
        "chart_indices": {"-".join(str(i) for i in sorted(c)): cone_index(fan, c) for c in sorted(fan.max_cones, key=sorted)},
    }


def example_plane_blowup(args):
    config = build_config(Case.CONTRACTION, 2, a=(1, 1), r=(1, 1, 1))
    verdict, value = crepancy_compare(config)
    rep = verify_vanishing(weighted_blowup((1, 1)), {3: 2}, args.box or 48, 1, args.workers, args.backend)
    return {
        "example": "plane-blowup",
        "crepancy": {"verdict": verdict.value, "sum": value},
        "discrepancies": _exceptional_discrepancies(config),
        "divisor_2E": {
            "box": rep.box,
            "totals": {str(p): d for p, d in rep.totals.items()},
            "witnesses": [{"degree": list(m), "p": p} for m, p in rep.witnesses],
        },
    }


def example_flop(args):
    config = build_config(Case.FLIP, 3, a=(1, 1, -1), r=(1, 1, 1, 1))
    verdict, value = crepancy_compare(config)
    data = build_tilting(config, args.box or 48, args.workers, args.backend)
    return {
        "example": "flop",
        "crepancy": {"verdict": verdict.value, "sum": value},
        "range_classes": [list(c.k) for c in data.representatives],
        "quiver": json.loads(export_quiver(data, "json")),
    }


def cmd_examples(name, args):
    if name == "z8-quotient":
        return example_z8(), EXIT_OK
    if name == "weighted-blowup":
        return example_weighted(), EXIT_OK
    if name == "plane-blowup":
        return example_plane_blowup(args), EXIT_OK
    if name == "flop":
        if args.format == "dot":
            config = build_config(Case.FLIP, 3, a=(1, 1, -1), r=(1, 1, 1, 1))
            return export_quiver(build_tilting(config, args.box or 48, args.workers, args.backend), "dot"), EXIT_OK
        return example_flop(args), EXIT_OK
    raise ParseError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")


def cmd_suite(args, seed):
    results = run_all(seed=seed, box=args.box or 48, workers=args.workers, backend=args.backend)
    for res in results:
        print(res.line(), file=sys.stderr)
    doc = {
        "seed": seed,
        "criteria": [
            {"number": r.number, "name": r.name, "passed": r.passed, "in_time": r.in_time, "detail": r.detail}
            for r in results
        ],
    }
    return doc, EXIT_OK if all(r.ok for r in results) else EXIT_VERDICT


SCENARIO_COMMANDS = {
    "check": cmd_check,
    "fm": cmd_fm,
    "homcmp": cmd_homcmp,
    "cohom": cmd_cohom,
    "range": cmd_range,
    "tilting": cmd_tilting,
}


def build_parser():
    p = argparse.ArgumentParser(prog="toric-dk", description="Exact toric checks for log crepant birational maps.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("target", nargs="?", help="scenario JSON path, or the example name for 'examples'")
    p.add_argument("--box", type=int, default=None, help="box radius for lattice scans")
    p.add_argument("--workers", type=int, default=1, help="worker processes for box scans")
    p.add_argument("--format", choices=("json", "csv", "dot"), default="json")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized suites")
    p.add_argument("--backend", choices=("cython", "python"), default=None)
    p.add_argument("--timing", action="store_true", help="append wall time (milliseconds) to JSON reports")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _emit(result, args, started, echo):
    if isinstance(result, str):
        sys.stdout.write(result)
        return
    doc = {"command": echo, "version": __version__}
    doc.update(result)
    if args.timing:
        doc["milliseconds"] = round((time.perf_counter() - started) * 1000)
    sys.stdout.write(dump(doc))


def run(argv=None):
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    echo = args.command + (f" {args.target}" if args.target else "")
    try:
        if args.box is not None and args.box < 0:
            raise ValidationError("--box must be nonnegative")
        if args.workers < 1:
            raise ValidationError("--workers must be positive")
        if args.backend == "cython" and kernels._compiled is None:
            raise ValidationError("compiled kernel is not available")
        if args.command == "examples":
            if not args.target:
                raise ParseError(f"examples needs a name: {', '.join(EXAMPLES)}")
            result, status = cmd_examples(args.target, args)
        elif args.command == "suite":
            seed = args.seed if args.seed is not None else 0
            if args.target:
                _, _, box, scenario_seed = parse_scenario(_read(args.target))
                args.box = args.box if args.box is not None else box
                seed = args.seed if args.seed is not None else scenario_seed
            result, status = cmd_suite(args, seed)
        else:
            if not args.target:
                raise ParseError(f"{args.command} needs a scenario file")
            config, bundles, box, _ = parse_scenario(_read(args.target))
            if args.box is None:
                args.box = box
            result, status = SCENARIO_COMMANDS[args.command](config, bundles, args)
    except ToricError as exc:
        doc = {
            "command": echo,
            "error": {"code": exc.code, "message": str(exc), "payload": exc.payload},
        }
        sys.stdout.write(dump(doc))
        return exc.exit_status
    _emit(result, args, started, echo)
    return status


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read scenario {path!r}: {exc.strerror}") from exc


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
