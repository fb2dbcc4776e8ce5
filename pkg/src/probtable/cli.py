"""Command-line front end.

Every command prints one report (JSON by default). Exit status is 0 on
success, 1 when the input is rejected, 2 on an internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .distinguishability import COARSE, STRICT, max_distinguishable
from .errors import InputError, ProbTableError, SearchBudgetExceeded
from .factorization import factorize, rank_of
from .geometry import analyze_geometry, outcome_region_contains, region_symmetry_check, trivial_vector
from .linalg import default_rank_tau
from .numeric import EXACT, FLOAT, MODES, dumps_json, encode_matrix, format_scalar, parse_scalar
from .quantum import generate_table, parse_model
from .state_maps import apply, check_trivial_constraint, linearize, parse_map, positivity_violations
from .table import parse_table, serialize_table, table_to_dict

COMMANDS = (
    "validate", "rank", "factorize", "geometry", "distinguish",
    "region-check", "map-apply", "map-linearize", "qgen", "full-report",
)


class UsageError(InputError):
    pass


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file not found: {path}")
    return p.read_bytes()


def _load_table(path, args):
    data = _read(path)
    fmt = args.input_format
    if fmt == "auto":
        fmt = "csv" if path.lower().endswith(".csv") else "json"
        if path == "-" and not data.lstrip().startswith(b"{"):
            fmt = "csv"
    try:
        return parse_table(data, fmt, mode=args.mode, tolerance=args.tol)
    except InputError as exc:
        exc.args = (f"{path}: {exc.args[0]}",) + exc.args[1:]
        raise


def _basis(table, args):
    if not args.basis:
        return None
    out = []
    for name in args.basis.split(","):
        try:
            out.append(table.state_index(name.strip()))
        except KeyError:
            raise UsageError(f"--basis names unknown state {name.strip()!r}") from None
    return out


def _factorize(table, args):
    return factorize(table, basis_states=_basis(table, args), tau=args.tau)


def _tolerance_info(table, args):
    info = {"numeric_mode": table.mode, "tolerance": 0.0 if table.mode == EXACT else table.tolerance}
    if table.mode == FLOAT:
        info["rank_tau"] = args.tau if args.tau is not None else default_rank_tau(table.entries)
    return info


def _distinguish(table, f, mode, Z):
    try:
        return max_distinguishable(table, f, mode, Z=Z).to_dict()
    except SearchBudgetExceeded as exc:
        return {"mode": mode, "skipped": str(exc)}


def cmd_validate(args):
    table = _load_table(args.table, args)
    return {
        "valid": True,
        "L": table.L,
        "M": table.M,
        "measurements": [m.name for m in table.layout.measurements],
        "states": list(table.state_names),
        **_tolerance_info(table, args),
    }


def cmd_rank(args):
    table = _load_table(args.table, args)
    return {"K": rank_of(table, args.tau), **_tolerance_info(table, args)}


def cmd_factorize(args):
    table = _load_table(args.table, args)
    f = _factorize(table, args)
    doc = f.to_dict()
    doc["basis_states"] = [table.state_names[j] for j in f.pivot_cols]
    doc["basis_outcomes"] = [table.layout.label(i) for i in f.pivot_rows]
    doc["reconstruction_error"] = f.reconstruction_error()
    return {**doc, **_tolerance_info(table, args)}


def cmd_geometry(args):
    table = _load_table(args.table, args)
    f = _factorize(table, args)
    return {**analyze_geometry(f).to_dict(), **_tolerance_info(table, args)}


def cmd_distinguish(args):
    table = _load_table(args.table, args)
    f = _factorize(table, args)
    return {**max_distinguishable(table, f, args.dmode).to_dict(), **_tolerance_info(table, args)}


def cmd_region_check(args):
    table = _load_table(args.table, args)
    f = _factorize(table, args)
    geo = analyze_geometry(f)
    try:
        cand = [parse_scalar(v, table.mode) for v in args.candidate.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --candidate {args.candidate!r}: {exc}") from exc
    if len(cand) != f.K:
        raise UsageError(f"--candidate has {len(cand)} components, the table has K={f.K}")
    extremes = [f.state_vector(j) for j in geo.extreme_state_indices]
    arith = f.arith
    inside = outcome_region_contains(cand, extremes, arith)
    return {
        "candidate": encode_matrix(arith.array(cand)),
        "inside": inside,
        "verdict": "inside" if inside else "outside",
        "reflection_consistent": region_symmetry_check(cand, extremes, geo.n, arith),
        "K": f.K,
        **_tolerance_info(table, args),
    }


def _map_setup(args):
    source = _load_table(args.table, args)
    f1 = _factorize(source, args)
    target = _load_table(args.target, args) if args.target else source
    f2 = factorize(target, tau=args.tau) if args.target else f1
    doc = parse_map(_read(args.map), source.mode)
    domain = doc["domain"]
    if domain != "total":
        idx = []
        for d in domain:
            try:
                idx.append(source.state_index(d) if isinstance(d, str) else int(d))
            except KeyError:
                raise UsageError(f"map domain names unknown state {d!r}") from None
        domain = idx
    n1, n2 = trivial_vector(f1), trivial_vector(f2)
    smap = linearize(doc["F"], doc["g"], n1, target_n=n2, source_states=f1, domain=domain, arith=f1.arith)
    return source, f1, target, f2, smap


def cmd_map_linearize(args):
    source, f1, target, f2, smap = _map_setup(args)
    ok, residual = check_trivial_constraint(smap)
    violations = positivity_violations(smap, f1, f2)
    return {
        "C": encode_matrix(smap.C),
        "domain": "total" if smap.domain is None else [source.state_names[j] for j in smap.domain],
        "trivial_constraint": {"holds": ok, "residual": residual},
        "positivity_violations": [
            {"state": source.state_names[j], "outcome": target.layout.label(i), "probability": format_scalar(p)}
            for j, i, p in violations
        ],
        **_tolerance_info(source, args),
    }


def cmd_map_apply(args):
    source, f1, target, f2, smap = _map_setup(args)
    try:
        j = source.state_index(args.state)
    except KeyError:
        raise UsageError(f"unknown state {args.state!r}") from None
    image = apply(smap, f1.state_vector(j))
    probs = {target.layout.label(i): format_scalar(f2.t[i] @ image.coords) for i in range(target.L)}
    ok, residual = check_trivial_constraint(smap)
    return {
        "state": args.state,
        "image": encode_matrix(image.coords),
        "probabilities": probs,
        "trivial_constraint": {"holds": ok, "residual": residual},
        **_tolerance_info(source, args),
    }


def cmd_qgen(args):
    model = parse_model(_read(args.model))
    gen = generate_table(model, args.mode or FLOAT, snap_tol=args.snap_tol)
    if args.format == "text":
        return serialize_table(gen.table, "csv").decode()
    doc = table_to_dict(gen.table)
    return doc


def cmd_full_report(args):
    table = _load_table(args.table, args)
    f = _factorize(table, args)
    geo = analyze_geometry(f)
    return {
        "validate": {"valid": True, "L": table.L, "M": table.M},
        "rank": {"K": f.K},
        "factorization": {
            **f.to_dict(),
            "basis_states": [table.state_names[j] for j in f.pivot_cols],
            "reconstruction_error": f.reconstruction_error(),
        },
        "geometry": geo.to_dict(),
        "distinguishability": _distinguish(table, f, STRICT, geo.Z),
        "distinguishability_coarse": _distinguish(table, f, COARSE, geo.Z),
        **_tolerance_info(table, args),
    }


HANDLERS = {
    "validate": cmd_validate,
    "rank": cmd_rank,
    "factorize": cmd_factorize,
    "geometry": cmd_geometry,
    "distinguish": cmd_distinguish,
    "region-check": cmd_region_check,
    "map-apply": cmd_map_apply,
    "map-linearize": cmd_map_linearize,
    "qgen": cmd_qgen,
    "full-report": cmd_full_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, help="override the numeric mode of the input")
    common.add_argument("--tol", type=float, help="float-mode tolerance (default 1e-9)")
    common.add_argument("--tau", type=float, help="float-mode rank cutoff on singular values")
    common.add_argument("--basis", help="comma-separated state names to use as the standard basis")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--input-format", choices=("auto", "json", "csv"), default="auto")

    parser = argparse.ArgumentParser(prog="probtable", description="Vector representation of probability data tables.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "rank", "factorize", "geometry", "full-report"):
        sub.add_parser(name, parents=[common]).add_argument("table")
    p = sub.add_parser("distinguish", parents=[common])
    p.add_argument("table")
    p.add_argument("--dmode", choices=(STRICT, COARSE), default=STRICT)
    p = sub.add_parser("region-check", parents=[common])
    p.add_argument("table")
    p.add_argument("--candidate", required=True, help="comma-separated vector components")
    for name in ("map-apply", "map-linearize"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("table", help="source table")
        p.add_argument("map", help="map file (JSON)")
        p.add_argument("--target", help="target table (defaults to the source)")
        if name == "map-apply":
            p.add_argument("--state", required=True, help="source state name")
    p = sub.add_parser("qgen", parents=[common])
    p.add_argument("model")
    p.add_argument("--snap-tol", type=float, default=1e-9)
    return parser


def _as_text(doc, prefix="") -> list[str]:
    lines = []
    if isinstance(doc, dict):
        for k, v in doc.items():
            key = f"{prefix}.{k}" if prefix else str(k)
            if isinstance(v, (dict, list)) and not _flat_list(v):
                lines.extend(_as_text(v, key))
            else:
                lines.append(f"{key}: {_scalar_text(v)}")
    elif isinstance(doc, list):
        for k, v in enumerate(doc):
            lines.extend(_as_text(v, f"{prefix}[{k}]") if isinstance(v, (dict, list)) and not _flat_list(v)
                         else [f"{prefix}[{k}]: {_scalar_text(v)}"])
    return lines


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(e, (dict, list)) for e in v)


def _scalar_text(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar_text(e) for e in v) + "]"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def render(doc, fmt: str) -> str:
    if isinstance(doc, str):
        return doc
    if fmt == "text":
        return "\n".join(_as_text(doc)) + "\n"
    return dumps_json(doc) + "\n"


def _error_doc(exc) -> dict:
    doc = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("measurement", "outcome", "state", "row", "col"):
        val = getattr(exc, attr, None)
        if val is not None:
            doc[attr] = val
    return doc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    header = {"tool": "probtable", "version": __version__, "command": args.command}
    try:
        result = HANDLERS[args.command](args)
        status = 0
    except InputError as exc:
        result, status = _error_doc(exc), 1
    except (ProbTableError, ArithmeticError, ValueError) as exc:
        result, status = _error_doc(exc), 2
    if status:
        print(f"probtable {args.command}: {result['message']}", file=sys.stderr)
    doc = result if isinstance(result, str) else {**header, **result}
    text = render(doc, args.format)
    if args.out and status == 0:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
