"""Command line interface.

Exit codes: 0 success, 1 check failed (e.g. a square that is valid but not
uniform), 2 bad input or usage.  With --json every command prints a single
report object {"command", "ok", "result"} matching data/report.schema.json;
data-producing commands print the bare data by default.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import algebra, block_design, classify, isomorph, sls_core

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _parse_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc


def _load_square(path: str) -> sls_core.SemiLatinSquare:
    obj = _parse_json(_read_text(path))
    if not isinstance(obj, dict) or "cells" not in obj:
        raise ValueError(f"{path}: expected a semi-Latin square "
                         "(object with 'cells')")
    return sls_core.SemiLatinSquare.from_json(json.dumps(obj))


def _load_design(path: str) -> block_design.BlockDesign:
    obj = _parse_json(_read_text(path))
    if not isinstance(obj, dict) or "blocks" not in obj:
        raise ValueError(f"{path}: expected a block design "
                         "(object with 'blocks')")
    return block_design.BlockDesign.from_json(json.dumps(obj))


def _load_square_or_design(path: str):
    obj = _parse_json(_read_text(path))
    if isinstance(obj, dict) and "cells" in obj:
        return sls_core.SemiLatinSquare.from_json(json.dumps(obj))
    if isinstance(obj, dict) and "blocks" in obj:
        return block_design.BlockDesign.from_json(json.dumps(obj))
    raise ValueError(f"{path}: expected a square ('cells') or a design "
                     "('blocks')")


def _load_oa(path: str) -> block_design.OrthogonalArray:
    text = _read_text(path)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = _parse_json(text)
        rows = tuple(tuple(r) for r in obj["rows"])
        return block_design.OrthogonalArray(
            n_runs=obj["n_runs"], factors=obj["factors"],
            levels=obj["levels"], rows=rows)
    return block_design.OrthogonalArray.from_text(text)


def _emit(args, command: str, ok: bool, result: dict,
          text_lines: list[str], data_default: str | None = None) -> int:
    """data_default, when set, is printed verbatim unless --json asked for
    the report envelope."""
    if getattr(args, "json", False):
        print(json.dumps({"command": command, "ok": ok, "result": result},
                         separators=(",", ":")))
    elif data_default is not None:
        print(data_default)
    else:
        for line in text_lines:
            print(line)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# -- handlers ----------------------------------------------------------------


def _cmd_field(args) -> int:
    fld = algebra.finite_field(args.q)
    result = {"q": fld.q, "p": fld.p, "m": fld.m,
              "modulus": list(fld.modulus),
              "add": [list(r) for r in fld.add_table],
              "mul": [list(r) for r in fld.mul_table]}
    lines = [f"GF({fld.q}): characteristic {fld.p}, degree {fld.m}, "
             f"modulus coefficients {list(fld.modulus)}"]
    return _emit(args, "field", True, result, lines)


def _cmd_mols(args) -> int:
    squares = algebra.bose_mols(args.q)
    ok = algebra.verify_mols(squares)
    result = {"q": args.q, "count": len(squares), "pairwise_orthogonal": ok,
              "squares": [[list(r) for r in s.grid] for s in squares]}
    lines = [f"{len(squares)} mutually orthogonal Latin squares of order "
             f"{args.q}; pairwise orthogonality: {ok}"]
    return _emit(args, "mols", ok, result, lines)


def _cmd_construct(args) -> int:
    if args.what == "superpose":
        parts = [_load_square(p) for p in args.inputs]
        square = sls_core.superpose(parts)
    elif args.what == "inflate":
        square = sls_core.inflate(_load_square(args.input), args.factor)
    else:  # bars
        square = sls_core.bar_s(algebra.bose_mols(args.n))
    payload = square.to_json()
    return _emit(args, f"construct-{args.what}", True,
                 json.loads(payload), [], data_default=payload)


def _cmd_verify(args) -> int:
    errors: list[str] = []
    square = None
    try:
        square = _load_square(args.file)
    except (sls_core.ValidationError, ValueError) as exc:
        errors.append(str(exc))
    if square is None:
        result = {"valid": False, "uniform": False, "mu": None,
                  "witness": None, "errors": errors}
        return _emit(args, "verify", False, result, ["invalid: " + errors[0]])
    report = sls_core.uniformity(square)
    witness = None
    if report.witness is not None:
        (r1, c1), (r2, c2), size = report.witness
        witness = {"cell1": [r1, c1], "cell2": [r2, c2],
                   "intersection": size}
    result = {"valid": True, "uniform": report.uniform, "mu": report.mu,
              "witness": witness, "errors": []}
    if report.uniform:
        lines = [f"valid ({square.n} x {square.n})/{square.k}, uniform with "
                 f"mu = {report.mu}"]
    else:
        lines = [f"valid ({square.n} x {square.n})/{square.k} but not "
                 f"uniform; witness cells {witness['cell1']} and "
                 f"{witness['cell2']} share {witness['intersection']}"]
    return _emit(args, "verify", report.uniform, result, lines)


def _cmd_eta(args) -> int:
    obj = _load_square_or_design(args.file)
    if isinstance(obj, sls_core.SemiLatinSquare):
        design = sls_core.underlying_design(obj)
    else:
        design = obj
    vec = block_design.eta(design)
    v = design.v
    pair_total = sum(vec)
    weighted = sum(i * x for i, x in enumerate(vec))
    result = {"eta": list(vec),
              "identities": {"pair_total": pair_total,
                             "pairs_expected": v * (v - 1) // 2,
                             "weighted_total": weighted}}
    return _emit(args, "eta", True, result, [f"eta = {list(vec)}"])


def _cmd_spectrum(args) -> int:
    obj = _load_square_or_design(args.file)
    if isinstance(obj, sls_core.SemiLatinSquare):
        design = sls_core.underlying_design(obj)
    else:
        design = obj
    spectrum = block_design.canonical_efficiency_factors(design)
    result = {"factors": [[val, mult] for val, mult in spectrum.factors],
              "size": spectrum.size}
    lines = ["canonical efficiency factors: "
             + ", ".join(f"{val:.9f} (x{mult})" for val, mult in spectrum.factors)]
    return _emit(args, "spectrum", True, result, lines)


def _cmd_dual(args) -> int:
    design = sls_core.dual(_load_square(args.file))
    payload = design.to_json()
    return _emit(args, "dual", True, json.loads(payload), [],
                 data_default=payload)


def _cmd_underlying(args) -> int:
    design = sls_core.underlying_design(_load_square(args.file))
    payload = design.to_json()
    return _emit(args, "underlying", True, json.loads(payload), [],
                 data_default=payload)


def _cmd_derive(args) -> int:
    square = _load_square(args.file)
    if args.which in ("d1", "d2"):
        rows, cols = block_design.delta12(square)
        design = rows if args.which == "d1" else cols
    else:
        design = block_design.delta3(square)
    payload = design.to_json()
    return _emit(args, f"derive-{args.which}", True, json.loads(payload), [],
                 data_default=payload)


def _cmd_to_oa(args) -> int:
    design = _load_design(args.file)
    oa = block_design.to_orthogonal_array(design)
    result = {"n_runs": oa.n_runs, "factors": oa.factors,
              "levels": oa.levels, "rows": [list(r) for r in oa.rows]}
    return _emit(args, "to-oa", True, result, [],
                 data_default=oa.to_text())


def _cmd_oa_strength(args) -> int:
    oa = _load_oa(args.file)
    t = block_design.oa_strength(oa)
    result = {"n_runs": oa.n_runs, "factors": oa.factors,
              "levels": oa.levels, "strength": t}
    return _emit(args, "oa-strength", True, result, [f"strength = {t}"])


def _cmd_resolve(args) -> int:
    design = _load_design(args.file)
    resolution = block_design.find_resolution(design)
    affine = block_design.is_affine_resolvable(design)
    result = {"resolvable": resolution is not None,
              "affine": affine,
              "classes": [list(c) for c in resolution.classes]
              if resolution else None}
    lines = [f"resolvable: {resolution is not None}; "
             f"affine resolvable: {affine}"]
    return _emit(args, "resolve", True, result, lines)


def _cmd_iso(args) -> int:
    a = _load_square(args.file_a)
    b = _load_square(args.file_b)
    same = isomorph.sls_are_isomorphic(a, b)
    return _emit(args, "iso", True, {"isomorphic": same},
                 [f"isomorphic: {same}"])


def _cmd_aut(args) -> int:
    obj = _load_square_or_design(args.file)
    order = isomorph.aut_order(obj)
    return _emit(args, "aut", True, {"order": order},
                 [f"automorphism group order: {order}"])


def _cmd_cert(args) -> int:
    obj = _load_square_or_design(args.file)
    if isinstance(obj, sls_core.SemiLatinSquare):
        cert = isomorph.sls_certificate(obj)
    else:
        cert = isomorph.design_certificate(obj)
    return _emit(args, "cert", True, {"certificate": cert.hex},
                 [cert.hex])


def _parse_seed_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except Exception as exc:
        raise ValueError(f"bad seed range {text!r}, expected A..B") from exc


def _cmd_classify(args) -> int:
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("USLSQ_WORKERS", "1"))
    seed_range = _parse_seed_range(args.seed_range) if args.seed_range else None
    result = classify.classify_uniform(
        args.n, args.mu, workers=workers, out_dir=args.out,
        checkpoint_path=args.checkpoint, seed_range=seed_range)
    payload = {"n": result.n, "mu": result.mu,
               "seed_count": result.seed_count,
               "seed_range": list(result.seed_range),
               "solution_count": result.solution_count,
               "class_count": result.class_count,
               "complete": result.complete,
               "elapsed_seconds": round(result.elapsed_seconds, 3)}
    lines = [f"{result.class_count} classes from {result.solution_count} "
             f"solutions ({result.seed_count} seeds, "
             f"complete={result.complete})"]
    return _emit(args, "classify", True, payload, lines)


def _cmd_catalog(args) -> int:
    manifest, index, _ = classify.load_classification(args.dir)
    result = {"manifest": manifest, "index": index}
    lines = [f"uniform ({manifest['n']} x {manifest['n']})/"
             f"{manifest['mu'] * (manifest['n'] - 1)} squares, mu = "
             f"{manifest['mu']}: {manifest['class_count']} classes"]
    for entry in index["classes"]:
        lines.append(f"  class {entry['id']:5d}  eta={entry['eta']}  "
                     f"|Aut|={entry['aut_square']}  "
                     f"|Aut dual|={entry['aut_dual']}")
    return _emit(args, "catalog", True, result, lines)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="uslsq",
        description="uniform semi-Latin squares: construction, invariants, "
                    "classification")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.add_argument("--json", action="store_true",
                        help="print a JSON report")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("field", _cmd_field, help="finite field tables")
    sp.add_argument("q", type=int)

    sp = add("mols", _cmd_mols, help="complete set of MOLS of prime power "
                                     "order")
    sp.add_argument("q", type=int)

    sp = add("construct", _cmd_construct, help="build squares")
    sp.add_argument("what", choices=["superpose", "inflate", "bars"])
    sp.add_argument("--inputs", nargs="+", default=[],
                    help="square files (superpose)")
    sp.add_argument("--input", help="square file (inflate)")
    sp.add_argument("--factor", type=int, help="inflation factor")
    sp.add_argument("--n", type=int, help="order (bars)")

    sp = add("verify", _cmd_verify, help="validate a square and test "
                                         "uniformity")
    sp.add_argument("file")

    sp = add("eta", _cmd_eta, help="concurrence census")
    sp.add_argument("file")

    sp = add("spectrum", _cmd_spectrum, help="canonical efficiency factors")
    sp.add_argument("file")

    sp = add("dual", _cmd_dual, help="dual block design of a square")
    sp.add_argument("file")

    sp = add("underlying", _cmd_underlying, help="underlying block design")
    sp.add_argument("file")

    sp = add("derive", _cmd_derive, help="row / column / both-margin "
                                         "derived designs")
    sp.add_argument("which", choices=["d1", "d2", "d3"])
    sp.add_argument("file")

    sp = add("to-oa", _cmd_to_oa, help="orthogonal array of an affine "
                                       "resolvable design")
    sp.add_argument("file")

    sp = add("oa-strength", _cmd_oa_strength, help="strength of an "
                                                   "orthogonal array")
    sp.add_argument("file")

    sp = add("resolve", _cmd_resolve, help="resolvability / affine "
                                           "resolvability")
    sp.add_argument("file")

    sp = add("iso", _cmd_iso, help="isomorphism test for two squares")
    sp.add_argument("file_a")
    sp.add_argument("file_b")

    sp = add("aut", _cmd_aut, help="automorphism group order")
    sp.add_argument("file")

    sp = add("cert", _cmd_cert, help="canonical certificate")
    sp.add_argument("file")

    sp = add("classify", _cmd_classify, help="classify uniform squares up "
                                             "to isomorphism")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mu", type=int, required=True)
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--workers", type=int, default=None,
                    help="parallel workers (default $USLSQ_WORKERS or 1)")
    sp.add_argument("--seed-range", help="A..B half-open seed shard")
    sp.add_argument("--checkpoint", help="checkpoint file (resumable)")

    sp = add("catalog", _cmd_catalog, help="print a finished classification")
    sp.add_argument("dir")

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except classify.IncompleteRunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (sls_core.ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
