"""Command line interface and the CSV conventions of the artifact.

Subcommands:

    bounds      print the counting-bound table for one shape
    certify     sweep a parameter band and write a certificate CSV
    verify      re-derive and check every certificate in a CSV
    recover     run the floating-point pipeline on one planted case
    overbound   sweep the just-past-the-bound grid, write numerical CSV
    proofcheck  verify the square-submatrix structure for one case
    tensor      decompose a planted or file-loaded tensor

File conventions.  Certificate CSVs have header
m,n,R,s,seed,det_mod<p>,rm_rows where rm_rows is a quoted bracketed
space-separated list of removed row indices ("[0 3 7]"); numerical CSVs
have header m,n,R,s,seed,ker_dim,decomp_error,s_val,w with absent
values left empty.  Floats are written with repr (shortest round-trip
form).  Files land in certificates/, numerical/ and log/ under
--out-dir and are named <test>[_sym]_b<lo->hi>_p<p>.csv with the lower
bound segment omitted when zero.  Exit codes: 0 success, 1 a
certification, verification or structural check failed, 2 usage or
input-format errors.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from .bounds import PlantSpec, ProblemShape
from .certify import (
    DEFAULT_MAX_RESAMPLES,
    DEFAULT_PRIME,
    Certificate,
    band_shapes,
    overbound_cases,
    run_sweep,
    verify_certificate,
)
from .errors import PlantedRank1Error, SchemaError
from .proof_check import check_structure
from .recover import recover_rank_one
from .subspaces import generate_real, orthonormal_basis, stream
from .tensor_decomp import (
    decompose_order3,
    decompose_order4,
    decompose_symmetric4,
    factors_to_csv,
    load_tensor,
    random_cp_tensor,
)
from .recover import matching_error

__all__ = ["main"]

ROLE_PIPELINE = 3


def _fmt(x) -> str:
    return repr(float(x))


def _band_tag(bound_min: float, bound_max: float) -> str:
    def one(v):
        return str(int(v)) if float(v) == int(v) else repr(float(v))

    if bound_min > 0:
        return f"b{one(bound_min)}-{one(bound_max)}"
    return f"b{one(bound_max)}"


def csv_name(test_type: str, symmetric: bool, bound_min: float, bound_max: float, p: int) -> str:
    sym = "_sym" if symmetric else ""
    return f"{test_type}{sym}_{_band_tag(bound_min, bound_max)}_p{p}.csv"


def write_certificate_csv(path, certs, p: int) -> None:
    with open(path, "w") as fh:
        fh.write(f"m,n,R,s,seed,det_mod{p},rm_rows\n")
        for c in certs:
            rm = "[" + " ".join(str(r) for r in c.rm_rows) + "]"
            fh.write(f'{c.m},{c.n},{c.R},{c.s},{c.seed},{c.det_mod_p},"{rm}"\n')


def read_certificate_csv(path, symmetric: bool = False) -> list[Certificate]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, no header") from None
        match = re.fullmatch(r"det_mod(\d+)", header[5]) if len(header) == 7 else None
        if header[:5] != ["m", "n", "R", "s", "seed"] or match is None or header[6] != "rm_rows":
            raise SchemaError(f"{path}: unexpected header {header}")
        p = int(match.group(1))
        certs = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 7:
                raise SchemaError(f"{path}:{lineno}: expected 7 fields, got {len(row)}")
            try:
                m, n, big_r, s, seed, det = (int(v) for v in row[:6])
                rm_field = row[6].strip()
                if not (rm_field.startswith("[") and rm_field.endswith("]")):
                    raise ValueError(f"malformed rm_rows field {rm_field!r}")
                inner = rm_field[1:-1].replace(",", " ")
                rm = tuple(int(t) for t in inner.split())
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
            certs.append(
                Certificate(
                    m=m, n=n, R=big_r, s=s, symmetric=symmetric, p=p,
                    seed=seed, det_mod_p=det, rm_rows=rm,
                )
            )
    return certs


@dataclass(frozen=True)
class NumericalRow:
    """One row of a numerical (floating-point pipeline) CSV."""

    m: int
    n: int
    R: int
    s: int
    seed: int
    ker_dim: int
    decomp_error: float | None
    s_val: float | None
    w: float | None


def write_numerical_csv(path, rows) -> None:
    def opt(v):
        return "" if v is None else _fmt(v)

    with open(path, "w") as fh:
        fh.write("m,n,R,s,seed,ker_dim,decomp_error,s_val,w\n")
        for r in rows:
            fh.write(
                f"{r.m},{r.n},{r.R},{r.s},{r.seed},{r.ker_dim},"
                f"{opt(r.decomp_error)},{opt(r.s_val)},{opt(r.w)}\n"
            )


def read_numerical_csv(path) -> list[NumericalRow]:
    expected = ["m", "n", "R", "s", "seed", "ker_dim", "decomp_error", "s_val", "w"]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, no header") from None
        if header != expected:
            raise SchemaError(f"{path}: unexpected header {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 9:
                raise SchemaError(f"{path}:{lineno}: expected 9 fields")
            try:
                ints = [int(v) for v in row[:6]]
                floats = [float(v) if v != "" else None for v in row[6:]]
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
            rows.append(NumericalRow(*ints, *floats))
    return rows


def _outdirs(root: str) -> dict[str, Path]:
    base = Path(root)
    dirs = {
        "certificates": base / "certificates",
        "numerical": base / "numerical",
        "log": base / "log",
    }
    for d in dirs.values():
        d.mkdir(parents=True, exist_ok=True)
    return dirs


def _run_case_real(m, n, symmetric, s, big_r, seed):
    """One floating-point pipeline case; returns (NumericalRow, result)."""
    shape = ProblemShape(m, n, symmetric=symmetric)
    spec = PlantSpec(s, big_r)
    sub = generate_real(shape, spec, seed)
    basis = orthonormal_basis(sub)
    rng = stream(seed, ROLE_PIPELINE, 0)
    truth = list(sub.planted) if s > 0 else None
    result = recover_rank_one(basis, shape, rng, ground_truth=truth)
    row = NumericalRow(
        m=m, n=n, R=big_r, s=s, seed=seed,
        ker_dim=result.ker_dim,
        decomp_error=result.decomp_error,
        s_val=result.s_val,
        w=result.matching,
    )
    return row, result


def cmd_bounds(args) -> int:
    shape = ProblemShape(args.m, args.n if not args.sym else args.m, symmetric=args.sym)
    top = bounds_mod.r_max(shape)
    print(f"shape: {'symmetric ' if args.sym else ''}{shape.m} x {shape.n}")
    print(f"constraint rows:        {bounds_mod.num_rows(shape)}")
    print(f"r_max:                  {top}")
    print(f"s_star:                 {bounds_mod.s_star(shape)}")
    print(f"identifiability bound:  {bounds_mod.identifiability_bound(shape)}")
    print("s  r_max_given_s  cols_at_boundary")
    for s in range(top + 1):
        rr = bounds_mod.r_max_given_s(shape, s)
        print(f"{s:<3}{rr:<15}{bounds_mod.num_cols(PlantSpec(min(s, rr), rr))}")
    return 0


def cmd_certify(args) -> int:
    report = run_sweep(
        args.test_type,
        args.bound_min,
        args.bound_max,
        p=args.prime,
        symmetric=args.sym,
        seed=args.seed,
        exhaustive=args.exhaustive,
        max_resamples=args.max_resamples,
        jobs=args.jobs,
    )
    dirs = _outdirs(args.out_dir)
    name = csv_name(args.test_type, args.sym, args.bound_min, args.bound_max, args.prime)
    out = dirs["certificates"] / name
    write_certificate_csv(out, report.certificates, args.prime)
    with open(dirs["log"] / (name + ".log"), "w") as log:
        fails = {(f.m, f.n, f.s, f.R) for f in report.failures}
        by_key = {(c.m, c.n, c.s, c.R): c for c in report.certificates}
        for key, elapsed in report.timings:
            m, n, s, big_r = key
            if key in fails:
                log.write(
                    f"m={m} n={n} s={s} R={big_r} status=FAIL "
                    f"attempts={args.max_resamples} time={elapsed:.3f}s\n"
                )
            else:
                c = by_key[key]
                log.write(
                    f"m={m} n={n} s={s} R={big_r} seed={c.seed} "
                    f"resamples={c.seed - args.seed} time={elapsed:.3f}s status=ok\n"
                )
    print(f"certified {len(report.certificates)} cases -> {out}")
    if report.failures:
        for f in report.failures:
            print(
                f"FAILED m={f.m} n={f.n} s={f.s} R={f.R} after {f.attempts} attempts",
                file=sys.stderr,
            )
        return 1
    return 0


def cmd_verify(args) -> int:
    symmetric = args.sym or "_sym_" in Path(args.file).name
    certs = read_certificate_csv(args.file, symmetric=symmetric)
    if not certs:
        print(f"warning: {args.file} holds no certificate rows", file=sys.stderr)
        return 0
    bad = 0
    for c in certs:
        if not verify_certificate(c):
            bad += 1
            print(
                f"MISMATCH m={c.m} n={c.n} s={c.s} R={c.R} seed={c.seed}",
                file=sys.stderr,
            )
    print(f"verified {len(certs) - bad}/{len(certs)} certificates from {args.file}")
    return 1 if bad else 0


def cmd_recover(args) -> int:
    n = args.m if args.sym else args.n
    if n is None:
        raise SchemaError("--n is required unless --sym is given")
    row, _ = _run_case_real(args.m, n, args.sym, args.s, args.R, args.seed)
    print("m,n,R,s,seed,ker_dim,decomp_error,s_val,w")
    opt = lambda v: "" if v is None else _fmt(v)
    print(
        f"{row.m},{row.n},{row.R},{row.s},{row.seed},{row.ker_dim},"
        f"{opt(row.decomp_error)},{opt(row.s_val)},{opt(row.w)}"
    )
    return 0


def cmd_overbound(args) -> int:
    rows = []
    anomalies = []
    timings = []
    for shape in band_shapes(args.bound_min, args.bound_max, args.sym):
        for spec in overbound_cases(shape):
            t0 = time.perf_counter()
            row, _ = _run_case_real(
                shape.m, shape.n, args.sym, spec.s, spec.R, args.seed
            )
            elapsed = time.perf_counter() - t0
            expected = bounds_mod.num_cols(PlantSpec(0, spec.R)) - bounds_mod.num_rows(shape)
            timings.append((row, expected, elapsed))
            rows.append(row)
            if row.ker_dim != expected:
                anomalies.append((row, expected))
    rows.sort(key=lambda r: (r.m, r.n, r.s, r.R))
    dirs = _outdirs(args.out_dir)
    name = csv_name("overbound", args.sym, args.bound_min, args.bound_max, args.prime)
    out = dirs["numerical"] / name
    write_numerical_csv(out, rows)
    with open(dirs["log"] / (name + ".log"), "w") as log:
        for row, expected, elapsed in timings:
            status = "ok" if row.ker_dim == expected else "ANOMALY"
            log.write(
                f"m={row.m} n={row.n} s={row.s} R={row.R} ker_dim={row.ker_dim} "
                f"expected={expected} time={elapsed:.3f}s status={status}\n"
            )
    print(f"wrote {len(rows)} overbound rows -> {out}")
    if anomalies:
        for row, expected in anomalies:
            print(
                f"ANOMALY m={row.m} n={row.n} s={row.s} R={row.R}: "
                f"ker_dim={row.ker_dim}, expected {expected}",
                file=sys.stderr,
            )
        return 1
    return 0


def cmd_proofcheck(args) -> int:
    shape = ProblemShape(args.m, args.n)
    spec = PlantSpec(args.s, args.R)
    p = None if args.real else args.prime
    report = check_structure(
        shape, spec, p=p, seed=args.seed, max_trials=args.trials
    )
    print(f"square matrix size:        {report.size} x {report.size}")
    print(f"bin sizes (1,2,3,4):       {report.bin_sizes}")
    print(f"unpartnered bin-4 pairs:   {report.unpartnered}")
    print(f"square and rows distinct:  {report.square and report.rows_distinct}")
    print(f"zero pattern exact:        {report.zero_pattern_ok}")
    print(f"block triangular:          {report.block_triangular_ok}")
    print(f"diagonal blocks regular:   {report.diag_blocks_nonsingular}")
    print(f"det equals block product:  {report.det_matches_block_product}")
    det = report.det if p is None else f"{report.det} (mod {p})"
    print(f"determinant:               {det}")
    print(f"assignments tried:         {report.trials_used}")
    print("PASS" if report.ok else "FAIL")
    return 0 if report.ok else 1


def cmd_tensor(args) -> int:
    rng = stream(args.seed, ROLE_PIPELINE, 0)
    truth = None
    if args.infile:
        tensor = load_tensor(args.infile)
        order = tensor.ndim
    else:
        order = args.order
        if args.sym:
            dims = [args.dims[0]] * 4
        else:
            if len(args.dims) != order:
                raise SchemaError(
                    f"--dims needs {order} values for order {order}, got {len(args.dims)}"
                )
            dims = args.dims
        tensor, planted = random_cp_tensor(dims, args.rank, seed=args.seed, symmetric=args.sym)
        truth = planted
    if args.sym:
        decomp = decompose_symmetric4(tensor, args.rank, rng)
    elif order == 3:
        decomp = decompose_order3(tensor, args.rank, rng)
    elif order == 4:
        decomp = decompose_order4(tensor, args.rank, rng)
    else:
        raise SchemaError(f"unsupported tensor order {order}")
    res = decomp.residual(tensor)
    print(f"rank {decomp.rank} decomposition, relative residual {_fmt(res)}")
    if truth is not None:
        match = matching_error(
            [truth.term(l) for l in range(truth.rank)],
            [decomp.term(l) for l in range(decomp.rank)],
        )
        print(f"matching error against planted terms: {_fmt(match)}")
    if args.factors_out:
        factors_to_csv(args.factors_out, decomp)
        print(f"factors -> {args.factors_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plantedrank1",
        description="Planted rank-1 detection: certificates, recovery, tensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(sp):
        sp.add_argument("--seed", type=int, default=0, help="base seed (default 0)")

    sp = sub.add_parser("bounds", help="print the counting-bound table for a shape")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--sym", action="store_true")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("certify", help="certificate sweep over a band")
    sp.add_argument("--test-type", choices=("all", "null", "cpd"), required=True)
    sp.add_argument("--bound-min", type=float, default=0.0)
    sp.add_argument("--bound-max", type=float, required=True)
    sp.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    sp.add_argument("--sym", action="store_true")
    sp.add_argument("--exhaustive", action="store_true",
                    help="all (s, R) cases instead of the boundary ones")
    sp.add_argument("--max-resamples", type=int, default=DEFAULT_MAX_RESAMPLES)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out-dir", default=".")
    add_seed(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("verify", help="re-check a certificate CSV")
    sp.add_argument("--file", required=True)
    sp.add_argument("--sym", action="store_true",
                    help="treat cases as symmetric (inferred from _sym_ in the name)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("recover", help="one floating-point pipeline case")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--R", type=int, required=True)
    sp.add_argument("--sym", action="store_true")
    add_seed(sp)
    sp.set_defaults(func=cmd_recover)

    sp = sub.add_parser("overbound", help="numerical sweep just past the bound")
    sp.add_argument("--bound-min", type=float, default=0.0)
    sp.add_argument("--bound-max", type=float, required=True)
    sp.add_argument("--prime", type=int, default=DEFAULT_PRIME,
                    help="only used in the output file name")
    sp.add_argument("--sym", action="store_true")
    sp.add_argument("--out-dir", default=".")
    add_seed(sp)
    sp.set_defaults(func=cmd_overbound)

    sp = sub.add_parser("proofcheck", help="square-submatrix structure checks")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--R", type=int, required=True)
    sp.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    sp.add_argument("--real", action="store_true", help="use real assignments")
    sp.add_argument("--trials", type=int, default=5)
    add_seed(sp)
    sp.set_defaults(func=cmd_proofcheck)

    sp = sub.add_parser("tensor", help="decompose a planted or loaded tensor")
    sp.add_argument("--order", type=int, choices=(3, 4), default=3)
    sp.add_argument("--dims", type=int, nargs="+", default=None)
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--sym", action="store_true", help="symmetric order-4 mode")
    sp.add_argument("--infile", help="read the tensor from a file instead of planting")
    sp.add_argument("--factors-out", help="write the factor CSV here")
    add_seed(sp)
    sp.set_defaults(func=cmd_tensor)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "dims", None) is None and getattr(args, "command", "") == "tensor" and not args.infile:
        parser.error("tensor: --dims is required when planting")
    try:
        return args.func(args)
    except PlantedRank1Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
