"""Command-line entry point: generate, echelonize, decompose, multiply, benchmark."""

from __future__ import annotations

import argparse
import csv
import io
import statistics
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import bitmat
from .bitmat import BitMatrix, random_matrix, row_ops
from .gf2mul import MulConfig, mul_naive, multiply
from .graycode import DEFAULT_TABLES, VALID_TABLE_COUNTS
from .m4ri import m4ri_echelonize
from .ple import (DEFAULT_BUDGET_BYTES, STRATEGIES, PleOutcome, block_iterative_ple,
                  echelonize, reconstruct, recursive_ple)
from .reference import naive_rref

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_MISMATCH = 3

DEFAULT_MEMORY_BUDGET = 2 * 1024 ** 3
# matrix copies alive at once during a benchmark cell (input, working copy, tables, products)
_COPIES_PER_RUN = 4


class UsageError(Exception):
    pass


class VerificationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument types ------------------------------------------------------------------


def _k_arg(text: str):
    if text == "auto":
        return None
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}")
    if not 1 <= k <= 16:
        raise argparse.ArgumentTypeError("k must be in [1, 16]")
    return k


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed_arg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _density_arg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"density must be in [0, 1], got {v}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


# -- I/O helpers ----------------------------------------------------------------------


def read_matrix(path) -> BitMatrix:
    try:
        return bitmat.load(path)
    except (OSError, ValueError) as exc:
        raise OSError(f"cannot read matrix from {path}: {exc}") from exc


def write_matrix(A: BitMatrix, path, fmt: str):
    try:
        bitmat.save(A, path, fmt)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


# -- verification (kept separate so it can be exercised directly) ---------------------


def verify_echelon(original: BitMatrix, result: BitMatrix, rank: int, full: bool,
                   other: BitMatrix | None = None):
    """Raise :class:`VerificationError` unless ``result`` is a correct echelon form."""
    R, oracle_rank, _ = naive_rref(original)
    if rank != oracle_rank:
        raise VerificationError(f"rank {rank} differs from the reference rank {oracle_rank}")
    if full:
        if result != R:
            raise VerificationError("RREF differs from the reference elimination")
    else:
        R2, r2, _ = naive_rref(result)
        if r2 != rank or R2 != R or not _is_echelon(result, rank):
            raise VerificationError("result is not a row echelon form of the input")
    if other is not None and full and other != result:
        raise VerificationError("RREF differs between strategies")


def _is_echelon(A: BitMatrix, rank: int) -> bool:
    rows = A.to_row_ints()
    if any(rows[rank:]):
        return False
    lead = [(x & -x).bit_length() for x in rows[:rank]]
    return all(l > 0 for l in lead) and all(b > a for a, b in zip(lead, lead[1:]))


def verify_ple(original: BitMatrix, decomposed: BitMatrix, outcome: PleOutcome):
    _, oracle_rank, pivots = naive_rref(original)
    if outcome.rank != oracle_rank or list(outcome.Q) != pivots:
        raise VerificationError("rank or column rank profile differs from the reference")
    if reconstruct(decomposed, outcome) != original:
        raise VerificationError("P^T L E does not reproduce the input")


def verify_product(A: BitMatrix, B: BitMatrix, C: BitMatrix):
    if mul_naive(A, B) != C:
        raise VerificationError("product differs from the naive product")


# -- commands ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if not args.out:
        raise UsageError("gen needs --out")
    if args.density is not None and args.nnz_per_row is not None:
        raise UsageError("give either --density or --nnz-per-row, not both")
    if args.nnz_per_row is not None and not 0 <= args.nnz_per_row <= args.cols:
        raise UsageError(f"--nnz-per-row must be in [0, {args.cols}]")
    _check_budget(args.rows, args.cols, args.memory_budget, copies=1)
    A = random_matrix(args.rows, args.cols, density=args.density,
                      nnz_per_row=args.nnz_per_row, seed=args.seed)
    write_matrix(A, args.out, args.format)
    print(f"wrote {args.rows}x{args.cols} matrix to {args.out}")
    return EXIT_OK


def _other_strategy(strategy: str) -> str:
    return "m4ri" if strategy != "m4ri" else "ple-recursive"


def _echelon_kwargs(args) -> dict:
    return dict(k=args.k, tables=args.tables,
                budget_bytes=args.crossover or DEFAULT_BUDGET_BYTES)


def cmd_echelonize(args) -> int:
    A = read_matrix(args.input)
    work = A.copy()
    t0 = time.perf_counter()
    rank = echelonize(work, args.strategy, args.full, **_echelon_kwargs(args))
    elapsed = time.perf_counter() - t0
    print(f"rank {rank}")
    print(f"wall_time {elapsed:.6f}")
    if args.out:
        write_matrix(work, args.out, args.format)
    if args.verify:
        other = A.copy()
        echelonize(other, _other_strategy(args.strategy), True, **_echelon_kwargs(args))
        verify_echelon(A, work, rank, args.full, other if args.full else None)
        print("verify ok")
    return EXIT_OK


def cmd_ple(args) -> int:
    if args.strategy not in ("ple-iterative", "ple-recursive"):
        raise UsageError("ple supports --strategy ple-iterative or ple-recursive")
    A = read_matrix(args.input)
    work = A.copy()
    t0 = time.perf_counter()
    if args.strategy == "ple-iterative":
        out = block_iterative_ple(work, args.k, args.tables)
    else:
        out = recursive_ple(work, budget_bytes=args.crossover or DEFAULT_BUDGET_BYTES,
                            k=args.k, tables=args.tables)
    elapsed = time.perf_counter() - t0
    print(f"rank {out.rank}")
    print(f"wall_time {elapsed:.6f}")
    if args.show_perm:
        print("P " + " ".join(map(str, out.P.swaps)))
        print("Q " + " ".join(map(str, out.Q)))
    if args.out:
        write_matrix(work, args.out, args.format)
    if args.verify:
        verify_ple(A, work, out)
        print("verify ok")
    return EXIT_OK


def cmd_multiply(args) -> int:
    A = read_matrix(args.a)
    B = read_matrix(args.b)
    if A.ncols != B.nrows:
        raise UsageError(f"dimension mismatch: {A.nrows}x{A.ncols} times {B.nrows}x{B.ncols}")
    cfg = MulConfig(m4rm_k=args.k, table_count=args.tables,
                    strassen_cutoff=args.strassen_cutoff)
    t0 = time.perf_counter()
    C = multiply(A, B, args.backend, cfg)
    elapsed = time.perf_counter() - t0
    print(f"shape {C.nrows}x{C.ncols}")
    print(f"wall_time {elapsed:.6f}")
    if args.out:
        write_matrix(C, args.out, args.format)
    if args.verify:
        verify_product(A, B, C)
        print("verify ok")
    return EXIT_OK


# -- benchmarks -------------------------------------------------------------------------


@dataclass
class BenchRecord:
    algorithm: str
    nrows: int
    ncols: int
    density: str
    k: str
    table_count: int
    crossover: int
    seed: str
    wall_time: float
    row_additions: int
    rank: int


CSV_HEADER = [f.name for f in fields(BenchRecord)]


def _check_budget(m: int, n: int, budget: int, copies: int = _COPIES_PER_RUN):
    need = m * ((n + 63) // 64) * 8 * copies
    if need > budget:
        raise UsageError(f"{m}x{n} needs about {need} bytes, above the memory budget of "
                         f"{budget} bytes (raise --memory-budget to allow it)")


def _suite_cells(args):
    """Yield ``(algorithm, n, density_label, make_input, run)`` for the chosen suite."""
    budget = args.crossover or DEFAULT_BUDGET_BYTES
    k, t = args.k, args.tables

    def dense(n, seed):
        return random_matrix(n, n, density=args.density, seed=seed)

    def rec(base):
        return lambda A: recursive_ple(A, budget_bytes=budget, base=base, k=k, tables=t).rank

    def rref(strategy):
        return lambda A: echelonize(A, strategy, True, k=k, tables=t, budget_bytes=budget)

    label = f"{args.density:g}"
    if args.suite == "table1":
        for n in args.sizes:
            yield "ple-recursive/cubic-base", n, label, dense, rec("cubic")
            yield "ple-recursive/iterative-base", n, label, dense, rec("iterative")
    elif args.suite == "table2":
        for n in args.sizes:
            yield "m4ri", n, label, dense, lambda A: m4ri_echelonize(A, k=k or 0)
            yield "ple-recursive", n, label, dense, rref("ple-recursive")
    else:
        for n in args.sizes:
            for nnz in args.nnz:
                if nnz > n:
                    raise UsageError(f"nnz-per-row {nnz} exceeds the dimension {n}")

                def sparse(nn, seed, _z=nnz):
                    return random_matrix(nn, nn, nnz_per_row=_z, seed=seed)

                yield "ple-recursive", n, f"nnz={nnz}", sparse, rref("ple-recursive")
                yield "m4ri", n, f"nnz={nnz}", sparse, rref("m4ri")


def run_bench(args) -> list[BenchRecord]:
    for n in args.sizes:
        _check_budget(n, n, args.memory_budget)
    records = []
    for algo, n, dens, make, run in _suite_cells(args):
        times, adds, ranks = [], [], []
        for seed in args.seeds:
            A = make(n, seed)
            for _ in range(args.repeats):
                work = A.copy()
                row_ops.reset()
                t0 = time.perf_counter()
                rank = run(work)
                times.append(time.perf_counter() - t0)
                adds.append(row_ops.count)
                ranks.append(rank)
        records.append(BenchRecord(
            algorithm=algo, nrows=n, ncols=n, density=dens,
            k="auto" if args.k is None else str(args.k), table_count=args.tables,
            crossover=args.crossover or DEFAULT_BUDGET_BYTES,
            seed=";".join(map(str, args.seeds)), wall_time=statistics.median(times),
            row_additions=int(statistics.median_low(adds)),
            rank=int(statistics.median_low(ranks))))
    return records


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    for rec in records:
        w.writerow(asdict(rec))
    return buf.getvalue()


def parse_csv(text: str) -> list[BenchRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        if list(row) != CSV_HEADER:
            raise ValueError("unexpected CSV header")
        out.append(BenchRecord(
            algorithm=row["algorithm"], nrows=int(row["nrows"]), ncols=int(row["ncols"]),
            density=row["density"], k=row["k"], table_count=int(row["table_count"]),
            crossover=int(row["crossover"]), seed=row["seed"],
            wall_time=float(row["wall_time"]), row_additions=int(row["row_additions"]),
            rank=int(row["rank"])))
    return out


def cmd_bench(args) -> int:
    records = run_bench(args)
    text = records_to_csv(records)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {args.out}: {exc}") from exc
        print(f"wrote {len(records)} rows to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------


def _shared(strategy_default: str | None = "ple-recursive") -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    if strategy_default is not None:
        p.add_argument("--strategy", choices=STRATEGIES, default=strategy_default)
    p.add_argument("--k", type=_k_arg, default=None, help="table width, or 'auto'")
    p.add_argument("--tables", type=int, choices=VALID_TABLE_COUNTS, default=DEFAULT_TABLES)
    p.add_argument("--crossover", type=_positive_int, default=None, metavar="BYTES",
                   help="recursion base-case budget in bytes (default 262144)")
    p.add_argument("--seed", type=_seed_arg, default=0)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--format", choices=("gf2b", "ascii"), default="gf2b")
    p.add_argument("--out", default=None)
    p.add_argument("--memory-budget", type=_positive_int, default=DEFAULT_MEMORY_BUDGET,
                   metavar="BYTES")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gf2dense", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[_shared(None)], help="write a random matrix")
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--density", type=_density_arg, default=None)
    g.add_argument("--nnz-per-row", type=int, default=None)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("echelonize", parents=[_shared()], help="(reduced) row echelon form")
    e.add_argument("input")
    e.add_argument("--full", action=argparse.BooleanOptionalAction, default=True,
                   help="reduced form (default) or plain row echelon form")
    e.set_defaults(func=cmd_echelonize)

    d = sub.add_parser("ple", parents=[_shared()], help="PLE decomposition (writes L\\E)")
    d.add_argument("input")
    d.add_argument("--show-perm", action="store_true", help="print P and Q")
    d.set_defaults(func=cmd_ple)

    m = sub.add_parser("multiply", parents=[_shared(None)], help="matrix product")
    m.add_argument("a")
    m.add_argument("b")
    m.add_argument("--backend", choices=("naive", "m4rm", "strassen"), default="m4rm")
    m.add_argument("--strassen-cutoff", type=int, default=2048)
    m.set_defaults(func=cmd_multiply)

    b = sub.add_parser("bench", parents=[_shared(None)], help="timing suites, CSV output")
    b.add_argument("--suite", choices=("table1", "table2", "fig3"), required=True)
    b.add_argument("--sizes", type=_int_list, default=[4096])
    b.add_argument("--seeds", type=_int_list, default=[1])
    b.add_argument("--repeats", type=_positive_int, default=1)
    b.add_argument("--density", type=_density_arg, default=0.5)
    b.add_argument("--nnz", type=_int_list, default=list(range(1, 21)),
                   help="non-zeros per row for the fig3 sweep")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gf2dense: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"gf2dense: verification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except MemoryError as exc:
        print(f"gf2dense: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"gf2dense: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"gf2dense: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
