"""Command-line experiment runner.

Every command prints a ``#``-prefixed header echoing the resolved
configuration and the toolkit version, then a CSV table (or a JSON
document).  Output depends only on the configuration and seed.

Exit codes: 0 equal/pass, 1 detection/failure, 2 usage or internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._random import RNG_ALGORITHM, derive_seed
from .algebra import (DomainError, DomainMatrix, DomainSpec, Pattern, WrongSet, format_matrix,
                      generate_instance, parse_matrices, sparse_product_instance)
from .graphs import (JohnsonGraph, ProductGraph, johnson_gap_formula, product_spectrum,
                     spectral_gap_eig)
from .marked_fraction import (check_bound_indep_set, check_bound_small_set, epsilon_exact, epsilon_mc,
                              marked_mask)
from .multiply import boolean_multiply, boolean_product, matrix_multiplication
from .suites import SUITES, run_suite
from .szegedy import WalkSpace, walk_probabilities
from .verify import product_verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- output -----------------------------------------------------------------

def _config_items(args) -> list[tuple[str, object]]:
    skip = {"func", "config"}
    return sorted((k, v) for k, v in vars(args).items() if k not in skip)


def _header(args) -> str:
    items = " ".join(f"{k}={v}" for k, v in _config_items(args))
    return f"# qmv {__version__} rng={RNG_ALGORITHM}\n# config: {items}\n"


def emit_table(args, header, rows, footer=None, out=None):
    """Write ``rows`` as CSV or JSON to ``out`` (stdout by default)."""
    out = out or sys.stdout
    if args.format == "json":
        doc = {"version": __version__, "config": dict(_config_items(args)), "header": header,
               "rows": rows, "footer": footer or {}}
        out.write(json.dumps(doc, indent=2, default=str) + "\n")
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    out.write(_header(args) + buf.getvalue())
    for key, value in (footer or {}).items():
        out.write(f"# {key}: {value}\n")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# --- commands ---------------------------------------------------------------

def cmd_gap(args) -> int:
    rows = []
    for k in args.k:
        G = JohnsonGraph(args.n, k)
        if args.product:
            formula = product_spectrum(G, G).gap
            eig = spectral_gap_eig(ProductGraph(G, G), cap=args.eig_cap).gap
        else:
            formula = johnson_gap_formula(args.n, k)
            eig = spectral_gap_eig(G, cap=args.eig_cap).gap
        rows.append([args.n, k, _fmt(formula), _fmt(eig), f"{abs(formula - eig):.3e}"])
    emit_table(args, ["n", "k", "formula_gap", "eig_gap", "abs_err"], rows)
    return EXIT_OK


def cmd_epsilon(args) -> int:
    cells = Pattern.parse(args.pattern).cells(args.n, args.n, np.random.default_rng(args.seed))
    W = WrongSet(args.n, cells)
    if args.mc:
        est = epsilon_mc(W, args.r, args.s, args.mc, seed=args.seed)
    else:
        est = epsilon_exact(W, args.r, args.s, cap=args.enum_cap)
    small = check_bound_small_set(W, args.r, args.s, cap=args.enum_cap) if not args.mc else None
    indep = check_bound_indep_set(W, args.r, args.s, cap=args.enum_cap) if not args.mc else None

    def cols(check):
        if check is None or not check.applicable:
            return ["", ""]
        return [_fmt(check.rhs), int(check.passed)]

    row = [args.n, len(W), args.r, args.s, est.method, _fmt(est.value)] + cols(small) + cols(indep)
    emit_table(args, ["n", "size_W", "r", "s", "method", "value", "bound_small_set", "pass_small_set",
                      "bound_indep", "pass_indep"], [row])
    failed = any(c is not None and c.applicable and not c.passed for c in (small, indep))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_walk_demo(args) -> int:
    cells = Pattern.parse(args.marked).cells(args.n, args.n, np.random.default_rng(args.seed))
    space = WalkSpace.johnson(args.n, args.k)
    marked = marked_mask(WrongSet(args.n, cells), args.k)
    probs = walk_probabilities(space, marked, args.lmax)
    rows = [[ell, _fmt(p)] for ell, p in enumerate(probs)]
    emit_table(args, ["ell", "prob_one"], rows,
               {"marked_vertices": int(marked.sum()), "vertices": space.size, "gap": _fmt(space.gap)})
    return EXIT_OK


def _read_matrices(path: str, count: int) -> list[DomainMatrix]:
    mats = parse_matrices(Path(path).read_text())
    if len(mats) != count:
        raise UsageError(f"{path}: expected {count} matrices, found {len(mats)}")
    return mats


def cmd_verify(args) -> int:
    domain = DomainSpec.parse(args.domain)
    fixed = _read_matrices(args.matrix_file, 3) if args.matrix_file else None
    rows = []
    detections = 0
    for t in range(args.trials):
        s = derive_seed(args.seed, t)
        if fixed:
            A, B, C = fixed
        else:
            A, B, C, _ = generate_instance(args.n, args.m or args.n, args.pattern, domain, s)
        out = product_verification(A, B, C, seed=derive_seed(s, 1), mode=args.mode)
        detections += out.detected
        led = out.ledger
        rows.append([t, out.verdict, out.terminating_k or "", led.queries_A, led.queries_B,
                     led.queries_C, led.time_units])
    emit_table(args, ["trial", "verdict", "terminating_k", "queries_A", "queries_B", "queries_C",
                      "time_units"], rows, {"detections": f"{detections}/{args.trials}"})
    return EXIT_FAIL if detections else EXIT_OK


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def cmd_multiply(args) -> int:
    rng = np.random.default_rng(args.seed)
    m = args.m or args.n
    cells = Pattern.parse(args.wrong_pattern).cells(args.n, args.n, rng)
    if args.bool:
        if args.matrix_file:
            A, B = (M.entries != 0 for M in _read_matrices(args.matrix_file, 2))
        else:
            A, B = _bool_instance(args.n, m, cells)
        rep = boolean_multiply(A, B, derive_seed(args.seed, 1))
        ok = bool(np.array_equal(rep.C, boolean_product(A, B)))
        C = DomainMatrix(rep.C.astype(np.int64), DomainSpec.gf(2))
        report = {"mode": "boolean", "ones_found": rep.ones_found, "oracle_calls": rep.oracle_calls,
                  "time_units": rep.time_units, "audit_ok": ok}
    else:
        if args.matrix_file:
            A, B = _read_matrices(args.matrix_file, 2)
        else:
            A, B = sparse_product_instance(args.n, m, cells, DomainSpec.parse(args.domain),
                                           derive_seed(args.seed, 0))
        rep = matrix_multiplication(A, B, seed=derive_seed(args.seed, 1), audit=True)
        C, ok = rep.C, bool(rep.audit_ok)
        report = {"mode": "field" if A.domain.is_field else "integer", **rep.summary()}
    text = format_matrix(C)
    report = {"version": __version__, "config": dict(_config_items(args)), "C_digest": _digest(text), **report}
    sys.stdout.write(json.dumps(report, indent=2, default=str) + "\n")
    if args.output_matrix:
        Path(args.output_matrix).write_text(text)
    return EXIT_OK if ok else EXIT_FAIL


def _bool_instance(n: int, m: int, cells) -> tuple[np.ndarray, np.ndarray]:
    """Boolean pair whose product is exactly the indicator of ``cells``."""
    rows = sorted({i for i, _ in cells})
    if len(rows) > m:
        raise UsageError(f"pattern has {len(rows)} nonzero rows but m = {m}")
    A = np.zeros((n, m), dtype=bool)
    B = np.zeros((m, n), dtype=bool)
    for slot, r in enumerate(rows):
        A[r - 1, slot] = True
        for i, j in cells:
            if i == r:
                B[slot, j - 1] = True
    return A, B


def cmd_suite(args) -> int:
    criteria, tables = run_suite(args.name, quick=args.quick)
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for table in tables:
            with open(out_dir / f"{table.name}.csv", "w") as fh:
                emit_table(args, table.header, table.rows, table.footer, out=fh)
    rows = [[c.number, c.title, "info" if not c.gating else ("pass" if c.passed else "fail"), c.detail]
            for c in criteria]
    emit_table(args, ["criterion", "title", "status", "detail"], rows)
    return EXIT_OK if all(c.passed or not c.gating for c in criteria) else EXIT_FAIL


# --- parsing ----------------------------------------------------------------

def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _domain(text: str) -> str:
    try:
        return str(DomainSpec.parse(text))
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pattern(text: str) -> str:
    try:
        return str(Pattern.parse(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of key=value lines; command-line flags take precedence")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="qmv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qmv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gap", parents=[common], help="spectral gap of J(n,k) or J(n,k)^2")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--k", type=_positive, nargs="+", required=True)
    p.add_argument("--product", action="store_true")
    p.add_argument("--eig-cap", type=_positive, default=4096)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("epsilon", parents=[common], help="marked fraction for a wrong-set pattern")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--pattern", type=_pattern, default="single")
    p.add_argument("--r", type=_positive, required=True)
    p.add_argument("--s", type=_positive, required=True)
    how = p.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true", help="exact enumeration (default)")
    how.add_argument("--mc", type=_positive, metavar="T", help="Monte Carlo with T samples")
    p.add_argument("--enum-cap", type=_positive, default=10**7)
    p.set_defaults(func=cmd_epsilon)

    p = sub.add_parser("walk-demo", parents=[common], help="prob_one(l) of the walk for a marked pattern")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--marked", type=_pattern, default="single",
                   help="wrong-set pattern; marked vertices are the (R,S) meeting it")
    p.add_argument("--lmax", type=int, default=20)
    p.set_defaults(func=cmd_walk_demo)

    p = sub.add_parser("verify", parents=[common], help="run product verification on random instances")
    p.add_argument("--n", type=_positive, default=6)
    p.add_argument("--m", type=_positive)
    p.add_argument("--pattern", type=_pattern, default="single")
    p.add_argument("--domain", type=_domain, default="gf:7")
    p.add_argument("--mode", choices=("exact", "sample"), default="sample")
    p.add_argument("--trials", type=_positive, default=1)
    p.add_argument("--matrix-file", help="file holding A, B, C in the matrix text format")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("multiply", parents=[common], help="output-sensitive matrix multiplication")
    p.add_argument("--n", type=_positive, default=8)
    p.add_argument("--m", type=_positive)
    p.add_argument("--domain", type=_domain, default="gf:7")
    p.add_argument("--wrong-pattern", type=_pattern, default="random:3",
                   help="support of the product AB")
    p.add_argument("--bool", action="store_true", help="Boolean product")
    p.add_argument("--matrix-file", help="file holding A, B in the matrix text format")
    p.add_argument("--output-matrix", help="write the computed C here")
    p.set_defaults(func=cmd_multiply)

    p = sub.add_parser("suite", parents=[common], help="run an acceptance battery")
    p.add_argument("name", choices=sorted(SUITES))
    p.add_argument("--quick", action="store_true", help="fewer trials")
    p.add_argument("--out-dir", help="write each table as CSV here")
    p.set_defaults(func=cmd_suite)
    return parser


def read_config_file(path: str) -> dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _file_argv(sub_parser: argparse.ArgumentParser, values: dict[str, str]) -> list[str]:
    """Turn config-file values into flags understood by ``sub_parser``."""
    argv = []
    for action in sub_parser._actions:
        if action.dest not in values or not action.option_strings:
            continue
        flag = action.option_strings[-1]
        value = values.pop(action.dest)
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(flag)
        else:
            argv += [flag] + value.split()
    if values:
        raise UsageError(f"unknown config keys: {', '.join(sorted(values))}")
    return argv


def parse_config(argv: list[str]) -> argparse.Namespace:
    """Parse ``argv``; values from ``--config`` apply only where no flag was given.

    File values are inserted as flags right after the command name, so any
    flag repeated on the real command line comes later and wins.
    """
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    choices = parser._subparsers._group_actions[0].choices
    pos = next((i for i, tok in enumerate(argv) if tok in choices), None)
    if pos is None:
        return parser.parse_args(argv)
    file_values = read_config_file(known.config)
    file_values.pop("config", None)
    extra = _file_argv(choices[argv[pos]], file_values)
    return parser.parse_args(argv[:pos + 1] + extra + argv[pos + 1:])


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_config(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    except (UsageError, OSError) as exc:
        print(f"qmv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, DomainError, ValueError, OSError) as exc:
        print(f"qmv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
