"""Command-line interface.

    memcap capacity --lambda 0.8 --mu 0.2 --task key --n 1000 --epsilon 0.05
    memcap uses-needed --lambda 0.9 --mu 0.5 --task key --target-k 100
    memcap spectrum --lambda 0.5 --mu 0.25 --n 64
    memcap verify --grid quick

Exit codes: 0 success, 1 numeric/internal failure (including failed checks),
2 domain error, 3 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .capacities import (
    CapacityKind,
    asymptotic_capacity,
    ebit_capacity,
    epsilon_penalty,
    exact_sum_lower_bound,
    nshot_lower_bound,
    positive_q_region,
    qubit_capacity,
    solve_uses_needed,
    nshot_bound_value,
    theorem1_constant,
)
from .errors import DomainError, MemcapError, UnreachableTarget
from .symbol import ChannelParams, mode_transmissivities
from .verify import VerifyConfig, run_all

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_NUMERIC, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2, 3
DEFAULT_MAX_N = 4096

log = logging.getLogger("memcap")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Output encoding
# ---------------------------------------------------------------------------

def format_number(x: float) -> str:
    """17 significant digits; non-finite values become JSON-safe strings."""
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % x


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float printed at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_number(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def output_record(command: str, inputs: dict, outputs: Any, warnings: Sequence[str] = ()) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "warnings": list(warnings),
    }


def _csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_number(float(v)).strip('"')
    return str(v)


def to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0].keys()))
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row.values()])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ranged(name: str, lo: float, hi: float, lo_open: bool, hi_open: bool):
    lb, rb = "(" if lo_open else "[", ")" if hi_open else "]"

    def parse(text: str) -> float:
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number in {lb}{lo}, {hi}{rb}") from None
        if (v < lo or (lo_open and v == lo)) or (v > hi or (hi_open and v == hi)) or math.isnan(v):
            raise argparse.ArgumentTypeError(f"{name}={text} out of range; valid range is {lb}{lo}, {hi}{rb}")
        return v

    return parse


def _int_at_least(name: str, lo: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer >= {lo}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"{name}={v} out of range; valid range is n >= {lo}")
        return v

    return parse


def _positive(name: str):
    def parse(text: str) -> float:
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a positive number") from None
        if not v > 0 or math.isinf(v):
            raise argparse.ArgumentTypeError(f"{name}={text} out of range; must be > 0")
        return v

    return parse


def _add_channel(p: argparse.ArgumentParser):
    p.add_argument("--lambda", dest="lam", required=True, type=_ranged("lambda", 0, 1, True, True),
                   help="fibre transmissivity, in (0, 1)")
    p.add_argument("--mu", required=True, type=_ranged("mu", 0, 1, False, True),
                   help="memory parameter, in [0, 1)")


def _add_task(p: argparse.ArgumentParser):
    p.add_argument("--task", required=True, choices=[k.value for k in CapacityKind],
                   help="qubit (Q), ebit (Q2) or key (K)")
    p.add_argument("--epsilon", type=_ranged("epsilon", 0, 1, True, True), default=0.1,
                   help="error budget in (0, 1) (default: 0.1)")
    p.add_argument("--tol", type=_positive("tol"), default=1e-10,
                   help="absolute quadrature tolerance (default: 1e-10)")


def _add_output(p: argparse.ArgumentParser, default_format: str = "json"):
    p.add_argument("--format", choices=["json", "csv"], default=default_format,
                   help=f"output format (default: {default_format})")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="memcap", description="n-shot capacity bounds for lossy fibres with memory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("capacity", help="n-shot lower bound and asymptotic capacity")
    _add_channel(p)
    _add_task(p)
    p.add_argument("--n", required=True, type=_int_at_least("n", 1), help="number of channel uses")
    p.add_argument("--exact", action="store_true",
                   help="also report the exact singular-value sum bound (the only bound for n < 4)")
    _add_output(p)

    p = sub.add_parser("uses-needed", help="minimal n whose lower bound reaches a target")
    _add_channel(p)
    _add_task(p)
    p.add_argument("--target-k", required=True, type=_positive("target-k"),
                   help="number of qubits / ebits / key bits to reach")
    p.add_argument("--debug-coefficients", help=argparse.SUPPRESS)
    _add_output(p)

    p = sub.add_parser("spectrum", help="singular values and mode transmissivities of the n x n corner")
    _add_channel(p)
    p.add_argument("--n", required=True, type=_int_at_least("n", 1), help="matrix order")
    _add_output(p, default_format="csv")

    p = sub.add_parser("verify", help="run the brute-force inequality checks")
    p.add_argument("--grid", default="quick",
                   help="quick, full, or a JSON file with lambdas/mus/n_list/... (default: quick)")
    p.add_argument("--workers", type=_int_at_least("workers", 1), default=1)
    p.add_argument("--output", "-o", help="write JSON lines to this file instead of stdout")
    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _max_n() -> int:
    raw = os.environ.get("MEMCAP_MAX_N", str(DEFAULT_MAX_N))
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"MEMCAP_MAX_N must be an integer, got {raw!r}") from None


def _check_svd_size(n: int):
    cap = _max_n()
    if n > cap:
        raise UsageError(f"--n {n} exceeds the SVD size cap {cap} (set MEMCAP_MAX_N to raise it)")


def cmd_capacity(args) -> tuple:
    params = ChannelParams(args.lam, args.mu)
    kind = CapacityKind(args.task)
    inputs = {"lambda": args.lam, "mu": args.mu, "epsilon": args.epsilon, "n": args.n,
              "task": kind.value, "exact": bool(args.exact), "tol": args.tol}
    warnings = []
    if args.n < 4 and not args.exact:
        raise UsageError("the n-shot lower bound needs n >= 4; for n in {1, 2, 3} use --exact "
                         "(exact singular-value sum bound)")
    out: dict = {"asymptotic_capacity": asymptotic_capacity(params, kind, args.tol)}
    if kind.is_qubit and not positive_q_region(params):
        warnings.append("zero-capacity region: M = lambda^((1-sqrt(mu))/(1+sqrt(mu))) <= 1/2, "
                        "the quantum capacity vanishes")
    if args.n >= 4:
        b = nshot_lower_bound(params, args.n, args.epsilon, kind, args.tol)
        out.update(
            lower=b.lower,
            clamped=b.clamped,
            raw=b.raw,
            asymptotic_term=b.components.asymptotic_term,
            sqrt_term=b.components.sqrt_term,
            penalty=b.components.penalty,
        )
    else:
        warnings.append("n < 4: only the exact singular-value sum bound applies")
    if args.exact:
        _check_svd_size(args.n)
        out["exact_sum_lower_bound"] = exact_sum_lower_bound(params, args.n, args.epsilon, kind)
    return inputs, out, warnings, [out]


def _parse_debug_coefficients(text: str) -> tuple:
    try:
        cap, const, pen = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError("--debug-coefficients expects CAPACITY,CONSTANT,PENALTY") from None
    return cap, const, pen


def cmd_uses_needed(args) -> tuple:
    kind = CapacityKind(args.task)
    inputs = {"lambda": args.lam, "mu": args.mu, "epsilon": args.epsilon, "task": kind.value,
              "target_k": args.target_k, "tol": args.tol}
    if args.debug_coefficients:
        cap, const, pen = _parse_debug_coefficients(args.debug_coefficients)
        inputs["debug_coefficients"] = [cap, const, pen]
    else:
        params = ChannelParams(args.lam, args.mu)
        cap = asymptotic_capacity(params, kind, args.tol)
        if cap <= 0.0 or (kind.is_qubit and not positive_q_region(params)):
            raise UnreachableTarget(f"{kind.value} capacity vanishes at lambda={args.lam}, mu={args.mu}")
        const = theorem1_constant(params, kind)
        pen = epsilon_penalty(args.epsilon, kind)
    n = solve_uses_needed(cap, const, pen, args.target_k)
    out = {
        "n": n,
        "bound_at_n": float(nshot_bound_value(n, cap, const, pen)),
        "bound_at_n_minus_1": float(nshot_bound_value(n - 1, cap, const, pen)) if n > 4 else None,
        "asymptotic_capacity": cap,
        "constant": const,
        "penalty": pen,
    }
    row = {k: ("" if v is None else v) for k, v in out.items()}
    return inputs, out, [], [row]


def cmd_spectrum(args) -> tuple:
    _check_svd_size(args.n)
    params = ChannelParams(args.lam, args.mu)
    eta = mode_transmissivities(params, args.n)
    s = np.sqrt(eta)
    q, k = qubit_capacity(eta), ebit_capacity(eta)
    rows = [
        {"index": i + 1, "singular_value": float(s[i]), "transmissivity": float(eta[i]),
         "qubit_capacity": float(np.atleast_1d(q)[i]), "ebit_capacity": float(np.atleast_1d(k)[i])}
        for i in range(args.n)
    ]
    inputs = {"lambda": args.lam, "mu": args.mu, "n": args.n}
    return inputs, rows, [], rows


def load_grid(source: str) -> VerifyConfig:
    if source == "quick":
        return VerifyConfig.quick()
    if source == "full":
        return VerifyConfig.full()
    try:
        with open(source) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read grid file {source!r}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{source}: line 1: grid file must hold a JSON object")
    known = set(VerifyConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"{source}: unknown grid keys {sorted(unknown)}; expected a subset of {sorted(known)}")
    try:
        return VerifyConfig(**data)
    except (DomainError, TypeError) as exc:
        raise UsageError(f"{source}: invalid grid: {exc}") from None


def cmd_verify(args) -> int:
    config = load_grid(args.grid)
    reports = run_all(config, workers=args.workers)
    lines = [dumps(r.to_dict(), indent=0).replace("\n", "") for r in reports]
    _emit("\n".join(lines) + "\n", args.output)
    failed = [r for r in reports if not r.passed]
    total = sum(r.cases_run for r in reports)
    print(f"memcap verify: {len(reports)} reports, {total} cases, {len(failed)} failing reports",
          file=sys.stderr)
    for r in failed:
        print(f"  FAIL {r.check_name}: {r.error or f'{r.cases_failed} cases, worst margin {r.worst_margin:.3g}'}",
              file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


COMMANDS = {"capacity": cmd_capacity, "uses-needed": cmd_uses_needed, "spectrum": cmd_spectrum}


def _configure_logging(verbose: bool):
    # a dedicated handler so diagnostics reach stderr even when the host already configured logging
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(name)s %(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        inputs, outputs, warnings, rows = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"memcap {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        record = output_record(args.command, vars_inputs(args), None)
        record["error"] = {"type": type(exc).__name__, "message": str(exc)}
        sys.stdout.write(dumps(record) + "\n")
        return EXIT_DOMAIN
    except MemcapError as exc:
        print(f"memcap {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    fmt = getattr(args, "format", "json")
    if fmt == "csv":
        text = to_csv(rows)
    else:
        text = dumps(output_record(args.command, inputs, outputs, warnings)) + "\n"
    for w in warnings:
        log.warning(w)
    _emit(text, getattr(args, "output", None))
    return EXIT_OK


def vars_inputs(args) -> dict:
    skip = {"command", "verbose", "format", "output"}
    rename = {"lam": "lambda"}
    return {rename.get(k, k): v for k, v in vars(args).items() if k not in skip and v is not None}


if __name__ == "__main__":
    sys.exit(main())
