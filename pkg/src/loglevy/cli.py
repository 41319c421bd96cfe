"""Command-line front end.

Subcommands write an :class:`OutputRecord` as CSV (default) or JSON:

    loglevy pmf --process L --alpha 0.5 --t 1 --n-max 10
    loglevy levy --process Z --alpha 0.5 --selection A --n-max 400
    loglevy bernstein --alpha 0.5 --selection A --lambda-grid 0:20:81
    loglevy figures --figure 2
    loglevy simulate --process Y --construction subordination --alpha 0.5 --beta 1 --t 1
    loglevy verify --max-n 5

Exit codes: 0 success, 2 usage error, 3 parameter outside its domain,
4 equivalent formulas disagree, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .charfun import (
    PROCESSES,
    ParameterDomainError,
    ProcessParams,
    bernstein,
    levy_measure,
    selection_a,
    selection_b,
)
from .montecarlo import (
    CONSTRUCTIONS,
    SamplerConfig,
    analytic_reference,
    chi_square_goodness_of_fit,
    run_sampler,
    total_variation,
)
from .transition import CrossCheckError, cross_checked_table
from .verify import SuiteConfig, run_full_suite

SCHEMA_VERSION = "1"
OUTPUT_DIR_ENV = "LOGLEVY_OUTPUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CROSS_CHECK = 4
EXIT_VERIFY = 5

DEFAULT_FIGURE_ALPHAS = (0.5, 2.0 / 3.0)


# ---------------------------------------------------------------------------
# Records and serialization


@dataclass(frozen=True)
class OutputRecord:
    """Tabular result of one command.

    ``parameters`` echoes every input, defaults included; ``metadata`` holds
    derived scalars such as tail bounds or total masses.
    """

    command: str
    parameters: dict
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self) -> None:
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, expected {width}")

    def header(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "parameters": self.parameters,
            "metadata": self.metadata,
        }


def format_number(x) -> str:
    """Deterministic text for a number: integers verbatim, floats with 17
    significant digits and always marked as floats."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".e"):
        text += ".0"
    return text


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_, int, np.integer, float, np.floating)):
        return format_number(v)
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(val)}" for k, val in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _cell(v) -> str:
    return v if isinstance(v, str) else format_number(v)


def to_csv(record: OutputRecord) -> str:
    buf = io.StringIO()
    buf.write("# " + _json_value(record.header()) + "\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(record.columns)
    for row in record.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def to_json(record: OutputRecord) -> str:
    doc = dict(record.header())
    doc["columns"] = record.columns
    doc["rows"] = record.rows
    return _json_value(doc) + "\n"


def serialize(record: OutputRecord, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(record)
    if fmt == "json":
        return to_json(record)
    raise ValueError(f"unknown format {fmt!r}")


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    if text in ("Infinity", "-Infinity", "NaN"):
        return float(text)
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_record(text: str) -> OutputRecord:
    """Parse CSV or JSON output back into an :class:`OutputRecord`."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(stripped)
        rows = [list(r) for r in doc["rows"]]
        header = doc
    else:
        first, _, rest = text.partition("\n")
        if not first.startswith("# "):
            raise ValueError("CSV output must start with a '# ' header line")
        header = json.loads(first[2:].rstrip("\r"))
        reader = csv.reader(io.StringIO(rest, newline=""))
        table = list(reader)
        doc = {"columns": table[0]}
        rows = [[_parse_cell(c) for c in r] for r in table[1:]]
    return OutputRecord(
        command=header["command"],
        parameters=header["parameters"],
        columns=list(doc["columns"]),
        rows=rows,
        metadata=header.get("metadata", {}),
        schema_version=header["schema_version"],
    )


# ---------------------------------------------------------------------------
# Parameter handling


def _params_from_args(args, need_beta: bool = False, need_b: bool = False) -> ProcessParams:
    beta, b = args.beta, args.b
    if args.selection is not None:
        if beta is not None or b is not None:
            raise ParameterDomainError("give either --selection or explicit --beta/--b, not both")
        chosen = selection_a(args.alpha) if args.selection == "A" else selection_b(args.alpha)
        beta, b = chosen.beta, chosen.b
    params = ProcessParams(args.alpha, beta=beta, b=b)
    if need_beta:
        params.require_beta()
    if need_b:
        params.require_b()
    return params


def _needs(process: str) -> dict:
    return {"need_beta": process == "Y", "need_b": process == "Z"}


def _param_echo(args, params: ProcessParams) -> dict:
    return {
        "alpha": params.alpha,
        "beta": params.beta,
        "b": params.b,
        "selection": args.selection,
        "A": params.A,
    }


def _parse_lambda_grid(text: str) -> list[float]:
    """``start:stop:count`` (inclusive, evenly spaced) or a comma list; ``inf``
    is allowed in lists."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("grid must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise argparse.ArgumentTypeError("grid count must be positive")
        values = np.linspace(start, stop, count).tolist()
    else:
        values = [float(x) for x in text.split(",") if x.strip()]
    if not values:
        raise argparse.ArgumentTypeError("empty grid")
    return values


def _check_lambdas(values: Sequence[float]) -> None:
    for v in values:
        if not v >= 0:
            raise ParameterDomainError(f"lambda must be nonnegative, got {v!r}")


# ---------------------------------------------------------------------------
# Commands


def cmd_pmf(args) -> OutputRecord:
    params = _params_from_args(args, **_needs(args.process))
    table = cross_checked_table(args.process, params, args.t, args.n_max)
    rows = [[n, float(p)] for n, p in enumerate(table.mass)]
    parameters = {"process": args.process, **_param_echo(args, params), "t": args.t,
                  "n_max": args.n_max, "format": args.format}
    metadata = {"tail_bound": table.tail_bound, "analytic_tail_bound": table.analytic_tail,
                "cross_check_rtol": 1e-10}
    return OutputRecord("pmf", parameters, ["n", "probability"], rows, metadata)


def cmd_levy(args) -> OutputRecord:
    params = _params_from_args(args, **_needs(args.process))
    measure = levy_measure(args.process, params)
    atoms = measure.atoms(args.n_max)
    rows, cumulative = [], []
    for n in range(1, args.n_max + 1):
        cumulative.append(float(atoms[n]))
        rows.append([n, float(atoms[n]), math.fsum(cumulative)])
    parameters = {"process": args.process, **_param_echo(args, params), "n_max": args.n_max,
                  "format": args.format}
    metadata = {"total_mass": measure.total_mass, "tail_bound": measure.tail_bound(args.n_max)}
    return OutputRecord("levy", parameters, ["n", "levy_measure", "cumulative_mass"], rows, metadata)


def _bernstein_columns(params: ProcessParams, processes: Sequence[str], lambdas: Sequence[float]):
    funcs = {p: bernstein(p, params) for p in processes}
    rows = [[lam] + [float(funcs[p](lam)) for p in processes] for lam in lambdas]
    meta = {}
    for p in processes:
        meta[f"psi_{p}_infinity"] = funcs[p].value_at_infinity
        meta[f"psi_{p}_derivative_0"] = funcs[p].derivative_at_zero
    return ["lambda"] + [f"psi_{p}" for p in processes], rows, meta


def cmd_bernstein(args) -> OutputRecord:
    lambdas = args.lambda_grid
    _check_lambdas(lambdas)
    processes = list(args.processes)
    need_beta = "Y" in processes
    need_b = "Z" in processes
    params = _params_from_args(args, need_beta=need_beta, need_b=need_b)
    columns, rows, meta = _bernstein_columns(params, processes, lambdas)
    parameters = {"processes": "".join(processes), **_param_echo(args, params),
                  "lambda_grid": list(lambdas), "format": args.format}
    return OutputRecord("bernstein", parameters, columns, rows, meta)


def figure_record(figure: int, alphas: Sequence[float], n_max: int = 30,
                  lambdas: Optional[Sequence[float]] = None, n_mass: int = 400) -> OutputRecord:
    """Data behind the three comparison figures (unscaled values).

    1: atoms of the Lévy measures of ``X`` and ``Z`` under Selection A.
    2: the four Bernstein functions under Selection A.
    3: the four Bernstein functions under Selection B.
    """
    lambdas = list(np.linspace(0.0, 20.0, 201)) if lambdas is None else list(lambdas)
    meta: dict[str, Any] = {}
    rows: list = []
    if figure == 1:
        columns = ["alpha", "n", "levy_X", "levy_Z"]
        for alpha in alphas:
            params = selection_a(alpha)
            mx, mz = levy_measure("X", params), levy_measure("Z", params)
            ax, az = mx.atoms(max(n_max, n_mass)), mz.atoms(max(n_max, n_mass))
            for n in range(1, n_max + 1):
                rows.append([alpha, n, float(ax[n]), float(az[n])])
            key = f"alpha={float(alpha)!r}"
            mass_x, mass_z = math.fsum(ax[1 : n_mass + 1]), math.fsum(az[1 : n_mass + 1])
            meta[key] = {
                "A": params.A,
                "b": params.b,
                "truncated_mass_X": mass_x,
                "truncated_mass_Z": mass_z,
                "masses_within_1e-6_of_A": abs(mass_x - params.A) < 1e-6 and abs(mass_z - params.A) < 1e-6,
                "levy_Z_1_below_levy_X_1": bool(az[1] < ax[1]),
            }
    elif figure in (2, 3):
        _check_lambdas(lambdas)
        columns = ["alpha", "lambda", "psi_L", "psi_X", "psi_Y", "psi_Z"]
        for alpha in alphas:
            params = selection_a(alpha) if figure == 2 else selection_b(alpha)
            psi = {p: bernstein(p, params) for p in "LXYZ"}
            for lam in lambdas:
                rows.append([alpha, lam] + [float(psi[p](lam)) for p in "LXYZ"])
            d = {p: psi[p].derivative_at_zero for p in "LXYZ"}
            v = {p: psi[p].value_at_infinity for p in "LXYZ"}
            entry: dict[str, Any] = {"beta": params.beta, "b": params.b}
            entry.update({f"psi_{p}_infinity": v[p] for p in "LXYZ"})
            entry.update({f"psi_{p}_derivative_0": d[p] for p in "LXYZ"})
            if figure == 2:
                entry["derivative_chain_L_Y_X_Z"] = bool(d["L"] < d["Y"] < d["X"] < d["Z"])
                entry["theta_L_equals_theta_Y"] = abs(v["L"] - v["Y"]) <= 1e-12
                entry["theta_X_equals_theta_Z"] = abs(v["X"] - v["Z"]) <= 1e-12
                entry["theta_L_equals_log_A_over_alpha"] = abs(v["L"] - math.log(params.A / alpha)) <= 1e-12
                entry["theta_X_equals_A"] = abs(v["X"] - params.A) <= 1e-12
            else:
                entry["infinity_chain_Y_L_Z_X"] = bool(v["Y"] < v["L"] < v["Z"] < v["X"])
                entry["derivative_L_equals_Y"] = abs(d["L"] - d["Y"]) <= 1e-12
                entry["derivative_Z_equals_X"] = abs(d["Z"] - d["X"]) <= 1e-12
            meta[f"alpha={float(alpha)!r}"] = entry
    else:
        raise ParameterDomainError(f"figure must be 1, 2 or 3, got {figure!r}")
    parameters = {"figure": figure, "alphas": list(alphas), "n_max": n_max, "n_mass": n_mass,
                  "lambda_grid": lambdas if figure != 1 else None}
    return OutputRecord("figures", parameters, columns, rows, meta)


def figure_checks_pass(record: OutputRecord) -> bool:
    """Whether every boolean assertion in a figure record holds."""
    flags = [v for entry in record.metadata.values() if isinstance(entry, dict)
             for v in entry.values() if isinstance(v, bool)]
    return bool(flags) and all(flags)


def cmd_figures(args) -> OutputRecord:
    alphas = args.alpha if args.alpha else list(DEFAULT_FIGURE_ALPHAS)
    record = figure_record(args.figure, alphas, args.n_max,
                           args.lambda_grid if args.lambda_grid else None)
    params = dict(record.parameters)
    params["format"] = args.format
    return OutputRecord(record.command, params, record.columns, record.rows, record.metadata)


def cmd_simulate(args) -> OutputRecord:
    params = _params_from_args(args, **_needs(args.process))
    config = SamplerConfig(args.seed, args.samples, args.process, args.construction, params, args.t,
                           chunk_size=args.chunk_size, workers=args.workers)
    emp = run_sampler(config)
    table = analytic_reference(args.process, params, args.t, emp.support_max)
    tv = total_variation(emp, table)
    chi = chi_square_goodness_of_fit(emp, table)
    top = max(emp.support_max, 0)
    rows = []
    for n in range(top + 1):
        e = emp.frequency(n)
        p = table[n]
        rows.append([n, emp.counts.get(n, 0), e, p, e - p])
    parameters = {"process": args.process, "construction": args.construction,
                  **_param_echo(args, params), "t": args.t, "samples": args.samples,
                  "seed": args.seed, "chunk_size": args.chunk_size, "workers": args.workers,
                  "format": args.format}
    metadata = {"total_variation": tv, "chi_square_statistic": chi.statistic,
                "chi_square_pvalue": chi.pvalue, "chi_square_dof": chi.dof,
                "analytic_tail_bound": table.tail_bound}
    return OutputRecord("simulate", parameters,
                        ["n", "count", "empirical", "analytic", "deviation"], rows, metadata)


def cmd_verify(args) -> OutputRecord:
    config = SuiteConfig()
    if args.max_n is not None:
        config = config.capped(args.max_n)
    reports = run_full_suite(config)
    rows = [[r.identity_id, r.status, r.max_error, r.tolerance, r.parameter_grid, r.reference]
            for r in reports]
    failed = sum(1 for r in reports if not r.passed)
    parameters = {"max_n": args.max_n, "format": args.format}
    metadata = {"checks": len(reports), "failures": failed}
    return OutputRecord("verify", parameters,
                        ["identity_id", "status", "max_error", "tolerance", "parameter_grid",
                         "reference"], rows, metadata)


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _add_output(p) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None,
                   help=f"file to write; relative paths go under ${OUTPUT_DIR_ENV} when set "
                        "(default: standard output)")


def _add_params(p, alpha_required: bool = True) -> None:
    p.add_argument("--alpha", type=float, required=alpha_required)
    p.add_argument("--beta", type=float, default=None, help="Gamma subordinator scale")
    p.add_argument("--b", type=float, default=None, help="Poisson subordinator rate")
    p.add_argument("--selection", choices=("A", "B"), default=None,
                   help="derive beta and b from alpha by a parameter selection")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loglevy", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pmf", help="transition probabilities P(t, n)")
    p.add_argument("--process", choices=PROCESSES, required=True)
    _add_params(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--n-max", type=_nonneg_int, default=50)
    _add_output(p)
    p.set_defaults(handler=cmd_pmf)

    p = sub.add_parser("levy", help="Levy measure atoms")
    p.add_argument("--process", choices=PROCESSES, required=True)
    _add_params(p)
    p.add_argument("--n-max", type=_positive_int, default=50)
    _add_output(p)
    p.set_defaults(handler=cmd_levy)

    p = sub.add_parser("bernstein", help="Bernstein functions on a grid of lambda")
    p.add_argument("--processes", default="LXYZ",
                   type=lambda s: [c for c in s if c in PROCESSES] or _bad_processes(s))
    _add_params(p)
    p.add_argument("--lambda-grid", type=_parse_lambda_grid, default=_parse_lambda_grid("0:20:81"))
    _add_output(p)
    p.set_defaults(handler=cmd_bernstein)

    p = sub.add_parser("figures", help="data behind the comparison figures")
    p.add_argument("--figure", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--alpha", type=float, action="append", default=None,
                   help="repeatable; default 1/2 and 2/3")
    p.add_argument("--n-max", type=_positive_int, default=30)
    p.add_argument("--lambda-grid", type=_parse_lambda_grid, default=None)
    _add_output(p)
    p.set_defaults(handler=cmd_figures)

    p = sub.add_parser("simulate", help="Monte Carlo against the analytic pmf")
    p.add_argument("--process", choices=PROCESSES, required=True)
    p.add_argument("--construction", choices=CONSTRUCTIONS, default="compound_poisson")
    _add_params(p)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--samples", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=_seed, default=20240601)
    p.add_argument("--chunk-size", type=_positive_int, default=250_000)
    p.add_argument("--workers", type=_positive_int, default=1)
    _add_output(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("verify", help="run the identity suite")
    p.add_argument("--max-n", type=_positive_int, default=None)
    _add_output(p)
    p.set_defaults(handler=cmd_verify)
    return parser


def _bad_processes(text: str):
    raise argparse.ArgumentTypeError(f"no valid process letters in {text!r}")


def _resolve_output(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    return path


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        record = args.handler(args)
    except CrossCheckError as exc:
        print(f"loglevy: cross-check failed: {exc}", file=sys.stderr)
        return EXIT_CROSS_CHECK
    except (ParameterDomainError, ValueError) as exc:
        print(f"loglevy: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = serialize(record, args.format)
    target = _resolve_output(args.output)
    if target is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        os.makedirs(os.path.dirname(os.path.abspath(target)), exist_ok=True)
        with open(target, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    if record.command == "verify" and record.metadata.get("failures", 0):
        return EXIT_VERIFY
    if record.command == "figures" and not figure_checks_pass(record):
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
