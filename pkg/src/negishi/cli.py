"""Command line interface: ``negishi {solve,verify,pareto,check,scan}``.

Exit codes: 0 success, 1 invalid input, 2 non-convergence, 3 verification
failure. Trace verbosity follows ``NEGISHI_LOG`` (error, info or debug).
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys

import numpy as np

from .config import (
    ConfigError,
    certificate_to_json,
    dump_json,
    load_certificate,
    load_config,
)
from .economy import Economy
from .equilibrium import (
    NonConvergence,
    best_effort_certificate,
    check_uniqueness_preconditions,
    integrability_report,
    probe_multiplicity,
    solve,
    verify,
)
from .measure import AlignmentError
from .pareto import NumericalFailure, as_weights, pareto_allocation
from .utility import DEFAULT_GRID, concavity_bound_check, marginal_times_c_monotone, validate_field

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGENCE, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("negishi")


def _table(economy: Economy, rows, last_label: str, last_row) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["agent", *economy.space.states])
    for name, row in zip(economy.agents, rows):
        writer.writerow([name, *(repr(float(x)) for x in row)])
    writer.writerow([last_label, *(repr(float(x)) for x in last_row)])
    return buf.getvalue()


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_solve(config_path: str, output_path: str | None = None, csv_path: str | None = None) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    economy = cfg.economy
    code = EXIT_OK
    try:
        cert = solve(economy, cfg.solver)
        report = certificate_to_json(cert, economy)
    except NonConvergence as err:
        print(f"not converged: {err}", file=sys.stderr)
        cert = best_effort_certificate(err, economy)
        report = certificate_to_json(cert, economy, diagnostic=err.diagnostic)
        code = EXIT_NONCONVERGENCE
    except NumericalFailure as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    _write(dump_json(report), output_path)
    if csv_path is not None:
        _write(_table(economy, cert.allocation, "zeta", cert.zeta), csv_path)
    return code


def format_verification(report) -> str:
    lines = []
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        detail = f"  ({c.detail})" if c.detail and not c.passed else ""
        lines.append(f"{status}  {c.name:<20s} {c.magnitude:.6e}{detail}")
    lines.append("all checks passed" if report.passed else
                 "failed: " + ", ".join(report.failed()))
    return "\n".join(lines) + "\n"


def cmd_verify(config_path: str, certificate_path: str) -> int:
    try:
        cfg = load_config(config_path)
        cert = load_certificate(certificate_path, cfg.economy)
        report = verify(cert, cfg.economy, tol_budget=cfg.solver.tol_budget)
    except (ConfigError, AlignmentError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(format_verification(report))
    return EXIT_OK if report.passed else EXIT_VERIFY


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as err:
        raise ValueError(f"cannot parse {what} {text!r}") from err


def cmd_pareto(config_path: str, weights: str) -> int:
    try:
        cfg = load_config(config_path)
        w = as_weights(_parse_floats(weights, "weights"), cfg.economy.n_agents)
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    try:
        alloc, lam = pareto_allocation(w, cfg.economy)
    except NumericalFailure as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    sys.stdout.write(_table(cfg.economy, alloc, "U_c", lam))
    return EXIT_OK


def check_report(economy: Economy, grid=None) -> str:
    """Human-readable utility validation, uniqueness verdict and integrability."""
    grid = DEFAULT_GRID if grid is None else grid
    lines = []
    for name, fld in zip(economy.agents, economy.fields):
        desc = fld.describe()
        val = validate_field(fld, grid, n_states=fld.n_states)
        conc = concavity_bound_check(fld, grid, n_states=fld.n_states)
        gs = marginal_times_c_monotone(fld, grid, n_states=fld.n_states)
        u0 = val.states[0].u_at_zero
        lines.append(f"agent {name}: {desc}")
        if val.passed:
            lines.append(f"  utility checks: pass (u(0) = {u0})")
        else:
            lines.append("  utility checks: FAIL")
            for state, msgs in val.failures().items():
                where = "all states" if state is None else economy.space.states[state]
                for msg in msgs:
                    lines.append(f"    {where}: {msg}")
        lines.append(f"  concavity bound c U'(c) <= 2(U(c) - U(c/2)): "
                     f"{'pass' if conc.passed else 'FAIL'}")
        lines.append(f"  c U'(c) non-decreasing: {'yes' if all(gs.values()) else 'no'}")
    uq = check_uniqueness_preconditions(economy, grid)
    if uq.guaranteed:
        who = ("every agent" if not uq.failing
               else f"all agents except {economy.agents[uq.failing[0]]}")
        lines.append(f"uniqueness: guaranteed (c U'(c) non-decreasing for {who})")
    else:
        names = ", ".join(economy.agents[m] for m in uq.failing)
        lines.append(f"uniqueness: no uniqueness guarantee ({names} violate the condition)")
    w = np.full(economy.n_agents, 1.0 / economy.n_agents)
    integ = integrability_report(economy, w)
    lines.append("integrability at uniform weights:")
    lines.append(f"  E|U_m(pi^m)|          {np.array2string(integ.abs_utility)}")
    lines.append(f"  E[U'_m(pi^m) Lambda]  {np.array2string(integ.marginal_endowment)}")
    lines.append(f"  E[U_c Lambda]         {integ.price_endowment!r}")
    lines.append(f"  dominating bound      {integ.equal_split_bound!r}")
    if integ.overflow_risk:
        lines.append("  WARNING: overflow risk: " + "; ".join(integ.notes or ["large magnitudes"]))
    return "\n".join(lines) + "\n"


def cmd_check(config_path: str, grid: str | None = None) -> int:
    try:
        cfg = load_config(config_path)
        c_grid = None
        if grid is not None:
            lo, hi, n = _parse_floats(grid, "grid")
            if not (0 < lo < hi) or n < 2 or n != int(n):
                raise ValueError("grid needs 0 < lo < hi and an integer n >= 2")
            c_grid = np.logspace(np.log10(lo), np.log10(hi), int(n))
        text = check_report(cfg.economy, c_grid)
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(text)
    return EXIT_OK


def cmd_scan(config_path: str, scan_n: int | None = None, n_starts: int = 8) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    economy = cfg.economy
    if scan_n is not None and economy.n_agents != 2:
        print("error: the grid scan is only available for two agents", file=sys.stderr)
        return EXIT_INPUT
    if scan_n is None and economy.n_agents == 2:
        scan_n = 1000
    if n_starts < 1 or (scan_n is not None and scan_n < 2):
        print("error: need --starts >= 1 and --grid-n >= 2", file=sys.stderr)
        return EXIT_INPUT
    opts = cfg.solver
    opts.start = None
    result = probe_multiplicity(economy, n_starts, scan_n, opts)
    for msg in result.failures:
        print(f"warning: {msg}", file=sys.stderr)
    print(f"{len(result.roots)} distinct equilibrium weight vector(s)")
    for k, root in enumerate(result.roots):
        ws = ",".join(repr(float(x)) for x in root.w)
        print(f"root {k}: weights {ws} residual {root.residual:.3e} "
              f"found by {len(root.sources)} probe(s)")
    return EXIT_OK if result.roots else EXIT_NONCONVERGENCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="negishi",
        description="Arrow-Debreu equilibria of finite-state exchange economies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve for equilibrium weights")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="JSON report path (default: stdout)")
    p.add_argument("--csv", help="write the allocation table here")

    p = sub.add_parser("verify", help="verify a solve report against a config")
    p.add_argument("config")
    p.add_argument("certificate")

    p = sub.add_parser("pareto", help="Pareto allocation for given weights")
    p.add_argument("config")
    p.add_argument("--weights", required=True, help="comma-separated, one per agent")

    p = sub.add_parser("check", help="validate utilities and uniqueness conditions")
    p.add_argument("config")
    p.add_argument("--grid", help="consumption grid lo,hi,n (log-spaced)")

    p = sub.add_parser("scan", help="search for multiple equilibria")
    p.add_argument("config")
    p.add_argument("--grid-n", type=int, default=None, help="scan points (two agents only)")
    p.add_argument("--starts", type=int, default=8, help="number of solver starts")
    return parser


def _setup_logging() -> None:
    level = os.environ.get("NEGISHI_LOG", "error").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.ERROR),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; 2 means non-convergence here
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "solve":
        return cmd_solve(args.config, args.output, args.csv)
    if args.command == "verify":
        return cmd_verify(args.config, args.certificate)
    if args.command == "pareto":
        return cmd_pareto(args.config, args.weights)
    if args.command == "check":
        return cmd_check(args.config, args.grid)
    return cmd_scan(args.config, args.grid_n, args.starts)


if __name__ == "__main__":
    sys.exit(main())
