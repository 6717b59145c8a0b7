"""Command-line front end.

Exit status: 0 success, 1 verification failed (report still written),
2 usage or input error, 3 numerical or I/O failure.

The default integrator tolerance can be overridden through the
``STURMRATIO_REL_TOL`` environment variable.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, TextIO

from .boundary import BoundaryCondition
from .eigensolver import solve_range
from .errors import (DomainError, IneligiblePotential, IntegrationError,
                     NegativeSpectrumSuspected, OracleError, ParseError)
from .harness import THEOREMS, UPPER_BOUNDS, SCHEMA_VERSION, VerificationReport, find_l0, verify
from .oracle import fd_eigenvalues, refined_eigenvalues
from .potential import FAMILIES, Potential, load_samples, parse_family
from .pruefer import DEFAULT_REL_TOL

ENV_REL_TOL = "STURMRATIO_REL_TOL"
COMMANDS = ("eigs", "oracle", "verify", "find-l0", "families")
FORMATS = ("table", "json", "csv")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: Optional[str] = None
    csv_path: Optional[str] = None
    bc: BoundaryCondition = BoundaryCondition.DIRICHLET
    ell: float = 1.0
    n_max: int = 10
    rel_tol: float = DEFAULT_REL_TOL
    grid: int = 100_000
    fmt: str = "table"
    output: Optional[str] = None
    theorem: Optional[str] = None
    x0: Optional[float] = None
    z_count: int = 64
    source: str = "shooting"
    scan_points: int = 32
    plot_data: Optional[str] = None
    richardson: bool = True

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.command != "families" and (self.family is None) == (self.csv_path is None):
            raise UsageError("give exactly one of --family or --csv")
        if not 0.0 < self.ell <= 1.0:
            raise UsageError("--ell must lie in (0, 1]")
        if self.n_max < 1:
            raise UsageError("--n must be >= 1")
        if not self.rel_tol > 0.0:
            raise UsageError("--rel-tol must be positive")
        if self.grid < 8:
            raise UsageError("--grid must be >= 8")
        if self.command == "oracle" and self.n_max > self.grid // 4:
            raise UsageError("--n must not exceed --grid / 4")
        if self.fmt not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
        if self.command == "verify" and self.theorem is None:
            raise UsageError("verify needs --theorem")
        if self.z_count < 2 or self.scan_points < 1:
            raise UsageError("--z-count must be >= 2 and --scan-points >= 1")
        if self.source not in ("shooting", "oracle"):
            raise UsageError("--source must be shooting or oracle")

    def potential(self) -> Potential:
        if self.family is not None:
            p = parse_family(self.family)
        else:
            with open(self.csv_path, encoding="utf-8") as fh:
                p = load_samples(fh)
        return p.with_domain_end(self.ell) if self.ell != 1.0 else p


def _num(v) -> str:
    return "" if v is None else repr(float(v))


def _table(header, rows) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip()
                     for r in cells) + "\n"


def _emit(fmt, payload, header, rows) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        return "\n".join([",".join(header)] + [",".join(map(str, r)) for r in rows]) + "\n"
    return _table(header, rows)


def emit_plot_data(report: VerificationReport, out: TextIO) -> None:
    """CSV for external plotting: (z, theta_dot) for T1, else (m, n, ratio, bound, margin)."""
    if report.theorem == "T1":
        lines = ["z,theta_dot"] + [f"{_num(c['z'])},{_num(c['rhs'])}" for c in report.checks]
    else:
        upper = report.theorem in UPPER_BOUNDS
        lines = ["m,n,ratio,bound,margin"]
        for c in report.checks:
            ratio, bound = (c["rhs"], c["lhs"]) if upper else (c["lhs"], c["rhs"])
            lines.append(f"{c['m']},{c['n']},{_num(ratio)},{_num(bound)},{_num(c['margin'])}")
    out.write("\n".join(lines) + "\n")


def _eigs(cfg: RunConfig, p: Potential) -> str:
    recs = solve_range(p, cfg.n_max, cfg.bc, cfg.ell, rel_tol=cfg.rel_tol)
    payload = {"schema_version": SCHEMA_VERSION, "potential": p.descriptor,
               "bc": cfg.bc.value, "ell": cfg.ell,
               "eigenvalues": [{"n": r.n, "z_n": r.z_n, "lambda_n": r.lambda_n,
                                "residual": r.residual, "method": r.method} for r in recs]}
    rows = [[r.n, _num(r.z_n), _num(r.lambda_n), _num(r.residual), r.method] for r in recs]
    return _emit(cfg.fmt, payload, ["n", "z_n", "lambda_n", "residual", "method"], rows)


def _oracle(cfg: RunConfig, p: Potential) -> str:
    if cfg.richardson:
        lams = refined_eigenvalues(p, cfg.ell, cfg.n_max, cfg.grid, cfg.bc)
    else:
        lams = fd_eigenvalues(p, cfg.ell, cfg.n_max, cfg.grid, cfg.bc)
    payload = {"schema_version": SCHEMA_VERSION, "potential": p.descriptor,
               "bc": cfg.bc.value, "ell": cfg.ell, "N": cfg.grid,
               "richardson": cfg.richardson, "eigenvalues": lams}
    rows = [[n, _num(v)] for n, v in enumerate(lams, start=1)]
    return _emit(cfg.fmt, payload, ["n", "lambda_n"], rows)


def _find_l0(cfg: RunConfig, p: Potential) -> str:
    ell0, lam1 = find_l0(p, cfg.scan_points, cfg.source, cfg.rel_tol, min(cfg.grid, 20_000))
    payload = {"schema_version": SCHEMA_VERSION, "potential": p.descriptor,
               "ell0": ell0, "lambda1": lam1}
    return _emit(cfg.fmt, payload, ["ell0", "lambda1"], [[_num(ell0), _num(lam1)]])


def _verify(cfg: RunConfig, p: Potential):
    kwargs = {"rel_tol": cfg.rel_tol}
    if cfg.theorem.lower() == "t1":
        kwargs.update(x0=cfg.x0, z_count=cfg.z_count)
        report = verify("T1", p, **kwargs)
    else:
        kwargs.update(source=cfg.source, oracle_N=min(cfg.grid, 20_000))
        report = verify(cfg.theorem, p, cfg.n_max, **kwargs)
    if cfg.fmt == "json":
        text = report.to_json() + "\n"
    elif cfg.fmt == "csv":
        text = report.to_csv()
    else:
        keys = ["z"] if report.theorem == "T1" else ["m", "n"]
        rows = [[c[k] if k != "z" else _num(c[k]) for k in keys]
                + [_num(c["lhs"]), _num(c["rhs"]), _num(c["margin"])] for c in report.checks]
        text = (f"theorem {report.theorem}  potential {report.potential}  ell {report.ell!r}\n"
                f"eligible {report.eligible_count}  ineligible {len(report.ineligible)}  "
                f"pass {str(report.passed).lower()}\n"
                + _table(keys + ["lhs", "rhs", "margin"], rows))
    return text, report


def run(cfg: RunConfig, out: TextIO, err: TextIO = sys.stderr) -> int:
    try:
        cfg.validate()
        if cfg.command == "families":
            text = "".join(f"{line}\n" for line in FAMILIES.values())
            text += "sampled via --csv PATH   rows 'x,q', x from 0 to 1\n"
            out.write(text)
            return 0
        try:
            p = cfg.potential()
        except OSError as exc:
            raise UsageError(f"cannot read {cfg.csv_path}: {exc.strerror}") from None
        report = None
        if cfg.command == "eigs":
            text = _eigs(cfg, p)
        elif cfg.command == "oracle":
            text = _oracle(cfg, p)
        elif cfg.command == "find-l0":
            text = _find_l0(cfg, p)
        else:
            text, report = _verify(cfg, p)
    except (UsageError, ParseError, DomainError, IneligiblePotential, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 2
    except (IntegrationError, NegativeSpectrumSuspected, OracleError) as exc:
        err.write(f"numerical failure: {exc}\n")
        return 3

    try:
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            out.write(text)
        if report is not None and cfg.plot_data:
            with open(cfg.plot_data, "w", encoding="utf-8", newline="") as fh:
                emit_plot_data(report, fh)
    except OSError as exc:
        err.write(f"i/o error: {exc}\n")
        return 3
    if report is not None and not report.passed:
        return 1
    return 0


def _parser() -> argparse.ArgumentParser:
    env_tol = os.environ.get(ENV_REL_TOL)
    default_tol = DEFAULT_REL_TOL
    if env_tol:
        try:
            default_tol = float(env_tol)
        except ValueError:
            raise UsageError(f"{ENV_REL_TOL}={env_tol!r} is not a number") from None

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--family", help="analytic potential, e.g. barrier_sin:-5,4")
    src.add_argument("--csv", dest="csv_path", metavar="PATH", help="sampled potential 'x,q' rows")
    common.add_argument("--bc", default="dirichlet", help="dirichlet or dn (Dirichlet-Neumann)")
    common.add_argument("--ell", type=float, default=1.0, help="right endpoint in (0, 1]")
    common.add_argument("--n", dest="n_max", type=int, default=10, help="number of eigenvalues")
    common.add_argument("--rel-tol", type=float, default=default_tol)
    common.add_argument("--grid", type=int, default=100_000, help="FD interior nodes")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default="table")
    common.add_argument("--output", "-o", help="write to PATH instead of stdout")

    parser = argparse.ArgumentParser(
        prog="sturmratio",
        description="Pruefer-shooting eigenvalues of -y'' + q y = lambda y and ratio-bound checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eigs", parents=[common], help="eigenvalues by phase shooting")
    orc = sub.add_parser("oracle", parents=[common], help="finite-difference eigenvalues")
    orc.add_argument("--no-richardson", dest="richardson", action="store_false")
    ver = sub.add_parser("verify", parents=[common], help="check a ratio theorem")
    ver.add_argument("--theorem", required=True, type=str.lower,
                     choices=[t.lower() for t in THEOREMS])
    ver.add_argument("--x0", type=float, help="T1: right end of the increasing stretch")
    ver.add_argument("--z-count", type=int, default=64, help="T1: number of z samples")
    ver.add_argument("--source", choices=("shooting", "oracle"), default="shooting")
    ver.add_argument("--scan-points", type=int, default=32, help="T3: initial ell scan")
    ver.add_argument("--plot-data", metavar="PATH", help="also write plot-ready CSV")
    l0 = sub.add_parser("find-l0", parents=[common], help="search ell0 for a barrier potential")
    l0.add_argument("--source", choices=("shooting", "oracle"), default="shooting")
    l0.add_argument("--scan-points", type=int, default=32)
    sub.add_parser("families", help="list analytic potential families")
    return parser


def config_from_args(argv) -> RunConfig:
    ns = _parser().parse_args(argv)
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    if "bc" in fields:
        try:
            fields["bc"] = BoundaryCondition.parse(fields["bc"])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return RunConfig(**fields)


def main(argv=None, out: TextIO = None, err: TextIO = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        with contextlib.redirect_stderr(err):
            cfg = config_from_args(argv)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except SystemExit as exc:  # argparse reports usage errors this way
        return int(exc.code or 0)
    return run(cfg, out, err)


if __name__ == "__main__":
    sys.exit(main())
