"""Command-line front end.

Each subcommand reproduces one family of checks as a deterministic report:
a CSV table (stdout or ``--out file.csv``) or a JSON document
(``--out file.json``) that mirrors the table plus the effective config and
the pass/fail verdict.  Verdicts and warnings go to stderr; the table is
never polluted, so identical configs give byte-identical CSV.

Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 config/parse error.
``CSPI_THREADS`` caps sweep concurrency; row order is by sweep index
regardless of completion order.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algebra import Ordering, quantize, to_ordered_form
from .continuum import ORDERING_SHIFT, CutoffSpec, cutoff_dFdA, prefactor_log_closed, prefactor_log_empirical
from .discrete import (
    MatsubaraGrid,
    normal_discrete_dFdA,
    weyl_discrete_dFdA,
    weyl_discrete_logZ_quadratic,
)
from .errors import EvenSliceCountError, SingularityError
from .expr import ParseError, format_symbol, parse_operator
from .flow import run_flow
from .fock import (
    FockBasis,
    QuadraticModel,
    check_resolution_identity,
    exact_dFdA,
    hamiltonian_matrix,
)


class ConfigError(ValueError):
    """Bad run configuration (missing/ill-typed keys, invalid sweeps)."""


_ORDERING_NAMES = {
    "normal": Ordering.NORMAL,
    "antinormal": Ordering.ANTINORMAL,
    "weyl": Ordering.WEYL,
}

_COMMANDS = ("order", "free-energy", "cutoff", "prefactor", "flow", "identity-check")


@dataclass
class RunConfig:
    """Effective, merged configuration of a single run."""

    command: str
    A: float = 1.0
    beta: float = 1.0
    N_values: list[int] = field(default_factory=list)
    b_values: list[int] = field(default_factory=list)
    orderings: list[str] = field(default_factory=lambda: ["normal", "antinormal", "weyl"])
    expr: str | None = None
    target: str | None = None
    verify: bool = False
    n_max: int = 8
    radial_nodes: int = 64
    angular_nodes: int = 64
    margin: int = 2
    modes: int = 1
    b_floor: int = 40
    fit_window: tuple[int, int] = (50, 500)
    tol: float | None = None
    out: str | None = None

    def echo(self) -> dict:
        d = {
            "command": self.command,
            "A": self.A,
            "beta": self.beta,
            "N": self.N_values,
            "b": self.b_values,
        }
        if self.command == "order":
            d.update(expr=self.expr, target=self.target, verify=self.verify, n_max=self.n_max)
        if self.command == "cutoff":
            d.update(ordering=self.orderings)
        if self.command == "flow":
            d.update(b_floor=self.b_floor, fit_window=list(self.fit_window), modes=self.modes)
        if self.command == "identity-check":
            d.update(
                n_max=self.n_max,
                radial=self.radial_nodes,
                angular=self.angular_nodes,
                margin=self.margin,
                modes=self.modes,
            )
        if self.tol is not None:
            d["tol"] = self.tol
        return d


def _as_int_list(value, key: str) -> list[int]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v]
    if isinstance(value, (int, np.integer)):
        value = [value]
    try:
        out = [int(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be an integer or list of integers") from exc
    if not out:
        raise ConfigError(f"sweep list {key} must be non-empty")
    return out


def _as_str_list(value, key: str) -> list[str]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v]
    out = [str(v) for v in value]
    if not out:
        raise ConfigError(f"list {key} must be non-empty")
    return out


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge the JSON config file (if any) with command-line overrides."""
    raw: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must contain a JSON object")

    cfg = RunConfig(command=args.command)
    try:
        if "A" in raw:
            cfg.A = float(raw["A"])
        if "beta" in raw:
            cfg.beta = float(raw["beta"])
        if "N" in raw:
            cfg.N_values = _as_int_list(raw["N"], "N")
        if "b" in raw:
            cfg.b_values = _as_int_list(raw["b"], "b")
        if "ordering" in raw:
            cfg.orderings = _as_str_list(raw["ordering"], "ordering")
        if "expr" in raw:
            cfg.expr = str(raw["expr"])
        if "target" in raw:
            cfg.target = str(raw["target"])
        if "verify" in raw:
            cfg.verify = bool(raw["verify"])
        if "n_max" in raw:
            cfg.n_max = int(raw["n_max"])
        if "radial" in raw:
            cfg.radial_nodes = int(raw["radial"])
        if "angular" in raw:
            cfg.angular_nodes = int(raw["angular"])
        if "margin" in raw:
            cfg.margin = int(raw["margin"])
        if "modes" in raw:
            cfg.modes = int(raw["modes"])
        if "b_floor" in raw:
            cfg.b_floor = int(raw["b_floor"])
        if "fit_window" in raw:
            lo, hi = (int(v) for v in raw["fit_window"])
            cfg.fit_window = (lo, hi)
        if "tol" in raw:
            cfg.tol = float(raw["tol"])
        if "out" in raw:
            cfg.out = str(raw["out"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc

    # flag overrides
    if args.A is not None:
        cfg.A = args.A
    if args.beta is not None:
        cfg.beta = args.beta
    if args.N is not None:
        cfg.N_values = _as_int_list(args.N, "N")
    if args.b is not None:
        cfg.b_values = _as_int_list(args.b, "b")
    if args.out is not None:
        cfg.out = args.out
    if getattr(args, "expr", None) is not None:
        cfg.expr = args.expr
    if getattr(args, "target", None) is not None:
        cfg.target = args.target
    if getattr(args, "verify", False):
        cfg.verify = True
    if getattr(args, "tol", None) is not None:
        cfg.tol = args.tol
    if getattr(args, "ordering", None) is not None:
        cfg.orderings = _as_str_list(args.ordering, "ordering")
    if getattr(args, "b_floor", None) is not None:
        cfg.b_floor = args.b_floor
    if getattr(args, "n_max", None) is not None:
        cfg.n_max = args.n_max
    if getattr(args, "radial", None) is not None:
        cfg.radial_nodes = args.radial
    if getattr(args, "angular", None) is not None:
        cfg.angular_nodes = args.angular
    if getattr(args, "margin", None) is not None:
        cfg.margin = args.margin
    if getattr(args, "modes", None) is not None:
        cfg.modes = args.modes
    return cfg


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CSPI_THREADS", "1")))
    except ValueError:
        return 1


def _map_indexed(fn, items):
    """Map preserving input order; concurrency capped by CSPI_THREADS."""
    items = list(items)
    workers = _threads()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


# ---------------------------------------------------------------------------
# commands: each returns (columns, rows, checks) where checks is a list of
# (name, passed, detail) used for the verdict
# ---------------------------------------------------------------------------


def _require_ordering(name: str | None) -> Ordering:
    if name is None or name not in _ORDERING_NAMES:
        raise ConfigError(
            f"target/ordering must be one of {sorted(_ORDERING_NAMES)}, got {name!r}"
        )
    return _ORDERING_NAMES[name]


def cmd_order(cfg: RunConfig):
    if cfg.expr is None:
        raise ConfigError("order needs an operator expression (--expr or config 'expr')")
    target = _require_ordering(cfg.target)
    poly = parse_operator(cfg.expr)
    symbol = to_ordered_form(poly, target)
    row = [cfg.expr, target.value, format_symbol(symbol)]
    checks = []
    if cfg.verify:
        basis = FockBasis(poly.modes, cfg.n_max)
        margin = poly.degree()
        keep = basis.block_indices(margin)
        H_original = hamiltonian_matrix(poly, basis)
        H_round_trip = hamiltonian_matrix(quantize(symbol), basis)
        residual = float(
            np.abs((H_original - H_round_trip)[np.ix_(keep, keep)]).max()
        )
        tol = 1e-10 if cfg.tol is None else cfg.tol
        row.append(residual)
        checks.append(("round_trip_residual", residual <= tol, f"{residual:.3e} <= {tol:g}"))
        return ["expr", "target", "symbol", "residual"], [row], checks
    return ["expr", "target", "symbol"], [row], checks


def cmd_free_energy(cfg: RunConfig):
    if not cfg.N_values:
        raise ConfigError("free-energy needs a sweep list of N values")
    model = QuadraticModel(cfg.A, cfg.beta)
    exact = exact_dFdA(model)
    tol = 1e-3 if cfg.tol is None else cfg.tol

    def point(item):
        method, N = item
        try:
            grid = MatsubaraGrid(N, cfg.beta)
            if method == "normal-discrete":
                value = normal_discrete_dFdA(grid, model)
            else:
                value = weyl_discrete_dFdA(grid, model)
            return [N, method, value, abs(value - exact), ""]
        except EvenSliceCountError:
            return [N, method, "", "", "refused: even N"]
        except SingularityError as exc:
            return [N, method, "", "", f"singular: {exc}"]

    points = [("normal-discrete", N) for N in cfg.N_values]
    points += [("weyl-discrete", N) for N in cfg.N_values]
    rows = [["", "exact", exact, 0.0, ""]] + _map_indexed(point, points)

    for row in rows:
        if row[4]:
            print(f"warning: N={row[0]} {row[1]}: {row[4]}", file=sys.stderr)

    checks = []
    for method in ("normal-discrete", "weyl-discrete"):
        errs = [row[3] for row in rows if row[1] == method and row[4] == ""]
        if len(errs) > 1:
            mono = all(b <= a for a, b in zip(errs, errs[1:]))
            checks.append((f"{method}_error_nonincreasing", mono, f"errors {errs}"))
        if errs:
            rel = errs[-1] / abs(exact)
            checks.append((f"{method}_final_rel_error", rel <= tol, f"{rel:.3e} <= {tol:g}"))
    return ["N", "method", "dFdA", "abs_error", "note"], rows, checks


def cmd_cutoff(cfg: RunConfig):
    if not cfg.b_values:
        raise ConfigError("cutoff needs a sweep list of b values")
    orderings = [_require_ordering(name) for name in cfg.orderings]
    model = QuadraticModel(cfg.A, cfg.beta)
    exact = exact_dFdA(model)
    coth_half = exact + 0.5  # (1/2) coth(beta A / 2)
    tol = 1e-3 if cfg.tol is None else cfg.tol

    def point(item):
        b, ordering = item
        value = cutoff_dFdA(model, CutoffSpec(b, cfg.beta), ordering)
        limit = coth_half + ORDERING_SHIFT[ordering]
        return [b, ordering.value, value, abs(value - limit)]

    points = [(b, o) for o in orderings for b in cfg.b_values]
    rows = _map_indexed(point, points)

    checks = []
    for ordering in orderings:
        errs = [row[3] for row in rows if row[1] == ordering.value]
        if len(errs) > 1:
            mono = all(b <= a for a, b in zip(errs, errs[1:]))
            checks.append((f"{ordering.value}_error_nonincreasing", mono, f"errors {errs}"))
        checks.append(
            (f"{ordering.value}_final_error", errs[-1] <= tol, f"{errs[-1]:.3e} <= {tol:g}")
        )
    return ["b", "ordering", "dFdA", "abs_error"], rows, checks


def cmd_prefactor(cfg: RunConfig):
    if not cfg.N_values:
        raise ConfigError("prefactor needs a sweep list of (odd) N values")
    b = cfg.b_values[0] if cfg.b_values else 4
    tol = 1e-2 if cfg.tol is None else cfg.tol

    def point(N):
        emp = prefactor_log_empirical(N, b, cfg.beta, cfg.modes)
        closed = prefactor_log_closed(b, cfg.beta, cfg.modes)
        rel = abs(emp - closed) / abs(closed) if closed != 0 else abs(emp - closed)
        return [N, b, emp, closed, rel]

    rows = _map_indexed(point, cfg.N_values)
    rels = [row[4] for row in rows]
    checks = [("final_rel_difference", rels[-1] <= tol, f"{rels[-1]:.3e} <= {tol:g}")]
    if len(rels) > 1:
        mono = all(y <= x for x, y in zip(rels, rels[1:]))
        checks.append(("rel_difference_nonincreasing", mono, f"{rels}"))
    return ["N", "b", "log_empirical", "log_closed", "rel_difference"], rows, checks


def cmd_flow(cfg: RunConfig):
    N = cfg.N_values[0] if cfg.N_values else 10001
    model = QuadraticModel(cfg.A, cfg.beta)
    grid = MatsubaraGrid(N, cfg.beta)
    result = run_flow(model, grid, cfg.b_floor, cfg.modes)

    # conservation: log_c plus remaining Gaussian logZ must stay at full logZ
    full = cfg.modes * weyl_discrete_logZ_quadratic(grid, model)
    c = cfg.beta * cfg.A / N
    top = (N - 1) // 2
    n_asc = np.arange(1, top + 1)
    pair_terms = np.log(c * c + 4.0 * np.tan(np.pi * n_asc / N) ** 2)
    prefix = np.concatenate([[0.0], np.cumsum(pair_terms)])  # prefix[s] = sum n<=s
    remaining = cfg.modes * (
        cfg.beta * cfg.A / 2.0 - math.log(c) - prefix[result.shells - 1]
    )
    residuals = np.abs(result.log_c_series + remaining - full)
    max_residual = float(residuals.max())

    lo, hi = cfg.fit_window
    window = (result.shells >= max(lo, cfg.b_floor + 1)) & (result.shells <= hi)
    if window.sum() < 2:
        raise ConfigError(
            f"fit window [{lo}, {hi}] selects fewer than 2 shells above b_floor={cfg.b_floor}"
        )
    slope = float(
        np.polyfit(np.log(result.shells[window]), np.log(result.corrections[window]), 1)[0]
    )
    accumulated = float(result.corrections.sum())
    tol = 1e-2 if cfg.tol is None else cfg.tol

    rows = [
        ["correction_slope", slope, "-2 +- 0.2"],
        ["max_conservation_residual", max_residual, "<= 1e-9"],
        ["accumulated_correction", accumulated, f"<= {tol:g}"],
        ["final_log_c", result.final.log_c, ""],
        ["final_A_eff", result.final.A_eff, ""],
    ]
    checks = [
        ("correction_slope", abs(slope + 2.0) <= 0.2, f"{slope:.4f} within -2 +- 0.2"),
        ("conservation", max_residual <= 1e-9, f"{max_residual:.3e} <= 1e-9"),
        ("accumulated_correction", accumulated <= tol, f"{accumulated:.3e} <= {tol:g}"),
    ]
    return ["metric", "value", "threshold"], rows, checks


def cmd_identity_check(cfg: RunConfig):
    basis = FockBasis(cfg.modes, cfg.n_max)
    deviation = check_resolution_identity(
        basis, cfg.radial_nodes, cfg.angular_nodes, cfg.margin
    )
    tol = 1e-6 if cfg.tol is None else cfg.tol
    rows = [[cfg.n_max, cfg.radial_nodes, cfg.angular_nodes, cfg.margin, deviation]]
    checks = [("deviation", deviation <= tol, f"{deviation:.3e} <= {tol:g}")]
    return ["n_max", "radial", "angular", "margin", "deviation"], rows, checks


_RUNNERS = {
    "order": cmd_order,
    "free-energy": cmd_free_energy,
    "cutoff": cmd_cutoff,
    "prefactor": cmd_prefactor,
    "flow": cmd_flow,
    "identity-check": cmd_identity_check,
}


# ---------------------------------------------------------------------------
# report emission
# ---------------------------------------------------------------------------


def _emit(cfg: RunConfig, columns, rows, checks) -> None:
    formatted = [[_fmt(v) for v in row] for row in rows]
    csv_text = ",".join(columns) + "\n"
    csv_text += "".join(",".join(row) + "\n" for row in formatted)

    if cfg.out and cfg.out.endswith(".json"):
        doc = {
            "config": cfg.echo(),
            "columns": columns,
            "rows": formatted,
            "checks": [
                {"name": name, "passed": passed, "detail": detail}
                for name, passed, detail in checks
            ],
            "verdict": "pass" if all(p for _, p, _ in checks) else "fail",
        }
        with open(cfg.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    elif cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)

    for name, passed, detail in checks:
        print(f"check {name}: {'pass' if passed else 'FAIL'} ({detail})", file=sys.stderr)
    verdict = "pass" if all(p for _, p, _ in checks) else "fail"
    print(f"verdict: {verdict}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cspi",
        description="Lattice and continuum coherent-state path-integral checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--A", type=float, help="quadratic coefficient")
        p.add_argument("--beta", type=float, help="inverse temperature")
        p.add_argument("--N", help="slice count(s), comma separated")
        p.add_argument("--b", help="cutoff index/indices, comma separated")
        p.add_argument("--out", help="output path (.csv or .json); default stdout CSV")
        p.add_argument("--tol", type=float, help="verdict tolerance override")
        if name == "order":
            p.add_argument("--expr", help="operator expression, e.g. 'ad_0*a_0'")
            p.add_argument("--target", help="normal | antinormal | weyl")
            p.add_argument("--verify", action="store_true", help="report Fock round-trip residual")
            p.add_argument("--n-max", dest="n_max", type=int, help="verification cap")
        if name == "cutoff":
            p.add_argument("--ordering", help="ordering(s), comma separated")
        if name == "flow":
            p.add_argument("--b-floor", dest="b_floor", type=int, help="lowest shell kept")
            p.add_argument("--modes", type=int)
        if name == "identity-check":
            p.add_argument("--n-max", dest="n_max", type=int)
            p.add_argument("--radial", type=int)
            p.add_argument("--angular", type=int)
            p.add_argument("--margin", type=int)
            p.add_argument("--modes", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        columns, rows, checks = _RUNNERS[args.command](cfg)
    except (ConfigError, ParseError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(cfg, columns, rows, checks)
    return 0 if all(p for _, p, _ in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
