"""Command-line front end.

Subcommands
-----------
premium    one premium with its breakdown
curve      parameter sweep written as CSV
validate   formula-versus-Monte-Carlo campaign
figures    the six premium-curve panels as CSV files

Exit codes: 0 success, 2 invalid arguments or parameters, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import itertools
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import premium as P
from . import simulate as S
from . import validation as V
from .exceptions import ModelError, NumericsError
from .model import ModelSpec, make_model

CURVE_HEADER = ["variable", "value", "q", "x", "m_or_a", "theta", "premium", "phi_term",
                "kappa_term", "delta_factor"]
SWEEP_VARIABLES = ("m", "theta", "q", "x")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICS = 0, 2, 3


class UsageError(ModelError):
    """Argument combination that parses but makes no sense."""


# --- sweeps ------------------------------------------------------------------

@dataclass(frozen=True)
class ModelArgs:
    kind: str = "classical-exp"
    lam: Optional[float] = None
    mu: Optional[float] = None
    c: Optional[float] = None
    theta: Optional[float] = None
    sigma: Optional[float] = None
    alpha: Optional[float] = None

    def build(self) -> ModelSpec:
        return make_model(self.kind, lam=self.lam, mu=self.mu, c=self.c, theta=self.theta,
                          sigma=self.sigma, alpha=self.alpha)


@dataclass(frozen=True)
class SweepSpec:
    """One curve: ``variable`` over [start, stop] in steps of ``step``.

    ``x_times_c`` reads ``x`` as a multiple of the premium rate, which then
    moves with theta.
    """

    variable: str
    start: float
    stop: float
    step: float
    model: ModelArgs
    q: Optional[float] = None
    x: Optional[float] = None
    contract: str = "extreme-loss"
    m_or_a: Optional[float] = None
    x_times_c: bool = False
    method: str = "auto"
    corrected: bool = False

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise UsageError(f"cannot sweep {self.variable!r}; choose from {SWEEP_VARIABLES}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)
                and self.start < self.stop):
            raise UsageError(f"empty sweep range [{self.start}, {self.stop}]")
        if not (math.isfinite(self.step) and self.step > 0.0):
            raise UsageError(f"sweep step must be positive, got {self.step}")
        if self.variable == "m" and self.contract != "extreme-loss":
            raise UsageError("sweeping m needs the extreme-loss contract")
        if self.variable == "theta":
            if self.model.kind == "stable":
                raise UsageError("the stable model has no loading theta")
            if self.model.c is not None:
                raise UsageError("sweeping theta needs the premium rate set via theta, not c")
        fixed = {"q": self.q, "x": self.x, "m": self.m_or_a, "theta": self.model.theta}
        if fixed[self.variable] is not None:
            raise UsageError(f"{self.variable} is swept and cannot also be fixed")
        for name in ("q", "x"):
            if name != self.variable and fixed[name] is None:
                raise UsageError(f"--{name} is required")
        if self.variable != "m" and self.m_or_a is None:
            raise UsageError("--m (extreme-loss) or --a (proportional) is required")

    def grid(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.round(self.start + self.step * np.arange(n), 12)

    def point(self, value: float) -> list:
        """CSV row for one grid value, evaluated afresh through the premium module."""
        model_args = self.model
        q, x, level = self.q, self.x, self.m_or_a
        if self.variable == "theta":
            model_args = replace(model_args, theta=value)
        elif self.variable == "q":
            q = value
        elif self.variable == "x":
            x = value
        else:
            level = value
        model = model_args.build()
        if self.x_times_c:
            x = x * model.c
        if self.contract == "extreme-loss":
            contract = P.ExtremeLoss(level)
        else:
            contract = P.Proportional(level)
        br = P.premium(model, P.PremiumQuery(q, x, contract), self.method, self.corrected)
        return [self.variable, value, q, x, level, model.theta, br.premium, br.phi_term,
                br.kappa_term, br.delta_factor]

    def rows(self) -> List[list]:
        return [self.point(v) for v in self.grid()]


def write_rows(path_or_stream, rows: Iterable[Sequence]):
    """CSV with the curve header; UTF-8, LF line endings."""
    rows = list(rows)
    if hasattr(path_or_stream, "write"):
        V.write_csv(path_or_stream, CURVE_HEADER, rows)
        return
    with open(path_or_stream, "w", encoding="utf-8", newline="\n") as fh:
        V.write_csv(fh, CURVE_HEADER, rows)


# --- figures -----------------------------------------------------------------

M_GRID = (0.0, 3.0, 0.05)
THETA_GRID = (0.1, 1.0, 0.02)
Q_CURVES = (0.01, 0.05, 0.1)
X_CURVES = (1.5, 2.5, 4.5)
THETA_CURVES = (0.25, 0.5, 1.0)
M_CURVES = (0.0, 0.5, 1.0, 2.0)
X_TIMES_C = 4.0

FIGURE_NOTES = """\
Figure CSVs (lambda = mu = 1, extreme-loss contract).
fig2a_m_by_q.csv       m in [0, 3] step 0.05; x = 2.5, theta = 0.25, q in {0.01, 0.05, 0.1}
fig2b_m_by_theta.csv   m in [0, 3] step 0.05; x = 4.5, q = 0.05, theta in {0.25, 0.5, 1}
fig2c_m_by_x.csv       m in [0, 3] step 0.05; theta = 0.5, q = 0.05, x in {1.5, 2.5, 4.5}
fig3a_theta_by_m.csv   theta in [0.1, 1] step 0.02; x = 4.0 c, q = 0.05, m in {0, 0.5, 1, 2}
fig3b_theta_by_q.csv   theta in [0.1, 1] step 0.02; x = 4.0 c, m = 1, q in {0.01, 0.05, 0.1}
fig3c_theta_by_x.csv   theta in [0.1, 1] step 0.02; q = 0.05, m = 1, x in {1.5, 2.5, 4.5}
Panel 3a reads "x = 4.0 c" as four times the premium rate, so x moves with theta;
the alternative reading (a typo for x = 4.0) is not emitted.
"""


def figure_specs(method: str = "auto") -> dict:
    """File name -> list of SweepSpec, one spec per curve."""
    def m_sweep(theta, q, x):
        return SweepSpec("m", *M_GRID, ModelArgs(lam=1.0, mu=1.0, theta=theta), q=q, x=x,
                         method=method)

    def theta_sweep(q, x, m, x_times_c=False):
        return SweepSpec("theta", *THETA_GRID, ModelArgs(lam=1.0, mu=1.0), q=q, x=x,
                         m_or_a=m, x_times_c=x_times_c, method=method)

    return {
        "fig2a_m_by_q.csv": [m_sweep(0.25, q, 2.5) for q in Q_CURVES],
        "fig2b_m_by_theta.csv": [m_sweep(th, 0.05, 4.5) for th in THETA_CURVES],
        "fig2c_m_by_x.csv": [m_sweep(0.5, 0.05, x) for x in X_CURVES],
        "fig3a_theta_by_m.csv": [theta_sweep(0.05, X_TIMES_C, m, True) for m in M_CURVES],
        "fig3b_theta_by_q.csv": [theta_sweep(q, X_TIMES_C, 1.0, True) for q in Q_CURVES],
        "fig3c_theta_by_x.csv": [theta_sweep(0.05, x, 1.0) for x in X_CURVES],
    }


def write_figures(out_dir: str, method: str = "auto") -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, specs in figure_specs(method).items():
        rows = list(itertools.chain.from_iterable(s.rows() for s in specs))
        path = os.path.join(out_dir, name)
        write_rows(path, rows)
        paths.append(path)
    with open(os.path.join(out_dir, "figures_notes.txt"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write(FIGURE_NOTES)
    return paths


# --- argument parsing --------------------------------------------------------

def _add_model_args(p, default_model="classical-exp"):
    g = p.add_argument_group("model")
    g.add_argument("--model", default=default_model,
                   choices=["classical-exp", "perturbed-exp", "stable"])
    g.add_argument("--lambda", dest="lam", type=float, help="claim arrival rate")
    g.add_argument("--mu", type=float, help="exponential claim-size rate")
    g.add_argument("--theta", type=float, nargs="+",
                   help="safety loading; alternative to --c")
    g.add_argument("--c", type=float, help="premium rate")
    g.add_argument("--sigma", type=float, help="Brownian volatility (perturbed-exp)")
    g.add_argument("--alpha", type=float, help="stability index in (1, 2) (stable)")
    g.add_argument("--method", default="auto", choices=["auto", "quadrature"])


def _add_contract_args(p, multi):
    nargs = "+" if multi else None
    p.add_argument("--contract", default="extreme-loss",
                   choices=["extreme-loss", "proportional"])
    p.add_argument("--m", type=float, nargs=nargs, help="retention (extreme-loss)")
    p.add_argument("--a", type=float, nargs=nargs, help="ceded fraction (proportional)")
    p.add_argument("--allow-full-cession", action="store_true",
                   help="accept a >= 1 for the proportional contract")
    p.add_argument("--corrected", action="store_true",
                   help="add the W(0) atom and creeping terms left out of kappa and varphi")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rci", description=__doc__.split("\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("premium", help="premium of one contract with its breakdown")
    _add_model_args(p)
    p.add_argument("--q", type=float, required=True, help="discount rate")
    p.add_argument("--x", type=float, required=True, help="initial surplus")
    _add_contract_args(p, multi=False)

    p = sub.add_parser("curve", help="sweep one variable and write CSV")
    _add_model_args(p)
    p.add_argument("--variable", required=True, choices=SWEEP_VARIABLES)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--q", type=float, nargs="+")
    p.add_argument("--x", type=float, nargs="+")
    p.add_argument("--x-times-c", action="store_true",
                   help="read --x as a multiple of the premium rate c")
    _add_contract_args(p, multi=True)
    p.add_argument("--out", help="CSV path (default: standard output)")

    p = sub.add_parser("validate", help="formula vs Monte Carlo campaign")
    _add_model_args(p)
    p.add_argument("--q", type=float, default=0.05)
    p.add_argument("--x", type=float, default=2.5)
    p.add_argument("--paths", type=int, default=200_000)
    p.add_argument("--gap-paths", type=int, default=20_000,
                   help="paths per x for the MC column of the gap table")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon-eps", type=float, default=1e-4)
    p.add_argument("--no-delta", action="store_true", help="skip the delta table")
    p.add_argument("--out", help="directory for validation.csv and validation_report.txt")

    p = sub.add_parser("figures", help="write the six figure CSVs")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--method", default="auto", choices=["auto", "quadrature"])
    return parser


def _model_args(ns, theta=None) -> ModelArgs:
    return ModelArgs(ns.model, ns.lam, ns.mu, ns.c, theta, ns.sigma, ns.alpha)


def _single(values, name):
    if values is None:
        return None
    if len(values) != 1:
        raise UsageError(f"--{name} takes a single value here")
    return values[0]


def _contract(ns):
    if ns.contract == "extreme-loss":
        if ns.a is not None:
            raise UsageError("--a applies to the proportional contract")
        if ns.m is None:
            raise UsageError("--m is required for the extreme-loss contract")
        return P.ExtremeLoss(ns.m)
    if ns.m is not None:
        raise UsageError("--m applies to the extreme-loss contract")
    if ns.a is None:
        raise UsageError("--a is required for the proportional contract")
    return P.Proportional(ns.a, allow_full_cession=ns.allow_full_cession)


def cmd_premium(ns, out=sys.stdout) -> int:
    model = _model_args(ns, _single(ns.theta, "theta")).build()
    query = P.PremiumQuery(ns.q, ns.x, _contract(ns))
    br = P.premium(model, query, ns.method, ns.corrected)
    for name in ("premium", "phi_term", "kappa_term", "delta_factor", "i_factor",
                 "i_m_value"):
        out.write(f"{name}: {V.fmt(getattr(br, name))}\n")
    return EXIT_OK


def curve_specs(ns) -> List[SweepSpec]:
    """One SweepSpec per combination of the listed fixed values."""
    level = ns.m if ns.contract == "extreme-loss" else ns.a
    other = ns.a if ns.contract == "extreme-loss" else ns.m
    if other is not None:
        raise UsageError("give --m for extreme-loss or --a for proportional, not both")
    if ns.contract == "proportional" and level is not None:
        for a in level:
            P.Proportional(a, allow_full_cession=ns.allow_full_cession)
    lists = {"q": ns.q, "x": ns.x, "m": level, "theta": ns.theta}
    if lists[ns.variable] is not None:
        raise UsageError(f"{ns.variable} is swept and cannot also be fixed")
    combos = itertools.product(*[v if v is not None else [None] for v in
                                 (ns.theta, ns.q, ns.x, level)])
    return [SweepSpec(ns.variable, ns.start, ns.stop, ns.step, _model_args(ns, th),
                      q=q, x=x, contract=ns.contract, m_or_a=lv, x_times_c=ns.x_times_c,
                      method=ns.method, corrected=ns.corrected)
            for th, q, x, lv in combos]


def cmd_curve(ns, out=sys.stdout) -> int:
    specs = curve_specs(ns)
    # evaluate everything before touching the output file
    rows = list(itertools.chain.from_iterable(s.rows() for s in specs))
    write_rows(ns.out if ns.out else out, rows)
    return EXIT_OK


def cmd_validate(ns, out=sys.stdout) -> int:
    model = _model_args(ns, _single(ns.theta, "theta")).build()
    if not model.exponential_claims:
        raise UsageError("validation simulates exponential-claims models only")
    cfg = S.McConfig(ns.paths, ns.horizon_eps, ns.dt, ns.seed)
    report = V.run_validation(model, ns.q, ns.x, cfg, gap_paths=ns.gap_paths,
                              include_delta=not ns.no_delta)
    summary = report.summary()
    out.write(summary)
    if ns.out:
        os.makedirs(ns.out, exist_ok=True)
        with open(os.path.join(ns.out, "validation.csv"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write(report.csv_section())
        with open(os.path.join(ns.out, "validation_report.txt"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write(summary + "\n" + report.csv_section())
    return EXIT_OK


def cmd_figures(ns, out=sys.stdout) -> int:
    for path in write_figures(ns.out, ns.method):
        out.write(path + "\n")
    return EXIT_OK


COMMANDS = {"premium": cmd_premium, "curve": cmd_curve, "validate": cmd_validate,
            "figures": cmd_figures}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[ns.command](ns)
    except NumericsError as exc:
        print(f"rci: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except (ModelError, ValueError) as exc:
        print(f"rci: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rci: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
