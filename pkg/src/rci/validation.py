"""Formula-versus-simulation validation campaign.

Three tables are produced:

* ``mc``     each target quantity (ruin probability, kappa, varphi, Pi_1,
             Pi_2) from the formulas and from simulated paths, with
             z-scores against the printed formula and against the corrected
             version, whose kappa is the full Laplace transform of the ruin
             time (it adds the W(0) atom for sigma = 0 and ruin by creeping
             for sigma > 0).
* ``gap``    kappa and Pi_1(m=0) with and without the correction as a
             function of x; for sigma = 0 the difference is a multiple of
             e^{-mu x}.
* ``delta``  the two evaluations of delta for the perturbed model, and
             I_m^1 + I_m^2 against a brute-force double integral over
             {u + v > m} of e^{Phi (u + v)} (u + v) H(du) G(dv).
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
from scipy import integrate

from . import premium as P
from . import simulate as S
from .model import ModelSpec, make_model, phi_inverse

NA = "NA"
Z_PASS = 3.0
Z_PERSISTENT = 5.0


def fmt(v) -> str:
    """12 significant digits; ``NA`` for missing values."""
    if isinstance(v, str):
        return v
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return NA
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def write_csv(stream, header: Sequence[str], rows: Sequence[Sequence]):
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


@dataclass
class Table:
    name: str
    header: List[str]
    rows: List[list] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        write_csv(buf, self.header, self.rows)
        return buf.getvalue()

    def column(self, name):
        i = self.header.index(name)
        return [r[i] for r in self.rows]


def _verdict(z_printed, z_corr):
    if math.isnan(z_printed):
        return "no-stderr"
    if abs(z_printed) <= Z_PASS:
        return "pass"
    if abs(z_corr) <= Z_PASS:
        return "gap-explained"
    if abs(z_printed) <= Z_PERSISTENT:
        return "marginal"
    return "unexplained"


MC_HEADER = ["quantity", "parameter", "formula_printed", "formula_corrected", "mc_mean",
             "mc_stderr", "z_printed", "z_corrected", "verdict"]


def mc_table(model: ModelSpec, q: float, x: float, cfg: S.McConfig,
             m_values=(0.0, 0.5, 1.0), varphi_m=(0.0, 1.0), a: float = 0.5,
             outcomes=None) -> Table:
    """Formula values and MC estimates from one shared set of paths."""
    outs = outcomes if outcomes is not None else S.simulate_paths(model, x, q, cfg)
    tab = Table("mc", list(MC_HEADER))

    def add(name, param, printed, corr, est):
        zp, zc = est.z_score(printed), est.z_score(corr)
        tab.rows.append([name, param, printed, corr, est.mean, est.stderr, zp, zc,
                         _verdict(zp, zc)])

    if model.sigma == 0.0:
        # classical ruin probability over an infinite horizon
        rho = model.lam / (model.mu * model.c)
        ruin = rho * math.exp(-(model.mu - model.lam / model.c) * x)
        est = S.estimate_ruin_probability_mc(model, x, q, cfg, outs)
        add("ruin_probability", "", ruin, ruin, est)
    kap = P.kappa(model, q, x)
    add("kappa", "", kap, kap + P.kappa_gap(model, q, x),
        S.estimate_kappa_mc(model, q, x, cfg, outs))
    for m in varphi_m:
        v = P.varphi(model, q, x, m)
        add("varphi", f"m={fmt(m)}", v, v + P.varphi_gap(model, q, x, m),
            S.estimate_varphi_mc(model, q, x, m, cfg, outs))
    queries = [("premium_extreme_loss", f"m={fmt(m)}", P.PremiumQuery(q, x, P.ExtremeLoss(m)))
               for m in m_values]
    queries.append(("premium_proportional", f"a={fmt(a)}",
                    P.PremiumQuery(q, x, P.Proportional(a))))
    for name, param, query in queries:
        printed = P.premium(model, query).premium
        corr = P.premium(model, query, corrected=True).premium
        add(name, param, printed, corr, S.estimate_premium_mc(model, query, cfg, outs))
    return tab


GAP_HEADER = ["x", "kappa_printed", "kappa_corrected", "kappa_gap", "kappa_gap_times_exp_mu_x",
              "premium_printed", "premium_corrected", "premium_gap_times_exp_mu_x",
              "mc_kappa", "mc_stderr", "z_printed", "z_corrected"]


def gap_table(model: ModelSpec, q: float, cfg: S.McConfig,
              x_values=(0.1, 0.25, 0.5, 1.0, 1.5, 2.5, 4.5)) -> Table:
    """kappa with and without the correction over x, with an MC column (sigma = 0)."""
    tab = Table("gap", list(GAP_HEADER))
    for x in x_values:
        kap = P.kappa(model, q, x)
        corr = kap + P.kappa_gap(model, q, x)
        query = P.PremiumQuery(q, x, P.ExtremeLoss(0.0))
        pp = P.premium(model, query).premium
        pc = P.premium(model, query, corrected=True).premium
        scale = math.exp(model.mu * x)
        row = [x, kap, corr, corr - kap, (corr - kap) * scale, pp, pc, (pc - pp) * scale]
        if model.sigma == 0.0:
            est = S.estimate_kappa_mc(model, q, x, cfg)
            row += [est.mean, est.stderr, est.z_score(kap), est.z_score(corr)]
        else:
            # Euler paths at every x would dominate the run time
            row += [math.nan] * 4
        tab.rows.append(row)
    return tab


def brute_force_i_m(model: ModelSpec, q: float, m: float) -> float:
    """Direct double integral of e^{Phi (u + v)} (u + v) H(du) G(dv) over u + v > m.

    Exponential claims with sigma > 0: H has density
    K e^{-(Phi + mu) u}, K = lambda mu / ((c + Phi sigma^2)(Phi + mu)), and
    G is exponential with rate beta = 2 (c + sigma^2 Phi) / sigma^2.
    """
    phi = phi_inverse(model, q)
    s2 = model.sigma ** 2
    mu = model.mu
    k = model.lam * mu / ((model.c + phi * s2) * (phi + mu))
    beta = 2.0 * (model.c + s2 * phi) / s2
    f = lambda u, v: (math.exp(-mu * u) * k * beta * math.exp(-(beta - phi) * v)
                      * (u + v))
    opts = dict(epsabs=0.0, epsrel=1e-11)
    far, _ = integrate.dblquad(f, m, np.inf, 0.0, np.inf, **opts)
    if m == 0.0:
        return far
    near, _ = integrate.dblquad(f, 0.0, m, lambda v: m - v, np.inf, **opts)
    return far + near


DELTA_HEADER = ["sigma", "q", "m", "i_m_parts_sum", "i_m_brute_force", "i_m_rel_err",
                "delta_primary", "delta_closed_form", "delta_rel_diff", "assumed_rho",
                "implied_rho"]


def delta_table(sigmas=(0.25, 0.5), qs=(0.05, 0.2), ms=(0.0, 0.5),
                lam=1.0, mu=1.0, c=1.5) -> Table:
    tab = Table("delta", list(DELTA_HEADER))
    for sigma in sigmas:
        model = make_model("perturbed-exp", lam=lam, mu=mu, c=c, sigma=sigma)
        for q in qs:
            for m in ms:
                parts = sum(P.i_m_parts(model, q, m))
                brute = brute_force_i_m(model, q, m)
                chk = P.delta_dual_check(model, q, m)
                tab.rows.append([sigma, q, m, parts, brute, abs(parts - brute) / brute,
                                 chk.primary, chk.closed_form, chk.rel_diff,
                                 chk.assumed_rho, chk.implied_rho])
    return tab


def model_label(model: ModelSpec) -> str:
    parts = [model.kind.value, f"lambda={fmt(model.lam)}", f"mu={fmt(model.mu)}",
             f"c={fmt(model.c)}", f"sigma={fmt(model.sigma)}"]
    return " ".join(parts)


@dataclass
class ValidationReport:
    header: Dict[str, str]
    tables: List[Table]
    perturbed: bool = False

    def table(self, name) -> Table:
        return next(t for t in self.tables if t.name == name)

    def summary(self) -> str:
        lines = ["RCI validation report"]
        lines += [f"{k}: {v}" for k, v in self.header.items()]
        mc = self.table("mc")
        lines.append("")
        lines.append("Formula vs Monte Carlo (z = (mc - formula) / stderr)")
        for r in mc.rows:
            lines.append(f"  {r[0]:<22} {r[1]:<6} printed={fmt(r[2]):<16} "
                         f"corrected={fmt(r[3]):<16} mc={fmt(r[4])} +- {fmt(r[5])} "
                         f"z_printed={_short(r[6])} z_corrected={_short(r[7])} [{r[8]}]")
        gap = self.table("gap")
        if gap.rows and not self.perturbed:
            const = gap.column("kappa_gap_times_exp_mu_x")
            lines.append("")
            lines.append("kappa gap (corrected - printed) over x: gap * e^{mu x} ranges over "
                         f"[{fmt(min(const))}, {fmt(max(const))}], so the whole difference "
                         "is the single e^{-mu x} term carried by the W(0) atom.")
        if any(t.name == "delta" for t in self.tables):
            d = self.table("delta")
            lines.append("")
            lines.append("delta dual evaluation (perturbed model)")
            worst_bf = max(d.column("i_m_rel_err"))
            lines.append(f"  I_m^1 + I_m^2 vs brute force: worst rel err {fmt(worst_bf)}")
            for r in d.rows:
                lines.append(f"  sigma={fmt(r[0])} q={fmt(r[1])} m={fmt(r[2])}: "
                             f"I_m/(1-I)={fmt(r[6])} closed form={fmt(r[7])} "
                             f"rel diff={fmt(r[8])} implied rho={fmt(r[10])} "
                             f"(assumed {fmt(r[9])})")
        lines.append("")
        lines.extend(self.header_notes())
        return "\n".join(lines) + "\n"

    @staticmethod
    def header_notes():
        return [
            "Notes:",
            "  - printed values use kappa = f * t and varphi = f * h_m; corrected values add "
            "W(0) t(x) to kappa and W(0) h_m(x) to varphi (sigma = 0), or the creeping "
            "term (sigma^2/2) f(x) to kappa (sigma > 0).",
            "  - for sigma > 0 a ruin by diffusion crossing pays C_0 = 0, and the crossing "
            "time carries an O(sqrt(dt)) grid bias (no bridge correction).",
            "  - payoffs after the horizon T = -log(horizon_eps)/q are dropped.",
        ]

    def csv_section(self) -> str:
        out = []
        for t in self.tables:
            out.append(f"# table={t.name}\n")
            out.append(t.to_csv())
        return "".join(out)


def run_validation(model: ModelSpec, q: float, x: float, cfg: S.McConfig,
                   gap_paths: int = 20000, include_delta: bool = True) -> ValidationReport:
    """Full campaign; ``gap_paths`` paths per x for the gap table's MC column."""
    header = {
        "model": model_label(model),
        "q": fmt(q), "x": fmt(x), "paths": str(cfg.n_paths), "seed": str(cfg.seed),
        "horizon_eps": fmt(cfg.horizon_eps), "dt": fmt(cfg.dt),
    }
    tables = [mc_table(model, q, x, cfg)]
    gap_cfg = S.McConfig(min(gap_paths, cfg.n_paths), cfg.horizon_eps, cfg.dt, cfg.seed)
    tables.append(gap_table(model, q, gap_cfg))
    if include_delta:
        tables.append(delta_table())
    return ValidationReport(header, tables, perturbed=model.sigma > 0.0)


def _short(z):
    return "NA" if math.isnan(z) else f"{z:+.2f}"
