"""Acceptance suite: one test per criterion, each printing a pass/fail line.

The lines are also collected in ``conftest.ACCEPTANCE_LINES`` and repeated in
the terminal summary.
"""
import csv
import math
import os
import time
import warnings

import numpy as np
import pytest
from scipy import integrate

from conftest import ACCEPTANCE_LINES
from rci import cli, numerics
from rci import premium as P
from rci import simulate as S
from rci import validation as V
from rci.exceptions import ModelError
from rci.model import laplace_exponent, make_model
from rci.scale import ScaleEvaluator


def report(number, title, passed, detail, elapsed, budget):
    passed = passed and elapsed < budget
    line = (f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail} "
            f"({elapsed:.1f} s, budget {budget:g} s)")
    print(line)
    ACCEPTANCE_LINES.append(line)
    return passed


def random_model(rng, family):
    if family == "classical":
        return make_model("classical-exp", lam=rng.uniform(0.5, 2.0),
                          mu=rng.uniform(0.5, 2.0), theta=rng.uniform(0.05, 1.0))
    if family == "perturbed":
        return make_model("perturbed-exp", lam=rng.uniform(0.5, 2.0),
                          mu=rng.uniform(0.5, 2.0), theta=rng.uniform(0.05, 1.0),
                          sigma=rng.uniform(0.1, 1.0))
    # the geometric factor I needs alpha c^(alpha - 2) < 1
    alpha = rng.uniform(1.2, 1.7)
    c = alpha ** (1.0 / (2.0 - alpha)) * rng.uniform(1.1, 2.0)
    return make_model("stable", alpha=alpha, c=c)


def test_criterion_1_proportional_identity():
    rng = np.random.default_rng(2024)
    families = ("classical", "perturbed", "stable")
    t0 = time.perf_counter()
    worst, done = 0.0, 0
    while done < 100:
        model = random_model(rng, families[done % 3])
        q, x, a = rng.uniform(0.01, 1.0), rng.uniform(0.1, 5.0), rng.uniform(0.0, 1.0)
        try:
            P.geometric_factor_i(model, q)
        except ModelError:
            continue  # invalid parameter set for the record-count series
        # Pi_2 reassembled from its own terms; Pi_1 from the extreme-loss path
        b2 = P.premium(model, P.PremiumQuery(q, x, P.Proportional(a)))
        pi2 = b2.phi_term + b2.delta_factor * b2.kappa_term
        pi1 = P.premium(model, P.PremiumQuery(q, x, P.ExtremeLoss(0.0))).premium
        worst = max(worst, abs(pi2 - a * pi1) / max(abs(a * pi1), 1e-300))
        done += 1
    elapsed = time.perf_counter() - t0
    ok = report(1, "Pi_2(q,x,a) = a Pi_1(q,x,0)", worst <= 1e-12,
                f"100 random sets, worst rel err {worst:.2e} (tol 1e-12)", elapsed, 10)
    assert ok


def truncated_transform(ev, s, x_max):
    g = lambda x: math.exp(-s * x) * ev.w(x)
    cuts = np.linspace(0.0, x_max, 13)
    return sum(integrate.quad(g, a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
               for a, b in zip(cuts[:-1], cuts[1:]))


def test_criterion_2_scale_transform():
    models = [make_model("classical-exp", lam=1.0, mu=1.0, theta=0.25),
              make_model("stable", alpha=1.5, c=3.0)]
    t0 = time.perf_counter()
    worst = 0.0
    for model in models:
        for q in (0.05, 0.5):
            ev = ScaleEvaluator(model, q)
            for ds in (0.5, 1.0, 2.0):
                s = ev.phi + ds
                ref = 1.0 / (laplace_exponent(model, s) - q)
                # truncation error is below e^{-60}
                got = truncated_transform(ev, s, 60.0 / ds)
                worst = max(worst, abs(got - ref) / abs(ref))
    elapsed = time.perf_counter() - t0
    ok = report(2, "int e^{-sx} W(x) dx = 1/(psi(s) - q)", worst <= 1e-6,
                f"classical and stable, q in {{0.05, 0.5}}, worst rel err {worst:.2e} "
                "(tol 1e-6)", elapsed, 30)
    assert ok


def test_criterion_3_classical_closed_forms():
    model = make_model("classical-exp", lam=1.0, mu=1.0, theta=0.25)
    q = 0.05
    t0 = time.perf_counter()
    worst = 0.0
    for x in (0.5, 1.0, 2.5, 5.0):
        pairs = [(P.kappa(model, q, x, "quadrature"), P.kappa(model, q, x))]
        for m in (0.0, 1.0):
            pairs.append((P.varphi(model, q, x, m, "quadrature"), P.varphi(model, q, x, m)))
            quad = P.premium(model, P.PremiumQuery(q, x, P.ExtremeLoss(m)), "quadrature")
            pairs.append((quad.premium, P._classical_extreme_loss(model, q, x, m)))
        worst = max([worst] + [abs(a - b) / abs(b) for a, b in pairs])
    elapsed = time.perf_counter() - t0
    ok = report(3, "classical quadrature vs closed forms", worst <= 1e-8,
                f"kappa, varphi, Pi_1 on x in {{0.5,1,2.5,5}}, m in {{0,1}}, worst rel err "
                f"{worst:.2e} (tol 1e-8)", elapsed, 10)
    assert ok


def test_criterion_4_delta_dual_evaluation():
    t0 = time.perf_counter()
    tab = V.delta_table()
    brute_err = max(tab.column("i_m_rel_err"))
    closed_diff = max(tab.column("delta_rel_diff"))
    tables = [V.Table("mc", V.MC_HEADER), V.Table("gap", V.GAP_HEADER), tab]
    report_text = V.ValidationReport({}, tables, perturbed=True).summary()
    elapsed = time.perf_counter() - t0
    brute_ok = brute_err <= 1e-6
    if closed_diff <= 1e-6:
        ok, clause = brute_ok, "primary clause"
    else:
        # closed form disagrees: the discrepancy must be quantified in the report
        quantified = all(f"rel diff={V.fmt(d)}" in report_text
                         for d in tab.column("delta_rel_diff"))
        ok, clause = brute_ok and quantified, "alternative clause"
    detail = (f"{clause}; I_m^1+I_m^2 vs brute force worst {brute_err:.2e} (tol 1e-6), "
              f"closed form vs I_m/(1-I) worst {closed_diff:.2e}, implied rho "
              f"{min(tab.column('implied_rho')):.3f}..{max(tab.column('implied_rho')):.3f} "
              f"vs assumed {tab.rows[0][9]:.3f}")
    ok = report(4, "delta dual evaluation", ok, detail, elapsed, 60)
    assert ok


def test_criterion_5_monte_carlo_campaign(tmp_path):
    model = make_model("classical-exp", lam=1.0, mu=1.0, theta=0.25)
    cfg = S.McConfig(200_000, horizon_eps=1e-4, seed=42)
    t0 = time.perf_counter()
    rep = V.run_validation(model, 0.05, 2.5, cfg, gap_paths=20_000, include_delta=False)
    elapsed = time.perf_counter() - t0
    (tmp_path / "validation_report.txt").write_text(rep.summary())

    mc = rep.table("mc")
    rows = {(r[0], r[1]): r for r in mc.rows}
    ruin = rows[("ruin_probability", "")]
    target = 0.8 * math.exp(-0.5)
    z_ruin = (ruin[4] - target) / ruin[5]
    ok_a = abs(z_ruin) <= 3.0

    gap = rep.table("gap")
    const = gap.column("kappa_gap_times_exp_mu_x")
    const_ok = (max(const) - min(const)) <= 1e-10 * max(const)
    verdicts = [r[8] for r in mc.rows if r[0] != "ruin_probability"]
    explained = all(v == "pass" or (v == "gap-explained" and const_ok) for v in verdicts)
    z_printed = [abs(r[6]) for r in mc.rows if r[0] != "ruin_probability"]
    z_corr = [abs(r[7]) for r in mc.rows if r[0] != "ruin_probability"]
    detail = (f"(a) ruin probability {ruin[4]:.5f} vs {target:.5f}, z={z_ruin:+.2f}; "
              f"(b) max |z| vs printed formulas {max(z_printed):.1f}, vs corrected "
              f"{max(z_corr):.1f}; verdicts {sorted(set(verdicts))}; "
              f"gap*e^(mu x) = {const[0]:.9f} constant over x: {const_ok}")
    ok = report(5, "Monte Carlo oracle", ok_a and explained, detail, elapsed, 120)
    assert ok


def _read(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    numeric = ("q", "x", "theta", "m_or_a", "premium")
    return [{k: float(r[k]) for k in numeric} for r in rows]


def _curves(rows, keys):
    out = {}
    for r in rows:
        out.setdefault(tuple(r[k] for k in keys), []).append(r)
    return out


def test_criterion_6a_figure_shapes(tmp_path):
    t0 = time.perf_counter()
    cli.write_figures(str(tmp_path))
    problems = []
    # decreasing in m (fig 2) and in theta (fig 3) along every curve
    for name, var in [("fig2a_m_by_q", "m_or_a"), ("fig2b_m_by_theta", "m_or_a"),
                      ("fig2c_m_by_x", "m_or_a"), ("fig3a_theta_by_m", "theta"),
                      ("fig3b_theta_by_q", "theta"), ("fig3c_theta_by_x", "theta")]:
        rows = _read(tmp_path / f"{name}.csv")
        fixed = [k for k in ("q", "m_or_a", "x", "theta") if k != var]
        if name in ("fig3a_theta_by_m", "fig3b_theta_by_q"):
            fixed.remove("x")  # x moves with theta in the x = 4c panels
        for key, curve in _curves(rows, fixed).items():
            vals = [r["premium"] for r in sorted(curve, key=lambda r: r[var])]
            if not all(b < a for a, b in zip(vals, vals[1:])):
                problems.append(f"{name} {key} not decreasing in {var}")
    # decreasing in x for x >= 1, at every common grid point
    for name, var in [("fig2c_m_by_x", "m_or_a"), ("fig3c_theta_by_x", "theta")]:
        rows = _read(tmp_path / f"{name}.csv")
        for key, pts in _curves(rows, [var]).items():
            vals = [r["premium"] for r in sorted(pts, key=lambda r: r["x"]) if r["x"] >= 1]
            if not all(b < a for a, b in zip(vals, vals[1:])):
                problems.append(f"{name} at {var}={key[0]} not decreasing in x")
    elapsed = time.perf_counter() - t0
    n_files = len([f for f in os.listdir(tmp_path) if f.endswith(".csv")])
    detail = (f"{n_files} figure CSVs; decreasing in m, theta and x (x >= 1): "
              + ("all curves" if not problems else "; ".join(problems[:3])))
    ok = report("6a", "figure shapes", n_files == 6 and not problems, detail, elapsed, 60)
    assert ok


def test_criterion_6b_small_discount_limit():
    model = make_model("classical-exp", lam=1.0, mu=1.0, theta=0.25)
    t0 = time.perf_counter()
    qs = (1e-2, 1e-3, 1e-4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", P.SmallDiscountWarning)
        scaled = [q * P.premium(model, P.PremiumQuery(q, 2.5, P.ExtremeLoss(0.0))).premium
                  for q in qs]
    elapsed = time.perf_counter() - t0
    # a finite positive limit: successive values settle within 5 percent
    settles = abs(scaled[2] - scaled[1]) <= 0.05 * abs(scaled[1])
    ok = scaled[-1] > 0 and settles
    detail = ("q Pi_1(q, 2.5, 0) at q = 1e-2, 1e-3, 1e-4: "
              + ", ".join(f"{v:.4e}" for v in scaled)
              + ("" if ok else "; decays like q, so Pi_1 stays bounded as q -> 0 "
                 "(the record-count factor delta tends to rho/(1 - rho))"))
    ok = report("6b", "q Pi_1 limit as q -> 0", ok, detail, elapsed, 60)
    assert ok


def test_criterion_7_mittag_leffler_and_stable_scale():
    t0 = time.perf_counter()
    zs = np.linspace(0.0, 20.0, 201)
    ml_err = max(max(abs(numerics.mittag_leffler(1.0, 1.0, z) / math.exp(z) - 1.0),
                     abs(numerics.mittag_leffler(2.0, 1.0, z) / math.cosh(math.sqrt(z)) - 1.0))
                 for z in zs)
    model = make_model("stable", alpha=1.5, c=3.0)
    xs = np.linspace(0.1, 5.0, 50)
    w_err = 0.0
    for q in (0.05, 0.5):
        exact = ScaleEvaluator(model, q)
        inv = ScaleEvaluator(model, q, method="inversion")
        w_err = max(w_err, max(abs(inv.w(x) / exact.w(x) - 1.0) for x in xs))
    elapsed = time.perf_counter() - t0
    ok = report(7, "Mittag-Leffler and stable W", ml_err <= 1e-10 and w_err <= 1e-5,
                f"E_11 vs exp and E_21 vs cosh(sqrt z) on [0,20] worst {ml_err:.2e} "
                f"(tol 1e-10); stable W vs Laplace inversion on [0.1,5] worst {w_err:.2e} "
                "(tol 1e-5)", elapsed, 60)
    assert ok
