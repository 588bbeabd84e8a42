import math

import pytest

from rci import premium as P
from rci import simulate as S
from rci import validation as V
from rci.model import make_model

CLASSICAL = make_model("classical-exp", lam=1.0, mu=1.0, theta=0.25)


def test_fmt():
    assert V.fmt(0.1 + 0.2) == "0.3"
    assert V.fmt(1 / 3) == "0.333333333333"
    assert V.fmt(math.nan) == "NA" and V.fmt(None) == "NA"
    assert V.fmt(7) == "7" and V.fmt("m=1") == "m=1"


@pytest.mark.parametrize("sigma", [0.25, 0.5])
@pytest.mark.parametrize("m", [0.0, 0.5, 2.0])
def test_brute_force_double_integral(sigma, m):
    model = make_model("perturbed-exp", lam=1.0, mu=1.0, c=1.5, sigma=sigma)
    assert V.brute_force_i_m(model, 0.1, m) == pytest.approx(sum(P.i_m_parts(model, 0.1, m)),
                                                             rel=1e-8)


def test_delta_table_layout():
    tab = V.delta_table(sigmas=(0.5,), qs=(0.05,), ms=(0.0, 0.5))
    assert tab.header == V.DELTA_HEADER and len(tab.rows) == 2
    assert max(tab.column("i_m_rel_err")) < 1e-8


def test_verdicts():
    assert V._verdict(1.0, 9.0) == "pass"
    assert V._verdict(9.0, 1.0) == "gap-explained"
    assert V._verdict(4.0, 4.0) == "marginal"
    assert V._verdict(9.0, 9.0) == "unexplained"
    assert V._verdict(math.nan, math.nan) == "no-stderr"


def test_small_campaign_is_deterministic():
    cfg = S.McConfig(1500, seed=42)
    a = V.run_validation(CLASSICAL, 0.05, 2.5, cfg, gap_paths=300, include_delta=False)
    b = V.run_validation(CLASSICAL, 0.05, 2.5, cfg, gap_paths=300, include_delta=False)
    assert a.csv_section() == b.csv_section()
    mc = a.table("mc")
    assert mc.column("quantity")[:2] == ["ruin_probability", "kappa"]
    assert len(mc.rows) == 8
    text = a.summary()
    assert "kappa gap" in text and "seed: 42" in text


def test_single_path_reports_missing_stderr():
    rep = V.run_validation(CLASSICAL, 0.05, 2.5, S.McConfig(1, seed=1), gap_paths=1,
                           include_delta=False)
    for row in rep.table("mc").rows:
        assert V.fmt(row[5]) == "NA" and row[8] == "no-stderr"
    assert ",NA," in rep.csv_section()
