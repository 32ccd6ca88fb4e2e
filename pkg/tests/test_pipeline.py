import json

import pytest

from tatehk.field import FieldDescriptor
from tatehk.padic import PadicContext
from tatehk.pipeline import (JobSpec, compute_tate, parse_expansion,
                             render_report, report_diff, run_tate_job,
                             suite_names, verify_suite)
from tatehk.plog import log_one_unit


def lift_int(x):
    c = x.coeffs[0]
    if c.is_zero():
        return 0
    m = c.lift()
    modulus = c.ctx.p ** c.prec
    return m - modulus if m > modulus // 2 else m


def test_job_spec_validation():
    with pytest.raises(ValueError):
        JobSpec(4, 12, 1)
    with pytest.raises(ValueError):
        JobSpec(3, 4, 1)
    with pytest.raises(ValueError):
        JobSpec(3, 12, 0)
    with pytest.raises(ValueError):
        JobSpec(3, 12, 1, S=2, T=2)
    job = JobSpec(3, 12, 2)
    assert (job.S, job.T, job.U) == (8, 8, 3)


def test_unramified_trivial_branch():
    comp = compute_tate(JobSpec(3, 12, 2))
    phi = [[lift_int(comp.phi.entry(i, j)) for j in range(2)] for i in range(2)]
    n = [[lift_int(comp.n_pi.entry(i, j)) for j in range(2)] for i in range(2)]
    psi = [[lift_int(comp.psi.entry(i, j)) for j in range(2)] for i in range(2)]
    assert phi == [[1, 0], [0, 3]]
    assert n == [[0, 2], [0, 0]]
    assert psi == [[1, 0], [0, 1]]
    assert lift_int(comp.h0_phi) == 1
    assert lift_int(comp.h2_phi) == 3
    assert lift_int(comp.h2_n) == 0
    assert comp.ranks_hk == {0: 1, 1: 2, 2: 1, 3: 0}
    assert comp.ranks_dr == {0: 1, 1: 2, 2: 1, 3: 0}
    assert not comp.ranks_tainted
    assert comp.lam.is_zero_at(12)
    # one-form line is the second basis class
    assert len(comp.fil_dr) == 1
    assert comp.fil_dr[0][0].is_zero_at(7)
    assert lift_int(comp.fil_dr[0][1]) == 1


def test_ramified_normalized_monodromy():
    comp = compute_tate(JobSpec(5, 10, 2, "s^2 - 5"))
    nn = comp.module.n_ordp()
    assert nn.entry(0, 1).same_at(comp.field.one(), 10)
    assert comp.module.check_relation(10)
    assert comp.module.is_weakly_admissible_numerically()
    assert lift_int(comp.n_pi.entry(0, 1)) == 2


def test_branch_moves_psi_and_filtration():
    comp = compute_tate(JobSpec(5, 12, 3, None, "p*(1+p)"))
    field = comp.field
    lv = log_one_unit(field.from_int(6))
    # lambda = -log_q(p) = log(1+p), and psi(e2) picks up r * lambda on e1
    assert comp.psi.entry(0, 1).same_at(lv * field.from_int(3), 7)
    assert comp.psi.entry(1, 1).same_at(field.one(), 7)
    # the fiber one-form line pulled back through psi tilts by -r*lambda
    assert comp.fil_hk[0][0].same_at(-(lv * field.from_int(3)), 7)
    assert comp.fil_hk[0][1].same_at(field.one(), 7)


def test_report_shape_and_determinism():
    job = JobSpec(3, 12, 1)
    rep1 = run_tate_job(job)
    rep2 = run_tate_job(job)
    assert rep1 == rep2
    assert sorted(rep1) == ["classes", "filtration", "identifications",
                            "matrices", "meta", "spec", "suites", "windows"]
    text = json.dumps(rep1, sort_keys=True)
    assert json.loads(text) == rep1
    assert rep1["identifications"]["h0_object"] == "K(0)"
    assert rep1["identifications"]["h2_object"] == "K(-1)"
    assert rep1["identifications"]["weakly_admissible"] is True
    for key, entry in rep1["classes"].items():
        assert entry["cocycle_ok"], key


def test_parse_expansion():
    assert parse_expansion("O(pi^12)") == ({}, 12)
    assert parse_expansion("1 + O(pi^12)") == ({0: 1}, 12)
    assert parse_expansion("2*pi + pi^3 + O(pi^9)") == ({1: 2, 3: 1}, 9)
    assert parse_expansion("pi + O(pi^4)") == ({1: 1}, 4)
    assert parse_expansion("pi^-2*(3 + O(pi^5))") == ({-2: 3}, 3)
    assert parse_expansion("hello") is None
    assert parse_expansion(7) is None


def test_report_diff():
    a = {"x": "1 + 2*pi + O(pi^8)", "y": [1, 2], "z": {"w": True}}
    b = {"x": "1 + 2*pi + pi^5 + O(pi^5)", "y": [1, 2], "z": {"w": True}}
    # the pi^5 term sits at the stated depth of b, so it is not compared
    assert report_diff(a, b) == []
    c = {"x": "1 + pi + O(pi^8)", "y": [1, 2], "z": {"w": True}}
    diffs = report_diff(a, c)
    assert len(diffs) == 1 and diffs[0]["path"] == "/x"
    assert report_diff({"y": [1]}, {"y": [1, 2]})
    assert report_diff({"k": 1}, {})[0]["path"] == "/k"


def test_reports_diff_only_below_shared_precision():
    rep_lo = run_tate_job(JobSpec(3, 10, 2))
    rep_hi = run_tate_job(JobSpec(3, 14, 2))
    diffs = report_diff(rep_lo["matrices"], rep_hi["matrices"])
    assert diffs == []


def test_verify_suites_pass():
    assert suite_names() == ["base_change", "branch_calculus", "choice_of_pi",
                             "kim_hain_algebra", "truncation_stability"]
    fast = {
        "kim_hain_algebra": dict(p=3, prec=10, r=2, trials=6),
        "branch_calculus": dict(p=3, prec=10, trials=6),
        "base_change": dict(p=3, prec=10),
    }
    for name, kw in fast.items():
        result = verify_suite(name, **kw)
        assert result["ok"], result["failures"]
        assert result["checks"] > 0
    with pytest.raises(ValueError):
        verify_suite("nope")
