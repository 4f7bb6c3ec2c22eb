import math

import pytest

import andova


def mirrored():
    return [[(9, 1), (8, 2)], [(1, 9), (2, 8)]]


def test_log_d_binomial_limit():
    assert andova.log_d(2, 1, 0.5, math.inf) == pytest.approx(math.log(0.125), abs=1e-14)


def test_laplace_inner_conjugate_and_empty():
    assert andova.laplace_inner([(7, 3)], math.inf)["method"] == "conjugate"
    empty = andova.laplace_inner([(0, 0)], 3.0)
    assert empty["log_value"] == 0.0
    assert empty["mode"] == 0.5


def test_window_evidence_mirrored_favours_alternative():
    ev = andova.window_evidence(mirrored())
    assert not ev["degenerate"]
    assert ev["log_bf"] > 0
    assert ev["log_bf"] == pytest.approx(ev["log_m1"] - ev["log_m0"])


def test_pmap_independent_even_odds():
    assert andova.pmap_independent(0.0, 0.5) == pytest.approx(0.5)


def test_solve_tree_depth_one_by_hand():
    out = andova.solve_tree([math.log(3.0)], beta=0.5)
    rho = 0.25
    assert out["alt_prob"][0] == pytest.approx(3 * rho / (3 * rho + 1 - rho))
    assert out["joint_alt"] == pytest.approx(out["alt_prob"][0])
    assert out["prior"]["alt_prob"][0] == pytest.approx(rho)


def test_solve_tree_rejects_bad_length():
    with pytest.raises(ValueError):
        andova.solve_tree([0.0, 0.0])


def test_elicitation_round_trip():
    beta = andova.elicit_beta(0.5, 11)
    assert andova.prjap(beta, 11) == pytest.approx(0.5, abs=1e-6)
    delta = andova.elicit_delta(2.0, beta, 11)
    s = andova.level_prior_summary(beta, delta, 11)
    assert s["expected_signals"] == pytest.approx(2.0, abs=1e-6)


def test_fdr_decision():
    p = [0.9, 0.8, 0.3]
    assert andova.bayesian_fdr(p, 0.5) == pytest.approx(0.15)
    assert andova.bayesian_fdr(p, 0.95) is None
    d = andova.decide(p, target=0.2)
    assert d["significant"] == [0, 1]
    assert andova.decide(p, threshold=0.85)["significant"] == [0]


def test_auc_extremes():
    assert andova.auc([1.0, 2.0], [-1.0, 0.0]) == 1.0
    assert andova.auc([0.0], [0.0]) == 0.5


def test_simulate_is_deterministic():
    a = andova.simulate("local_shift", n=200, seed=7)
    b = andova.simulate("local_shift", n=200, seed=7)
    assert a == b
    assert len(a) == 2 and len(a[0]) == 4
    assert sum(len(r) for r in a[1]) == 200
    assert all(0.0 <= x <= 3.2 for g in a for r in g for x in r)
    with pytest.raises(ValueError):
        andova.simulate("no_such_scenario")


def test_fit_report_shape_and_determinism():
    data = andova.simulate("local_shift", n=300, seed=3)
    kw = dict(depth=5, omega=(0.0, 3.2), samples=200, seed=11)
    r1 = andova.fit(data, group_labels=["ctrl", "case"], **kw)
    r2 = andova.fit(data, group_labels=["ctrl", "case"], **kw)
    assert r1 == r2
    assert len(r1["windows"]) == 31
    assert 0.0 <= r1["pjap"] <= 1.0
    assert max(w["pmap"] for w in r1["windows"]) <= r1["pjap"] + 1e-12
    assert [g["label"] for g in r1["groups"]] == ["ctrl", "case"]
    assert "sampler" in r1


def test_fit_restricted_variant_and_errors():
    data = andova.simulate("null", n=200, seed=5)
    r = andova.fit(data, depth=4, restrict_nu_infinity=True)
    assert r["config"]["restrict_nu_infinity"] is True
    with pytest.raises(ValueError):
        andova.fit(data[:1], depth=4)
    with pytest.raises(ValueError):
        andova.fit(data, group_labels=["only_one"])
