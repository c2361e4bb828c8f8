"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import json
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from resmeta import bounds
from resmeta.cli import main
from resmeta.iterations import Trajectory
from resmeta.nat import nat
from resmeta.rates.counterfunctions import affine, doubling, identity
from resmeta.suites import convergence_scenarios, run_suite, zoo_scenarios


def report(n, title, ok, detail=""):
    line = "%s criterion %d: %s%s" % ("PASS" if ok else "FAIL", n, title, (" (%s)" % detail) if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _summary(rep, prefix=None):
    vs = [v for v in rep.verdicts if prefix is None or prefix(v.name)]
    fails = [v.name for v in vs if v.verdict == "fail"]
    inc = [v.name for v in vs if v.verdict == "inconclusive"]
    return vs, fails, inc


def test_criterion_1_operator_laws():
    t0 = time.perf_counter()
    rep = run_suite("operators", seed=0, samples=1000)
    dt = time.perf_counter() - t0
    vs, fails, inc = _summary(rep)
    worst = min(v.details["min_slack"] for v in vs)
    ok = not fails and not inc and worst >= -1e-10 and dt < 10
    report(1, "operator laws on 10^3 samples per kind", ok, "%d checks, min slack %.2e, %.1fs" % (len(vs), worst, dt))


def test_criterion_2_strong_convergence():
    t0 = time.perf_counter()
    dists = {}
    for sc in convergence_scenarios():
        y = Trajectory(sc, "MAR*")
        dists[sc.name] = float(np.linalg.norm(y[10_000] - sc.projection_ref))
    dt = time.perf_counter() - t0
    ok = len(dists) >= 5 and max(dists.values()) <= 1e-6 and dt < 60
    report(2, "strong convergence to the projection at n = 10^4", ok, "%d scenarios, max distance %.1e, %.1fs" % (len(dists), max(dists.values()), dt))


@pytest.fixture(scope="module")
def metastability():
    return run_suite("metastability", seed=0, scenarios=zoo_scenarios())


def _log_top(vs):
    tops = [v.details["bound"]["lower_bound_log2"] for v in vs if v.details["bound"]["top"]]
    return ("saturated %d, lower bounds >= 2^%d" % (len(tops), min(tops))) if tops else "all exact"


def test_criterion_3_meta_domination(metastability):
    vs, fails, inc = _summary(metastability, lambda n: n.endswith("/mu4"))
    found = all(v.details["n_star"] <= 100_000 for v in vs)
    ok = len(vs) == 6 * 5 * 3 and not fails and not inc and found
    report(3, "improved metastability bound dominates witnesses", ok, "%d pairs, %s" % (len(vs), _log_top(vs)))


def test_criterion_4_regularity_domination():
    rep = run_suite("regularity", seed=0, scenarios=zoo_scenarios())
    vs, fails, inc = _summary(rep, lambda n: n.endswith("/vartheta"))
    ok = len(vs) == 6 * 5 * 3 and not fails and not inc
    report(4, "asymptotic regularity quasi-rate dominates residual witnesses", ok, "%d pairs, %s" % (len(vs), _log_top(vs)))


def test_criterion_5_conditional_bounds(metastability):
    vt, ft, it = _summary(metastability, lambda n: n.endswith("/mu-tilde"))
    v3, f3, i3 = _summary(metastability, lambda n: n.endswith("/mu3"))
    ok = len(vt) == len(v3) == 90 and not (ft or it or f3 or i3)
    report(5, "conditional bounds with empirical quasi-rates dominate", ok, "even %d, full %d" % (len(vt), len(v3)))


def test_criterion_6_error_reduction():
    rep = run_suite("errors", seed=0)
    rates, fr, ir = _summary(rep, lambda n: "/rho-" in n)
    comb, fc, ic = _summary(rep, lambda n: n.endswith("/combined"))
    checked = sum(len(v.details["checked"]) for v in rates)
    ok = rates and comb and not (fr or ir or fc or ic)
    report(6, "error gap below 1/(k+1) after rho(k); combined rate dominates", ok, "%d rate checks, %d combined" % (checked, len(comb)))


def test_criterion_7_transfer():
    rep = run_suite("transfer", seed=0, scenarios=zoo_scenarios())
    ids, fi, ii = _summary(rep, lambda n: "identity" in n or "dual" in n)
    worst = max(v.details.get("max_defect", v.details.get("max_gap", 0.0)) for v in ids)
    rt, fr, ir = _summary(rep, lambda n: "/rho-tilde" in n)
    gm, fg, ig = _summary(rep, lambda n: "/gamma-" in n)
    ok = not (fi or ii or fr or ir or fg) and worst <= 1e-12
    report(7, "transfer identities and transferred rates", ok, "max defect %.1e, %d rate checks" % (worst, len(rt)))


def test_criterion_8_lemma_engines():
    rep = run_suite("lemmas", seed=0, samples=1000)
    vs, fails, inc = _summary(rep)
    xu = [v for v in vs if v.name.startswith("xu/")]
    inner = next(v for v in vs if v.name == "monotone-inner-bound")
    mainge = next(v for v in vs if v.name == "last-ascent")
    ok = (
        len(xu) >= 10
        and not fails
        and not inc
        and inner.details["pairs"] >= 1000
        and mainge.details["sequences"] >= 1000
    )
    report(8, "lemma engines", ok, "%d recurrence fixtures, %d graph pairs, %d sequences" % (len(xu), inner.details["pairs"], mainge.details["sequences"]))


HAND_VALUES = [
    ("sigma1", ["--set", "A=2m", "--set", "M=4"], 7),
    ("nu", ["--set", "a=id", "--set", "ell=id", "--set", "r_beta=id", "--set", "r_mu=id", "--set", "N=1"], 37),
    ("phi2", ["--set", "D_iter=2", "--n", "1"], 3),
    ("w_iterate", ["--set", "N=1", "--set", "times=2"], 15000),
    ("rho_error", ["--set", "A=2m", "--set", "M=1"], 19),
    ("gamma_mar_halpern", ["--set", "a=id", "--set", "ell=id", "--set", "N=1"], 4),
    ("gamma_halpern_mar", ["--set", "a=id", "--set", "ell=id", "--set", "N=1"], 3),
    ("parity_merge", ["--set", "psi=3"], 7),
    ("combine_meta", ["--set", "phi1=1", "--set", "phi2=2"], 2),
    ("M0", ["--set", "a=id", "--set", "ell=id", "--set", "N=1"], 15),
    ("frak_m", ["--set", "a=id", "--set", "ell=id", "--set", "N=1", "--n", "1"], 1023),
]

# pairs (f, g) with f <= g pointwise
F_PAIRS = [
    (identity(), affine(1, 10)),
    (identity(), doubling()),
    (affine(1, 10), affine(2, 10)),
    (doubling(), affine(2, 10)),
]


def _monotone_failures(name, overrides=None, ks=(0, 1, 2)):
    sc = zoo_scenarios()[-1]
    ev = lambda k, f: bounds.evaluate(name, sc, k, 0, f, overrides)[0]
    bad = []
    fs = {id(f): f for pair in F_PAIRS for f in pair}.values()
    for f in fs:
        vals = [ev(k, f) for k in ks]
        bad += [(name, "k", f.name) for x, y in zip(vals, vals[1:]) if not x <= y]
    for k in ks:
        for f, g in F_PAIRS:
            if not ev(k, f) <= ev(k, g):
                bad.append((name, k, f.name, g.name))
    return bad


def test_criterion_9_rate_calculus(capsys):
    wrong = []
    for name, args, expect in HAND_VALUES:
        main(["bound", name, *args])
        got = json.loads(capsys.readouterr().out)["value"]
        if got != expect:
            wrong.append((name, got, expect))
    bad = []
    for name in ("mu_tilde", "mu_meta3", "mu4", "vartheta", "meta_with_errors"):
        bad += _monotone_failures(name)
    sc = zoo_scenarios()[-1]
    rho = [bounds.evaluate("rho_error", sc, k, 0, None, {"A": "2m", "M": "1"})[0] for k in range(8)]
    bad += [("rho_error", k) for k in range(7) if not rho[k] <= rho[k + 1]]
    ok = not wrong and not bad
    report(9, "hand-evaluated values and monotonicity", ok, "%d values, wrong %s, non-monotone %s" % (len(HAND_VALUES), wrong, bad))
