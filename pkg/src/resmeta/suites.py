"""Verification suites: each runs oracle checks over a scenario grid and
returns a :class:`SuiteReport` of verdicts."""

import concurrent.futures
import dataclasses
import math
import time

import numpy as np

from . import operators as ops
from .iterations import Scenario, Trajectory, identity_residuals, translate_halpern_to_mar, translate_mar_to_halpern
from .oracle import (
    WitnessQuery,
    check_domination,
    check_mainge,
    check_monotone_inner_bound,
    check_xu_lemma,
    empirical_functional,
    empirical_hook,
    find_meta_witness,
    find_quasi_witness,
    make_mainge_fixture,
    make_xu_fixture,
    manufacture_graph_pair,
    residual_sequence,
    step_sequence,
)
from .rates.conditional import EtaFamily, halpern_transfer, mu_meta3, mu_tilde
from .rates.counterfunctions import affine, doubling, identity
from .rates.errors import meta_with_errors, rho_error
from .rates.improved import mu_meta4, vartheta
from .schedules import builtin, halving_errors

__all__ = [
    "SUITES",
    "Verdict",
    "SuiteReport",
    "zoo_operators",
    "zoo_scenarios",
    "convergence_scenarios",
    "default_grid",
    "nat_record",
    "run_suite",
]

SUITES = ("operators", "lemmas", "metastability", "regularity", "errors", "transfer")


@dataclasses.dataclass
class Verdict:
    suite: str
    name: str
    verdict: str
    details: dict = dataclasses.field(default_factory=dict)

    def as_dict(self):
        return {"suite": self.suite, "name": self.name, "verdict": self.verdict, "details": self.details}


@dataclasses.dataclass
class SuiteReport:
    suite: str
    verdicts: list
    seed: int = 0
    seconds: float = 0.0

    def counts(self):
        out = {"pass": 0, "fail": 0, "inconclusive": 0}
        for v in self.verdicts:
            out[v.verdict] = out.get(v.verdict, 0) + 1
        return out

    @property
    def exit_code(self):
        c = self.counts()
        if c["fail"]:
            return 1
        if c["inconclusive"]:
            return 2
        return 0

    def as_dict(self):
        return {
            "suite": self.suite,
            "seed": self.seed,
            "counts": self.counts(),
            "verdicts": [v.as_dict() for v in self.verdicts],
        }


def nat_record(n):
    """JSON-friendly view of a Nat: exact value or the saturation mark with
    its verified lower bound (given by bit length when large)."""
    if not n.is_top:
        v = n.value
        return {"top": False, "value": str(v) if v.bit_length() < 200 else None, "log2": v.bit_length(), "lower_bound": None}
    lo = n.lo
    return {
        "top": True,
        "value": None,
        "lower_bound": str(lo) if lo.bit_length() < 200 else "2^%d" % (lo.bit_length() - 1),
        "lower_bound_log2": max(lo.bit_length() - 1, 0),
        "certified": n.certified,
    }


# -- builtin zoo ------------------------------------------------------------------


def zoo_operators():
    rot = np.array([[1.0, 1.0], [-1.0, 1.0]])
    return {
        "zero": ops.Zero(2),
        "linear-sym": ops.LinearPSD(np.array([[2.0, 0.5], [0.5, 1.0]])),
        "linear-skew": ops.LinearPSD(rot),
        "linear-singular": ops.LinearPSD(np.array([[1.0, 0.0], [0.0, 0.0]])),
        "quadratic": ops.Quadratic(np.array([[2.0, 0.0], [0.0, 0.5]]), [0.3, -0.2]),
        "box": ops.NormalConeBox([0.0, -1.0], [1.0, 0.5]),
        "ball": ops.NormalConeBall([0.5, 0.5], 0.75),
        "halfspace": ops.NormalConeHalfspace([1.0, 2.0], 0.5),
        "translated": ops.Translated(ops.LinearPSD(rot), [0.25, -0.5]),
    }


def _harmonic():
    return builtin("harmonic", 1)


def convergence_scenarios():
    """Scenarios whose orbit reaches the projection of the anchor at a
    geometric rate: the anchor lies in the solution set (and the resolvents
    contract towards it), or both zero sets cut the anchor's direction off
    at the projection."""
    b = _harmonic()
    s2 = math.sqrt(2.0)
    return [
        Scenario(ops.NormalConeBox([0.0], [1.0]), ops.NormalConeBox([-1.0], [1.0]), [1.5], [0.0], b, name="r1-box-clip"),
        Scenario(ops.Quadratic([[1.0]], [0.3]), ops.NormalConeBox([0.0], [1.0]), [0.3], [1.0], b, name="r1-quadratic-box"),
        Scenario(
            ops.NormalConeBall([0.0, 0.0], 1.0),
            ops.NormalConeHalfspace([1.0, 1.0], s2),
            [2.0, 2.0],
            [0.0, 0.0],
            b,
            name="r2-ball-halfspace",
        ),
        Scenario(
            ops.Quadratic(np.diag([2.0, 0.0]), [0.2, 0.0]),
            ops.Quadratic(np.diag([0.0, 1.0]), [0.0, -0.4]),
            [0.2, -0.4],
            [1.0, 1.0],
            b,
            name="r2-quadratics",
        ),
        Scenario(
            ops.LinearPSD(np.array([[1.0, 1.0], [-1.0, 1.0]])),
            ops.NormalConeBox([-1.0, -1.0], [1.0, 1.0]),
            [0.0, 0.0],
            [1.0, -1.0],
            b,
            name="r2-skew-box",
        ),
    ]


def zoo_scenarios():
    """Convergence scenarios plus the plain one-dimensional linear case."""
    b = _harmonic()
    extra = [Scenario(ops.LinearPSD(np.eye(1)), ops.LinearPSD(np.eye(1)), [1.0], [1.0], b, name="r1-linear")]
    return convergence_scenarios() + extra


def default_grid():
    return [0, 1, 2, 3, 4], [("identity", identity()), ("affine(1,10)", affine(1, 10)), ("doubling", doubling())]


def _parallel(jobs, workers=4):
    """Run ``(key, fn)`` jobs in threads; results keep submission order."""
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [(key, pool.submit(fn)) for key, fn in jobs]
        return [(key, fut.result()) for key, fut in futures]


def _domination(suite, name, bound, witness, extra=None):
    verdict = check_domination(bound, witness)
    details = {"bound": nat_record(bound), "n_star": witness.n_star, "checked_upto": witness.checked_upto}
    if extra:
        details.update(extra)
    return Verdict(suite, name, verdict, details)


# -- suites -----------------------------------------------------------------------


def suite_operators(samples=1000, seed=0, **_):
    rng = np.random.default_rng(seed)
    out = []
    for name, op in zoo_operators().items():
        worst = {"firm": 0.0, "reflected": 0.0, "identity": 0.0, "scaling": 0.0, "fixed": 0.0, "monotone": 0.0}
        d = op.dim
        q = op.zero_set.sample()
        for _ in range(samples):
            x, y = rng.normal(0, 2, d), rng.normal(0, 2, d)
            g = float(np.exp(rng.uniform(-3, 3)))
            jx, jy = op.resolve(g, x), op.resolve(g, y)
            lhs = float(np.sum((jx - jy) ** 2))
            rhs = float(np.sum((x - y) ** 2) - np.sum(((x - jx) - (y - jy)) ** 2))
            worst["firm"] = min(worst["firm"], rhs - lhs)
            rx, ry = ops.reflected(op, g, x), ops.reflected(op, g, y)
            worst["reflected"] = min(worst["reflected"], float(np.linalg.norm(x - y) - np.linalg.norm(rx - ry)))
            a_, b_ = sorted(np.exp(rng.uniform(-3, 3, 2)))
            worst["identity"] = min(worst["identity"], ops.check_resolvent_identity(op, a_, b_, x).slack)
            worst["identity"] = min(worst["identity"], ops.check_resolvent_identity(op, b_, a_, x).slack)
            worst["scaling"] = min(worst["scaling"], ops.check_resolvent_scaling(op, a_, b_, x).slack)
            worst["fixed"] = min(worst["fixed"], -float(np.linalg.norm(op.resolve(g, q) - q)))
            (p1, v1), (p2, v2) = ops.graph_pair(op, x, g), ops.graph_pair(op, y, g)
            worst["monotone"] = min(worst["monotone"], float((p1 - p2) @ (v1 - v2)))
        for law, slack in worst.items():
            out.append(
                Verdict("operators", "%s/%s" % (name, law), "pass" if slack >= -ops.TOL else "fail", {"min_slack": slack})
            )
    return out


def suite_lemmas(samples=1000, seed=0, **_):
    out = []
    fixtures = []
    for kind in ("lemma212", "rho1", "rho2"):
        for step, length in (("half", 400), ("harmonic", 2000)):
            for spike in (False, True):
                fx = make_xu_fixture(kind, seed=seed + len(fixtures), length=length, step=step, spike=spike)
                fixtures.append((kind, step, fx))
    for kind in ("sigma1", "sigma2"):
        for step, length in (("half", 400), ("harmonic", 2000)):
            for k, n in ((0, 0), (1, 3)):
                fx = make_xu_fixture(kind, seed=seed + len(fixtures), length=length, step=step, k=k, n=n)
                fixtures.append((kind, step, fx))
    for kind, step, fx in fixtures:
        res = check_xu_lemma(kind, fx)
        verdict = res["verdict"]
        if verdict == "invalid-fixture":
            verdict = "fail"
        details = {k: v for k, v in res.items() if k != "verdict"}
        details.update(step=step, seed=fx.seed, length=len(fx.s))
        out.append(Verdict("lemmas", "xu/%s/%s/seed=%d" % (kind, step, fx.seed), verdict, details))

    rng = np.random.default_rng(seed)
    worst, count = 0.0, 0
    zoo = zoo_operators()
    names = sorted(zoo)
    for i in range(samples):
        op = zoo[names[i % len(names)]]
        lam = float(np.exp(rng.uniform(-2, 2)))
        a, b = manufacture_graph_pair(op, rng.normal(0, 2, op.dim), float(np.exp(rng.uniform(-2, 2))))
        x = rng.normal(0, 2, op.dim)
        rep = check_monotone_inner_bound(op, lam, a, b, x)
        worst = min(worst, rep.slack)
        count += 1
    out.append(Verdict("lemmas", "monotone-inner-bound", "pass" if worst >= -1e-9 else "fail", {"pairs": count, "min_slack": worst}))

    bad = 0
    for _ in range(samples):
        s, m, r = make_mainge_fixture(rng, int(rng.integers(3, 60)))
        if check_mainge(s, m, r)["verdict"] != "pass":
            bad += 1
    out.append(Verdict("lemmas", "last-ascent", "pass" if bad == 0 else "fail", {"sequences": samples, "violations": bad}))
    return out


def _scenario_list(scenarios):
    return zoo_scenarios() if scenarios is None else scenarios


def _meta_bound(sc):
    b = sc.bundle
    b.require("a", "ell", "A", "P")
    return mu_meta4(b.a, b.ell, b.A, b.P, sc.N, b.R)


def suite_metastability(scenarios=None, k_grid=None, f_grid=None, cap=100_000, steps=10_000, strong=None, **_):
    """``strong`` names the scenarios held to the strong-convergence check
    (default: those of :func:`convergence_scenarios`)."""
    if strong is None:
        strong = {sc.name for sc in convergence_scenarios()}
    dk, df = default_grid()
    k_grid = dk if k_grid is None else k_grid
    f_grid = df if f_grid is None else f_grid
    out = []
    for sc in _scenario_list(scenarios):
        traj = Trajectory(sc, "MAR*")
        ref = sc.projection_ref
        if ref is not None and sc.name in strong:
            dist = float(np.linalg.norm(traj[steps] - ref))
            out.append(
                Verdict(
                    "metastability",
                    "%s/strong-convergence" % sc.name,
                    "pass" if dist <= 1e-6 else "fail",
                    {"n": steps, "distance": dist},
                )
            )
        mu4 = _meta_bound(sc)
        b = sc.bundle
        eta = empirical_functional(residual_sequence(traj, b.R, "both"), tag="eta-empirical")
        etap = empirical_functional(step_sequence(traj), tag="eta-prime-empirical")
        mt = mu_tilde(eta, sc.N, b.R, b.A, b.t)
        m3 = mu_meta3(eta, etap, sc.N, b.R, b.A, b.t)
        jobs = []
        for k in k_grid:
            for fname, f in f_grid:
                snap = traj.snapshot()

                def job(snap=snap, k=k, f=f):
                    w_all = find_meta_witness(WitnessQuery(snap, k, f, cap))
                    w_even = find_meta_witness(WitnessQuery(snap, k, f, cap, scale=2.0, subsequence="even"))
                    return w_all, w_even

                jobs.append(((k, fname, f), job))
        for (k, fname, f), (w_all, w_even) in _parallel(jobs):
            tag = "%s/k=%d/f=%s" % (sc.name, k, fname)
            out.append(_domination("metastability", tag + "/mu4", mu4(k, f), w_all))
            out.append(_domination("metastability", tag + "/mu-tilde", mt(k, f), w_even))
            out.append(_domination("metastability", tag + "/mu3", m3(k, f), w_all))
    return out


def suite_regularity(scenarios=None, k_grid=None, f_grid=None, cap=100_000, **_):
    dk, df = default_grid()
    k_grid = dk if k_grid is None else k_grid
    f_grid = df if f_grid is None else f_grid
    out = []
    for sc in _scenario_list(scenarios):
        traj = Trajectory(sc, "MAR*")
        b = sc.bundle
        mu4 = _meta_bound(sc)
        th = vartheta(mu4, mu4.tower.M0)
        res = residual_sequence(traj, b.R, "both")
        steps = step_sequence(traj)
        fam = None
        if b.r_beta is not None and b.r_mu is not None:
            hook = empirical_hook(traj)
            fam = EtaFamily(b.a, b.ell, b.r_beta, b.r_mu, sc.N, chi=hook)
        for k in k_grid:
            for fname, f in f_grid:
                tag = "%s/k=%d/f=%s" % (sc.name, k, fname)
                w = find_quasi_witness(res, k, f, cap)
                out.append(_domination("regularity", tag + "/vartheta", th(k, f), w))
                if fam is not None:
                    out.append(_domination("regularity", tag + "/eta", fam.stage("eta")(k, f), w))
                    ws = find_quasi_witness(steps, k, f, cap)
                    out.append(_domination("regularity", tag + "/eta2", fam.stage("eta2")(k, f), ws))
    return out


def error_scenarios():
    """Pairs (scenario with halving errors, divergence variant)."""
    out = []
    for sc in convergence_scenarios()[:3] + [zoo_scenarios()[-1]]:
        d = sc.dim
        errs = halving_errors(np.ones(d), -np.ones(d) if d > 1 else np.ones(d))
        out.append((sc.with_(errors=errs, name=sc.name + "+err"), "product-Aprime"))
    sc = zoo_scenarios()[-1]
    half = builtin("constant(1/2)")
    errs = halving_errors([1.0])
    out.append((sc.with_(bundle=half, errors=errs, name="r1-linear-half+err"), "divergence-A"))
    return out


def suite_errors(k_grid=None, f_grid=None, cap=100_000, horizon=1000, scenarios=None, **_):
    dk, df = default_grid()
    f_grid = df if f_grid is None else f_grid
    k_rate = range(7)
    out = []
    pairs = error_scenarios() if scenarios is None else [(s, "product-Aprime") for s in scenarios]
    for sc, variant in pairs:
        b, e = sc.bundle, sc.errors
        modulus = b.Aprime if variant == "product-Aprime" else b.A
        rho = rho_error(variant, modulus, e.E, e.Eprime, e.M)
        x = Trajectory(sc, "MAR").points(horizon)
        y = Trajectory(sc, "MAR*").points(horizon)
        gap = np.linalg.norm(np.asarray(x) - np.asarray(y), axis=1)
        checked, bad = [], []
        for k in k_rate:
            r = rho(k)
            if r.is_top or r.value > horizon:
                continue
            checked.append((k, r.value))
            over = np.nonzero(gap[r.value :] > 1.0 / (k + 1))[0]
            if len(over):
                bad.append({"k": k, "n": r.value + int(over[0])})
        verdict = "fail" if bad else ("pass" if checked else "inconclusive")
        out.append(Verdict("errors", "%s/rho-%s" % (sc.name, variant), verdict, {"checked": checked, "failures": bad}))
        if variant != "product-Aprime" or b.P is None:
            continue
        combined = meta_with_errors(_meta_bound(sc), rho)
        xt = Trajectory(sc, "MAR")
        for k in dk if k_grid is None else k_grid:
            for fname, f in f_grid:
                w = find_meta_witness(WitnessQuery(xt, k, f, cap))
                out.append(_domination("errors", "%s/k=%d/f=%s/combined" % (sc.name, k, fname), combined(k, f), w))
    return out


def suite_transfer(scenarios=None, k_grid=None, f_grid=None, cap=100_000, horizon=1000, **_):
    dk, df = default_grid()
    k_grid = dk if k_grid is None else k_grid
    f_grid = df if f_grid is None else f_grid
    out = []
    for sc in _scenario_list(scenarios):
        y = Trajectory(sc, "MAR*")
        y.extend(horizon + 2)
        z = translate_mar_to_halpern(y)
        defect = identity_residuals(y, z, horizon)
        out.append(Verdict("transfer", "%s/identity-mar-halpern" % sc.name, "pass" if defect <= 1e-12 else "fail", {"max_defect": defect}))
        # dual generation: an independent Halpern orbit from z0 with the same parameters
        fresh = Trajectory(z.scenario, "HPPA2*").points(horizon)
        dual = float(np.max(np.linalg.norm(np.asarray(fresh) - np.asarray(z.points(horizon)), axis=1)))
        out.append(Verdict("transfer", "%s/dual-generation" % sc.name, "pass" if dual <= 1e-12 else "fail", {"max_gap": dual}))
        y2 = translate_halpern_to_mar(z)
        defect2 = identity_residuals(z, y2, horizon)
        out.append(Verdict("transfer", "%s/identity-halpern-mar" % sc.name, "pass" if defect2 <= 1e-12 else "fail", {"max_defect": defect2}))

        b, zb = sc.bundle, z.scenario.bundle
        rho = _meta_bound(sc)
        gamma, rho_t = halpern_transfer("mar->halpern", b.a, b.ell, sc.N, rho)
        gamma2, rho_tt = halpern_transfer("halpern->mar", zb.a, zb.ell, z.scenario.N, rho_t)
        Y, Z, Y2 = (np.asarray(t.points(horizon + 1)) for t in (y, z, y2))
        gap1 = np.linalg.norm(Y - Z, axis=1)
        gap2 = np.linalg.norm(Z[1:] - Y2[:-1], axis=1)
        for label, g, gap in (("gamma-mar-halpern", gamma, gap1), ("gamma-halpern-mar", gamma2, gap2)):
            checked, bad = [], []
            for k in range(7):
                r = g(k)
                if r.is_top or r.value > horizon:
                    continue
                checked.append((k, r.value))
                if np.any(gap[r.value : horizon + 1] > 1.0 / (k + 1)):
                    bad.append(k)
            verdict = "fail" if bad else ("pass" if checked else "inconclusive")
            out.append(Verdict("transfer", "%s/%s" % (sc.name, label), verdict, {"checked": checked, "failures": bad}))
        for k in k_grid:
            for fname, f in f_grid:
                tag = "%s/k=%d/f=%s" % (sc.name, k, fname)
                wy = find_meta_witness(WitnessQuery(y, k, f, cap))
                wz = find_meta_witness(WitnessQuery(z, k, f, cap))
                wy2 = find_meta_witness(WitnessQuery(y2, k, f, cap))
                base = check_domination(rho(k, f), wy)
                v = _domination("transfer", tag + "/rho-tilde", rho_t(k, f), wz, {"source_verdict": base})
                out.append(v)
                out.append(_domination("transfer", tag + "/rho-tilde-back", rho_tt(k, f), wy2))
    return out


_RUNNERS = {
    "operators": suite_operators,
    "lemmas": suite_lemmas,
    "metastability": suite_metastability,
    "regularity": suite_regularity,
    "errors": suite_errors,
    "transfer": suite_transfer,
}


def run_suite(name, seed=0, **kwargs):
    if name not in _RUNNERS:
        raise ValueError("unknown suite %r (choose from %s)" % (name, ", ".join(SUITES)))
    t0 = time.perf_counter()
    verdicts = _RUNNERS[name](seed=seed, **kwargs)
    return SuiteReport(name, verdicts, seed=seed, seconds=time.perf_counter() - t0)

