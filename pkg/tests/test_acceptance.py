"""Acceptance checks, one per criterion, at the stated tolerances.

Each check prints a single PASS/FAIL line (collected again in the pytest
terminal summary). Run directly with ``python3 tests/test_acceptance.py``
for the lines alone.
"""
import contextlib
import io
import json
import math
import sys
import tempfile
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from oracles import pair_accel, pauli_expectation  # noqa: E402
from spinanalog import cli, fields, foucault  # noqa: E402
from spinanalog import dynamics as D  # noqa: E402
from spinanalog import mapping as M  # noqa: E402
from spinanalog import observables as O  # noqa: E402
from spinanalog.quaternion import Quat, Spinor  # noqa: E402

W0 = 10.0
DT = 1e-3
R2 = 1 / math.sqrt(2)
RESULTS = []


def _report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:>2} {title}: {detail}"
    RESULTS.append(line)
    print(line)


def _random_profile(rng, k: int) -> fields.FieldProfile:
    """Profiles with |beta| <= 1 on [0, 50]; k cycles through the kinds."""
    kind = k % 5
    if kind == 0:
        b = rng.normal(size=3)
        return fields.constant(b / np.linalg.norm(b) * rng.uniform(0.1, 1.0))
    if kind == 1:
        return fields.rotating(rng.normal(size=3), rng.uniform(0.05, 0.5), rng.uniform(-2, 2),
                               rng.uniform(0, 2 * math.pi), rng.uniform(-0.5, 0.5))
    if kind == 2:
        return fields.sinusoidal(rng.uniform(-0.3, 0.3, 3), rng.uniform(-0.25, 0.25, 3),
                                 rng.uniform(0.2, 3.0), rng.uniform(0, 2 * math.pi))
    if kind == 3:
        return fields.linear_ramp(rng.uniform(-0.3, 0.3, 3), rng.uniform(-0.01, 0.01, 3))
    jumps = np.sort(rng.choice(np.arange(1, 50), 3, replace=False)).astype(float)
    return fields.piecewise_constant(jumps, rng.uniform(-0.5, 0.5, (4, 3)))


def _pair(profile, s0, u, t1=50.0, dt=DT):
    sp = D.integrate(D.SpinorSystem(profile, W0), s0, 0.0, t1, dt)
    st0 = M.spinor_to_oscillator_init(s0, u, profile.sample(0.0).beta, W0)
    osc = D.integrate(D.OscillatorSystem(profile, W0), st0, 0.0, t1, dt)
    return sp, osc


def criterion_1():
    rng = np.random.default_rng(101)
    worst, kinds = 0.0, set()
    for k in range(20):
        prof = _random_profile(rng, k)
        kinds.add(prof.kind)
        s0, u = M.random_spinor(rng), M.random_unit_quat(rng)
        sp, osc = _pair(prof, s0, u)
        worst = max(worst, float(np.max(np.abs(M.extract_spinor_path(osc.x, u) - sp.chi))))
    ok = worst < 1e-6 and len(kinds) == 5
    _report(1, "equivalence theorem", ok,
            f"20 triples over {sorted(kinds)}, max deviation {worst:.2e} (< 1e-6)")
    return ok


def criterion_2():
    u = Quat(R2, 0, R2, 0)
    s0 = Spinor(R2, R2)
    parts, ok = [], True
    for b in (0.1, 0.5, 1.0):
        prof = fields.constant([0, 0, b])
        st0 = M.spinor_to_oscillator_init(s0, u, [0, 0, b], W0)
        tr = D.integrate(D.OscillatorSystem(prof, W0), st0, 0.0, 50.0, DT)
        est = O.frequency_split(tr, 0)
        tol = est.resolution + 1e-3
        err = np.abs(est.peaks - [W0 - b, W0 + b]) if len(est.peaks) == 2 else np.array([np.inf])
        ok &= bool(np.all(err <= tol))
        parts.append(f"beta={b}: peaks {np.round(est.peaks, 5).tolist()} err {err.max():.1e}")
    _report(2, "Zeeman splitting", ok, "; ".join(parts) + f" (tol {tol:.4f})")
    return ok


def criterion_3():
    rng = np.random.default_rng(303)
    beta = 0.5  # omega0 = 2 N beta with N = 10
    prof = fields.constant([0, 0, beta])
    ph, xv = 0.0, 0.0
    for _ in range(5):
        g = O.geometric_phase_check(prof, M.random_spinor(rng), W0, dt=DT, u=M.random_unit_quat(rng))
        ph = max(ph, g.phase_residual)
        xv = max(xv, g.position_residual, g.velocity_residual)
    ok = ph < 1e-6 and xv < 1e-5
    _report(3, "geometric phase", ok,
            f"spinor sign-flip residual {ph:.1e} (< 1e-6), oscillator x/v residual {xv:.1e} (< 1e-5)")
    return ok


def criterion_4():
    rng = np.random.default_rng(404)
    agree = 0
    for k in range(100):
        beta = rng.uniform(-1, 1, 3)
        if k % 2 == 0:
            st = M.spinor_to_oscillator_init(M.random_spinor(rng), M.random_unit_quat(rng), beta, W0)
        else:
            st = D.OscState(rng.normal(size=4), rng.normal(size=4) * W0)
        c = M.decompose_modes(st, beta, W0)
        l2_zero = abs(D.lagrangian_L2(st, beta, W0)) < 1e-10 * W0**2 * float(st.x @ st.x)
        ad_bc = abs(c.ad_minus_bc()) < 1e-8 * c.weight()
        agree += l2_zero == ad_bc
    drift = 0.0
    for k in range(5):
        prof = _random_profile(rng, k)
        st0 = M.spinor_to_oscillator_init(M.random_spinor(rng), M.random_unit_quat(rng), prof.sample(0).beta, W0)
        tr = D.integrate(D.OscillatorSystem(prof, W0), st0, 0.0, 50.0, DT)
        betas, _ = fields.sample_many(prof, tr.t)
        p = D.momentum_series(tr.x, tr.v, betas)
        L2 = 0.5 * (np.sum(p * p, axis=1) - W0**2 * np.sum(tr.x**2, axis=1))
        drift = max(drift, float(np.max(np.abs(L2))))
    ok = agree == 100 and drift < 1e-8 * W0**2
    _report(4, "constraint equivalence", ok,
            f"predicates agree on {agree}/100 states; max |L2| drift {drift:.1e} (< {1e-8 * W0**2:.0e})")
    return ok


def criterion_5():
    rng = np.random.default_rng(505)
    prof = fields.rotating([0.2, 0.1, 1.0], 0.3, 1.1, static=0.4)
    s0 = M.random_spinor(rng)
    u1, u2 = M.random_unit_quat(rng), M.random_unit_quat(rng)
    _, o1 = _pair(prof, s0, u1)
    _, o2 = _pair(prof, s0, u2)
    sep = float(np.max(np.abs(o1.x - o2.x)))
    gap = float(np.max(np.abs(M.extract_spinor_path(o1.x, u1) - M.extract_spinor_path(o2.x, u2))))
    ok = sep >= 0.1 and gap < 1e-6
    _report(5, "hidden variables", ok,
            f"oscillator separation {sep:.3f} (>= 0.1), extracted spinor gap {gap:.1e} (< 1e-6)")
    return ok


def criterion_6():
    beta = 0.5
    prof = fields.constant([0, 0, beta])
    sp = D.integrate(D.SpinorSystem(prof, W0), Spinor(R2, R2), 0.0, 50.0, DT)
    rate = O.precession_rate(sp, [0, 0, 1])
    r_plus, r_minus = O.eigenphase_rates(sp, [0, 0, 1], W0)
    split = 0.5 * (r_minus - r_plus)
    ok = abs(rate - 2 * beta) / (2 * beta) < 1e-3 and abs(split - beta) / beta < 1e-3
    _report(6, "gyromagnetic doubling", ok,
            f"Bloch precession {rate:.8f} vs 2*beta = {2 * beta}; eigenphase rate {split:.8f} vs beta = {beta}")
    return ok


def criterion_7():
    rng = np.random.default_rng(707)
    worst, flip = 0.0, 0.0
    for _ in range(100):
        beta = rng.uniform(-1, 1, 3)
        s, u = M.random_spinor(rng), M.random_unit_quat(rng)
        st = M.spinor_to_oscillator_init(s, u, beta, W0)
        chi = M.extract_spinor(st, u).as_array()
        for _ in range(10):
            e = rng.normal(size=3)
            e /= np.linalg.norm(e)
            val = O.spin_expectation(st, beta, e, W0)
            worst = max(worst, abs(val - pauli_expectation(chi, e)))
            flip = max(flip, abs(O.spin_expectation(-st, beta, e, W0) - val))
    ok = worst < 1e-10 and flip <= 4 * np.finfo(float).eps
    _report(7, "spin-expectation oracle", ok,
            f"max |oscillator - Pauli| {worst:.1e} (< 1e-10) over 1000 state-axis pairs; sign-flip change {flip:.1e}")
    return ok


def criterion_8():
    rng = np.random.default_rng(808)
    prof = foucault.sinusoidal_coupling(0.3, 0.1, 1.0)
    worst = 0.0
    for t in rng.uniform(0, 20, 200):
        x, v = rng.normal(size=4), rng.normal(size=4)
        acc = D.oscillator_rhs(D.OscState(x, v), t, prof, W0).v
        b, bd = foucault.coupling(prof, t)
        for i, j in ((0, 2), (1, 3)):
            e1, e2 = pair_accel(x[i], x[j], v[i], v[j], b, bd, W0)
            worst = max(worst, abs(acc[i] - e1) / (1 + abs(e1)), abs(acc[j] - e2) / (1 + abs(e2)))
    r_const = foucault.span_rank_check(foucault.constant_coupling(0.3), 5.0)
    r_vary = foucault.span_rank_check(prof, 5.0)
    ok = worst < 1e-14 and r_const == 4 and r_vary == 4
    _report(8, "two-oscillator reduction and span", ok,
            f"max scaled RHS mismatch {worst:.1e}; span rank {r_const} (constant), {r_vary} (time-varying)")
    return ok


def criterion_9():
    beta = np.array([0.0, 0.0, 0.5])
    prof = fields.constant(beta)
    f, g = 0.6, 0.8j
    coeffs = (math.sqrt(2) * f, math.sqrt(2) * g, 0, 0)
    st0 = D.analytic_oscillator(coeffs, beta, W0, 0.0)

    exact = D.analytic_oscillator(coeffs, beta, W0, 10.0).x
    errs = [float(np.max(np.abs(D.integrate(D.OscillatorSystem(prof, W0), st0, 0.0, 10.0, dt).x[-1] - exact)))
            for dt in (2e-3, 1e-3)]
    ratio = errs[0] / errs[1]

    rng = np.random.default_rng(909)
    norm_dev = 0.0
    for k in range(5):
        sp = D.integrate(D.SpinorSystem(_random_profile(rng, k), W0), M.random_spinor(rng), 0.0, 50.0, DT)
        norm_dev = max(norm_dev, float(np.max(np.abs(np.sum(np.abs(sp.chi) ** 2, axis=1) - 1))))

    t1 = 20.0
    osc = D.integrate(D.OscillatorSystem(prof, W0), st0, 0.0, t1, DT)
    ref = D.analytic_oscillator(coeffs, beta, W0, osc.t)
    osc_err = float(np.max(np.abs(osc.x - ref.x)))
    sp = D.integrate(D.SpinorSystem(prof, W0), Spinor(*D.analytic_spinor(f, g, beta, W0, 0.0)), 0.0, t1, DT)
    spe_err = float(np.max(np.abs(sp.chi - D.analytic_spinor(f, g, beta, W0, sp.t))))

    ok_ratio = abs(ratio - 16) <= 3
    ok_norm = norm_dev < 1e-9
    ok_exact = osc_err < 1e-8 and spe_err < 1e-8
    ok = ok_ratio and ok_norm and ok_exact
    _report(9, "numerics", ok,
            f"convergence ratio {ratio:.2f} (16 +/- 3) {'ok' if ok_ratio else 'FAIL'}; "
            f"norm drift {norm_dev:.1e} (< 1e-9) {'ok' if ok_norm else 'FAIL'}; "
            f"closed-form match at t1={t1:g}, dt={DT:g}: oscillator {osc_err:.2e}, spinor {spe_err:.2e} "
            f"(< 1e-8) {'ok' if ok_exact else 'FAIL'}")
    return ok


def criterion_10():
    names = cli.list_scenarios()
    identical, codes = [], {}
    quiet = contextlib.redirect_stdout(io.StringIO())
    with tempfile.TemporaryDirectory() as tmp, quiet, contextlib.redirect_stderr(io.StringIO()):
        tmp = Path(tmp)
        for name in names:
            a = cli.main(["run", name, "--out", str(tmp / "a" / name)])
            b = cli.main(["run", name, "--out", str(tmp / "b" / name)])
            same = all((tmp / "a" / name / f).read_bytes() == (tmp / "b" / name / f).read_bytes()
                       for f in ("trajectory.csv", "observables.csv", "summary.json"))
            identical.append(a == 0 and b == 0 and same)
        bad = dict(cli.scenario_config("zeeman_constant_z"))
        bad["run"]["dt"] = 0.1
        (tmp / "bad.json").write_text(json.dumps(bad))
        codes["config"] = cli.main(["run", str(tmp / "bad.json"), "--out", str(tmp / "x")])
        boom = cli.scenario_config("zeeman_constant_z")
        boom["initial"] = {"oscillator": {"x": [1e308, 1e308, 0, 0], "v": [1e308, 0, 0, 0]}}
        boom["outputs"]["observables"] = []
        (tmp / "boom.json").write_text(json.dumps(boom))
        codes["integration"] = cli.main(["run", str(tmp / "boom.json"), "--out", str(tmp / "y")])
        codes["io"] = cli.main(["run", str(tmp / "missing.json")])
    ok = all(identical) and len(names) == 6 and codes == {"config": 2, "integration": 3, "io": 4}
    _report(10, "CLI", ok,
            f"{sum(identical)}/{len(names)} bundled scenarios byte-identical on rerun; exit codes {codes}")
    return ok


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def test_criterion_01_equivalence():
    assert criterion_1()


def test_criterion_02_zeeman():
    assert criterion_2()


def test_criterion_03_geometric_phase():
    assert criterion_3()


def test_criterion_04_constraint():
    assert criterion_4()


def test_criterion_05_hidden_variables():
    assert criterion_5()


def test_criterion_06_doubling():
    assert criterion_6()


def test_criterion_07_spin_oracle():
    assert criterion_7()


def test_criterion_08_reduction_span():
    assert criterion_8()


def test_criterion_09_numerics():
    assert criterion_9()


def test_criterion_10_cli():
    assert criterion_10()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
