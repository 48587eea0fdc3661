"""Acceptance criteria, run at full symbol counts with the default master seed.

Each test prints one ``criterion N: PASS|FAIL`` line (also repeated in the
terminal summary) before asserting.
"""

import math

import numpy as np
import pytest

from pslab.analysis import (
    estimate_mi_from_samples,
    estimate_mse,
    lambda_max_brute_force,
    mse_sps_large_n,
    mse_sps_n1,
    solve_lambda_max,
)
from pslab.channel import ChannelParams, make_constant_trajectory, transmit
from pslab.constellation import Constellation, build_constellation, build_square_qam, sample_symbols
from pslab.harness import make_config, run_experiment
from pslab.phase_recovery import RecoveryConfig, run_recovery, test_phase_grid as make_grid, window_estimate

pytestmark = pytest.mark.slow

LAM64 = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1]
LAM256 = [0.0, 0.005, 0.01, 0.015, 0.02, 0.025, 0.03]


def run(**kw):
    return run_experiment(make_config(**kw)).records()


def square(order):
    return {"family": "square", "order": order}


def pick(records, **where):
    out = [r for r in records if all(r[k] == v for k, v in where.items())]
    assert len(out) == 1, where
    return out[0]


def test_criterion_01_single_symbol_sps_mse(verdict):
    lines, ok = [], True
    for snr_db in (35, 12):
        recs = run(scenario="sps-mse", constellation=square(64), lambdas=LAM64, snr_db=[snr_db], window_n=[1])
        for r in recs:
            z = (r["mse"] - r["analytic_eq8"]) / r["stderr"]
            rel = r["mse"] / r["analytic_eq8"] - 1
            good = abs(rel) <= 0.10 and abs(z) <= 3 if snr_db == 35 else abs(rel) <= 0.25
            ok &= good
            if not good:
                lines.append(f"{snr_db}dB lam={r['lambda']:.2f} rel={rel:+.3f} z={z:+.1f}")
        worst = max(abs(r["mse"] / r["analytic_eq8"] - 1) for r in recs)
        lines.append(f"[{snr_db} dB worst rel {worst:.3f}]")
    verdict("criterion 1 (SPS N=1 vs single-symbol formula)", ok, "; ".join(lines))
    assert ok


def test_criterion_02_long_window_sps_mse(verdict):
    bad, worst, ok = [], 0.0, True
    for order, lams in ((64, LAM64[::2]), (256, LAM256)):
        recs = run(scenario="sps-mse", constellation=square(order), lambdas=lams, snr_db=[12, 22, 30],
                   window_n=[100])
        for r in recs:
            z = (r["mse"] - r["analytic_eq12"]) / r["stderr"]
            worst = max(worst, abs(z))
            if abs(z) > 3:
                ok = False
                bad.append(f"{order}/{r['snr_db']:.0f}dB/lam={r['lambda']} z={z:+.2f}")
    verdict("criterion 2 (SPS N=100 vs 1/(2N SNR))", ok, f"max |z| {worst:.2f}; outside 3 stderr: {bad}")
    assert ok


def test_criterion_03_lambda_max(verdict):
    grid = np.arange(0, 0.2 + 1e-12, 1e-4)
    parts, ok = [], True
    for order in (16, 64, 256):
        c = build_square_qam(order)
        root, brute = solve_lambda_max(c), lambda_max_brute_force(c, grid)
        good = root is not None and abs(root - brute) <= 2e-4 + 1e-12
        ok &= good
        parts.append(f"{order}-QAM root {root:.5f} grid {brute:.4f}")
    qpsk = solve_lambda_max(build_square_qam(4))
    ok &= qpsk is None
    parts.append(f"QPSK {qpsk}")
    verdict("criterion 3 (lambda_max root vs brute-force argmax)", ok, "; ".join(parts))
    assert ok


def test_criterion_04_filtering_gain(verdict):
    recs = run(scenario="bps-mse", constellation=square(64), lambdas=[0.0, 0.05], snr_db=[12], window_n=[30, 100])
    ratio = {lam: pick(recs, **{"lambda": lam, "window_n": 30})["mse"] / pick(recs, **{"lambda": lam, "window_n": 100})["mse"]
             for lam in (0.0, 0.05)}
    uniform_ok = 7 <= ratio[0.0] <= 13
    shaped_ok = ratio[0.05] < 3
    ok = uniform_ok and shaped_ok
    verdict("criterion 4 (BPS MSE(30)/MSE(100))", ok,
            f"uniform {ratio[0.0]:.2f} in [7, 13]: {uniform_ok}; lam=0.05 {ratio[0.05]:.2f} < 3: {shaped_ok}")
    assert ok


def test_criterion_05_bps_worst_case_near_lambda_opt(verdict):
    lams = [round(x, 3) for x in np.arange(0, 0.1201, 0.005)]
    parts, inside = [], {}
    for family, order in (("square", 64), ("cross32", 32)):
        recs = run(scenario="lambda-max-scan", constellation={"family": family, "order": order}, lambdas=lams,
                   snr_db=[12, 14, 16], window_n=[10])
        hits = []
        for r in recs:
            hit = 0.5 * r["lambda_opt"] <= r["lambda_max_sim"] <= 1.5 * r["lambda_opt"]
            hits.append(hit)
            parts.append(f"{r['modulation']} {r['snr_db']:.0f}dB argmax {r['lambda_max_sim']:.3f} "
                         f"opt {r['lambda_opt']:.4f} {'in' if hit else 'out'}")
        inside[order] = hits
    ok = all(inside[64]) and inside[32].count(False) >= 2
    verdict("criterion 5 (BPS N=10 argmax vs lambda_opt)", ok, "; ".join(parts))
    assert ok


def test_criterion_06_awgn_mi_validation(verdict):
    parts, ok = [], True
    for order, snr_db in ((64, 17), (256, 22)):
        recs = run(scenario="validate-awgn", constellation=square(order), lambdas=[0.0, "opt"], snr_db=[snr_db])
        for r in recs:
            d = r["mi_bits"] - r["mi_awgn_ref"]
            ok &= abs(d) <= 0.02
            parts.append(f"{order}/{snr_db}dB lam={r['lambda']:.4f} diff {d:+.4f}")
    verdict("criterion 6 (AWGN sample MI vs quadrature)", ok, "; ".join(parts))
    assert ok


def test_criterion_07_shaped_mi_drop(verdict):
    recs = run(scenario="mi-vs-lambda", constellation=square(64), lambdas=[0.0, "opt"], snr_db=[12],
               window_n=[100, 500])
    u100 = pick(recs, **{"lambda": 0.0, "window_n": 100})
    s100 = [r for r in recs if r["lambda"] != 0.0 and r["window_n"] == 100][0]
    u500 = pick(recs, **{"lambda": 0.0, "window_n": 500})
    drop = u100["mi_bits"] - s100["mi_bits"]
    se = math.hypot(u100["stderr"], s100["stderr"])
    gap = u500["mi_awgn_ref"] - u500["mi_bits"]
    ok = drop >= 3 * se and abs(gap) <= 0.05
    verdict("criterion 7 (MI drop at lambda_opt, N=500 recovery)", ok,
            f"N=100 drop {drop:.3f} bit vs 3 stderr {3 * se:.3f}; N=500 uniform gap to AWGN {gap:.3f}")
    assert ok


def test_criterion_08_moderate_snr_recovery(verdict):
    parts, ok = [], True
    for order, snr_db, lams in ((64, 17, [0.0, 0.01, 0.02, 0.03, 0.04, 0.05, "opt"]),
                                (256, 22, [0.0, 0.005, 0.01, 0.015, "opt"])):
        recs = run(scenario="mi-vs-lambda", constellation=square(order), lambdas=lams, snr_db=[snr_db],
                   window_n=[100])
        for r in recs:
            gap = r["mi_awgn_ref"] - r["mi_bits"]
            good = abs(gap) <= 0.05
            ok &= good
            parts.append(f"{order}/{snr_db}dB lam={r['lambda']:.4f} gap {gap:.3f}{'' if good else ' (>0.05)'}")
    verdict("criterion 8 (N=100 MI within 0.05 bit of AWGN)", ok, "; ".join(parts))
    assert ok


def test_criterion_09_overlong_window(verdict):
    recs = run(scenario="mi-vs-lambda", constellation=square(256), lambdas=[0.0], snr_db=[27], window_n=[30, 500])
    penalty = pick(recs, window_n=30)["mi_bits"] - pick(recs, window_n=500)["mi_bits"]
    ok = penalty >= 0.1
    verdict("criterion 9 (256-QAM 27 dB, N=500 below N=30)", ok, f"penalty {penalty:.3f} bit")
    assert ok


def test_criterion_10_window_sweep(verdict):
    windows = [10, 20, 50, 100, 200, 300, 400, 500]
    recs = run(scenario="mi-vs-window", constellation=square(64), lambdas=[0.0, "opt"], snr_db=[12],
               window_n=windows, linewidth_hz=[200e3, 2e6])

    def curve(shaped, lw):
        rows = [r for r in recs if (r["lambda"] != 0.0) == shaped and r["linewidth_hz"] == lw]
        return {r["window_n"]: r["mi_bits"] for r in rows}

    uni = curve(False, 200e3)
    plateau = max(uni.values())
    on = [n for n in windows if plateau - uni[n] <= 0.05]
    a = all(plateau - uni[n] <= 0.05 for n in windows if n >= 200)
    uni2, sh2 = curve(False, 2e6), curve(True, 2e6)
    b = max(sh2.values()) < max(uni2.values()) - 0.05

    recs22 = run(scenario="mi-vs-window", constellation=square(64), lambdas=[0.0, "opt"], snr_db=[22],
                 window_n=windows, linewidth_hz=[200e3])
    c, parts22 = True, []
    for shaped in (False, True):
        cur = {r["window_n"]: r["mi_bits"] for r in recs22 if (r["lambda"] != 0.0) == shaped}
        gap = max(cur.values()) - cur[20]
        c &= gap <= 0.05
        parts22.append(f"{'shaped' if shaped else 'uniform'} N=20 gap {gap:.3f}")
    ok = a and b and c
    verdict("criterion 10 (window-sweep landmarks)", ok,
            f"12 dB uniform plateau {plateau:.3f}, windows on plateau {on}; "
            f"2 MHz best shaped {max(sh2.values()):.3f} vs uniform {max(uni2.values()):.3f}; "
            f"22 dB {', '.join(parts22)}")
    assert ok


def test_criterion_11_property_suite(verdict):
    checks = {}
    rng = np.random.default_rng(2024)

    checks["prior normalization"] = all(
        abs(build_constellation(f, o, lam).priors.sum() - 1) <= 1e-12
        for f, o in (("square", 16), ("square", 64), ("square", 256), ("cross32", 32))
        for lam in rng.uniform(0, 1, 20)
    )

    c = build_square_qam(64, 0.03)
    s = sample_symbols(c, 20000, 1)
    r = transmit(s, make_constant_trajectory(0.4, s.size), ChannelParams(15), c, 2)
    member = True
    for mode in ("SPS", "BPS"):
        for windowing in ("block", "sliding"):
            res = run_recovery(r, c, RecoveryConfig(mode, 20, 45, windowing), transmitted=s)
            member &= bool(np.isin(res.estimates, make_grid(45)).all())
    checks["grid membership"] = member

    grid = make_grid(90)
    scaled = Constellation(c.points * 4.0, c.priors, c.lam, c.family)
    checks["joint-scaling argmin invariance"] = all(
        window_estimate(r[k:k + 20], c, grid) == window_estimate(4.0 * r[k:k + 20], scaled, grid)
        for k in range(0, 2000, 20)
    )

    sps_le_bps = True
    for lam in (0.0, 0.03, 0.06):
        for snr_db in (12, 16):
            cc = build_square_qam(64, lam)
            ss = sample_symbols(cc, 2**16, 3)
            rr = transmit(ss, make_constant_trajectory(math.pi / 6, ss.size), ChannelParams(snr_db), cc, 4)
            for n in (10, 30):
                e = [estimate_mse(run_recovery(rr, cc, RecoveryConfig(m, n, 300, "block", 0.0),
                                               transmitted=ss).estimates, math.pi / 6).value
                     for m in ("SPS", "BPS")]
                sps_le_bps &= e[0] <= e[1]
    checks["SPS <= BPS on matched seeds"] = sps_le_bps

    qpsk = build_square_qam(4)
    vals = [mse_sps_n1(qpsk.with_lambda(x), 50.0) for x in np.linspace(0, 1, 21)]
    checks["constant-modulus flatness"] = np.allclose(vals, mse_sps_large_n(1, 50.0), rtol=1e-12)

    bounded = True
    for lam in (0.0, 0.05, 0.1):
        cc = build_square_qam(16, lam)
        ss = sample_symbols(cc, 20000, 5)
        for snr_db in (0, 10, 20, 40):
            n0 = cc.signal_power / 10 ** (snr_db / 10)
            yy = ss + math.sqrt(n0 / 2) * (rng.standard_normal(ss.size) + 1j * rng.standard_normal(ss.size))
            idx = np.searchsorted(cc.points.real * 64 + cc.points.imag, ss.real * 64 + ss.imag)
            bounded &= estimate_mi_from_samples(ss, yy, cc).value <= -np.log2(cc.priors[idx]).mean() + 1e-9
    checks["estimate_mi <= H(priors)"] = bounded

    cfg = make_config(scenario="mi-vs-snr", lambdas=["opt"], snr_db=[12, 14, 16, 18], window_n=[50],
                      symbol_count=2**15)
    checks["determinism across thread counts"] = (
        run_experiment(cfg).records() == run_experiment(cfg, threads=4).records() == run_experiment(cfg).records()
    )

    ok = all(checks.values())
    verdict("criterion 11 (property suite)", ok, "; ".join(f"{k}: {'ok' if v else 'FAIL'}" for k, v in checks.items()))
    assert ok
