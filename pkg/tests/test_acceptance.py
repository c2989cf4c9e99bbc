"""Exit criteria 1-10.  Each test records one PASS/FAIL line, printed in
the terminal summary."""
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import solve_discrete_lyapunov

import freeze_baselines as fb
from conftest import ACCEPTANCE
from hypercon_lab import (BergmanModel, ContinuousSystem, DiscreteSystem, HankelSymbol,
                          binomial_defect,
                          bridge, cont_obs_gramian, control_admissibility,
                          gamma_defect_series, gamma_defect_superop, gamma_threshold,
                          gamma_verdict, inner, lyapunov_chain, monomial_norms, norm,
                          obs_gramian, reproducing_kernel, rkt_experiment,
                          two_hypercontractive_tests)
from hypercon_lab.adm_discrete import control_constant_direct, lower_bound_constant
from hypercon_lab.cli import KINDS, demo_descriptor, main
from hypercon_lab.generators import (random_dissipative_mixed, random_normal_contraction,
                                     random_stable_diagonalizable, random_strict_contraction)
from hypercon_lab.semigroup import (BORDERLINE_BAND, cont_control_gramian,
                                    mobius_identity_deviation)
from oracles import bergman_weight_quad, stein_residual

pytestmark = pytest.mark.acceptance
BASELINES = json.loads((Path(__file__).parent / "baselines.json").read_text())


def record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    assert ok, detail


def seeded_contraction(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 6
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return rng.uniform(0.3, 1.0) * M / np.linalg.norm(M, 2)


def test_1_dual_path_gamma_defect():
    worst, worst_int = 0.0, 0.0
    for seed in range(100):
        T = seeded_contraction(seed)
        for g in (1.5, 2.0, 2.5, 3.7):
            for r in (0.5, 0.9, 0.99):
                S = gamma_defect_series(T, g, r)
                worst = max(worst, np.max(np.abs(S - gamma_defect_superop(T, g, r))))
                if float(g).is_integer():
                    worst_int = max(worst_int, np.max(np.abs(S - binomial_defect(r * T, int(g)))))
    record(1, worst <= 1e-8 and worst_int <= 1e-10,
           f"series vs superop max {worst:.2e} (<= 1e-8), integer gamma vs binomial "
           f"{worst_int:.2e} (<= 1e-10)")


def test_2_strict_contractions_above_one():
    bad_strict, bad_normal, stars = 0, 0, []
    for seed in range(50):
        T = random_strict_contraction(np.random.default_rng(seed), 2 + seed % 5)
        res = gamma_threshold(T, bracket_tol=1e-3)
        stars.append(res.gamma_star)
        bad_strict += not (res.capped or res.gamma_star > 1)
        N = random_normal_contraction(np.random.default_rng(1000 + seed), 2 + seed % 5)
        bad_normal += not gamma_verdict(N, 8.0).passes
    record(2, bad_strict == 0 and bad_normal == 0,
           f"strict: {bad_strict}/50 failures (min gamma_star {min(stars):.3f}); "
           f"normal at gamma 8: {bad_normal}/50 failures")


def test_3_two_hypercontractive_equivalence():
    eps = np.logspace(-2, 0, 100)
    disagree, border, n_true = 0, 0, 0
    for seed in range(100):
        A = random_dissipative_mixed(np.random.default_rng(seed), 6, eps[seed])
        rep = two_hypercontractive_tests(A)
        if rep.borderline:
            border += 1
            continue
        disagree += not rep.agree
        n_true += rep.verdicts[0]
    record(3, disagree == 0,
           f"{disagree} non-borderline disagreements, {border} borderline "
           f"(|margin| < {BORDERLINE_BAND:g}), {n_true} all-true / "
           f"{100 - border - n_true} all-false")


def test_4_bergman_kernel_exactness():
    N = 400
    rep_err, norm_err = 0.0, 0.0
    rng = np.random.default_rng(4)
    omegas = [0.9 * r * np.exp(2j * np.pi * k / 7) for r in (0, 0.5, 1.0) for k in range(7)]
    for alpha in (0.0, 0.5, 1.0):
        m = BergmanModel(alpha, N, 2)
        c = np.zeros((N, 2), dtype=complex)
        c[:20] = rng.standard_normal((20, 2)) + 1j * rng.standard_normal((20, 2))
        f = m.vector(c)
        y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        y /= np.linalg.norm(y)
        for om in omegas:
            K = reproducing_kernel(m, om, y, normalized=False)
            rep_err = max(rep_err, abs(inner(f, K) - np.vdot(y, f(om))))
            norm_err = max(norm_err, abs(norm(reproducing_kernel(m, om, y)) - 1))
    w_err = max(abs(monomial_norms(a, 21)[n] - bergman_weight_quad(a, n))
                for a in (0.0, 0.5, 1.0) for n in range(21))
    record(4, rep_err <= 1e-10 and norm_err <= 1e-8 and w_err <= 1e-9,
           f"reproducing {rep_err:.2e} (<= 1e-10), kernel norm {norm_err:.2e} (<= 1e-8), "
           f"monomial norms vs quadrature {w_err:.2e} (<= 1e-9)")


def test_5_gramian_oracles():
    stein, chain = 0.0, 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = 2 + seed % 4
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        T = 0.8 * G / np.max(np.abs(np.linalg.eigvals(G)))
        F = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
        Q, _ = obs_gramian(DiscreteSystem(T, F), 0.0)
        ref = solve_discrete_lyapunov(T.conj().T, F.conj().T @ F)
        stein = max(stein, stein_residual(Q, T, F) / max(1, np.linalg.norm(ref)))
        sys_ = ContinuousSystem(random_stable_diagonalizable(rng, n), F)
        for beta in (0, 1, 2):
            Qc, _ = cont_obs_gramian(sys_, beta)
            L = lyapunov_chain(sys_, beta)
            chain = max(chain, np.linalg.norm(Qc - L, 2) / np.linalg.norm(L, 2))
    record(5, stein <= 1e-8 and chain <= 1e-7,
           f"Stein residual {stein:.2e} (<= 1e-8), Lyapunov chain rel {chain:.2e} (<= 1e-7)")


def test_6_duality():
    disc, cont = 0.0, 0.0
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        n = 2 + seed % 4
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        T = 0.7 * G / np.max(np.abs(np.linalg.eigvals(G)))
        E = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
        beta = (-0.5, 0.0, 0.5)[seed % 3]
        sys_ = DiscreteSystem(T, np.ones((1, n)), E)
        d = control_constant_direct(sys_, beta, 300)
        disc = max(disc, abs(d - control_admissibility(sys_, beta, terms=300).constant) / d)
        csys = ContinuousSystem(random_stable_diagonalizable(rng, n), np.ones((1, n)), E)
        c = cont_control_gramian(csys, beta)[1].constant
        o = cont_obs_gramian(csys.dual(), -beta)[1].constant
        cont = max(cont, abs(c - o) / o)
    record(6, disc <= 1e-10 and cont <= 1e-10,
           f"discrete control vs dual observation {disc:.2e}, continuous {cont:.2e} (<= 1e-10)")


def test_7_bridge_identities():
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(200 + seed)
        n = 2 + seed % 5
        A = random_stable_diagonalizable(rng, n)
        C = rng.standard_normal((1 + seed % 2, n)) + 1j * rng.standard_normal((1 + seed % 2, n))
        rep = bridge(ContinuousSystem(A, C), (0.5, 1.0, 1.5, 2.0)[seed % 4])
        assert rep.grid_size == 64
        worst = max(worst, rep.max_deviation)
    rng = np.random.default_rng(7)
    zs = np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
    mob = mobius_identity_deviation(zs)
    record(7, worst <= 1e-9 and mob <= 1e-14,
           f"operator identity {worst:.2e} (<= 1e-9), scalar Moebius {mob:.2e} (<= 1e-14)")


def _close(a, b):
    return all(math.isclose(x, y, rel_tol=1e-6) for x, y in zip(a, b)) and len(a) == len(b)


def test_8_weiss_ratio_boundedness():
    disc, disc_rows = fb.disc_family()
    berg, berg_rows = fb.bergman_family()
    cont = fb.cont_family()
    cont_r = [r.ratios["cont_adm_over_res"] for r in cont]
    frozen = (_close(disc, BASELINES["weiss_disc_diag"])
              and _close(berg, BASELINES["weiss_bergman_adjoint_shift"])
              and _close(cont_r, [r["cont_adm_over_res"] for r in BASELINES["weiss_cont_diag"]]))
    spread = {"disc": max(disc) / min(disc), "bergman": max(berg) / min(berg),
              "cont": max(cont_r) / min(cont_r)}
    bounded = spread["disc"] <= 1.2 and spread["bergman"] <= 1.2 and spread["cont"] <= 3
    c1 = lower_bound_constant(1.0)
    lower = (all(r["resolvent_sup"] <= c1 * r["adm_constant"] * (1 + 1e-9)
                 for r in disc_rows + berg_rows) and all(r.lower_bound_holds for r in cont))
    record(8, frozen and bounded and lower,
           f"matches frozen baseline: {frozen}; spreads disc {spread['disc']:.4f} (<= 1.2), "
           f"bergman {spread['bergman']:.4f} (<= 1.2), continuous {spread['cont']:.4f} (<= 3); "
           f"lower bound holds: {lower}")


def test_9_rkt_drift():
    drifts = []
    for s in fb.RKT_SEEDS:
        ratios = [rkt_experiment(fb.rkt_symbol(s), 0.0, 1.0, M=M).ratio for M in fb.RKT_M]
        assert _close(ratios, BASELINES["rkt_ratios"][str(s)])
        drifts.append(max(ratios) / min(ratios) - 1)
    # degree-6 symbols are captured exactly once M > 6, so also watch a long one
    tail = HankelSymbol((1.0 + np.arange(200)) ** -1.5)
    t = [rkt_experiment(tail, 0.0, 1.0, M=M).ratio for M in fb.RKT_M]
    tail_drift = max(t) / min(t) - 1
    record(9, max(drifts) <= 0.10 and tail_drift <= 0.10,
           f"max drift over M = 16, 32, 64: {max(drifts):.2e} on 10 degree-6 symbols, "
           f"{tail_drift:.2e} on a length-200 symbol (<= 0.10)")


def test_10_cli_determinism(tmp_path):
    seeded = [k for k in KINDS if demo_descriptor(k)["operator_source"]["type"] == "random"]
    mismatched = []
    for kind in seeded:
        d = tmp_path / kind
        d.mkdir()
        (d / "desc.json").write_text(json.dumps(demo_descriptor(kind)))
        outs = []
        for i in range(2):
            o = d / f"run{i}"
            assert main(["run", str(d / "desc.json"), "-o", str(o)]) == 0
            outs.append((d / f"run{i}.csv").read_bytes())
        # one more in a fresh interpreter
        subprocess.run([sys.executable, "-m", "hypercon_lab", "run", str(d / "desc.json"),
                        "-o", str(d / "run2")], check=True, capture_output=True)
        outs.append((d / "run2.csv").read_bytes())
        if len(set(outs)) != 1:
            mismatched.append(kind)
    record(10, not mismatched,
           f"{len(seeded)} seeded demo descriptors ({', '.join(seeded)}), "
           f"byte-identical over 3 runs; mismatches: {mismatched or 'none'}")
