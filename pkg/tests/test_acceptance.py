"""Acceptance gate: ten end-to-end criteria, one verdict line each.

Each criterion exercises the public API at its stated tolerance and time
budget and reports ACCEPTANCE n: PASS/FAIL in the terminal summary.  The
checks are deliberately independent of the unit-test suites: closed forms
are re-derived inline, solvers are cross-validated against each other.
"""

import json
import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

import phonlaser.analytics as an
import phonlaser.hilbert as hb
import phonlaser.observables as ob
import phonlaser.solvers as sv
from phonlaser.cli import main
from phonlaser.model import LindbladModel, build_model

GOLDEN = Path(__file__).parent / "golden"


@contextmanager
def criterion(log, number, text):
    start = time.perf_counter()
    try:
        yield
    except Exception as exc:
        reason = str(exc).splitlines()[0][:120] if str(exc) else type(exc).__name__
        log.append(f"ACCEPTANCE {number:2d}: FAIL - {text} [{reason}]")
        raise
    else:
        elapsed = time.perf_counter() - start
        log.append(f"ACCEPTANCE {number:2d}: PASS - {text} ({elapsed:.2f}s)")


def test_criterion_01_limit_cycle_identities(acceptance_log):
    with criterion(acceptance_log, 1, "closed-form identities hold over 1000 random draws"):
        rng = np.random.default_rng(20260817)
        t0 = time.perf_counter()
        for _ in range(1000):
            kappa = rng.uniform(0.5, 2.0)
            g0 = kappa * 10 ** rng.uniform(-2, 0.2)
            gamma0 = kappa * 10 ** rng.uniform(-5, -1)
            nbar0 = rng.uniform(0.0, 2.0)
            R = 10 ** rng.uniform(0.005, 4)
            E = math.sqrt(R * kappa**3 * gamma0 / (16 * g0**2))
            p = an.SystemParams(g0=g0, kappa=kappa, gamma0=gamma0, E=E, nbar0=nbar0)
            sol = an.limit_cycle(p)
            assert not isinstance(sol, an.BelowThreshold)
            # saturated gain balances the intrinsic loss
            assert abs(an.optical_gain(p, sol.zeta0) + p.gamma) <= 1e-10 * p.gamma
            # the optical channel diffuses like a half-quantum bath
            assert abs(an.optical_diffusion(p, sol.zeta0) - p.gamma / 2) <= 1e-10 * p.gamma
            # relaxation rate assembles from loss plus optical back-action
            assert abs(sol.Gamma - (p.gamma + sol.Gamma_opt)) <= 1e-10 * sol.Gamma
            n_ph = (kappa * p.gamma / (4 * g0**2)) * math.sqrt(R)
            assert abs(sol.n_ph - n_ph) <= 1e-10 * n_ph
            # linewidth/diffusion, closed-form Fano, and g2 routes agree
            fano_direct = 2.0 * sol.D / sol.Gamma
            assert abs(sol.fano - fano_direct) <= 1e-10 * fano_direct
            fano_closed = 0.5 * (1 + nbar0) / (1 - 1 / math.sqrt(R))
            assert abs(sol.fano - fano_closed) <= 1e-10 * fano_closed
            g2_from_fano = 1.0 + (sol.fano - 1.0) / sol.mean_n
            assert abs(sol.g2 - g2_from_fano) <= 1e-10 * max(1.0, abs(g2_from_fano))
            scaled = 4 * (g0 / kappa) ** 2 * (sol.fano - 1.0) / (math.sqrt(R) - 1.0)
            assert abs((sol.g2 - 1.0) - scaled) <= 1e-10 * max(1.0, abs(scaled))
        assert time.perf_counter() - t0 < 1.0


def test_criterion_02_poissonian_contour(acceptance_log):
    with criterion(acceptance_log, 2, "F = g2 = 1 on the nbar = 1 - 2/sqrt(R) contour"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(7)
        for R in np.geomspace(4.05, 1e6, 200):
            nbar = 1.0 - 2.0 / math.sqrt(R)
            kappa = rng.uniform(0.5, 2.0)
            g0 = 0.3 * kappa
            gamma0 = 1e-3 * kappa
            E = math.sqrt(R * kappa**3 * gamma0 / (16 * g0**2))
            p = an.SystemParams(g0=g0, kappa=kappa, gamma0=gamma0, E=E, nbar0=nbar)
            sol = an.limit_cycle(p)
            assert abs(sol.fano - 1.0) <= 1e-12
            assert abs(sol.g2 - 1.0) <= 1e-12
        assert time.perf_counter() - t0 < 1.0


def test_criterion_03_antibunching_optimum(acceptance_log):
    with criterion(acceptance_log, 3, "g2(R) grid minimum sits at s* = (3+nbar)/(1-nbar)"):
        t0 = time.perf_counter()
        s_grid = np.geomspace(1.05, 25.0, 20001)
        step = s_grid[1] / s_grid[0]
        for g0k in (0.05, 0.1, 0.5):
            for nbar in (0.0, 0.25, 0.5):
                fano_grid = 0.5 * (1 + nbar) / (1 - 1 / s_grid)
                g2_grid = 1.0 + 4 * g0k**2 * (fano_grid - 1.0) / (s_grid - 1.0)
                i = int(np.argmin(g2_grid))
                s_star = (3.0 + nbar) / (1.0 - nbar)
                assert abs(s_grid[i] - s_star) <= s_star * (step - 1.0)
                opt = an.optimal_operating_point(g0k, nbar)
                g2_star = 1.0 - 0.5 * g0k**2 * (1 - nbar) ** 2 / (1 + nbar)
                assert abs(opt.g2 - g2_star) <= 1e-8
                assert abs(g2_grid[i] - g2_star) <= 1e-8
                assert abs(opt.gain_ratio - s_star**2) <= 1e-8 * s_star**2
        assert time.perf_counter() - t0 < 10.0


def test_criterion_04_case_study(acceptance_log):
    with criterion(acceptance_log, 4, "case study: nbar = 0.431, g2 - 1 = -1.13e-3 "
                                      "(a previously reported -2.5e-3 is not reproduced)"):
        t0 = time.perf_counter()
        nbar = an.thermal_occupation(2 * math.pi * 5e9, 0.2)
        assert abs(nbar - 0.431) <= 1e-3
        opt = an.optimal_operating_point(0.1, nbar)
        assert abs((opt.g2 - 1.0) - (-1.13e-3)) <= 1e-5
        # the closed-form optimum is 1.13 per mille below Poissonian, not 2.5
        assert abs(opt.g2 - 1.0) < 2.0e-3
        assert time.perf_counter() - t0 < 1.0


def test_criterion_05_classical_dynamics(acceptance_log):
    with criterion(acceptance_log, 5, "mean-field flow: decay below threshold, "
                                      "limit cycle above"):
        t0 = time.perf_counter()
        kappa, gamma0, g0 = 1.0, 0.005, 0.5  # kappa/gamma = 200
        for R, check in ((0.5, "decay"), (2.0, "cycle")):
            E = math.sqrt(R * kappa**3 * gamma0 / (16 * g0**2))
            p = an.SystemParams(g0=g0, kappa=kappa, gamma0=gamma0, E=E)
            traj = an.classical_evolve(p, t_end=9000.0, zeta0=0.5)
            final = abs(traj.zeta[-1])
            if check == "decay":
                assert final < 1e-3
            else:
                zeta_star = (kappa / (2 * g0)) * math.sqrt(math.sqrt(R) - 1.0)
                assert abs(final - zeta_star) <= 0.01 * zeta_star
        assert time.perf_counter() - t0 < 30.0


def test_criterion_06_steady_state_oracles(acceptance_log):
    with criterion(acceptance_log, 6, "steady state reproduces thermal and "
                                      "driven-cavity closed forms"):
        t0 = time.perf_counter()
        # undriven system: mechanical mode thermalizes to the bath
        p = an.SystemParams(g0=0.4, kappa=1.0, gamma0=0.1, E=0.0, nbar0=0.5)
        res = sv.steady_state(build_model(p, hb.ModeDims(2, 2, 30)))
        st = ob.phonon_stats(res.state)
        assert abs(st.mean_n - 0.5) <= 1e-6
        assert abs(st.g2 - 2.0) <= 1e-3
        # decoupled drive: mode b settles into a coherent state at 2E/kappa
        kappa, E = 1.0, 0.35
        dims = hb.ModeDims(1, 12, 1)
        b = hb.destroy(dims, "b")
        model = LindbladModel(
            dims=dims, hamiltonian=1j * E * (b.dag() - b), collapse=((b, kappa),)
        )
        res = sv.steady_state(model)
        n_b = (b.dag() @ b).expect(res.state).real
        assert abs(n_b - (2 * E / kappa) ** 2) <= 1e-6
        assert time.perf_counter() - t0 < 60.0


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_criterion_07_quantum_fano_vs_theory(acceptance_log):
    with criterion(acceptance_log, 7, "exact Fano factor within 15% of the closed form "
                                      "for R in [2, 20] at g0/kappa = 0.25"):
        g0, kappa = 0.25, 1.0
        E = 0.04 * kappa**2 / g0
        grid = {2.0: 16, 3.0: 18, 5.0: 22, 10.0: 28, 20.0: 36}
        rows = []
        for R, n_c in grid.items():
            gamma = 16 * (g0 * E) ** 2 / (kappa**3 * R)
            p = an.SystemParams(g0=g0, kappa=kappa, gamma0=gamma, E=E)
            res = sv.steady_state(build_model(p, hb.ModeDims(3, 3, n_c)), max_dim=400)
            st = ob.phonon_stats(res.state)
            f_th = an.fano(p)
            rows.append((R, st.fano, f_th, (st.fano - f_th) / f_th))
        table = "\n".join(
            f"  R={R:5.1f}  F_exact={fe:.4f}  F_closed={ft:.4f}  rel_dev={dv:+.3f}"
            for R, fe, ft, dv in rows
        )
        print(f"\nexact vs closed-form Fano, g0/kappa=0.25, g0 E/kappa^2=0.04:\n{table}")

        # trajectory cross-check at R = 5: the two solvers agree on F
        R, n_c = 5.0, 24
        gamma = 16 * (g0 * E) ** 2 / (kappa**3 * R)
        p = an.SystemParams(g0=g0, kappa=kappa, gamma0=gamma, E=E)
        model = build_model(p, hb.ModeDims(3, 3, n_c), frame="displaced")
        ens = sv.mcwf_ensemble(
            model, config=sv.TrajectoryConfig(n_traj=200, seed=1234)
        )
        f_steady = next(fe for (r, fe, _, _) in rows if r == 5.0)
        assert abs(ens.stats.fano - f_steady) <= 3 * ens.stats.se_fano

        bad = [(R, dv) for (R, _, _, dv) in rows if abs(dv) > 0.15]
        assert not bad, f"closed form off by more than 15% at {bad}"


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_criterion_08_solver_cross_validation(acceptance_log):
    with criterion(acceptance_log, 8, "trajectory ensemble matches the steady state "
                                      "within 3 bootstrap errors"):
        p = an.SystemParams(g0=1.0, kappa=1.0, gamma0=0.005, E=0.07)
        dims = hb.ModeDims(2, 2, 12)
        model = build_model(p, dims)
        res = sv.steady_state(model)
        st = ob.phonon_stats(res.state)
        ens = sv.mcwf_ensemble(
            model, config=sv.TrajectoryConfig(n_traj=500, seed=99)
        )
        assert abs(ens.stats.mean_n - st.mean_n) <= 3 * ens.stats.se_mean_n
        assert abs(ens.stats.fano - st.fano) <= 3 * ens.stats.se_fano


def test_criterion_09_wigner_oracles(acceptance_log):
    with criterion(acceptance_log, 9, "Wigner negativity quotient -2.2408 for Fock |1>, "
                                      "vacuum positive and normalized"):
        t0 = time.perf_counter()
        dims = hb.ModeDims(1, 1, 24)
        xs = np.linspace(-4.5, 4.5, 201)
        one = ob.wigner(hb.basis(dims, (0, 0, 1)), xs, xs)
        assert abs(one.negativity - (-math.exp(1.5) / 2)) <= 0.02
        vac = ob.wigner(hb.vacuum(dims), xs, xs)
        assert vac.values.min() >= -1e-9
        assert abs(vac.integral() - 1.0) <= 1e-3
        assert abs(one.integral() - 1.0) <= 1e-3
        assert time.perf_counter() - t0 < 10.0


def test_criterion_10_negativity_curve(acceptance_log, tmp_path):
    with criterion(acceptance_log, 10, "gamma-optimized steady states show Wigner "
                                       "negativity that deepens with g0/kappa"):
        config = {
            "units": "kappa",
            "params": {"g0": 1.0, "kappa": 1.0, "gamma0": 1e-3, "E": 0.07, "nbar0": 0.25},
            "task": "fig4b",
            "dims": [2, 2, 12],
            "fig4b": {
                "g0_over_kappa": [0.5, 1.0, 1.5],
                "gamma_grid": {"min": 1e-4, "max": 1e-1, "points": 13},
                "wigner_points": 161,
            },
        }
        cfg_path = tmp_path / "fig4b.json"
        cfg_path.write_text(json.dumps(config))
        out = tmp_path / "fig4b.csv"
        code = main(["steady", "--config", str(cfg_path), "--out", str(out),
                     "--max-dim", "400"])
        assert code == 0
        got = np.genfromtxt(out, delimiter=",", names=True)
        assert got["negativity"].min() < 0.0
        # deeper negativity at stronger coupling
        assert list(got["negativity"]) == sorted(got["negativity"], reverse=True)
        # pinned after the first verified run; guards against silent drift
        ref = np.genfromtxt(GOLDEN / "fig4b_curve.csv", delimiter=",", names=True)
        for field in ("g0_over_kappa", "gamma_best", "negativity", "n_c"):
            assert np.allclose(got[field], ref[field], rtol=1e-8), field
