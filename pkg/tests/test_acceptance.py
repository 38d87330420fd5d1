"""Acceptance battery: the headline guarantees, one test and one line each.

Everything runs at the default laboratory scale (L = 40, h = 0.02) with
fixed seeds.  Tolerances here are contractual: relaxing one means the
laboratory no longer demonstrates what it claims to demonstrate.
"""

import json

import numpy as np
import pytest
from support import perturbed_soliton

from blacksoliton.evolution import (SimConfig, Stepper, conserved_observer,
                                    distance_observer, evolve,
                                    modulation_observer)
from blacksoliton.expansion import (b0_density, b2_density, bident_flux_term,
                                    bident_residual, draw_probe_fields,
                                    lambda_expansion_rhs, lambda_gap,
                                    orthogonal_projection, probe_sample,
                                    rescale_to_dR)
from blacksoliton.functionals import PerturbationTriple, conserved
from blacksoliton.grid import Grid
from blacksoliton.modulation import f_jacobian, solve_modulation
from blacksoliton.operators import (OperatorKind, assemble,
                                    coercivity_estimate, duhamel_kernel_k1,
                                    kminus_factors, kplus_factors, qform,
                                    reconstruct_u, spectrum, w_substitution)
from blacksoliton.profiles import (SQRT2, black_soliton, dark_soliton,
                                   translated_soliton)
from blacksoliton.randomfields import random_bump_jet, random_pair, spawn_rngs

E0 = 4 * SQRT2 / 3
S0 = 12 * SQRT2 / 5
LAM0 = -4 * SQRT2 / 15
Q0 = -2 * SQRT2


def _line(name: str, ok: bool, detail: str):
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_a01_profile_equations(grid, s0):
    r1 = np.max(np.abs(SQRT2 * s0.fx - (1.0 - s0.f ** 2)))
    r2 = np.max(np.abs(s0.fxx + s0.f - s0.f ** 3))
    worst = max(r1, r2)
    _line("profile equations", worst <= 1e-13,
          f"max residual {worst:.2e} (tol 1e-13)")


def test_a02_conserved_closed_forms(grid, s0):
    c = conserved(grid, s0.astype(complex))
    worst = max(abs(c.E - E0) / abs(E0), abs(c.S - S0) / abs(S0),
                abs(c.Lam - LAM0) / abs(LAM0), abs(c.Q - Q0) / abs(Q0),
                abs(c.M))
    _line("conserved closed forms", worst <= 1e-9,
          f"max rel error {worst:.2e} (tol 1e-9)")


def test_a03_criticality(grid, s0):
    rng = spawn_rngs(0, 1)[0]
    eps = 1e-4
    u0j = s0.astype(complex)
    worst = 0.0
    for _ in range(20):
        du, dv = random_pair(grid, rng)
        d = du.astype(complex) + 1j * dv
        nrm = np.sqrt(grid.integrate(np.abs(d.f) ** 2 + np.abs(d.fx) ** 2
                                     + np.abs(d.fxx) ** 2))
        lam_p = conserved(grid, u0j + eps * d).Lam
        lam_m = conserved(grid, u0j + (-eps) * d).Lam
        worst = max(worst, abs(lam_p - lam_m) / (2 * eps) / nrm)
    _line("criticality of Lambda", worst <= 1e-6,
          f"max |directional derivative|/norm {worst:.2e} over 20 "
          "directions (tol 1e-6)")


def test_a04_factorization_identities(grid):
    rng_u, rng_v = spawn_rngs(1, 2)
    worst = 0.0
    for _ in range(100):
        u = random_bump_jet(grid, rng_u)
        qf = qform(grid, OperatorKind.KPLUS, u)
        w, wx = kplus_factors(grid, u)
        worst = max(worst, abs(qf - grid.integrate(w * w + wx * wx))
                    / (1.0 + abs(qf)))
        v = random_bump_jet(grid, rng_v)
        qf = qform(grid, OperatorKind.KMINUS, v)
        p, q = kminus_factors(grid, v)
        worst = max(worst, abs(qf - grid.integrate(q * q + p * p))
                    / (1.0 + abs(qf)))
    _line("factorization identities", worst <= 1e-8,
          f"max rel defect {worst:.2e} over 100+100 samples (tol 1e-8)")


def test_a05_nonnegativity_and_ground_modes(grid, bundle):
    rng_u, rng_v = spawn_rngs(2, 2)
    qmin = np.inf
    for _ in range(100):
        qmin = min(qmin,
                   qform(grid, OperatorKind.KPLUS, random_bump_jet(grid, rng_u)),
                   qform(grid, OperatorKind.KMINUS, random_bump_jet(grid, rng_v)))
    kp = spectrum(assemble(grid, OperatorKind.KPLUS), k=6)
    lam0, vec0 = kp.lowest_clean()
    corr = abs(float(np.dot(vec0, bundle.du0))) / float(
        np.linalg.norm(vec0) * np.linalg.norm(bundle.du0))
    km = spectrum(assemble(grid, OperatorKind.KMINUS), k=6)
    lam0m = float(km.lowest_clean()[0])
    ok = (qmin >= -1e-9 and abs(lam0) <= 5e-5 and corr >= 0.9999
          and lam0m >= -5e-4)
    _line("nonnegativity and ground modes", ok,
          f"min qform {qmin:.2e}, K+ lowest {lam0:.2e} (corr {corr:.6f}), "
          f"K- lowest {lam0m:.2e}")


def test_a06_reconstruction_constants(grid, coarse_grid, bundle):
    rng = spawn_rngs(3, 1)[0]
    du0, n_du0 = bundle.du0, grid.integrate(bundle.du0 ** 2)
    worst = 0.0
    for _ in range(50):
        u = random_bump_jet(grid, rng)
        w = w_substitution(grid, u)
        u2, A = reconstruct_u(grid, w)
        W = u2 - A * du0
        bound = 2.0 ** (-0.25) * np.sqrt(grid.integrate(w * w))
        if bound > 0:
            worst = max(worst, abs(grid.integrate(du0 * W)) / bound)
    k1_err = abs(duhamel_kernel_k1(grid) - SQRT2)
    cs = {}
    for g, label in ((grid, "fine"), (coarse_grid, "coarse")):
        bb = black_soliton(g)
        cs[label] = (coercivity_estimate(g, OperatorKind.KPLUS, bb.du0,
                                         norm="H2"),
                     coercivity_estimate(g, OperatorKind.KMINUS, bb.d2u0,
                                         norm="weak"))
    drift = max(abs(cs["fine"][i] - cs["coarse"][i]) / cs["fine"][i]
                for i in range(2))
    ok = (worst <= 1.0 and k1_err <= 1e-6
          and all(c > 0 for c in cs["fine"] + cs["coarse"]) and drift <= 0.05)
    _line("reconstruction constants", ok,
          f"projection ratio max {worst:.4f} (bound 1), |K1 - sqrt2| "
          f"{k1_err:.2e}, C+ {cs['fine'][0]:.4f}, C- {cs['fine'][1]:.4f}, "
          f"resolution drift {drift:.2%}")


def test_a07_expansion_identities(grid):
    rng = spawn_rngs(4, 1)[0]
    worst_id = 0.0
    for _ in range(100):
        u, v = random_pair(grid, rng)
        psi = PerturbationTriple.from_uv(grid, u, v).field(grid)
        gap = lambda_gap(grid, psi)
        worst_id = max(worst_id, abs(gap - lambda_expansion_rhs(grid, u, v))
                       / (1.0 + abs(gap)))
    u, v = random_pair(grid, rng)
    amps = np.geomspace(1e-3, 1e-1, 7)
    vals = [abs(bident_residual(grid, a * u, a * v, 10.0)
                - bident_flux_term(grid, a * u, 10.0)) for a in amps]
    slope = float(np.polyfit(np.log(amps), np.log(vals), 1)[0])
    worst_d = 0.0
    for _ in range(50):
        u, v = random_pair(grid, rng)
        q0 = qform(grid, OperatorKind.KPLUS, u)
        q2 = qform(grid, OperatorKind.KMINUS, v)
        worst_d = max(worst_d,
                      abs(grid.integrate(b0_density(grid, u)) - q0)
                      / (1.0 + abs(q0)),
                      abs(grid.integrate(b2_density(grid, v)) - q2)
                      / (1.0 + abs(q2)))
    ok = worst_id <= 1e-9 and abs(slope - 3.0) <= 0.2 and worst_d <= 1e-10
    _line("expansion identities", ok,
          f"identity defect {worst_id:.2e} (tol 1e-9), cubic slope "
          f"{slope:.3f} (3 +- 0.2), density defect {worst_d:.2e} (tol 1e-10)")


def test_a08_coercivity_sandwich(grid):
    ratios = []
    for rng in spawn_rngs(5, 200):
        kind = "ramp" if rng.uniform() < 0.2 else "bumps"
        target = float(np.exp(rng.uniform(np.log(1e-3), np.log(1e-1))))
        record, _ = probe_sample(grid, rng, target, 10.0, kind=kind)
        if record.ratio is not None:
            ratios.append(record.ratio)
    ratios = np.array(ratios)
    c, C = float(ratios.min()), float(ratios.max())
    controls = []
    for rng in spawn_rngs(6, 30):
        target = float(np.exp(rng.uniform(np.log(1e-3), np.log(1e-1))))
        record, _ = probe_sample(grid, rng, target, 10.0, kind="translation",
                                 enforce_orthogonality=False)
        if record.ratio is not None:
            controls.append(record.ratio)
    collapse = float(np.max(np.abs(controls)))
    ok = len(ratios) == 200 and c > 0 and collapse <= 0.05 * c
    _line("coercivity sandwich", ok,
          f"{len(ratios)} ratios in [{c:.4f}, {C:.4f}], translation "
          f"control max {collapse:.2e} (<= 5% of c)")


def test_a09_modulation_solver(grid, u0c):
    worst_rec = 0.0
    for xi0, th0 in ((0.0, 0.0), (1.3, -0.7), (-2.0, 0.4), (0.5, 3.0),
                     (-1.5, 2.9)):
        psi = np.exp(-1j * th0) * translated_soliton(grid, xi0, order=0)[0]
        st = solve_modulation(grid, psi)
        worst_rec = max(worst_rec, abs(st.xi - xi0), abs(st.theta - th0))

    J = f_jacobian(grid, u0c, 0.0, 0.0)
    n2 = 2 * SQRT2 / 3
    jac_err = max(abs(J[0, 0] - n2), abs(J[1, 1] + n2),
                  abs(J[0, 1]), abs(J[1, 0]))

    # rate formula against finite differences along a real trajectory
    phi0 = perturbed_soliton(grid, 7, 0.01)
    cfg = SimConfig(L=40.0, N=4001, dt=0.0025, T=10.0, cadence=20)
    traj = evolve(phi0, cfg, observers=(modulation_observer(grid, 10.0),))
    H = traj.stamps[1] - traj.stamps[0]

    def fd_check(series, rates):
        fd = (series[:-4] - 8 * series[1:-3] + 8 * series[3:-1]
              - series[4:]) / (12 * H)
        pred = rates[2:-2]
        keep = np.abs(fd) > 0.2 * np.max(np.abs(fd))
        return float(np.max(np.abs(pred[keep] - fd[keep])
                            / np.abs(fd[keep])))

    xi_err = fd_check(traj.series("xi"), traj.series("xidot"))
    th_err = fd_check(np.unwrap(traj.series("theta")), traj.series("thetadot"))
    ok = worst_rec <= 1e-8 and jac_err <= 1e-6 and max(xi_err, th_err) <= 0.02
    _line("modulation solver", ok,
          f"recovery {worst_rec:.2e} (tol 1e-8), Jacobian defect "
          f"{jac_err:.2e} (tol 1e-6), rate-vs-FD rel {xi_err:.2%}/"
          f"{th_err:.2%} (tol 2%)")


def test_a10_dynamics(grid, u0c):
    cfg = SimConfig(L=40.0, N=4001, dt=1e-3, T=20.0, cadence=2500)
    traj = evolve(u0c, cfg, observers=(conserved_observer(grid),))
    sup = max(np.max(np.abs(s - u0c)) for s in traj.snapshots)
    drift = 0.0
    for key in ("E", "S", "Q"):
        series = traj.series(key)
        drift = max(drift, np.max(np.abs(series - series[0])) / abs(series[0]))
    lam = traj.series("Lambda")
    drift = max(drift, np.max(np.abs(lam - lam[0])) / (1.0 + abs(lam[0])))

    phi0 = perturbed_soliton(grid, 4, 0.01)
    fwd, bwd = Stepper(grid, 0.02, phi0), Stepper(grid, -0.02, phi0)
    phi = phi0.copy()
    for _ in range(500):
        phi = fwd.step(phi)
    for _ in range(500):
        phi = bwd.step(phi)
    rev = np.max(np.abs(phi - phi0))

    dark = dark_soliton(grid, 0.1)
    dcfg = SimConfig(L=40.0, N=4001, dt=0.02, T=20.0, cadence=50)
    dtraj = evolve(dark, dcfg, observers=(modulation_observer(grid, 10.0),))
    speed = abs(float(np.polyfit(dtraj.stamps, dtraj.series("xi"), 1)[0]))
    ok = (sup <= 1e-6 and drift <= 1e-6 and rev <= 1e-6
          and abs(speed - 0.1) <= 0.002)
    _line("dynamics", ok,
          f"stationary sup {sup:.2e}, conserved drift {drift:.2e}, "
          f"reversal {rev:.2e} (tols 1e-6), dark speed {speed:.6f} "
          "(0.1 +- 2%)")


def test_a11_orbital_stability(grid):
    rng = spawn_rngs(0, 1)[0]
    u, v = draw_probe_fields(grid, rng, "bumps")
    u, v = orthogonal_projection(grid, u, v)
    ladder = (0.02, 0.01, 0.005)
    factors, rates = [], []
    for delta in ladder:
        _, _, triple = rescale_to_dR(grid, u, v, delta, 10.0)
        cfg = SimConfig(L=40.0, N=4001, dt=0.02, T=50.0, cadence=25)
        traj = evolve(triple.field(grid).f, cfg,
                      observers=(distance_observer(grid, 10.0),
                                 modulation_observer(grid, 10.0)))
        dmod = traj.series("dR_mod")
        assert np.all(dmod <= 10 * delta), \
            f"delta {delta}: max d_R {dmod.max():.4f} above 10 delta"
        factors.append(float(dmod.max() / delta))
        rates.append(float(np.max(np.abs(traj.series("xidot"))
                                  + np.abs(traj.series("thetadot"))) / delta))
    slope = float(np.polyfit(np.log(ladder), np.log(factors), 1)[0])
    ok = all(f <= 10.0 for f in factors) and abs(slope) <= 0.5 \
        and all(np.isfinite(r) for r in rates)
    _line("orbital stability", ok,
          "stability factors " + "/".join(f"{f:.3f}" for f in factors)
          + f" (delta ladder {ladder}), trend slope {slope:+.3f}, "
          + "rate constants " + "/".join(f"{r:.3f}" for r in rates))


def test_a12_reproducibility(tmp_path):
    from blacksoliton.cli import main
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("grid.L = 20.0\ngrid.N = 2001\nseed = 9\n"
                       "sim.T = 0.5\nsim.cadence = 5\n"
                       "perturbation.delta = 0.01\n")
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["simulate", "--config", str(cfgfile), "--out", str(out),
                     "--quiet"]) == 0
        outs.append(out)
    a, b = outs
    names = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    diff = [str(rel) for rel in names
            if rel.name != "manifest.json"
            and (a / rel).read_bytes() != (b / rel).read_bytes()]
    _line("reproducibility", not diff,
          f"{len(names)} output files byte-compared"
          + (f", differing: {diff}" if diff else ", all identical"))


def test_a13_plot_tool(tmp_path):
    plots = pytest.importorskip("solitonplots")
    from blacksoliton.cli import main as lab_main
    from solitonplots.cli import main as plot_main

    stab = tmp_path / "stab"
    cfgfile = tmp_path / "stab.cfg"
    cfgfile.write_text("grid.L = 20.0\ngrid.N = 2001\nstability.T = 5.0\n"
                       "stability.ladder = 0.02\nsim.cadence = 25\n")
    assert lab_main(["stability", "--config", str(cfgfile), "--out",
                     str(stab), "--quiet"]) == 0
    spec = tmp_path / "spec"
    speccfg = tmp_path / "spec.cfg"
    speccfg.write_text("spectrum.k = 6\n")
    assert lab_main(["spectrum", "--config", str(speccfg), "--out",
                     str(spec), "--quiet"]) == 0
    coer = tmp_path / "coer"
    coercfg = tmp_path / "coer.cfg"
    coercfg.write_text("grid.L = 20.0\ngrid.N = 2001\n"
                       "coercivity.samples = 8\n")
    assert lab_main(["coercivity", "--config", str(coercfg), "--out",
                     str(coer), "--quiet"]) == 0

    sources = {"distance": stab, "modulation": stab, "spectrum": spec,
               "coercivity": coer}
    renders = {}
    for attempt in ("one", "two"):
        figs = tmp_path / f"figs_{attempt}"
        for kind, src in sources.items():
            rc = plot_main(["--kind", kind, "--in", str(src),
                            "--out", str(figs)])
            assert rc == 0, f"{kind} render failed"
            for ext in ("png", "svg"):
                f = figs / f"{kind}.{ext}"
                assert f.exists(), f"{kind}.{ext} missing"
        renders[attempt] = figs
    diff = [f"{kind}.{ext}"
            for kind in sources for ext in ("png", "svg")
            if (renders["one"] / f"{kind}.{ext}").read_bytes()
            != (renders["two"] / f"{kind}.{ext}").read_bytes()]

    rejected = plot_main(["--kind", "spectrum", "--in", str(stab),
                          "--out", str(tmp_path / "bad")])
    ok = not diff and rejected == 2
    _line("plot tool", ok,
          "4 kinds rendered twice, "
          + ("byte-identical" if not diff else f"differing: {diff}")
          + f", mismatched input exit code {rejected} (want 2)")
