"""Command-line experiments: identity verification, spectra, coercivity
ensembles, orbital-stability runs, and raw simulation dumps.

Every run writes into --out: a resolved-config copy, schema-tagged CSVs,
a summary.json, and a manifest with wall-clock and pass/fail.  Outputs
other than the manifest are byte-reproducible for a fixed config + seed.
Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .expansion import (bident_pointwise, lambda_expansion_rhs, lambda_gap,
                        b0_density, b2_density, probe_rho, probe_sample,
                        rescale_to_dR, draw_probe_fields, orthogonal_projection)
from .evolution import (SimConfig, conserved_observer, distance_observer,
                        evolve, modulation_observer)
from .functionals import PerturbationTriple, conserved
from .grid import Grid
from .operators import (OperatorKind, apply as op_apply, assemble,
                        coercivity_estimate, duhamel_kernel_k1, kminus_factors,
                        kplus_factors, qform, reconstruct_u, reconstruct_v,
                        spectrum, w_substitution)
from .profiles import SQRT2, black_soliton, dark_soliton, du0_jet, soliton_jet
from .randomfields import random_bump_jet, random_pair, spawn_rngs
from .runio import write_csv, write_json


class ConfigError(ValueError):
    """Bad config file, unknown key, or unparsable value."""


@dataclass(frozen=True)
class ExperimentConfig:
    grid_L: float = 40.0
    grid_N: int = 4001
    R: float = 10.0
    seed: int = 0
    sim_dt: float | None = None
    sim_T: float = 20.0
    sim_cadence: int = 25
    perturbation_kind: str = "bumps"       # none | bumps | ramp | translation | dark
    perturbation_delta: float = 0.01
    perturbation_nu: float = 0.1
    stability_T: float = 50.0
    stability_ladder: tuple = (0.02, 0.01, 0.005)
    spectrum_k: int = 10
    spectrum_sweep_L: tuple = ()
    coercivity_samples: int = 200
    coercivity_dR_min: float = 1e-3
    coercivity_dR_max: float = 1e-1
    coercivity_orthogonality: bool = True
    verify_samples: int = 100
    verify_corrupt_kplus: float = 0.0

    @property
    def grid(self) -> Grid:
        return Grid(self.grid_L, self.grid_N)


def _parse_bool(s: str) -> bool:
    if s.lower() in ("true", "on", "1", "yes"):
        return True
    if s.lower() in ("false", "off", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_floats(s: str) -> tuple:
    return tuple(float(p) for p in s.split(",") if p.strip()) if s.strip() else ()


def _opt_float(s: str):
    return None if not s.strip() else float(s)


# config-file key -> (attribute, parser, formatter)
_KEYS = {
    "grid.L": ("grid_L", float, repr),
    "grid.N": ("grid_N", int, str),
    "R": ("R", float, repr),
    "seed": ("seed", int, str),
    "sim.dt": ("sim_dt", _opt_float, lambda v: "" if v is None else repr(v)),
    "sim.T": ("sim_T", float, repr),
    "sim.cadence": ("sim_cadence", int, str),
    "perturbation.kind": ("perturbation_kind", str, str),
    "perturbation.delta": ("perturbation_delta", float, repr),
    "perturbation.nu": ("perturbation_nu", float, repr),
    "stability.T": ("stability_T", float, repr),
    "stability.ladder": ("stability_ladder", _parse_floats,
                         lambda v: ",".join(repr(x) for x in v)),
    "spectrum.k": ("spectrum_k", int, str),
    "spectrum.sweep_L": ("spectrum_sweep_L", _parse_floats,
                         lambda v: ",".join(repr(x) for x in v)),
    "coercivity.samples": ("coercivity_samples", int, str),
    "coercivity.dR_min": ("coercivity_dR_min", float, repr),
    "coercivity.dR_max": ("coercivity_dR_max", float, repr),
    "coercivity.orthogonality": ("coercivity_orthogonality", _parse_bool,
                                 lambda v: "true" if v else "false"),
    "verify.samples": ("verify_samples", int, str),
    "verify.corrupt_kplus": ("verify_corrupt_kplus", float, repr),
}


def load_config(path) -> ExperimentConfig:
    cfg = ExperimentConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        attr, parse, _ = _KEYS[key]
        try:
            updates[attr] = parse(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return replace(cfg, **updates)


def resolved_config_text(cfg: ExperimentConfig) -> str:
    lines = []
    for key, (attr, _, fmt) in _KEYS.items():
        lines.append(f"{key} = {fmt(getattr(cfg, attr))}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# verify-lemmas
# ----------------------------------------------------------------------


def _check(report: dict, name: str, residual: float, tol: float):
    ok = residual <= tol
    report[name] = {"max_residual": float(residual), "tolerance": tol, "pass": bool(ok)}
    return ok


def cmd_verify_lemmas(cfg: ExperimentConfig, out: Path, quiet: bool) -> bool:
    grid = cfg.grid
    s0 = soliton_jet(grid)
    b = black_soliton(grid)
    report: dict = {}
    rng_fact, rng_kmin, rng_duh, rng_lam, rng_bid, rng_crit = spawn_rngs(cfg.seed, 6)

    # profile ODEs
    r1 = np.max(np.abs(s0.fx - (1.0 - s0.f**2) / SQRT2))
    r2 = np.max(np.abs(s0.fxx + s0.f - s0.f**3))
    _check(report, "profile_ode", max(r1, r2), 1e-13)

    # conserved closed forms at the soliton
    c = conserved(grid, s0.astype(complex))
    oracle = {"E": 4 * SQRT2 / 3, "S": 12 * SQRT2 / 5,
              "Lambda": -4 * SQRT2 / 15, "Q": -2 * SQRT2}
    rc = max(abs(c.E - oracle["E"]) / abs(oracle["E"]),
             abs(c.S - oracle["S"]) / abs(oracle["S"]),
             abs(c.Lam - oracle["Lambda"]) / abs(oracle["Lambda"]),
             abs(c.Q - oracle["Q"]) / abs(oracle["Q"]),
             abs(c.M))
    _check(report, "conserved_closed_forms", rc, 1e-9)

    # kernel directions
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rk = np.max(np.abs(op_apply(grid, OperatorKind.KPLUS, du0_jet(grid))))
        rl = np.max(np.abs(op_apply(grid, OperatorKind.LMINUS, s0)))
        rm = np.max(np.abs(op_apply(grid, OperatorKind.KMINUS, s0)))
    _check(report, "kernel_kplus_du0", rk, 1e-8)
    _check(report, "kernel_lminus_u0", rl, 1e-10)
    _check(report, "kernel_kminus_u0", rm, 1e-8)

    # K+ factorization (the corrupt hook lands here)
    worst = 0.0
    m = s0.f**2
    for _ in range(cfg.verify_samples):
        u = random_bump_jet(grid, rng_fact)
        qf = qform(grid, OperatorKind.KPLUS, u)
        if cfg.verify_corrupt_kplus:
            qf += cfg.verify_corrupt_kplus * grid.integrate(m * u.f**2)
        w, wx = kplus_factors(grid, u)
        rhs = grid.integrate(w * w + wx * wx)
        worst = max(worst, abs(qf - rhs) / (1.0 + abs(qf)))
    _check(report, "kplus_factorization", worst, 1e-8)

    # K- factorization
    worst = 0.0
    for _ in range(cfg.verify_samples):
        v = random_bump_jet(grid, rng_kmin)
        qf = qform(grid, OperatorKind.KMINUS, v)
        p, q = kminus_factors(grid, v)
        rhs = grid.integrate(q * q + p * p)
        worst = max(worst, abs(qf - rhs) / (1.0 + abs(qf)))
    _check(report, "kminus_factorization", worst, 1e-8)

    # Duhamel reconstructions and the projection bound
    du0 = b.du0
    n_du0 = grid.integrate(du0 * du0)
    worst_rt, worst_bound = 0.0, 0.0
    for _ in range(max(10, cfg.verify_samples // 4)):
        u = random_bump_jet(grid, rng_duh)
        w = w_substitution(grid, u)
        u2, A = reconstruct_u(grid, w)
        worst_rt = max(worst_rt, np.max(np.abs(u2 - (u.f - grid.integrate(du0 * u.f)
                                                     / n_du0 * du0))))
        W = u2 - A * du0
        ip = abs(grid.integrate(du0 * W))
        bound = 2.0 ** (-0.25) * np.sqrt(grid.integrate(w * w))
        worst_bound = max(worst_bound, ip / bound if bound > 0 else 0.0)
        v = random_bump_jet(grid, rng_duh)
        p, q = kminus_factors(grid, v)
        v2, _ = reconstruct_v(grid, p, q)
        vperp = v.f - grid.integrate(b.d2u0 * v.f) / grid.integrate(b.d2u0 * b.u0) * b.u0
        worst_rt = max(worst_rt, np.max(np.abs(v2 - vperp)))
    _check(report, "duhamel_roundtrip", worst_rt, 1e-6)
    _check(report, "duhamel_projection_bound", worst_bound, 1.0)
    _check(report, "duhamel_k1", abs(duhamel_kernel_k1(grid) - SQRT2), 1e-6)

    # exact expansion identity
    worst = 0.0
    for _ in range(cfg.verify_samples):
        u, v = random_pair(grid, rng_lam)
        psi = PerturbationTriple.from_uv(grid, u, v).field(grid)
        gap = lambda_gap(grid, psi)
        rhs = lambda_expansion_rhs(grid, u, v)
        worst = max(worst, abs(gap - rhs) / (1.0 + abs(gap)))
    _check(report, "lamexp_identity", worst, 1e-9)

    # pointwise density rearrangement
    worst = 0.0
    for _ in range(cfg.verify_samples):
        u, v = random_pair(grid, rng_bid)
        resid, scale = bident_pointwise(grid, u, v)
        worst = max(worst, resid / scale)
    _check(report, "bident_pointwise", worst, 1e-8)

    # density/quadratic-form consistency
    worst = 0.0
    for _ in range(cfg.verify_samples // 2):
        u, v = random_pair(grid, rng_bid)
        q0 = qform(grid, OperatorKind.KPLUS, u)
        q2 = qform(grid, OperatorKind.KMINUS, v)
        worst = max(worst,
                    abs(grid.integrate(b0_density(grid, u)) - q0) / (1.0 + abs(q0)),
                    abs(grid.integrate(b2_density(grid, v)) - q2) / (1.0 + abs(q2)))
    _check(report, "bdensity_consistency", worst, 1e-10)

    # criticality of Lam at the soliton
    worst = 0.0
    eps = 1e-4
    u0cj = s0.astype(complex)
    for _ in range(20):
        du, dv = random_pair(grid, rng_crit)
        d = du.astype(complex) + 1j * dv
        nrm = np.sqrt(grid.integrate(np.abs(d.f) ** 2 + np.abs(d.fx) ** 2
                                     + np.abs(d.fxx) ** 2))
        lam_p = conserved(grid, u0cj + eps * d).Lam
        lam_m = conserved(grid, u0cj + (-eps) * d).Lam
        worst = max(worst, abs(lam_p - lam_m) / (2 * eps) / nrm)
    _check(report, "lambda_criticality", worst, 1e-6)

    ok = all(entry["pass"] for entry in report.values())
    write_json(out / "verify_report.json", report)
    if not quiet:
        for name, entry in report.items():
            print(f"{'PASS' if entry['pass'] else 'FAIL'}  {name}: "
                  f"max residual {entry['max_residual']:.3e} (tol {entry['tolerance']:.0e})")
    return ok


# ----------------------------------------------------------------------
# spectrum
# ----------------------------------------------------------------------


def _spectrum_files(grid: Grid, k: int, tag: str, out: Path) -> dict:
    results = {}
    for kind, label in ((OperatorKind.KPLUS, "kplus"), (OperatorKind.KMINUS, "kminus")):
        rep = spectrum(assemble(grid, kind), k=k)
        rows = [(i, rep.eigenvalues[i], rep.residuals[i], rep.boundary_mass[i],
                 bool(rep.spurious[i])) for i in range(len(rep.eigenvalues))]
        write_csv(out / f"spectrum_{label}{tag}.csv", "blacksoliton.spectrum.v1",
                  ["index", "eigenvalue", "residual", "boundary_mass", "spurious"], rows)
        vec_cols = ["x"] + [f"v{i}" for i in range(len(rep.eigenvalues))]
        vec_rows = [(grid.x[j], *(rep.vectors[j, i] for i in range(len(rep.eigenvalues))))
                    for j in range(grid.N)]
        write_csv(out / f"eigvecs_{label}{tag}.csv", "blacksoliton.eigvecs.v1",
                  vec_cols, vec_rows)
        results[label] = rep
    return results


def cmd_spectrum(cfg: ExperimentConfig, out: Path, quiet: bool) -> bool:
    grid = cfg.grid
    h = grid.h
    results = _spectrum_files(grid, cfg.spectrum_k, "", out)
    summary: dict = {}

    kp = results["kplus"]
    lam0, vec0 = kp.lowest_clean()
    lam0 = float(lam0)
    du0 = black_soliton(grid).du0
    corr = abs(float(np.dot(vec0, du0))) / float(np.linalg.norm(vec0)
                                                 * np.linalg.norm(du0))
    km = results["kminus"]
    lam0m = float(km.lowest_clean()[0])
    summary["kplus_lowest"] = lam0
    summary["kplus_du0_correlation"] = corr
    summary["kplus_second"] = float(np.sort(kp.eigenvalues[~kp.spurious])[1])
    summary["kminus_lowest"] = lam0m

    summary["C_plus"] = float(coercivity_estimate(grid, OperatorKind.KPLUS,
                                                  du0, norm="H2"))
    summary["C_minus"] = float(coercivity_estimate(grid, OperatorKind.KMINUS,
                                                   black_soliton(grid).d2u0,
                                                   norm="weak"))

    for L in cfg.spectrum_sweep_L:
        n = int(round(2 * L / h)) + 1
        if n % 2 == 0:
            n += 1
        gL = Grid(L, n)
        tag = f"_L{L:g}"
        res = _spectrum_files(gL, cfg.spectrum_k, tag, out)
        summary[f"kplus_second_L{L:g}"] = float(
            np.sort(res["kplus"].eigenvalues[~res["kplus"].spurious])[1])
        summary[f"kplus_lowest_L{L:g}"] = float(res["kplus"].lowest_clean()[0])
        summary[f"kminus_lowest_L{L:g}"] = float(res["kminus"].lowest_clean()[0])

    checks = {
        "kplus_lowest_near_zero": bool(abs(lam0) <= 5e-5),
        "kplus_vector_matches_du0": bool(corr >= 0.9999),
        "kminus_lowest_in_band": bool(-5e-4 <= lam0m <= 5e-3),
        "rayleigh_minima_positive": bool(summary["C_plus"] > 0
                                         and summary["C_minus"] > 0),
    }
    summary["checks"] = checks
    write_json(out / "summary.json", summary)
    if not quiet:
        for name, ok in checks.items():
            print(f"{'PASS' if ok else 'FAIL'}  {name}")
        print(f"K+ lowest {lam0:.3e} (corr {corr:.6f}), K- lowest {lam0m:.3e}, "
              f"C+ {summary['C_plus']:.4f}, C- {summary['C_minus']:.6f}")
    return all(checks.values())


# ----------------------------------------------------------------------
# coercivity ensemble
# ----------------------------------------------------------------------


def cmd_coercivity(cfg: ExperimentConfig, out: Path, quiet: bool) -> bool:
    grid = cfg.grid
    n = cfg.coercivity_samples
    rngs = spawn_rngs(cfg.seed, n)
    rows, ratios, dRs = [], [], []
    for i, rng in enumerate(rngs):
        if cfg.coercivity_orthogonality:
            kind = "ramp" if rng.uniform() < 0.2 else "bumps"
        else:
            kind = "translation"
        target = float(np.exp(rng.uniform(np.log(cfg.coercivity_dR_min),
                                          np.log(cfg.coercivity_dR_max))))
        record, triple = probe_sample(grid, rng, target, cfg.R, kind=kind,
                                      enforce_orthogonality=cfg.coercivity_orthogonality)
        rho_val = probe_rho(grid, triple, cfg.R)
        rows.append((i, cfg.seed, record.dR, rho_val, record.gap, record.ratio))
        if record.ratio is not None:
            ratios.append(record.ratio)
            dRs.append(record.dR)
    write_csv(out / "probes.csv", "blacksoliton.coercivity.v1",
              ["sample_id", "seed", "dR", "rho", "gap", "ratio"], rows)

    ratios = np.array(ratios)
    dRs = np.array(dRs)
    summary = {
        "samples": n,
        "orthogonality": cfg.coercivity_orthogonality,
        "c_lower": float(ratios.min()),
        "C_upper": float(ratios.max()),
    }
    # quadratic-regime stability: interval per amplitude decade
    edges = np.geomspace(cfg.coercivity_dR_min, cfg.coercivity_dR_max, 3)
    for j in range(2):
        mask = (dRs >= edges[j]) & (dRs <= edges[j + 1])
        if np.any(mask):
            summary[f"c_decade{j}"] = float(ratios[mask].min())
            summary[f"C_decade{j}"] = float(ratios[mask].max())
    checks = {"min_ratio_positive": bool(ratios.min() > 0)} \
        if cfg.coercivity_orthogonality else \
        {"control_ran": True}
    summary["checks"] = checks
    write_json(out / "summary.json", summary)
    if not quiet:
        print(f"ratios in [{ratios.min():.4f}, {ratios.max():.4f}] over {n} samples")
    return all(checks.values())


# ----------------------------------------------------------------------
# stability experiment
# ----------------------------------------------------------------------


def _run_one_delta(cfg: ExperimentConfig, delta: float, fields, out: Path,
                   label: str) -> dict:
    grid = cfg.grid
    _, _, triple = rescale_to_dR(grid, fields[0], fields[1], delta, cfg.R)
    phi0 = triple.field(grid).f
    sim = SimConfig(L=cfg.grid_L, N=cfg.grid_N, dt=cfg.sim_dt,
                    T=cfg.stability_T, cadence=cfg.sim_cadence)
    traj = evolve(phi0, sim, observers=[conserved_observer(grid),
                                        distance_observer(grid, cfg.R),
                                        modulation_observer(grid, cfg.R)])
    write_csv(out / f"modulation_{label}.csv", "blacksoliton.modulation.v1",
              ["t", "xi", "theta", "xidot", "thetadot", "dR_modulated"],
              [(t, r["xi"], r["theta"], r["xidot"], r["thetadot"], r["dR_mod"])
               for t, r in zip(traj.stamps, traj.records)])
    write_csv(out / f"control_{label}.csv", "blacksoliton.distance.v1",
              ["t", "dR_raw"],
              [(t, r["dR_raw"]) for t, r in zip(traj.stamps, traj.records)])
    write_csv(out / f"conserved_{label}.csv", "blacksoliton.conserved.v1",
              ["t", "Q", "M", "E", "S", "Lambda"],
              [(t, r["Q"], r["M"], r["E"], r["S"], r["Lambda"])
               for t, r in zip(traj.stamps, traj.records)])
    dmod = traj.series("dR_mod")
    rates = np.abs(traj.series("xidot")) + np.abs(traj.series("thetadot"))
    return {
        "delta": delta,
        "stability_factor": float(dmod.max() / delta),
        "rate_constant": float(rates.max() / delta),
        "dR_final": float(dmod[-1]),
    }


def cmd_stability(cfg: ExperimentConfig, out: Path, quiet: bool) -> bool:
    grid = cfg.grid
    ladder = cfg.stability_ladder or (cfg.perturbation_delta,)
    # one drawn direction for every rung: the ladder isolates amplitude
    rng = spawn_rngs(cfg.seed, 1)[0]
    u, v = draw_probe_fields(grid, rng, cfg.perturbation_kind)
    fields = orthogonal_projection(grid, u, v)
    runs = []
    for delta in ladder:
        label = f"d{delta!r}"
        runs.append(_run_one_delta(cfg, delta, fields, out, label))
        if not quiet:
            r = runs[-1]
            print(f"delta {delta}: stability factor {r['stability_factor']:.3f}, "
                  f"rate constant {r['rate_constant']:.3f}")
    factors = [r["stability_factor"] for r in runs]
    checks = {"factors_at_most_10": all(f <= 10.0 for f in factors)}
    summary = {"ladder": list(ladder), "runs": runs, "checks": checks}
    write_json(out / "summary.json", summary)
    return all(checks.values())


# ----------------------------------------------------------------------
# raw simulate
# ----------------------------------------------------------------------


def _initial_field(cfg: ExperimentConfig, grid: Grid) -> np.ndarray:
    kind = cfg.perturbation_kind
    if kind == "none":
        return black_soliton(grid).u0.astype(complex)
    if kind == "dark":
        return dark_soliton(grid, cfg.perturbation_nu)
    rng = spawn_rngs(cfg.seed, 1)[0]
    u, v = draw_probe_fields(grid, rng, kind)
    u, v = orthogonal_projection(grid, u, v)
    _, _, triple = rescale_to_dR(grid, u, v, cfg.perturbation_delta, cfg.R)
    return triple.field(grid).f


def cmd_simulate(cfg: ExperimentConfig, out: Path, quiet: bool) -> bool:
    grid = cfg.grid
    phi0 = _initial_field(cfg, grid)
    sim = SimConfig(L=cfg.grid_L, N=cfg.grid_N, dt=cfg.sim_dt,
                    T=cfg.sim_T, cadence=cfg.sim_cadence)
    traj = evolve(phi0, sim, observers=[conserved_observer(grid),
                                        distance_observer(grid, cfg.R),
                                        modulation_observer(grid, cfg.R)])
    write_csv(out / "conserved.csv", "blacksoliton.conserved.v1",
              ["t", "Q", "M", "E", "S", "Lambda"],
              [(t, r["Q"], r["M"], r["E"], r["S"], r["Lambda"])
               for t, r in zip(traj.stamps, traj.records)])
    write_csv(out / "modulation.csv", "blacksoliton.modulation.v1",
              ["t", "xi", "theta", "xidot", "thetadot", "dR_modulated"],
              [(t, r["xi"], r["theta"], r["xidot"], r["thetadot"], r["dR_mod"])
               for t, r in zip(traj.stamps, traj.records)])
    write_csv(out / "distance.csv", "blacksoliton.distance.v1",
              ["t", "dR_raw"],
              [(t, r["dR_raw"]) for t, r in zip(traj.stamps, traj.records)])
    for t, snap in zip(traj.stamps, traj.snapshots):
        k = int(round(t / sim.dt_effective))
        write_csv(out / "snapshots" / f"snap_{k:06d}.csv",
                  "blacksoliton.snapshot.v1", ["x", "re", "im"],
                  [(grid.x[j], snap[j].real, snap[j].imag) for j in range(grid.N)])
    xi = traj.series("xi")
    stamps = np.array(traj.stamps)
    summary = {
        "T": cfg.sim_T,
        "kind": cfg.perturbation_kind,
        "drift_E": _rel_drift(traj, "E"),
        "drift_S": _rel_drift(traj, "S"),
        "drift_Q": _rel_drift(traj, "Q"),
        "drift_Lambda": float(np.max(np.abs(traj.series("Lambda")
                                            - traj.records[0]["Lambda"]))
                              / (1.0 + abs(traj.records[0]["Lambda"]))),
        "xi_slope": float(np.polyfit(stamps, xi, 1)[0]) if len(stamps) > 2 else 0.0,
        "sup_dev_from_initial": float(max(np.max(np.abs(s - traj.snapshots[0]))
                                          for s in traj.snapshots)),
    }
    write_json(out / "summary.json", summary)
    if not quiet:
        print(f"drifts: E {summary['drift_E']:.2e}, S {summary['drift_S']:.2e}, "
              f"Q {summary['drift_Q']:.2e}; xi slope {summary['xi_slope']:.4f}")
    return True


def _rel_drift(traj, key: str) -> float:
    series = traj.series(key)
    return float(np.max(np.abs(series - series[0])) / max(1e-300, abs(series[0])))


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------


_COMMANDS = {
    "verify-lemmas": cmd_verify_lemmas,
    "spectrum": cmd_spectrum,
    "stability": cmd_stability,
    "coercivity": cmd_coercivity,
    "simulate": cmd_simulate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blacksoliton",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=str, default=f"runs/{name}")
        p.add_argument("--grid.L", dest="grid_L", type=float, default=None)
        p.add_argument("--grid.N", dest="grid_N", type=int, default=None)
        p.add_argument("--R", dest="R", type=float, default=None)
        p.add_argument("--quiet", action="store_true")
        if name == "coercivity":
            p.add_argument("--no-orthogonality", action="store_true")
        if name == "spectrum":
            p.add_argument("--sweep-L", dest="sweep_L", type=str, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        overrides = {}
        for attr in ("seed", "grid_L", "grid_N", "R"):
            if getattr(args, attr, None) is not None:
                overrides[attr] = getattr(args, attr)
        if getattr(args, "no_orthogonality", False):
            overrides["coercivity_orthogonality"] = False
        if getattr(args, "sweep_L", None) is not None:
            overrides["spectrum_sweep_L"] = _parse_floats(args.sweep_L)
        cfg = replace(cfg, **overrides)
        cfg.grid                   # validates grid parameters
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved").write_text(resolved_config_text(cfg))
    start = time.monotonic()
    ok = _COMMANDS[args.command](cfg, out, args.quiet)
    write_json(out / "manifest.json", {
        "command": args.command,
        "wall_clock_s": time.monotonic() - start,
        "pass": bool(ok),
    })
    if not args.quiet:
        print(f"{'PASS' if ok else 'FAIL'}  {args.command} -> {out}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
