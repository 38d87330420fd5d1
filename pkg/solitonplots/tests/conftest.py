"""Synthetic run directories built by hand, so the tests prove the tool
works from the file contract alone."""

import json
import math

import pytest
from synth import write_csv


@pytest.fixture()
def stability_dir(tmp_path):
    run = tmp_path / "stab"
    run.mkdir()
    stamps = [0.1 * k for k in range(21)]
    for delta in (0.02, 0.01):
        label = f"d{delta!r}"
        write_csv(run / f"modulation_{label}.csv", "blacksoliton.modulation.v1",
                  ["t", "xi", "theta", "xidot", "thetadot", "dR_modulated"],
                  [(t, 0.01 * t, 0.02 * t, 0.01, 0.02,
                    delta * (2.0 + math.sin(3 * t))) for t in stamps])
        write_csv(run / f"control_{label}.csv", "blacksoliton.distance.v1",
                  ["t", "dR_raw"],
                  [(t, delta * (2.5 + math.sin(3 * t))) for t in stamps])
    (run / "summary.json").write_text(json.dumps(
        {"ladder": [0.02, 0.01], "runs": [], "checks": {}}))
    return run


@pytest.fixture()
def spectrum_dir(tmp_path):
    run = tmp_path / "spec"
    run.mkdir()
    cols = ["index", "eigenvalue", "residual", "boundary_mass", "spurious"]
    write_csv(run / "spectrum_kplus.csv", "blacksoliton.spectrum.v1", cols,
              [(0, -2e-8, 1e-9, 1e-12, "false"),
               (1, 1.637, 2e-9, 1e-11, "false"),
               (2, 1.92, 5e-9, 0.4, "true")])
    write_csv(run / "spectrum_kminus.csv", "blacksoliton.spectrum.v1", cols,
              [(0, 0.0017, 1e-9, 1e-12, "false"),
               (1, 0.0066, 2e-9, 1e-12, "false")])
    return run


@pytest.fixture()
def coercivity_dir(tmp_path):
    run = tmp_path / "coer"
    run.mkdir()
    rows = []
    for i in range(12):
        d = 10 ** (-3 + 0.2 * i)
        rows.append((i, 0, d, 0.5 * d * d, 0.2 * d * d, 0.2))
    write_csv(run / "probes.csv", "blacksoliton.coercivity.v1",
              ["sample_id", "seed", "dR", "rho", "gap", "ratio"], rows)
    (run / "summary.json").write_text(json.dumps(
        {"c_lower": 0.1, "C_upper": 0.4}))
    return run
