import math
import os

import numpy as np
import pytest

from braidpot import cli
from braidpot.config import ConfigError, load_config, parse_config
from braidpot.dielectric import breakdown

BASE = """
physical.kappa_D = 1.0
physical.omega_xi = 1.0
geometry.R = 3.0
geometry.a = 1.0
geometry.eta = 0.3
truncation.l_max = 4
truncation.np_img = 4
"""


def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_minimal_config_defaults(tmp_path):
    cfg = load_config(write_cfg(tmp_path, BASE))
    assert cfg.sweep_parameter == "eta"
    assert cfg.sweep_values == [0.3]
    assert cfg.approx_level == "small_angle"
    st = cfg.state_at(0.3)
    assert st.dxi1_ds == 1.0  # defaulted from physical.omega_xi


def test_sweep_axis_construction(tmp_path):
    text = BASE + "sweep.parameter = eta\nsweep.min = 0.0\nsweep.max = 1.2\nsweep.count = 25\n"
    cfg = load_config(write_cfg(tmp_path, text))
    assert len(cfg.sweep_values) == 25
    assert cfg.sweep_values[0] == 0.0
    assert cfg.sweep_values[-1] == pytest.approx(1.2)


def test_invalid_configs(tmp_path):
    with pytest.raises(ConfigError, match="non-penetrating"):
        parse_config(BASE.replace("geometry.R = 3.0", "geometry.R = 1.5"))
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(BASE + "geometry.bogus = 1\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(BASE + "geometry.a = 1.0\n")
    with pytest.raises(ConfigError, match="line"):
        parse_config(BASE + "not a key value pair\n")
    with pytest.raises(ConfigError, match="missing required"):
        parse_config("physical.kappa_D = 1.0\n")
    with pytest.raises(ConfigError, match="sweep.parameter"):
        parse_config(BASE + "sweep.parameter = pitch\n")


def test_cli_error_exit_code(tmp_path, capsys):
    bad = write_cfg(tmp_path, BASE.replace("geometry.R = 3.0", "geometry.R = 1.5"))
    assert cli.main(["sweep", bad]) == 2
    assert cli.main(["sweep", str(tmp_path / "missing.cfg")]) == 2


def test_sweep_single_point_matches_library(tmp_path):
    text = BASE + "run.output_dir = " + str(tmp_path / "out") + "\n"
    cfgpath = write_cfg(tmp_path, text)
    assert cli.main(["sweep", cfgpath]) == 0
    cfg = load_config(cfgpath)
    runs = os.listdir(tmp_path / "out")
    csv = (tmp_path / "out" / runs[0] / "results.csv").read_text().splitlines()
    assert csv[0] == cli.CSV_HEADER
    row = csv[1].split(",")
    b = breakdown(cfg.state_at(0.3), cfg.charge, cfg.physical, cfg.truncation,
                  level="small_angle")
    assert float(row[13]) == pytest.approx(b.total, rel=1e-15)
    # 17 significant digits in the formatting
    assert row[2] == format(b.e_dir_0, ".17g")


def test_sweep_determinism(tmp_path):
    text = BASE + ("run.output_dir = " + str(tmp_path / "out") + "\n"
                   + "sweep.parameter = xi_phase\nsweep.min = 0\n"
                   + "sweep.max = 3.14159\nsweep.count = 5\n")
    cfgpath = write_cfg(tmp_path, text)
    assert cli.main(["sweep", cfgpath]) == 0
    runs = os.listdir(tmp_path / "out")
    path = tmp_path / "out" / runs[0] / "results.csv"
    first = path.read_bytes()
    assert cli.main(["sweep", cfgpath]) == 0
    assert path.read_bytes() == first


def test_sweep_phase_periodicity(tmp_path):
    # DNA spectrum: the total over xi_phase is 2 pi periodic and even
    text = (BASE
            + "charge.model = dna\ncharge.theta = 0.7\ncharge.f1 = 0.3\n"
            + "charge.f2 = 0.3\ncharge.phi_s = 1.2566\n"
            + "sweep.parameter = xi_phase\nsweep.min = 0\n"
            + "sweep.max = 6.283185307179586\nsweep.count = 9\n"
            + "run.output_dir = " + str(tmp_path / "out") + "\n")
    cfgpath = write_cfg(tmp_path, text)
    assert cli.main(["sweep", cfgpath]) == 0
    runs = os.listdir(tmp_path / "out")
    rows = (tmp_path / "out" / runs[0] / "results.csv").read_text().splitlines()[1:]
    totals = [float(r.split(",")[13]) for r in rows]
    assert totals[0] == pytest.approx(totals[-1], rel=1e-12)      # 2 pi period
    for i in (1, 2, 3):
        assert totals[i] == pytest.approx(totals[8 - i], rel=1e-10)  # even


def test_sweep_kappa_decay(tmp_path):
    text = (BASE
            + "sweep.parameter = kappa_D\nsweep.min = 0.85\nsweep.max = 2.0\n"
            + "sweep.count = 5\nrun.output_dir = " + str(tmp_path / "out") + "\n")
    cfgpath = write_cfg(tmp_path, text)
    assert cli.main(["sweep", cfgpath]) == 0
    runs = os.listdir(tmp_path / "out")
    rows = (tmp_path / "out" / runs[0] / "results.csv").read_text().splitlines()[1:]
    cols = np.array([[abs(float(v)) for v in r.split(",")[2:14]] for r in rows])
    # every component that is not identically negligible decays beyond the
    # first point as the screening strengthens
    for j in range(cols.shape[1]):
        if cols[:, j].max() > 1e-12:
            assert all(b < a for a, b in zip(cols[1:, j], cols[2:, j]))


def test_sweep_worker_pool_matches_serial(tmp_path):
    from braidpot.config import load_config as lc

    text = (BASE + "sweep.parameter = xi_phase\nsweep.min = 0\n"
            + "sweep.max = 2.0\nsweep.count = 4\n")
    cfg = lc(write_cfg(tmp_path, text))
    serial = cli.run_sweep(cfg, workers=1)
    pooled = cli.run_sweep(cfg, workers=2)
    assert serial.rows == pooled.rows


def test_minimize_against_dense_scan(tmp_path):
    text = (BASE
            + "charge.model = dna\ncharge.theta = 0.7\ncharge.f1 = 0.3\n"
            + "charge.f2 = 0.3\ncharge.phi_s = 1.2566\n"
            + "run.output_dir = " + str(tmp_path / "out") + "\n")
    cfgpath = write_cfg(tmp_path, text)
    cfg = load_config(cfgpath)

    def total(phase):
        st = cfg.state_at(0.3)
        from braidpot.geometry import BraidState

        st = BraidState.make(R=3.0, a=1.0, eta=0.3, xi1=phase, xi2=0.0,
                             dxi1_ds=1.0, dxi2_ds=1.0)
        return breakdown(st, cfg.charge, cfg.physical, cfg.truncation,
                         level="small_angle").total

    grid = np.linspace(0.0, 2 * math.pi, 721)
    dense = grid[int(np.argmin([total(p) for p in grid]))]
    x, fx, trace, ok = cli.golden_section(total, max(0.0, dense - 0.5),
                                          min(2 * math.pi, dense + 0.5), 1e-8)
    assert ok
    assert abs(x - dense) < 2 * math.pi / 720


def test_minimize_cli_flat_landscape(tmp_path, capsys):
    # monopole-only spectrum: the phase landscape is flat; the trace shows it
    text = (BASE.replace("geometry.eta = 0.3", "geometry.eta = 0.2")
            + "charge.model = dna\ncharge.theta = 0.8\ncharge.f1 = 0\ncharge.f2 = 0\n"
            + "charge.phi_s = 0\ncharge.n_max = 0\n"
            + "run.output_dir = " + str(tmp_path / "out") + "\n")
    cfgpath = write_cfg(tmp_path, text)
    code = cli.main(["minimize", cfgpath, "--free", "xi_phase"])
    assert code == 0
    runs = [d for d in os.listdir(tmp_path / "out") if d.startswith("minimize")]
    rows = (tmp_path / "out" / runs[0] / "minimize.csv").read_text().splitlines()[1:]
    vals = [float(r.split(",")[-1]) for r in rows]
    assert max(vals) - min(vals) < 1e-12 * max(1.0, abs(vals[0]))


def test_argmin_invariant_under_energy_scale(tmp_path):
    base = (BASE + "charge.model = dna\ncharge.theta = 0.7\ncharge.f1 = 0.3\n"
            + "charge.f2 = 0.3\ncharge.phi_s = 1.2566\n")
    cfg1 = load_config(write_cfg(tmp_path, base, "a.cfg"))
    cfg2 = load_config(write_cfg(tmp_path, base + "physical.energy_scale = 7.5\n", "b.cfg"))

    def total(cfg, phase):
        from braidpot.geometry import BraidState

        st = BraidState.make(R=3.0, a=1.0, eta=0.3, xi1=phase, xi2=0.0,
                             dxi1_ds=1.0, dxi2_ds=1.0)
        return breakdown(st, cfg.charge, cfg.physical, cfg.truncation,
                         level="small_angle").total

    x1, _, _, _ = cli.golden_section(lambda p: total(cfg1, p), 2.0, 2 * math.pi, 1e-9)
    x2, _, _, _ = cli.golden_section(lambda p: total(cfg2, p), 2.0, 2 * math.pi, 1e-9)
    assert x1 == pytest.approx(x2, abs=1e-7)


def test_nelder_mead_quadratic():
    f = lambda x: (x[0] - 1.2) ** 2 + 2.0 * (x[1] + 0.4) ** 2
    x, fx, trace, ok = cli.nelder_mead(f, [0.0, 0.0], [4.0, 4.0], 1e-9)
    assert ok
    assert abs(x[0] - 1.2) < 1e-6 and abs(x[1] + 0.4) < 1e-6


def test_fig1_and_identities_cli(tmp_path, capsys):
    out = str(tmp_path / "figs")
    assert cli.main(["fig1", "--a-kappa", "2", "--out", out,
                     "--min-akz", "-2", "--max-akz", "2", "--step", "0.5"]) == 0
    lines = (tmp_path / "figs" / "surf0_curves.csv").read_text().splitlines()
    assert lines[0] == "l,a_kz,value"
    assert len(lines) == 1 + 4 * 9
    assert cli.main(["identities"]) == 0


def test_oracle_cli(tmp_path):
    text = (BASE.replace("geometry.eta = 0.3", "geometry.eta = 0.17")
            + "truncation.n_max = 6\ntruncation.m_max = 4\ntruncation.j_max = 4\n"
            + "oracle.ds = 0.02\noracle.periods = 4\n"
            + "run.output_dir = " + str(tmp_path / "out") + "\n")
    cfgpath = write_cfg(tmp_path, text)
    assert cli.main(["oracle", cfgpath]) == 0
    runs = [d for d in os.listdir(tmp_path / "out") if d.startswith("oracle")]
    rows = (tmp_path / "out" / runs[0] / "oracle.csv").read_text().splitlines()
    rel = abs(float(rows[1].split(",")[4]))
    assert rel < 0.02
