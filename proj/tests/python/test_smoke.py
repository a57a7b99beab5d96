import math
import os
from pathlib import Path

import pytest

import balaw

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_presets_and_suites():
    assert set(balaw.presets()) == {"LinearDiagonal", "ScalarConvex", "PSystem"}
    assert len(balaw.suite_names()) == 9


def test_riemann_round_trip():
    system = balaw.System("PSystem")
    ul, ur = [0.01, -0.02], [0.03, 0.0]
    sigma = balaw.solve_riemann(system, ul, ur)
    assert balaw.compose_psi(system, sigma, ul) == pytest.approx(ur, abs=1e-9)
    states = balaw.psi_states(system, sigma, ul)
    assert len(states) == 3
    assert states[-1] == pytest.approx(ur, abs=1e-9)


def test_profile_and_functionals():
    u = balaw.Profile.from_steps([(-0.5, [0.02, 0.01]), (0.25, [0.0, 0.0])])
    assert u.jumps == 2
    assert u(0.0) == pytest.approx([0.02, 0.01])
    assert u.total_variation() == pytest.approx(0.06)
    assert u.l1_norm() == pytest.approx(0.75 * 0.03)
    system = balaw.System("LinearDiagonal")
    ups = balaw.upsilon(system, u)
    assert 0.0 < ups < 10 * u.total_variation()
    assert balaw.stability_functional(system, u, u) == 0.0
    assert balaw.l1_distance(u, balaw.Profile.zero(2)) == pytest.approx(u.l1_norm())


def test_damped_transport_decays():
    source = balaw.Source("LinearDiagonal", local="LinearDamping(1)")
    assert source.c > 0 and source.kernel_within_cap()
    u0 = balaw.Profile.from_steps([(-0.2, [0.02, 0.01]), (0.2, [0.0, 0.0])])
    run = balaw.euler_polygonal(source, u0, 0.5, 0.01)
    assert run["profile"].l1_norm() == pytest.approx(math.exp(-0.5) * u0.l1_norm(), rel=0.02)
    assert run["trace"][-1]["t"] == pytest.approx(0.5)


def test_errors_are_typed(tmp_path):
    with pytest.raises(balaw.UnknownPreset):
        balaw.System("Euler")
    bad = tmp_path / "bad.cfg"
    bad.write_text("[run\n")
    with pytest.raises(balaw.ConfigError):
        balaw.run(str(bad))
    assert issubclass(balaw.ConfigError, balaw.Error)


def test_run_config(tmp_path, monkeypatch):
    monkeypatch.setenv("BALAW_OUTPUT_ROOT", str(tmp_path))
    report = balaw.run(str(CONFIGS / "empty_datum.cfg"))
    assert report["passed"]
    assert (Path(report["directory"]) / "manifest.json").is_file()
    assert Path(report["directory"]).parent == tmp_path
