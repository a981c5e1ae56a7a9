import hashlib
import json
import math
import subprocess

import pytest

from fdharq import analytic, experiments as E
from fdharq.cli import main
from fdharq.config import ConfigError, Scheme
from fdharq.quadrature import QuadratureError


def test_presets_carry_caption_parameters():
    F = E.builtin_figures()
    assert set(F) == {f"fig{i}" for i in range(5, 13)}
    f7 = F["fig7"].base_params
    assert math.isclose(f7.p_s, 10 ** 0.5) and math.isclose(f7.var_sd, 10 ** 0.5)
    assert math.isclose(F["fig11"].base_params.var_rr, 1.0)
    assert F["fig10"].base_params.var_rr == 0.0
    assert F["fig9"].sweep_variable == "var_sr_rd"
    p9 = E.point_params(F["fig9"], 3.0)
    assert p9.var_sr == p9.var_rd
    assert F["fig5"].kind == "latency" and F["fig5"].target_outage == 1e-5
    assert all(F[f].base_params.p_s2d is None for f in F)


def test_empty_scheme_list_rejected():
    with pytest.raises(ConfigError):
        E.check_experiment(E.builtin_figures()["fig7"].with_(schemes=()))
    with pytest.raises(ConfigError):
        E.check_experiment(E.builtin_figures()["fig7"].with_(grid=()))


@pytest.fixture(scope="module")
def fig7_rows():
    return E.run_experiment(E.builtin_figures()["fig7"])


def test_dominance_in_rate_sweep(fig7_rows):
    by = {(r["x"], r["scheme"]): r["p_out"] for r in fig7_rows}
    for x in E.RATE_GRID:
        assert by[(x, "enhanced")] <= by[(x, "conventional")] <= by[(x, "af")] + 1e-12


def test_direct_link_alone_fails_with_weak_direct_link():
    rows = E.run_experiment(E.builtin_figures()["fig6"].with_(schemes=("s2d1", "s2d2")))
    assert all(r["p_out"] > 0.75 for r in rows if r["x"] >= 1.0)


def test_diversity_fit_on_synthetic_data():
    rows = [{"x": x, "scheme": "af", "p_out": 10 ** (-2.0 * x / 10)} for x in (10, 20, 30)]
    assert E.diversity_slope(rows, Scheme.AF, (10, 30)) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        E.diversity_slope(rows, Scheme.AF, (25, 30))


def test_per_point_failure_is_recorded(monkeypatch):
    def boom(*a, **k):
        raise QuadratureError("quadrature did not converge", 1e-3)

    monkeypatch.setattr(analytic, "outage_phase1", boom)
    exp = E.builtin_figures()["fig7"].with_(grid=(1.0, 2.0), schemes=("af", "s2d1"))
    rows = E.run_experiment(exp)
    af = [r for r in rows if r["scheme"] == "af"]
    assert all("did not converge" in r["error"] and r["p_out"] is None for r in af)
    assert all(r["p_out"] is not None for r in rows if r["scheme"] == "s2d1")


def test_z_score_definition():
    assert E.z_score(0.01, 0.01, 100) == 0.0
    assert E.z_score(0.01, 0.02, 10**4) == pytest.approx(0.01 / math.sqrt(0.0099e-4))
    assert E.z_score(0.0, 0.0, 10) == 0.0


def test_outputs_are_byte_identical_and_hashed(tmp_path):
    exp = E.builtin_figures()["fig7"].with_(grid=(0.5, 1.0), backend="both", n_trials=20_000)
    paths = []
    for sub in ("a", "b"):
        paths.append(E.write_outputs(exp, E.run_experiment(exp), tmp_path / sub))
    (c1, j1), (c2, j2) = paths
    assert c1.read_bytes() == c2.read_bytes() and j1.read_bytes() == j2.read_bytes()
    side = json.loads(j1.read_text())
    data = c1.read_bytes()
    assert side["content_hash"] == hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()
    assert side["experiment"]["backend"] == "both"
    try:
        git = subprocess.run(["git", "hash-object", str(c1)], capture_output=True, text=True)
    except FileNotFoundError:
        return
    if git.returncode == 0:
        assert git.stdout.strip() == side["content_hash"]


def test_config_file_with_preset_base(tmp_path):
    cfg = tmp_path / "mine.json"
    cfg.write_text(json.dumps({"preset": "fig10", "name": "mine", "grid": {"start": 0, "stop": 10, "step": 5},
                               "schemes": ["af", "enhanced"]}))
    exp = E.load_experiment(cfg)
    assert exp.grid == (0.0, 5.0, 10.0) and exp.schemes == (Scheme.AF, Scheme.ENHANCED)
    assert exp.base_params == E.builtin_figures()["fig10"].base_params


def test_config_file_from_scratch(tmp_path):
    cfg = tmp_path / "scratch.json"
    cfg.write_text(json.dumps({"sweep_variable": "rate", "grid": [0.5, 1.0], "schemes": ["af"],
                               "params": {"p_db": 5.0, "var_sd_db": 0.0}}))
    exp = E.load_experiment(cfg)
    assert exp.name == "scratch" and exp.base_params.var_sd == 1.0


@pytest.mark.parametrize("content", [
    "{", "[]", '{"preset": "fig99"}', '{"preset": "fig7", "colour": 1}',
    '{"preset": "fig7", "schemes": []}', '{"preset": "fig7", "params": {"p_db": "x"}}',
    '{"preset": "fig7", "backend": "abacus"}',
])
def test_bad_config_files(tmp_path, content):
    cfg = tmp_path / "bad.json"
    cfg.write_text(content)
    with pytest.raises(ConfigError):
        E.load_experiment(cfg)


def test_cli_run_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = tmp_path / "tiny.json"
    cfg.write_text(json.dumps({"preset": "fig7", "name": "tiny", "grid": [1.0]}))
    assert main(["run", str(cfg), "--backend", "mc", "--trials", "5000", "--seed", "3",
                 "--out", str(out), "--redraw", "fresh", "--exact-mi", "--quiet"]) == 0
    side = json.loads((out / "tiny.json").read_text())
    assert side["experiment"]["redraw"] == "fresh" and side["experiment"]["exact_mi"]
    assert side["experiment"]["n_trials"] == 5000 and side["experiment"]["backend"] == "montecarlo"
    assert main(["run", "no-such-preset"]) == 2
    assert main(["run", str(cfg), "--trials", "0"]) == 2
    assert main(["list"]) == 0
    assert "fig12" in capsys.readouterr().out
    assert main(["schedule", "--processes", "4", "--horizon", "8"]) == 0
    assert main(["schedule", "--processes", "5", "--horizon", "8"]) == 2


def test_console_script_installed():
    res = subprocess.run(["fdharq", "list"], capture_output=True, text=True)
    assert res.returncode == 0 and "fig5" in res.stdout
