"""Command-line front end: configuration loading, exit codes and CSV outputs.

Commands covered (must match ``fracfield.cli.COMMANDS``):
  deriv, integrate, action, el, noether, oscillator, verify
"""

from __future__ import annotations

import re
import textwrap
from pathlib import Path

import numpy as np
import pytest

from fracfield import suites
from fracfield.cli import COMMANDS, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_VERIFY_FAILED, main
from fracfield.config import DEFAULT_CONFIG, load_config
from fracfield.csvio import read_csv
from fracfield.errors import ConfigurationError
from fracfield.field import ClosedForm, Sampled
from fracfield.suites import SuiteResult
from fracfield.variational import el_residual

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SUMMARY = re.compile(r"^SUITE (\w+) (PASS|FAIL) max_err=\S+$", re.MULTILINE)
COMMAND_COUNT = 7


def _write(tmp_path: Path, text: str, name: str = "scenario.ini") -> Path:
    path = tmp_path / name
    path.write_text(textwrap.dedent(text), encoding="utf-8")
    return path


def _run(capsys, *argv: str):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _column(path: Path, name: str) -> np.ndarray:
    header, table = read_csv(path)
    return table[:, header.index(name)]


def test_command_inventory():
    assert len(COMMANDS) == COMMAND_COUNT
    assert set(COMMANDS) == {"deriv", "integrate", "action", "el", "noether", "oscillator", "verify"}


# ═══════════════════════════════════════════════════════════════════════════
# Configuration
# ═══════════════════════════════════════════════════════════════════════════
class TestConfiguration:
    def test_default_scenario(self):
        cfg = load_config()
        assert cfg.space.alpha == 0.5
        assert cfg.space.dimension == 1
        assert cfg.generator.labels == ("scaling",)
        assert cfg.generator.anchored
        assert cfg.beta == (1e-3,)
        assert cfg.point == (1.0,)
        assert cfg.bounds == ((0.5, 5.0),)
        assert "[verify]" in DEFAULT_CONFIG

    def test_file_section_replaces_default_section(self, tmp_path):
        cfg = load_config(_write(tmp_path, "[space]\nalpha = 0.9\n"))
        assert cfg.space.alpha == 0.9
        # inner_offset falls back to the model default, not the default scenario's 0.1
        assert cfg.space.axes[0].inner_offset == 1e-3
        # untouched sections still come from the default scenario
        assert cfg.generator.labels == ("scaling",)

    def test_alpha_list_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError, match="alpha"):
            load_config(_write(tmp_path, "[space]\nalpha = 0.5, 0.7\n"))

    def test_unknown_section_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError, match="unknown section"):
            load_config(_write(tmp_path, "[plots]\nkind = png\n"))

    def test_field_needs_exactly_one_source(self, tmp_path):
        with pytest.raises(ConfigurationError, match="field"):
            load_config(_write(tmp_path, "[field]\nexpression = x_1\nsamples = a.csv\n"))

    def test_expression_texts_checked_at_load(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(_write(tmp_path, "[lagrangian]\ndensity = 0.5*g_2^2\n"))
        with pytest.raises(ConfigurationError):
            load_config(_write(tmp_path, "[field]\nexpression = cos(x_1\n"))

    def test_custom_generator(self):
        cfg = load_config(CONFIGS / "custom_generator.ini")
        assert cfg.generator.M == 1
        assert cfg.generator.anchored
        assert "phi" in cfg.generator.to_dict()["c"][0]

    def test_custom_generator_component_count(self, tmp_path):
        text = "[generator]\nkind = custom\nf_1 = x_1; 0\n"
        with pytest.raises(ConfigurationError, match="f_1"):
            load_config(_write(tmp_path, text))

    def test_sample_path_relative_to_config(self):
        cfg = load_config(CONFIGS / "sampled_oscillator.ini")
        assert isinstance(cfg.field, Sampled)
        assert not cfg.field.exact

    def test_rotation_scenario(self):
        cfg = load_config(CONFIGS / "wave2d_rotation.ini")
        assert cfg.space.dimension == 2
        assert cfg.grid.n_points == (8, 8)
        assert cfg.generator.labels == ("rotation_12",)
        assert cfg.point == (1.0, 2.0)

    def test_per_axis_offsets_and_truncations(self, tmp_path):
        text = (CONFIGS / "wave2d_rotation.ini").read_text(encoding="utf-8")
        text = text.replace("inner_offset = 0.2", "inner_offset = 0.2, 0.05")
        text = text.replace("truncation = 4.0", "truncation = 4.0, 6.5")
        cfg = load_config(_write(tmp_path, text))
        assert [ax.inner_offset for ax in cfg.space.axes] == [0.2, 0.05]
        assert [ax.truncation for ax in cfg.space.axes] == [4.0, 6.5]
        assert cfg.space.axes[1].coverage == (0.05, 6.5)

    def test_per_axis_offsets_checked(self, tmp_path):
        with pytest.raises(ConfigurationError, match="inner_offset"):
            load_config(_write(tmp_path, "[space]\nalpha = 0.5\ninner_offset = 0.1, 0.2, 0.3\n"))
        with pytest.raises(ConfigurationError, match="truncation"):
            load_config(_write(tmp_path, "[space]\nalpha = 0.5\ntruncation = -1\n"))

    def test_overrides(self):
        cfg = load_config().with_overrides(out="elsewhere", seed=11)
        assert cfg.output_dir == Path("elsewhere")
        assert cfg.verify.seed == 11
        assert cfg.output_path("trajectory") == Path("elsewhere") / "trajectory.csv"


# ═══════════════════════════════════════════════════════════════════════════
# Exit codes
# ═══════════════════════════════════════════════════════════════════════════
class TestExitCodes:
    def test_alpha_out_of_range(self, tmp_path, capsys):
        path = _write(tmp_path, "[space]\nalpha = 1.5\n")
        code, _, err = _run(capsys, "verify", "--config", str(path), "--out", str(tmp_path / "out"))
        assert code == EXIT_CONFIG
        assert "alpha" in err

    def test_corrupted_sample_file(self, tmp_path, capsys):
        (tmp_path / "broken.csv").write_text("x_1,phi\n1.0,0.5\n2.0,abc\n", encoding="utf-8")
        path = _write(tmp_path, "[field]\nsamples = broken.csv\n")
        code, _, err = _run(capsys, "el", "--config", str(path), "--out", str(tmp_path / "out"))
        assert code == EXIT_CONFIG
        assert "broken.csv:3" in err

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, err = _run(capsys, "deriv", "--config", str(tmp_path / "nope.ini"))
        assert code == EXIT_CONFIG
        assert "not found" in err

    def test_point_at_endpoint(self, capsys):
        code, _, err = _run(capsys, "deriv", "--point", "0.0")
        assert code == EXIT_NUMERIC
        assert "SectorError" in err
        assert "singular" in err

    def test_unknown_suite(self, tmp_path, capsys):
        path = _write(tmp_path, "[verify]\nsuites = axioms, nonsense\n")
        code, _, err = _run(capsys, "verify", "--config", str(path), "--out", str(tmp_path / "out"))
        assert code == EXIT_CONFIG
        assert "nonsense" in err

    def test_failing_suite(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setitem(
            suites.SUITES, "axioms", lambda rng: SuiteResult("axioms", False, 1.0, 1e-9, "forced")
        )
        path = _write(tmp_path, "[verify]\nsuites = axioms\n")
        code, out, _ = _run(capsys, "verify", "--config", str(path), "--out", str(tmp_path / "out"))
        assert code == EXIT_VERIFY_FAILED
        assert "SUITE axioms FAIL max_err=1.0" in out


# ═══════════════════════════════════════════════════════════════════════════
# Pointwise commands
# ═══════════════════════════════════════════════════════════════════════════
class TestPointwiseCommands:
    def test_deriv_closed_form_and_limit_agree(self, tmp_path, capsys):
        path = _write(tmp_path, "[field]\nexpression = sin(x_1)\n")
        code, out, _ = _run(capsys, "deriv", "--config", str(path), "--point", "1.0")
        assert code == EXIT_OK
        match = re.search(r"conf_deriv=(\S+) limit=(\S+) est_error=(\S+)", out)
        closed, limit = float(match.group(1)), float(match.group(2))
        assert closed == pytest.approx(np.cos(1.0), rel=1e-14)
        assert abs(closed - limit) < 1e-6

    def test_deriv_classical(self, capsys):
        code, out, _ = _run(capsys, "deriv", "--config", str(CONFIGS / "classical.ini"))
        assert code == EXIT_OK
        closed = float(re.search(r"conf_deriv=(\S+)", out).group(1))
        assert closed == pytest.approx(-np.sin(3.0), rel=1e-14)

    def test_deriv_point_dimension_mismatch(self, capsys):
        code, _, _ = _run(capsys, "deriv", "--point", "1.0,2.0")
        assert code == EXIT_CONFIG

    def test_integrate_classical(self, capsys):
        code, out, _ = _run(capsys, "integrate", "--config", str(CONFIGS / "classical.ini"))
        assert code == EXIT_OK
        value = float(re.search(r"integral=(\S+)", out).group(1))
        assert value == pytest.approx(np.sin(3.14159), abs=1e-10)

    def test_integrate_two_dimensional(self, capsys):
        code, out, _ = _run(capsys, "integrate", "--config", str(CONFIGS / "wave2d_rotation.ini"))
        assert code == EXIT_OK
        assert np.isfinite(float(re.search(r"integral=(\S+)", out).group(1)))

    def test_action_of_default_scenario(self, capsys):
        code, out, _ = _run(capsys, "action")
        assert code == EXIT_OK
        assert np.isfinite(float(re.search(r"action=(\S+)", out).group(1)))


# ═══════════════════════════════════════════════════════════════════════════
# Grid commands and CSV outputs
# ═══════════════════════════════════════════════════════════════════════════
class TestGridCommands:
    def test_el_on_shell(self, tmp_path, capsys):
        code, _, _ = _run(capsys, "el", "--out", str(tmp_path))
        assert code == EXIT_OK
        header, table = read_csv(tmp_path / "el.csv")
        assert header == ["x_1", "residual"]
        assert table.shape == (40, 2)
        assert np.max(np.abs(table[:, 1])) < 1e-8

    def test_el_off_shell_matches_library(self, tmp_path, capsys):
        path = _write(tmp_path, "[field]\nexpression = x_1^3\n")
        code, _, _ = _run(capsys, "el", "--config", str(path), "--out", str(tmp_path))
        assert code == EXIT_OK
        _, table = read_csv(tmp_path / "el.csv")
        cfg = load_config(path)
        expected = el_residual(cfg.lagrangian, ClosedForm.parse("x_1^3", 1), table[:, :1], cfg.space)
        np.testing.assert_allclose(table[:, 1], expected, rtol=1e-13)
        assert np.min(np.abs(expected)) > 0

    def test_el_zero_lagrangian(self, tmp_path, capsys):
        path = _write(tmp_path, "[lagrangian]\ndensity = 0*phi + 0*g_1\n")
        code, _, _ = _run(capsys, "el", "--config", str(path), "--out", str(tmp_path))
        assert code == EXIT_OK
        assert np.all(_column(tmp_path / "el.csv", "residual") == 0.0)

    def test_noether_rotation_scenario(self, tmp_path, capsys):
        code, out, _ = _run(capsys, "noether", "--config", str(CONFIGS / "wave2d_rotation.ini"), "--out", str(tmp_path))
        assert code == EXIT_OK
        header, table = read_csv(tmp_path / "noether.csv")
        assert header == ["x_1", "x_2", "sigma", "i", "theta", "B", "div_theta"]
        assert table.shape == (64 * 2, 7)
        assert np.max(np.abs(table[:, header.index("B")])) < 1e-6
        assert read_csv(tmp_path / "emt.csv")[0] == ["x_1", "x_2", "i", "j", "T"]
        assert read_csv(tmp_path / "amt.csv")[1].shape == (64 * 8, 6)
        direct = float(re.search(r"dS_direct=(\S+)", out).group(1))
        formula = float(re.search(r"dS_formula=(\S+)", out).group(1))
        assert direct == pytest.approx(formula, rel=5e-2, abs=1e-7)

    def test_noether_zero_generator(self, tmp_path, capsys):
        path = _write(tmp_path, "[generator]\nkind = custom\nf_1 = 0\nc_1 = 0\n")
        code, _, _ = _run(capsys, "noether", "--config", str(path), "--out", str(tmp_path))
        assert code == EXIT_OK
        for name in ("theta", "B", "div_theta"):
            assert np.all(_column(tmp_path / "noether.csv", name) == 0.0)

    def test_noether_classical_divergence(self, tmp_path, capsys):
        code, _, _ = _run(capsys, "noether", "--config", str(CONFIGS / "classical.ini"), "--out", str(tmp_path))
        assert code == EXIT_OK
        assert np.max(np.abs(_column(tmp_path / "noether.csv", "div_theta"))) < 1e-6

    def test_noether_threads_do_not_change_output(self, tmp_path, capsys):
        one, four = tmp_path / "one", tmp_path / "four"
        config = str(CONFIGS / "wave2d_rotation.ini")
        assert _run(capsys, "noether", "--config", config, "--out", str(one))[0] == EXIT_OK
        assert _run(capsys, "noether", "--config", config, "--out", str(four), "--threads", "4")[0] == EXIT_OK
        for name in ("noether.csv", "emt.csv", "amt.csv"):
            assert (one / name).read_bytes() == (four / name).read_bytes()

    def test_sampled_field_el(self, tmp_path, capsys):
        code, _, _ = _run(capsys, "el", "--config", str(CONFIGS / "sampled_oscillator.ini"), "--out", str(tmp_path))
        assert code == EXIT_OK
        assert np.max(np.abs(_column(tmp_path / "el.csv", "residual"))) < 5e-2


# ═══════════════════════════════════════════════════════════════════════════
# Oscillator
# ═══════════════════════════════════════════════════════════════════════════
class TestOscillatorCommand:
    def test_delayed_oscillator(self, tmp_path, capsys):
        code, _, _ = _run(capsys, "oscillator", "--config", str(CONFIGS / "delayed_oscillator.ini"), "--out", str(tmp_path))
        assert code == EXIT_OK
        header, table = read_csv(tmp_path / "trajectory.csv")
        assert header == ["t", "phi", "dphi_dt", "phi_analytic", "abs_err"]
        assert table[0, 0] == pytest.approx(np.pi**2)
        assert np.max(table[:, 4]) < 1e-6
        header, _ = read_csv(tmp_path / "energy.csv")
        assert header == ["t", "E", "E_tilde", "drift_pred", "drift_meas"]

    def test_classical_energy_constant(self, tmp_path, capsys):
        code, _, _ = _run(capsys, "oscillator", "--config", str(CONFIGS / "classical.ini"), "--out", str(tmp_path))
        assert code == EXIT_OK
        E = _column(tmp_path / "energy.csv", "E")
        assert np.max(np.abs(E - E[0])) / E[0] < 1e-8

    def test_analytic_mode_regularized_energy(self, tmp_path, capsys):
        text = """\
            [oscillator]
            mode = analytic
            A = 1.0
            B = -0.5
            t0 = 0.5
            t_end = 5.0
            samples = 50
            """
        path = _write(tmp_path, text)
        code, _, _ = _run(capsys, "oscillator", "--config", str(path), "--out", str(tmp_path))
        assert code == EXIT_OK
        assert np.max(np.abs(_column(tmp_path / "energy.csv", "E_tilde"))) < 1e-9
        assert np.all(_column(tmp_path / "trajectory.csv", "abs_err") == 0.0)


# ═══════════════════════════════════════════════════════════════════════════
# Verification
# ═══════════════════════════════════════════════════════════════════════════
class TestVerify:
    def test_subset_passes(self, tmp_path, capsys):
        path = _write(tmp_path, "[verify]\nsuites = axioms, commutation, el_on_shell\n")
        code, out, _ = _run(capsys, "verify", "--config", str(path), "--out", str(tmp_path))
        assert code == EXIT_OK
        names = [m.group(1) for m in SUMMARY.finditer(out)]
        assert names == ["axioms", "el_on_shell", "commutation"]
        header, _ = read_csv_text(tmp_path / "verify.csv")
        assert header == ["suite", "status", "max_err"]
        for name in ("trajectory.csv", "energy.csv", "noether.csv", "emt.csv", "amt.csv"):
            assert (tmp_path / name).exists()

    def test_default_config_is_deterministic(self, tmp_path, capsys):
        first, second = tmp_path / "first", tmp_path / "second"
        code, out, _ = _run(capsys, "verify", "--out", str(first))
        assert code == EXIT_OK, out
        assert len(SUMMARY.findall(out)) == len(suites.SUITES)
        assert _run(capsys, "verify", "--out", str(second))[0] == EXIT_OK
        files = sorted(p.name for p in first.iterdir())
        assert files == sorted(p.name for p in second.iterdir())
        for name in files:
            assert (first / name).read_bytes() == (second / name).read_bytes()


def read_csv_text(path: Path):
    lines = path.read_text(encoding="utf-8").splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]
