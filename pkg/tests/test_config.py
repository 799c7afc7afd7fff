import pytest

from bispin.config import ConfigError, default_config, load_config


def write(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text)
    return str(path)


class TestDefaults:
    def test_defaults_describe_bismuth(self):
        cfg = default_config()
        assert cfg.spin.nuclear_spin == 4.5
        assert cfg.spin.hyperfine_hz == 1.4754e9
        assert cfg.geometry.gap_width == 17.4e-6
        assert cfg.implant.strip_width == 9e-6
        assert cfg.drive.tau_pi_s == 100e-9
        assert cfg.n_lateral == 32 and cfg.n_depth == 8

    def test_none_path_gives_defaults(self):
        assert load_config(None) == default_config()

    def test_empty_file_gives_defaults(self, tmp_path):
        cfg = load_config(write(tmp_path, ""))
        assert cfg == default_config()


class TestParsing:
    def test_partial_override(self, tmp_path):
        cfg = load_config(write(tmp_path, """
[spin]
hyperfine_hz = 1.5e9

[drive]
phase_rad = 1.25
"""))
        assert cfg.spin.hyperfine_hz == 1.5e9
        assert cfg.spin.g_electron == 2.0003
        assert cfg.drive.phase_rad == 1.25

    def test_lateral_center_auto_and_explicit(self, tmp_path):
        auto = load_config(write(tmp_path, "[implant]\nlateral_center_m = auto\n"))
        assert auto.implant.lateral_center is None
        expl = load_config(write(tmp_path, "[implant]\nlateral_center_m = 2.4e-5\n"))
        assert expl.implant.lateral_center == 2.4e-5

    def test_unknown_section_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match=r"unknown section"):
            load_config(write(tmp_path, "[resonator]\nq = 1000\n"))

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match=r"unknown key"):
            load_config(write(tmp_path, "[spin]\nquadrupole_hz = 1.0\n"))

    def test_bad_number_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="not a number"):
            load_config(write(tmp_path, "[spin]\nhyperfine_hz = fast\n"))

    def test_bad_choice_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="expected one of"):
            load_config(write(tmp_path, "[geometry]\ncurrent_profile = parabolic\n"))

    def test_invalid_physics_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write(tmp_path, "[spin]\nhyperfine_hz = -2e9\n"))

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / "absent.ini"))
