import numpy as np
import pytest

from bispin import diagonalize, hamiltonian
from bispin.cli import main
from bispin.config import default_config
from bispin.csvio import read_csv_columns

from test_echomodel import GOLDEN_E_F


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def rows_of(path):
    return open(path).read().splitlines()


class TestBreitRabi:
    def test_shape(self, tmp_path):
        assert run(tmp_path, "breit-rabi", "--b-min", "0", "--b-max", "0.2",
                   "--n-points", "201") == 0
        lines = rows_of(tmp_path / "breit_rabi.csv")
        assert len(lines) == 202
        assert all(len(line.split(",")) == 21 for line in lines)

    def test_two_point_grid(self, tmp_path):
        assert run(tmp_path, "breit-rabi", "--n-points", "2") == 0
        assert len(rows_of(tmp_path / "breit_rabi.csv")) == 3

    def test_row_matches_direct_diagonalization(self, tmp_path):
        assert run(tmp_path, "breit-rabi", "--b-min", "50.19e-3", "--b-max",
                   "60e-3", "--n-points", "2") == 0
        first = rows_of(tmp_path / "breit_rabi.csv")[1].split(",")
        energies_csv = np.sort([float(v) for v in first[1:]])
        energies, _ = diagonalize(hamiltonian(default_config().spin, 50.19e-3))
        assert np.array_equal(energies_csv, energies)

    def test_bad_range_is_usage_error(self, tmp_path):
        assert run(tmp_path, "breit-rabi", "--b-min", "0.2", "--b-max", "0.1") == 1
        assert not (tmp_path / "breit_rabi.csv").exists()


class TestClock:
    def test_report_values(self, tmp_path):
        assert run(tmp_path, "clock") == 0
        report = dict(line.split(" = ") for line in rows_of(tmp_path / "clock_report.txt"))
        assert abs(float(report["frequency_fct_hz"]) - 7.0315e9) < 10e6
        assert abs(float(report["field_bct_t"]) - 50.19e-3) == pytest.approx(30e-3, abs=5e-3)

    def test_no_root_in_bracket_exits_3(self, tmp_path):
        assert run(tmp_path, "clock", "--b-lo", "0.1", "--b-hi", "0.2") == 3
        assert not (tmp_path / "clock_report.txt").exists()

    def test_byte_identical_reruns(self, tmp_path):
        run(tmp_path, "clock")
        first = (tmp_path / "clock_report.txt").read_bytes()
        run(tmp_path, "clock")
        assert (tmp_path / "clock_report.txt").read_bytes() == first


class TestPhaseSweep:
    def test_row_count_and_normalization(self, tmp_path):
        assert run(tmp_path, "phase-sweep", "--n-phases", "25") == 0
        cols = read_csv_columns(str(tmp_path / "phase_sweep.csv"),
                                ["phi_rad", "e_f_norm", "e_a_norm"])
        assert len(cols["phi_rad"]) == 25
        sums = np.array(cols["e_f_norm"]) + np.array(cols["e_a_norm"])
        assert np.max(np.abs(sums - 1.0)) < 1e-12

    def test_golden_regression(self, tmp_path):
        assert run(tmp_path, "phase-sweep") == 0
        cols = read_csv_columns(str(tmp_path / "phase_sweep.csv"),
                                ["phi_rad", "e_f_norm"])
        assert np.max(np.abs(np.array(cols["e_f_norm"]) - GOLDEN_E_F)) < 1e-9

    def test_raw_columns(self, tmp_path):
        assert run(tmp_path, "phase-sweep", "--raw", "--n-phases", "8") == 0
        header = rows_of(tmp_path / "phase_sweep.csv")[0]
        assert header == "phi_rad,e_forbidden,e_allowed"

    def test_inconsistent_config_exits_2(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[implant]\nlateral_center_m = 0.0\n")  # on the center strip
        assert main(["phase-sweep", "--config", str(bad),
                     "--out", str(tmp_path)]) == 2
        assert not (tmp_path / "phase_sweep.csv").exists()


class TestFit:
    def synth_csv(self, tmp_path, offset="0.0"):
        sweep_dir = tmp_path / "sweep"
        sweep_dir.mkdir()
        cfg = tmp_path / "gen.ini"
        cfg.write_text(f"[drive]\nphase_rad = {offset}\n")
        assert main(["phase-sweep", "--n-phases", "25",
                     "--out", str(sweep_dir)]) == 0
        src = rows_of(sweep_dir / "phase_sweep.csv")
        data = tmp_path / "measured.csv"
        body = ["phi_rad,e_forbidden,e_allowed"] + src[1:]
        data.write_text("\n".join(body) + "\n")
        return str(data)

    def test_round_trip(self, tmp_path):
        data = self.synth_csv(tmp_path)
        assert run(tmp_path, "fit", data) == 0
        report = dict(line.split(" = ")
                      for line in rows_of(tmp_path / "fit_report.txt"))
        cfg = default_config()
        assert float(report["b1_dielectric_t"]) == pytest.approx(
            cfg.drive.b1_dielectric_t, rel=0.05)
        assert float(report["b1_cpw_scale"]) == pytest.approx(
            cfg.drive.b1_cpw_scale, rel=0.05)
        assert abs(float(report["phase_offset_rad"])) < 0.01
        assert float(report["residual_sse"]) < 1e-10
        assert report["degenerate"] == "false"
        resid = read_csv_columns(str(tmp_path / "fit_residuals.csv"),
                                 ["phi_rad", "resid_forbidden", "resid_allowed"])
        assert np.max(np.abs(resid["resid_allowed"])) < 1e-5

    def test_missing_column_exits_2(self, tmp_path):
        data = tmp_path / "bad.csv"
        data.write_text("phi_rad,e_f\n0.0,0.5\n")
        assert run(tmp_path, "fit", str(data)) == 2
        assert not (tmp_path / "fit_report.txt").exists()

    def test_empty_file_exits_2(self, tmp_path):
        data = tmp_path / "empty.csv"
        data.write_text("")
        assert run(tmp_path, "fit", str(data)) == 2

    def test_malformed_cell_reports_line(self, tmp_path, capsys):
        data = tmp_path / "mangled.csv"
        data.write_text("phi_rad,e_forbidden,e_allowed\n0.0,0.5,0.5\n0.1,oops,0.5\n")
        assert run(tmp_path, "fit", str(data)) == 2
        assert "line 3" in capsys.readouterr().err


class TestSpectrum:
    def test_default_run(self, tmp_path):
        assert run(tmp_path, "spectrum") == 0
        report = dict(line.split(" = ")
                      for line in rows_of(tmp_path / "peaks_report.txt"))
        assert float(report["separation_hz"]) == pytest.approx(660e3, abs=60e3)
        assert float(report["peak1_fwhm_hz"]) == pytest.approx(300e3, abs=30e3)
        assert float(report["peak2_fwhm_hz"]) == pytest.approx(300e3, abs=30e3)
        assert report["allowed_is_lower_frequency"] == "true"
        assert (tmp_path / "echo_trace.csv").exists()
        assert (tmp_path / "spectrum.csv").exists()

    def test_off_resonant_field_exits_3(self, tmp_path, capsys):
        assert run(tmp_path, "spectrum", "--b0", "5e-3") == 3
        assert "found 0" in capsys.readouterr().err
        assert not (tmp_path / "echo_trace.csv").exists()
        assert not (tmp_path / "spectrum.csv").exists()

    def test_linear_drive_gives_equal_heights(self, tmp_path):
        cfg = tmp_path / "linear.ini"
        cfg.write_text("[drive]\nb1_dielectric_t = 0.0\n")
        assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        report = dict(line.split(" = ")
                      for line in rows_of(tmp_path / "peaks_report.txt"))
        ratio = float(report["peak1_height"]) / float(report["peak2_height"])
        assert ratio == pytest.approx(1.0, rel=0.01)

    def test_deterministic_outputs(self, tmp_path):
        run(tmp_path, "spectrum")
        blobs = {name: (tmp_path / name).read_bytes()
                 for name in ("echo_trace.csv", "spectrum.csv", "peaks_report.txt")}
        run(tmp_path, "spectrum")
        for name, blob in blobs.items():
            assert (tmp_path / name).read_bytes() == blob


class TestUsage:
    def test_unknown_command_exits_1(self, tmp_path, capsys):
        assert run(tmp_path, "resonate") == 1
        capsys.readouterr()

    def test_unknown_flag_exits_1(self, tmp_path, capsys):
        assert run(tmp_path, "clock", "--quality", "7000") == 1
        capsys.readouterr()

    def test_input_file_not_mutated(self, tmp_path):
        data_path = TestFit().synth_csv(tmp_path)
        before = open(data_path, "rb").read()
        run(tmp_path, "fit", data_path)
        assert open(data_path, "rb").read() == before
