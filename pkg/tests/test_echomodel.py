import numpy as np
import pytest

from bispin import (DriveConfig, FieldSample, FitParams, circular_components,
                    ensemble_echo, fit_phase_dependence, phase_sweep,
                    single_spin_echo)

# normalized forbidden-transition curve of the default configuration,
# frozen from the first validated run (25 phases over [0, 2pi))
GOLDEN_E_F = np.array([
    0.99741740354036323, 0.98694943277702096, 0.93704290458670569,
    0.84396281588251365, 0.73240262720206428, 0.6242071023856931,
    0.52429234510838074, 0.42654967215279904, 0.3227942597782148,
    0.21125322437752825, 0.10533441560148657, 0.03190433158544722,
    0.0045517222409141803, 0.0045517222409141803, 0.031904331585447344,
    0.10533441560148664, 0.21125322437752839, 0.32279425977821502,
    0.42654967215279899, 0.52429234510838085, 0.6242071023856931,
    0.73240262720206439, 0.84396281588251376, 0.93704290458670569,
    0.98694943277702096,
])


def uniform_samples(mags, angle=0.0):
    mags = np.atleast_1d(mags)
    w = 1.0 / len(mags)
    return [FieldSample(position=(0.0, 0.0), b1_vector=(0.0, m), magnitude=float(m),
                        angle_from_normal=angle, weight=w) for m in mags]


def matched_drive(mag=1.3e-2):
    drive = DriveConfig(b1_dielectric_t=1.0, b1_cpw_scale=1.0)
    b_star = 0.5 * np.pi / drive.rabi_rad_per_t  # quarter-turn amplitude
    return DriveConfig(b1_dielectric_t=b_star, b1_cpw_scale=b_star / mag)


class TestCircularComponents:
    def test_linear_drive_splits_equally(self):
        pair = circular_components(0.0, 2e-4, 0.7)
        assert pair.b_sigma_cw == pair.b_sigma_ccw == pytest.approx(1e-4, rel=1e-15)

    def test_matched_in_phase_is_pure_clockwise(self):
        pair = circular_components(2e-4, 2e-4, 0.0)
        assert pair.b_sigma_cw == pytest.approx(2e-4, rel=1e-15)
        assert pair.b_sigma_ccw == 0.0

    def test_quadrature_phase(self):
        b = 2e-4
        pair = circular_components(b, b, np.pi / 2)
        assert pair.b_sigma_cw == pytest.approx(b / np.sqrt(2), rel=1e-12)
        assert pair.b_sigma_ccw == pytest.approx(b / np.sqrt(2), rel=1e-12)

    def test_parallelogram_identity_grid(self):
        bd = np.linspace(0.0, 4e-4, 100)
        bc = np.linspace(0.0, 4e-4, 100)
        phi = np.linspace(0.0, 2 * np.pi, 36)
        bd_g, bc_g, phi_g = np.meshgrid(bd, bc, phi, indexing="ij")
        cross = 2 * bd_g * bc_g * np.cos(phi_g)
        base = bd_g ** 2 + bc_g ** 2
        b_cw2 = 0.25 * np.maximum(base + cross, 0.0)
        b_ccw2 = 0.25 * np.maximum(base - cross, 0.0)
        lhs = b_cw2 + b_ccw2
        rhs = 0.5 * base
        scale = np.maximum(rhs, 1e-30)
        assert np.max(np.abs(lhs - rhs) / scale) < 1e-12


class TestSingleSpinEcho:
    def test_zero_drive(self):
        drive = matched_drive()
        assert single_spin_echo(drive, 1e-2, 0.0) == 0.0

    def test_quarter_turn_maximum(self):
        drive = matched_drive()
        b_star = 0.5 * np.pi / drive.rabi_rad_per_t
        peak = single_spin_echo(drive, 1e-2, b_star)
        assert peak == pytest.approx(1e-2, rel=1e-12)
        for b in (0.5 * b_star, 0.9 * b_star, 1.3 * b_star):
            assert single_spin_echo(drive, 1e-2, b) < peak

    def test_half_turn_zero(self):
        drive = matched_drive()
        b_pi = np.pi / drive.rabi_rad_per_t
        assert abs(single_spin_echo(drive, 1e-2, b_pi)) < 1e-17


class TestEnsembleEcho:
    def test_linear_drive_excites_both_equally(self):
        drive = DriveConfig(b1_dielectric_t=0.0, b1_cpw_scale=0.0138)
        pair = ensemble_echo(uniform_samples(1.3e-2), drive)
        assert pair.e_forbidden == pair.e_allowed
        assert pair.e_forbidden > 0

    def test_matched_single_sample_is_pure_circular(self):
        drive = matched_drive(1.3e-2)
        pair = ensemble_echo(uniform_samples(1.3e-2), drive, allowed_sense="cw")
        assert pair.e_forbidden == 0.0
        assert pair.e_allowed > 0

    def test_swap_symmetry(self, default_ensemble):
        drive = DriveConfig(b1_dielectric_t=1.79e-4, b1_cpw_scale=0.0138,
                            phase_rad=0.9)
        p_cw = ensemble_echo(default_ensemble, drive, allowed_sense="cw")
        p_ccw = ensemble_echo(default_ensemble, drive, allowed_sense="ccw")
        assert p_cw.e_forbidden == p_ccw.e_allowed
        assert p_cw.e_allowed == p_ccw.e_forbidden

    def test_distributed_ensemble_washes_out_selectivity(self, default_ensemble):
        # the suppressed member stays nonzero under the CPW field spread
        drive = DriveConfig(b1_dielectric_t=1.79e-4, b1_cpw_scale=0.0138)
        pair = ensemble_echo(default_ensemble, drive, allowed_sense="ccw").normalize()
        assert pair.e_allowed > 0
        assert pair.e_allowed == pytest.approx(2.582596459636791e-03, rel=1e-6)

    def test_empty_ensemble_rejected(self):
        with pytest.raises(ValueError):
            ensemble_echo([], matched_drive())


class TestPhaseSweep:
    def test_antiphase_extrema(self, default_ensemble):
        drive = DriveConfig(b1_dielectric_t=1.79e-4, b1_cpw_scale=0.0138)
        phases = np.linspace(0, 2 * np.pi, 25, endpoint=False)
        sweep = phase_sweep(default_ensemble, drive, phases, normalize=True)
        e_f = np.array([p.e_forbidden for _, p in sweep])
        e_a = np.array([p.e_allowed for _, p in sweep])
        assert np.argmax(e_a) == np.argmin(e_f)
        assert np.all(np.abs(e_f + e_a - 1.0) < 1e-15)

    def test_homogeneous_matched_reaches_full_contrast(self):
        drive = matched_drive(1.3e-2)
        phases = np.linspace(0, 2 * np.pi, 24, endpoint=False)  # contains 0 and pi
        sweep = phase_sweep(uniform_samples([1.3e-2] * 5), drive, phases)
        e_f = np.array([p.e_forbidden for _, p in sweep])
        assert e_f.min() == 0.0
        assert e_f.max() == 1.0

    def test_pi_shift_exchanges_curves(self, small_ensemble):
        drive = DriveConfig(b1_dielectric_t=1.79e-4, b1_cpw_scale=0.0138)
        phases = np.linspace(0, 2 * np.pi, 16, endpoint=False)
        sweep = phase_sweep(small_ensemble, drive, phases)
        shifted = phase_sweep(small_ensemble, drive, phases + np.pi)
        for (_, p), (_, q) in zip(sweep, shifted):
            assert p.e_forbidden == pytest.approx(q.e_allowed, rel=1e-12)
            assert p.e_allowed == pytest.approx(q.e_forbidden, rel=1e-12)

    def test_two_pi_periodicity(self, small_ensemble):
        drive = DriveConfig(b1_dielectric_t=1.79e-4, b1_cpw_scale=0.0138)
        phases = np.linspace(0.1, 1.9, 7)
        base = phase_sweep(small_ensemble, drive, phases)
        wrapped = phase_sweep(small_ensemble, drive, phases + 2 * np.pi)
        for (_, p), (_, q) in zip(base, wrapped):
            assert p.e_forbidden == pytest.approx(q.e_forbidden, rel=1e-12)

    def test_golden_regression_curve(self, default_ensemble):
        drive = DriveConfig(b1_dielectric_t=1.79e-4, b1_cpw_scale=0.0138)
        phases = np.linspace(0, 2 * np.pi, 25, endpoint=False)
        sweep = phase_sweep(default_ensemble, drive, phases, normalize=True,
                            allowed_sense="ccw")
        e_f = np.array([p.e_forbidden for _, p in sweep])
        assert np.max(np.abs(e_f - GOLDEN_E_F)) < 1e-9

    def test_monotone_contrast_degradation(self):
        # widening the field spread at fixed mean never improves contrast
        drive = matched_drive(1.3e-2)
        phases = np.linspace(0, 2 * np.pi, 48, endpoint=False)
        contrasts = []
        for delta in np.linspace(0.0, 0.5, 11):
            mags = 1.3e-2 * (1.0 + delta * np.linspace(-1, 1, 8))
            sweep = phase_sweep(uniform_samples(mags), drive, phases)
            e_a = np.array([p.e_allowed for _, p in sweep])
            contrasts.append(e_a.max() - e_a.min())
        diffs = np.diff(contrasts)
        assert np.all(diffs <= 1e-12)

    def test_empty_phase_list_rejected(self, small_ensemble):
        with pytest.raises(ValueError):
            phase_sweep(small_ensemble, matched_drive(), [])


class TestFit:
    def synth_data(self, samples, b1_d, scale, offset, n=25):
        drive = DriveConfig(b1_dielectric_t=b1_d, b1_cpw_scale=scale)
        phases = np.linspace(0, 2 * np.pi, n, endpoint=False)
        sweep = phase_sweep(samples, drive, phases + offset, normalize=True)
        return np.array([(phi, pair.e_forbidden, pair.e_allowed)
                         for phi, (_, pair) in zip(phases, sweep)])

    def test_round_trip_recovery(self, small_ensemble):
        true = (1.79e-4, 0.0138, 0.3)
        data = self.synth_data(small_ensemble, *true)
        init = FitParams(b1_dielectric_t=true[0] * 1.2, b1_cpw_scale=true[1] * 0.8,
                         phase_offset_rad=true[2] + 0.2, residual_sse=np.inf)
        fit = fit_phase_dependence(data, small_ensemble, init)
        assert fit.b1_dielectric_t == pytest.approx(true[0], rel=0.05)
        assert fit.b1_cpw_scale == pytest.approx(true[1], rel=0.05)
        assert fit.phase_offset_rad == pytest.approx(true[2], abs=0.01)
        assert fit.residual_sse < 1e-10
        assert "degenerate" not in fit.flags

    def test_zero_contrast_data_flags_degenerate(self, small_ensemble):
        phases = np.linspace(0, 2 * np.pi, 25, endpoint=False)
        data = np.column_stack([phases, np.full(25, 0.5), np.full(25, 0.5)])
        init = FitParams(b1_dielectric_t=1e-4, b1_cpw_scale=0.0138,
                         phase_offset_rad=0.0, residual_sse=np.inf)
        fit = fit_phase_dependence(data, small_ensemble, init)
        assert "degenerate" in fit.flags
        # the contrast-free family pushes the homogeneous amplitude to zero
        assert fit.b1_dielectric_t < 1e-5

    def test_never_worse_than_init(self, small_ensemble):
        data = self.synth_data(small_ensemble, 1.79e-4, 0.0138, 0.0)
        init = FitParams(b1_dielectric_t=1.79e-4, b1_cpw_scale=0.0138,
                         phase_offset_rad=0.0, residual_sse=np.inf)
        fit = fit_phase_dependence(data, small_ensemble, init)
        assert fit.residual_sse <= 1e-20

    def test_input_validation(self, small_ensemble):
        init = FitParams(1e-4, 0.01, 0.0, np.inf)
        with pytest.raises(ValueError, match="6 data points"):
            fit_phase_dependence(np.zeros((3, 3)), small_ensemble, init)
        bad = np.full((10, 3), np.nan)
        with pytest.raises(ValueError, match="finite"):
            fit_phase_dependence(bad, small_ensemble, init)
