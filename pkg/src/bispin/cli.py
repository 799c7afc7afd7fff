"""Command-line entry point.

Subcommands tie the library together into reproducible file-based runs:

    bispin breit-rabi   labeled level energies over a field range (CSV)
    bispin clock        locate a clock transition in a field bracket (report)
    bispin phase-sweep  echo doublet amplitudes vs drive phase (CSV)
    bispin fit          fit the drive model to measured sweep data (report)
    bispin spectrum     synthesize an echo and fit the doublet peaks (CSV + report)

Exit codes: 0 success, 1 usage error, 2 data error (config or input CSV),
3 numerical failure (no bracketed root, wrong transition count, eigensolver
failure).  Outputs are written atomically, so a nonzero exit never leaves a
partial artifact, and identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import transitions as trans
from .config import ConfigError, RunConfig, load_config
from .csvio import CsvFormatError, read_csv_columns, write_csv, write_report
from .echomodel import FitParams, ensemble_echo, fit_phase_dependence, phase_sweep
from .fieldmap import sample_donors
from .spincore import StateLabel, diagonalize, hamiltonian, labeled_eigensystem
from .spectro import DoubletModel, fit_doublet, spectrum_from_echo, synthesize_echo
from .transitions import BracketError, TransitionSpec

DEFAULT_B0_T = 50.19e-3
DEFAULT_EXCITATION_HZ = 7.0805e9


class UsageError(ValueError):
    """Invalid flag combination or value range."""


class NumericalError(RuntimeError):
    """A numerical precondition failed (root bracket, transition count)."""


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    artifacts: tuple[str, ...]


def _parse_transition(text: str, nuclear_spin: float) -> TransitionSpec:
    """Parse 'allowed', 'forbidden', or an explicit 'F,mF:F,mF' pair.

    The named shortcuts are the clock-transition doublet of an S = 1/2
    donor: allowed = (I+1/2,-1) <-> (I-1/2,-2), forbidden =
    (I+1/2,-2) <-> (I-1/2,-1).
    """
    f_hi, f_lo = nuclear_spin + 0.5, nuclear_spin - 0.5
    if text == "allowed":
        return TransitionSpec(upper=StateLabel(f_hi, -1), lower=StateLabel(f_lo, -2))
    if text == "forbidden":
        return TransitionSpec(upper=StateLabel(f_hi, -2), lower=StateLabel(f_lo, -1))
    try:
        upper_txt, lower_txt = text.split(":")
        fu, mu = (float(v) for v in upper_txt.split(","))
        fl, ml = (float(v) for v in lower_txt.split(","))
        return TransitionSpec(upper=StateLabel(fu, mu), lower=StateLabel(fl, ml))
    except ValueError:
        raise UsageError(f"cannot parse transition {text!r}; expected 'allowed', "
                         "'forbidden', or 'F,mF:F,mF'") from None


def _build_ensemble(config: RunConfig):
    try:
        return sample_donors(config.geometry, config.implant,
                             config.n_lateral, config.n_depth)
    except ValueError as exc:
        raise ConfigError(f"inconsistent geometry/implant configuration: {exc}") from exc


def _doublet_at(config: RunConfig, b0_t: float, excitation_hz: float,
                window_hz: float):
    """Forbidden and allowed members of the pair near the excitation."""
    pair = trans.list_transitions(config.spin, b0_t, excitation_hz, window_hz)
    if len(pair) != 2:
        raise NumericalError(
            f"expected exactly 2 transitions within {excitation_hz / 1e9:.6f} GHz "
            f"+- {window_hz / 1e6:.3f} MHz at {b0_t * 1e3:.2f} mT, found {len(pair)}")
    return trans.classify_doublet(pair)


def _labeled_energy_rows(config: RunConfig, b_values: np.ndarray):
    """Energies of every labeled level at each field, columns by (F, mF).

    Below 1 uT the mF sectors are degenerate, so labels are taken from the
    adiabatic order at 1 uT and attached to the sorted energies.
    """
    ref = labeled_eigensystem(config.spin, trans.MIN_LABEL_FIELD_T)
    label_order = sorted(ref.labels, key=lambda lab: (lab.f, lab.mf))
    rows = []
    for b in b_values:
        if b >= trans.MIN_LABEL_FIELD_T:
            eig = labeled_eigensystem(config.spin, b)
            energy_of = {lab: eig.energies_hz[k] for k, lab in enumerate(eig.labels)}
        else:
            energies, _ = diagonalize(hamiltonian(config.spin, b))
            energy_of = {lab: energies[k] for k, lab in enumerate(ref.labels)}
        rows.append([b] + [energy_of[lab] for lab in label_order])
    return label_order, rows


def cmd_breit_rabi(config: RunConfig, b_min_t: float, b_max_t: float,
                   n_points: int, out_dir: str) -> CommandResult:
    """Write the labeled level diagram over [b_min, b_max] as CSV."""
    if not (b_min_t < b_max_t) or b_min_t < 0:
        raise UsageError(f"need 0 <= b_min < b_max, got [{b_min_t}, {b_max_t}]")
    if n_points < 2:
        raise UsageError(f"need n_points >= 2, got {n_points}")
    b_values = np.linspace(b_min_t, b_max_t, n_points)
    label_order, rows = _labeled_energy_rows(config, b_values)
    header = ["B_T"] + [f"E_hz_F{lab.f:g}_mF{lab.mf:+g}" for lab in label_order]
    path = write_csv(f"{out_dir}/breit_rabi.csv", header, rows)
    return CommandResult(0, (path,))


def cmd_clock(config: RunConfig, transition: str, b_lo_t: float, b_hi_t: float,
              out_dir: str) -> CommandResult:
    """Locate the df/dB = 0 field of a transition and write a report."""
    if not 0 < b_lo_t < b_hi_t:
        raise UsageError(f"need 0 < b_lo < b_hi, got [{b_lo_t}, {b_hi_t}]")
    spec = _parse_transition(transition, config.spin.nuclear_spin)
    try:
        clock = trans.find_clock_field(config.spin, spec, (b_lo_t, b_hi_t))
    except BracketError as exc:
        raise NumericalError(str(exc)) from exc
    residual = trans.transition_gradient(config.spin, clock.field_bct_t, spec)
    path = write_report(f"{out_dir}/clock_report.txt", [
        ("transition_upper", f"F={spec.upper.f:g} mF={spec.upper.mf:+g}"),
        ("transition_lower", f"F={spec.lower.f:g} mF={spec.lower.mf:+g}"),
        ("field_bct_t", clock.field_bct_t),
        ("frequency_fct_hz", clock.frequency_hz),
        ("curvature_hz_per_t2", clock.curvature_hz_per_t2),
        ("gradient_residual_hz_per_t", residual),
    ])
    return CommandResult(0, (path,))


def cmd_phase_sweep(config: RunConfig, n_phases: int, normalize: bool,
                    out_dir: str, b0_t: float = DEFAULT_B0_T,
                    excitation_hz: float = DEFAULT_EXCITATION_HZ,
                    window_hz: float = 5e6) -> CommandResult:
    """Sweep the drive phase over [0, 2 pi) and write the echo pair CSV.

    The circular sense driving the allowed member is read off the
    transition matrix elements at b0_t before sweeping.
    """
    if n_phases < 1:
        raise UsageError(f"need n_phases >= 1, got {n_phases}")
    (_, data_f), (spec_a, data_a) = _doublet_at(config, b0_t, excitation_hz, window_hz)
    samples = _build_ensemble(config)
    phases = np.linspace(0.0, 2.0 * np.pi, n_phases, endpoint=False)
    sweep = phase_sweep(samples, config.drive, phases, normalize=normalize,
                        allowed_sense=data_a.dominant_sense)
    header = (["phi_rad", "e_f_norm", "e_a_norm"] if normalize
              else ["phi_rad", "e_forbidden", "e_allowed"])
    rows = [(phi, pair.e_forbidden, pair.e_allowed) for phi, pair in sweep]
    path = write_csv(f"{out_dir}/phase_sweep.csv", header, rows)
    return CommandResult(0, (path,))


def cmd_fit(config: RunConfig, data_csv: str, out_dir: str,
            b0_t: float = DEFAULT_B0_T,
            excitation_hz: float = DEFAULT_EXCITATION_HZ,
            window_hz: float = 5e6) -> CommandResult:
    """Fit drive amplitudes and phase offset to a measured sweep CSV."""
    columns = read_csv_columns(data_csv, ["phi_rad", "e_forbidden", "e_allowed"])
    data = np.column_stack([columns["phi_rad"], columns["e_forbidden"],
                            columns["e_allowed"]])
    totals = data[:, 1] + data[:, 2]
    bad = np.where(totals <= 0)[0]
    if bad.size:
        raise CsvFormatError("echo pair sums to zero; cannot normalize",
                             line=int(bad[0]) + 2)
    renormalized = bool(np.max(np.abs(totals - 1.0)) > 1e-9)
    data[:, 1] /= totals
    data[:, 2] /= totals

    (_, _), (_, data_a) = _doublet_at(config, b0_t, excitation_hz, window_hz)
    samples = _build_ensemble(config)
    init = FitParams(b1_dielectric_t=config.drive.b1_dielectric_t,
                     b1_cpw_scale=config.drive.b1_cpw_scale,
                     phase_offset_rad=0.0, residual_sse=np.inf)
    fit = fit_phase_dependence(data, samples, init,
                               tau_pi_s=config.drive.tau_pi_s,
                               g_drive=config.drive.g_drive,
                               allowed_sense=data_a.dominant_sense,
                               constants=config.drive.constants)

    drive_fit = replace(config.drive, b1_dielectric_t=fit.b1_dielectric_t,
                        b1_cpw_scale=fit.b1_cpw_scale)
    model = phase_sweep(samples, drive_fit, data[:, 0] + fit.phase_offset_rad,
                        normalize=True, allowed_sense=data_a.dominant_sense)
    resid_rows = [(phi, pair.e_forbidden - e_f, pair.e_allowed - e_a)
                  for (phi, e_f, e_a), (_, pair) in zip(data, model)]

    report = write_report(f"{out_dir}/fit_report.txt", [
        ("b1_dielectric_t", fit.b1_dielectric_t),
        ("b1_cpw_scale", fit.b1_cpw_scale),
        ("phase_offset_rad", fit.phase_offset_rad),
        ("residual_sse", fit.residual_sse),
        ("degenerate", str("degenerate" in fit.flags).lower()),
        ("improved_over_init", str("no_improvement" not in fit.flags).lower()),
        ("input_renormalized", str(renormalized).lower()),
        ("n_points", len(data)),
    ])
    residuals = write_csv(f"{out_dir}/fit_residuals.csv",
                          ["phi_rad", "resid_forbidden", "resid_allowed"], resid_rows)
    return CommandResult(0, (report, residuals))


def cmd_spectrum(config: RunConfig, out_dir: str, b0_t: float = DEFAULT_B0_T,
                 excitation_hz: float = DEFAULT_EXCITATION_HZ,
                 window_hz: float = 5e6, linewidth_hz: float = 300e3,
                 duration_s: float = 40.96e-6, dt_s: float = 40e-9,
                 zero_pad_factor: int = 8) -> CommandResult:
    """Synthesize the doublet echo at b0_t and fit its spectrum.

    Peak weights come from the ensemble echo at the configured drive, so a
    linear drive (b1_dielectric = 0) yields equal peaks and an elliptical
    one reproduces the phase-dependent asymmetry.
    """
    (spec_f, data_f), (spec_a, data_a) = _doublet_at(config, b0_t, excitation_hz,
                                                     window_hz)
    samples = _build_ensemble(config)
    weights = ensemble_echo(samples, config.drive,
                            allowed_sense=data_a.dominant_sense).normalize()

    model = DoubletModel(
        offsets_hz=(data_f.frequency_hz - excitation_hz,
                    data_a.frequency_hz - excitation_hz),
        amplitudes=(weights.e_forbidden, weights.e_allowed),
        linewidth_fwhm_hz=linewidth_hz,
        excitation_freq_hz=excitation_hz)
    trace = synthesize_echo(model, duration_s, dt_s)
    spectrum = spectrum_from_echo(trace, zero_pad_factor)
    try:
        peak_lo, peak_hi = fit_doublet(spectrum)
    except ValueError as exc:
        raise NumericalError(str(exc)) from exc

    trace_path = write_csv(f"{out_dir}/echo_trace.csv",
                           ["t_s", "inphase", "quadrature"],
                           zip(trace.times_s, trace.samples_inphase,
                               trace.samples_quadrature))
    spec_path = write_csv(f"{out_dir}/spectrum.csv", ["offset_hz", "amplitude"],
                          zip(spectrum.freq_axis_hz, spectrum.amplitude))
    report_path = write_report(f"{out_dir}/peaks_report.txt", [
        ("peak1_center_hz", peak_lo.center_hz),
        ("peak1_fwhm_hz", peak_lo.fwhm_hz),
        ("peak1_height", peak_lo.height),
        ("peak2_center_hz", peak_hi.center_hz),
        ("peak2_fwhm_hz", peak_hi.fwhm_hz),
        ("peak2_height", peak_hi.height),
        ("separation_hz", peak_hi.center_hz - peak_lo.center_hz),
        ("allowed_offset_hz", data_a.frequency_hz - excitation_hz),
        ("forbidden_offset_hz", data_f.frequency_hz - excitation_hz),
        ("allowed_is_lower_frequency",
         str(data_a.frequency_hz < data_f.frequency_hz).lower()),
        ("allowed_transition", f"F={spec_a.upper.f:g} mF={spec_a.upper.mf:+g} <-> "
                               f"F={spec_a.lower.f:g} mF={spec_a.lower.mf:+g}"),
        ("forbidden_transition", f"F={spec_f.upper.f:g} mF={spec_f.upper.mf:+g} <-> "
                                 f"F={spec_f.lower.f:g} mF={spec_f.lower.mf:+g}"),
        ("allowed_drive_sense", data_a.dominant_sense),
        ("forbidden_drive_sense", data_f.dominant_sense),
        ("sigma_plus_sense", trans.SIGMA_PLUS_SENSE),
        ("cpmg_echoes", 5),
        ("cpmg_tau_s", 60e-6),
    ])
    return CommandResult(0, (trace_path, spec_path, report_path))


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="bispin", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="INI config file (defaults apply)")
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("breit-rabi", help="labeled level energies vs field")
    common(p)
    p.add_argument("--b-min", type=float, default=0.0, help="low field, T")
    p.add_argument("--b-max", type=float, default=0.2, help="high field, T")
    p.add_argument("--n-points", type=int, default=201)

    p = sub.add_parser("clock", help="locate a clock transition")
    common(p)
    p.add_argument("--transition", default="allowed",
                   help="'allowed', 'forbidden', or 'F,mF:F,mF'")
    p.add_argument("--b-lo", type=float, default=10e-3, help="bracket low end, T")
    p.add_argument("--b-hi", type=float, default=200e-3, help="bracket high end, T")

    p = sub.add_parser("phase-sweep", help="echo amplitudes vs drive phase")
    common(p)
    p.add_argument("--n-phases", type=int, default=25)
    p.add_argument("--raw", action="store_true", help="skip per-phase normalization")
    p.add_argument("--b0", type=float, default=DEFAULT_B0_T,
                   help="field used to identify the doublet pairing, T")

    p = sub.add_parser("fit", help="fit the drive model to sweep data")
    common(p)
    p.add_argument("data_csv", help="CSV with phi_rad, e_forbidden, e_allowed")
    p.add_argument("--b0", type=float, default=DEFAULT_B0_T)

    p = sub.add_parser("spectrum", help="synthesize and fit the doublet spectrum")
    common(p)
    p.add_argument("--b0", type=float, default=DEFAULT_B0_T)
    p.add_argument("--excitation", type=float, default=DEFAULT_EXCITATION_HZ,
                   help="excitation frequency, Hz")
    p.add_argument("--window", type=float, default=5e6,
                   help="transition search half-window, Hz")
    p.add_argument("--linewidth", type=float, default=300e3, help="FWHM, Hz")
    p.add_argument("--duration", type=float, default=40.96e-6, help="trace length, s")
    p.add_argument("--dt", type=float, default=40e-9, help="sample interval, s")
    p.add_argument("--zero-pad", type=int, default=8)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = load_config(args.config)
        if args.command == "breit-rabi":
            result = cmd_breit_rabi(config, args.b_min, args.b_max,
                                    args.n_points, args.out)
        elif args.command == "clock":
            result = cmd_clock(config, args.transition, args.b_lo, args.b_hi, args.out)
        elif args.command == "phase-sweep":
            result = cmd_phase_sweep(config, args.n_phases, not args.raw,
                                     args.out, b0_t=args.b0)
        elif args.command == "fit":
            result = cmd_fit(config, args.data_csv, args.out, b0_t=args.b0)
        else:
            result = cmd_spectrum(config, args.out, b0_t=args.b0,
                                  excitation_hz=args.excitation,
                                  window_hz=args.window,
                                  linewidth_hz=args.linewidth,
                                  duration_s=args.duration, dt_s=args.dt,
                                  zero_pad_factor=args.zero_pad)
    except UsageError as exc:
        print(f"bispin: usage error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, CsvFormatError) as exc:
        print(f"bispin: data error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, BracketError, RuntimeError) as exc:
        print(f"bispin: numerical failure: {exc}", file=sys.stderr)
        return 3

    for path in result.artifacts:
        print(f"wrote {path}")
    return result.exit_code


def console_main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    console_main()
