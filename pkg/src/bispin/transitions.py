"""Transition frequencies, field sensitivities, and polarization couplings.

A transition is a pair of labeled eigenstates; its frequency is the energy
difference E_upper - E_lower in Hz with the upper label naming the
higher-energy state.  The field sensitivity df/dB locates clock transitions
(df/dB = 0), and the circular matrix elements establish which sense of
rotating transverse drive couples each member of a nearly degenerate pair.

Sense convention
----------------
The two circular drive senses are named after the electron ladder
operators: the "sigma+" element is |<lower| S+ |upper>| and the "sigma-"
element is |<lower| S- |upper>|.  A transition whose upper state sits one
mF above its lower state is driven by the sigma- sense in this naming
(equivalently |<upper| S+ |lower>| is its live element).  The mapping of
sigma+ to a rotation sense of the physical field is fixed by
SIGMA_PLUS_SENSE below; only the pairing (which member of a doublet
couples to which sense) is observable, so a global flip of this constant
relabels but never reorders results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .csvio import write_csv
from .spincore import (SpinSystem, StateLabel, build_operators,
                       labeled_eigensystem)

# Rotation-sense name assigned to the sigma+ matrix element.
SIGMA_PLUS_SENSE = "cw"
SIGMA_MINUS_SENSE = "ccw"

# Labeling below this field is done at the field itself in label_states,
# which requires B0 > 0; callers asking for smaller fields are clamped.
MIN_LABEL_FIELD_T = 1e-6


@dataclass(frozen=True)
class TransitionSpec:
    """Ordered pair of (F, mF) labels; upper names the higher-energy state."""

    upper: StateLabel
    lower: StateLabel

    def __post_init__(self):
        object.__setattr__(self, "upper", StateLabel(*self.upper))
        object.__setattr__(self, "lower", StateLabel(*self.lower))
        if self.upper == self.lower:
            raise ValueError("transition labels must be distinct")

    @property
    def delta_mf(self) -> float:
        return self.upper.mf - self.lower.mf

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"{self.upper!r}<->{self.lower!r}"


@dataclass(frozen=True)
class TransitionData:
    """Frequency, field sensitivity, and drive couplings of one transition."""

    frequency_hz: float
    dfdb_hz_per_t: float
    mel_sigma_plus: float
    mel_sigma_minus: float
    mel_linear_x: float

    @property
    def dominant_sense(self) -> str:
        """Rotation-sense name of the stronger circular coupling."""
        if self.mel_sigma_plus >= self.mel_sigma_minus:
            return SIGMA_PLUS_SENSE
        return SIGMA_MINUS_SENSE

    @property
    def selectivity(self) -> float:
        """Ratio of the dominant to the suppressed circular element."""
        hi = max(self.mel_sigma_plus, self.mel_sigma_minus)
        lo = min(self.mel_sigma_plus, self.mel_sigma_minus)
        return hi / lo if lo > 0 else np.inf


@dataclass(frozen=True)
class ClockTransition:
    """Field and frequency of a df/dB = 0 point of one transition."""

    field_bct_t: float
    frequency_hz: float
    transition: TransitionSpec
    curvature_hz_per_t2: float


class BracketError(ValueError):
    """Root bracket does not enclose a sign change of df/dB."""


def transition_frequency(system: SpinSystem, b0_t: float, t: TransitionSpec) -> float:
    """E_upper - E_lower in Hz at b0_t.  Raises if the labels are unknown
    or if the named upper state is not the higher-energy one."""
    eig = labeled_eigensystem(system, b0_t)
    f = eig.energy_of(t.upper) - eig.energy_of(t.lower)
    if f < 0:
        raise ValueError(f"{t!r}: upper state lies below lower state at "
                         f"{b0_t * 1e3:.3f} mT; swap the labels")
    return float(f)


def transition_gradient(system: SpinSystem, b0_t: float, t: TransitionSpec,
                        step_t: float = 10e-6) -> float:
    """Signed df/dB in Hz/T by Richardson-extrapolated central difference.

    Uses stencils at +-step and +-step/2 and combines them to fourth order.
    The two raw estimates double as a consistency check: a wild disagreement
    means a level rearrangement inside the stencil, which is reported rather
    than silently averaged.
    """
    if step_t <= 0:
        raise ValueError("step_t must be positive")
    if b0_t <= step_t:
        raise ValueError(f"b0_t = {b0_t} must exceed the stencil step {step_t}")

    def df(h):
        return (transition_frequency(system, b0_t + h, t)
                - transition_frequency(system, b0_t - h, t)) / (2 * h)

    coarse = df(step_t)
    fine = df(0.5 * step_t)
    grad = (4.0 * fine - coarse) / 3.0
    if abs(fine - coarse) > max(1e-2 * abs(grad), 1e3):
        raise ValueError(f"{t!r}: finite-difference stencils disagree at "
                         f"{b0_t * 1e3:.3f} mT ({coarse:.6g} vs {fine:.6g} Hz/T); "
                         "possible level crossing inside the step")
    return float(grad)


def find_clock_field(system: SpinSystem, t: TransitionSpec,
                     bracket: tuple[float, float],
                     step_t: float = 10e-6) -> ClockTransition:
    """Locate the df/dB = 0 field of a transition inside a bracket.

    The bracket endpoints must produce gradients of opposite sign; the root
    is then refined to better than 1 uT by Brent's method.  The curvature at
    the root is returned and checked to be a genuine extremum.
    """
    b_lo, b_hi = bracket
    if not 0 < b_lo < b_hi:
        raise ValueError(f"invalid bracket {bracket}")
    g_lo = transition_gradient(system, b_lo, t, step_t)
    g_hi = transition_gradient(system, b_hi, t, step_t)
    if np.sign(g_lo) == np.sign(g_hi):
        raise BracketError(
            f"df/dB does not change sign over [{b_lo * 1e3:.3f}, {b_hi * 1e3:.3f}] mT: "
            f"{g_lo:.6g} Hz/T at the lower end, {g_hi:.6g} Hz/T at the upper end")

    b_ct = brentq(lambda b: transition_gradient(system, b, t, step_t),
                  b_lo, b_hi, xtol=1e-7, rtol=8.9e-16, maxiter=60)
    curvature = (transition_gradient(system, b_ct + 1e-4, t, step_t)
                 - transition_gradient(system, b_ct - 1e-4, t, step_t)) / 2e-4
    if abs(curvature) < 1e3:
        raise ValueError(f"{t!r}: stationary point at {b_ct * 1e3:.3f} mT is not "
                         f"an extremum (d2f/dB2 = {curvature:.3g} Hz/T^2)")
    return ClockTransition(field_bct_t=float(b_ct),
                           frequency_hz=transition_frequency(system, b_ct, t),
                           transition=t,
                           curvature_hz_per_t2=float(curvature))


def matrix_elements(system: SpinSystem, b0_t: float, t: TransitionSpec,
                    step_t: float = 10e-6) -> TransitionData:
    """Frequency, df/dB, and drive couplings of one transition at b0_t."""
    eig = labeled_eigensystem(system, b0_t)
    upper = eig.state_of(t.upper)
    lower = eig.state_of(t.lower)
    ops = build_operators(system)
    mel_plus = abs(np.vdot(lower, ops.s_plus @ upper))
    mel_minus = abs(np.vdot(lower, ops.s_minus @ upper))
    mel_x = abs(np.vdot(lower, ops.sx @ upper))
    freq = eig.energy_of(t.upper) - eig.energy_of(t.lower)
    if freq < 0:
        raise ValueError(f"{t!r}: upper state lies below lower state at "
                         f"{b0_t * 1e3:.3f} mT; swap the labels")
    return TransitionData(frequency_hz=float(freq),
                          dfdb_hz_per_t=transition_gradient(system, b0_t, t, step_t),
                          mel_sigma_plus=float(mel_plus),
                          mel_sigma_minus=float(mel_minus),
                          mel_linear_x=float(mel_x))


def _reference_element(system: SpinSystem, eig) -> float:
    """Linear-drive element used to normalize the listing threshold.

    For S = 1/2 this is the stretched transition (I+1/2, I+1/2) <->
    (I-1/2, I-1/2), the strongest line of the spectrum; otherwise the
    maximum |<i|Sx|j>| over all level pairs.
    """
    ops = build_operators(system)
    if system.electron_spin == 0.5:
        top = StateLabel(system.nuclear_spin + 0.5, system.nuclear_spin + 0.5)
        bot = StateLabel(system.nuclear_spin - 0.5, system.nuclear_spin - 0.5)
        return abs(np.vdot(eig.state_of(bot), ops.sx @ eig.state_of(top)))
    sx_full = np.abs(eig.states.conj().T @ ops.sx @ eig.states)
    np.fill_diagonal(sx_full, 0.0)
    return float(np.max(sx_full))


def list_transitions(system: SpinSystem, b0_t: float, f_center_hz: float,
                     f_window_hz: float, min_mel: float = 0.01,
                     step_t: float = 10e-6) -> list[tuple[TransitionSpec, TransitionData]]:
    """All level pairs within f_center +- f_window whose linear-drive matrix
    element exceeds min_mel (relative to the stretched-transition element at
    the same field), sorted by frequency.

    Fields below 1 uT are evaluated at 1 uT so that the zero-field manifold
    can still be labeled adiabatically.
    """
    if f_window_hz <= 0:
        raise ValueError("f_window_hz must be positive")
    b_eff = max(b0_t, MIN_LABEL_FIELD_T)
    step_eff = min(step_t, 0.5 * b_eff)
    eig = labeled_eigensystem(system, b_eff)
    ops = build_operators(system)
    threshold = min_mel * _reference_element(system, eig)

    sx_mels = np.abs(eig.states.conj().T @ ops.sx @ eig.states)
    found = []
    dim = system.dim
    for i in range(dim):
        for j in range(i + 1, dim):
            freq = eig.energies_hz[j] - eig.energies_hz[i]
            if abs(freq - f_center_hz) > f_window_hz:
                continue
            if sx_mels[i, j] < threshold:
                continue
            spec = TransitionSpec(upper=eig.labels[j], lower=eig.labels[i])
            found.append((spec, matrix_elements(system, b_eff, spec, step_eff)))
    found.sort(key=lambda item: item[1].frequency_hz)
    return found


def write_transitions_csv(path: str, b0_t: float,
                          listing: Sequence[tuple[TransitionSpec, TransitionData]]) -> str:
    """Write a transition listing with the standard column schema."""
    header = ["B0_T", "F_up", "mF_up", "F_lo", "mF_lo", "freq_Hz",
              "dfdB_HzPerT", "mel_plus", "mel_minus", "mel_x"]
    rows = [(b0_t, s.upper.f, s.upper.mf, s.lower.f, s.lower.mf,
             d.frequency_hz, d.dfdb_hz_per_t, d.mel_sigma_plus,
             d.mel_sigma_minus, d.mel_linear_x)
            for s, d in listing]
    return write_csv(path, header, rows)


def classify_doublet(pair):
    """Split a two-transition listing into (forbidden, allowed).

    The allowed member raises mF from lower to upper (delta mF = +1), the
    high-field electron-spin flip; the forbidden member lowers it.  This is
    the conventional naming of the nearly degenerate pair at a clock
    transition; it does not rely on the frequency ordering.
    """
    if len(pair) != 2:
        raise ValueError(f"expected exactly 2 transitions, got {len(pair)}")
    (s0, d0), (s1, d1) = pair
    if {round(s0.delta_mf), round(s1.delta_mf)} != {1, -1}:
        raise ValueError(f"pair is not a delta mF = +-1 doublet: "
                         f"{s0!r} ({s0.delta_mf:+g}), {s1!r} ({s1.delta_mf:+g})")
    if round(s0.delta_mf) == 1:
        return (s1, d1), (s0, d0)
    return (s0, d0), (s1, d1)
