"""Bismuth-donor spin transitions in silicon under polarized microwave drive.

A numpy/scipy toolkit for the coupled electron-nuclear spin system of a
donor in silicon: hyperfine level structure and clock transitions, the
opposite-helicity selection rule of the nearly degenerate doublet, the
inhomogeneous microwave field of a coplanar waveguide resonator, the
closed-form phase-dependent echo amplitudes of a two-resonator elliptical
drive, and recovery of the doublet spectrum from synthesized echo traces.
"""

from .spincore import (LabeledEigenSystem, PhysicalConstants, SpinOperatorSet,
                       SpinSystem, StateLabel, analytic_breit_rabi,
                       build_operators, diagonalize, hamiltonian, label_states,
                       labeled_eigensystem)
from .transitions import (ClockTransition, TransitionData, TransitionSpec,
                          classify_doublet, find_clock_field, list_transitions,
                          matrix_elements, transition_frequency,
                          transition_gradient)
from .fieldmap import (CPWGeometry, FieldSample, FieldStats, ImplantRegion,
                       cpw_field_at, field_stats, sample_donors)
from .echomodel import (CircularPair, DriveConfig, EchoPair, FitParams,
                        circular_components, ensemble_echo,
                        fit_phase_dependence, phase_sweep, single_spin_echo)
from .spectro import (DoubletModel, EchoTrace, PeakFit, Spectrum, fit_doublet,
                      spectrum_from_echo, synthesize_echo)
from .config import RunConfig, default_config, load_config

__version__ = "0.1.0"

__all__ = [
    "PhysicalConstants", "SpinSystem", "SpinOperatorSet", "StateLabel",
    "LabeledEigenSystem", "build_operators", "hamiltonian", "diagonalize",
    "label_states", "labeled_eigensystem", "analytic_breit_rabi",
    "TransitionSpec", "TransitionData", "ClockTransition",
    "transition_frequency", "transition_gradient", "find_clock_field",
    "matrix_elements", "list_transitions", "classify_doublet",
    "CPWGeometry", "ImplantRegion", "FieldSample", "FieldStats",
    "cpw_field_at", "sample_donors", "field_stats",
    "DriveConfig", "CircularPair", "EchoPair", "FitParams",
    "circular_components", "single_spin_echo", "ensemble_echo", "phase_sweep",
    "fit_phase_dependence",
    "DoubletModel", "EchoTrace", "Spectrum", "PeakFit", "synthesize_echo",
    "spectrum_from_echo", "fit_doublet",
    "RunConfig", "default_config", "load_config",
    "__version__",
]
