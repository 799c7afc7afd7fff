"""Electron-nuclear spin Hamiltonian of a donor in a static magnetic field.

Builds angular momentum operators on the coupled electron-nuclear product
space, assembles and diagonalizes the static Hamiltonian

    H / h = (g mu_B / h) B0 Sz  -  gamma_n B0 Iz  +  A (Sx Ix + Sy Iy + Sz Iz)

with every term expressed in Hz and the field along z, and labels the
eigenstates with the coupled quantum numbers (F, mF).

Conventions
-----------
* Product basis: electron factor first, nuclear factor second.  Within each
  factor the magnetic quantum number runs from +j down to -j, so for
  S = 1/2, I = 1/2 the operator Sz is diag(+1/2, +1/2, -1/2, -1/2).
* mF = <Sz + Iz> is an exact quantum number for a z-oriented field; labels
  round the expectation value to the nearest valid mF.
* F is assigned within each mF sector by energy order.  For A > 0 the
  higher-energy member of a two-state sector belongs to F = I + 1/2.  The
  hyperfine coupling keeps the two members of a sector from crossing at any
  finite field (level repulsion), so energy order matches adiabatic
  continuation from B0 -> 0+.  Stretched states |mF| = I + S belong to
  F = I + S.
* The nuclear Zeeman term enters with a minus sign and a signed
  gamma_n > 0 for 209Bi, which places the nominally forbidden member of a
  doublet above the allowed one in frequency.

The default constants describe the bismuth donor in silicon: S = 1/2,
I = 9/2, A = 1.4754 GHz, g = 2.0003, gamma_n = +6.963 MHz/T.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import constants as _codata


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants used throughout (SI, CODATA defaults)."""

    bohr_magneton: float = _codata.physical_constants["Bohr magneton"][0]  # J/T
    planck_h: float = _codata.h  # J s
    hbar: float = _codata.hbar  # J s


@dataclass(frozen=True)
class SpinSystem:
    """Spin quantum numbers and couplings of one donor.

    Parameters
    ----------
    electron_spin, nuclear_spin : float
        Half-integer spins; the Hilbert dimension is (2S+1)(2I+1).
    hyperfine_hz : float
        Isotropic hyperfine coupling A in Hz.  Must be positive; the
        F-labeling convention relies on it.
    g_electron : float
        Electron g-factor (dimensionless).
    gamma_nuclear_hz_per_t : float
        Signed nuclear gyromagnetic ratio in Hz/T.  Positive for 209Bi.
    """

    electron_spin: float = 0.5
    nuclear_spin: float = 4.5
    hyperfine_hz: float = 1.4754e9
    g_electron: float = 2.0003
    gamma_nuclear_hz_per_t: float = 6.963e6
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        for name, value in (("electron_spin", self.electron_spin),
                            ("nuclear_spin", self.nuclear_spin)):
            if value < 0 or round(2 * value) != 2 * value:
                raise ValueError(f"{name} must be a nonnegative half-integer, got {value}")
        if self.electron_spin <= 0:
            raise ValueError("electron_spin must be positive")
        if self.hyperfine_hz <= 0:
            raise ValueError("hyperfine_hz must be positive")

    @property
    def dim(self) -> int:
        return int(round((2 * self.electron_spin + 1) * (2 * self.nuclear_spin + 1)))

    @property
    def gamma_electron_hz_per_t(self) -> float:
        """Electron gyromagnetic ratio g mu_B / h in Hz/T."""
        return self.g_electron * self.constants.bohr_magneton / self.constants.planck_h


class StateLabel(NamedTuple):
    """Coupled-basis label (F, mF).  Integer-valued for integer S + I."""

    f: float
    mf: float

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"|{_fmt_halfint(self.f)},{_fmt_halfint(self.mf)}>"


def _fmt_halfint(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"


@dataclass(frozen=True)
class SpinOperatorSet:
    """Electron and nuclear angular momentum operators on the product space."""

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    ix: np.ndarray
    iy: np.ndarray
    iz: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray


def angular_momentum_matrices(j: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Single-spin (Jx, Jy, Jz) in the basis m = +j ... -j (descending)."""
    if j < 0 or round(2 * j) != 2 * j:
        raise ValueError(f"invalid spin value {j}")
    dim = int(round(2 * j + 1))
    m = j - np.arange(dim)
    jz = np.diag(m).astype(complex)
    jp = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        # J+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>
        mm = m[k]
        jp[k - 1, k] = np.sqrt(j * (j + 1) - mm * (mm + 1))
    jm = jp.conj().T
    jx = 0.5 * (jp + jm)
    jy = -0.5j * (jp - jm)
    return jx, jy, jz


def build_operators(system: SpinSystem) -> SpinOperatorSet:
    """Tensor-product spin operators for the electron-nuclear pair.

    The electron factor comes first: S_k = s_k (x) 1, I_k = 1 (x) i_k.
    """
    sx1, sy1, sz1 = angular_momentum_matrices(system.electron_spin)
    ix1, iy1, iz1 = angular_momentum_matrices(system.nuclear_spin)
    eye_s = np.eye(sx1.shape[0])
    eye_i = np.eye(ix1.shape[0])
    sx, sy, sz = (np.kron(o, eye_i) for o in (sx1, sy1, sz1))
    ix, iy, iz = (np.kron(eye_s, o) for o in (ix1, iy1, iz1))
    return SpinOperatorSet(sx=sx, sy=sy, sz=sz, ix=ix, iy=iy, iz=iz,
                           s_plus=sx + 1j * sy, s_minus=sx - 1j * sy)


def hamiltonian(system: SpinSystem, b0_t: float) -> np.ndarray:
    """Static Hamiltonian in Hz at field b0_t (tesla, along z).

    H/h = gamma_e B0 Sz - gamma_n B0 Iz + A (S . I).  At B0 = 0 this reduces
    to the pure hyperfine coupling A S.I.
    """
    if b0_t < 0:
        raise ValueError(f"b0_t must be >= 0 (field magnitude, z-oriented), got {b0_t}")
    ops = build_operators(system)
    zeeman = (system.gamma_electron_hz_per_t * b0_t * ops.sz
              - system.gamma_nuclear_hz_per_t * b0_t * ops.iz)
    hyperfine = system.hyperfine_hz * (ops.sx @ ops.ix + ops.sy @ ops.iy + ops.sz @ ops.iz)
    return zeeman + hyperfine


def diagonalize(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending, Hz) and orthonormal eigenvectors (columns).

    The input must be Hermitian to 1e-10 relative.  Every eigenpair is
    verified to satisfy ||H v - E v|| < 1e-9 ||H||.
    """
    h = np.asarray(h)
    scale = np.linalg.norm(h)
    herm_defect = np.linalg.norm(h - h.conj().T)
    if herm_defect > 1e-10 * max(scale, 1.0):
        raise ValueError(f"matrix is not Hermitian: defect {herm_defect:.3e} "
                         f"vs norm {scale:.3e}")
    try:
        energies, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed to converge: {exc}") from exc
    residual = np.linalg.norm(h @ vectors - vectors * energies, axis=0)
    worst = float(np.max(residual))
    if worst > 1e-9 * max(scale, 1.0):
        raise RuntimeError(f"eigenpair residual {worst:.3e} exceeds "
                           f"1e-9 * ||H|| = {1e-9 * scale:.3e}")
    return energies, vectors


@dataclass(frozen=True)
class LabeledEigenSystem:
    """Eigensystem at one field with (F, mF) labels.

    energies_hz is ascending; states holds the matching eigenvectors as
    columns; labels[k] belongs to energies_hz[k] / states[:, k].
    """

    field_b0_t: float
    energies_hz: np.ndarray
    states: np.ndarray
    labels: tuple[StateLabel, ...]

    def index_of(self, label) -> int:
        key = StateLabel(*label)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"no eigenstate labeled {key} "
                           f"(F must be in {sorted({l.f for l in self.labels})})") from None

    def energy_of(self, label) -> float:
        return float(self.energies_hz[self.index_of(label)])

    def state_of(self, label) -> np.ndarray:
        return self.states[:, self.index_of(label)]

    @property
    def _index(self) -> dict:
        # computed lazily; object.__setattr__ because the dataclass is frozen
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {lab: k for k, lab in enumerate(self.labels)}
            object.__setattr__(self, "_index_cache", cached)
        return cached


def _valid_mf_values(system: SpinSystem) -> np.ndarray:
    m_max = system.electron_spin + system.nuclear_spin
    n = int(round(2 * m_max)) + 1
    return m_max - np.arange(n)


def label_states(energies: np.ndarray, states: np.ndarray,
                 system: SpinSystem, b0_t: float) -> LabeledEigenSystem:
    """Attach (F, mF) labels to a diagonalized spectrum at b0_t > 0.

    mF comes from rounding <Sz + Iz>; F from energy order within each mF
    sector (higher energy => larger F, valid for A > 0 with no sector
    crossing).  At exactly zero field the sectors are degenerate and the
    expectation values are ambiguous, so b0_t must be positive; use 1 uT
    when zero-field labels are wanted.
    """
    if b0_t <= 0:
        raise ValueError("label_states requires b0_t > 0; the mF sectors are "
                         "degenerate at zero field (use e.g. 1e-6 T)")
    ops = build_operators(system)
    mf_op = ops.sz + ops.iz
    dim = system.dim
    if states.shape != (dim, dim) or len(energies) != dim:
        raise ValueError(f"eigensystem shape mismatch for dim {dim}")

    mf_expect = np.real(np.einsum("ik,ij,jk->k", states.conj(), mf_op, states))
    valid = _valid_mf_values(system)
    nearest = valid[np.argmin(np.abs(mf_expect[:, None] - valid[None, :]), axis=1)]
    defect = np.max(np.abs(mf_expect - nearest))
    if defect > 0.01:
        raise ValueError(f"<Sz+Iz> = off by {defect:.3g} from the nearest valid mF; "
                         "states appear mixed across mF sectors (degenerate field?)")

    f_min = abs(system.nuclear_spin - system.electron_spin)
    f_max = system.nuclear_spin + system.electron_spin
    n_f = int(round(f_max - f_min)) + 1
    all_f = f_min + np.arange(n_f)

    labels: list[StateLabel | None] = [None] * dim
    for mf in valid:
        sector = np.where(nearest == mf)[0]
        if len(sector) == 0:
            continue
        f_candidates = [f for f in all_f if f >= abs(mf) - 1e-9]
        if len(sector) != len(f_candidates):
            raise ValueError(f"mF = {mf} sector has {len(sector)} states, "
                             f"expected {len(f_candidates)}")
        # ascending energy <-> ascending F (A > 0 hyperfine ordering)
        for idx, f in zip(sector[np.argsort(energies[sector])], f_candidates):
            labels[idx] = StateLabel(float(f), float(mf))

    return LabeledEigenSystem(field_b0_t=b0_t, energies_hz=np.asarray(energies),
                              states=np.asarray(states), labels=tuple(labels))


def labeled_eigensystem(system: SpinSystem, b0_t: float) -> LabeledEigenSystem:
    """Diagonalize and label in one step."""
    energies, states = diagonalize(hamiltonian(system, b0_t))
    return label_states(energies, states, system, b0_t)


def analytic_breit_rabi(system: SpinSystem, b0_t: float) -> np.ndarray:
    """Closed-form eigenvalues (ascending, Hz) for S = 1/2 at field b0_t.

    Independent of the matrix diagonalization path; intended as a test
    oracle.  With a = gamma_e B0, b = -gamma_n B0, x = (a - b)/(A (I+1/2)):

        E+-(m) = -A/4 + b m +- (A (I+1/2)/2) sqrt(1 + 2 m x/(I+1/2) + x^2)

    for |m| < I + 1/2, while the stretched states m = +-(I + 1/2) are the
    uncoupled product states with E = +-a/2 +- b I + A I / 2.
    """
    if system.electron_spin != 0.5:
        raise ValueError("analytic Breit-Rabi formula requires electron_spin = 1/2")
    a = system.gamma_electron_hz_per_t * b0_t
    b = -system.gamma_nuclear_hz_per_t * b0_t
    A = system.hyperfine_hz
    i_n = system.nuclear_spin
    half_width = i_n + 0.5

    energies = [0.5 * a + b * i_n + 0.5 * A * i_n,
                -0.5 * a - b * i_n + 0.5 * A * i_n]
    x = (a - b) / (A * half_width)
    n_sectors = int(round(2 * i_n))  # m = -(I-1/2) ... +(I-1/2)
    for k in range(n_sectors):
        m = -(i_n - 0.5) + k
        root = np.sqrt(1.0 + 2.0 * m * x / half_width + x * x)
        center = -0.25 * A + b * m
        energies.append(center + 0.5 * A * half_width * root)
        energies.append(center - 0.5 * A * half_width * root)
    return np.sort(np.asarray(energies))
