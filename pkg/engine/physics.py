"""
physics.py — Coupling strengths and normal-mode positions from physical inputs.

Far-detuned two-level dispersive coupling of N atoms, arranged in an optical
lattice, to the two counter-propagating modes of a ring cavity:

  g_δ   = g₀ / √(1 + 4(δ/Γ)²)               single-atom coupling at detuning δ
  δ_ef  = δ_c − N·g_δ·ξ_rad                  effective probe-cavity detuning
  g_ef  = N·g_δ·ξ_rad·ξ_ax                   lattice-mediated mode coupling
  shifts N·g_δ·ξ_rad·(1 ± ξ_ax)              normal-mode frequency shifts

Functions are unit-agnostic: all angular-frequency fields of one call must
share a unit (rad/s for configs, multiples of γ_c for the model core).
"""

import logging
import math
from dataclasses import dataclass, replace

from scipy.constants import c as SPEED_OF_LIGHT

from .errors import InvalidParamsError, NonPositiveCouplingError, ZeroDetuningError

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════
#  CONSTANTS
# ═══════════════════════════════════════════════════════════════

FSR_TOLERANCE = 0.01          # fsr vs c / round trip
LINEWIDTH_TOLERANCE = 0.05    # γ_c vs π·FSR/F


# ═══════════════════════════════════════════════════════════════
#  DATA STRUCTURES
# ═══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class CavityParams:
    """Static ring-cavity properties (SI: rad/s, Hz, m)."""
    gamma_c: float          # field decay rate, rad/s
    finesse: float
    round_trip_m: float
    fsr: float              # free spectral range, Hz
    waist_m: float

    def __post_init__(self):
        for name in ('gamma_c', 'finesse', 'round_trip_m', 'fsr', 'waist_m'):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidParamsError(name, f'must be > 0, got {value!r}')
        expected = fsr_from_round_trip(self.round_trip_m)
        if abs(self.fsr - expected) > FSR_TOLERANCE * expected:
            logger.warning(
                "fsr %.6g Hz differs from c/round_trip = %.6g Hz by more than %.0f%%",
                self.fsr, expected, FSR_TOLERANCE * 100,
            )


@dataclass(frozen=True)
class AtomCouplingParams:
    """Atomic sample and detuning; angular frequencies in one common unit."""
    g0: float               # resonant single-atom coupling ω₀²/2Γ
    gamma_atom: float       # spontaneous decay Γ
    delta_atom: float       # detuning from resonance (negative = red)
    n_atoms: float = 0.0
    xi_rad: float = 1.0
    xi_ax: float = 1.0

    def __post_init__(self):
        if not self.gamma_atom > 0:
            raise InvalidParamsError('gamma_atom', f'must be > 0, got {self.gamma_atom!r}')
        if not self.n_atoms >= 0:
            raise InvalidParamsError('n_atoms', f'must be >= 0, got {self.n_atoms!r}')
        for name in ('xi_rad', 'xi_ax'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidParamsError(name, f'must lie in [0, 1], got {value!r}')

    def with_atoms(self, n_atoms: float) -> 'AtomCouplingParams':
        return replace(self, n_atoms=n_atoms)

    def in_units_of(self, unit: float) -> 'AtomCouplingParams':
        """Express every angular frequency as a multiple of `unit` (e.g. γ_c)."""
        return replace(
            self,
            g0=self.g0 / unit,
            gamma_atom=self.gamma_atom / unit,
            delta_atom=self.delta_atom / unit,
        )


# ═══════════════════════════════════════════════════════════════
#  CAVITY
# ═══════════════════════════════════════════════════════════════

def fsr_from_round_trip(round_trip_m: float) -> float:
    return SPEED_OF_LIGHT / round_trip_m


def cavity_linewidth_hz(cav: CavityParams) -> float:
    """Full intensity linewidth FSR/F in Hz."""
    return cav.fsr / cav.finesse


def gamma_c_from_finesse(cav: CavityParams) -> float:
    """Field decay rate π·FSR/F (rad/s); warns when it disagrees with cav.gamma_c."""
    gamma = math.pi * cav.fsr / cav.finesse
    if abs(gamma - cav.gamma_c) > LINEWIDTH_TOLERANCE * cav.gamma_c:
        logger.warning(
            "gamma_c from FSR/finesse (%.6g rad/s) differs from configured %.6g rad/s",
            gamma, cav.gamma_c,
        )
    return gamma


def photon_storage_time(cav: CavityParams) -> float:
    """Intra-cavity intensity decay time 1/(2γ_c), seconds."""
    return 1.0 / (2.0 * cav.gamma_c)


def wavelength_offset_to_detuning(offset_nm: float, wavelength_nm: float) -> float:
    """
    Angular detuning for a laser `offset_nm` to the red of a line at
    `wavelength_nm`: δ = −2πc·Δλ/λ² (first-order dispersion of ν(λ)).
    """
    lam = wavelength_nm * 1e-9
    return -2.0 * math.pi * SPEED_OF_LIGHT * (offset_nm * 1e-9) / (lam * lam)


# ═══════════════════════════════════════════════════════════════
#  COUPLING
# ═══════════════════════════════════════════════════════════════

def coupling_detuned(p: AtomCouplingParams) -> float:
    """g_δ = g₀/√(1 + 4(δ/Γ)²); even in δ, decreasing in |δ|."""
    return p.g0 / math.hypot(1.0, 2.0 * p.delta_atom / p.gamma_atom)


def signed_coupling(p: AtomCouplingParams) -> float:
    """g_δ carrying the sign of the light shift (negative for red detuning)."""
    return math.copysign(coupling_detuned(p), p.delta_atom)


def light_shift_per_photon(p: AtomCouplingParams) -> float:
    """ω₀²/4δ = g₀Γ/2δ, the far-detuned limit of the signed coupling."""
    if p.delta_atom == 0:
        raise ZeroDetuningError()
    return p.g0 * p.gamma_atom / (2.0 * p.delta_atom)


def effective_params(p: AtomCouplingParams, delta_c: float) -> tuple:
    """
    Map an empty-cavity detuning onto the model's axis.

    Returns:
        (delta_ef, g_ef) with delta_ef = δ_c − N·g_δ·ξ_rad (signed g_δ) and
        g_ef = |N·g_δ·ξ_rad·ξ_ax|.
    """
    forward = p.n_atoms * signed_coupling(p) * p.xi_rad
    return delta_c - forward, abs(forward * p.xi_ax)


def normal_mode_shifts(p: AtomCouplingParams) -> tuple:
    """Ordered shifts N·g_δ·ξ_rad·(1 ± ξ_ax); their difference is 2·g_ef."""
    forward = p.n_atoms * signed_coupling(p) * p.xi_rad
    a = forward * (1.0 - p.xi_ax)
    b = forward * (1.0 + p.xi_ax)
    return (a, b) if a <= b else (b, a)


def scc_threshold(p: AtomCouplingParams, cav: CavityParams) -> int:
    """
    Smallest atom number with N·|g_δ|·ξ_rad·ξ_ax > γ_c.

    `p` must be expressed in the same unit as cav.gamma_c.

    Raises:
        NonPositiveCouplingError: |g_δ|·ξ_rad·ξ_ax is zero.
    """
    per_atom = coupling_detuned(p) * p.xi_rad * p.xi_ax
    if not per_atom > 0:
        raise NonPositiveCouplingError(per_atom)
    return int(math.floor(cav.gamma_c / per_atom)) + 1
