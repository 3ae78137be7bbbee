"""
model.py — Steady-state two-mode transfer model of the probed ring cavity.

Evaluates the intra-cavity probe intensities M± of the two counter-propagating
modes coupled by Bragg back-scattering from the atomic grating, and the
composite transmission model

    M(δ_ef) = S · [M₊(δ_ef) − R · M₋(δ_ef)]

used to fit measured spectra. All frequencies are in one consistent unit; the
rest of the engine uses angular frequency normalised by γ_c (γ_c = 1).

Pure functions without state; callable from any thread.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParamsError
from .spectrum import Spectrum, check_grid


# ═══════════════════════════════════════════════════════════════
#  CONSTANTS
# ═══════════════════════════════════════════════════════════════

# Probe coupling asymmetry of the experiment: 96.5 % / 3.5 % split.
DEFAULT_EPSILON = 0.93


def wrap_phase(chi):
    """Map a phase (scalar or array) into [−π, π)."""
    wrapped = np.mod(np.asarray(chi, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


# ═══════════════════════════════════════════════════════════════
#  DATA STRUCTURES
# ═══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class SpectrumModelParams:
    """Parameters of one model curve.

    g_ef, chi, retro_r and scale_s are the fit parameters; epsilon and
    gamma_c are normally held fixed.
    """
    g_ef: float = 0.0
    chi: float = 0.0
    retro_r: float = 0.0
    scale_s: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    gamma_c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'chi', wrap_phase(self.chi))

    def check_evaluable(self):
        """The two conditions the transfer model itself needs."""
        if not self.gamma_c > 0:
            raise InvalidParamsError('gamma_c', f'must be > 0, got {self.gamma_c!r}')
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidParamsError('epsilon', f'must lie in [0, 1], got {self.epsilon!r}')

    def validate(self):
        """Full invariant check (config parsing, fitter bounds)."""
        self.check_evaluable()
        if not self.g_ef >= 0:
            raise InvalidParamsError('g_ef', f'must be >= 0, got {self.g_ef!r}')
        if not self.retro_r >= 0:
            raise InvalidParamsError('retro_r', f'must be >= 0, got {self.retro_r!r}')
        # S = 0 is a legal degenerate curve; the fitter bounds S away from 0.
        if not self.scale_s >= 0:
            raise InvalidParamsError('scale_s', f'must be >= 0, got {self.scale_s!r}')
        return self

    def replace(self, **changes) -> 'SpectrumModelParams':
        return replace(self, **changes)


# ═══════════════════════════════════════════════════════════════
#  CORE EVALUATION
# ═══════════════════════════════════════════════════════════════

def transfer_intensities(delta_ef, g_ef, chi, epsilon, gamma_c):
    """Unchecked vectorised M± for raw numbers; see m_pm()."""
    x = np.asarray(delta_ef, dtype=float)
    a_plus = math.sqrt(1.0 + epsilon)
    a_minus = math.sqrt(max(1.0 - epsilon, 0.0))
    phase = complex(math.cos(chi), math.sin(chi))

    free = 1j * x - gamma_c
    denom = (1j * (x - g_ef) - gamma_c) * (1j * (x + g_ef) - gamma_c)
    num_plus = a_plus * free + 1j * a_minus * g_ef * phase
    num_minus = a_minus * free + 1j * a_plus * g_ef * phase.conjugate()

    d2 = denom.real ** 2 + denom.imag ** 2
    m_plus = (num_plus.real ** 2 + num_plus.imag ** 2) / d2
    m_minus = (num_minus.real ** 2 + num_minus.imag ** 2) / d2
    return m_plus, m_minus


def _as_output(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def m_pm(delta_ef, p: SpectrumModelParams):
    """
    Intra-cavity probe intensities of the (+) and (−) modes.

        M± = | [√(1±ε)(iδ_ef − γ_c) + i√(1∓ε) g_ef e^{±iχ}]
               / [(i(δ_ef − g_ef) − γ_c)(i(δ_ef + g_ef) − γ_c)] |²

    Args:
        delta_ef: effective probe-cavity detuning (scalar or array)
        p: model parameters

    Returns:
        (m_plus, m_minus): floats for scalar input, arrays otherwise.
        Both are finite and >= 0 (|denominator| >= γ_c²).

    Raises:
        InvalidParamsError: γ_c <= 0 or ε outside [0, 1].
    """
    p.check_evaluable()
    m_plus, m_minus = transfer_intensities(delta_ef, p.g_ef, p.chi, p.epsilon, p.gamma_c)
    return _as_output(m_plus, delta_ef), _as_output(m_minus, delta_ef)


def fit_model(delta_ef, p: SpectrumModelParams):
    """S·(M₊ − R·M₋). Negative values are kept: the reflected-probe term can
    pull the signal below the off-resonant level."""
    m_plus, m_minus = m_pm(delta_ef, p)
    return p.scale_s * (m_plus - p.retro_r * m_minus)


def model_curve(grid, p: SpectrumModelParams) -> Spectrum:
    """
    Evaluate fit_model over a detuning grid.

    Raises:
        GridError: grid empty or not strictly increasing.
    """
    x = check_grid(grid)
    values = np.asarray(fit_model(x, p), dtype=float)
    return Spectrum(
        detuning=x,
        value=values,
        meta={
            'g_ef': p.g_ef, 'chi': p.chi, 'retro_r': p.retro_r,
            'scale_s': p.scale_s, 'epsilon': p.epsilon, 'gamma_c': p.gamma_c,
        },
    )
