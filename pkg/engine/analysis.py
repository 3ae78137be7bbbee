"""
analysis.py — Model-free diagnostics for transmission spectra.

Peak search, splitting estimates and the inversions used to cross-check
fitted couplings: inferred axial localisation ξ_ax, the weak/strong
cooperative coupling classification and the spread of the fitted scale S
across a series.

Peak-based splittings are biased low for g_ef ≲ 2γ_c, where the wings of
the two normal modes overlap and pull the maxima together. The fitter stays
the reference for g_ef; these numbers are a sanity check.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import signal

from .errors import ZeroDenominatorError
from .physics import AtomCouplingParams, coupling_detuned
from .spectrum import Spectrum

logger = logging.getLogger(__name__)

# Peaks below this fraction of the value range are noise for splitting estimates.
SPLITTING_PROMINENCE = 0.01


class SCCRegime(str, Enum):
    WEAK = 'weak'
    STRONG = 'strong'


@dataclass(frozen=True)
class XiAxEstimate:
    """ξ_ax inferred from a splitting; `value` is clamped into [0, 1]."""
    value: float
    raw: float
    in_range: bool


# ═══════════════════════════════════════════════════════════════
#  PEAKS
# ═══════════════════════════════════════════════════════════════

def _peak_table(s: Spectrum, min_prominence: float) -> tuple:
    """(positions, heights, prominences) of local maxima, ascending in detuning."""
    if len(s) < 3:
        return np.empty(0), np.empty(0), np.empty(0)
    idx, props = signal.find_peaks(s.value, prominence=min_prominence, plateau_size=1)
    left = props['left_edges']
    right = props['right_edges']
    # plateau maxima report the midpoint of the flat top
    positions = 0.5 * (s.detuning[left] + s.detuning[right])
    return positions, s.value[idx], props['prominences']


def find_peaks(s: Spectrum, min_prominence: float = 0.0) -> list:
    """
    Local maxima whose prominence (height above the higher of the two
    flanking minima) is at least `min_prominence`.

    Returns:
        list of (detuning, height) in ascending detuning; may be empty.
    """
    if min_prominence < 0:
        raise ValueError('min_prominence must be >= 0')
    positions, heights, _ = _peak_table(s, min_prominence)
    return [(float(x), float(h)) for x, h in zip(positions, heights)]


def strongest_peak_pair(s: Spectrum, rel_prominence: float = SPLITTING_PROMINENCE) -> Optional[tuple]:
    """
    Positions (low, high) of the two most prominent peaks, or None.

    Prominence is thresholded relative to the value range, so the result
    does not change under offsets or positive rescaling of the values.
    """
    span = float(np.ptp(s.value)) if len(s) else 0.0
    if span <= 0:
        return None
    positions, _, prominences = _peak_table(s, rel_prominence * span)
    if positions.size < 2:
        return None
    top = np.argsort(prominences, kind='stable')[::-1][:2]
    lo, hi = sorted(float(positions[i]) for i in top)
    return lo, hi


def estimate_splitting(s: Spectrum) -> Optional[float]:
    """Distance between the two most prominent peaks (≈ 2·g_ef), or None."""
    pair = strongest_peak_pair(s)
    if pair is None:
        return None
    return pair[1] - pair[0]


# ═══════════════════════════════════════════════════════════════
#  INVERSIONS / CLASSIFICATION
# ═══════════════════════════════════════════════════════════════

def infer_xi_ax(splitting: float, p: AtomCouplingParams) -> XiAxEstimate:
    """
    ξ_ax = splitting / (2N·|g_δ|·ξ_rad).

    `splitting` and the angular frequencies of `p` must share a unit.

    Raises:
        ZeroDenominatorError: N, g_δ or ξ_rad is zero.
    """
    denom = 2.0 * p.n_atoms * coupling_detuned(p) * p.xi_rad
    if denom == 0:
        raise ZeroDenominatorError('2·N·|g_δ|·ξ_rad is zero; ξ_ax cannot be inferred')
    raw = splitting / denom
    in_range = 0.0 <= raw <= 1.0
    if not in_range:
        logger.warning("inferred xi_ax %.4g lies outside [0, 1]; clamped", raw)
    return XiAxEstimate(value=min(max(raw, 0.0), 1.0), raw=raw, in_range=in_range)


def classify_scc(g_ef: float, gamma_c: float = 1.0) -> SCCRegime:
    """STRONG iff g_ef > γ_c (the boundary counts as weak)."""
    return SCCRegime.STRONG if g_ef > gamma_c else SCCRegime.WEAK


def scale_spread(table: list) -> float:
    """(max S − min S) / mean S over successful batch rows, in percent."""
    values = np.array([row.result.params.scale_s for row in table if row.ok], dtype=float)
    if values.size == 0:
        return float('nan')
    return float((values.max() - values.min()) / values.mean() * 100.0)
