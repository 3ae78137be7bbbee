"""
synth.py — Synthetic probe-transmission spectra.

Forward-simulates the measurement: evaluates the transfer model on a detuning
grid and adds seeded noise. generate_series() builds a whole atom-number
ladder from physical parameters, the way the experiment records one trace
per loaded atom number.

Noise is drawn from a counter-based Philox stream; identical inputs (seed
included) give bit-identical spectra.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .model import DEFAULT_EPSILON, SpectrumModelParams, fit_model
from .physics import AtomCouplingParams, CavityParams, effective_params
from .spectrum import Spectrum, check_grid

logger = logging.getLogger(__name__)

__all__ = [
    'Spectrum', 'NoiseKind', 'NoiseSpec', 'SeriesTruth', 'REFERENCE_LADDER',
    'default_grid', 'generate_spectrum', 'generate_series',
]


# ═══════════════════════════════════════════════════════════════
#  CONSTANTS
# ═══════════════════════════════════════════════════════════════

# Atom numbers of the eleven recorded traces (empty cavity first).
REFERENCE_LADDER = (
    0.0, 0.28e6, 0.55e6, 0.83e6, 1.10e6, 1.38e6,
    1.66e6, 1.93e6, 2.21e6, 2.48e6, 2.76e6,
)

DEFAULT_GRID_POINTS = 801
DEFAULT_GRID_MARGIN = 6.0     # in units of γ_c beyond the outer normal modes

AXES = ('lattice', 'cavity')


# ═══════════════════════════════════════════════════════════════
#  DATA STRUCTURES
# ═══════════════════════════════════════════════════════════════

class NoiseKind(str, Enum):
    NONE = 'none'
    GAUSSIAN = 'gaussian'


@dataclass(frozen=True)
class NoiseSpec:
    """Additive noise model. GAUSSIAN with sigma_abs = 0 behaves as NONE."""
    kind: NoiseKind = NoiseKind.NONE
    sigma_abs: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'kind', NoiseKind(self.kind))
        if not self.sigma_abs >= 0:
            raise ValueError(f'sigma_abs must be >= 0, got {self.sigma_abs!r}')
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError(f'seed must be a 64-bit unsigned integer, got {self.seed!r}')

    @property
    def active(self) -> bool:
        return self.kind is NoiseKind.GAUSSIAN and self.sigma_abs > 0

    def for_trace(self, index: int) -> 'NoiseSpec':
        """Independent stream for trace `index` of a series."""
        state = np.random.SeedSequence([int(self.seed), int(index)]).generate_state(1, np.uint64)
        return NoiseSpec(self.kind, self.sigma_abs, int(state[0]))


@dataclass(frozen=True)
class SeriesTruth:
    """Generator-side values of the parameters physics does not determine."""
    chi: float = 0.0
    scale_s: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    # R = retro_per_million · N / 1e6 where g_ef > γ_c, else 0
    retro_per_million: float = 0.0
    axis: str = 'lattice'

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")


# ═══════════════════════════════════════════════════════════════
#  SINGLE SPECTRUM
# ═══════════════════════════════════════════════════════════════

def default_grid(g_ef_max: float, points: int = DEFAULT_GRID_POINTS,
                 margin: float = DEFAULT_GRID_MARGIN,
                 center_shift: float = 0.0) -> np.ndarray:
    """
    Grid on the lattice-referenced axis (lower normal mode at 0, upper at
    2·g_ef), spanning [−margin, margin + 2·g_ef_max] + center_shift.
    """
    return np.linspace(-margin, margin + 2.0 * g_ef_max, points) + center_shift


def generate_spectrum(grid, p: SpectrumModelParams, noise: NoiseSpec = NoiseSpec(),
                      delta_offset: float = 0.0, meta: Optional[dict] = None) -> Spectrum:
    """
    value_i = fit_model(grid_i − delta_offset, p) + noise_i.

    With active noise every point carries sigma = noise.sigma_abs.

    Raises:
        GridError: grid empty or not strictly increasing.
    """
    x = check_grid(grid)
    values = np.asarray(fit_model(x - delta_offset, p), dtype=float)
    sigma = None
    if noise.active:
        rng = np.random.Generator(np.random.Philox(int(noise.seed)))
        values = values + rng.normal(0.0, noise.sigma_abs, size=x.size)
        sigma = np.full(x.size, noise.sigma_abs)
    return Spectrum(detuning=x, value=values, sigma=sigma, meta=dict(meta or {}))


# ═══════════════════════════════════════════════════════════════
#  SERIES
# ═══════════════════════════════════════════════════════════════

def _trace_truth(n_atoms: float, base: AtomCouplingParams, cav: CavityParams,
                 truth: SeriesTruth) -> tuple:
    """(model params, delta_offset) for one atom number, in γ_c units."""
    atoms = base.with_atoms(n_atoms).in_units_of(cav.gamma_c)
    shifted, g_ef = effective_params(atoms, 0.0)   # shifted = −N·g_δ·ξ_rad
    retro = truth.retro_per_million * n_atoms / 1e6 if g_ef > 1.0 else 0.0
    params = SpectrumModelParams(
        g_ef=g_ef, chi=truth.chi, retro_r=retro,
        scale_s=truth.scale_s, epsilon=truth.epsilon, gamma_c=1.0,
    )
    # axis value x relates to the model axis by δ_ef = x − delta_offset
    offset = g_ef if truth.axis == 'lattice' else -shifted
    return params, offset


def series_grid(n_list, base: AtomCouplingParams, cav: CavityParams,
                truth: SeriesTruth = SeriesTruth(),
                points: int = DEFAULT_GRID_POINTS,
                margin: float = DEFAULT_GRID_MARGIN) -> np.ndarray:
    """Common grid keeping both normal modes of every trace in the window."""
    traces = [_trace_truth(n, base, cav, truth) for n in n_list]
    if truth.axis == 'lattice':
        return default_grid(max(p.g_ef for p, _ in traces), points, margin)
    lo = min(off - p.g_ef for p, off in traces) - margin
    hi = max(off + p.g_ef for p, off in traces) + margin
    return np.linspace(lo, hi, points)


def generate_series(n_list, base: AtomCouplingParams, cav: CavityParams,
                    grid=None, noise: NoiseSpec = NoiseSpec(),
                    truth: SeriesTruth = SeriesTruth(),
                    max_workers: int = 1) -> list:
    """
    One spectrum per atom number, parameters derived via physics.

    Args:
        n_list: atom numbers (>= 0)
        base: atomic parameters in rad/s (n_atoms is overridden per trace)
        cav: cavity parameters; cav.gamma_c sets the normalisation
        grid: detuning grid in γ_c units (None → series_grid())
        noise: noise model; trace i uses noise.for_trace(i)
        truth: χ, S, ε, retroaction law and axis convention
        max_workers: >1 generates traces in a thread pool (same output)

    Returns:
        list of Spectrum in input order; meta holds n_atoms, trace index and
        the generating parameters.
    """
    n_list = list(n_list)
    if not n_list:
        raise ValueError('n_list is empty')
    if any(not n >= 0 for n in n_list):
        raise ValueError('atom numbers must be >= 0')
    if grid is None:
        grid = series_grid(n_list, base, cav, truth)
    grid = check_grid(grid)

    def _one(index: int) -> Spectrum:
        n_atoms = n_list[index]
        params, offset = _trace_truth(n_atoms, base, cav, truth)
        meta = {
            'trace': index + 1,
            'n_atoms': n_atoms,
            'g_ef': params.g_ef,
            'chi': params.chi,
            'retro_r': params.retro_r,
            'scale_s': params.scale_s,
            'epsilon': params.epsilon,
            'delta_offset': offset,
            'axis': truth.axis,
        }
        logger.info("trace %d: N=%.6g g_ef=%.4g R=%.4g", index + 1, n_atoms,
                    params.g_ef, params.retro_r)
        return generate_spectrum(grid, params, noise.for_trace(index), offset, meta)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(_one, range(len(n_list))))
    return [_one(i) for i in range(len(n_list))]
