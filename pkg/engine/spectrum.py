"""
spectrum.py — Probe-transmission spectrum container.

One Spectrum is one trace: an ordered detuning axis (γ_c-normalised angular
detuning), the transmission value at each point, an optional per-point
standard deviation, and free-form metadata (n_atoms, trace index, ...).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GridError


def check_grid(grid) -> np.ndarray:
    """Return `grid` as a float array, raising GridError unless it is
    non-empty and strictly increasing."""
    arr = np.asarray(grid, dtype=float).reshape(-1)
    if arr.size == 0:
        raise GridError('empty', 'detuning grid is empty')
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        bad = int(np.argmax(~(np.diff(arr) > 0)))
        raise GridError(
            'non_monotone',
            f'detuning grid must be strictly increasing (index {bad + 1}: '
            f'{arr[bad + 1]!r} after {arr[bad]!r})',
        )
    return arr


@dataclass
class Spectrum:
    """Ordered (detuning, value, sigma) samples of one trace."""
    detuning: np.ndarray
    value: np.ndarray
    sigma: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.detuning = check_grid(self.detuning)
        self.value = np.asarray(self.value, dtype=float).reshape(-1)
        if self.value.shape != self.detuning.shape:
            raise ValueError(
                f"value has {self.value.size} samples, detuning has {self.detuning.size}"
            )
        if self.sigma is not None:
            self.sigma = np.asarray(self.sigma, dtype=float).reshape(-1)
            if self.sigma.shape != self.detuning.shape:
                raise ValueError('sigma must be given for all points or none')
            if not np.all(self.sigma > 0):
                raise ValueError('sigma must be strictly positive')

    def __len__(self) -> int:
        return int(self.detuning.size)

    @property
    def weights(self) -> np.ndarray:
        """Per-point 1/sigma (ones when sigma is absent)."""
        if self.sigma is None:
            return np.ones_like(self.value)
        return 1.0 / self.sigma

    @property
    def n_atoms(self) -> Optional[float]:
        return self.meta.get('n_atoms')
