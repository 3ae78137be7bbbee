#!/usr/bin/env python3
"""
test_synth.py — Synthetic spectra and atom-number series.

Usage:
    python tests/test_synth.py
"""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from engine.analysis import estimate_splitting
from engine.errors import GridError
from engine.model import SpectrumModelParams, fit_model, model_curve
from engine.physics import coupling_detuned
from engine.synth import (
    REFERENCE_LADDER, NoiseKind, NoiseSpec, SeriesTruth, default_grid,
    generate_series, generate_spectrum,
)

GRID = np.linspace(-10, 10, 401)
PARAMS = SpectrumModelParams(g_ef=3.0, chi=0.4, retro_r=0.2, scale_s=1.0)


# ═══════════════════════════════════════════════════════════════
#  SINGLE SPECTRUM
# ═══════════════════════════════════════════════════════════════

def test_noiseless_spectrum_equals_model_curve():
    spec = generate_spectrum(GRID, PARAMS)
    assert np.array_equal(spec.value, model_curve(GRID, PARAMS).value)
    assert spec.sigma is None


def test_zero_sigma_gaussian_is_noiseless():
    spec = generate_spectrum(GRID, PARAMS, NoiseSpec(NoiseKind.GAUSSIAN, 0.0, seed=5))
    assert np.array_equal(spec.value, fit_model(GRID, PARAMS))


def test_same_seed_is_bit_identical():
    noise = NoiseSpec('gaussian', 0.01, seed=42)
    a = generate_spectrum(GRID, PARAMS, noise)
    b = generate_spectrum(GRID, PARAMS, noise)
    assert np.array_equal(a.value, b.value)
    c = generate_spectrum(GRID, PARAMS, NoiseSpec('gaussian', 0.01, seed=43))
    assert not np.array_equal(a.value, c.value)


def test_noise_level_and_sigma():
    noise = NoiseSpec('gaussian', 0.02, seed=1)
    spec = generate_spectrum(np.linspace(-50, 50, 5001), PARAMS, noise)
    resid = spec.value - fit_model(spec.detuning, PARAMS)
    assert np.std(resid) == pytest.approx(0.02, rel=0.05)
    assert abs(np.mean(resid)) < 5 * 0.02 / np.sqrt(resid.size)
    assert np.all(spec.sigma == 0.02)


def test_noise_on_zero_model_matches_requested_sigma():
    noise = NoiseSpec('gaussian', 0.03, seed=11)
    spec = generate_spectrum(np.linspace(-50, 50, 100_000), PARAMS.replace(scale_s=0.0), noise)
    assert np.std(spec.value, ddof=1) == pytest.approx(0.03, rel=0.02)


def test_delta_offset_shifts_axis():
    spec = generate_spectrum(GRID, PARAMS, delta_offset=1.5)
    np.testing.assert_array_equal(spec.value, fit_model(GRID - 1.5, PARAMS))


def test_grid_errors():
    with pytest.raises(GridError):
        generate_spectrum([], PARAMS)
    with pytest.raises(GridError):
        generate_spectrum([1.0, 0.0], PARAMS)


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec('gaussian', -1.0)
    with pytest.raises(ValueError):
        NoiseSpec('uniform', 1.0)
    with pytest.raises(ValueError):
        NoiseSpec('gaussian', 1.0, seed=-1)
    assert not NoiseSpec().active


def test_trace_streams_differ():
    noise = NoiseSpec('gaussian', 0.1, seed=9)
    assert noise.for_trace(0).seed != noise.for_trace(1).seed
    assert noise.for_trace(3) == noise.for_trace(3)


def test_default_grid_covers_both_modes():
    grid = default_grid(2.0, points=101, margin=5.0)
    assert grid[0] == -5.0 and grid[-1] == pytest.approx(9.0)
    assert grid.size == 101


# ═══════════════════════════════════════════════════════════════
#  SERIES
# ═══════════════════════════════════════════════════════════════

def test_ladder_meta_and_linear_coupling(ladder, run_config):
    assert len(ladder) == len(REFERENCE_LADDER) == 11
    assert [s.meta['n_atoms'] for s in ladder] == list(REFERENCE_LADDER)

    atoms = run_config.atom_params().in_units_of(run_config.gamma_c_rad_s)
    per_atom = coupling_detuned(atoms) * atoms.xi_rad * atoms.xi_ax
    for spec in ladder:
        assert spec.meta['g_ef'] == pytest.approx(spec.n_atoms * per_atom, rel=1e-12, abs=1e-300)
        # lattice axis: lower normal mode at 0
        assert spec.meta['delta_offset'] == spec.meta['g_ef']
        assert spec.meta['axis'] == 'lattice'


def test_doubling_atom_numbers_doubles_splittings(run_config):
    atoms, cav = run_config.atom_params(), run_config.cavity_params()
    n_list = [0.28e6, 0.83e6, 1.38e6]
    single = generate_series(n_list, atoms, cav)
    double = generate_series([2 * n for n in n_list], atoms, cav)
    for a, b in zip(single, double):
        assert b.meta['g_ef'] == pytest.approx(2 * a.meta['g_ef'], rel=1e-14)


def test_largest_trace_peaks_split_by_twice_coupling(ladder):
    top = ladder[-1]
    g_ef = top.meta['g_ef']
    assert g_ef > 1.0
    # peak pulling moves each maximum by at most γ_c²/g_ef
    assert estimate_splitting(top) == pytest.approx(2 * g_ef, abs=2.0 / g_ef)


def test_empty_trace_is_lorentzian_at_zero(ladder):
    empty = ladder[0]
    assert empty.meta['g_ef'] == 0.0
    assert empty.detuning[np.argmax(empty.value)] == pytest.approx(0.0, abs=empty.detuning[1] - empty.detuning[0])


def test_retroaction_only_above_threshold(run_config):
    truth = SeriesTruth(retro_per_million=0.1)
    series = generate_series(REFERENCE_LADDER, run_config.atom_params(), run_config.cavity_params(),
                             truth=truth)
    for spec in series:
        if spec.meta['g_ef'] > 1.0:
            assert spec.meta['retro_r'] == pytest.approx(0.1 * spec.n_atoms / 1e6)
        else:
            assert spec.meta['retro_r'] == 0.0


def test_cavity_axis_offsets(run_config):
    series = generate_series([0.0, 2.0e6], run_config.atom_params(), run_config.cavity_params(),
                             truth=SeriesTruth(axis='cavity'))
    assert series[0].meta['delta_offset'] == 0.0
    # red detuning pulls both modes below the empty-cavity resonance
    assert series[1].meta['delta_offset'] < 0.0
    assert np.array_equal(series[0].detuning, series[1].detuning)


def test_parallel_generation_matches_sequential(run_config):
    noise = NoiseSpec('gaussian', 0.01, seed=7)
    args = (REFERENCE_LADDER[:5], run_config.atom_params(), run_config.cavity_params())
    seq = generate_series(*args, noise=noise)
    par = generate_series(*args, noise=noise, max_workers=4)
    for a, b in zip(seq, par):
        assert np.array_equal(a.value, b.value)
        assert a.meta == b.meta


def test_series_is_reproducible(run_config):
    noise = NoiseSpec('gaussian', 0.01, seed=7)
    args = (REFERENCE_LADDER, run_config.atom_params(), run_config.cavity_params())
    first = generate_series(*args, noise=noise)
    second = generate_series(*args, noise=noise)
    assert all(np.array_equal(a.value, b.value) for a, b in zip(first, second))

    clean = generate_series(*args)
    noise_1 = first[1].value - clean[1].value
    noise_2 = first[2].value - clean[2].value
    assert not np.allclose(noise_1, noise_2)


def test_series_input_errors(run_config):
    with pytest.raises(ValueError):
        generate_series([], run_config.atom_params(), run_config.cavity_params())
    with pytest.raises(ValueError):
        generate_series([-1.0], run_config.atom_params(), run_config.cavity_params())
    with pytest.raises(ValueError):
        SeriesTruth(axis='bogus')


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
