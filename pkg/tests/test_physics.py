#!/usr/bin/env python3
"""
test_physics.py — Detuned coupling, effective parameters, normal modes, SCC threshold.

Usage:
    python tests/test_physics.py
"""
import dataclasses
import logging
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from engine.errors import InvalidParamsError, NonPositiveCouplingError, ZeroDetuningError
from engine.physics import (
    AtomCouplingParams, CavityParams, cavity_linewidth_hz, coupling_detuned,
    effective_params, fsr_from_round_trip, gamma_c_from_finesse, light_shift_per_photon,
    normal_mode_shifts, photon_storage_time, scc_threshold, signed_coupling,
    wavelength_offset_to_detuning,
)
from engine.synth import REFERENCE_LADDER

GAMMA_C = math.pi * 17.5e3


def _atoms(**kw):
    base = dict(g0=1.0, gamma_atom=10.0, delta_atom=-50.0, n_atoms=0.0, xi_rad=1.0, xi_ax=1.0)
    base.update(kw)
    return AtomCouplingParams(**base)


# ═══════════════════════════════════════════════════════════════
#  COUPLING
# ═══════════════════════════════════════════════════════════════

def test_resonant_coupling_is_g0():
    assert coupling_detuned(_atoms(delta_atom=0.0, g0=0.67)) == 0.67


def test_coupling_even_and_decreasing_in_detuning():
    deltas = np.linspace(0, 200, 41)
    values = [coupling_detuned(_atoms(delta_atom=d)) for d in deltas]
    assert all(a > b for a, b in zip(values, values[1:]))
    for d in deltas:
        assert coupling_detuned(_atoms(delta_atom=d)) == coupling_detuned(_atoms(delta_atom=-d))


def test_signed_coupling_follows_light_shift_sign():
    assert signed_coupling(_atoms(delta_atom=-50.0)) < 0
    assert signed_coupling(_atoms(delta_atom=50.0)) > 0
    far = _atoms(delta_atom=-1e6)
    assert signed_coupling(far) == pytest.approx(light_shift_per_photon(far), rel=1e-9)


def test_light_shift_undefined_on_resonance():
    with pytest.raises(ZeroDetuningError):
        light_shift_per_photon(_atoms(delta_atom=0.0))


@pytest.mark.parametrize('ratio, tol', [(50, 1e-4), (100, 2.5e-5), (300, 2.5e-5), (1e4, 2.5e-5)])
def test_light_shift_approaches_coupling_far_from_resonance(ratio, tol):
    for sign in (-1.0, 1.0):
        p = _atoms(delta_atom=sign * ratio * 10.0)
        assert abs(light_shift_per_photon(p)) == pytest.approx(coupling_detuned(p), rel=tol)


def test_doubling_detuning_halves_light_shift():
    for delta in (-37.0, -500.0, 120.0):
        once = light_shift_per_photon(_atoms(delta_atom=delta))
        twice = light_shift_per_photon(_atoms(delta_atom=2 * delta))
        assert twice == pytest.approx(once / 2, rel=1e-15)


def test_configured_detuning_and_coupling(run_config):
    atoms = run_config.atom_params()
    # 0.7 nm red of 780.24 nm
    assert atoms.delta_atom == pytest.approx(-2.166e12, rel=1e-3)
    assert wavelength_offset_to_detuning(0.7, 780.24) < 0
    g_delta = coupling_detuned(atoms.in_units_of(GAMMA_C))
    assert g_delta == pytest.approx(5.899e-6, rel=1e-3)


# ═══════════════════════════════════════════════════════════════
#  EFFECTIVE PARAMETERS / NORMAL MODES
# ═══════════════════════════════════════════════════════════════

def test_empty_cavity_effective_params():
    assert effective_params(_atoms(n_atoms=0.0), 3.5) == (3.5, 0.0)


def test_effective_params_formula():
    p = _atoms(n_atoms=1e4, xi_rad=0.8, xi_ax=0.3)
    g = signed_coupling(p)
    delta_ef, g_ef = effective_params(p, 2.0)
    assert delta_ef == pytest.approx(2.0 - 1e4 * g * 0.8, rel=1e-14)
    assert g_ef == pytest.approx(abs(1e4 * g * 0.8 * 0.3), rel=1e-14)
    assert g_ef >= 0


def test_effective_params_linear_in_atom_number():
    rng = np.random.default_rng(12)
    for _ in range(200):
        p = _atoms(n_atoms=rng.uniform(1, 1e6), delta_atom=rng.uniform(-200, -1),
                   xi_rad=rng.uniform(0.01, 1), xi_ax=rng.uniform(0.01, 1))
        shift_1, g_1 = effective_params(p, 0.0)
        shift_2, g_2 = effective_params(p.with_atoms(2 * p.n_atoms), 0.0)
        assert shift_2 == pytest.approx(2 * shift_1, rel=1e-14)
        assert g_2 == pytest.approx(2 * g_1, rel=1e-14)


def test_normal_mode_splitting_is_twice_g_ef():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        p = AtomCouplingParams(
            g0=rng.uniform(0.01, 5), gamma_atom=rng.uniform(0.1, 50),
            delta_atom=rng.uniform(-1e4, 1e4), n_atoms=rng.uniform(0, 1e7),
            xi_rad=rng.uniform(0, 1), xi_ax=rng.uniform(0, 1),
        )
        low, high = normal_mode_shifts(p)
        _, g_ef = effective_params(p, 0.0)
        assert low <= high
        # rounding is relative to the shifts themselves, not to their difference
        assert abs((high - low) - 2 * g_ef) <= 1e-14 * (abs(low) + abs(high))


def test_red_detuning_shifts_modes_down():
    low, high = normal_mode_shifts(_atoms(n_atoms=100.0, xi_ax=0.5))
    assert low < high < 0


# ═══════════════════════════════════════════════════════════════
#  THRESHOLD / CAVITY
# ═══════════════════════════════════════════════════════════════

def test_scc_threshold_is_first_strong_atom_number():
    cav = CavityParams(gamma_c=1.0, finesse=1e5, round_trip_m=0.1, fsr=fsr_from_round_trip(0.1),
                       waist_m=1e-4)
    p = _atoms(xi_rad=0.9, xi_ax=0.2)
    n_th = scc_threshold(p, cav)
    per_atom = coupling_detuned(p) * 0.9 * 0.2
    assert n_th * per_atom > 1.0
    assert (n_th - 1) * per_atom <= 1.0


def test_scc_threshold_when_single_atom_matches_cavity_decay():
    cav = CavityParams(gamma_c=1.0, finesse=1e5, round_trip_m=0.1, fsr=fsr_from_round_trip(0.1),
                       waist_m=1e-4)
    p = _atoms(g0=1.0, delta_atom=0.0)
    assert coupling_detuned(p) == 1.0
    assert scc_threshold(p, cav) == 2


def test_halving_xi_ax_doubles_threshold(run_config):
    cav = run_config.cavity_params()
    atoms = run_config.atom_params()
    for xi_ax in (0.12, 0.5, 0.9):
        n_full = scc_threshold(dataclasses.replace(atoms, xi_ax=xi_ax), cav)
        n_half = scc_threshold(dataclasses.replace(atoms, xi_ax=xi_ax / 2), cav)
        assert abs(n_half - 2 * n_full) <= 1


def test_configured_threshold_splits_the_ladder(run_config):
    n_th = scc_threshold(run_config.atom_params(), run_config.cavity_params())
    assert n_th == pytest.approx(1.487e6, rel=2e-3)
    strong = [n for n in REFERENCE_LADDER if n >= n_th]
    assert len(strong) == 5


def test_scc_threshold_needs_coupling(run_config):
    with pytest.raises(NonPositiveCouplingError):
        scc_threshold(_atoms(xi_ax=0.0), run_config.cavity_params())


def test_cavity_derived_quantities(run_config):
    cav = run_config.cavity_params()
    assert cav.gamma_c == pytest.approx(GAMMA_C)
    assert cavity_linewidth_hz(cav) == pytest.approx(3.1e9 / 1.8e5)
    assert gamma_c_from_finesse(cav) == pytest.approx(math.pi * 3.1e9 / 1.8e5)
    assert photon_storage_time(cav) == pytest.approx(1 / (2 * GAMMA_C))
    assert fsr_from_round_trip(0.097) == pytest.approx(3.0907e9, rel=1e-4)


def test_fsr_mismatch_warns(caplog):
    with caplog.at_level(logging.WARNING, logger='engine.physics'):
        CavityParams(gamma_c=GAMMA_C, finesse=1.8e5, round_trip_m=0.097, fsr=3.5e9, waist_m=1.3e-4)
    assert any('fsr' in r.message for r in caplog.records)


@pytest.mark.parametrize('field', ['gamma_c', 'finesse', 'round_trip_m', 'fsr', 'waist_m'])
def test_cavity_rejects_non_positive(field):
    kw = dict(gamma_c=GAMMA_C, finesse=1.8e5, round_trip_m=0.097, fsr=3.1e9, waist_m=1.3e-4)
    kw[field] = 0.0
    with pytest.raises(InvalidParamsError) as err:
        CavityParams(**kw)
    assert err.value.name == field


@pytest.mark.parametrize('kw', [{'xi_ax': 1.2}, {'xi_rad': -0.1}, {'n_atoms': -1.0}, {'gamma_atom': 0.0}])
def test_atom_params_reject_out_of_range(kw):
    with pytest.raises(InvalidParamsError):
        _atoms(**kw)


def test_unit_change_keeps_ratios():
    p = _atoms(n_atoms=10.0)
    q = p.in_units_of(4.0)
    assert coupling_detuned(q) == pytest.approx(coupling_detuned(p) / 4.0)
    assert q.n_atoms == p.n_atoms and q.xi_ax == p.xi_ax


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
