#!/usr/bin/env python3
"""
Quick smoke tests for ringfit.
Run these for fast validation during development.
"""

import sys
from pathlib import Path

# Add parent to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from engine.analysis import classify_scc, estimate_splitting
from engine.fit import fit_spectrum
from engine.model import SpectrumModelParams, fit_model
from engine.spectrum_io import RunConfig
from engine.physics import scc_threshold
from engine.synth import generate_spectrum


def test_model_limits():
    """Empty cavity peak and symmetric doublet."""
    cases = [
        ("empty cavity peak = 1 + eps", fit_model(0.0, SpectrumModelParams(epsilon=0.93)), 1.93),
        ("eps=1 doublet is symmetric",
         fit_model(2.0, SpectrumModelParams(g_ef=3.0, epsilon=1.0)),
         fit_model(-2.0, SpectrumModelParams(g_ef=3.0, epsilon=1.0))),
    ]

    print("Testing model limits...")
    passed = 0
    for name, got, expected in cases:
        if abs(got - expected) <= 1e-12 * abs(expected):
            print(f"  ✓ {name}")
            passed += 1
        else:
            print(f"  ✗ {name}: expected {expected}, got {got}")

    print(f"Model limits: {passed}/{len(cases)} passed\n")
    assert passed == len(cases)


def test_threshold():
    """Default configuration puts the SCC threshold between traces 6 and 7."""
    cfg = RunConfig()
    n_th = scc_threshold(cfg.atom_params(), cfg.cavity_params())
    print("Testing SCC threshold...")
    print(f"  N_th = {n_th:,}")
    assert 1.38e6 < n_th <= 1.66e6
    assert classify_scc(1.0).value == 'weak' and classify_scc(1.5).value == 'strong'
    print("  ✓ threshold inside the ladder\n")


def test_quick_fit():
    """One noiseless round trip."""
    grid = np.linspace(-10, 10, 201)
    truth = SpectrumModelParams(g_ef=3.0, chi=0.4, retro_r=0.2)
    spec = generate_spectrum(grid, truth)
    res = fit_spectrum(spec)
    print("Testing quick fit...")
    print(res.summary())
    assert abs(res.params.g_ef - 3.0) < 1e-6
    assert abs(estimate_splitting(spec) / 2 - 3.0) < 0.3
    print("  ✓ recovered g_ef\n")


def main():
    """Run all quick tests."""
    print("=" * 60)
    print("ringfit — quick smoke tests")
    print("=" * 60 + "\n")

    tests = [test_model_limits, test_threshold, test_quick_fit]
    failed = 0
    for test in tests:
        try:
            test()
        except AssertionError as e:
            failed += 1
            print(f"  ✗ {test.__name__} failed {e}\n")

    print("=" * 60)
    if not failed:
        print("✓ All quick tests passed!")
        return 0
    print(f"✗ {failed} test group(s) failed")
    return 1


if __name__ == "__main__":
    sys.exit(main())
