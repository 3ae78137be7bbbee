# ringfit engine — ring-cavity normal-mode spectra: model, synthesis, fitting
__version__ = "1.0.0"
# v1.0.0 — Steady-state two-mode transfer model with retroaction term, physics
# helpers (g_delta, effective detuning, normal-mode shifts, SCC threshold),
# seeded synthetic series, multi-start damped least squares, model-free peak
# diagnostics, CSV/YAML/JSON file formats and the simulate/fit/analyze CLI.
