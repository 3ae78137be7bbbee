"""
ringfit — command-line front end
================================
simulate → fit → analyze for ring-cavity normal-mode spectra.

    python app.py simulate --ladder --out runs/ladder
    python app.py fit runs/ladder/trace_*.csv --out runs/fit
    python app.py analyze runs/fit/results.json
    python app.py derive

Exit codes: 0 ok, 1 usage/config, 2 I/O or unreadable input, 3 numerical failure.
"""

import argparse
import dataclasses
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np
from scipy import linalg

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from engine import __version__
from engine.analysis import classify_scc, infer_xi_ax, scale_spread
from engine.errors import ConfigError, DegenerateAbscissaError, RingFitError, SpectrumParseError
from engine.fit import BatchRow, batch_fit, fit_spectrum, regress_gef_vs_n, series_frame
from engine.physics import (
    cavity_linewidth_hz, coupling_detuned, gamma_c_from_finesse, light_shift_per_photon,
    photon_storage_time, scc_threshold, signed_coupling,
)
from engine.spectrum import Spectrum
from engine.spectrum_io import (
    read_config, read_results, read_spectrum, resolve_config_path, write_manifest,
    write_results, write_spectrum, write_table,
)
from engine.synth import REFERENCE_LADDER, generate_series, series_grid

logger = logging.getLogger('ringfit')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

# Measured spread of S across a real ladder, for comparison.
REFERENCE_S_SPREAD_PCT = 12.0

SUMMARY_COLUMNS = [
    'n_atoms', 'g_ef', 'sigma_g_ef', 'retro_r', 'sigma_retro_r', 'scale_s',
    'sigma_scale_s', 'chi', 'sigma_chi', 'chi_weak', 'regime', 'converged', 'error',
]

RULE = '═' * 64


def _banner(title: str):
    print(RULE)
    print(f"  {title}")
    print(RULE)


def _fail(code: int, message: str) -> int:
    print(f"ringfit: error: {message}", file=sys.stderr)
    return code


# ═══════════════════════════════════════════════════════════════
#  SIMULATE
# ═══════════════════════════════════════════════════════════════

def cmd_simulate(args) -> int:
    cfg = read_config(resolve_config_path(args.config))
    synth = cfg.synth
    overrides = {}
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.noise_sigma is not None:
        overrides['noise_sigma'] = args.noise_sigma
        overrides['noise'] = 'gaussian' if args.noise_sigma > 0 else 'none'
    if overrides:
        synth = dataclasses.replace(synth, **overrides)
        cfg = dataclasses.replace(cfg, synth=synth)

    n_list = list(REFERENCE_LADDER) if args.ladder else list(args.n_atoms)
    atoms, cav, truth = cfg.atom_params(), cfg.cavity_params(), cfg.truth()
    grid = series_grid(n_list, atoms, cav, truth, points=synth.points, margin=synth.margin_gamma_c)
    series = generate_series(n_list, atoms, cav, grid=grid, noise=cfg.noise(), truth=truth,
                             max_workers=cfg.fit.max_workers)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    width = max(2, len(str(len(series))))
    for spec in series:
        name = f"trace_{spec.meta['trace']:0{width}d}.csv"
        write_spectrum(spec, out / name, units=cfg.units, gamma_c_rad_s=cfg.gamma_c_rad_s)
        entries.append({'file': name, **spec.meta})
    write_manifest(entries, out / 'manifest.json', meta={
        'generator': f'ringfit {__version__}',
        'config': cfg.to_dict(),
    })

    _banner(f"Simulated {len(series)} trace(s) → {out}")
    for e in entries:
        regime = classify_scc(e['g_ef']).value
        print(f"  {e['file']}  N={e['n_atoms']:<12.6g} g_ef={e['g_ef']:<10.4g} "
              f"R={e['retro_r']:<8.4g} [{regime}]")
    return EXIT_OK


# ═══════════════════════════════════════════════════════════════
#  FIT
# ═══════════════════════════════════════════════════════════════

def _fit_rows(spectra: list, cfg, max_workers: int) -> list:
    """Batch-fit spectra carrying n_atoms; fit the rest one by one."""
    with_n = [s for s in spectra if s.meta.get('n_atoms') is not None]
    without_n = [s for s in spectra if s.meta.get('n_atoms') is None]
    rows = batch_fit(with_n, cfg, max_workers=max_workers) if with_n else []
    for spec in without_n:
        try:
            rows.append(BatchRow(n_atoms=math.nan, result=fit_spectrum(spec, cfg),
                                 source=spec.meta['source']))
        except (RingFitError, ArithmeticError, linalg.LinAlgError) as e:
            logger.warning("%s failed: %s", spec.meta['source'], e)
            rows.append(BatchRow(n_atoms=math.nan, error=str(e), source=spec.meta['source']))
    return rows


def cmd_fit(args) -> int:
    run_cfg = read_config(resolve_config_path(args.config))
    fit_cfg = run_cfg.fit_config()
    if args.fix_r is not None:
        fit_cfg = dataclasses.replace(fit_cfg, fix_r=args.fix_r)

    names = [Path(p).name for p in args.paths]
    spectra = []
    for i, (path, name) in enumerate(zip(args.paths, names), start=1):
        try:
            spec = read_spectrum(path, gamma_c_rad_s=run_cfg.gamma_c_rad_s)
        except (OSError, SpectrumParseError) as e:
            print(f"ringfit: cannot read {path}: {e}", file=sys.stderr)
            continue
        # same file name from different directories: prefix the input position
        spec.meta['source'] = name if names.count(name) == 1 else f"{i:02d}_{name}"
        spectra.append(spec)
    if not spectra:
        return _fail(EXIT_IO, 'no readable spectrum among: ' + ', '.join(map(str, args.paths)))

    rows = _fit_rows(spectra, fit_cfg, args.workers or run_cfg.fit.max_workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = write_results(rows, out / 'results.json', xlsx=args.xlsx,
                            gamma_c_rad_s=run_cfg.gamma_c_rad_s)

    by_source = {s.meta['source']: s for s in spectra}
    for row in rows:
        if not row.ok:
            print(f"ringfit: fit failed for {row.source}: {row.error}", file=sys.stderr)
            continue
        data = by_source[row.source]
        curve = Spectrum(
            detuning=data.detuning,
            value=row.result.model_values(data.detuning),
            meta={'source': row.source, 'n_atoms': row.n_atoms, **row.result.values()},
        )
        write_spectrum(curve, out / f"fit_{Path(row.source).stem}.csv",
                       units=run_cfg.units, gamma_c_rad_s=run_cfg.gamma_c_rad_s)

    _banner(f"Fitted {sum(r.ok for r in rows)}/{len(rows)} trace(s) → {written[0]}")
    for row in rows:
        if row.ok:
            res = row.result
            flag = ' χ?' if res.chi_weak else ''
            conv = '' if res.converged else ' (not converged)'
            print(f"  {row.source:<20} N={row.n_atoms:<12.6g} g_ef={res.params.g_ef:<10.4g} "
                  f"χ={res.params.chi:<+8.3f} R={res.params.retro_r:<8.4g} "
                  f"S={res.params.scale_s:<8.4g}{flag}{conv}")
        else:
            print(f"  {row.source:<20} FAILED: {row.error}")

    if not any(r.ok for r in rows):
        return EXIT_NUMERIC
    return EXIT_OK


# ═══════════════════════════════════════════════════════════════
#  ANALYZE
# ═══════════════════════════════════════════════════════════════

def cmd_analyze(args) -> int:
    rows = read_results(args.results)
    run_cfg = read_config(resolve_config_path(args.config))
    ok = [r for r in rows if r.ok]

    _banner(f"Analysis of {args.results}")
    print(f"  traces: {len(rows)} ({len(ok)} fitted)")
    print()
    print(f"  {'N':>12}  {'g_ef':>10}  {'regime':>7}  {'R':>9}  {'S':>9}  {'chi':>8}")
    for row in rows:
        if not row.ok:
            print(f"  {row.n_atoms:>12.6g}  failed: {row.error}")
            continue
        p = row.result.params
        chi = f"{p.chi:+8.3f}" if not row.result.chi_weak else '   (n/a)'
        print(f"  {row.n_atoms:>12.6g}  {p.g_ef:>10.4g}  {classify_scc(p.g_ef, p.gamma_c).value:>7}"
              f"  {p.retro_r:>9.4g}  {p.scale_s:>9.4g}  {chi}")
    print()

    try:
        reg = regress_gef_vs_n(rows)
    except DegenerateAbscissaError as e:
        print(f"  regression skipped: {e}")
    else:
        print(f"  g_ef vs N: slope={reg.slope:.6g} ± {reg.slope_stderr:.2g} per atom, "
              f"intercept={reg.intercept:.4g} ± {reg.intercept_stderr:.2g}, "
              f"r²={reg.r_squared:.6f}")
        atoms = run_cfg.atom_params().with_atoms(1.0).in_units_of(run_cfg.gamma_c_rad_s)
        try:
            xi = infer_xi_ax(2.0 * reg.slope, atoms)
        except RingFitError as e:
            print(f"  xi_ax: not inferable ({e})")
        else:
            note = '' if xi.in_range else f' (raw {xi.raw:.4g}, clamped)'
            print(f"  xi_ax from slope: {xi.value:.4g}{note} "
                  f"(configured {run_cfg.atoms.xi_ax:.4g})")

    spread = scale_spread(rows)
    if not math.isnan(spread):
        print(f"  S spread: {spread:.2f} % (experiment: better than {REFERENCE_S_SPREAD_PCT:.0f} %)")

    frame = series_frame(rows)
    for col in SUMMARY_COLUMNS:
        if col not in frame.columns:
            frame[col] = np.nan
    out = Path(args.out) if args.out else Path(args.results).with_name(
        Path(args.results).stem + '_summary.csv')
    write_table(frame[SUMMARY_COLUMNS], out)
    print(f"  plot columns → {out}")
    return EXIT_OK


# ═══════════════════════════════════════════════════════════════
#  DERIVE
# ═══════════════════════════════════════════════════════════════

def cmd_derive(args) -> int:
    run_cfg = read_config(resolve_config_path(args.config))
    cav = run_cfg.cavity_params()
    atoms = run_cfg.atom_params()
    gc = cav.gamma_c
    norm = atoms.in_units_of(gc)

    _banner('Derived quantities')
    print(f"  gamma_c            {gc:.6g} rad/s (FWHM {2 * gc / (2 * math.pi) / 1e3:.4g} kHz)")
    print(f"  gamma_c from FSR/F {gamma_c_from_finesse(cav):.6g} rad/s "
          f"(linewidth {cavity_linewidth_hz(cav) / 1e3:.4g} kHz)")
    print(f"  photon storage     {photon_storage_time(cav) * 1e6:.4g} µs")
    print(f"  detuning delta     {atoms.delta_atom:.6g} rad/s")
    print(f"  g_delta            {signed_coupling(norm):.6g} gamma_c "
          f"(|g_delta| = {coupling_detuned(atoms):.6g} rad/s)")
    if atoms.delta_atom != 0:
        print(f"  light shift/photon {light_shift_per_photon(norm):.6g} gamma_c")
    per_atom = coupling_detuned(norm) * norm.xi_rad * norm.xi_ax
    print(f"  g_ef per atom      {per_atom:.6g} gamma_c")
    print(f"  SCC threshold      N >= {scc_threshold(atoms, cav):,}")
    print(f"  path asymmetry     ±{run_cfg.synth.chi_path_asymmetry * 100:.3g} % (χ band at N = 0 not computed)")
    return EXIT_OK


# ═══════════════════════════════════════════════════════════════
#  ENTRY POINT
# ═══════════════════════════════════════════════════════════════

class _Parser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_USAGE instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='ringfit', description='Ring-cavity normal-mode spectra: simulate, fit, analyze.')
    parser.add_argument('--version', action='version', version=f'ringfit {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v info, -vv debug')
    parser.add_argument('--config', help='run configuration (default: $RINGFIT_CONFIG or default_config.yaml)')
    sub = parser.add_subparsers(dest='command', required=True)

    sim = sub.add_parser('simulate', help='generate synthetic spectra')
    which = sim.add_mutually_exclusive_group(required=True)
    which.add_argument('--n-atoms', type=float, nargs='+', help='atom numbers, one trace each')
    which.add_argument('--ladder', action='store_true', help='the eleven-trace reference ladder')
    sim.add_argument('--out', required=True, help='output directory')
    sim.add_argument('--seed', type=int, help='override synth.seed')
    sim.add_argument('--noise-sigma', type=float, help='override synth.noise_sigma (enables gaussian noise)')
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser('fit', help='fit spectra and write results')
    fit.add_argument('paths', nargs='+', help='spectrum CSV files')
    fit.add_argument('--out', required=True, help='output directory')
    fit.add_argument('--fix-r', type=float, help='pin the retroaction parameter R')
    fit.add_argument('--xlsx', action='store_true', help='also write results.xlsx')
    fit.add_argument('--workers', type=int, help='parallel fits (disables warm start)')
    fit.set_defaults(func=cmd_fit)

    ana = sub.add_parser('analyze', help='report on a results document')
    ana.add_argument('results', help='results.json from the fit command')
    ana.add_argument('--out', help='plot-ready CSV (default: <results>_summary.csv)')
    ana.set_defaults(func=cmd_analyze)

    der = sub.add_parser('derive', help='print derived physical quantities')
    der.set_defaults(func=cmd_derive)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')

    try:
        return args.func(args)
    except ConfigError as e:
        return _fail(EXIT_USAGE, str(e))
    except SpectrumParseError as e:
        return _fail(EXIT_IO, str(e))
    except OSError as e:
        name = getattr(e, 'filename', None)
        return _fail(EXIT_IO, f"{e.strerror or e}: {name}" if name else str(e))
    except (RingFitError, ArithmeticError, linalg.LinAlgError) as e:
        return _fail(EXIT_NUMERIC, str(e))
    except ValueError as e:
        return _fail(EXIT_USAGE, str(e))


if __name__ == '__main__':
    sys.exit(main())
