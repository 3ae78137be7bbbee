"""
spectrum_io.py — Stable text formats for spectra, run configuration and results.

Spectrum CSV
    # units = khz
    # gamma_c_rad_s = 54977.871437821385
    # n_atoms = 280000
    detuning_khz,value[,sigma]
    -52.5,0.0123,0.001
    ...
  Detunings are probe frequency offsets in kHz on disk and γ_c-normalised
  angular detunings in memory: δ = 2π·10³·f_kHz / γ_c. With the default
  γ_c = π·17.5·10³ s⁻¹ the empty-cavity FWHM 2γ_c is 17.5 kHz. A file may
  instead declare `units = gamma_c_normalized` with a `detuning` column.
  kHz values carry 17 or more significant digits, as many as an exact
  round trip of the in-memory detuning needs.

Run configuration
    YAML, one flat mapping per section (cavity, atoms, fit, synth) plus a
    top-level `units`. Human units on disk; see RunConfig.

Results
    JSON document with one record per trace, a CSV twin for spreadsheets and
    an optional .xlsx twin.

Every writer is atomic (temporary file in the target directory, then
os.replace) and byte-deterministic for identical input.
"""

import json
import logging
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields
from decimal import Decimal, localcontext
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
import yaml

from .errors import ConfigError, InvalidParamsError, SchemaViolation, SpectrumParseError
from .fit import BatchRow, FitConfig, FitResult, series_frame
from .model import DEFAULT_EPSILON
from .physics import AtomCouplingParams, CavityParams, wavelength_offset_to_detuning
from .spectrum import Spectrum
from .synth import DEFAULT_GRID_MARGIN, DEFAULT_GRID_POINTS, NoiseSpec, SeriesTruth

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_GAMMA_C_RAD_S = math.pi * 17.5e3
CONFIG_ENV_VAR = 'RINGFIT_CONFIG'
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / 'default_config.yaml'

RESULTS_FORMAT = 'ringfit-results'
MANIFEST_FORMAT = 'ringfit-manifest'
FORMAT_VERSION = 1

FLOAT_FORMAT = '%.17g'


class Units(str, Enum):
    GAMMA_C_NORMALIZED = 'gamma_c_normalized'
    KHZ = 'khz'


DETUNING_COLUMN = {Units.KHZ: 'detuning_khz', Units.GAMMA_C_NORMALIZED: 'detuning'}


def khz_to_internal(f_khz, gamma_c_rad_s: float = DEFAULT_GAMMA_C_RAD_S):
    return 2.0 * math.pi * 1e3 * np.asarray(f_khz, dtype=float) / gamma_c_rad_s


def internal_to_khz(delta, gamma_c_rad_s: float = DEFAULT_GAMMA_C_RAD_S):
    return np.asarray(delta, dtype=float) * gamma_c_rad_s / (2.0 * math.pi * 1e3)


# File detunings: internal = correctly rounded (decimal text × float scale),
# both factors taken exactly, so every written value reads back bit for bit.
KHZ_MAX_DIGITS = 40


def _khz_scale(gamma_c_rad_s: float) -> Fraction:
    return Fraction(2.0 * math.pi * 1e3 / gamma_c_rad_s)


def _parse_khz(texts, gamma_c_rad_s: float) -> np.ndarray:
    scale = _khz_scale(gamma_c_rad_s)
    return np.array([float(Fraction(t.strip()) * scale) for t in texts], dtype=float)


def _format_khz(delta, gamma_c_rad_s: float) -> list:
    """Shortest decimal (17 digits and up) that _parse_khz maps back to each value."""
    scale = _khz_scale(gamma_c_rad_s)
    out = []
    for x in np.asarray(delta, dtype=float).tolist():
        exact = Fraction(x) / scale
        for digits in range(17, KHZ_MAX_DIGITS + 1):
            with localcontext() as ctx:
                ctx.prec = digits
                text = str(Decimal(exact.numerator) / Decimal(exact.denominator))
            if float(Fraction(text) * scale) == x:
                break
        out.append(text)
    return out


# ═══════════════════════════════════════════════════════════════
#  ATOMIC WRITES
# ═══════════════════════════════════════════════════════════════

def _temp_path(path: Path) -> Path:
    fd, tmp = tempfile.mkstemp(prefix=f'.{path.stem}.', suffix=path.suffix, dir=path.parent)
    os.close(fd)
    return Path(tmp)


def atomic_write_text(path: PathLike, text: str):
    """Write `text` to `path` through a temporary file and os.replace."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = _temp_path(path)
    try:
        with open(tmp, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _atomic_frame(df: pd.DataFrame, path: PathLike, excel: bool = False):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = _temp_path(path)
    try:
        if excel:
            df.to_excel(tmp, index=False, engine='openpyxl')
        else:
            df.to_csv(tmp, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def write_table(df: pd.DataFrame, path: PathLike):
    """Plot-ready CSV (full-precision floats)."""
    _atomic_frame(df, path)


# ═══════════════════════════════════════════════════════════════
#  SPECTRA
# ═══════════════════════════════════════════════════════════════

def _format_meta_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _parse_meta_value(text: str):
    if text in ('true', 'false'):
        return text == 'true'
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            continue
    return text


def write_spectrum(s: Spectrum, path: PathLike, units: Units = Units.KHZ,
                   gamma_c_rad_s: float = DEFAULT_GAMMA_C_RAD_S):
    """
    Write `s` as a spectrum CSV (inverse of read_spectrum).

    Meta entries become `# key = value` lines in insertion order.
    """
    units = Units(units)
    if units is Units.KHZ:
        detuning = _format_khz(s.detuning, gamma_c_rad_s)
    else:
        detuning = [FLOAT_FORMAT % v for v in s.detuning]
    lines = [f'# units = {units.value}', f'# gamma_c_rad_s = {gamma_c_rad_s!r}']
    for key, value in s.meta.items():
        if key in ('units', 'gamma_c_rad_s'):
            continue
        if '\n' in str(key) or '\n' in str(value) or '=' in str(key):
            raise ValueError(f"meta entry {key!r} cannot be written as a header line")
        lines.append(f'# {key} = {_format_meta_value(value)}')

    header = [DETUNING_COLUMN[units], 'value'] + (['sigma'] if s.sigma is not None else [])
    lines.append(','.join(header))
    numeric = [s.value] + ([s.sigma] if s.sigma is not None else [])
    for det, *row in zip(detuning, *numeric):
        lines.append(','.join([det] + [FLOAT_FORMAT % v for v in row]))
    atomic_write_text(path, '\n'.join(lines) + '\n')


def read_spectrum(path: PathLike, gamma_c_rad_s: float = DEFAULT_GAMMA_C_RAD_S) -> Spectrum:
    """
    Parse a spectrum CSV.

    `# key = value` comment lines populate meta (ints, floats, true/false,
    otherwise strings). `units` and `gamma_c_rad_s` headers steer the
    detuning conversion; `gamma_c_rad_s` argument is the fallback.

    Raises:
        FileNotFoundError / OSError: unreadable file.
        SpectrumParseError: bad header, non-numeric or missing field, mixed
            sigma presence, non-positive sigma, non-increasing detunings.
    """
    path = Path(path)
    text = path.read_text(encoding='utf-8')

    meta = {}
    data_lines = []   # 1-based file line numbers of header + data rows
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith('#'):
            body = line[1:].strip()
            if '=' in body:
                key, _, value = body.partition('=')
                meta[key.strip()] = _parse_meta_value(value.strip())
            continue
        data_lines.append(lineno)

    if not data_lines:
        raise SpectrumParseError(path, None, 'missing header line')

    declared = meta.pop('units', Units.KHZ.value)
    try:
        units = Units(declared)
    except ValueError:
        raise SpectrumParseError(path, None, f"unknown units {declared!r}")
    gamma_c = float(meta.pop('gamma_c_rad_s', gamma_c_rad_s))
    if not gamma_c > 0:
        raise SpectrumParseError(path, None, 'gamma_c_rad_s must be > 0')

    try:
        df = pd.read_csv(path, comment='#', dtype=str, skip_blank_lines=True,
                         keep_default_na=False, skipinitialspace=True)
    except pd.errors.ParserError as e:
        raise SpectrumParseError(path, None, str(e)) from e

    columns = [c.strip() for c in df.columns]
    det_col = DETUNING_COLUMN[units]
    if columns not in ([det_col, 'value'], [det_col, 'value', 'sigma']):
        raise SpectrumParseError(
            path, data_lines[0],
            f"header must be '{det_col},value[,sigma]', got {','.join(columns)!r}",
        )
    df.columns = columns
    if df.empty:
        raise SpectrumParseError(path, data_lines[0], 'no data rows')

    def _numeric(name: str) -> np.ndarray:
        raw = df[name].fillna('').astype(str).str.strip()
        values = pd.to_numeric(raw, errors='coerce')
        bad = ~np.isfinite(values.to_numpy(dtype=float)) & (raw != '').to_numpy()
        if bad.any():
            i = int(np.argmax(bad))
            raise SpectrumParseError(path, data_lines[i + 1], f"{name}: not a number: {raw.iloc[i]!r}")
        return values.to_numpy(dtype=float)

    detuning = _numeric(det_col)
    value = _numeric('value')
    for name, arr in ((det_col, detuning), ('value', value)):
        missing = np.isnan(arr)
        if missing.any():
            i = int(np.argmax(missing))
            raise SpectrumParseError(path, data_lines[i + 1], f'{name}: missing value')

    sigma = None
    if 'sigma' in df.columns:
        sigma = _numeric('sigma')
        present = ~np.isnan(sigma)
        if present.any() and not present.all():
            i = int(np.argmax(~present))
            raise SpectrumParseError(path, data_lines[i + 1], 'sigma given for some points but not all')
        if not present.any():
            sigma = None
        elif not np.all(sigma > 0):
            i = int(np.argmax(~(sigma > 0)))
            raise SpectrumParseError(path, data_lines[i + 1], 'sigma must be > 0')

    steps = np.diff(detuning)
    if np.any(~(steps > 0)):
        i = int(np.argmax(~(steps > 0))) + 1
        raise SpectrumParseError(path, data_lines[i + 1], 'detunings must be strictly increasing')

    if units is Units.KHZ:
        try:
            detuning = _parse_khz(df[det_col], gamma_c)
        except ValueError:
            detuning = khz_to_internal(detuning, gamma_c)
    logger.debug("read %d points from %s", detuning.size, path)
    return Spectrum(detuning=detuning, value=value, sigma=sigma, meta=meta)


# ═══════════════════════════════════════════════════════════════
#  RUN CONFIGURATION
# ═══════════════════════════════════════════════════════════════

def _require(section: str, key: str, ok: bool, message: str):
    if not ok:
        raise SchemaViolation(f'{section}.{key}', message)


@dataclass(frozen=True)
class CavitySection:
    linewidth_khz: float = 17.5        # FWHM 2γ_c/2π
    finesse: float = 1.8e5
    round_trip_m: float = 0.097
    fsr_ghz: float = 3.1
    waist_um: float = 130.0

    def __post_init__(self):
        for f in fields(self):
            _require('cavity', f.name, getattr(self, f.name) > 0, 'must be > 0')

    @property
    def gamma_c_rad_s(self) -> float:
        return math.pi * self.linewidth_khz * 1e3

    def params(self) -> CavityParams:
        return CavityParams(
            gamma_c=self.gamma_c_rad_s,
            finesse=self.finesse,
            round_trip_m=self.round_trip_m,
            fsr=self.fsr_ghz * 1e9,
            waist_m=self.waist_um * 1e-6,
        )


@dataclass(frozen=True)
class AtomsSection:
    g0_gamma_c: float = 0.67           # resonant coupling in units of γ_c
    gamma_atom_mhz: float = 6.07       # Γ/2π
    wavelength_nm: float = 780.24
    offset_nm: float = 0.7             # positive = red of the line
    xi_rad: float = 0.95
    xi_ax: float = 0.12
    n_atoms: float = 0.0

    def __post_init__(self):
        _require('atoms', 'gamma_atom_mhz', self.gamma_atom_mhz > 0, 'must be > 0')
        _require('atoms', 'wavelength_nm', self.wavelength_nm > 0, 'must be > 0')
        _require('atoms', 'n_atoms', self.n_atoms >= 0, 'must be >= 0')
        for name in ('xi_rad', 'xi_ax'):
            _require('atoms', name, 0.0 <= getattr(self, name) <= 1.0, 'must lie in [0, 1]')

    def params(self, gamma_c_rad_s: float) -> AtomCouplingParams:
        """Atomic parameters in rad/s."""
        return AtomCouplingParams(
            g0=self.g0_gamma_c * gamma_c_rad_s,
            gamma_atom=2.0 * math.pi * self.gamma_atom_mhz * 1e6,
            delta_atom=wavelength_offset_to_detuning(self.offset_nm, self.wavelength_nm),
            n_atoms=self.n_atoms,
            xi_rad=self.xi_rad,
            xi_ax=self.xi_ax,
        )


@dataclass(frozen=True)
class FitSection:
    epsilon: float = DEFAULT_EPSILON
    chi_starts: int = 8
    max_iter: int = 200
    tol_step: float = 1e-12
    tol_grad: float = 1e-12
    tol_cost: float = 1e-15
    lock_r_zero_below_threshold: bool = False
    fix_r: Optional[float] = None
    free_epsilon: bool = False
    free_gamma_c: bool = False
    max_workers: int = 1

    def __post_init__(self):
        _require('fit', 'epsilon', 0.0 <= self.epsilon <= 1.0, 'must lie in [0, 1]')
        _require('fit', 'chi_starts', self.chi_starts >= 1, 'must be >= 1')
        _require('fit', 'max_iter', self.max_iter >= 1, 'must be >= 1')
        _require('fit', 'max_workers', self.max_workers >= 1, 'must be >= 1')
        for name in ('tol_step', 'tol_grad', 'tol_cost'):
            _require('fit', name, getattr(self, name) > 0, 'must be > 0')
        _require('fit', 'fix_r', self.fix_r is None or self.fix_r >= 0, 'must be >= 0')

    def config(self) -> FitConfig:
        return FitConfig(
            epsilon_fixed=self.epsilon,
            gamma_c_fixed=1.0,
            chi_starts=self.chi_starts,
            max_iter=self.max_iter,
            tol_step=self.tol_step,
            tol_grad=self.tol_grad,
            tol_cost=self.tol_cost,
            lock_r_zero_below_threshold=self.lock_r_zero_below_threshold,
            fix_r=self.fix_r,
            free_epsilon=self.free_epsilon,
            free_gamma_c=self.free_gamma_c,
        )


@dataclass(frozen=True)
class SynthSection:
    points: int = DEFAULT_GRID_POINTS
    margin_gamma_c: float = DEFAULT_GRID_MARGIN
    noise: str = 'none'
    noise_sigma: float = 0.0
    seed: int = 0
    chi: float = 0.0
    scale_s: float = 1.0
    retro_per_million: float = 0.0
    axis: str = 'lattice'
    chi_path_asymmetry: float = 0.02   # printed by `derive`

    def __post_init__(self):
        _require('synth', 'points', self.points >= 1, 'must be >= 1')
        _require('synth', 'margin_gamma_c', self.margin_gamma_c >= 0, 'must be >= 0')
        _require('synth', 'noise', self.noise in ('none', 'gaussian'), "must be 'none' or 'gaussian'")
        _require('synth', 'noise_sigma', self.noise_sigma >= 0, 'must be >= 0')
        _require('synth', 'seed', 0 <= self.seed < 2 ** 64, 'must be a 64-bit unsigned integer')
        _require('synth', 'scale_s', self.scale_s >= 0, 'must be >= 0')
        _require('synth', 'retro_per_million', self.retro_per_million >= 0, 'must be >= 0')
        _require('synth', 'axis', self.axis in ('lattice', 'cavity'), "must be 'lattice' or 'cavity'")

    def noise_spec(self) -> NoiseSpec:
        return NoiseSpec(kind=self.noise, sigma_abs=self.noise_sigma, seed=self.seed)

    def truth(self, epsilon: float) -> SeriesTruth:
        return SeriesTruth(
            chi=self.chi, scale_s=self.scale_s, epsilon=epsilon,
            retro_per_million=self.retro_per_million, axis=self.axis,
        )


SECTIONS = {
    'cavity': CavitySection,
    'atoms': AtomsSection,
    'fit': FitSection,
    'synth': SynthSection,
}


@dataclass(frozen=True)
class RunConfig:
    """
    Validated run configuration.

    Sections keep the human units of the file; the accessors convert:
    cavity/atoms to rad/s, fit to the γ_c-normalised fitter settings.
    """
    units: Units = Units.KHZ
    cavity: CavitySection = field(default_factory=CavitySection)
    atoms: AtomsSection = field(default_factory=AtomsSection)
    fit: FitSection = field(default_factory=FitSection)
    synth: SynthSection = field(default_factory=SynthSection)

    @property
    def gamma_c_rad_s(self) -> float:
        return self.cavity.gamma_c_rad_s

    def cavity_params(self) -> CavityParams:
        return self.cavity.params()

    def atom_params(self) -> AtomCouplingParams:
        return self.atoms.params(self.gamma_c_rad_s)

    def fit_config(self) -> FitConfig:
        return self.fit.config()

    def noise(self) -> NoiseSpec:
        return self.synth.noise_spec()

    def truth(self) -> SeriesTruth:
        return self.synth.truth(self.fit.epsilon)

    def to_dict(self) -> dict:
        out = {'units': self.units.value}
        out.update({name: asdict(getattr(self, name)) for name in SECTIONS})
        return out


def _coerce(location: str, value, kind):
    """Strict scalar typing: no silent coercion beyond int → float."""
    optional = getattr(kind, '__args__', None)
    if optional is not None:
        if value is None:
            return None
        kind = next(t for t in optional if t is not type(None))
    if kind is bool:
        if isinstance(value, bool):
            return value
    elif kind is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif kind is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif kind is str:
        if isinstance(value, str):
            return value
    raise SchemaViolation(location, f'expected {kind.__name__}, got {value!r}')


def config_from_dict(data: dict) -> RunConfig:
    """
    Build a RunConfig from a parsed mapping.

    Raises:
        SchemaViolation: unknown section/key, wrong type or out-of-range value.
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise SchemaViolation('<root>', 'configuration must be a mapping')

    unknown = set(data) - set(SECTIONS) - {'units'}
    if unknown:
        raise SchemaViolation(sorted(unknown)[0], 'unknown section')

    try:
        units = Units(data.get('units', Units.KHZ.value))
    except ValueError:
        raise SchemaViolation('units', f"must be one of {[u.value for u in Units]}")

    built = {}
    for name, cls in SECTIONS.items():
        section = data.get(name) or {}
        if not isinstance(section, dict):
            raise SchemaViolation(name, 'section must be a mapping')
        kinds = {f.name: f.type for f in fields(cls)}
        for key in section:
            if key not in kinds:
                raise SchemaViolation(f'{name}.{key}', 'unknown key')
        values = {key: _coerce(f'{name}.{key}', section[key], kinds[key]) for key in section}
        built[name] = cls(**values)

    cfg = RunConfig(units=units, **built)
    try:
        cfg.cavity_params()
        cfg.atom_params()
        cfg.fit_config()
        cfg.noise()
    except InvalidParamsError as e:
        raise SchemaViolation(e.name, str(e)) from e
    return cfg


def read_config(path: PathLike) -> RunConfig:
    """
    Parse a YAML run configuration.

    Raises:
        ConfigError: unreadable YAML (location is the file line).
        SchemaViolation: see config_from_dict().
    """
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding='utf-8'))
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        location = f'{path}:{mark.line + 1}' if mark is not None else str(path)
        raise ConfigError(location, str(e)) from e
    cfg = config_from_dict(data)
    logger.debug("loaded config %s", path)
    return cfg


def write_config(cfg: RunConfig, path: PathLike):
    atomic_write_text(path, yaml.safe_dump(cfg.to_dict(), sort_keys=False))


def resolve_config_path(explicit: Optional[PathLike] = None) -> Path:
    """--config, else $RINGFIT_CONFIG, else default_config.yaml at the repo root."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(CONFIG_ENV_VAR)
    if env:
        return Path(env)
    return DEFAULT_CONFIG_PATH


# ═══════════════════════════════════════════════════════════════
#  RESULTS
# ═══════════════════════════════════════════════════════════════

def _row_record(row: BatchRow) -> dict:
    rec = {'n_atoms': row.n_atoms, 'source': row.source, 'error': row.error}
    if row.ok:
        rec['result'] = row.result.to_record()
    return rec


def results_document(table: list, gamma_c_rad_s: float = DEFAULT_GAMMA_C_RAD_S) -> dict:
    return {
        'format': RESULTS_FORMAT,
        'version': FORMAT_VERSION,
        'units': Units.GAMMA_C_NORMALIZED.value,
        'gamma_c_rad_s': gamma_c_rad_s,
        'records': [_row_record(row) for row in table],
    }


def write_results(table: list, path: PathLike, xlsx: bool = False,
                  gamma_c_rad_s: float = DEFAULT_GAMMA_C_RAD_S) -> list:
    """
    Write batch results: `path` (JSON), a .csv twin and optionally .xlsx.

    Returns:
        list of written paths.
    """
    path = Path(path)
    doc = results_document(table, gamma_c_rad_s)
    atomic_write_text(path, json.dumps(doc, indent=2) + '\n')
    written = [path]

    frame = series_frame(table)
    csv_path = path.with_suffix('.csv')
    _atomic_frame(frame, csv_path)
    written.append(csv_path)
    if xlsx:
        xlsx_path = path.with_suffix('.xlsx')
        _atomic_frame(frame, xlsx_path, excel=True)
        written.append(xlsx_path)
    logger.info("wrote %d result records to %s", len(table), path)
    return written


def read_results(path: PathLike) -> list:
    """
    Inverse of write_results (JSON document only).

    Raises:
        ConfigError: not valid JSON.
        SchemaViolation: wrong format tag or malformed record.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise ConfigError(f'{path}:{e.lineno}', e.msg) from e
    if not isinstance(doc, dict) or doc.get('format') != RESULTS_FORMAT:
        raise SchemaViolation('format', f'{path} is not a {RESULTS_FORMAT} document')
    rows = []
    for i, rec in enumerate(doc.get('records', [])):
        try:
            result = FitResult.from_record(rec['result']) if rec.get('result') else None
            rows.append(BatchRow(n_atoms=rec['n_atoms'], result=result,
                                 error=rec.get('error'), source=rec.get('source', '')))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaViolation(f'records[{i}]', f'malformed record: {e}') from e
    return rows


# ═══════════════════════════════════════════════════════════════
#  MANIFEST
# ═══════════════════════════════════════════════════════════════

def write_manifest(entries: list, path: PathLike, meta: Optional[dict] = None):
    """List of generated files with their generating parameters."""
    doc = {'format': MANIFEST_FORMAT, 'version': FORMAT_VERSION, **(meta or {}), 'files': entries}
    atomic_write_text(path, json.dumps(doc, indent=2) + '\n')


def read_manifest(path: PathLike) -> dict:
    doc = json.loads(Path(path).read_text(encoding='utf-8'))
    if doc.get('format') != MANIFEST_FORMAT:
        raise SchemaViolation('format', f'{path} is not a {MANIFEST_FORMAT} document')
    return doc
