"""
fit.py — Parameter recovery for probe-transmission spectra.

Fits S·[M₊ − R·M₋] to a spectrum by damped nonlinear least squares
(Levenberg-Marquardt with Marquardt diagonal scaling), using a
central-difference Jacobian and projection onto parameter bounds after every
step. The periodic phase χ is searched by multi-start; S and R are
initialised by a linear least-squares solve at each start, since the model is
linear in S and S·R.

Free parameters, in vector order:
    g_ef, chi, retro_r, scale_s, delta_offset [, epsilon] [, gamma_c]
with δ_ef = detuning − delta_offset. ε and γ_c are fixed unless the config
frees them. All values are in γ_c-normalised units.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.stats import linregress

from .analysis import SCCRegime, classify_scc, strongest_peak_pair
from .errors import (
    DegenerateAbscissaError, FitError, GridError, InsufficientPointsError,
    RingFitError,
)
from .model import DEFAULT_EPSILON, SpectrumModelParams, fit_model, transfer_intensities, wrap_phase
from .spectrum import Spectrum

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════
#  CONFIGURATION
# ═══════════════════════════════════════════════════════════════

PARAM_ORDER = ('g_ef', 'chi', 'retro_r', 'scale_s', 'delta_offset', 'epsilon', 'gamma_c')
PERIODIC = frozenset({'chi'})

DEFAULT_BOUNDS = {
    'g_ef': (0.0, math.inf),
    'chi': (-math.pi, math.pi),
    'retro_r': (0.0, math.inf),
    'scale_s': (1e-12, math.inf),
    'delta_offset': (-math.inf, math.inf),
    'epsilon': (0.0, 1.0),
    'gamma_c': (1e-9, math.inf),
}

# Jacobian step: max(REL_STEP·|p|, ABS_STEP)
REL_STEP = 1e-6
ABS_STEP = 1e-8

LAMBDA_INIT = 1e-3
LAMBDA_MIN = 1e-15
LAMBDA_MAX = 1e16
EIGEN_RTOL = 1e-12          # covariance: eigenvalues below this · max are null directions
CHI_WEAK_SIGMA = math.pi / 4
INIT_PROMINENCE = 0.05      # fraction of the data range for initial peak search


class Termination(str, Enum):
    STEP = 'step'
    GRAD = 'grad'
    COST = 'cost'
    MAX_ITER = 'max_iter'


@dataclass
class FitConfig:
    """Fitter settings. ε and γ_c are held at the *_fixed values unless freed."""
    epsilon_fixed: float = DEFAULT_EPSILON
    gamma_c_fixed: float = 1.0
    bounds: dict = field(default_factory=dict)
    chi_starts: int = 8
    max_iter: int = 200
    tol_step: float = 1e-12
    tol_grad: float = 1e-12
    tol_cost: float = 1e-15
    lock_r_zero_below_threshold: bool = False
    fix_r: Optional[float] = None
    free_epsilon: bool = False
    free_gamma_c: bool = False

    def __post_init__(self):
        unknown = set(self.bounds) - set(DEFAULT_BOUNDS)
        if unknown:
            raise ValueError(f"unknown bound names: {sorted(unknown)}")
        merged = dict(DEFAULT_BOUNDS)
        merged.update({k: (float(lo), float(hi)) for k, (lo, hi) in self.bounds.items()})
        for name, (lo, hi) in merged.items():
            if not lo < hi:
                raise ValueError(f"bounds for {name} are degenerate: [{lo}, {hi}]")
        self.bounds = merged
        for name in ('tol_step', 'tol_grad', 'tol_cost'):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.chi_starts < 1:
            raise ValueError('chi_starts must be >= 1')
        if self.max_iter < 1:
            raise ValueError('max_iter must be >= 1')
        if not 0.0 <= self.epsilon_fixed <= 1.0:
            raise ValueError('epsilon_fixed must lie in [0, 1]')
        if not self.gamma_c_fixed > 0:
            raise ValueError('gamma_c_fixed must be > 0')
        if self.fix_r is not None and not self.fix_r >= 0:
            raise ValueError('fix_r must be >= 0')

    def free_names(self, lock_r: bool = False) -> tuple:
        names = ['g_ef', 'chi']
        if self.fix_r is None and not lock_r:
            names.append('retro_r')
        names += ['scale_s', 'delta_offset']
        if self.free_epsilon:
            names.append('epsilon')
        if self.free_gamma_c:
            names.append('gamma_c')
        return tuple(names)


# ═══════════════════════════════════════════════════════════════
#  DATA STRUCTURES
# ═══════════════════════════════════════════════════════════════

@dataclass
class FitResult:
    """Outcome of one spectrum fit."""
    params: SpectrumModelParams
    delta_offset: float
    cost: float
    param_sigmas: dict
    n_iter: int
    converged: bool
    termination_reason: Termination
    chi_start_used: float
    n_points: int = 0
    free_names: tuple = ()
    singular: bool = False
    chi_weak: bool = False
    cost_history: list = field(default_factory=list)
    start_costs: list = field(default_factory=list)

    @property
    def dof(self) -> int:
        return max(self.n_points - len(self.free_names), 0)

    @property
    def reduced_cost(self) -> float:
        return self.cost / self.dof if self.dof else math.nan

    @property
    def regime(self) -> SCCRegime:
        return classify_scc(self.params.g_ef, self.params.gamma_c)

    def values(self) -> dict:
        """All parameter values by name (fixed ones included)."""
        p = self.params
        return {
            'g_ef': p.g_ef, 'chi': p.chi, 'retro_r': p.retro_r, 'scale_s': p.scale_s,
            'delta_offset': self.delta_offset, 'epsilon': p.epsilon, 'gamma_c': p.gamma_c,
        }

    def as_init(self) -> dict:
        """Warm-start guess for the next fit."""
        return self.values()

    def model_values(self, detuning) -> np.ndarray:
        return np.asarray(fit_model(np.asarray(detuning, dtype=float) - self.delta_offset,
                                    self.params), dtype=float)

    def summary(self) -> str:
        """Human-readable fit summary."""
        def _fmt(name):
            sig = self.param_sigmas.get(name)
            val = self.values()[name]
            return f"{val:.6g}" if sig is None else f"{val:.6g} ± {sig:.3g}"

        lines = [
            f"Fit: {'converged' if self.converged else 'NOT converged'} "
            f"({self.termination_reason.value}, {self.n_iter} iterations)",
            f"  g_ef:         {_fmt('g_ef')}  [{self.regime.value}]",
            f"  chi:          {_fmt('chi')}{'  (weakly identified)' if self.chi_weak else ''}",
            f"  R:            {_fmt('retro_r')}",
            f"  S:            {_fmt('scale_s')}",
            f"  delta_offset: {_fmt('delta_offset')}",
            f"  epsilon:      {_fmt('epsilon')}",
            f"  gamma_c:      {_fmt('gamma_c')}",
            f"  cost:         {self.cost:.6g} (dof {self.dof})",
            f"  chi start:    {self.chi_start_used:.4f}",
        ]
        if self.singular:
            lines.append("  normal equations singular at the solution")
        return '\n'.join(lines)

    def to_record(self) -> dict:
        rec = dict(self.values())
        rec.update({f'sigma_{k}': v for k, v in self.param_sigmas.items()})
        rec.update({
            'cost': self.cost,
            'n_iter': self.n_iter,
            'converged': self.converged,
            'termination_reason': self.termination_reason.value,
            'chi_start_used': self.chi_start_used,
            'n_points': self.n_points,
            'free_names': list(self.free_names),
            'singular': self.singular,
            'chi_weak': self.chi_weak,
            'regime': self.regime.value,
        })
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> 'FitResult':
        params = SpectrumModelParams(
            g_ef=rec['g_ef'], chi=rec['chi'], retro_r=rec['retro_r'],
            scale_s=rec['scale_s'], epsilon=rec['epsilon'], gamma_c=rec['gamma_c'],
        )
        return cls(
            params=params,
            delta_offset=rec['delta_offset'],
            cost=rec['cost'],
            param_sigmas={k[len('sigma_'):]: v for k, v in rec.items() if k.startswith('sigma_')},
            n_iter=rec['n_iter'],
            converged=rec['converged'],
            termination_reason=Termination(rec['termination_reason']),
            chi_start_used=rec['chi_start_used'],
            n_points=rec.get('n_points', 0),
            free_names=tuple(rec.get('free_names', ())),
            singular=rec.get('singular', False),
            chi_weak=rec.get('chi_weak', False),
        )


@dataclass
class BatchRow:
    """One line of a batch fit: atom number plus result or error."""
    n_atoms: float
    result: Optional[FitResult] = None
    error: Optional[str] = None
    source: str = ''

    @property
    def ok(self) -> bool:
        return self.result is not None


@dataclass
class GefRegression:
    slope: float
    intercept: float
    r_squared: float
    slope_stderr: float
    intercept_stderr: float
    n_points: int


@dataclass
class _Run:
    """One Levenberg-Marquardt run."""
    p: np.ndarray
    cost: float
    n_iter: int
    reason: Termination
    history: list
    chi_start: float = 0.0


# ═══════════════════════════════════════════════════════════════
#  RESIDUALS
# ═══════════════════════════════════════════════════════════════

def residuals(spectrum: Spectrum, params: SpectrumModelParams, delta_offset: float = 0.0) -> np.ndarray:
    """
    Weighted residuals r_i = (value_i − fit_model(detuning_i − delta_offset)) / sigma_i.

    Raises:
        GridError: empty spectrum.
    """
    if len(spectrum) == 0:
        raise GridError('empty', 'spectrum is empty')
    model = np.asarray(fit_model(spectrum.detuning - delta_offset, params), dtype=float)
    return (spectrum.value - model) * spectrum.weights


def _residual_function(spectrum: Spectrum, names: tuple, fixed: dict) -> Callable:
    x, y, w = spectrum.detuning, spectrum.value, spectrum.weights
    index = {n: i for i, n in enumerate(names)}

    def fun(vec: np.ndarray) -> np.ndarray:
        def val(name):
            return vec[index[name]] if name in index else fixed[name]
        m_plus, m_minus = transfer_intensities(
            x - val('delta_offset'), val('g_ef'), val('chi'), val('epsilon'), val('gamma_c'),
        )
        return (y - val('scale_s') * (m_plus - val('retro_r') * m_minus)) * w

    return fun


# ═══════════════════════════════════════════════════════════════
#  JACOBIAN / PROJECTION
# ═══════════════════════════════════════════════════════════════

def numeric_jacobian(fun: Callable, p: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                     f0: Optional[np.ndarray] = None,
                     rel_step: float = REL_STEP, abs_step: float = ABS_STEP) -> np.ndarray:
    """
    Central-difference Jacobian with step max(rel_step·|p_j|, abs_step).

    One-sided differences are used where a central step would leave the
    bounds.
    """
    p = np.asarray(p, dtype=float)
    if f0 is None:
        f0 = fun(p)
    jac = np.empty((f0.size, p.size))
    for j in range(p.size):
        h = max(rel_step * abs(p[j]), abs_step)
        up = p.copy()
        down = p.copy()
        if p[j] - h < lower[j]:
            up[j] += h
            jac[:, j] = (fun(up) - f0) / h
        elif p[j] + h > upper[j]:
            down[j] -= h
            jac[:, j] = (f0 - fun(down)) / h
        else:
            up[j] += h
            down[j] -= h
            jac[:, j] = (fun(up) - fun(down)) / (2.0 * h)
    return jac


def _projector(names: tuple, cfg: FitConfig):
    lower = np.array([cfg.bounds[n][0] for n in names])
    upper = np.array([cfg.bounds[n][1] for n in names])
    periodic = np.array([n in PERIODIC for n in names])

    def project(vec: np.ndarray) -> np.ndarray:
        out = np.clip(vec, lower, upper)
        out[periodic] = wrap_phase(vec[periodic])
        return out

    def delta(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = a - b
        d[periodic] = wrap_phase(d[periodic])
        return d

    # periodic parameters never take one-sided Jacobian steps
    jac_lower = np.where(periodic, -np.inf, lower)
    jac_upper = np.where(periodic, np.inf, upper)
    return project, delta, jac_lower, jac_upper


# ═══════════════════════════════════════════════════════════════
#  LEVENBERG-MARQUARDT
# ═══════════════════════════════════════════════════════════════

ILL_CONDITIONED = 1e-15     # squared Cholesky diagonal ratio reported at DEBUG


def _damped_step(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the damped normal equations by Cholesky. Raises LinAlgError if not positive definite."""
    factor = linalg.cho_factor(matrix)
    diag = np.abs(np.diag(factor[0]))
    if (diag.min() / diag.max()) ** 2 < ILL_CONDITIONED:
        logger.debug("ill-conditioned damped system (diag ratio %.3g)", diag.min() / diag.max())
    return linalg.cho_solve(factor, rhs)


def levenberg_marquardt(fun: Callable, p0: np.ndarray, names: tuple, cfg: FitConfig) -> _Run:
    """
    Bounded damped least squares.

    Accepted iterates have strictly decreasing cost. Termination:
      COST      relative cost reduction of an accepted step <= tol_cost
      STEP      step length <= tol_step·(|p| + tol_step), or no damped step
                can reduce the cost any more
      GRAD      max cosine between residual and Jacobian columns <= tol_grad
      MAX_ITER  iteration budget exhausted (not converged)
    """
    project, delta, jac_lo, jac_hi = _projector(names, cfg)
    p = project(np.asarray(p0, dtype=float))
    r = fun(p)
    cost = float(r @ r)
    history = [cost]
    lam = LAMBDA_INIT
    reason = Termination.MAX_ITER
    it = 0

    for it in range(1, cfg.max_iter + 1):
        if cost == 0.0:
            reason = Termination.COST
            break
        jac = numeric_jacobian(fun, p, jac_lo, jac_hi, f0=r)
        grad = jac.T @ r
        col_norm = np.linalg.norm(jac, axis=0)
        live = col_norm > 0
        cosines = np.abs(grad[live]) / (col_norm[live] * math.sqrt(cost))
        if cosines.size == 0 or cosines.max() <= cfg.tol_grad:
            reason = Termination.GRAD
            break

        normal = jac.T @ jac
        diag = np.diag(normal).copy()
        floor = diag.max() * EIGEN_RTOL if diag.max() > 0 else 1.0
        diag = np.maximum(diag, floor)

        accepted = False
        while lam <= LAMBDA_MAX:
            try:
                step = _damped_step(normal + lam * np.diag(diag), -grad)
            except (linalg.LinAlgError, ValueError):
                lam *= 10.0
                continue
            p_new = project(p + step)
            r_new = fun(p_new)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                moved = delta(p_new, p)
                reduction = (cost - cost_new) / cost
                p, r, cost = p_new, r_new, cost_new
                history.append(cost)
                lam = max(lam / 10.0, LAMBDA_MIN)
                accepted = True
                logger.debug("LM iter %d: cost=%.6e lambda=%.1e", it, cost, lam)
                if reduction <= cfg.tol_cost:
                    reason = Termination.COST
                elif np.linalg.norm(moved) <= cfg.tol_step * (np.linalg.norm(p) + cfg.tol_step):
                    reason = Termination.STEP
                break
            lam *= 10.0

        if not accepted:
            reason = Termination.STEP
            break
        if reason is not Termination.MAX_ITER:
            break
    else:
        reason = Termination.MAX_ITER

    return _Run(p=p, cost=cost, n_iter=it, reason=reason, history=history)


# ═══════════════════════════════════════════════════════════════
#  COVARIANCE
# ═══════════════════════════════════════════════════════════════

def _param_sigmas(jac: np.ndarray, cost: float, n_points: int) -> tuple:
    """
    1σ uncertainties from (JᵀJ)⁻¹ scaled by the residual variance
    cost/(n − k). Null directions of JᵀJ give infinite sigmas.

    Returns:
        (sigmas array, singular flag)
    """
    k = jac.shape[1]
    normal = jac.T @ jac
    w, v = linalg.eigh(normal)
    top = w.max() if w.size and w.max() > 0 else 0.0
    good = w > top * EIGEN_RTOL if top > 0 else np.zeros_like(w, dtype=bool)
    var = (v[:, good] ** 2 / w[good]).sum(axis=1)
    var = var * (cost / max(n_points - k, 1))
    null = np.abs(v[:, ~good]).max(axis=1) > 1e-6 if (~good).any() else np.zeros(k, dtype=bool)
    var[null] = math.inf
    return np.sqrt(var), bool((~good).any())


# ═══════════════════════════════════════════════════════════════
#  INITIALISATION
# ═══════════════════════════════════════════════════════════════

def _initial_shape(spectrum: Spectrum, gamma_c: float) -> tuple:
    """(g_ef, delta_offset) from peak positions, or from the width of a single line."""
    x, y = spectrum.detuning, spectrum.value
    pair = strongest_peak_pair(spectrum, INIT_PROMINENCE)
    if pair is not None:
        lo, hi = pair
        return (hi - lo) / 2.0, (hi + lo) / 2.0

    top = int(np.argmax(y))
    half = 0.5 * (y[top] + max(float(np.min(y)), 0.0))
    left = top
    while left > 0 and y[left - 1] >= half:
        left -= 1
    right = top
    while right < y.size - 1 and y[right + 1] >= half:
        right += 1

    def _cross(i_in, i_out):
        if i_in == i_out or y[i_in] == y[i_out]:
            return x[i_in]
        return x[i_in] + (half - y[i_in]) * (x[i_out] - x[i_in]) / (y[i_out] - y[i_in])

    x_left = _cross(left, max(left - 1, 0))
    x_right = _cross(right, min(right + 1, y.size - 1))
    width = max(x_right - x_left, 0.0)
    g0 = math.sqrt(max((width / 2.0) ** 2 - gamma_c ** 2, 0.0))
    return g0, 0.5 * (x_left + x_right) if width > 0 else x[top]


def _linear_scale(spectrum: Spectrum, values: dict, fixed_r: Optional[float]) -> tuple:
    """Best (S, R) for given nonlinear parameters: the model is linear in S and S·R."""
    m_plus, m_minus = transfer_intensities(
        spectrum.detuning - values['delta_offset'], values['g_ef'], values['chi'],
        values['epsilon'], values['gamma_c'],
    )
    w = spectrum.weights
    yw = spectrum.value * w

    def _scale_only(r):
        basis = (m_plus - r * m_minus) * w
        denom = float(basis @ basis)
        return (float(basis @ yw) / denom if denom > 0 else 1.0), r

    if fixed_r is not None:
        s, r = _scale_only(fixed_r)
    else:
        design = np.column_stack([m_plus * w, -m_minus * w])
        (a, b), *_ = np.linalg.lstsq(design, yw, rcond=None)
        if a > 0 and b >= 0:
            s, r = a, b / a
        else:
            s, r = _scale_only(0.0)
    if not s > 0:
        peak = float(np.max(m_plus))
        s = max(float(np.max(spectrum.value)), 1e-12) / peak if peak > 0 else 1.0
    return s, r


# ═══════════════════════════════════════════════════════════════
#  PUBLIC FITTING API
# ═══════════════════════════════════════════════════════════════

def fit_spectrum(spectrum: Spectrum, cfg: Optional[FitConfig] = None,
                 init: Optional[dict] = None) -> FitResult:
    """
    Fit g_ef, χ, R, S and the axis offset to one spectrum.

    Runs one damped least-squares fit per χ start (cfg.chi_starts equally
    spaced in [−π, π), plus init['chi'] when a warm start is given) and
    returns the lowest-cost result; equal costs prefer the smallest |χ|.

    Args:
        spectrum: data on a γ_c-normalised detuning axis
        cfg: fitter settings (defaults if None)
        init: optional initial values by parameter name

    Raises:
        InsufficientPointsError: fewer points than free parameters.
    """
    cfg = cfg or FitConfig()
    init = dict(init or {})

    fixed = {
        'epsilon': init.get('epsilon', cfg.epsilon_fixed) if cfg.free_epsilon else cfg.epsilon_fixed,
        'gamma_c': init.get('gamma_c', cfg.gamma_c_fixed) if cfg.free_gamma_c else cfg.gamma_c_fixed,
    }

    if 'g_ef' in init and 'delta_offset' in init:
        g0, off0 = float(init['g_ef']), float(init['delta_offset'])
    else:
        g0, off0 = _initial_shape(spectrum, fixed['gamma_c'])

    lock_r = cfg.lock_r_zero_below_threshold and g0 < fixed['gamma_c']
    fixed_r = cfg.fix_r if cfg.fix_r is not None else (0.0 if lock_r else None)
    names = cfg.free_names(lock_r=lock_r)
    if len(spectrum) < len(names):
        raise InsufficientPointsError(len(spectrum), len(names))
    if fixed_r is not None:
        fixed['retro_r'] = fixed_r

    starts = [-math.pi + 2.0 * math.pi * k / cfg.chi_starts for k in range(cfg.chi_starts)]
    if 'chi' in init:
        starts.insert(0, wrap_phase(init['chi']))

    fun = _residual_function(spectrum, names, fixed)
    runs = []
    for chi0 in starts:
        values = {'g_ef': g0, 'chi': chi0, 'delta_offset': off0, **fixed}
        s0, r0 = _linear_scale(spectrum, values, fixed_r)
        values.update(scale_s=s0, retro_r=r0)
        p0 = np.array([values[n] for n in names], dtype=float)
        with np.errstate(over='ignore', invalid='ignore'):
            run = levenberg_marquardt(fun, p0, names, cfg)
        run.chi_start = chi0
        runs.append(run)
        logger.debug("chi start %.3f: cost=%.6e (%s)", chi0, run.cost, run.reason.value)

    best = _select_best(runs, names)
    return _build_result(spectrum, best, runs, names, fixed, cfg)


def _select_best(runs: list, names: tuple) -> _Run:
    chi_at = names.index('chi')
    best = min(runs, key=lambda r: r.cost)
    ties = [r for r in runs if np.isclose(r.cost, best.cost, rtol=1e-9, atol=1e-300)]
    return min(ties, key=lambda r: abs(r.p[chi_at]))


def _build_result(spectrum: Spectrum, run: _Run, runs: list, names: tuple,
                  fixed: dict, cfg: FitConfig) -> FitResult:
    values = dict(fixed)
    values.update(zip(names, run.p))
    params = SpectrumModelParams(
        g_ef=float(values['g_ef']), chi=float(values['chi']),
        retro_r=float(values['retro_r']), scale_s=float(values['scale_s']),
        epsilon=float(values['epsilon']), gamma_c=float(values['gamma_c']),
    )

    fun = _residual_function(spectrum, names, fixed)
    _, _, jac_lo, jac_hi = _projector(names, cfg)
    jac = numeric_jacobian(fun, run.p, jac_lo, jac_hi)
    sig, singular = _param_sigmas(jac, run.cost, len(spectrum))
    sigmas = dict(zip(names, (float(s) for s in sig)))
    if singular:
        logger.info("normal equations singular at the solution; unidentified parameters get infinite sigma")

    sigma_chi = sigmas.get('chi', math.nan)
    chi_weak = params.g_ef < params.gamma_c or not sigma_chi <= CHI_WEAK_SIGMA
    if chi_weak and params.g_ef >= params.gamma_c:
        logger.warning("chi weakly identified (sigma %.3g rad) despite g_ef = %.4g", sigma_chi, params.g_ef)
    elif chi_weak:
        logger.debug("weak coupling: chi not identified")

    converged = run.reason is not Termination.MAX_ITER
    if not converged:
        logger.warning("fit did not converge in %d iterations; returning best-so-far", run.n_iter)

    return FitResult(
        params=params,
        delta_offset=float(values['delta_offset']),
        cost=run.cost,
        param_sigmas=sigmas,
        n_iter=run.n_iter,
        converged=converged,
        termination_reason=run.reason,
        chi_start_used=run.chi_start,
        n_points=len(spectrum),
        free_names=names,
        singular=singular,
        chi_weak=chi_weak,
        cost_history=list(run.history),
        start_costs=[r.cost for r in runs],
    )


def batch_fit(series: list, cfg: Optional[FitConfig] = None, max_workers: int = 1) -> list:
    """
    Fit an atom-number series in ascending N.

    Sequential runs warm-start each trace from the previous result (on top
    of the χ multi-start); with max_workers > 1 traces are fitted in a
    thread pool from multi-start initialisation only. A failing trace is
    recorded with its error and does not stop the batch.

    Returns:
        list of BatchRow sorted by n_atoms.
    """
    cfg = cfg or FitConfig()
    indexed = []
    for i, spec in enumerate(series):
        n = spec.meta.get('n_atoms')
        if n is None:
            raise FitError(f"spectrum #{i + 1} carries no n_atoms")
        indexed.append((float(n), i, spec))
    if not indexed:
        raise FitError('series is empty')
    indexed.sort(key=lambda t: (t[0], t[1]))

    def _label(i, spec):
        return str(spec.meta.get('source', spec.meta.get('trace', i + 1)))

    def _fit_row(n, i, spec, init):
        try:
            res = fit_spectrum(spec, cfg, init)
        except (RingFitError, ArithmeticError, linalg.LinAlgError) as e:
            logger.warning("trace %s (N=%.6g) failed: %s", _label(i, spec), n, e)
            return BatchRow(n_atoms=n, error=str(e), source=_label(i, spec))
        logger.info("trace %s (N=%.6g): g_ef=%.4g cost=%.4g", _label(i, spec), n,
                    res.params.g_ef, res.cost)
        return BatchRow(n_atoms=n, result=res, source=_label(i, spec))

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(lambda t: _fit_row(t[0], t[1], t[2], None), indexed))

    rows = []
    prev = None
    for n, i, spec in indexed:
        row = _fit_row(n, i, spec, prev)
        if row.ok:
            prev = row.result.as_init()
        rows.append(row)
    return rows


def regress_gef_vs_n(table: list) -> GefRegression:
    """
    Ordinary least squares of fitted g_ef on N over the successful rows with a finite N.

    Raises:
        DegenerateAbscissaError: fewer than two distinct N values.
    """
    pts = [(row.n_atoms, row.result.params.g_ef) for row in table
           if row.ok and row.n_atoms is not None and math.isfinite(row.n_atoms)]
    n_vals = np.array([p[0] for p in pts], dtype=float)
    g_vals = np.array([p[1] for p in pts], dtype=float)
    if n_vals.size < 2 or np.unique(n_vals).size < 2:
        raise DegenerateAbscissaError('regression needs at least two distinct atom numbers')
    fit = linregress(n_vals, g_vals)
    return GefRegression(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue ** 2),
        slope_stderr=float(fit.stderr),
        intercept_stderr=float(fit.intercept_stderr),
        n_points=int(n_vals.size),
    )


def series_frame(table: list) -> pd.DataFrame:
    """One row per trace with the parameters shown against N (plot-ready)."""
    rows = []
    for row in table:
        rec = {'n_atoms': row.n_atoms, 'source': row.source, 'error': row.error or ''}
        if row.ok:
            rec.update(row.result.to_record())
            rec['free_names'] = ' '.join(rec['free_names'])
        rows.append(rec)
    return pd.DataFrame(rows)
