"""Least-squares extraction of cell element values from S-parameter targets.

The optimizer is scipy's bounded Nelder-Mead simplex working on log(parameter),
restarted from the best vertex until a restart stops improving.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import dsrcell
from .errors import UsageError
from .netcore import SParams2, abcd_to_s, phase_deg

DB_FLOOR = -100.0

PARAM_NAMES = {
    "dm_bandpass": ("l_line", "c_gap", "c_coup", "l_strip_half", "c_patch"),
    "cm_bandpass": ("l_line", "c_gap", "c1"),
}


def model_response(kind: str, params: dict, freqs, z_ref=50.0, topology="t") -> SParams2:
    """S-parameters of a cell kind for a full parameter dict."""
    if kind == "dm_bandpass":
        net = dsrcell.dm_bandpass_cell(dsrcell.DsrCellParams(**params), freqs, topology)
    elif kind == "cm_bandpass":
        net = dsrcell.cm_bandpass_cell(dsrcell.CmCellParams(**params), freqs, topology)
    else:
        raise UsageError(f"unknown cell kind {kind!r}; expected one of {sorted(PARAM_NAMES)}")
    return abcd_to_s(net, z_ref)


@dataclass
class FitProblem:
    """What to fit and against what.

    ``bounds`` maps each free parameter to (lower, upper); every other
    parameter of the cell kind must be given in ``fixed``.
    """

    kind: str
    bounds: dict
    freqs: np.ndarray
    target: SParams2
    fixed: dict = field(default_factory=dict)
    weights: np.ndarray | None = None
    mag_weight: float = 1.0
    phase_weight: float = 0.1
    topology: str = "t"

    def __post_init__(self):
        if self.kind not in PARAM_NAMES:
            raise UsageError(f"unknown cell kind {self.kind!r}")
        names = PARAM_NAMES[self.kind]
        unknown = (set(self.bounds) | set(self.fixed)) - set(names)
        if unknown:
            raise UsageError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        missing = set(names) - set(self.bounds) - set(self.fixed)
        if missing:
            raise UsageError(f"parameters neither free nor fixed: {sorted(missing)}")
        if not self.bounds:
            raise UsageError("nothing to fit")
        for name, (lo, hi) in self.bounds.items():
            if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo < hi):
                raise UsageError(f"bad bounds for {name}: ({lo}, {hi})")
        self.freqs = np.asarray(self.freqs, dtype=float)
        if self.target.s.shape != self.freqs.shape + (2, 2):
            raise UsageError("target does not match the frequency list")
        if self.freqs.size < 2 * len(self.bounds):
            raise UsageError(f"need at least {2 * len(self.bounds)} target points")
        if self.weights is None:
            self.weights = np.ones(self.freqs.size)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != self.freqs.shape or np.any(self.weights < 0):
            raise UsageError("weights must be nonnegative, one per frequency")

    @property
    def free(self) -> tuple:
        return tuple(n for n in PARAM_NAMES[self.kind] if n in self.bounds)

    def full_params(self, free_values: dict) -> dict:
        return {**self.fixed, **free_values}

    def in_bounds(self, values: dict) -> bool:
        return all(self.bounds[k][0] <= values[k] <= self.bounds[k][1] for k in self.free)


@dataclass
class FitResult:
    parameters: dict
    cost: float
    initial_cost: float
    iterations: int
    evaluations: int
    converged: bool
    trace: list = field(repr=False, default_factory=list)


def _clamped_db(x):
    with np.errstate(divide="ignore"):
        return np.maximum(20 * np.log10(np.abs(x)), DB_FLOOR)


def _wrap_deg(d):
    return (d + 180.0) % 360.0 - 180.0


def mismatch(model: SParams2, target: SParams2, weights, mag_weight=1.0, phase_weight=0.1) -> float:
    """Weighted squared dB and phase error over S11 and S21."""
    total = np.zeros(np.shape(weights))
    for m, t in ((model.s21, target.s21), (model.s11, target.s11)):
        if mag_weight:
            total = total + mag_weight * (_clamped_db(m) - _clamped_db(t)) ** 2
        if phase_weight:
            total = total + phase_weight * _wrap_deg(phase_deg(m) - phase_deg(t)) ** 2
    return float(np.sum(weights * total))


def objective(params: dict, problem: FitProblem) -> float:
    """Objective for free-parameter values ``params`` (must lie within bounds)."""
    if not problem.in_bounds(params):
        raise UsageError("parameters outside bounds")
    model = model_response(problem.kind, problem.full_params(params), problem.freqs,
                           problem.target.z_ref, problem.topology)
    return mismatch(model, problem.target, problem.weights, problem.mag_weight, problem.phase_weight)


@dataclass
class FitOptions:
    max_evals: int = 5000
    max_restarts: int = 5
    initial_step: float = 0.1   # log-space simplex edge
    xatol: float = 1e-9         # log-space simplex diameter at convergence
    restart_rtol: float = 1e-9


def _nelder_mead(fun, x0, lo, hi, step, xatol, budget):
    """One bounded scipy Nelder-Mead run from a simplex of edge ``step``.

    Convergence uses the simplex spread in x only (``fatol`` is infinite), so
    the stopping point does not depend on the scale of the objective.
    Returns (best_x, best_f, iterations, evals, converged, trace) where
    ``trace`` is the running best cost after every evaluation.
    """
    n = x0.size
    sim = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] = v[i] + step if v[i] + step <= hi[i] else v[i] - step
        sim.append(np.clip(v, lo, hi))
    trace = []

    def f(x):
        val = fun(np.clip(x, lo, hi))
        trace.append(val if not trace else min(val, trace[-1]))
        return val

    res = minimize(f, x0, method="Nelder-Mead", bounds=list(zip(lo, hi)),
                   options={"initial_simplex": np.array(sim), "xatol": xatol, "fatol": math.inf,
                            "maxfev": budget, "maxiter": 10 * budget})
    return np.clip(res.x, lo, hi), float(res.fun), int(res.nit), len(trace), res.status == 0, trace


def fit(problem: FitProblem, initial: dict, options: FitOptions | None = None) -> FitResult:
    """Fit the free parameters of ``problem`` starting from ``initial``.

    ``trace`` records the best cost after every objective evaluation across
    all restarts; it never increases.
    """
    opts = options or FitOptions()
    names = problem.free
    missing = set(names) - set(initial)
    if missing:
        raise UsageError(f"initial values missing for {sorted(missing)}")
    start = {k: float(initial[k]) for k in names}
    if not problem.in_bounds(start):
        raise UsageError("initial point lies outside the bounds")
    lo = np.log([problem.bounds[k][0] for k in names])
    hi = np.log([problem.bounds[k][1] for k in names])

    def to_params(u):
        return {k: float(v) for k, v in zip(names, np.exp(u))}

    def fun(u):
        p = to_params(u)
        # exp/log round off may step a hair outside the bounds
        p = {k: min(max(v, problem.bounds[k][0]), problem.bounds[k][1]) for k, v in p.items()}
        return objective(p, problem)

    u_best = np.clip(np.log([start[k] for k in names]), lo, hi)
    f_best = fun(u_best)
    initial_cost = f_best
    evals, iters = 1, 0
    trace = [f_best]
    converged = False
    for _ in range(opts.max_restarts + 1):
        budget = opts.max_evals - evals
        if budget <= 0:
            converged = False
            break
        u, fu, it, ev, conv, tr = _nelder_mead(fun, u_best, lo, hi, opts.initial_step,
                                               opts.xatol, budget)
        evals += ev
        iters += it
        improved = fu < f_best and (f_best - fu) > opts.restart_rtol * f_best
        if fu < f_best:
            u_best, f_best = u, fu
        for t in tr:
            trace.append(min(t, trace[-1]))
        converged = conv
        if not conv or not improved:
            break
    params = {k: min(max(v, problem.bounds[k][0]), problem.bounds[k][1])
              for k, v in to_params(u_best).items()}
    return FitResult(params, f_best, initial_cost, iters, evals, converged, trace)


def synthetic_problem(kind: str, truth: dict, freqs, free=None, rel_bounds=(0.25, 4.0),
                      **kw) -> FitProblem:
    """A problem whose target is generated from ``truth`` itself."""
    free = tuple(free or PARAM_NAMES[kind])
    target = model_response(kind, truth, freqs, kw.get("z_ref", 50.0), kw.get("topology", "t"))
    bounds = {k: (truth[k] * rel_bounds[0], truth[k] * rel_bounds[1]) for k in free}
    fixed = {k: v for k, v in truth.items() if k not in free}
    kw.pop("z_ref", None)
    return FitProblem(kind, bounds, freqs, target, fixed, **kw)
