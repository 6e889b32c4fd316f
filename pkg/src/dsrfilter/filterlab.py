"""Periodic N-cell filters, frequency sweeps and passband metrics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import MetricsError, UsageError
from .netcore import FrequencyGrid, SParams2, abcd_to_s, db

CellFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Filter:
    """N identical cells per mode; each cell maps frequencies to ABCD arrays."""

    dm_cell: CellFn
    cm_cell: CellFn
    n: int

    def dm_abcd(self, f) -> np.ndarray:
        return np.linalg.matrix_power(self.dm_cell(f), self.n)

    def cm_abcd(self, f) -> np.ndarray:
        return np.linalg.matrix_power(self.cm_cell(f), self.n)


def build_filter(dm_cell: CellFn, cm_cell: CellFn, n: int) -> Filter:
    if int(n) != n or n < 1:
        raise UsageError(f"number of cells must be a positive integer, got {n}")
    return Filter(dm_cell, cm_cell, int(n))


@dataclass(frozen=True)
class SweepResult:
    grid: FrequencyGrid
    dm: SParams2
    cm: SParams2

    @property
    def freq(self) -> np.ndarray:
        return self.grid.points

    def __post_init__(self):
        n = len(self.grid)
        if self.dm.s.shape != (n, 2, 2) or self.cm.s.shape != (n, 2, 2):
            raise UsageError("sweep data does not match the grid length")


def sweep(flt: Filter, grid: FrequencyGrid | Sequence[float], z_ref: float = 50.0) -> SweepResult:
    if not isinstance(grid, FrequencyGrid):
        grid = FrequencyGrid(grid)
    f = grid.points
    return SweepResult(grid, abcd_to_s(flt.dm_abcd(f), z_ref), abcd_to_s(flt.cm_abcd(f), z_ref))


def default_grid(f0: float, points: int = 1001) -> FrequencyGrid:
    return FrequencyGrid.linear(0.25 * f0, 2.5 * f0, points)


@dataclass(frozen=True)
class FilterMetrics:
    f0d: float
    band3db: tuple
    fbw: float
    il_db: float
    cm_rejection_db: float
    cmrr_db: float
    cmrr_f0_db: float
    cm_supp_band: tuple | None
    cm_threshold_db: float

    def supp_band_multiples(self):
        if self.cm_supp_band is None:
            return None
        return self.cm_supp_band[0] / self.f0d, self.cm_supp_band[1] / self.f0d


def _crossing(f, y, i, j, level):
    # linear interpolation of y == level between grid points i and j
    return f[i] + (level - y[i]) * (f[j] - f[i]) / (y[j] - y[i])


def metrics(sr: SweepResult, cm_threshold_db: float = 30.0) -> FilterMetrics:
    """Passband and common-mode metrics of a sweep.

    The 3-dB band is the contiguous run of points within 3 dB of the DM peak
    that contains the peak, with edges interpolated linearly in dB.
    """
    f = sr.freq
    dd = db(sr.dm.s21)
    cc = np.maximum(db(sr.cm.s21), -400.0)
    k0 = int(np.argmax(dd))
    peak = dd[k0]
    level = peak - 3.0
    lo = k0
    while lo > 0 and dd[lo - 1] >= level:
        lo -= 1
    hi = k0
    while hi < f.size - 1 and dd[hi + 1] >= level:
        hi += 1
    if lo == 0 or hi == f.size - 1:
        raise MetricsError("passband not bracketed: no 3-dB crossing inside the sweep")
    f_lo = _crossing(f, dd, lo - 1, lo, level)
    f_hi = _crossing(f, dd, hi, hi + 1, level)

    # in-band samples: interior grid points plus the interpolated edges
    inner = slice(lo, hi + 1)
    band_f = np.concatenate([[f_lo], f[inner], [f_hi]])
    band_dd = np.interp(band_f, f, dd)
    band_cc = np.interp(band_f, f, cc)

    supp = cc <= -cm_threshold_db
    if supp[k0]:
        a = k0
        while a > 0 and supp[a - 1]:
            a -= 1
        b = k0
        while b < f.size - 1 and supp[b + 1]:
            b += 1
        supp_band = (float(f[a]), float(f[b]))
    else:
        supp_band = None

    return FilterMetrics(
        f0d=float(f[k0]),
        band3db=(float(f_lo), float(f_hi)),
        fbw=float((f_hi - f_lo) / f[k0]),
        il_db=float(-peak),
        cm_rejection_db=float(-np.max(band_cc)),
        cmrr_db=float(np.min(band_dd - band_cc)),
        cmrr_f0_db=float(dd[k0] - cc[k0]),
        cm_supp_band=supp_band,
        cm_threshold_db=float(cm_threshold_db),
    )


def cm_rejection_scaling(cm_cell: CellFn, n_list: Sequence[int], probe_hz: float,
                         z_ref: float = 50.0) -> list:
    """CM rejection (-|S21| in dB) at ``probe_hz`` for each cascade length."""
    out = []
    for n in n_list:
        if int(n) != n or n < 1:
            raise UsageError("cascade lengths must be positive integers")
        net = np.linalg.matrix_power(cm_cell(np.asarray(probe_hz, float)), int(n))
        out.append((int(n), float(-db(abcd_to_s(net, z_ref).s21))))
    return out


def format_metrics(m: FilterMetrics, target_fbw: float | None = None) -> str:
    lines = [
        f"f0d            {m.f0d / 1e9:.6f} GHz",
        f"3-dB band      {m.band3db[0] / 1e9:.6f} - {m.band3db[1] / 1e9:.6f} GHz",
        f"FBW            {100 * m.fbw:.3f} %" + (
            f"  (target {100 * target_fbw:.3f} %)" if target_fbw is not None else ""),
        f"IL at f0d      {m.il_db:.4f} dB",
        f"CM rejection   {m.cm_rejection_db:.3f} dB (in 3-dB band)",
        f"CMRR min       {m.cmrr_db:.3f} dB",
        f"CMRR at f0d    {m.cmrr_f0_db:.3f} dB",
    ]
    mult = m.supp_band_multiples()
    if mult is None:
        lines.append(f"|Scc21|<=-{m.cm_threshold_db:g} dB  not met at f0d")
    else:
        lines.append(f"|Scc21|<=-{m.cm_threshold_db:g} dB  {mult[0]:.3f} f0d - {mult[1]:.3f} f0d")
    return "\n".join(lines)


def metrics_csv(m: FilterMetrics) -> str:
    band = m.cm_supp_band or (float("nan"), float("nan"))
    head = ("f0d_hz,f_lo_hz,f_hi_hz,fbw,il_db,cm_rejection_db,cmrr_db,cmrr_f0_db,"
            "cm_threshold_db,supp_lo_hz,supp_hi_hz")
    vals = (m.f0d, *m.band3db, m.fbw, m.il_db, m.cm_rejection_db, m.cmrr_db, m.cmrr_f0_db,
            m.cm_threshold_db, *band)
    return head + "\n" + ",".join(f"{v:.12g}" for v in vals) + "\n"
