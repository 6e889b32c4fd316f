"""DM and CM two-port models of DSR-loaded differential line cells.

The differential half-circuit grounds the symmetry plane, leaving the shunt
branch C -> (L_C || C_C). The common-mode half-circuit opens it, so the
strip carries no current and only C in series with C_C (= C_1) remains.

Series-arm topologies for the bandpass cells:

``"t"``
    symmetric T, each arm is C_g followed by L/2 (L is the line inductance
    of the whole cell). Default.
``"t-full"``
    symmetric T, each arm is C_g followed by a full L.
``"gamma"``
    one C_g and one L ahead of the shunt branch, nothing after it.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .elements import dsr_shunt_impedance
from .errors import DomainError, UsageError
from .netcore import abcd_series, abcd_shunt_z, cascade

TOPOLOGIES = ("t", "t-full", "gamma")


def _check_positive(obj):
    for f in fields(obj):
        v = getattr(obj, f.name)
        if not (np.isfinite(v) and v > 0):
            raise DomainError(f"{type(obj).__name__}.{f.name} must be finite and > 0, got {v}")


@dataclass(frozen=True)
class DsrCellParams:
    l_line: float        # L  [H]
    c_gap: float         # C_g [F]
    c_coup: float        # C  [F]
    l_strip_half: float  # L_C [H], half of the strip inductance
    c_patch: float       # C_C [F]

    def __post_init__(self):
        _check_positive(self)


@dataclass(frozen=True)
class CmCellParams:
    l_line: float
    c_gap: float
    c1: float

    def __post_init__(self):
        _check_positive(self)


@dataclass(frozen=True)
class BandstopCellParams:
    l_line: float
    c_coup: float
    l_strip_half: float
    c_patch: float

    def __post_init__(self):
        _check_positive(self)


def _omega(f):
    f = np.asarray(f, dtype=float)
    if np.any(~(f > 0)):
        raise DomainError("frequency must be > 0")
    return 2 * np.pi * f


def _bandpass(l_line, c_gap, z_shunt, w, topology):
    if topology not in TOPOLOGIES:
        raise UsageError(f"unknown topology {topology!r}; expected one of {TOPOLOGIES}")
    gap = abcd_series(1.0 / (1j * w * c_gap))
    shunt = abcd_shunt_z(z_shunt)
    if topology == "gamma":
        return cascade([gap, abcd_series(1j * w * l_line), shunt])
    arm_l = l_line / 2 if topology == "t" else l_line
    line = abcd_series(1j * w * arm_l)
    return cascade([gap, line, shunt, line, gap])


def dm_bandpass_cell(p: DsrCellParams, f, topology: str = "t") -> np.ndarray:
    w = _omega(f)
    z = dsr_shunt_impedance(p.c_coup, p.l_strip_half, p.c_patch, f)
    return _bandpass(p.l_line, p.c_gap, z, w, topology)


def cm_bandpass_cell(p: CmCellParams, f, topology: str = "t") -> np.ndarray:
    w = _omega(f)
    return _bandpass(p.l_line, p.c_gap, 1.0 / (1j * w * p.c1), w, topology)


def cm_params_from_dm(p: DsrCellParams, l_cm: float, cg_cm: float) -> CmCellParams:
    """CM half-circuit values: C_1 is C in series with C_C; line values are supplied."""
    c1 = p.c_coup * p.c_patch / (p.c_coup + p.c_patch)
    return CmCellParams(l_line=l_cm, c_gap=cg_cm, c1=c1)


def dm_bandstop_cell(p: BandstopCellParams, f) -> np.ndarray:
    w = _omega(f)
    half = abcd_series(1j * w * p.l_line / 2)
    z = dsr_shunt_impedance(p.c_coup, p.l_strip_half, p.c_patch, f)
    return cascade([half, abcd_shunt_z(z), half])


def cm_bandstop_cell(l_line: float, f) -> np.ndarray:
    if not l_line > 0:
        raise DomainError("line inductance must be > 0")
    return abcd_series(1j * _omega(f) * l_line)
