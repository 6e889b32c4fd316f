"""Lossless lumped elements and series/parallel composition trees.

Impedances are complex numpy values. An exact pole is reported as the
infinite-impedance marker ``INF_Z`` instead of NaN.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, UsageError

INF_Z = complex(math.inf, 0.0)

# Relative size below which a sum of reactances is treated as an exact cancellation.
RESONANCE_RTOL = 1e-12

KINDS = ("inductor", "capacitor", "resistor")


@dataclass(frozen=True)
class Element:
    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown element kind {self.kind!r}")
        if not (math.isfinite(self.value) and self.value > 0):
            raise DomainError(f"{self.kind} value must be finite and > 0, got {self.value}")


def inductor(value):
    return Element("inductor", value)


def capacitor(value):
    return Element("capacitor", value)


def resistor(value):
    return Element("resistor", value)


@dataclass(frozen=True)
class Series:
    children: tuple

    def __init__(self, *children):
        if len(children) < 2:
            raise UsageError("a series node needs at least two children")
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class Parallel:
    children: tuple

    def __init__(self, *children):
        if len(children) < 2:
            raise UsageError("a parallel node needs at least two children")
        object.__setattr__(self, "children", tuple(children))


Branch = Union[Element, Series, Parallel]


def _omega(f):
    f = np.asarray(f, dtype=float)
    if np.any(~(f > 0)):
        raise DomainError("frequency must be > 0")
    return 2.0 * np.pi * f


def is_infinite(z) -> np.ndarray:
    return np.isinf(np.asarray(z, dtype=complex))


def element_impedance(e: Element, f):
    w = _omega(f)
    if e.kind == "inductor":
        return 1j * w * e.value
    if e.kind == "capacitor":
        return 1.0 / (1j * w * e.value)
    return np.full(w.shape, e.value, dtype=complex)[()]


def _series_sum(zs):
    zs = np.broadcast_arrays(*zs)
    inf = np.zeros(zs[0].shape, dtype=bool)
    total = np.zeros(zs[0].shape, dtype=complex)
    scale = np.zeros(zs[0].shape)
    for z in zs:
        z_inf = np.isinf(z)
        inf |= z_inf
        zf = np.where(z_inf, 0, z)
        total = total + zf
        scale = scale + np.abs(zf)
    total = np.where(np.abs(total) <= RESONANCE_RTOL * scale, 0, total)
    return np.where(inf, INF_Z, total)


def _parallel_sum(zs):
    zs = np.broadcast_arrays(*zs)
    short = np.zeros(zs[0].shape, dtype=bool)
    ytot = np.zeros(zs[0].shape, dtype=complex)
    scale = np.zeros(zs[0].shape)
    for z in zs:
        z_short = z == 0
        short |= z_short
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(np.isinf(z) | z_short, 0, 1.0 / np.where(z_short, 1, z))
        ytot = ytot + y
        scale = scale + np.abs(y)
    open_ = np.abs(ytot) <= RESONANCE_RTOL * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(open_, INF_Z, 1.0 / np.where(open_, 1, ytot))
    return np.where(short, 0, z)


def branch_impedance(b: Branch, f):
    """Impedance of a composition tree at ``f`` (Hz, scalar or array).

    Exact series resonances give 0, exact parallel resonances give ``INF_Z``.
    """
    if isinstance(b, Element):
        return np.asarray(element_impedance(b, f), dtype=complex)[()]
    zs = [np.asarray(branch_impedance(c, f), dtype=complex) for c in b.children]
    if isinstance(b, Series):
        return _series_sum(zs)[()]
    if isinstance(b, Parallel):
        return _parallel_sum(zs)[()]
    raise UsageError(f"not a branch: {b!r}")


def dsr_branch(c, l_c, c_c) -> Series:
    """Compositional form of the DSR shunt branch: C in series with (L_C || C_C)."""
    return Series(capacitor(c), Parallel(inductor(l_c), capacitor(c_c)))


def dsr_shunt_impedance(c, l_c, c_c, f):
    """Closed-form impedance of the DSR shunt branch.

    Z = (1 - w^2 L_C (C + C_C)) / (j w C (1 - w^2 L_C C_C)). Zero at
    1/sqrt(L_C (C + C_C)), pole (``INF_Z``) at 1/sqrt(L_C C_C).
    """
    for name, v in (("C", c), ("L_C", l_c), ("C_C", c_c)):
        if not v > 0:
            raise DomainError(f"{name} must be > 0")
    w = _omega(f)
    w2 = w * w
    num = 1.0 - w2 * l_c * (c + c_c)
    den = 1.0 - w2 * l_c * c_c
    pole = np.abs(den) <= RESONANCE_RTOL
    with np.errstate(divide="ignore", invalid="ignore"):
        z = num / (1j * w * c * np.where(pole, 1.0, den))
    return np.where(pole, INF_Z, z)[()]


def dsr_zero_frequency(c, l_c, c_c) -> float:
    return 1.0 / (2.0 * math.pi * math.sqrt(l_c * (c + c_c)))


def dsr_pole_frequency(l_c, c_c) -> float:
    return 1.0 / (2.0 * math.pi * math.sqrt(l_c * c_c))
