"""Two-port network algebra on ABCD (chain) matrices.

ABCD matrices are plain complex numpy arrays of shape ``(..., 2, 2)``; the
leading axes are usually frequency. Every function broadcasts over them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DomainError, NonInvertibleError, SingularConversionError, UsageError

# Admittance used for a shunt branch whose impedance is exactly zero. Any
# admittance obtained from a rounded near-zero impedance stays well below it.
LARGE_ADMITTANCE = 1e20


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing, positive frequencies in Hz."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=float))
        if pts.ndim != 1 or pts.size == 0:
            raise UsageError("frequency grid must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(pts)) or np.any(pts <= 0):
            raise DomainError("frequencies must be finite and > 0")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("frequencies must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def linear(cls, start: float, stop: float, n: int) -> "FrequencyGrid":
        if n < 1:
            raise UsageError("grid needs at least one point")
        return cls(np.linspace(start, stop, n))

    def __len__(self):
        return self.points.size

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class SParams2:
    """Two-port S-parameters, array of shape ``(..., 2, 2)``, real reference."""

    s: np.ndarray
    z_ref: float = 50.0

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex)
        if s.shape[-2:] != (2, 2):
            raise UsageError(f"expected trailing shape (2, 2), got {s.shape}")
        if not self.z_ref > 0:
            raise DomainError("reference impedance must be > 0")
        object.__setattr__(self, "s", s)

    @property
    def s11(self):
        return self.s[..., 0, 0]

    @property
    def s12(self):
        return self.s[..., 0, 1]

    @property
    def s21(self):
        return self.s[..., 1, 0]

    @property
    def s22(self):
        return self.s[..., 1, 1]

    def __len__(self):
        return 1 if self.s.ndim == 2 else self.s.shape[0]


def db(x) -> np.ndarray:
    """Magnitude in dB, 20*log10|x|. Zero maps to -inf."""
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(np.abs(x))


def phase_deg(x) -> np.ndarray:
    """Phase in degrees on (-180, 180]."""
    deg = np.degrees(np.angle(x))
    return np.where(deg <= -180.0, deg + 360.0, deg)


def _finite(x, what):
    x = np.asarray(x, dtype=complex)
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{what} must be finite")
    return x


def _matrix(a, b, c, d):
    a, b, c, d = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, d)))
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = b
    out[..., 1, 0] = c
    out[..., 1, 1] = d
    return out


def identity(shape=()) -> np.ndarray:
    return _matrix(np.ones(shape), 0, 0, 1)


def abcd_series(z) -> np.ndarray:
    """Series impedance ``z`` (ohms): [[1, z], [0, 1]]."""
    z = _finite(z, "series impedance")
    return _matrix(1, z, 0, 1)


def abcd_shunt(y) -> np.ndarray:
    """Shunt admittance ``y`` (siemens): [[1, 0], [y, 1]]."""
    y = _finite(y, "shunt admittance")
    return _matrix(1, 0, y, 1)


def abcd_shunt_z(z) -> np.ndarray:
    """Shunt branch given by its impedance.

    An infinite impedance (open branch, e.g. at a pole) becomes zero
    admittance; an exactly zero impedance becomes ``LARGE_ADMITTANCE``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.isnan(z)):
        raise DomainError("shunt impedance is NaN")
    is_open = np.isinf(z)
    is_short = z == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.where(is_open | is_short, 0, 1.0 / np.where(is_short | is_open, 1.0, z))
    y = np.where(is_short, LARGE_ADMITTANCE, y)
    return abcd_shunt(y)


def cascade(nets: Sequence[np.ndarray]) -> np.ndarray:
    """Ordered chain product; the first network sits at the input port."""
    nets = list(nets)
    if not nets:
        raise UsageError("cascade needs at least one network")
    return reduce(np.matmul, nets)


def abcd_to_s(net, z_ref: float = 50.0) -> SParams2:
    net = np.asarray(net, dtype=complex)
    if not z_ref > 0:
        raise DomainError("reference impedance must be > 0")
    a, b, c, d = net[..., 0, 0], net[..., 0, 1], net[..., 1, 0], net[..., 1, 1]
    den = a + b / z_ref + c * z_ref + d
    if np.any(den == 0):
        raise SingularConversionError("A + B/Z0 + C*Z0 + D vanishes")
    s = np.empty(net.shape, dtype=complex)
    s[..., 0, 0] = (a + b / z_ref - c * z_ref - d) / den
    s[..., 0, 1] = 2.0 * (a * d - b * c) / den
    s[..., 1, 0] = 2.0 / den
    s[..., 1, 1] = (-a + b / z_ref - c * z_ref + d) / den
    return SParams2(s, z_ref)


def s_to_abcd(sp: SParams2) -> np.ndarray:
    s11, s12, s21, s22 = sp.s11, sp.s12, sp.s21, sp.s22
    if np.any(s21 == 0):
        raise NonInvertibleError("S21 = 0 has no ABCD representation")
    z0 = sp.z_ref
    two_s21 = 2.0 * s21
    a = ((1 + s11) * (1 - s22) + s12 * s21) / two_s21
    b = z0 * ((1 + s11) * (1 + s22) - s12 * s21) / two_s21
    c = ((1 - s11) * (1 - s22) - s12 * s21) / (z0 * two_s21)
    d = ((1 - s11) * (1 + s22) + s12 * s21) / two_s21
    return _matrix(a, b, c, d)


def determinant(net) -> np.ndarray:
    net = np.asarray(net)
    return net[..., 0, 0] * net[..., 1, 1] - net[..., 0, 1] * net[..., 1, 0]


def flip(net) -> np.ndarray:
    """The same two-port seen from the other side (ports swapped)."""
    net = np.asarray(net, dtype=complex)
    det = determinant(net)
    return _matrix(net[..., 1, 1] / det, net[..., 0, 1] / det,
                   net[..., 1, 0] / det, net[..., 0, 0] / det)
