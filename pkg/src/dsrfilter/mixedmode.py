"""Standard 4-port <-> mixed-mode S-parameter transforms.

Physical port order: 1 = line a left, 2 = line b left, 3 = line a right,
4 = line b right. Mixed-mode order is (d1, d2, c1, c2), so the mixed matrix
is ``[[Sdd, Sdc], [Scd, Scc]]`` in 2x2 blocks. Differential and common
references are implicitly 2*Z0 and Z0/2; the Sdd/Scc values are then the
half-circuit S-parameters against Z0, which is the ``z_ref`` the blocks carry.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, UsageError
from .netcore import SParams2

_R = 1 / np.sqrt(2)
M = _R * np.array([
    [1, -1, 0, 0],
    [0, 0, 1, -1],
    [1, 1, 0, 0],
    [0, 0, 1, 1],
], dtype=float)


@dataclass(frozen=True)
class SParams4:
    s: np.ndarray
    z_ref: float = 50.0

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex)
        if s.shape[-2:] != (4, 4):
            raise UsageError(f"expected trailing shape (4, 4), got {s.shape}")
        if not self.z_ref > 0:
            raise DomainError("reference impedance must be > 0")
        object.__setattr__(self, "s", s)


@dataclass(frozen=True)
class MixedModeS:
    m: np.ndarray
    z_ref: float = 50.0

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        if m.shape[-2:] != (4, 4):
            raise UsageError(f"expected trailing shape (4, 4), got {m.shape}")
        object.__setattr__(self, "m", m)

    @property
    def sdd(self) -> SParams2:
        return SParams2(self.m[..., :2, :2], self.z_ref)

    @property
    def scc(self) -> SParams2:
        return SParams2(self.m[..., 2:, 2:], self.z_ref)

    @property
    def sdc(self) -> np.ndarray:
        return self.m[..., :2, 2:]

    @property
    def scd(self) -> np.ndarray:
        return self.m[..., 2:, :2]

    def max_cross_mode(self) -> float:
        return float(max(np.max(np.abs(self.sdc), initial=0.0), np.max(np.abs(self.scd), initial=0.0)))


def std4_to_mixed(s4: SParams4) -> MixedModeS:
    return MixedModeS(M @ s4.s @ M.T, s4.z_ref)


def mixed_to_std4(mm: MixedModeS) -> SParams4:
    return SParams4(M.T @ mm.m @ M, mm.z_ref)


def from_half_circuits(dm: SParams2, cm: SParams2) -> MixedModeS:
    """Mixed-mode response of a symmetric pair from its DM and CM half circuits.

    Both half circuits must share one single-ended reference; cross-mode
    blocks are zero.
    """
    if dm.z_ref != cm.z_ref:
        raise UsageError(f"half-circuit references differ: {dm.z_ref} vs {cm.z_ref}")
    if dm.s.shape != cm.s.shape:
        raise UsageError("half-circuit sweeps have different shapes")
    m = np.zeros(dm.s.shape[:-2] + (4, 4), dtype=complex)
    m[..., :2, :2] = dm.s
    m[..., 2:, 2:] = cm.s
    return MixedModeS(m, dm.z_ref)


def permute_ports(s4: SParams4, port_map: Sequence[int]) -> SParams4:
    """Reorder file ports into the physical order.

    ``port_map[k]`` is the 1-based file port that plays physical port k+1.
    """
    pm = list(port_map)
    if sorted(pm) != [1, 2, 3, 4]:
        raise UsageError(f"port map must be a permutation of 1,2,3,4, got {pm}")
    idx = np.array(pm) - 1
    return SParams4(s4.s[..., idx[:, None], idx[None, :]], s4.z_ref)


def swap_lines(s4: SParams4) -> SParams4:
    """Relabel line a <-> line b."""
    return permute_ports(s4, (2, 1, 4, 3))
