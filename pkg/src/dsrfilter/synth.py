"""Element synthesis for the periodic DSR bandpass filter.

Flow: prototype g and FBW give the resonator bandwidth Delta, Delta gives
equidistant band edges, three reactance conditions on the shunt branch give
(C, L_C, C_C), and the gap capacitance and line inductance follow from the
matched, 90-degree cell condition at f0.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import DomainError

CONVENTIONS = ("plus_j", "minus_j")


def normalize_convention(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    key = {"plusj": "plus_j", "minusj": "minus_j", "+j": "plus_j", "-j": "minus_j"}.get(key, key)
    if key not in CONVENTIONS:
        raise DomainError(f"unknown reactance convention {name!r}")
    return key


@dataclass(frozen=True)
class FilterSpec:
    order_n: int = 3
    f0: float = 1.5e9
    fbw: float = 0.06
    z0: float = 50.0
    g_value: float = 1.521

    def __post_init__(self):
        if int(self.order_n) != self.order_n or self.order_n < 1:
            raise DomainError("filter order must be a positive integer")
        if not self.f0 > 0 or not self.z0 > 0 or not self.g_value > 0:
            raise DomainError("f0, z0 and g must be > 0")
        if not 0 < self.fbw < 1:
            raise DomainError(f"fractional bandwidth must lie in (0, 1), got {self.fbw}")


@dataclass(frozen=True)
class ShuntSolution:
    c_coup: float
    l_strip_half: float
    c_patch: float


@dataclass(frozen=True)
class Infeasible:
    """Non-physical shunt solution, kept for inspection instead of raised."""

    raw: dict
    offending: tuple
    sign_pattern: str

    def describe(self) -> str:
        vals = ", ".join(f"{k}={v:.6g}" for k, v in self.raw.items())
        return (f"no positive shunt branch: non-positive {', '.join(self.offending)} "
                f"(signs {self.sign_pattern}; raw solution {vals})")


@dataclass
class SynthReport:
    spec: FilterSpec
    convention: str
    delta: float
    f1: float
    f2: float
    shunt: ShuntSolution | Infeasible
    c_gap: float
    l_line: float
    residuals: dict = field(default_factory=dict)

    @property
    def omega1(self):
        return 2 * math.pi * self.f1

    @property
    def omega2(self):
        return 2 * math.pi * self.f2

    @property
    def feasible(self) -> bool:
        return isinstance(self.shunt, ShuntSolution)

    def to_dict(self) -> dict:
        out = {
            "spec": asdict(self.spec),
            "convention": self.convention,
            "delta": self.delta,
            "f1_hz": self.f1,
            "f2_hz": self.f2,
            "c_gap_f": self.c_gap,
            "l_line_h": self.l_line,
            "feasible": self.feasible,
            "residuals": dict(self.residuals),
        }
        if self.feasible:
            out["shunt"] = {
                "c_coup_f": self.shunt.c_coup,
                "l_strip_half_h": self.shunt.l_strip_half,
                "c_patch_f": self.shunt.c_patch,
            }
        else:
            out["shunt"] = None
            out["infeasible"] = {
                "raw": dict(self.shunt.raw),
                "offending": list(self.shunt.offending),
                "sign_pattern": self.shunt.sign_pattern,
                "message": self.shunt.describe(),
            }
        return out


def delta_from_fbw(fbw: float, g: float) -> float:
    """Resonator bandwidth from filter FBW: FBW = g * Delta / 2."""
    if not fbw > 0 or not g > 0:
        raise DomainError("fbw and g must be > 0")
    return 2.0 * fbw / g


def band_edges(f0: float, delta: float) -> tuple[float, float]:
    """Band edges arithmetically equidistant from f0."""
    if not f0 > 0:
        raise DomainError("f0 must be > 0")
    if not 0 <= delta < 2:
        raise DomainError("delta must lie in [0, 2)")
    return f0 * (1 - delta / 2), f0 * (1 + delta / 2)


def _shunt_z(c, l_c, c_c, w):
    # raw closed form, no sign checks: used for residuals of infeasible triples too
    return (1 - w * w * l_c * (c + c_c)) / (1j * c * w * (1 - w * w * l_c * c_c))


def shunt_residuals(c, l_c, c_c, f0, f1, f2, z0, convention="plus_j") -> dict:
    """Relative residuals of the three shunt-branch conditions."""
    sign = 1.0 if normalize_convention(convention) == "plus_j" else -1.0
    w0, w1, w2 = (2 * math.pi * f for f in (f0, f1, f2))
    target0 = sign * 1j * z0
    target1 = sign * 1j * z0 / 2
    return {
        "center": abs(_shunt_z(c, l_c, c_c, w0) - target0) / abs(target0),
        "lower_edge": abs(_shunt_z(c, l_c, c_c, w1) - target1) / abs(target1),
        "upper_pole": abs(1 - w2 * w2 * l_c * c_c),
    }


def solve_shunt_branch(f0, f1, f2, z0, convention="plus_j") -> ShuntSolution | Infeasible:
    """Solve for (C, L_C, C_C) so the branch reactance is +-Z0 at f0,
    +-Z0/2 at f1 and has its pole at f2.

    With p = L_C*C_C fixed by the pole and x = L_C*(C + C_C), the two
    reactance conditions are linear in (x, C).
    """
    if not 0 < f1 < f0 < f2:
        raise DomainError(f"need 0 < f1 < f0 < f2, got f1={f1}, f0={f0}, f2={f2}")
    if not z0 > 0:
        raise DomainError("z0 must be > 0")
    sign = 1.0 if normalize_convention(convention) == "plus_j" else -1.0
    w0, w1, w2 = (2 * math.pi * f for f in (f0, f1, f2))
    p = 1.0 / (w2 * w2)
    # rows: w^2 * x - sign * Zt * w * (1 - w^2 p) * C = 1
    a11, a12 = w0 * w0, -sign * z0 * w0 * (1 - w0 * w0 * p)
    a21, a22 = w1 * w1, -sign * (z0 / 2) * w1 * (1 - w1 * w1 * p)
    det = a11 * a22 - a12 * a21
    if det == 0:
        return Infeasible({"x": math.nan, "C": math.nan}, ("C", "L_C", "C_C"), "singular")
    x = (a22 - a12) / det
    c = (a11 - a21) / det
    l_c = (x - p) / c if c != 0 else math.nan
    c_c = p / l_c if math.isfinite(l_c) and l_c != 0 else math.nan
    raw = {"C": c, "L_C": l_c, "C_C": c_c}
    bad = tuple(k for k, v in raw.items() if not (math.isfinite(v) and v > 0))
    if bad:
        pattern = ", ".join(f"{k}{'>0' if v > 0 else '<=0'}" for k, v in raw.items())
        return Infeasible(raw, bad, pattern)
    return ShuntSolution(c_coup=c, l_strip_half=l_c, c_patch=c_c)


def gap_capacitance(f0: float, z0: float) -> float:
    if not f0 > 0 or not z0 > 0:
        raise DomainError("f0 and z0 must be > 0")
    return 1.0 / (2.0 * z0 * 2 * math.pi * f0)


def line_inductance(f0: float, c_gap: float, z0: float) -> float:
    """Total cell line inductance giving |S21| = 1 and 90 degrees at f0."""
    if not f0 > 0 or not c_gap > 0 or not z0 > 0:
        raise DomainError("f0, c_gap and z0 must be > 0")
    w0 = 2 * math.pi * f0
    return 2.0 * (1.0 + w0 * c_gap * z0) / (w0 * w0 * c_gap)


def synthesize(spec: FilterSpec, convention: str = "plus_j") -> SynthReport:
    convention = normalize_convention(convention)
    delta = delta_from_fbw(spec.fbw, spec.g_value)
    f1, f2 = band_edges(spec.f0, delta)
    shunt = solve_shunt_branch(spec.f0, f1, f2, spec.z0, convention)
    c_gap = gap_capacitance(spec.f0, spec.z0)
    l_line = line_inductance(spec.f0, c_gap, spec.z0)
    if isinstance(shunt, ShuntSolution):
        vals = (shunt.c_coup, shunt.l_strip_half, shunt.c_patch)
    else:
        vals = (shunt.raw["C"], shunt.raw["L_C"], shunt.raw["C_C"])
    residuals = {}
    if all(math.isfinite(v) and v != 0 for v in vals):
        residuals = shunt_residuals(*vals, spec.f0, f1, f2, spec.z0, convention)
    return SynthReport(spec, convention, delta, f1, f2, shunt, c_gap, l_line, residuals)
