"""Touchstone v1.1 (.s2p/.s4p) and CSV sweep files."""
from __future__ import annotations

import csv
import io as _stdio
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, UsageError
from .netcore import SParams2, db, phase_deg

UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
FORMATS = ("RI", "MA", "DB")
_UNIT_NAMES = {"HZ": "Hz", "KHZ": "kHz", "MHZ": "MHz", "GHZ": "GHz"}


@dataclass
class TouchstoneDocument:
    freq_hz: np.ndarray
    s: np.ndarray            # (n_freq, nports, nports), physical matrix order
    z_ref: float = 50.0
    unit: str = "GHz"
    fmt: str = "MA"
    comments: list = field(default_factory=list)

    @property
    def nports(self) -> int:
        return self.s.shape[-1]

    def sparams2(self) -> SParams2:
        if self.nports != 2:
            raise UsageError(f"document has {self.nports} ports, not 2")
        return SParams2(self.s, self.z_ref)


def _parse_options(tokens, lineno):
    unit, param, fmt, z_ref = "GHZ", "S", "MA", 50.0
    i = 0
    while i < len(tokens):
        tok = tokens[i].upper()
        if tok in UNITS:
            unit = tok
        elif tok in FORMATS:
            fmt = tok
        elif tok in ("S", "Y", "Z", "H", "G"):
            param = tok
        elif tok == "R":
            if i + 1 >= len(tokens):
                raise ParseError("option line: R without a value", lineno)
            try:
                z_ref = float(tokens[i + 1])
            except ValueError:
                raise ParseError(f"option line: bad reference impedance {tokens[i + 1]!r}", lineno)
            if not z_ref > 0:
                raise ParseError("option line: reference impedance must be > 0", lineno)
            i += 1
        else:
            raise ParseError(f"option line: unknown token {tokens[i]!r}", lineno)
        i += 1
    if param != "S":
        raise ParseError(f"only S-parameters are supported, got {param}", lineno)
    return unit, fmt, z_ref


def _to_complex(a, b, fmt):
    if fmt == "RI":
        return a + 1j * b
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    return mag * np.exp(1j * np.radians(b))


def _from_complex(z, fmt):
    if fmt == "RI":
        return z.real, z.imag
    if fmt == "MA":
        return np.abs(z), phase_deg(z)
    return db(z), phase_deg(z)


def parse_touchstone(text: str, ports: int = 2) -> TouchstoneDocument:
    """Parse Touchstone v1.1 text for a 2- or 4-port network.

    Four-port records may wrap over several physical lines but each record
    starts on a new line.
    """
    if ports not in (2, 4):
        raise UsageError("only 2- and 4-port files are supported")
    if not text or not text.strip():
        raise ParseError("empty input")
    arity = 1 + 2 * ports * ports
    options = None
    comments = []
    records = []          # (start line, values)
    current, start = [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line, _, comment = raw.partition("!")
        line = line.strip()
        if not line:
            if raw.lstrip().startswith("!"):
                comments.append(comment.strip())
            continue
        if line.startswith("#"):
            if options is not None:
                continue  # v1.1: only the first option line counts
            if records or current:
                raise ParseError("option line after data", lineno)
            options = _parse_options(line[1:].split(), lineno)
            continue
        if line.startswith("["):
            raise ParseError(f"Touchstone 2.0 keyword {line.split()[0]} not supported", lineno)
        try:
            vals = [float(t) for t in line.split()]
        except ValueError:
            raise ParseError(f"non-numeric data: {line!r}", lineno)
        if not current:
            start = lineno
        current.extend(vals)
        if len(current) == arity:
            records.append((start, current))
            current = []
        elif len(current) > arity:
            raise ParseError(f"expected {arity} values per {ports}-port record, got {len(current)}", start)
        elif ports == 2:
            raise ParseError(f"expected {arity} values per 2-port record, got {len(current)}", start)
    if current:
        raise ParseError(f"incomplete record: {len(current)} of {arity} values", start)
    if not records:
        raise ParseError("no data rows")
    unit, fmt, z_ref = options or ("GHZ", "MA", 50.0)
    data = np.array([r for _, r in records])
    freq = data[:, 0] * UNITS[unit]
    for k in range(1, len(records)):
        if not freq[k] > freq[k - 1]:
            raise ParseError("frequencies must be strictly increasing", records[k][0])
    pairs = _to_complex(data[:, 1::2], data[:, 2::2], fmt)
    s = pairs.reshape(-1, ports, ports)
    if ports == 2:
        # v1.1 two-port order is S11 S21 S12 S22
        s = s.transpose(0, 2, 1)
    return TouchstoneDocument(freq, s, z_ref, _UNIT_NAMES[unit], fmt, comments)


def _num(x) -> str:
    return f"{x:.12g}"


def write_touchstone(doc: TouchstoneDocument, fmt: str | None = None, unit: str | None = None) -> str:
    fmt = (fmt or doc.fmt).upper()
    unit_key = (unit or doc.unit).upper()
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}")
    if unit_key not in UNITS:
        raise UsageError(f"unknown frequency unit {unit!r}")
    n = doc.nports
    if n not in (2, 4):
        raise UsageError("only 2- and 4-port documents can be written")
    out = [f"! {c}" if c else "!" for c in doc.comments]
    out.append(f"# {_UNIT_NAMES[unit_key]} S {fmt} R {_num(doc.z_ref)}")
    scale = UNITS[unit_key]
    for f, mat in zip(doc.freq_hz, doc.s):
        if n == 2:
            mat = mat.T
        a, b = _from_complex(np.asarray(mat).reshape(-1), fmt)
        pairs = [f"{_num(x)} {_num(y)}" for x, y in zip(a, b)]
        if n == 2:
            out.append(" ".join([_num(f / scale)] + pairs))
        else:
            for row in range(4):
                chunk = " ".join(pairs[4 * row:4 * row + 4])
                out.append((_num(f / scale) + " " if row == 0 else "    ") + chunk)
    return "\n".join(out) + "\n"


def touchstone_from_sweep(freq_hz, s, z_ref=50.0, fmt="MA", unit="GHz", comments=()) -> TouchstoneDocument:
    return TouchstoneDocument(np.asarray(freq_hz, float), np.asarray(s, complex), z_ref, unit, fmt,
                              list(comments))


_COLUMN = re.compile(r"^(s|sdd|scc)([1-4])([1-4])_(db|deg|re|im)$")


def _column_values(token, traces):
    m = _COLUMN.match(token)
    if not m:
        raise UsageError(f"bad column {token!r}; expected e.g. sdd21_db, s11_re")
    prefix, i, j, kind = m.group(1), int(m.group(2)) - 1, int(m.group(3)) - 1, m.group(4)
    if prefix not in traces:
        raise UsageError(f"no {prefix} trace available for column {token!r}")
    s = np.asarray(traces[prefix].s)
    if i >= s.shape[-1] or j >= s.shape[-1]:
        raise UsageError(f"column {token!r} exceeds port count")
    z = s[..., i, j]
    return {"db": db, "deg": phase_deg, "re": np.real, "im": np.imag}[kind](z)


def write_csv(freq_hz, traces: dict, columns) -> str:
    """CSV with ``freq_hz`` plus the requested columns.

    ``traces`` maps a prefix (``s``, ``sdd``, ``scc``) to an SParams2-like
    object; a column token is ``<prefix><i><j>_<db|deg|re|im>``.
    """
    columns = list(columns)
    if not columns:
        raise UsageError("no CSV columns requested")
    cols = [_column_values(c, traces) for c in columns]
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["freq_hz"] + columns)
    for k, f in enumerate(np.asarray(freq_hz, float)):
        w.writerow([_num(f)] + [_num(c[k]) for c in cols])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list, np.ndarray]:
    rows = list(csv.reader(_stdio.StringIO(text)))
    if not rows:
        raise ParseError("empty CSV")
    header = [h.strip() for h in rows[0]]
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            data.append([float(x) for x in row])
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", lineno)
    if not data:
        raise ParseError("no data rows")
    return header, np.array(data)


def sparams_from_csv(text: str, prefix: str = "s", z_ref: float = 50.0) -> tuple[np.ndarray, SParams2]:
    """Frequencies and a two-port from re/im CSV columns.

    S11 and S21 are required; missing S12/S22 are filled assuming a
    reciprocal, symmetric two-port.
    """
    header, data = read_csv(text)
    if "freq_hz" not in header:
        raise ParseError("CSV lacks a freq_hz column", 1)
    col = {h: data[:, k] for k, h in enumerate(header)}

    def entry(ij):
        re_, im_ = f"{prefix}{ij}_re", f"{prefix}{ij}_im"
        if re_ in col and im_ in col:
            return col[re_] + 1j * col[im_]
        return None

    s11, s21, s12, s22 = entry("11"), entry("21"), entry("12"), entry("22")
    if s11 is None or s21 is None:
        raise ParseError(f"CSV needs {prefix}11_re/_im and {prefix}21_re/_im columns", 1)
    s12 = s21 if s12 is None else s12
    s22 = s11 if s22 is None else s22
    freq = col["freq_hz"]
    bad = np.nonzero(np.diff(freq) <= 0)[0]
    if bad.size:
        raise ParseError("frequencies must be strictly increasing", int(bad[0]) + 3)
    s = np.stack([np.stack([s11, s12], -1), np.stack([s21, s22], -1)], -2)
    return freq, SParams2(s, z_ref)
