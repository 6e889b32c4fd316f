import functools

import numpy as np
import pytest

from dsrfilter.dsrcell import cm_bandpass_cell, dm_bandpass_cell
from dsrfilter.errors import DomainError, MetricsError, UsageError
from dsrfilter.filterlab import (SweepResult, build_filter, cm_rejection_scaling, default_grid,
                                 format_metrics, metrics, metrics_csv, sweep)
from dsrfilter.netcore import FrequencyGrid, SParams2, abcd_to_s, cascade, db, determinant


@pytest.fixture(scope="module")
def cells():
    from conftest import DM_REF, CM_REF
    from dsrfilter.dsrcell import CmCellParams, DsrCellParams
    dm = functools.partial(dm_bandpass_cell, DsrCellParams(**DM_REF))
    cm = functools.partial(cm_bandpass_cell, CmCellParams(**CM_REF))
    return dm, cm


@pytest.fixture(scope="module")
def third_order(cells):
    return build_filter(*cells, 3)


def lorentz_sweep(f, fc, half_width, cm_db=-60.0):
    """Lossless synthetic two-ports: DM with |s21|^2 = 1 / (1 + x^2), CM flat."""
    x = (f - fc) / half_width
    s21 = 1 / np.sqrt(1 + x ** 2)
    s11 = np.sqrt(1 - s21 ** 2)
    dm = np.stack([np.stack([s11, s21], -1), np.stack([s21, s11], -1)], -2).astype(complex)
    c21 = np.full(f.shape, 10 ** (cm_db / 20))
    c11 = np.sqrt(1 - c21 ** 2)
    cm = np.stack([np.stack([c11, c21], -1), np.stack([c21, c11], -1)], -2).astype(complex)
    return SweepResult(FrequencyGrid(f), SParams2(dm), SParams2(cm))


def test_n_validation(cells):
    for bad in (0, -1, 1.5):
        with pytest.raises(UsageError):
            build_filter(*cells, bad)


def test_single_cell_is_cell(cells):
    f = np.linspace(0.5e9, 2.5e9, 51)
    flt = build_filter(*cells, 1)
    assert np.array_equal(flt.dm_abcd(f), cells[0](f))
    assert np.array_equal(flt.cm_abcd(f), cells[1](f))


def test_cascade_associativity(cells):
    f = np.linspace(0.5e9, 2.5e9, 51)
    for n in (2, 3, 4):
        a = build_filter(*cells, n).dm_abcd(f)
        b = cascade([build_filter(*cells, n - 1).dm_abcd(f), cells[0](f)])
        assert np.max(np.abs(a - b)) <= 1e-9 * np.max(np.abs(a))


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_cascade_lossless_reciprocal(cells, n):
    f = np.linspace(0.3e9, 3e9, 301)
    flt = build_filter(*cells, n)
    for net in (flt.dm_abcd(f), flt.cm_abcd(f)):
        assert np.all(np.abs(determinant(net) - 1) <= 1e-9 * np.maximum(1, np.abs(net).max((-2, -1)) ** 2))
    sr = sweep(flt, f)
    for s in (sr.dm, sr.cm):
        assert np.max(np.abs(np.abs(s.s11) ** 2 + np.abs(s.s21) ** 2 - 1)) < 1e-8


def test_single_cell_sweep_examples(cells):
    sr = sweep(build_filter(*cells, 1), FrequencyGrid.linear(0.5e9, 2.5e9, 1001))
    assert abs(sr.freq[np.argmax(np.abs(sr.dm.s21))] - 1.5e9) <= 0.1e9
    k = int(np.argmin(np.abs(sr.freq - 1.5e9)))
    assert sr.freq[k] == 1.5e9
    assert db(sr.cm.s21[k]) <= -20


def test_sweep_deterministic_and_grid_checks(third_order):
    g = default_grid(1.5e9)
    assert len(g) == 1001 and g.points[0] == 0.375e9 and g.points[-1] == 3.75e9
    a, b = sweep(third_order, g), sweep(third_order, g)
    assert np.array_equal(a.dm.s, b.dm.s) and np.array_equal(a.cm.s, b.cm.s)
    with pytest.raises((DomainError, UsageError)):
        sweep(third_order, [])


def test_metrics_synthetic_passband():
    f = np.linspace(1.0e9, 2.0e9, 2001)
    m = metrics(lorentz_sweep(f, 1.5e9, 0.05e9))
    assert m.f0d == pytest.approx(1.5e9, abs=f[1] - f[0])
    # 3 dB is 10*log10(2) = 3.0103 dB, so the interpolated edges sit just inside fc +/- b
    assert m.band3db[0] == pytest.approx(1.45e9, abs=2 * (f[1] - f[0]))
    assert m.band3db[1] == pytest.approx(1.55e9, abs=2 * (f[1] - f[0]))
    assert m.fbw == pytest.approx(0.1 / 1.5, rel=0.02)
    assert m.il_db == pytest.approx(0.0, abs=1e-12)
    assert m.cmrr_f0_db == pytest.approx(60.0, abs=1e-9)
    assert m.cm_rejection_db == pytest.approx(60.0, abs=1e-9)
    assert m.cmrr_db == pytest.approx(57.0, abs=1e-6)
    assert m.cm_supp_band == (f[0], f[-1])


def test_metrics_thru_not_bracketed():
    f = np.linspace(1e9, 2e9, 11)
    thru = np.tile(np.array([[0, 1], [1, 0]], dtype=complex), (11, 1, 1))
    sr = SweepResult(FrequencyGrid(f), SParams2(thru), SParams2(thru))
    with pytest.raises(MetricsError, match="passband not bracketed"):
        metrics(sr)


def test_metrics_grid_refinement(third_order):
    coarse = default_grid(1.5e9, 1001)
    fine = default_grid(1.5e9, 2001)
    step = coarse.points[1] - coarse.points[0]
    a = metrics(sweep(third_order, coarse))
    b = metrics(sweep(third_order, fine))
    assert abs(a.f0d - b.f0d) < step
    assert abs(a.band3db[0] - b.band3db[0]) < step
    assert abs(a.band3db[1] - b.band3db[1]) < step


def test_third_order_fixture_metrics(third_order):
    m = metrics(sweep(third_order, default_grid(1.5e9)))
    assert m.band3db[0] < m.f0d < m.band3db[1]
    assert abs(m.f0d - 1.5e9) <= 0.1e9
    assert m.il_db == pytest.approx(0.0, abs=0.05)
    assert m.cm_rejection_db >= 50
    assert m.cmrr_db >= 50
    lo, hi = m.supp_band_multiples()
    assert lo < 1 < hi
    text = format_metrics(m, 0.06)
    assert "target 6.000 %" in text and "f0d" in text
    head, row = metrics_csv(m).splitlines()
    assert len(head.split(",")) == len(row.split(",")) == 11


def test_metrics_supp_band_absent():
    f = np.linspace(1.0e9, 2.0e9, 501)
    m = metrics(lorentz_sweep(f, 1.5e9, 0.05e9, cm_db=-10.0), cm_threshold_db=30)
    assert m.cm_supp_band is None and m.supp_band_multiples() is None
    assert "not met" in format_metrics(m)


def test_cm_rejection_scaling(cells):
    table = cm_rejection_scaling(cells[1], [1, 2, 3, 4], 1.5e9)
    rej = [r for _, r in table]
    assert [n for n, _ in table] == [1, 2, 3, 4]
    assert rej[0] >= 20 and rej[2] >= 50
    assert np.all(np.diff(rej) > 0)
    with pytest.raises(UsageError):
        cm_rejection_scaling(cells[1], [0], 1.5e9)


def test_cm_rejection_matches_direct_sweep(cells, third_order):
    (_, r3), = cm_rejection_scaling(cells[1], [3], 1.5e9)
    direct = -db(abcd_to_s(third_order.cm_abcd(np.array([1.5e9]))).s21[0])
    assert r3 == pytest.approx(direct, abs=1e-9)
