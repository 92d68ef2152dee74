"""Unit tests for the dyadic-cover content optimizer."""

import math

import numpy as np
import pytest

from swisscheese import (
    AdmissibleFunction,
    DiskUnion,
    MeasureFunction,
    build_counterexample,
    check_measure_function,
    content_disk_exact,
    content_hole,
    content_upper,
    sample_in_target,
    verify_cover,
)


def test_content_disk_exact():
    assert content_disk_exact(0.25, 0.5) == pytest.approx(0.25 ** 1.5,
                                                          rel=1e-15)
    assert content_disk_exact(0.0, 0.5) == 0.0
    with pytest.raises(ValueError):
        content_disk_exact(-0.1, 0.5)


def test_measure_function_cap():
    h = MeasureFunction.power_cap(0.5)
    assert h.label == "t^1.5"
    assert float(h(0.25)) == pytest.approx(0.125, rel=1e-15)
    rep = check_measure_function(h, 0.5)
    # the cap itself is monotone and capped but its ratio never vanishes
    assert rep.nondecreasing and rep.capped
    assert not rep.ratio_vanishes
    assert not rep.admissible
    # a strictly smaller power does vanish against the cap
    h2 = MeasureFunction(evaluator=lambda t: np.asarray(t) ** 2.0,
                         label="t^2")
    rep2 = check_measure_function(h2, 0.5)
    assert rep2.admissible


def test_disk_union_validation():
    with pytest.raises(ValueError):
        DiskUnion(disks=((0.0 + 0.0j, -0.1),))
    with pytest.raises(ValueError):
        DiskUnion(disks=((0.9 + 0.0j, 0.2),))  # leaves the root square
    with pytest.raises(ValueError):
        DiskUnion(disks=((0.0j, 0.1),), band=(0.0j, 0.5, 0.25))
    u = DiskUnion.single(0.375, 0.1)
    assert u.disks == ((0.375 + 0.0j, 0.1),)
    assert "disk" in u.label


def test_cover_single_disk_value():
    est = content_upper(DiskUnion.single(0.375 + 0.0j, 0.25), 0.5,
                        max_level=12)
    assert est.optimal
    assert est.value == pytest.approx(0.5393866333758164, rel=1e-12)
    assert est.squares
    assert est.nodes > 0


def test_cover_deepening_never_hurts():
    target = DiskUnion.single(0.375 + 0.0j, 0.2)
    vals = [content_upper(target, 0.5, max_level=lv).value
            for lv in (4, 6, 8, 10)]
    assert all(a >= b * (1.0 - 1e-12) for a, b in zip(vals, vals[1:]))
    # and every level stays above the ideal disk value
    assert vals[-1] >= content_disk_exact(0.2, 0.5)


def test_cover_empty_target():
    est = content_upper(DiskUnion(disks=()), 0.5, max_level=8)
    assert est.value == 0.0
    assert est.optimal
    assert est.squares == ()


def test_cover_budget_exhaustion_keeps_upper_bound():
    target = DiskUnion.single(0.375 + 0.0j, 0.25)
    full = content_upper(target, 0.5, max_level=12)
    starved = content_upper(target, 0.5, max_level=12, budget=500)
    assert not starved.optimal
    assert starved.value >= full.value * (1.0 - 1e-12)
    chk = verify_cover(starved, target, count=2000, seed=1)
    assert chk.covered


def test_cover_actually_covers():
    target = DiskUnion(disks=((0.3 + 0.2j, 0.15), (-0.25 - 0.1j, 0.2)))
    est = content_upper(target, 0.5, max_level=9)
    chk = verify_cover(est, target, count=4000, seed=2)
    assert chk.points == 4000
    assert chk.misses == 0
    # a cover built for a smaller disk misses points of a bigger one
    small = content_upper(DiskUnion.single(0.3 + 0.2j, 0.05), 0.5,
                          max_level=9)
    bad = verify_cover(small, DiskUnion.single(0.3 + 0.2j, 0.3), count=4000,
                       seed=3)
    assert bad.misses > 0


def test_cover_determinism():
    target = DiskUnion(disks=((0.1 + 0.4j, 0.12), (-0.3 + 0.3j, 0.18)))
    a = content_upper(target, 0.75, max_level=10)
    b = content_upper(target, 0.75, max_level=10)
    assert a.value == b.value
    assert a.squares == b.squares


def test_cover_band_clipping_reduces_value():
    # clipping a straddling disk to an annulus band can only shrink the cover
    c, r = 0.375, 0.22
    whole = content_upper(DiskUnion.single(c, r), 0.5, max_level=10)
    clipped = content_upper(
        DiskUnion(disks=((c + 0.0j, r),), band=(0.0j, 0.25, 0.5)), 0.5,
        max_level=10)
    assert clipped.value <= whole.value * (1.0 + 1e-12)
    assert clipped.value > 0.0


def test_content_hole_brackets():
    dom = build_counterexample(0.5, AdmissibleFunction.power(0.5), 30)
    good = content_hole(dom, 10)
    assert good.method == "exact-disk"
    assert good.upper == good.lower
    k = dom.position(10)
    assert good.upper == pytest.approx(float(dom.r[k]) ** 1.5, rel=1e-12)
    # hole 1 pokes out of its annulus: bracketed by inscribed disk and cover
    rough = content_hole(dom, 1, max_level=9)
    assert rough.method == "clipped-cover"
    assert rough.lower <= rough.upper
    assert rough.warning
    with pytest.raises(KeyError):
        content_hole(dom, 31)


def test_sample_in_target_stays_inside():
    target = DiskUnion(disks=((0.3 + 0.2j, 0.15), (-0.25 - 0.1j, 0.2)))
    z = sample_in_target(target, 3000, np.random.default_rng(5))
    d1 = np.abs(z - (0.3 + 0.2j))
    d2 = np.abs(z - (-0.25 - 0.1j))
    assert np.all((d1 <= 0.15 + 1e-12) | (d2 <= 0.2 + 1e-12))
    banded = DiskUnion(disks=((0.375 + 0.0j, 0.22),), band=(0.0j, 0.25, 0.5))
    zb = sample_in_target(banded, 2000, np.random.default_rng(6))
    assert np.all(np.abs(zb) >= 0.25 - 1e-12)
    assert np.all(np.abs(zb) <= 0.5 + 1e-12)


def test_cover_scales_with_gauge():
    # doubling the gauge doubles the optimal value: the optimizer is exact
    # for any monotone h, not only the power cap
    target = DiskUnion.single(0.375 + 0.0j, 0.2)
    base = content_upper(target, 0.5, max_level=8)
    doubled = content_upper(
        target, 0.5, max_level=8,
        h=MeasureFunction(evaluator=lambda t: 2.0 * np.asarray(t) ** 1.5,
                          label="2 t^1.5"))
    assert doubled.value == pytest.approx(2.0 * base.value, rel=1e-12)
