"""Unit tests for the domain construction and exceptional-set geometry."""

import math

import numpy as np
import pytest

from swisscheese import (
    AdmissibleFunction,
    ConstructionError,
    ExceptionalSet,
    SwissCheeseDomain,
    annulus_index,
    annulus_of,
    build_counterexample,
    hole_distance,
    in_exceptional,
    sample_exceptional,
    sample_in_annulus,
    validate_geometry,
)

SQRT = AdmissibleFunction.power(0.5)


@pytest.fixture(scope="module")
def dom():
    return build_counterexample(0.5, SQRT, 60)


def test_build_basic_layout(dom):
    assert isinstance(dom, SwissCheeseDomain)
    assert len(dom) == 60
    assert dom.mode == "dense"
    assert list(dom.indices[:4]) == [1, 2, 3, 4]
    # centers at 3/4 of each dyadic scale
    k = dom.position(1)
    assert dom.a[k] == 0.375
    assert dom.a[dom.position(5)] == pytest.approx(0.75 * 2.0 ** -5, rel=1e-15)


def test_radius_and_margin_formulas(dom):
    # r solves r^(1+alpha) = a^2 phi(a)/n and s = a / (7 n^(1/3))
    for n in (1, 4, 11, 30):
        k = dom.position(n)
        a = 0.75 * 2.0 ** -n
        want_r = (a * a * math.sqrt(a) / n) ** (1.0 / 1.5)
        want_s = a / (7.0 * n ** (1.0 / 3.0))
        assert dom.r[k] == pytest.approx(want_r, rel=1e-12)
        assert dom.s[k] == pytest.approx(want_s, rel=1e-12)
    assert dom.r[dom.position(1)] == pytest.approx(0.19500785841111604,
                                                   rel=1e-13)
    assert dom.r[dom.position(4)] == pytest.approx(0.0024184037467489946,
                                                   rel=1e-13)


def test_deep_radii_survive_in_log_space():
    deep = build_counterexample(0.5, SQRT, 10060, mode="subsequenced")
    k = deep.position(deep.indices[-1])
    # float64 has long since underflowed; the log fields must still be finite
    assert deep.r[k] == 0.0
    assert np.isfinite(float(deep.log_r[k]))
    assert float(deep.log_r[k]) < -10000.0 * math.log(2.0) * 0.9


def test_build_validation():
    with pytest.raises(ConstructionError):
        build_counterexample(0.0, SQRT, 10)
    with pytest.raises(ConstructionError):
        build_counterexample(1.0, SQRT, 10)
    with pytest.raises(ConstructionError):
        build_counterexample(0.5, SQRT, 0)
    with pytest.raises(ConstructionError):
        build_counterexample(0.5, SQRT, 10, mode="thinned")
    # bounded weights cannot be subsequenced at all
    with pytest.raises(ConstructionError):
        build_counterexample(0.5, AdmissibleFunction.constant_one(), 10,
                             mode="subsequenced")


def test_geometry_threshold(dom):
    geo = validate_geometry(dom)
    assert geo.n0 == 4
    assert tuple(geo.failing) == (1, 2, 3)
    assert not geo.all_valid
    assert not dom.hole(1).valid
    assert dom.hole(4).valid


def test_hole_accessors(dom):
    h = dom.hole(7)
    assert h.n == 7
    assert h.a == pytest.approx(0.75 * 2.0 ** -7, rel=1e-15)
    with pytest.raises(KeyError):
        dom.hole(61)
    assert dom.has_hole(60)
    assert not dom.has_hole(0)
    assert len(list(dom.holes())) == 60


def test_annulus_index_rules():
    d = np.array([1.0, 0.6, 0.5, 0.25, 0.26, 2.0, 0.0, -1.0])
    got = annulus_index(d)
    # 1.0 and 0.6 land in A_0; the shared boundary 0.5 goes to the smaller
    # index; anything outside (0, 1] is flagged -1
    assert got.tolist() == [0, 0, 0, 1, 1, -1, -1, -1]


def test_annulus_of_scalar(dom):
    assert annulus_of(0.75 * 2.0 ** -5) == 5
    assert annulus_of(complex(0, 2.0 ** -9)) == 8
    assert annulus_of(0.0) is None
    assert annulus_of(1.5) is None


def test_hole_distance(dom):
    k = dom.position(5)
    a, r = dom.a[k], dom.r[k]
    assert hole_distance(dom, 5, a + r + 0.01) == pytest.approx(0.01, abs=1e-15)
    # points inside the closed hole clamp to zero
    assert hole_distance(dom, 5, complex(a)) == 0.0
    z = np.array([a + r + 0.25, a], dtype=complex)
    out = hole_distance(dom, 5, z)
    assert out[0] == pytest.approx(0.25, abs=1e-15)
    assert out[1] == 0.0


def test_exceptional_set_membership(dom):
    e = ExceptionalSet(dom)
    k = dom.position(6)
    a, r, s = dom.a[k], dom.r[k], dom.s[k]
    assert e.margin(6) == pytest.approx(s, rel=1e-12)
    with pytest.raises(ValueError):
        e.margin(0)
    # inside the margin ring: excluded; just beyond it: kept
    assert not e.contains(complex(a + r + 0.5 * s))
    assert e.contains(complex(a + r + 1.01 * s))
    # the origin and everything outside the closed unit disk are excluded
    assert not e.contains(0.0)
    assert not e.contains(1.0 + 1e-9)
    assert e.contains(complex(0.0, 0.75 * 2.0 ** -6))
    assert bool(in_exceptional(dom, complex(a + r + 1.01 * s)))


def test_exceptional_set_hole_free_annuli():
    sub = build_counterexample(0.5, SQRT, 30, mode="subsequenced")
    assert not sub.has_hole(2)
    # the whole annulus is exceptional when no hole was kept there
    z = 0.75 * 2.0 ** -2 * np.exp(1j * np.linspace(0.0, 6.0, 20))
    assert bool(np.all(in_exceptional(sub, z)))


def test_sample_in_annulus_bounds():
    rng = np.random.default_rng(3)
    z = sample_in_annulus(5, 500, rng)
    d = np.abs(z)
    assert len(z) == 500
    assert np.all(d >= 2.0 ** -6)
    assert np.all(d <= 2.0 ** -5)
    # seeded reproducibility
    again = sample_in_annulus(5, 500, np.random.default_rng(3))
    assert np.array_equal(z, again)


def test_sample_exceptional_lands_in_e(dom):
    e = ExceptionalSet(dom)
    rng = np.random.default_rng(4)
    z = sample_exceptional(dom, 8, 300, rng)
    assert len(z) == 300
    assert bool(np.all(e.mask(z)))
    assert np.all(annulus_index(np.abs(z)) == 8)
