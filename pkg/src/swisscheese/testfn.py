"""Rational test functions, Lipschitz-type seminorms, contour functionals.

Test functions are finite sums of pole terms c (z - p)^-m plus a
polynomial.  They are the probes for the quantitative estimates: their
holder seminorm on a region, their Taylor remainders at the origin, and
their contour integrals around circles and annulus boundaries.

Seminorm estimation is sampling based and deterministic in the seed; the
raw pair scan alone stalls a few percent under corner-type optima, so a
short projected local search runs around the best sampled pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .content import DiskUnion, content_disk_exact, content_upper
from .domain import SwissCheeseDomain

TWO_PI = 2.0 * math.pi


class EvaluationError(ValueError):
    """Raised when an evaluation point sits on top of a pole."""


class QuadratureError(RuntimeError):
    """Raised when a contour grazes a pole or node doubling stalls."""


class EstimationError(RuntimeError):
    """Raised when a sampling estimate has nothing to work with."""


class GenerationError(RuntimeError):
    """Raised when a random test function cannot be produced."""


@dataclass(frozen=True)
class PoleTerm:
    location: complex
    order: int
    coeff: complex

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("pole order must be at least 1")


@dataclass(frozen=True)
class TestFunction:
    """f(z) = sum of pole terms plus a polynomial in z.

    ``poly[k]`` multiplies z^k.  ``norm`` records the Lipschitz-type norm
    the function was normalized to, when it was normalized at all.
    """

    # not a pytest suite, despite the Test* name
    __test__ = False

    poles: tuple[PoleTerm, ...] = ()
    poly: tuple[complex, ...] = ()
    label: str = ""
    norm: float | None = None

    def pole_locations(self) -> tuple[complex, ...]:
        return tuple(p.location for p in self.poles)

    def evaluate(self, z):
        """Evaluate pointwise; points must stay 1e-12 clear of each pole."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for p in self.poles:
            d = z - p.location
            if np.any(np.abs(d) < 1e-12):
                raise EvaluationError(
                    f"evaluation point within 1e-12 of pole at {p.location}")
            out = out + p.coeff * d ** (-p.order)
        if self.poly:
            acc = np.zeros_like(z)
            for c in reversed(self.poly):
                acc = acc * z + c
            out = out + acc
        return complex(out) if out.ndim == 0 else out

    def derivative_at(self, x: complex, order: int) -> complex:
        """Exact j-th derivative at x (analytic formula, no differencing)."""
        if order < 0:
            raise ValueError("derivative order must be non-negative")
        j = int(order)
        x = complex(x)
        total = 0.0 + 0.0j
        for p in self.poles:
            d = x - p.location
            if abs(d) < 1e-12:
                raise EvaluationError(
                    f"derivative point within 1e-12 of pole at {p.location}")
            m = p.order
            rising = math.prod(range(m, m + j)) if j else 1
            total += p.coeff * (-1) ** j * rising * d ** (-(m + j))
        for k in range(j, len(self.poly)):
            total += self.poly[k] * math.perm(k, j) * x ** (k - j)
        return complex(total)

    def taylor_remainder(self, x: complex, y, degree: int):
        """f(y) minus the Taylor polynomial of the given degree around x."""
        if degree < 0:
            raise ValueError("degree must be non-negative")
        y = np.asarray(y, dtype=complex)
        out = self.evaluate(y)
        for j in range(degree + 1):
            out = out - self.derivative_at(x, j) / math.factorial(j) * (y - x) ** j
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Region:
    """Sampling region for seminorm estimation.

    kinds: ``square`` (center, half-side = size), ``disk`` (radius = size),
    ``annulus`` (inner <= |z - c| <= size), ``disks`` (union).  ``exclude``
    lists closed disks removed from the region, e.g. the domain holes.
    """

    kind: str
    center: complex = 0.0 + 0.0j
    size: float = 1.0
    inner: float = 0.0
    disks: tuple[tuple[complex, float], ...] = ()
    exclude: tuple[tuple[complex, float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("square", "disk", "annulus", "disks"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind == "disks" and not self.disks:
            raise ValueError("disks region needs at least one disk")
        if self.kind == "annulus" and not 0.0 <= self.inner < self.size:
            raise ValueError("annulus needs 0 <= inner < size")

    @property
    def label(self) -> str:
        if self.kind == "disks":
            core = f"disks[{len(self.disks)}]"
        elif self.kind == "annulus":
            core = f"annulus({self.center}, {self.inner:g}, {self.size:g})"
        else:
            core = f"{self.kind}({self.center}, {self.size:g})"
        return core + (f" minus {len(self.exclude)} disks" if self.exclude else "")

    @property
    def diameter(self) -> float:
        if self.kind == "square":
            return 2.0 * self.size * math.sqrt(2.0)
        if self.kind in ("disk", "annulus"):
            return 2.0 * self.size
        best = 0.0
        for ci, ri in self.disks:
            for cj, rj in self.disks:
                best = max(best, abs(ci - cj) + ri + rj)
        return best

    def _from_uniform(self, u0: np.ndarray, u1: np.ndarray) -> np.ndarray:
        if self.kind == "square":
            return (self.center + self.size * (2.0 * u0 - 1.0)
                    + 1j * self.size * (2.0 * u1 - 1.0))
        if self.kind in ("disk", "annulus"):
            lo2 = self.inner ** 2
            rho = np.sqrt(lo2 + u0 * (self.size ** 2 - lo2))
            return self.center + rho * np.exp(1j * TWO_PI * u1)
        radii = np.array([r for _, r in self.disks])
        centers = np.array([c for c, _ in self.disks], dtype=complex)
        w = radii ** 2
        cum = np.cumsum(w) / w.sum()
        pick = np.searchsorted(cum, u0, side="right").clip(0, len(radii) - 1)
        lo = np.concatenate([[0.0], cum])[pick]
        span = cum[pick] - lo
        # conditional remainder of u0 inside its bin is again uniform
        frac = np.where(span > 0, (u0 - lo) / np.maximum(span, 1e-300), 0.0)
        rho = radii[pick] * np.sqrt(frac)
        return centers[pick] + rho * np.exp(1j * TWO_PI * u1)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.kind == "square":
            ok = ((np.abs(z.real - self.center.real) <= self.size)
                  & (np.abs(z.imag - self.center.imag) <= self.size))
        elif self.kind == "disk":
            ok = np.abs(z - self.center) <= self.size
        elif self.kind == "annulus":
            d = np.abs(z - self.center)
            ok = (d >= self.inner) & (d <= self.size)
        else:
            ok = np.zeros(z.shape, dtype=bool)
            for c, r in self.disks:
                ok |= np.abs(z - c) <= r
        for c, r in self.exclude:
            ok &= np.abs(z - c) > r
        return ok

    def _project(self, z: np.ndarray) -> np.ndarray:
        """Pull points back to the closure; used by the local search."""
        if self.kind == "square":
            x = np.clip(z.real, self.center.real - self.size,
                        self.center.real + self.size)
            y = np.clip(z.imag, self.center.imag - self.size,
                        self.center.imag + self.size)
            return x + 1j * y
        if self.kind in ("disk", "annulus"):
            d = z - self.center
            r = np.abs(d)
            r_safe = np.maximum(r, 1e-300)
            rho = np.clip(r, self.inner, self.size)
            return self.center + d * (rho / r_safe)
        return z

    def sample(self, count: int, rng: np.random.Generator,
               max_batches: int = 200) -> np.ndarray:
        out = np.empty(0, dtype=complex)
        for _ in range(max_batches):
            u = rng.random((max(count, 64), 2))
            z = self._from_uniform(u[:, 0], u[:, 1])
            z = z[self.contains(z)]
            out = np.concatenate([out, z])
            if len(out) >= count:
                return out[:count]
        raise EstimationError(f"region {self.label}: rejection too strong")


@dataclass(frozen=True)
class NormEstimate:
    """Sampled holder-quotient estimate on a region.

    seminorm = sup |f(z) - f(w)| / |z - w|^alpha over sampled pairs after
    the local search; sup_norm = max |f| over the sampled points; lip_norm
    is their sum.  little_lip[k] = (cutoff, max ratio over pairs closer
    than cutoff), nan when no pair landed that close.
    """

    seminorm: float
    sup_norm: float
    alpha: float
    region_label: str
    pairs: int
    valid_pairs: int
    best_pair: tuple[complex, complex]
    little_lip: tuple[tuple[float, float], ...] = ()

    @property
    def lip_norm(self) -> float:
        return self.seminorm + self.sup_norm


_POLE_CLEARANCE = 1e-9


def _pair_ratios(f: TestFunction, z: np.ndarray, w: np.ndarray, alpha: float):
    sep = np.abs(z - w)
    ok = sep > 1e-12
    for p in f.poles:
        ok &= np.abs(z - p.location) >= _POLE_CLEARANCE
        ok &= np.abs(w - p.location) >= _POLE_CLEARANCE
    z, w, sep = z[ok], w[ok], sep[ok]
    if z.size == 0:
        return z, w, np.empty(0), np.empty(0)
    fz = f.evaluate(z)
    fw = f.evaluate(w)
    ratios = np.abs(fz - fw) / sep ** alpha
    sups = np.maximum(np.abs(fz), np.abs(fw))
    return z, w, ratios, sups


def lip_seminorm(f: TestFunction, alpha: float, region: Region,
                 pairs: int = 200000, seed: int = 0,
                 refine_rounds: int = 8, refine_size: int = 256) -> NormEstimate:
    """Estimate the holder seminorm of f on the region.

    The pair budget is prefix stable: a run with a larger ``pairs`` value
    sees the smaller run's pairs as its prefix.  Half the pairs are global
    (both endpoints fresh), half are local with log-uniform separation, so
    the small-separation quotients that drive the little-lip table get
    sampled too.  The local search then polishes the best pair under
    boundary projection, which closes the few-percent gap corner optima
    leave in a raw scan.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if pairs < 1:
        raise ValueError("pairs must be positive")
    rng = np.random.default_rng(seed)
    u = rng.random((pairs, 6))
    z = region._from_uniform(u[:, 0], u[:, 1])
    diam = region.diameter
    global_w = region._from_uniform(u[:, 3], u[:, 4])
    delta = diam * 10.0 ** (-9.0 * u[:, 3])
    local_w = z + delta * np.exp(1j * TWO_PI * u[:, 4])
    w = np.where(u[:, 2] < 0.5, global_w, local_w)
    keep = region.contains(z) & region.contains(w)
    z, w = z[keep], w[keep]

    z, w, ratios, sups = _pair_ratios(f, z, w, alpha)
    if ratios.size == 0:
        raise EstimationError("no valid sample pairs; region may be "
                              "swallowed by exclusions or poles")
    k = int(np.argmax(ratios))
    best = (complex(z[k]), complex(w[k]))
    best_ratio = float(ratios[k])
    sup_norm = float(np.max(sups))
    valid = int(ratios.size)

    seps = np.abs(z - w)
    little = []
    for kk in range(9):
        cut = diam * 10.0 ** (-kk)
        m = seps <= cut
        little.append((float(cut), float(np.max(ratios[m])) if np.any(m)
                       else float("nan")))

    for rd in range(refine_rounds):
        scale = diam * 0.5 ** rd / 4.0
        g = rng.standard_normal((refine_size, 4))
        zc = region._project(best[0] + scale * (g[:, 0] + 1j * g[:, 1]))
        wc = region._project(best[1] + scale * (g[:, 2] + 1j * g[:, 3]))
        ok = region.contains(zc) & region.contains(wc)
        zc, wc, rr, ss = _pair_ratios(f, zc[ok], wc[ok], alpha)
        if rr.size == 0:
            continue
        sup_norm = max(sup_norm, float(np.max(ss)))
        kk = int(np.argmax(rr))
        if float(rr[kk]) > best_ratio:
            best_ratio = float(rr[kk])
            best = (complex(zc[kk]), complex(wc[kk]))

    return NormEstimate(seminorm=best_ratio, sup_norm=sup_norm,
                        alpha=float(alpha), region_label=region.label,
                        pairs=pairs, valid_pairs=valid, best_pair=best,
                        little_lip=tuple(little))


@dataclass(frozen=True)
class CircleContour:
    center: complex
    radius: float
    orientation: int = 1

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("contour radius must be positive")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")


def annulus_boundary(n: int, center: complex = 0.0) -> tuple[CircleContour, CircleContour]:
    """Boundary chain of A_n: outer circle ccw, inner circle cw."""
    if n < 0:
        raise ValueError("annulus index must be non-negative")
    return (CircleContour(center, 2.0 ** (-n), 1),
            CircleContour(center, 2.0 ** (-n - 1), -1))


_KINDS = ("f", "f/z", "f/z^2", "f/(z^2 (z-y))")


def contour_integral(f: TestFunction, contour, kind: str = "f",
                     y: complex | None = None, tol: float = 1e-10,
                     max_nodes: int = 2 ** 20, min_nodes: int = 32) -> complex:
    """Integrate a modification of f along circles by node doubling.

    Trapezoid sums on a circle converge spectrally for integrands that are
    analytic near the contour; doubling stops when successive values agree
    to tol relative (with an absolute floor at 1, so exact zeros settle).
    Every pole of the integrand must stay 1e-9 clear of every circle.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown integrand kind {kind!r}")
    if kind == "f/(z^2 (z-y))":
        if y is None:
            raise ValueError("kind f/(z^2 (z-y)) needs the point y")
        y = complex(y)
    circles = [contour] if isinstance(contour, CircleContour) else list(contour)

    special = []
    if kind != "f":
        special.append(0.0 + 0.0j)
    if y is not None:
        special.append(y)
    pole_pts = list(f.pole_locations()) + special

    def integrand(zs: np.ndarray) -> np.ndarray:
        g = f.evaluate(zs)
        if kind == "f/z":
            g = g / zs
        elif kind == "f/z^2":
            g = g / zs ** 2
        elif kind == "f/(z^2 (z-y))":
            g = g / (zs ** 2 * (zs - y))
        return g

    total = 0.0 + 0.0j
    for c in circles:
        for p in pole_pts:
            if abs(abs(p - c.center) - c.radius) < _POLE_CLEARANCE:
                raise QuadratureError(
                    f"pole at {p} within 1e-9 of circle "
                    f"|z - {c.center}| = {c.radius}")

        def value(m: int) -> complex:
            th = np.arange(m) * (TWO_PI / m)
            e = np.exp(1j * th)
            zs = c.center + c.radius * e
            return complex((TWO_PI / m) * np.sum(integrand(zs) * 1j * c.radius * e))

        m = min_nodes
        prev = value(m)
        converged = False
        while m < max_nodes:
            m *= 2
            cur = value(m)
            if abs(cur - prev) <= tol * max(1.0, abs(cur)):
                converged = True
                prev = cur
                break
            prev = cur
        if not converged:
            raise QuadratureError(
                f"node doubling stalled at {m} nodes on circle "
                f"|z - {c.center}| = {c.radius}")
        total += c.orientation * prev
    return total


def center_functional(f: TestFunction) -> complex:
    """(1 / 2 pi i) times the f/z integral around |z| = 1/2, counter
    clockwise; equals f(0) when f has no pole inside that circle."""
    v = contour_integral(f, CircleContour(0.0, 0.5, 1), kind="f/z")
    return v / (2j * math.pi)


def annulus_functional(f: TestFunction, n: int) -> complex:
    """(1 / 2 pi i) times the f/z integral along the boundary chain of A_n;
    picks out the residue mass of f/z sitting inside the annulus."""
    v = contour_integral(f, annulus_boundary(n), kind="f/z")
    return v / (2j * math.pi)


@dataclass(frozen=True)
class MelnikovReport:
    """Probe of the comparability |integral| <= C content seminorm.

    ``degenerate`` flags a pole inside the sampling region: the true
    seminorm is then infinite and the sampled one is clearance limited,
    so the reported ratio is only a lower bound for C.
    """

    lhs: float
    content: float
    seminorm: float
    ratio: float
    degenerate: bool
    contour: CircleContour


def melnikov_ratio(f: TestFunction, target: DiskUnion, alpha: float,
                   contour: CircleContour | None = None,
                   pairs: int = 20000, seed: int = 0,
                   cover_level: int = 10) -> MelnikovReport:
    """Compare |contour integral of f| against content times seminorm."""
    centers = np.array([c for c, _ in target.disks], dtype=complex)
    radii = np.array([r for _, r in target.disks], dtype=float)
    c0 = complex(np.mean(centers))
    reach = float(np.max(np.abs(centers - c0) + radii))
    if contour is None:
        contour = CircleContour(c0, 2.0 * reach, 1)
    lhs = abs(contour_integral(f, contour, kind="f"))
    if len(target.disks) == 1 and target.band is None:
        content = content_disk_exact(radii[0], alpha)
    else:
        content = content_upper(target, alpha, max_level=cover_level).value
    region = Region(kind="disk", center=contour.center, size=contour.radius)
    est = lip_seminorm(f, alpha, region, pairs=pairs, seed=seed)
    degenerate = any(abs(p - contour.center) <= contour.radius
                     for p in f.pole_locations())
    ratio = lhs / (content * est.seminorm) if content * est.seminorm > 0 else math.inf
    return MelnikovReport(lhs=lhs, content=content, seminorm=est.seminorm,
                          ratio=ratio, degenerate=degenerate, contour=contour)


def random_testfn(domain: SwissCheeseDomain, seed: int = 0,
                  pole_budget: int = 1,
                  normalization: Region | None = None,
                  norm_pairs: int = 20000,
                  min_host_radius: float = 1e-6,
                  host: int | None = None) -> TestFunction:
    """Random pole terms inside valid holes, normalized to lip norm 1.

    Pole locations stay inside the inner half of their hole so they keep
    half a radius of clearance from the hole boundary.  Host holes need
    radius at least ``min_host_radius``: deeper holes are thinner than the
    evaluation clearances, so nothing could ever be evaluated near them.
    Pass ``host`` to pin every pole to one specific hole.  The
    normalization region defaults to the square of half-side 2.
    """
    if pole_budget < 1:
        raise GenerationError("pole_budget must be at least 1")
    ok = domain.inside_annulus & domain.r_below_margin & domain.fits_with_margin
    good = np.nonzero(ok & (domain.r >= min_host_radius))[0]
    if host is not None:
        if not domain.has_hole(host):
            raise GenerationError(f"no hole at requested host index {host}")
        kh = domain.position(host)
        if kh not in good:
            raise GenerationError(
                f"hole {host} cannot host poles (invalid geometry or radius "
                f"below {min_host_radius})")
        good = np.asarray([kh])
    if good.size == 0:
        raise GenerationError(
            f"no valid holes of radius >= {min_host_radius} to host poles")
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(pole_budget):
        k = int(good[rng.integers(good.size)])
        rho = 0.5 * domain.r[k] * math.sqrt(rng.random())
        loc = domain.a[k] + rho * np.exp(1j * TWO_PI * rng.random())
        order = 1 if rng.random() < 0.7 else 2
        coeff = complex(rng.standard_normal(), rng.standard_normal())
        terms.append(PoleTerm(location=complex(loc), order=order, coeff=coeff))
    f0 = TestFunction(poles=tuple(terms), label=f"random(seed={seed})")
    region = normalization or Region(kind="square", center=0.0, size=2.0)
    est = lip_seminorm(f0, domain.alpha, region, pairs=norm_pairs, seed=seed + 1)
    if not math.isfinite(est.lip_norm) or est.lip_norm <= 0.0:
        raise GenerationError("normalization estimate degenerate")
    scale = 1.0 / est.lip_norm
    scaled = tuple(PoleTerm(p.location, p.order, p.coeff * scale) for p in terms)
    return TestFunction(poles=scaled, label=f0.label, norm=1.0)
