"""Swiss-cheese domains: the unit disk with one hole per dyadic annulus.

The n-th annulus is A_n = {2^-(n+1) <= |z| <= 2^-n}, its hole is the closed
disk centered at a_n = (3/4) 2^-n on the positive real axis with radius r_n
fixed by r_n^(1+alpha) = a_n^2 phi(a_n) / n.  The exceptional set E keeps
the points of each annulus that stay at least s_n = a_n / (7 n^(1/3)) away
from the hole boundary.

Radii underflow float64 near n = 640, so every stored quantity also carries
its logarithm in extended precision and all index arithmetic happens there.
The float64 fields are views for display and for shallow-index geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .admissible import AdmissibleFunction, SubsequenceSelection, select_subsequence

LN2 = math.log(2.0)
LOG34 = np.longdouble(math.log(0.75))
LOG3 = np.longdouble(math.log(3.0))
LOG7 = np.longdouble(math.log(7.0))


class ConstructionError(ValueError):
    """Raised when the requested domain cannot be built."""


class SamplingError(RuntimeError):
    """Raised when rejection sampling cannot reach the target region."""


@dataclass(frozen=True)
class Hole:
    """One excluded disk with its geometry flags.

    ``inside_annulus``: r_n < a_n / 3, the hole stays in its annulus.
    ``r_below_margin``: r_n < s_n.
    ``fits_with_margin``: r_n + s_n < a_n / 3, the margin ring stays in
    the annulus too.  All three hold from some index on; the low indices
    where they fail are tracked, not hidden.
    """

    n: int
    a: float
    r: float
    s: float
    inside_annulus: bool
    r_below_margin: bool
    fits_with_margin: bool

    @property
    def valid(self) -> bool:
        return self.inside_annulus and self.r_below_margin and self.fits_with_margin


@dataclass
class SwissCheeseDomain:
    """Construction output: aligned per-hole arrays plus the parameters.

    ``indices`` is sorted and unique.  ``log_*`` arrays are longdouble,
    ``a``, ``r``, ``s`` are float64 and may underflow to 0.0 at deep
    indices; anything quantitative should go through the logs.
    """

    alpha: float
    phi: AdmissibleFunction
    mode: str
    max_index: int
    indices: np.ndarray
    log_a: np.ndarray
    log_r: np.ndarray
    log_s: np.ndarray
    log_content: np.ndarray
    a: np.ndarray
    r: np.ndarray
    s: np.ndarray
    inside_annulus: np.ndarray
    r_below_margin: np.ndarray
    fits_with_margin: np.ndarray
    selection: SubsequenceSelection | None = None
    _pos: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._pos = {int(n): k for k, n in enumerate(self.indices)}

    def __len__(self) -> int:
        return len(self.indices)

    def has_hole(self, n: int) -> bool:
        return int(n) in self._pos

    def position(self, n: int) -> int:
        try:
            return self._pos[int(n)]
        except KeyError:
            raise KeyError(f"no hole at annulus index {n}") from None

    def hole(self, n: int) -> Hole:
        k = self.position(n)
        return Hole(n=int(self.indices[k]), a=float(self.a[k]),
                    r=float(self.r[k]), s=float(self.s[k]),
                    inside_annulus=bool(self.inside_annulus[k]),
                    r_below_margin=bool(self.r_below_margin[k]),
                    fits_with_margin=bool(self.fits_with_margin[k]))

    def holes(self) -> Iterator[Hole]:
        for n in self.indices:
            yield self.hole(int(n))


def build_counterexample(alpha: float, phi: AdmissibleFunction,
                         max_index: int, mode: str = "dense") -> SwissCheeseDomain:
    """Build the domain for the given shape parameter and weight.

    ``mode="dense"`` puts a hole in every annulus 1..max_index.
    ``mode="subsequenced"`` keeps only the greedy-selected indices; a
    constant weight is rejected because no proper selection exists for it.
    """
    if not 0.0 < alpha < 1.0:
        raise ConstructionError(f"alpha must lie in (0, 1), got {alpha}")
    if max_index < 1:
        raise ConstructionError(f"max_index must be at least 1, got {max_index}")
    if mode not in ("dense", "subsequenced"):
        raise ConstructionError(f"unknown mode {mode!r}")

    selection = None
    if mode == "subsequenced":
        selection = select_subsequence(phi, max_index)
        if len(selection.indices) == 1 and phi.kind == "constant-one":
            raise ConstructionError(
                f"subsequenced mode needs a decaying weight: {selection.note}")
        indices = np.asarray(selection.indices, dtype=np.int64)
    else:
        indices = np.arange(1, max_index + 1, dtype=np.int64)

    n_ld = indices.astype(np.longdouble)
    log_a = LOG34 - n_ld * np.longdouble(LN2)
    log_phi_a = np.asarray(phi.log_phi(log_a), dtype=np.longdouble)
    log_content = 2.0 * log_a - np.log(n_ld) + log_phi_a
    log_r = log_content / np.longdouble(1.0 + alpha)
    log_s = log_a - LOG7 - np.log(n_ld) / 3.0

    inside = log_r < log_a - LOG3
    below = log_r < log_s
    fits = np.logaddexp(log_r, log_s) < log_a - LOG3

    return SwissCheeseDomain(
        alpha=float(alpha), phi=phi, mode=mode, max_index=int(max_index),
        indices=indices, log_a=log_a, log_r=log_r, log_s=log_s,
        log_content=log_content,
        a=np.exp(log_a).astype(float), r=np.exp(log_r).astype(float),
        s=np.exp(log_s).astype(float),
        inside_annulus=inside, r_below_margin=below, fits_with_margin=fits,
        selection=selection)


def annulus_index(d) -> np.ndarray:
    """Vectorized annulus index for distances d from the center.

    Returns -1 where no annulus applies (d <= 0 or d > 1).  Boundary radii
    d = 2^-k belong to the smaller index k-1, i.e. the outer annulus, and
    d = 1.0 maps to index 0.
    """
    d = np.asarray(d, dtype=float)
    _, e = np.frexp(d)
    n = -e.astype(np.int64)
    # d = m 2^e with m in [1/2, 1): 2^(e-1) <= d < 2^e, so d sits in A_{-e};
    # the exact boundary d = 2^(e-1) lands in A_{-e} too, the smaller index.
    n = np.where(d == 1.0, 0, n)
    n = np.where((d <= 0.0) | (d > 1.0), -1, n)
    return n


def annulus_of(z: complex, center: complex = 0.0) -> int | None:
    """Annulus index of a single point, or None when it misses all annuli."""
    d = abs(complex(z) - complex(center))
    n = int(annulus_index(d))
    return None if n < 0 else n


def hole_distance(domain: SwissCheeseDomain, n: int, z) -> np.ndarray | float:
    """Distance from z to the closed hole disk at index n, clamped at 0."""
    k = domain.position(n)
    z = np.asarray(z, dtype=complex)
    d = np.maximum(np.abs(z - domain.a[k]) - domain.r[k], 0.0)
    return float(d) if d.ndim == 0 else d


@dataclass(frozen=True)
class ExceptionalSet:
    """Membership test for the far-from-holes set E.

    A point of annulus A_n belongs to E when the annulus has no hole, or
    when its distance to the hole center is at least r_n + s_n.  Points
    with |z| > 1 or z = 0 never belong.
    """

    domain: SwissCheeseDomain

    def margin(self, n: int) -> float:
        """The buffer width s_n = a_n / (7 n^(1/3)), defined for any n >= 1."""
        if n < 1:
            raise ValueError("margin needs n >= 1")
        a = 0.75 * 2.0 ** (-n)
        return a / (7.0 * n ** (1.0 / 3.0))

    def mask(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        d = np.abs(z)
        ann = annulus_index(d)
        out = ann >= 0
        # indices present in the domain need the distance test
        pos = np.searchsorted(self.domain.indices, ann)
        pos_c = np.clip(pos, 0, len(self.domain.indices) - 1)
        holed = out & (self.domain.indices[pos_c] == ann)
        if np.any(holed):
            k = pos_c[holed]
            sep = np.abs(z[holed] - self.domain.a[k])
            out[holed] = sep >= self.domain.r[k] + self.domain.s[k]
        return out

    def contains(self, z: complex) -> bool:
        return bool(self.mask(np.asarray([z]))[0])


def in_exceptional(domain: SwissCheeseDomain, z) -> np.ndarray | bool:
    """Convenience wrapper over ExceptionalSet.mask for arrays or scalars."""
    e = ExceptionalSet(domain)
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        return bool(e.mask(z.reshape(1))[0])
    return e.mask(z)


@dataclass(frozen=True)
class GeometryReport:
    """Per-hole validity flags and the threshold index.

    ``n0`` is the least listed index from which every later listed hole
    passes all three flags, or None when even the last hole fails.
    """

    holes: tuple[Hole, ...]
    n0: int | None
    failing: tuple[int, ...]

    @property
    def all_valid(self) -> bool:
        return not self.failing


def validate_geometry(domain: SwissCheeseDomain) -> GeometryReport:
    ok = domain.inside_annulus & domain.r_below_margin & domain.fits_with_margin
    failing = tuple(int(n) for n in domain.indices[~ok])
    n0 = None
    # least position such that ok holds for every later hole
    suffix_ok = np.logical_and.accumulate(ok[::-1])[::-1]
    hits = np.nonzero(suffix_ok)[0]
    if hits.size:
        n0 = int(domain.indices[hits[0]])
    return GeometryReport(holes=tuple(domain.holes()), n0=n0, failing=failing)


def sample_in_annulus(n: int, count: int, rng: np.random.Generator,
                      center: complex = 0.0) -> np.ndarray:
    """Uniform-by-area samples from A_n around the given center."""
    if n < 0:
        raise ValueError("annulus index must be non-negative")
    hi = 2.0 ** (-n)
    lo = hi / 2.0
    u = rng.random(count)
    rho = np.sqrt(lo * lo + u * (hi * hi - lo * lo))
    theta = rng.random(count) * 2.0 * math.pi
    return center + rho * np.exp(1j * theta)


def sample_exceptional(domain: SwissCheeseDomain, n: int, count: int,
                       rng: np.random.Generator, max_batches: int = 200) -> np.ndarray:
    """Rejection-sample E intersected with A_n."""
    e = ExceptionalSet(domain)
    out = np.empty(0, dtype=complex)
    for _ in range(max_batches):
        z = sample_in_annulus(n, max(count, 64), rng)
        z = z[e.mask(z)]
        out = np.concatenate([out, z])
        if len(out) >= count:
            return out[:count]
    raise SamplingError(
        f"annulus {n}: acceptance too low, got {len(out)}/{count} samples")
