"""Admissible weight functions and greedy subsequence selection.

A weight ``phi`` on (0, 1] is admissible when it is positive and
non-decreasing and the companion ``psi(r) = r / phi(r)`` is non-decreasing
with ``psi(0+) = 0``.  Weights of this kind calibrate how fast the hole
radii shrink in the swiss-cheese construction: the hole in the n-th dyadic
annulus gets content ``a_n^2 phi(a_n) / n``, so a heavier weight means
fatter holes.

Three stock families are provided (``power``, ``log_quotient``,
``constant_one``) plus a ``custom`` escape hatch.  ``check_admissible``
verifies the defining properties numerically on a geometric grid, and
``select_subsequence`` runs the greedy-minimal thinning used to repair
weights that decay too slowly for the dense construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

LN2 = math.log(2.0)

# log phi(1) for the log-quotient weight, i.e. -log(log 2)
LOG_QUOTIENT_AT_ONE = 1.0 / LN2


class AdmissibilityError(ValueError):
    """Raised when a weight fails a structural requirement."""


def _as_longdouble(x) -> np.ndarray:
    return np.asarray(x, dtype=np.longdouble)


@dataclass(frozen=True)
class AdmissibleFunction:
    """A candidate weight with direct and log-space evaluators.

    ``log_phi`` takes ``log r`` and returns ``log phi(r)``.  All deep-index
    arithmetic in the construction runs through the log form because the
    radii underflow float64 long before the interesting indices end.
    """

    kind: str
    exponent: float = 0.0
    _phi: Callable = field(repr=False, default=None)
    _log_phi: Callable = field(repr=False, default=None)

    @classmethod
    def power(cls, exponent: float) -> "AdmissibleFunction":
        """phi(r) = r**exponent with 0 < exponent < 1."""
        if not 0.0 < exponent < 1.0:
            raise AdmissibilityError(
                f"power exponent must lie in (0, 1), got {exponent}")
        b = float(exponent)
        return cls(kind="power", exponent=b,
                   _phi=lambda r: np.asarray(r, dtype=float) ** b,
                   _log_phi=lambda lr: b * _as_longdouble(lr))

    @classmethod
    def log_quotient(cls) -> "AdmissibleFunction":
        """phi(r) = r / log(1 + r), extended by phi(0+) = 1.

        Bounded above by 1/log 2 on (0, 1], so this weight is admissible
        but decays too slowly for the dense construction and is the main
        customer of the subsequence selector.
        """
        def phi(r):
            r = np.asarray(r, dtype=float)
            return r / np.log1p(r)

        def log_phi(lr):
            lr = _as_longdouble(lr)
            scalar = lr.ndim == 0
            lr1 = np.atleast_1d(lr)
            x = np.exp(lr1)
            out = np.empty_like(lr1)
            tiny = x < 1e-8
            # log(r / log(1+r)) = -log1p(-r/2 + O(r^2)) ~ r/2 for small r
            out[tiny] = x[tiny] / 2
            big = ~tiny
            out[big] = lr1[big] - np.log(np.log1p(x[big]))
            return out[0] if scalar else out

        return cls(kind="log-quotient", _phi=phi, _log_phi=log_phi)

    @classmethod
    def constant_one(cls) -> "AdmissibleFunction":
        """phi(r) = 1, the classical Hausdorff-content normalization."""
        return cls(kind="constant-one",
                   _phi=lambda r: np.ones_like(np.asarray(r, dtype=float)),
                   _log_phi=lambda lr: np.zeros_like(_as_longdouble(lr)))

    @classmethod
    def custom(cls, phi: Callable, log_phi: Callable | None = None,
               exponent: float = 0.0) -> "AdmissibleFunction":
        """Wrap an arbitrary evaluator.  ``log_phi`` falls back to
        evaluating phi at exp(log r) in extended precision, which is fine
        unless the weight itself underflows."""
        if log_phi is None:
            def log_phi(lr):
                lr = _as_longdouble(lr)
                return np.log(_as_longdouble(phi(np.exp(lr))))
        return cls(kind="custom", exponent=exponent, _phi=phi, _log_phi=log_phi)

    def phi(self, r):
        return self._phi(r)

    def psi(self, r):
        r = np.asarray(r, dtype=float)
        return r / self._phi(r)

    def log_phi(self, log_r):
        return self._log_phi(log_r)

    def log_psi(self, log_r):
        lr = _as_longdouble(log_r)
        return lr - self._log_phi(lr)


@dataclass(frozen=True)
class GeometricGrid:
    """Geometric sample grid on [r_min, r_max], densest near zero."""

    r_min: float = 1e-9
    r_max: float = 1.0
    points: int = 512

    def values(self) -> np.ndarray:
        if not (0.0 < self.r_min < self.r_max and self.points >= 2):
            raise ValueError("grid needs 0 < r_min < r_max and >= 2 points")
        return np.geomspace(self.r_min, self.r_max, self.points)


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the grid checks, with the worst offending abscissa."""

    kind: str
    grid: GeometricGrid
    phi_positive: bool
    phi_nondecreasing: bool
    psi_nondecreasing: bool
    psi_vanishes: bool
    psi_ratio: float
    witness: float | None = None

    @property
    def admissible(self) -> bool:
        return (self.phi_positive and self.phi_nondecreasing
                and self.psi_nondecreasing and self.psi_vanishes)


def check_admissible(f: AdmissibleFunction,
                     grid: GeometricGrid | None = None,
                     psi_limit_rtol: float = 1e-3) -> AdmissibilityReport:
    """Verify the four defining properties of an admissible weight on a grid.

    Monotonicity is checked up to a 1e-12 relative slack so exactly-flat
    weights pass.  The vanishing limit is approximated by requiring
    ``psi(r_min) <= psi_limit_rtol * psi(r_max)``.
    """
    grid = grid or GeometricGrid()
    r = grid.values()
    ph = np.asarray(f.phi(r), dtype=float)
    ps = r / ph

    positive = bool(np.all(ph > 0.0))
    slack = 1e-12
    phi_mono = bool(np.all(ph[1:] >= ph[:-1] * (1.0 - slack)))
    psi_mono = bool(np.all(ps[1:] >= ps[:-1] * (1.0 - slack)))
    ratio = float(ps[0] / ps[-1])
    vanishes = ratio <= psi_limit_rtol

    witness = None
    if positive and not phi_mono:
        witness = float(r[1:][ph[1:] < ph[:-1] * (1.0 - slack)][0])
    elif positive and not psi_mono:
        witness = float(r[1:][ps[1:] < ps[:-1] * (1.0 - slack)][0])

    return AdmissibilityReport(kind=f.kind, grid=grid, phi_positive=positive,
                               phi_nondecreasing=phi_mono,
                               psi_nondecreasing=psi_mono,
                               psi_vanishes=vanishes, psi_ratio=ratio,
                               witness=witness)


# Centers sit at 3/4 of each dyadic scale: a_n = (3/4) 2^-n.
def _log_centers(n: np.ndarray) -> np.ndarray:
    n = _as_longdouble(n)
    return np.longdouble(math.log(0.75)) - n * np.longdouble(LN2)


@dataclass(frozen=True)
class SubsequenceSelection:
    """Greedy-minimal thinning of the hole indices.

    ``indices[k]`` is accepted only if ``phi(a_indices[k])`` is strictly
    below half of the previous accepted value and the partial sum of
    ``1/psi`` over earlier accepted centers is still below
    ``1/psi(a_indices[k])``.  Both certificates are stored per index.
    """

    kind: str
    max_index: int
    indices: tuple[int, ...]
    halving_margin: tuple[float, ...]
    sum_margin: tuple[float, ...]
    note: str = ""

    @property
    def complete(self) -> bool:
        return len(self.indices) > 1


# Exact mathematical ties in the halving test (e.g. power weights where
# exponent * gap == 1) must reject deterministically; float roundoff of
# n log 2 otherwise flips them at large n.
_TIE_GUARD = np.longdouble(1e-9)


def select_subsequence(f: AdmissibleFunction, max_index: int) -> SubsequenceSelection:
    """Greedy scan over n = 1..max_index, in log space throughout.

    Returns the accepted indices with both certificate margins (in nats,
    positive means satisfied with room).  A selection that never grows past
    the seed index carries an explanatory note.
    """
    if max_index < 1:
        raise ValueError("max_index must be at least 1")

    n = np.arange(1, max_index + 1)
    log_a = _log_centers(n)
    lphi = _as_longdouble(f.log_phi(log_a))
    lpsi = log_a - lphi

    indices = [1]
    halving = [float("inf")]
    summarg = [float("inf")]
    prev_lphi = lphi[0]
    # running log of sum_{accepted j} 1 / psi(a_j)
    log_inv_sum = -lpsi[0]

    ln2 = np.longdouble(LN2)
    for k in range(1, max_index):
        gap_half = (prev_lphi - ln2) - lphi[k]
        gap_sum = -lpsi[k] - log_inv_sum
        if gap_half > _TIE_GUARD and gap_sum > _TIE_GUARD:
            indices.append(int(n[k]))
            halving.append(float(gap_half))
            summarg.append(float(gap_sum))
            prev_lphi = lphi[k]
            log_inv_sum = np.logaddexp(log_inv_sum, -lpsi[k])

    note = ""
    if len(indices) == 1:
        if f.kind == "constant-one":
            note = ("halving condition cannot hold for a constant weight; "
                    "no proper subsequence exists")
        else:
            note = (f"no index in 2..{max_index} satisfied both certificates; "
                    "increase max_index or use a lighter weight")

    return SubsequenceSelection(kind=f.kind, max_index=max_index,
                                indices=tuple(indices),
                                halving_margin=tuple(halving),
                                sum_margin=tuple(summarg), note=note)
