"""Quantitative checks on the construction.

Five families of estimates, each mirroring one step of the argument that
the swiss-cheese domain separates the function classes:

  * content_series: the weighted sum of hole contents at dyadic scales,
    which must diverge while each term stays of harmonic size,
  * density_profile: the area fraction of the complement of E near the
    origin, which must decay like j^(-2/3),
  * dist_bounds_check: uniform lower bounds on the distance from points
    of E to every hole,
  * remainder_bound_terms and empirical_remainder_ratios: the six sums
    controlling first-order Taylor remainders on E,
  * obstruction_check and obstruction_search: the incompatibility that
    rules out the same construction below the critical exponent.

Everything indexed deeper than a few hundred runs in extended-precision
log space; see the domain module for why.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .admissible import AdmissibleFunction
from .content import content_hole
from .domain import (ExceptionalSet, SwissCheeseDomain, build_counterexample,
                     sample_exceptional)
from .testfn import GenerationError, TestFunction, random_testfn

LN2 = math.log(2.0)
LN4 = np.longdouble(math.log(4.0))

# every term of the scale series is at least this multiple of 1/n:
# (9/16) for the centers times (3/4) from the psi monotonicity bridge
SERIES_FLOOR = 27.0 / 64.0


@dataclass(frozen=True)
class ConditionSpec:
    """Parameter bundle: shape exponent, weight, and remainder degree t.

    t = 1 is the primary regime (first-order Taylor remainders, the
    content series below); t = 0 belongs to the obstruction functions.
    """

    alpha: float
    phi: AdmissibleFunction
    t: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.t not in (0, 1):
            raise ValueError(f"t must be 0 or 1, got {self.t}")

    def build(self, max_index: int, mode: str = "dense") -> SwissCheeseDomain:
        return build_counterexample(self.alpha, self.phi, max_index, mode)


def _logsumexp(a: np.ndarray) -> np.longdouble:
    a = np.asarray(a, dtype=np.longdouble)
    if a.size == 0:
        return np.longdouble(-np.inf)
    m = np.max(a)
    if not np.isfinite(m):
        return m
    return m + np.log(np.sum(np.exp(a - m)))


@dataclass(frozen=True)
class SeriesReport:
    """The scale series of the domain, term by term.

    ``terms[k]`` is 4^n content(hole n) / phi(2^-n) at n = indices[k],
    ``partials`` its running sum, ``lower_curve`` the floor (27/64) times
    the harmonic sum restricted to the same indices.  ``identity_gap`` is
    the largest relative disagreement between the two independent routes
    to the same term (through the stored content and through the center
    weight); it measures numerical health, not modeling.
    """

    indices: np.ndarray
    terms: np.ndarray
    partials: np.ndarray
    lower_curve: np.ndarray
    dominated: bool
    identity_gap: float
    verdict: str
    threshold: float
    invalid_policy: str
    bracketed: np.ndarray
    lower_partials: np.ndarray | None = None


def series_verdict(partials: np.ndarray, dominated: bool,
                   threshold: float) -> str:
    """Classify a partial-sum trajectory.

    diverges-at-scale: every term dominates its harmonic floor and the
    final partial clears the threshold.  converges-at-scale: the second
    half of the range added nothing beyond 1e-9 relative.  Otherwise
    inconclusive.
    """
    n = partials.size
    if n == 0:
        return "inconclusive"
    total = float(partials[-1])
    if dominated and total >= threshold:
        return "diverges-at-scale"
    half = float(partials[(n - 1) // 2])
    if total - half <= 1e-9 * max(1.0, total):
        return "converges-at-scale"
    return "inconclusive"


def content_series(domain: SwissCheeseDomain, threshold: float = 2.0,
                   invalid_policy: str = "disk",
                   cover_level: int = 12) -> SeriesReport:
    """Sum the hole contents against the scale weight phi(2^-n) 4^-n.

    ``invalid_policy`` controls holes that poke out of their annulus:
    "disk" keeps the exact disk content (default), "clipped" replaces
    them by the cover bracket of the clipped hole and reports the lower
    partials alongside.
    """
    if invalid_policy not in ("disk", "clipped"):
        raise ValueError(f"unknown invalid policy {invalid_policy!r}")
    n = domain.indices
    n_ld = n.astype(np.longdouble)
    log_scale = domain.phi.log_phi(-n_ld * np.longdouble(LN2))
    log_terms = n_ld * LN4 + domain.log_content - log_scale

    # independent route: 4^n content / phi(2^-n) = (9/16) phi(a_n) / (n phi(2^-n))
    log_phi_a = domain.phi.log_phi(domain.log_a)
    log_alt = np.longdouble(math.log(9.0 / 16.0)) - np.log(n_ld) \
        + log_phi_a - log_scale
    gap = float(np.max(np.abs(np.expm1(log_terms - log_alt)))) if n.size else 0.0

    terms = np.exp(log_terms).astype(float)
    bracketed = np.zeros(n.size, dtype=bool)
    lower_partials = None
    if invalid_policy == "clipped":
        lower_terms = terms.copy()
        invalid = ~domain.inside_annulus
        for k in np.nonzero(invalid)[0]:
            est = content_hole(domain, int(n[k]), max_level=cover_level)
            scale = float(np.exp(n_ld[k] * LN4 - log_scale[k]))
            terms[k] = est.upper * scale
            lower_terms[k] = est.lower * scale
            bracketed[k] = True
        lower_partials = np.cumsum(lower_terms)

    partials = np.cumsum(terms.astype(np.longdouble)).astype(float)
    lower_curve = SERIES_FLOOR * np.cumsum(1.0 / n.astype(float))
    dominated = bool(np.all(terms * n.astype(float) >= SERIES_FLOOR * (1.0 - 1e-12)))
    verdict = series_verdict(partials, dominated, threshold)
    return SeriesReport(indices=n.copy(), terms=terms, partials=partials,
                        lower_curve=lower_curve, dominated=dominated,
                        identity_gap=gap, verdict=verdict, threshold=threshold,
                        invalid_policy=invalid_policy, bracketed=bracketed,
                        lower_partials=lower_partials)


def series_lower_bound(indices) -> float:
    """(27/64) times the harmonic sum over the given indices."""
    n = np.asarray(indices, dtype=float)
    if np.any(n < 1):
        raise ValueError("indices must be positive")
    return float(SERIES_FLOOR * np.sum(1.0 / n))


@dataclass(frozen=True)
class DensityRow:
    j: int
    exact: float
    tail_bound: float
    bound: float
    certified: bool
    mc: float | None = None
    mc_sigma: float | None = None

    @property
    def within_bound(self) -> bool:
        return self.exact <= self.bound


@dataclass(frozen=True)
class DensityProfile:
    rows: tuple[DensityRow, ...]

    @property
    def all_within(self) -> bool:
        return all(r.within_bound for r in self.rows if r.certified)


def density_profile(domain: SwissCheeseDomain, j_values,
                    mc_samples: int = 0, seed: int = 0,
                    truncate: int = 60) -> DensityProfile:
    """Area fraction of B(0, 2^-j) not in E, against the (3/49) j^(-2/3) cap.

    The exact column is 4^j sum over holes at n >= j of (r_n + s_n)^2,
    truncated ``truncate`` indices deep plus a certified geometric tail
    (the mask radii at least halve index to index).  It upper-bounds the
    true fraction once every hole from j on sits inside its annulus, so
    rows below the geometry threshold are marked uncertified.

    Monte Carlo columns appear when mc_samples > 0: uniform points in the
    disk, binomial sigma alongside.
    """
    e = ExceptionalSet(domain)
    n0_mask = domain.inside_annulus & domain.r_below_margin & domain.fits_with_margin
    rows = []
    rng = np.random.default_rng(seed)
    log_mask = np.logaddexp(domain.log_r, domain.log_s)
    for j in j_values:
        j = int(j)
        if j < 0:
            raise ValueError("j must be non-negative")
        sel = (domain.indices >= j) & (domain.indices <= j + truncate)
        head = _logsumexp(2.0 * log_mask[sel]) if np.any(sel) else np.longdouble(-np.inf)
        deeper = domain.indices > j + truncate
        if np.any(deeper):
            first = np.nonzero(deeper)[0][0]
            tail_log = 2.0 * log_mask[first] + np.longdouble(math.log(1.0 / 3.0))
        else:
            tail_log = np.longdouble(-np.inf)
        lj4 = np.longdouble(j) * LN4
        exact = float(np.exp(lj4 + np.logaddexp(head, tail_log)))
        tail = float(np.exp(lj4 + tail_log))
        bound = (3.0 / 49.0) * j ** (-2.0 / 3.0) if j > 0 else math.inf
        relevant = domain.indices >= j
        certified = bool(np.all(n0_mask[relevant])) if np.any(relevant) else True
        mc = sigma = None
        if mc_samples > 0:
            u = rng.random(mc_samples)
            th = rng.random(mc_samples) * 2.0 * math.pi
            z = 2.0 ** (-j) * np.sqrt(u) * np.exp(1j * th)
            outside = ~e.mask(z)
            p = float(np.mean(outside))
            mc, sigma = p, math.sqrt(max(p * (1.0 - p), 1e-12) / mc_samples)
        rows.append(DensityRow(j=j, exact=exact, tail_bound=tail, bound=bound,
                               certified=certified, mc=mc, mc_sigma=sigma))
    return DensityProfile(rows=tuple(rows))


@dataclass(frozen=True)
class DistanceCheck:
    """Sampled verification of the three distance floors on E cap A_N.

    For y in E cap A_N the distance from y to hole n must be at least
    a_n / 21 for n < N, at least s_N at n = N, and at least a_N / 42 for
    n > N.  ``*_worst`` is the smallest sampled distance-to-floor ratio,
    so anything >= 1 means the floor held with that much room.
    """

    N: int
    samples: int
    head_violations: int
    at_violations: int
    tail_violations: int
    head_worst: float
    at_worst: float
    tail_worst: float

    @property
    def ok(self) -> bool:
        return (self.head_violations + self.at_violations
                + self.tail_violations) == 0


def dist_bounds_check(domain: SwissCheeseDomain, N: int, samples: int = 2000,
                      seed: int = 0) -> DistanceCheck:
    if not domain.has_hole(N):
        raise KeyError(f"no hole at annulus index {N}")
    rng = np.random.default_rng(seed)
    y = sample_exceptional(domain, N, samples, rng)
    kN = domain.position(N)
    aN = float(domain.a[kN])
    sN = float(domain.s[kN])

    head_v = at_v = tail_v = 0
    head_w = at_w = tail_w = math.inf
    for lo in range(0, len(domain.indices), 256):
        hi = min(lo + 256, len(domain.indices))
        nn = domain.indices[lo:hi]
        d = np.abs(y[:, None] - domain.a[lo:hi][None, :]) - domain.r[lo:hi][None, :]
        d = np.maximum(d, 0.0)
        floor = np.where(nn < N, domain.a[lo:hi] / 21.0,
                         np.where(nn == N, sN, aN / 42.0))[None, :]
        ratio = d / floor
        for fam, m in (("head", nn < N), ("at", nn == N), ("tail", nn > N)):
            if not np.any(m):
                continue
            r = ratio[:, m]
            worst = float(np.min(r))
            bad = int(np.sum(r < 1.0))
            if fam == "head":
                head_v += bad
                head_w = min(head_w, worst)
            elif fam == "at":
                at_v += bad
                at_w = min(at_w, worst)
            else:
                tail_v += bad
                tail_w = min(tail_w, worst)
    return DistanceCheck(N=N, samples=len(y), head_violations=head_v,
                         at_violations=at_v, tail_violations=tail_v,
                         head_worst=head_w, at_worst=at_w, tail_worst=tail_w)


@dataclass(frozen=True)
class RemainderTerms:
    """The six sums bounding first-order Taylor remainders on E cap A_N.

    first_* control the first-order (single distance) family, second_*
    the second-order (squared distance) family; head sums run over holes
    before N, peak is the closed form at N itself, tail over holes past
    N.  Tail sums run to the domain's last index; for subsequenced
    domains the halving of the selected weights makes that a certified
    geometric truncation.
    """

    N: int
    first_head: float
    first_peak: float
    first_tail: float
    second_head: float
    second_peak: float
    second_tail: float

    @property
    def first_total(self) -> float:
        return self.first_head + self.first_peak + self.first_tail

    @property
    def second_total(self) -> float:
        return self.second_head + self.second_peak + self.second_tail


def remainder_bound_terms(domain: SwissCheeseDomain, N: int) -> RemainderTerms:
    if not domain.has_hole(N):
        raise KeyError(f"no hole at annulus index {N}")
    k = domain.position(N)
    n_ld = domain.indices.astype(np.longdouble)
    log_phi_a = np.asarray(domain.phi.log_phi(domain.log_a), dtype=np.longdouble)
    log_psi_a = domain.log_a - log_phi_a
    before = domain.indices < N
    after = domain.indices > N

    # head: psi(a_N) sum_{n<N} 1 / (n psi(a_n))
    head = float(np.exp(log_psi_a[k]
                        + _logsumexp(-log_psi_a[before] - np.log(n_ld[before]))))
    # tails: phi(a_N)^-1 sum_{n>N} phi(a_n)/n, same with an extra a_n/a_N
    tail1 = float(np.exp(-log_phi_a[k]
                         + _logsumexp(log_phi_a[after] - np.log(n_ld[after]))))
    tail2 = float(np.exp(-log_phi_a[k] - domain.log_a[k]
                         + _logsumexp(log_phi_a[after] + domain.log_a[after]
                                      - np.log(n_ld[after]))))
    return RemainderTerms(N=N,
                          first_head=head,
                          first_peak=7.0 * N ** (-2.0 / 3.0),
                          first_tail=tail1,
                          second_head=head,
                          second_peak=49.0 * N ** (-1.0 / 3.0),
                          second_tail=tail2)


@dataclass(frozen=True)
class RemainderRow:
    N: int
    max_ratio: float
    mean_ratio: float
    control_rim: float | None = None
    control_e: float | None = None

    @property
    def margin_bites(self) -> bool | None:
        if self.control_rim is None or self.control_e is None:
            return None
        return self.control_rim > self.control_e


@dataclass(frozen=True)
class RemainderProfile:
    """Sampled Taylor-remainder quotients over the test corpus.

    ratio = |remainder of f at y around 0| / (phi(|y|) |y|^t norm(f)) for
    y in E cap A_N.  The control columns use a dedicated probe whose pole
    sits in hole N itself: control_rim samples just outside the hole rim,
    inside the stripped margin ring, and control_e samples E cap A_N with
    the same probe.  A margin that does its job shows control_rim above
    control_e.
    """

    t: int
    rows: tuple[RemainderRow, ...]

    @property
    def overall_max(self) -> float:
        return max((r.max_ratio for r in self.rows), default=0.0)


def empirical_remainder_ratios(domain: SwissCheeseDomain,
                               corpus: tuple[TestFunction, ...] | list,
                               n_values, samples: int = 200, seed: int = 0,
                               t: int = 1, control: bool = True) -> RemainderProfile:
    if t not in (0, 1):
        raise ValueError("t must be 0 or 1")
    if not corpus:
        raise ValueError("corpus must not be empty")
    rng = np.random.default_rng(seed)
    rows = []
    for N in n_values:
        N = int(N)
        y = sample_exceptional(domain, N, samples, rng)
        k = domain.position(N)

        def quotient(f: TestFunction, pts: np.ndarray) -> np.ndarray:
            norm = f.norm if f.norm else 1.0
            denom = domain.phi.phi(np.abs(pts)) * np.abs(pts) ** t * norm
            return np.abs(f.taylor_remainder(0.0, pts, t)) / denom

        best = 0.0
        acc = 0.0
        cnt = 0
        for f in corpus:
            q = quotient(f, y)
            best = max(best, float(np.max(q)))
            acc += float(np.sum(q))
            cnt += q.size

        ctrl_rim = ctrl_e = None
        if control:
            try:
                probe = random_testfn(domain, seed=seed + 7919 * N, host=N,
                                      min_host_radius=1e-9)
            except GenerationError:
                probe = None
            if probe is not None:
                th = rng.random(samples) * 2.0 * math.pi
                rim = (domain.a[k]
                       + (domain.r[k] + 0.05 * domain.s[k]) * np.exp(1j * th))
                ctrl_rim = float(np.max(quotient(probe, rim)))
                ctrl_e = float(np.max(quotient(probe, y)))
        rows.append(RemainderRow(N=N, max_ratio=best, mean_ratio=acc / cnt,
                                 control_rim=ctrl_rim, control_e=ctrl_e))
    return RemainderProfile(t=t, rows=tuple(rows))


def geometric_rule(scale: float = 0.25, decay: float = 1.0):
    """Radius rule r_n = scale 2^(-decay n); decay >= 1 keeps holes in
    their annuli for small scale."""
    if scale <= 0.0 or decay <= 0.0:
        raise ValueError("scale and decay must be positive")
    return lambda n: scale * 2.0 ** (-decay * np.asarray(n, dtype=float))


@dataclass(frozen=True)
class ObstructionReport:
    """Why no radius rule can pass both sub-critical requirements.

    With 0 < beta < alpha, the scaled series term obeys the exact
    algebraic bound sigma_n <= eps_n^((1+alpha)/2) 2^(-n (alpha - beta)),
    eps_n = 4^n r_n^2.  A vanishing density track therefore forces the
    series under a convergent geometric envelope: the two requirements
    cannot hold together.
    """

    alpha: float
    beta: float
    density_track: np.ndarray
    density_slope: float
    density_vanishes: bool
    series_partials: np.ndarray
    series_grows: bool
    domination_gap: float
    verdict: str


def obstruction_check(alpha: float, beta: float, rule, n_max: int = 80) -> ObstructionReport:
    """Evaluate one radius rule against both sub-critical requirements."""
    if not 0.0 < beta < alpha < 1.0:
        raise ValueError("need 0 < beta < alpha < 1")
    n = np.arange(1, n_max + 1)
    r = np.asarray(rule(n), dtype=float)
    if np.any(r <= 0.0) or np.any(np.diff(r) > 0.0):
        raise ValueError("radius rule must be positive and non-increasing")
    if np.any(r > 2.0 ** (-n)):
        raise ValueError("radius rule exceeds its annulus scale")

    lr = np.log(r.astype(np.longdouble))
    n_ld = n.astype(np.longdouble)
    log_eps = 2.0 * (n_ld * np.longdouble(LN2) + lr)
    log_sigma = n_ld * np.longdouble(LN2) * np.longdouble(1.0 + beta) \
        + np.longdouble(1.0 + alpha) * lr
    log_envelope = np.longdouble(0.5 * (1.0 + alpha)) * log_eps \
        - n_ld * np.longdouble(LN2) * np.longdouble(alpha - beta)
    gap = float(np.max(log_sigma - log_envelope))

    eps = np.exp(log_eps).astype(float)
    # least squares slope of log eps against n; negative means decay
    slope = float(np.polyfit(n.astype(float), np.log(np.maximum(eps, 1e-300)), 1)[0])
    q1 = max(np.max(eps[: max(1, n_max // 4)]), 1e-300)
    q4 = np.max(eps[-max(1, n_max // 4):])
    vanishes = slope < -1e-3 and q4 <= 1e-2 * q1

    partials = np.cumsum(np.exp(log_sigma).astype(float))
    total = float(partials[-1])
    half = float(partials[(len(partials) - 1) // 2])
    grows = total - half > 1e-3 * max(1.0, total)

    if vanishes and not grows:
        verdict = "series-converges"
    elif not vanishes:
        verdict = "density-fails"
    else:
        verdict = "incompatible-pair"
    return ObstructionReport(alpha=alpha, beta=beta, density_track=eps,
                             density_slope=slope, density_vanishes=vanishes,
                             series_partials=partials, series_grows=grows,
                             domination_gap=gap, verdict=verdict)


@dataclass(frozen=True)
class ObstructionSearch:
    trials: int
    counterexamples: int
    verdicts: dict


def obstruction_search(alpha: float, beta: float, n_max: int = 80,
                       trials: int = 1000, seed: int = 0) -> ObstructionSearch:
    """Randomized search for a rule beating both requirements at once.

    Random monotone radius sequences under the annulus cap; each is
    classified by obstruction_check.  The count of rules that jointly
    show vanishing density and a growing series must come out zero.
    """
    rng = np.random.default_rng(seed)
    n = np.arange(1, n_max + 1)
    counts: dict[str, int] = {}
    bad = 0
    for _ in range(trials):
        extra = rng.uniform(0.0, 2.0 * LN2, size=n_max)
        drift = rng.uniform(0.0, 0.5 * LN2)
        log_r = -n * LN2 - math.log(4.0) - np.cumsum(extra + drift)
        r = np.exp(log_r)
        rep = obstruction_check(alpha, beta, lambda m, rr=r: rr[np.asarray(m) - 1],
                                n_max=n_max)
        counts[rep.verdict] = counts.get(rep.verdict, 0) + 1
        if rep.density_vanishes and rep.series_grows:
            bad += 1
    return ObstructionSearch(trials=trials, counterexamples=bad, verdicts=counts)
