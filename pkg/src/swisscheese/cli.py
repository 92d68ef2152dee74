"""Command line front end.

Subcommands mirror the verification stages: build, series, density,
verify-a, appendix, melnikov, and all.  Each writes deterministic CSV and
SVG artifacts into the output directory, prints one PASS/FAIL line per
check, and exits 0 when every check passed, 1 when any failed, 2 on
usage or configuration problems.

Configuration is a flat key=value file; only ``alpha`` is required.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .admissible import AdmissibleFunction, check_admissible
from .conditions import (content_series, density_profile, dist_bounds_check,
                         empirical_remainder_ratios, geometric_rule,
                         obstruction_check, obstruction_search,
                         remainder_bound_terms)
from .content import DiskUnion
from .domain import (ConstructionError, SamplingError, annulus_of,
                     build_counterexample, validate_geometry)
from .svgplot import domain_figure, line_plot
from .testfn import (EstimationError, GenerationError, QuadratureError,
                     melnikov_ratio, random_testfn)


class ConfigError(ValueError):
    """Bad or missing configuration."""


@dataclass(frozen=True)
class RunConfig:
    alpha: float = math.nan
    phi_kind: str = "power"
    phi_exponent: float = 0.5
    t: int = 1
    mode: str = "dense"
    max_index: int = 60
    seed: int = 0
    out_dir: str = "out"
    series_threshold: float = 2.0
    series_invalid: str = "disk"
    mc_samples: int = 20000
    density_j_min: int = 0
    density_j_max: int = 12
    n_min: int = 5
    n_max: int = 20
    annulus_samples: int = 400
    corpus_size: int = 50
    pole_budget: int = 1
    lip_pairs: int = 100000
    appendix_beta: float = 0.25
    appendix_decay: float = 1.2
    appendix_n: int = 80
    appendix_trials: int = 300
    cover_level: int = 12
    melnikov_pairs: int = 20000

    def weight(self) -> AdmissibleFunction:
        if self.phi_kind == "power":
            return AdmissibleFunction.power(self.phi_exponent)
        if self.phi_kind == "log-quotient":
            return AdmissibleFunction.log_quotient()
        if self.phi_kind == "constant-one":
            return AdmissibleFunction.constant_one()
        raise ConfigError(f"unknown phi_kind {self.phi_kind!r}")

    def domain(self):
        try:
            return build_counterexample(self.alpha, self.weight(),
                                        self.max_index, self.mode)
        except ConstructionError as e:
            raise ConfigError(str(e)) from e


_INT_KEYS = {"t", "max_index", "seed", "mc_samples", "density_j_min",
             "density_j_max", "n_min", "n_max", "annulus_samples",
             "corpus_size", "pole_budget", "lip_pairs", "appendix_n",
             "appendix_trials", "cover_level", "melnikov_pairs"}
_FLOAT_KEYS = {"alpha", "phi_exponent", "series_threshold", "appendix_beta",
               "appendix_decay"}


def load_config(path: str) -> RunConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    known = {f.name for f in fields(RunConfig)}
    values: dict = {}
    for lineno, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(val)
            elif key in _FLOAT_KEYS:
                values[key] = float(val)
            else:
                values[key] = val
        except ValueError as e:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {val!r}") from e
    cfg = RunConfig(**values)
    if math.isnan(cfg.alpha):
        raise ConfigError(f"{path}: required key alpha is missing")
    if not 0.0 < cfg.alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {cfg.alpha}")
    if cfg.t not in (0, 1):
        raise ConfigError(f"t must be 0 or 1, got {cfg.t}")
    if cfg.mode not in ("dense", "subsequenced"):
        raise ConfigError(f"mode must be dense or subsequenced, got {cfg.mode!r}")
    if cfg.series_invalid not in ("disk", "clipped"):
        raise ConfigError(f"series_invalid must be disk or clipped")
    if not 0.0 < cfg.appendix_beta < cfg.alpha:
        raise ConfigError("appendix_beta must lie in (0, alpha)")
    return cfg


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    def cell(v):
        if isinstance(v, float):
            return repr(v)
        if isinstance(v, (np.floating,)):
            return repr(float(v))
        if isinstance(v, (np.integer,)):
            return int(v)
        return v

    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([cell(v) for v in row])


def _corpus(cfg: RunConfig, dom):
    fs = []
    for k in range(cfg.corpus_size):
        fs.append(random_testfn(dom, seed=cfg.seed + k,
                                pole_budget=cfg.pole_budget))
    return fs


def cmd_build(cfg: RunConfig, out: Path) -> list[Check]:
    dom = cfg.domain()
    rep = check_admissible(cfg.weight())
    geo = validate_geometry(dom)
    rows = [[h.n, h.a, h.r, h.s, int(h.inside_annulus), int(h.r_below_margin),
             int(h.fits_with_margin)] for h in geo.holes]
    _write_csv(out / "holes.csv",
               ["n", "a", "r", "s", "inside_annulus", "r_below_margin",
                "fits_with_margin"], rows)
    domain_figure(out / "domain.svg", dom)
    checks = [
        Check("admissible-weight", rep.admissible,
              f"kind={rep.kind} psi_ratio={rep.psi_ratio:.3g}"),
        Check("geometry-threshold", geo.n0 is not None,
              f"n0={geo.n0} failing={list(geo.failing)[:6]}"),
        Check("holes-built", len(dom) >= 1,
              f"holes={len(dom)} mode={dom.mode}"),
    ]
    if dom.selection is not None:
        checks.append(Check("subsequence-selection",
                            dom.selection.complete or not dom.selection.note,
                            dom.selection.note or
                            f"indices={dom.selection.indices[:8]}..."))
    return checks


def cmd_series(cfg: RunConfig, out: Path) -> list[Check]:
    dom = cfg.domain()
    rep = content_series(dom, threshold=cfg.series_threshold,
                         invalid_policy=cfg.series_invalid,
                         cover_level=cfg.cover_level)
    rows = [[int(n), t, p, lc, int(b)]
            for n, t, p, lc, b in zip(rep.indices, rep.terms, rep.partials,
                                      rep.lower_curve, rep.bracketed)]
    _write_csv(out / "series.csv",
               ["n", "term", "partial", "lower_curve", "bracketed"], rows)
    line_plot(out / "series.svg",
              [("partial sums", rep.indices, rep.partials),
               ("harmonic floor", rep.indices, rep.lower_curve)],
              title="scale series", xlabel="n", ylabel="sum")
    return [
        Check("series-domination", rep.dominated,
              f"min term*n={float(np.min(rep.terms * rep.indices)):.6g}"),
        Check("series-identity", rep.identity_gap <= 1e-12,
              f"gap={rep.identity_gap:.3g}"),
        Check("series-verdict", rep.verdict == "diverges-at-scale",
              f"verdict={rep.verdict} total={rep.partials[-1]:.4g} "
              f"threshold={rep.threshold}"),
    ]


def cmd_density(cfg: RunConfig, out: Path) -> list[Check]:
    dom = cfg.domain()
    geo = validate_geometry(dom)
    j_min = cfg.density_j_min
    if j_min <= 0:
        j_min = geo.n0 if geo.n0 is not None else 1
    if cfg.density_j_max < j_min:
        raise ConfigError("density_j_max below the starting index")
    prof = density_profile(dom, range(j_min, cfg.density_j_max + 1),
                           mc_samples=cfg.mc_samples, seed=cfg.seed)
    rows = [[r.j, r.exact, r.tail_bound, r.bound, int(r.certified),
             r.mc if r.mc is not None else "",
             r.mc_sigma if r.mc_sigma is not None else ""]
            for r in prof.rows]
    _write_csv(out / "density.csv",
               ["j", "exact", "tail_bound", "bound", "certified", "mc",
                "mc_sigma"], rows)
    js = [r.j for r in prof.rows]
    line_plot(out / "density.svg",
              [("exact", js, [r.exact for r in prof.rows]),
               ("cap", js, [r.bound for r in prof.rows])],
              title="complement density", xlabel="j", ylabel="log10 fraction",
              logy=True)
    checks = [Check("density-bound", prof.all_within,
                    f"rows={len(prof.rows)} from j={j_min}")]
    if cfg.mc_samples > 0:
        ok = all(r.mc <= r.exact + 3.0 * r.mc_sigma
                 and r.mc >= r.exact - r.tail_bound - 3.0 * r.mc_sigma
                 for r in prof.rows if r.certified)
        checks.append(Check("density-mc", ok,
                            f"samples={cfg.mc_samples} within 3 sigma"))
    return checks


def _n_values(cfg: RunConfig, dom) -> list[int]:
    geo = validate_geometry(dom)
    lo = max(cfg.n_min, geo.n0 or 1)
    hi = min(cfg.n_max, cfg.max_index)
    if hi < lo:
        raise ConfigError(f"n range [{cfg.n_min}, {cfg.n_max}] misses the "
                          f"valid indices (n0={geo.n0})")
    ns = [n for n in range(lo, hi + 1) if dom.has_hole(n)]
    return ns or [lo]


def cmd_verify_a(cfg: RunConfig, out: Path) -> list[Check]:
    dom = cfg.domain()
    ns = _n_values(cfg, dom)
    dist_rows = []
    dist_ok = True
    worst = math.inf
    for N in ns:
        chk = dist_bounds_check(dom, N, samples=cfg.annulus_samples,
                                seed=cfg.seed)
        dist_ok &= chk.ok
        worst = min(worst, chk.head_worst, chk.at_worst, chk.tail_worst)
        dist_rows.append([N, chk.samples, chk.head_violations,
                          chk.at_violations, chk.tail_violations,
                          chk.head_worst, chk.at_worst, chk.tail_worst])
    _write_csv(out / "distances.csv",
               ["N", "samples", "head_violations", "at_violations",
                "tail_violations", "head_worst", "at_worst", "tail_worst"],
               dist_rows)

    term_rows = []
    terms = []
    for N in ns:
        tr = remainder_bound_terms(dom, N)
        terms.append(tr)
        term_rows.append([N, tr.first_head, tr.first_peak, tr.first_tail,
                          tr.second_head, tr.second_peak, tr.second_tail])
    _write_csv(out / "remainder_terms.csv",
               ["N", "first_head", "first_peak", "first_tail", "second_head",
                "second_peak", "second_tail"], term_rows)
    finite = all(math.isfinite(v) and v > 0.0
                 for tr in terms
                 for v in (tr.first_head, tr.first_peak, tr.first_tail,
                           tr.second_head, tr.second_peak, tr.second_tail))

    corpus = _corpus(cfg, dom)
    prof = empirical_remainder_ratios(dom, corpus, ns,
                                      samples=cfg.annulus_samples,
                                      seed=cfg.seed, t=cfg.t)
    _write_csv(out / "remainder_ratios.csv",
               ["N", "max_ratio", "mean_ratio", "control_rim", "control_e"],
               [[r.N, r.max_ratio, r.mean_ratio,
                 r.control_rim if r.control_rim is not None else "",
                 r.control_e if r.control_e is not None else ""]
                for r in prof.rows])
    ctrl = [r for r in prof.rows if r.control_rim is not None]
    if ctrl:
        line_plot(out / "remainder_ratios.svg",
                  [("corpus max on E", [r.N for r in prof.rows],
                    [r.max_ratio for r in prof.rows]),
                   ("probe at rim", [r.N for r in ctrl],
                    [r.control_rim for r in ctrl]),
                   ("probe on E", [r.N for r in ctrl],
                    [r.control_e for r in ctrl])],
                  title="remainder quotients", xlabel="N",
                  ylabel="log10 ratio", logy=True)
    margin = all(r.margin_bites for r in ctrl) if ctrl else False
    return [
        Check("distance-floors", dist_ok,
              f"N={ns} worst ratio={worst:.3f}"),
        Check("remainder-terms-finite", finite, f"N={ns}"),
        Check("remainder-ratios-finite",
              math.isfinite(prof.overall_max) and prof.overall_max > 0.0,
              f"max={prof.overall_max:.4g}"),
        Check("remainder-margin-control", margin,
              f"rim probe exceeds E probe on {len(ctrl)} rows"),
    ]


def cmd_appendix(cfg: RunConfig, out: Path) -> list[Check]:
    rule = geometric_rule(0.25, cfg.appendix_decay)
    rep = obstruction_check(cfg.alpha, cfg.appendix_beta, rule,
                            n_max=cfg.appendix_n)
    rows = [[int(n + 1), rep.density_track[n], rep.series_partials[n]]
            for n in range(len(rep.density_track))]
    _write_csv(out / "appendix.csv", ["n", "density_track", "series_partial"],
               rows)
    search = obstruction_search(cfg.alpha, cfg.appendix_beta,
                                n_max=cfg.appendix_n,
                                trials=cfg.appendix_trials, seed=cfg.seed)
    return [
        Check("obstruction-verdict", rep.verdict != "incompatible-pair",
              f"verdict={rep.verdict} slope={rep.density_slope:.3f}"),
        Check("obstruction-domination", rep.domination_gap <= 1e-9,
              f"gap={rep.domination_gap:.3g}"),
        Check("obstruction-search", search.counterexamples == 0,
              f"trials={search.trials} verdicts={search.verdicts}"),
    ]


def cmd_melnikov(cfg: RunConfig, out: Path) -> list[Check]:
    dom = cfg.domain()
    corpus = _corpus(cfg, dom)
    rows = []
    ratios = []
    for k, f in enumerate(corpus):
        hosts = sorted({annulus_of(p) for p in f.pole_locations()})
        disks = []
        for n in hosts:
            kk = dom.position(int(n))
            disks.append((complex(dom.a[kk]), float(dom.r[kk])))
        target = DiskUnion(disks=tuple(disks), label=f"corpus[{k}]")
        rep = melnikov_ratio(f, target, cfg.alpha, pairs=cfg.melnikov_pairs,
                             seed=cfg.seed + k, cover_level=cfg.cover_level)
        ratios.append(rep.ratio)
        rows.append([k, f.label, rep.lhs, rep.content, rep.seminorm,
                     rep.ratio, int(rep.degenerate)])
    _write_csv(out / "melnikov.csv",
               ["index", "label", "lhs", "content", "seminorm", "ratio",
                "degenerate"], rows)
    finite = all(math.isfinite(r) for r in ratios)
    half = max(ratios[: max(1, len(ratios) // 2)])
    stable = max(ratios) <= 2.0 * half
    return [
        Check("melnikov-finite", finite, f"corpus={len(corpus)}"),
        Check("melnikov-stability", stable,
              f"max={max(ratios):.4g} half-max={half:.4g}"),
    ]


_COMMANDS = {
    "build": cmd_build,
    "series": cmd_series,
    "density": cmd_density,
    "verify-a": cmd_verify_a,
    "appendix": cmd_appendix,
    "melnikov": cmd_melnikov,
}


def _parse_args(argv):
    ap = argparse.ArgumentParser(
        prog="swisscheese",
        description="build swiss-cheese counterexample domains and verify "
                    "the quantitative estimates behind them")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in list(_COMMANDS) + ["all"]:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True,
                        help="flat key=value configuration file")
        sp.add_argument("--out", default=None,
                        help="output directory (default: out_dir from config)")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the configured seed")
        sp.add_argument("--samples", type=int, default=None,
                        help="override mc_samples and annulus_samples")
    return ap.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = _parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 2
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.samples is not None:
            cfg = replace(cfg, mc_samples=args.samples,
                          annulus_samples=args.samples)
        out = Path(args.out if args.out is not None else cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        names = list(_COMMANDS) if args.command == "all" else [args.command]
        checks: list[Check] = []
        for name in names:
            checks.extend(_COMMANDS[name](cfg, out))
    except (ConfigError, ConstructionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (SamplingError, EstimationError, GenerationError,
            QuadratureError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    failed = 0
    for c in checks:
        tag = "PASS" if c.ok else "FAIL"
        failed += 0 if c.ok else 1
        print(f"{tag} {c.name}: {c.detail}" if c.detail else f"{tag} {c.name}")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
