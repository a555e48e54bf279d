"""Experiment dispatcher: seeded replicates, parallel fan-out, deterministic reduction.

Replicate ``i`` of an experiment with master seed ``s`` draws its matrix
from ``replicate_seed(s, i)``; an experiment that needs a second ensemble
per replicate (a reference, or the second shell measure) uses
``replicate_seed(replicate_seed(s, i), 1)`` for it.  Each replicate returns
a flat row of statistics plus an optional payload (e.g. the eigenvalues
inside a window) that the reducer needs but that is too bulky for the
report.  Rows are always reduced in index order, so the result does not
depend on the number of workers.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .. import __version__
from ..ensembles import (
    ShellSpec,
    parse_dist,
    replicate_seed,
    sample_shell,
    make_rng,
)
from ..errors import ConfigurationError, RmtLabError
from ..laws import (
    ReferenceCdf,
    r_k_det,
    semicircle_cdf,
    tw2_cdf,
)
from ..oracles import chi_shell_probability
from ..spectra import conservation_error, eigenvalues, merge_pairs
from ..stats import (
    edge_measure,
    edge_measure_l1,
    ks_one_sample,
    ks_two_sample,
    normalize_bulk,
    pair_correlation,
    interval_probability,
    pearson,
    rescale_edge,
    trace_moment,
)
from .config import ExperimentConfig, grid_points
from .report import Report

__all__ = ["run_experiment", "spectrum_for", "MAX_ERROR_FRACTION", "CONSERVATION_TOL"]

log = logging.getLogger(__name__)

MAX_ERROR_FRACTION = 1e-3
CONSERVATION_TOL = 1e-10
PAIR_TOL = 1e-10
PLOT_POINTS = 201


def spectrum_for(dist: str, n: int, seed: int):
    """Sample one matrix from ``dist`` and return ``(spectrum, conservation_error)``.

    For ``gue`` the embedded ``2n`` spectrum is checked against the embedding
    and then collapsed to the ``n`` Hermitian eigenvalues.
    """
    ens = parse_dist(dist)
    m = ens.sample(n, seed)
    spec = eigenvalues(m)
    err = conservation_error(spec, m)
    if ens.name == "gue":
        spec = merge_pairs(spec, tol=PAIR_TOL)
    return spec, err


def _beta_of(dist: str):
    ens = parse_dist(dist)
    return ens.beta


def _second_seed(seed: int, index: int) -> int:
    return replicate_seed(replicate_seed(seed, index), 1)


def _check(name, value, threshold, relation):
    ok = {"<": value < threshold, "<=": value <= threshold, ">": value > threshold}[relation]
    return {"name": name, "value": value, "relation": relation, "threshold": threshold, "passed": bool(ok)}


def _ecdf_series(samples, reference, lo, hi, names):
    grid = np.linspace(lo, hi, PLOT_POINTS)
    cols = [grid]
    for s in samples:
        s = np.sort(np.asarray(s, dtype=float))
        cols.append(np.searchsorted(s, grid, side="right") / max(s.size, 1))
    if reference is not None:
        cols.append(np.asarray(reference(grid), dtype=float))
    return {"columns": list(names), "data": np.column_stack(cols).tolist()}


# ------------------------------------------------------------------ kinds
# each kind: replicate(cfg, index) -> (row, payload); reduce(cfg, rows, payloads) -> (summary, series)


def _semicircle_rep(cfg, i):
    seed = replicate_seed(cfg.seed, i)
    spec, err = spectrum_for(cfg.dist, cfg.n, seed)
    ks = ks_one_sample(spec.values, semicircle_cdf)
    row = {"seed": seed, "ks_d": ks.d, "lambda_min": float(spec.values[0]),
           "lambda_max": float(spec.values[-1]), "conservation_error": err}
    return row, spec.values


def _semicircle_reduce(cfg, rows, payloads):
    pooled = np.concatenate(payloads)
    ks = ks_one_sample(pooled, semicircle_cdf)
    checks = [_check("pooled_ks_d", ks.d, cfg.params["tol"], "<")]
    series = _ecdf_series([pooled], semicircle_cdf, -1.1, 1.1, ("t", "ecdf", "semicircle_cdf"))
    return {"ks": ks.as_dict(), "pooled_values": int(pooled.size)}, checks, series


def _bulk_rep(cfg, i):
    seed = replicate_seed(cfg.seed, i)
    k = cfg.params["k"]
    spec, err = spectrum_for(cfg.dist, cfg.n, seed)
    row = {"seed": seed, "eigenvalue": float(spec.values[k - 1]),
           "z": normalize_bulk(spec, k, cfg.n), "conservation_error": err}
    return row, None


def _bulk_reduce(cfg, rows, payloads):
    z = np.array([r["z"] for r in rows])
    ks = ks_one_sample(z, ReferenceCdf.of("std_normal"))
    summary = {"ks": ks.as_dict(), "z_mean": float(z.mean()), "z_std": float(z.std(ddof=1)),
               "reference": "std_normal"}
    checks = []
    # the Gaussian constants are for beta = 2 only; other ensembles are compared two-sample
    if _beta_of(cfg.dist) == 2:
        checks.append(_check("ks_d_vs_normal", ks.d, cfg.params["tol"], "<"))
    else:
        summary["note"] = "no parametric reference for this ensemble; use the universality kind"
    series = _ecdf_series([z], ReferenceCdf.of("std_normal"), -4, 4, ("z", "ecdf", "normal_cdf"))
    return summary, checks, series


def _universality_rep(cfg, i):
    k = cfg.params["k"]
    s1, s2 = replicate_seed(cfg.seed, i), _second_seed(cfg.seed, i)
    a, ea = spectrum_for(cfg.dist, cfg.n, s1)
    b, eb = spectrum_for(cfg.params["ref"], cfg.n, s2)
    row = {"seed": s1, "ref_seed": s2, "x": float(a.values[k - 1]), "x_ref": float(b.values[k - 1]),
           "conservation_error": max(ea, eb)}
    return row, None


def _universality_reduce(cfg, rows, payloads):
    p = cfg.params
    x = np.array([r["x"] for r in rows])
    y = np.array([r["x_ref"] for r in rows])
    ks = ks_two_sample(x, y)
    pa = interval_probability(x, p["b"], p["c"], cfg.n)
    pb = interval_probability(y, p["b"], p["c"], cfg.n)
    se = math.hypot(pa.stderr, pb.stderr)
    diff = abs(pa.probability - pb.probability)
    summary = {
        "ks_two_sample": ks.as_dict(),
        "interval": list(pa.bounds),
        "p_dist": pa.probability, "se_dist": pa.stderr,
        "p_ref": pb.probability, "se_ref": pb.stderr,
        "ref": str(parse_dist(p["ref"])),
    }
    checks = [_check("two_sample_p_value", ks.p_value, p["alpha"], ">")]
    if se > 0:
        checks.append(_check("interval_diff_in_se", diff / se, p["se_mult"], "<="))
    else:
        checks.append(_check("interval_diff", diff, 0.0, "<="))
    lo, hi = float(min(x.min(), y.min())), float(max(x.max(), y.max()))
    series = _ecdf_series([x, y], None, lo, hi, ("x", "ecdf_dist", "ecdf_ref"))
    return summary, checks, series


def _edge_rep(cfg, i):
    s1 = replicate_seed(cfg.seed, i)
    a, err = spectrum_for(cfg.dist, cfg.n, s1)
    row = {"seed": s1, "s": rescale_edge(a, cfg.n)}
    if cfg.params["ref"]:
        s2 = _second_seed(cfg.seed, i)
        b, eb = spectrum_for(cfg.params["ref"], cfg.n, s2)
        row.update({"ref_seed": s2, "s_ref": rescale_edge(b, cfg.n)})
        err = max(err, eb)
    row["conservation_error"] = err
    return row, None


def _edge_reduce(cfg, rows, payloads):
    p = cfg.params
    tw = ReferenceCdf.of("tracy_widom_2")
    s = np.array([r["s"] for r in rows])
    groups = [("dist", cfg.dist, s)]
    if p["ref"]:
        groups.append(("ref", p["ref"], np.array([r["s_ref"] for r in rows])))
    summary, checks = {}, []
    for label, dist, values in groups:
        ks = ks_one_sample(values, tw)
        summary[f"ks_tw2_{label}"] = ks.as_dict()
        summary[f"mean_{label}"] = float(values.mean())
        # Tracy-Widom F2 is the beta = 2 law; real symmetric ensembles are only compared two-sample
        if _beta_of(dist) == 2:
            checks.append(_check(f"ks_d_vs_tw2_{label}", ks.d, p["tol"], "<"))
    if p["ref"]:
        two = ks_two_sample(s, groups[1][2])
        summary["ks_two_sample"] = two.as_dict()
        summary["ref"] = str(parse_dist(p["ref"]))
        checks.append(_check("two_sample_p_value", two.p_value, p["alpha"], ">"))
    names = ["s"] + [f"ecdf_{g[0]}" for g in groups] + ["tw2_cdf"]
    series = _ecdf_series([g[2] for g in groups], tw, -6.0, 4.0, names)
    return summary, checks, series


def _edge_measure_rep(cfg, i):
    seed = replicate_seed(cfg.seed, i)
    spec, err = spectrum_for(cfg.dist, cfg.n, seed)
    r_n = cfg.n ** (-cfg.params["r_exp"])
    em = edge_measure(spec, r_n, (0.0, cfg.params["x_max"]))
    return {"seed": seed, "points": int(em.theta.size), "mass": em.total_mass,
            "conservation_error": err}, em


def _edge_measure_reduce(cfg, rows, payloads):
    edges, dens, ref, l1 = edge_measure_l1(payloads, cfg.params["bins"], cfg.params["x_max"])
    centers = 0.5 * (edges[1:] + edges[:-1])
    summary = {"l1": l1, "r_n": cfg.n ** (-cfg.params["r_exp"]), "bins": cfg.params["bins"],
               "mean_mass": float(np.mean([r["mass"] for r in rows]))}
    checks = [_check("l1_vs_edge_density", l1, cfg.params["tol"], "<")]
    series = {"columns": ["theta", "density", "reference"],
              "data": np.column_stack([centers, dens, ref]).tolist()}
    return summary, checks, series


def _moment_order(cfg):
    p = cfg.params["p"]
    if p:
        return p
    # 2 * floor(n^{1/3}), guarding against cube roots landing just below an integer
    return 2 * int(math.floor(cfg.n ** (1.0 / 3.0) + 1e-9))


def _trace_rep(cfg, i):
    seed = replicate_seed(cfg.seed, i)
    spec, err = spectrum_for(cfg.dist, cfg.n, seed)
    p = _moment_order(cfg)
    return {"seed": seed, "p": p, "statistic": trace_moment(spec, p), "conservation_error": err}, None


def _trace_reduce(cfg, rows, payloads):
    x = np.array([r["statistic"] for r in rows])
    target = cfg.params["target"]
    mean = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    rel = abs(mean - target) / target
    summary = {"p": _moment_order(cfg), "mean": mean, "stderr": se, "target": target,
               "relative_deviation": rel}
    checks = [_check("relative_deviation", rel, cfg.params["rel_tol"], "<=")]
    series = {"columns": ["replicate", "statistic", "target"],
              "data": [[i, float(v), target] for i, v in enumerate(x)]}
    return summary, checks, series


def _pair_rep(cfg, i):
    seed = replicate_seed(cfg.seed, i)
    spec, err = spectrum_for(cfg.dist, cfg.n, seed)
    w = cfg.params["half_width"]
    v = spec.values
    inside = v[(v >= -w) & (v <= w)]
    return {"seed": seed, "window_count": int(inside.size), "conservation_error": err}, inside


def _sine_r2(y):
    return np.array([r_k_det([0.0, float(t)], 2) for t in np.ravel(y)])


def _pair_reduce(cfg, rows, payloads):
    p = cfg.params
    est = pair_correlation(payloads, p["half_width"], p["bins"], p["y_max"], n=cfg.n)
    ref = _sine_r2(est.bin_centers)
    summary = {"bins": p["bins"], "flagged_bins": int(est.flagged.sum()),
               "mean_window_count": float(np.mean([r["window_count"] for r in rows])),
               "reference": "1 - (sin(pi y)/(pi y))^2"}
    checks = []
    if _beta_of(cfg.dist) == 2:
        dev = est.max_deviation(_sine_r2)
        summary["max_deviation"] = dev
        checks.append(_check("max_bin_deviation", dev, p["tol"], "<"))
    else:
        summary["note"] = "sine-kernel comparison only applies to beta = 2 ensembles"
    series = {"columns": ["y", "r2", "reference", "pairs", "stderr"],
              "data": np.column_stack([est.bin_centers, est.values, ref, est.counts, est.stderr]).tolist()}
    return summary, checks, series


def _gap_indices(cfg):
    n = cfg.n
    out = []
    for theta in cfg.params["thetas"]:
        gap = int(math.floor(n**theta + 1e-9))
        k1 = n // 2 - gap // 2
        out.append((theta, k1, k1 + gap))
    return out


def _gap_rep(cfg, i):
    seed = replicate_seed(cfg.seed, i)
    spec, err = spectrum_for(cfg.dist, cfg.n, seed)
    row = {"seed": seed}
    for k in sorted({k for _, a, b in _gap_indices(cfg) for k in (a, b)}):
        row[f"z_{k}"] = normalize_bulk(spec, k, cfg.n)
    row["conservation_error"] = err
    return row, None


def _gap_reduce(cfg, rows, payloads):
    p = cfg.params
    corr = []
    for theta, k1, k2 in _gap_indices(cfg):
        a = np.array([r[f"z_{k1}"] for r in rows])
        b = np.array([r[f"z_{k2}"] for r in rows])
        corr.append((theta, k1, k2, pearson(a, b)))
    summary = {"correlations": [{"theta": t, "k1": a, "k2": b, "correlation": c} for t, a, b, c in corr]}
    main = next(c for t, _, _, c in corr if t == p["theta"])
    target = 1.0 - p["theta"]
    checks = [_check("abs_error_vs_1_minus_theta", abs(main - target), p["tol"], "<=")]
    ordered = sorted(corr)
    steps = [ordered[j][3] - ordered[j + 1][3] for j in range(len(ordered) - 1)]
    if steps:
        checks.append(_check("min_decrease_across_theta", min(steps), 0.0, ">"))
    series = {"columns": ["theta", "correlation", "one_minus_theta"],
              "data": [[t, c, 1.0 - t] for t, _, _, c in ordered]}
    return summary, checks, series


def _shell(cfg):
    return ShellSpec(cfg.params["m2"], cfg.params["m1"])


def _prop_shell_rep(cfg, i):
    seed = replicate_seed(cfg.seed, i)
    d = cfg.n * (cfg.n + 1) // 2
    x = make_rng(seed).normal(0.0, 0.5, size=d)
    s = float(np.dot(x, x))
    return {"seed": seed, "sum_sq": s, "inside": int(_shell(cfg).contains(cfg.n, s))}, None


def _prop_shell_reduce(cfg, rows, payloads):
    hits = np.array([r["inside"] for r in rows], dtype=float)
    rate = float(hits.mean())
    exact = chi_shell_probability(cfg.n, _shell(cfg))
    se = math.sqrt(exact * (1.0 - exact) / hits.size)
    lo, hi = _shell(cfg).bounds(cfg.n)
    summary = {"acceptance_rate": rate, "chi_shell_probability": exact, "stderr": se,
               "shell": [lo, hi]}
    z = abs(rate - exact) / se if se > 0 else (0.0 if rate == exact else math.inf)
    checks = [_check("deviation_in_se", z, cfg.params["se_mult"], "<=")]
    series = {"columns": ["quantity", "value"],
              "data": [[0, rate], [1, exact]]}
    return summary, checks, series


def _median_index(cfg):
    return cfg.params["k"] or cfg.n // 2


def _prop_volume_rep(cfg, i):
    shell = _shell(cfg)
    s1, s2 = replicate_seed(cfg.seed, i), _second_seed(cfg.seed, i)
    k = _median_index(cfg)
    lo, hi = cfg.params["lo"], cfg.params["hi"]
    out = {}
    err = 0.0
    for label, mode, seed in (("gauss", "gaussian_conditioned", s1), ("unif", "uniform_volume", s2)):
        m = sample_shell(cfg.n, shell, mode, seed)
        spec = eigenvalues(m)
        err = max(err, conservation_error(spec, m))
        x = float(spec.values[k - 1])
        out[f"x_{label}"] = x
        out[f"hit_{label}"] = int(lo <= x <= hi)
    return {"seed": s1, "ref_seed": s2, **out, "conservation_error": err}, None


def _prop_volume_reduce(cfg, rows, payloads):
    m = len(rows)
    pg = float(np.mean([r["hit_gauss"] for r in rows]))
    pu = float(np.mean([r["hit_unif"] for r in rows]))
    sg, su = math.sqrt(pg * (1 - pg) / m), math.sqrt(pu * (1 - pu) / m)
    se = math.hypot(sg, su)
    lo, hi = _shell(cfg).bounds(cfg.n)
    summary = {"p_gaussian_conditioned": pg, "se_gaussian_conditioned": sg,
               "p_uniform_volume": pu, "se_uniform_volume": su, "combined_se": se,
               "k": _median_index(cfg), "shell": [lo, hi]}
    diff = abs(pg - pu)
    z = diff / se if se > 0 else (0.0 if diff == 0 else math.inf)
    checks = [_check("difference_in_combined_se", z, cfg.params["se_mult"], "<=")]
    series = {"columns": ["measure", "probability", "stderr"],
              "data": [[0, pg, sg], [1, pu, su]]}
    return summary, checks, series


KINDS = {
    "semicircle": (_semicircle_rep, _semicircle_reduce),
    "bulk-clt": (_bulk_rep, _bulk_reduce),
    "universality": (_universality_rep, _universality_reduce),
    "edge-tw": (_edge_rep, _edge_reduce),
    "edge-measure": (_edge_measure_rep, _edge_measure_reduce),
    "trace-moment": (_trace_rep, _trace_reduce),
    "pair-correlation": (_pair_rep, _pair_reduce),
    "gap-correlation": (_gap_rep, _gap_reduce),
    "prop-shell": (_prop_shell_rep, _prop_shell_reduce),
    "prop-volume-ratio": (_prop_volume_rep, _prop_volume_reduce),
}


def _run_one(cfg: ExperimentConfig, index: int):
    replicate, _ = KINDS[cfg.kind]
    try:
        row, payload = replicate(cfg, index)
    except (RmtLabError, ArithmeticError, ValueError) as exc:
        return {"index": index, "error": f"{type(exc).__name__}: {exc}"}, None
    return {"index": index, **row}, payload


def _run_chunk(cfg, indices):
    return [_run_one(cfg, i) for i in indices]


def _replicates(cfg: ExperimentConfig):
    if cfg.workers == 1 or cfg.reps == 1:
        return [_run_one(cfg, i) for i in range(cfg.reps)]
    size = max(1, math.ceil(cfg.reps / (cfg.workers * 4)))
    chunks = [range(lo, min(lo + size, cfg.reps)) for lo in range(0, cfg.reps, size)]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        parts = list(pool.map(_run_chunk, [cfg] * len(chunks), chunks))
    out = [item for part in parts for item in part]
    out.sort(key=lambda item: item[0]["index"])
    return out


def _tw_table(cfg):
    xs = grid_points(cfg.params["grid"])
    for x in xs:
        if not -10.0 <= x <= 8.0:
            raise ConfigurationError(f"tw-table grid must stay inside [-10, 8], got {x}")
    values = tw2_cdf(np.array(xs))
    rows = [{"index": i, "x": x, "F2": float(v)} for i, (x, v) in enumerate(zip(xs, values))]
    series = {"columns": ["x", "F2"], "data": [[r["x"], r["F2"]] for r in rows]}
    summary = {"points": len(rows)}
    return rows, summary, [], series


def run_experiment(config: ExperimentConfig) -> Report:
    """Run all replicates of ``config`` and reduce them into a :class:`Report`.

    Replicate failures (any library error) are recorded in their row; if more
    than 0.1% of replicates fail the report is marked as errored and no
    statistics are computed.
    """
    start = time.perf_counter()
    meta = {"config": config.echo(), "version": __version__}
    if config.kind == "tw-table":
        rows, summary, checks, series = _tw_table(config)
        return Report(meta, rows, {**summary, "checks": checks, "status": "ok"}, series,
                      wall_time=time.perf_counter() - start)

    results = _replicates(config)
    rows = [r for r, _ in results]
    errors = [r for r in rows if "error" in r]
    summary = {"replicates": len(rows), "errors": len(errors)}
    if len(errors) > MAX_ERROR_FRACTION * config.reps:
        log.error("%d of %d replicates failed; first: %s", len(errors), config.reps, errors[0]["error"])
        summary.update({"status": "error", "first_error": errors[0]["error"], "checks": []})
        return Report(meta, rows, summary, None, wall_time=time.perf_counter() - start)
    good = [(r, p) for r, p in results if "error" not in r]
    _, reduce = KINDS[config.kind]
    stats, checks, series = reduce(config, [r for r, _ in good], [p for _, p in good])
    cons = max(r.get("conservation_error", 0.0) for r, _ in good)
    summary["max_conservation_error"] = cons
    if any("conservation_error" in r for r, _ in good):
        checks.append(_check("max_conservation_error", cons, CONSERVATION_TOL, "<="))
    summary.update(stats)
    summary["checks"] = checks
    summary["status"] = "ok"
    log.info("%s: %s", config.kind, "pass" if all(c["passed"] for c in checks) else "FAIL")
    return Report(meta, rows, summary, series, wall_time=time.perf_counter() - start)

