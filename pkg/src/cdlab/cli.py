"""Batch experiment runner.

    cdlab run --config cfg.json [--out DIR] [--jobs K]
    cdlab list-experiments
    cdlab identities [--filter MODULE]

Exit status: 0 pass, 1 experiment fail, 2 config error.  Outputs are
bit-stable for a fixed config (floats printed with 17 significant digits).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import canonical, measures, oprl, opuc
from .config import EXPERIMENTS, ConfigError, load_config
from .identities import run_identities
from .limit_kernels import build_limit_kernel, sine_kernel
from .measures import RegVarFn, gallery, local_scaling
from .universality import (
    SchrodingerSource,
    complex_grid_pairs,
    convergence_study,
    real_grid_pairs,
    sparse_jacobi,
    zero_study,
)

_EXPERIMENT_HELP = {
    "bulk": "rescaled CD kernels of a gallery measure vs the sine kernel",
    "hard_edge": "zero ratio law at a hard edge vs squared Bessel-zero ratios",
    "fisher_hartwig": "even power-weight zero laws (even/odd degree Bessel ratios)",
    "jump": "jump-weight rescaled kernels vs the two-sided limit kernel",
    "opuc_bulk": "circle CD kernels (free coefficients) vs the sine kernel",
    "sparse": "sparse decaying Jacobi matrix: diagnostics and sine-kernel limit",
    "canonical_identities": "canonical-system identity suite only",
    "schrodinger": "free Schrodinger kernels: two-form agreement and bulk limit",
    "identities": "every exact-identity suite across all modules",
}


def _fmt(x):
    return f"{x:.17g}"


def _write_kernel_csv(path, samples):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("re_z,im_z,re_w,im_w,re_K,im_K\n")
        for s in samples:
            fh.write(",".join(_fmt(v) for v in (
                s.z.real, s.z.imag, s.w.real, s.w.imag,
                s.value.real, s.value.imag)) + "\n")


def _write_zeros_csv(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("n,k,zero,scaled_zero\n")
        for n, k, zero, scaled in rows:
            fh.write(f"{n},{k},{_fmt(zero)},{_fmt(scaled)}\n")


def _emit(report_lines, passed, out_dir, data):
    os.makedirs(out_dir, exist_ok=True)
    payload = {"passed": bool(passed), "lines": report_lines, "data": data}
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for line in report_lines:
        print(line)
    return 0 if passed else 1


def _estimated_scaling(mu, xi, pinned, default_beta=None):
    """Scaling function h for the rescaled kernels of the measure.

    Pins: scaling.eta (bulk, h(t) = eta t) or scaling.beta with unit scale.
    Otherwise local_scaling estimates (beta, sigma+-); the sigma estimates are
    divided by the total mass because the kernels downstream belong to the
    probability-normalized measure.  h is the asymptotic inverse of
    g(r) = (2/(sigma- + sigma+)) r^beta, which makes the summed one-sided
    limits of the normalized measure equal 2.
    """
    if "eta" in pinned:
        return RegVarFn(scale=float(pinned["eta"]), index=1.0), {"eta": pinned["eta"]}
    if "beta" in pinned:
        beta = float(pinned["beta"])
        scale = float(pinned.get("scale", 1.0))
        return RegVarFn(scale=scale, index=1.0 / beta), {"beta": beta, "scale": scale}
    r_grid = np.logspace(0.7, 4.2, 36)
    est = local_scaling(mu, xi, r_grid)
    total = mu.total_mass
    sig = (est.sigma_minus_hat + est.sigma_plus_hat) / total
    beta = est.beta_hat if default_beta is None else default_beta
    g = RegVarFn(scale=2.0 / sig, index=beta)
    h = measures.asymptotic_inverse(g)
    return h, {
        "beta_hat": est.beta_hat,
        "sigma_minus_hat": est.sigma_minus_hat / total,
        "sigma_plus_hat": est.sigma_plus_hat / total,
        "fit_residual": est.fit_residual,
    }


def _samples_rows(report, cfg, out_dir, prefix="kernel"):
    for idx, samples in report.extras.get("samples_by_index", {}).items():
        tag = str(idx).replace(".", "_")
        _write_kernel_csv(os.path.join(out_dir, f"{prefix}_{tag}.csv"), samples)


def _run_bulk(cfg, out_dir):
    mu = gallery(cfg.measure["name"], **cfg.measure.get("params", {}))
    h, scl = _estimated_scaling(mu, cfg.xi, cfg.scaling)
    n_top = int(max(cfg.n_values))
    rec = oprl.stieltjes_coeffs(mu, n_top + 1)
    grid = real_grid_pairs(cfg.grid.half_width, cfg.grid.points_per_axis)
    fit_grid = complex_grid_pairs(min(cfg.grid.half_width, 1.0), 3)
    report = convergence_study(rec, cfg.xi, h, sine_kernel,
                               [int(n) for n in cfg.n_values], grid,
                               cfg.tolerance, fit_grid=fit_grid,
                               target_name="sine kernel")
    nev = oprl.nevai_ratio(rec, cfg.xi, n_top)
    nev_ok = abs(nev - 1.0) <= cfg.tolerance
    passed = report.passed and nev_ok
    lines = [
        f"[{'PASS' if report.passed else 'FAIL'}] bulk: rescaled CD kernel -> sine "
        f"kernel; sup errors {['%.4f' % e for e in report.sup_errors]} "
        f"at n = {report.indices}, tol {cfg.tolerance}",
        f"[{'PASS' if nev_ok else 'FAIL'}] bulk: K(n+1,xi,xi)/K(n,xi,xi) -> 1 "
        f"(subexponential growth); ratio - 1 = {nev - 1.0:.3e} at n = {n_top}",
        f"[INFO] fitted internal scale c = {report.fitted_scale:.6f} "
        f"(candidates: 1, pi, 1/Gamma(2)); residual {report.fitted_scale_residual:.3e}",
        f"[INFO] scaling data: {scl}",
    ]
    _samples_rows(report, cfg, out_dir)
    data = {
        "sup_errors": report.sup_errors,
        "indices": report.indices,
        "fitted_scale": report.fitted_scale,
        "nevai_ratio": nev,
        "scaling": scl,
    }
    return lines, passed, data


def _run_opuc_bulk(cfg, out_dir):
    n_top = int(max(cfg.n_values))
    name = cfg.measure.get("name", "circle_lebesgue") if cfg.measure else "circle_lebesgue"
    if name == "circle_lebesgue":
        v = opuc.VerblunskyCoeffs.free(n_top)
    else:
        mu = gallery(name, **cfg.measure.get("params", {}))
        v = opuc.verblunsky_from_measure(mu, n_top)
    h = RegVarFn(scale=1.0 / (2.0 * math.pi), index=1.0)
    grid = real_grid_pairs(cfg.grid.half_width, cfg.grid.points_per_axis)
    fit_grid = complex_grid_pairs(min(cfg.grid.half_width, 1.0), 3)
    report = convergence_study(v, cfg.xi, h, sine_kernel,
                               [int(n) for n in cfg.n_values], grid,
                               cfg.tolerance, fit_grid=fit_grid,
                               target_name="sine kernel")
    # internal scale against the printed two-sided kernel at sigma = 1, beta = 1
    spec = build_limit_kernel(1.0, 1.0, 1.0)
    from .limit_kernels import fit_internal_scale
    from .opuc import rescaled_cd_circle
    fit_samples = rescaled_cd_circle(v, cfg.xi, h, n_top, fit_grid)
    fit = fit_internal_scale(fit_samples, spec)
    c_ok = abs(fit.c - math.pi) <= 1e-3
    passed = report.passed and c_ok
    lines = [
        f"[{'PASS' if report.passed else 'FAIL'}] opuc_bulk: rotated rescaled circle "
        f"CD kernel -> sine kernel; sup errors {['%.5f' % e for e in report.sup_errors]} "
        f"at n = {report.indices}, tol {cfg.tolerance}",
        f"[{'PASS' if c_ok else 'FAIL'}] opuc_bulk: internal scale of the printed "
        f"two-sided kernel: fitted c = {fit.c:.9f}, |c - pi| = {abs(fit.c - math.pi):.2e}",
    ]
    _samples_rows(report, cfg, out_dir)
    data = {"sup_errors": report.sup_errors, "indices": report.indices,
            "fitted_c_vs_printed_kernel": fit.c}
    return lines, passed, data


def _zeros_rows(zr):
    raw = zr.extras.get("raw_zeros", {})
    rows = []
    for (n, k), val in sorted(zr.scaled_zeros.items()):
        rows.append((n, k, raw.get((n, k), math.nan), val))
    return rows


def _run_hard_edge(cfg, out_dir):
    params = dict(cfg.measure.get("params", {}))
    betas = cfg.params.get("betas", [params.get("beta", 1.5)])
    lines, data, passed = [], {}, True
    for beta in betas:
        mu = gallery("power_hard_edge", beta=beta)
        h = RegVarFn(scale=1.0, index=1.0 / beta)  # g(r) = r^beta exactly here
        n_top = int(max(cfg.n_values))
        rec = oprl.stieltjes_coeffs(mu, n_top)
        zr = zero_study(rec, cfg.xi, h, "hard_edge",
                        [int(n) for n in cfg.n_values], cfg.k_max)
        ok = zr.max_rel_error_ratios <= cfg.tolerance
        passed = passed and ok
        ex = zr.extras
        cand = ex["candidate_constants"]
        meas_c = ex["first_zero_constant"]
        verdicts = {k: f"{abs(meas_c / v - 1.0):.2%} off" for k, v in cand.items()}
        lines += [
            f"[{'PASS' if ok else 'FAIL'}] hard_edge beta={beta}: zero ratio law "
            f"xi_k/xi_1 -> (j_(beta-1,k)/j_(beta-1,1))^2; max rel err "
            f"{zr.max_rel_error_ratios:.4f} at n = {max(zr.n_values)}, tol {cfg.tolerance}",
            f"[INFO] hard_edge beta={beta}: measured scaling exponent of h(K) = "
            f"{ex['exponent']:.4f} +- {ex['exponent_band95']:.4f} (95% band)",
            f"[INFO] hard_edge beta={beta}: first-zero constant {meas_c:.6f}; "
            f"candidate verdicts {verdicts}",
        ]
        data[f"beta={beta}"] = {
            "max_rel_error_ratios": zr.max_rel_error_ratios,
            "exponent": ex["exponent"],
            "exponent_band95": ex["exponent_band95"],
            "first_zero_constant": meas_c,
            "candidates": cand,
        }
        _write_zeros_csv(os.path.join(out_dir, f"zeros_beta_{beta}.csv"), _zeros_rows(zr))
    return lines, passed, data


def _run_fisher_hartwig(cfg, out_dir):
    params = dict(cfg.measure.get("params", {}))
    betas = cfg.params.get("betas", [params.get("beta", 1.5)])
    lines, data, passed = [], {}, True
    for beta in betas:
        mu = gallery("even_fh", beta=beta)
        # nu([0,1/r)) = r^-beta/2, so g(r) = 2 r^beta
        h = measures.asymptotic_inverse(RegVarFn(scale=2.0, index=beta))
        n_top = int(max(cfg.n_values))
        rec = oprl.stieltjes_coeffs(mu, 2 * n_top + 1)
        zr = zero_study(rec, cfg.xi, h, "even_fh",
                        [int(n) for n in cfg.n_values], cfg.k_max)
        odd_zero = max(zr.extras["odd_zero_at_origin"].values())
        ok = zr.max_rel_error_ratios <= cfg.tolerance and odd_zero <= 1e-12
        passed = passed and ok
        lines += [
            f"[{'PASS' if ok else 'FAIL'}] fisher_hartwig beta={beta}: even/odd-degree "
            f"scaled-zero ratios -> Bessel-zero ratios (orders beta/2-1, beta/2); "
            f"max rel err {zr.max_rel_error_ratios:.4f}, tol {cfg.tolerance}; "
            f"odd-degree zero at origin within {odd_zero:.1e}",
        ]
        data[f"beta={beta}"] = {
            "max_rel_error_ratios": zr.max_rel_error_ratios,
            "odd_zero_at_origin": odd_zero,
        }
        _write_zeros_csv(os.path.join(out_dir, f"zeros_beta_{beta}.csv"), _zeros_rows(zr))
    return lines, passed, data


def _run_jump(cfg, out_dir):
    mu = gallery(cfg.measure["name"], **cfg.measure.get("params", {}))
    total = mu.total_mass
    est = local_scaling(mu, cfg.xi, np.logspace(0.7, 4.2, 36))
    sm, sp = est.sigma_minus_hat / total, est.sigma_plus_hat / total
    spec = build_limit_kernel(sm, sp, 1.0)
    h = RegVarFn(scale=1.0, index=1.0)
    n_top = int(max(cfg.n_values))
    rec = oprl.stieltjes_coeffs(mu, n_top + 1)
    grid = real_grid_pairs(cfg.grid.half_width, cfg.grid.points_per_axis)
    fit_grid = complex_grid_pairs(min(cfg.grid.half_width, 1.0), 3)
    report = convergence_study(rec, cfg.xi, h, spec,
                               [int(n) for n in cfg.n_values], grid,
                               cfg.tolerance, fit_grid=fit_grid,
                               target_name=f"two-sided limit kernel ({sm:.3f},{sp:.3f},1)")
    lines = [
        f"[{'PASS' if report.passed else 'FAIL'}] jump: rescaled CD kernel -> "
        f"two-sided limit kernel with jump data sigma-={sm:.4f}, sigma+={sp:.4f}; "
        f"sup errors {['%.4f' % e for e in report.sup_errors]}, tol {cfg.tolerance}",
        f"[INFO] fitted internal scale c = {report.fitted_scale:.6f} "
        f"(candidates: 1, pi^(1/beta)={math.pi:.4f}, 1/Gamma(2)=1)",
    ]
    _samples_rows(report, cfg, out_dir)
    data = {"sup_errors": report.sup_errors, "fitted_scale": report.fitted_scale,
            "sigma_minus": sm, "sigma_plus": sp}
    return lines, report.passed, data


def _run_sparse(cfg, out_dir):
    p = cfg.params
    exponent = float(p.get("v_exponent", -0.5))
    ratio = float(p.get("ratio", 4.0))
    first = float(p.get("first", 4.0))
    t_values = [int(t) for t in cfg.n_values]
    n_max = 2 * max(t_values)
    j_count = int(math.log(n_max, ratio)) + 2
    v_vals = (np.arange(1, j_count + 1, dtype=float)) ** exponent
    rec, diag = sparse_jacobi(v_vals, ("geometric", first, ratio), n_max)
    dat = diag.at(cfg.xi)
    block_ok = dat.block_deviation <= 1e-12
    t_top = max(t_values)
    k1 = oprl.kernel_diag(rec, t_top, cfg.xi)
    k2 = oprl.kernel_diag(rec, 2 * t_top, cfg.xi)
    ratio_k = k2 / k1
    ratio_ok = 1.9 <= ratio_k <= 2.1
    h = diag.scaling_inverse(cfg.xi)
    grid = real_grid_pairs(cfg.grid.half_width, cfg.grid.points_per_axis)
    fit_grid = complex_grid_pairs(min(cfg.grid.half_width, 1.0), 3)
    report = convergence_study(rec, cfg.xi, h, sine_kernel, t_values, grid,
                               cfg.tolerance, fit_grid=fit_grid,
                               target_name="sine kernel")
    passed = block_ok and ratio_ok and report.passed
    lines = [
        f"[{'PASS' if block_ok else 'FAIL'}] sparse: ||A_n||^2 constant between "
        f"sparse bumps; max in-block deviation {dat.block_deviation:.2e}",
        f"[{'PASS' if ratio_ok else 'FAIL'}] sparse: K(2t,xi,xi)/K(t,xi,xi) = "
        f"{ratio_k:.4f} in [1.9, 2.1] at t = {t_top} (regular variation, index 1)",
        f"[{'PASS' if report.passed else 'FAIL'}] sparse: rescaled CD kernel -> "
        f"sine kernel; sup errors {['%.4f' % e for e in report.sup_errors]} "
        f"at t = {report.indices}, tol {cfg.tolerance}",
    ]
    _samples_rows(report, cfg, out_dir)
    data = {"block_deviation": dat.block_deviation, "k_ratio": ratio_k,
            "sup_errors": report.sup_errors}
    return lines, passed, data


def _run_schrodinger(cfg, out_dir):
    src = SchrodingerSource(v_fn=lambda y: 0.0, beta_bc=0.0)
    val = canonical.schrodinger_kernel(src.v_fn, src.beta_bc, 5.0,
                                       1.0 + 0.2j, 2.0, tol=1e-10)
    agree = abs(val.quadrature - val.wronskian) / (1.0 + abs(val.quadrature))
    agree_ok = agree <= 1e-8
    xi = float(cfg.params.get("xi", 1.0))
    eta = math.sqrt(xi) / math.pi
    h = RegVarFn(scale=eta, index=1.0)
    grid = real_grid_pairs(cfg.grid.half_width, cfg.grid.points_per_axis)
    fit_grid = complex_grid_pairs(min(cfg.grid.half_width, 1.0), 3)
    report = convergence_study(src, xi, h, sine_kernel,
                               [float(x) for x in cfg.n_values], grid,
                               cfg.tolerance, fit_grid=fit_grid,
                               target_name="sine kernel")
    passed = agree_ok and report.passed
    lines = [
        f"[{'PASS' if agree_ok else 'FAIL'}] schrodinger: quadrature form = "
        f"Wronskian form of the eigensolution kernel at x=5 (rel diff {agree:.2e})",
        f"[{'PASS' if report.passed else 'FAIL'}] schrodinger: free-potential "
        f"rescaled kernel at xi={xi} -> sine kernel; sup errors "
        f"{['%.4f' % e for e in report.sup_errors]} at x = {report.indices}, "
        f"tol {cfg.tolerance}",
    ]
    _samples_rows(report, cfg, out_dir)
    data = {"two_form_rel_diff": agree, "sup_errors": report.sup_errors}
    return lines, passed, data


def _run_identity_suite(cfg, out_dir, module_filter=None):
    results = run_identities(module_filter=module_filter, seed=cfg.seed)
    lines = [r.line() for r in results]
    passed = all(r.passed for r in results)
    data = {f"{r.module}.{r.name}": {"error": r.error, "tol": r.tol, "passed": r.passed}
            for r in results}
    return lines, passed, data


def run_experiment(cfg):
    """Run one configured experiment; returns (lines, passed, data)."""
    out_dir = cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    if cfg.experiment == "bulk":
        return _run_bulk(cfg, out_dir)
    if cfg.experiment == "opuc_bulk":
        return _run_opuc_bulk(cfg, out_dir)
    if cfg.experiment == "hard_edge":
        return _run_hard_edge(cfg, out_dir)
    if cfg.experiment == "fisher_hartwig":
        return _run_fisher_hartwig(cfg, out_dir)
    if cfg.experiment == "jump":
        return _run_jump(cfg, out_dir)
    if cfg.experiment == "sparse":
        return _run_sparse(cfg, out_dir)
    if cfg.experiment == "schrodinger":
        return _run_schrodinger(cfg, out_dir)
    if cfg.experiment == "canonical_identities":
        return _run_identity_suite(cfg, out_dir, module_filter="canonical")
    if cfg.experiment == "identities":
        return _run_identity_suite(cfg, out_dir, module_filter=cfg.module_filter)
    raise ConfigError("experiment", f"unhandled experiment {cfg.experiment!r}")


def main(argv=None):
    parser = argparse.ArgumentParser(prog="cdlab", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    p_run = sub.add_parser("run", help="run a configured experiment")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="override output directory")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="reserved; evaluation is vectorized internally")
    sub.add_parser("list-experiments", help="list experiment names")
    p_id = sub.add_parser("identities", help="run the exact-identity suites")
    p_id.add_argument("--filter", default=None, help="restrict to one module")
    p_id.add_argument("--seed", type=int, default=20240811)

    args = parser.parse_args(argv)
    if args.command == "list-experiments":
        for name in EXPERIMENTS:
            print(f"{name:22s} {_EXPERIMENT_HELP[name]}")
        return 0
    if args.command == "identities":
        results = run_identities(module_filter=args.filter, seed=args.seed)
        for r in results:
            print(r.line())
        return 0 if results and all(r.passed for r in results) else 1
    if args.command == "run":
        try:
            cfg = load_config(args.config)
        except (ConfigError, OSError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        if args.out:
            cfg.output_dir = args.out
        try:
            lines, passed, data = run_experiment(cfg)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        return _emit(lines, passed, cfg.output_dir, data)
    parser.print_help()
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
