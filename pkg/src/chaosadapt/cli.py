"""
Command-line front end.

Every command is a pure function of its config file, flags and seeds, so
reruns produce byte-identical outputs. The config is a flat ``key = value``
file (``#`` starts a comment); flags override config values.

Exit codes: 0 success, 1 usage, 2 model failure, 3 numerical failure,
4 bound violated.
"""
from __future__ import annotations

import argparse
import logging
import shlex
import sys
from pathlib import Path

import numpy as np

from .active_subspace import (ConvergenceError, active_subspace, gradient_matrix, read_vector_csv, write_matrix_csv,
                              write_vector_csv)
from .adapt1d import (DEFAULT_ADAPTED_ORDER, DEFAULT_CDF_SAMPLES, DEFAULT_CDF_SEED, DEFAULT_RULE_LEVEL,
                      AdaptedExpansion, adapt_1d, adapted_eval, empirical_cdf, validate_scatter)
from .basis import total_degree_set
from .bounds import DEFAULT_MC_SAMPLES, truncation_bound
from .models import (RIDGE_A, RIDGE_B, RIDGE_C, RIDGE_W, ExternalModel, ModelEvaluationError, QuadraticModel,
                     evaluate_batch, read_bounds)
from .pce import DEFAULT_BINS, PCExpansion, histogram, project, sample, uniform_inputs
from .quadrature import cc_1d, smolyak

logger = logging.getLogger("chaosadapt")

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_NUMERIC, EXIT_BOUND = 0, 1, 2, 3, 4
CONSTANT_RTOL = 1e-12

CONFIG_DEFAULTS = {
    "model": "quadratic",
    "dimension": "10",
    "a": repr(RIDGE_A),
    "b": repr(RIDGE_B),
    "c": repr(RIDGE_C),
    "w": "",
    "w_seed": "0",
    "model_cmd": "",
    "bounds_file": "",
    "timeout": "",
    "workdir": "",
    "order": "2",
    "level": "2",
    "adapted_order": str(DEFAULT_ADAPTED_ORDER),
    "rule_level": str(DEFAULT_RULE_LEVEL),
    "cdf_samples": str(DEFAULT_CDF_SAMPLES),
    "cdf_seed": str(DEFAULT_CDF_SEED),
    "mc_samples": "",
    "seed": "0",
    "bins": str(DEFAULT_BINS),
    "clamp": "auto",
}

# flag dest -> config key
FLAG_KEYS = {
    "seed": "seed",
    "model_cmd": "model_cmd",
    "bounds_file": "bounds_file",
    "level": "level",
    "order": "order",
    "adapted_order": "adapted_order",
    "cdf_samples": "cdf_samples",
    "mc_samples": "mc_samples",
    "bins": "bins",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_config(path) -> dict:
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value
    return cfg


def resolve_config(args) -> dict:
    cfg = dict(CONFIG_DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    if getattr(args, "cdf_seed", None) is not None:
        cfg["cdf_seed"] = str(args.cdf_seed)
    for dest, key in FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            cfg[key] = str(value)
    return cfg


def _int(cfg, key, minimum=0) -> int:
    try:
        value = int(cfg[key])
    except ValueError:
        raise UsageError(f"{key} must be an integer, got {cfg[key]!r}") from None
    if value < minimum:
        raise UsageError(f"{key} must be >= {minimum}")
    return value


def build_model(cfg):
    kind = cfg["model"]
    d = _int(cfg, "dimension", 1)
    if kind == "quadratic":
        if cfg["w"]:
            w = np.array([float(v) for v in cfg["w"].split(",")])
            if w.size != d:
                raise UsageError(f"w has {w.size} entries, dimension is {d}")
            w = w / np.linalg.norm(w)
        elif d == RIDGE_W.size and cfg["w_seed"] == CONFIG_DEFAULTS["w_seed"]:
            w = RIDGE_W
        else:
            rng = np.random.Generator(np.random.PCG64(_int(cfg, "w_seed")))
            w = rng.standard_normal(d)
            w = w / np.linalg.norm(w)
        return QuadraticModel(float(cfg["a"]), float(cfg["b"]), float(cfg["c"]), w), d
    if kind == "external":
        if not cfg["model_cmd"]:
            raise UsageError("external model needs model_cmd (or --model-cmd)")
        bounds = read_bounds(cfg["bounds_file"]) if cfg["bounds_file"] else None
        if bounds is not None and bounds.shape[0] != d:
            raise UsageError(f"bounds file has {bounds.shape[0]} rows, dimension is {d}")
        timeout = float(cfg["timeout"]) if cfg["timeout"] else None
        return ExternalModel(shlex.split(cfg["model_cmd"]), cfg["workdir"] or None, timeout, bounds), d
    raise UsageError(f"unknown model {kind!r} (expected 'quadratic' or 'external')")


def _clamp(cfg) -> bool:
    value = cfg["clamp"].lower()
    if value == "auto":
        return cfg["model"] == "external"
    if value in ("true", "1", "yes"):
        return True
    if value in ("false", "0", "no"):
        return False
    raise UsageError(f"clamp must be auto, true or false, got {cfg['clamp']!r}")


def write_kv(path, pairs) -> None:
    rows = ["key,value"]
    for key, value in pairs:
        rows.append(f"{key},{value:.17g}" if isinstance(value, float) else f"{key},{value}")
    Path(path).write_text("\n".join(rows) + "\n")


def read_kv(path) -> dict:
    lines = Path(path).read_text().splitlines()
    return dict(line.split(",", 1) for line in lines[1:] if line.strip())


def _write_evaluations(path, X, y, extra=None) -> None:
    d = X.shape[1]
    cols, names = [X, y.reshape(-1, 1)], [f"xi_{i + 1}" for i in range(d)] + ["f"]
    if extra:
        cols = [np.column_stack([v for _, v in extra])] + cols
        names = [n for n, _ in extra] + names
    np.savetxt(Path(path), np.column_stack(cols), fmt="%.17g", delimiter=",", header=",".join(names), comments="")


def cmd_build(args) -> int:
    cfg = resolve_config(args)
    model, d = build_model(cfg)
    order, level = _int(cfg, "order"), _int(cfg, "level")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rule = smolyak(d, level)
    index_set = total_degree_set(d, order)
    values = evaluate_batch(model, rule.nodes)
    expansion = project(values, rule, index_set)
    rule.to_csv(out / "rule.csv")
    _write_evaluations(out / "evaluations.csv", rule.nodes, values)
    expansion.to_csv(out / "expansion.csv")
    write_kv(out / "build_summary.csv", [("dimension", d), ("order", order), ("level", level),
                                         ("n_terms", index_set.size), ("n_evaluations", len(rule))])
    print(f"N_Q = {index_set.size} coefficients; {len(rule)} model evaluations")
    return EXIT_OK


def cmd_active(args) -> int:
    try:
        expansion = PCExpansion.from_csv(args.expansion)
    except (ValueError, OSError) as exc:
        raise UsageError(f"malformed expansion file: {exc}") from exc
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    C = gradient_matrix(expansion)
    sub = active_subspace(expansion)
    write_matrix_csv(out / "gradient_matrix.csv", C)
    write_vector_csv(out / "eigenvalues.csv", sub.eigenvalues, "eigenvalue")
    write_matrix_csv(out / "rotation.csv", sub.rotation)
    write_vector_csv(out / "w.csv", sub.w, "w")
    # roundoff in the projection leaves O(eps) non-constant coefficients
    if sub.eigenvalues[0] <= (CONSTANT_RTOL * np.linalg.norm(expansion.coefficients)) ** 2:
        logger.warning("gradient matrix is zero to roundoff: the expansion is constant and has no active direction")
    ratio = sub.gap_ratio
    write_kv(out / "active_summary.csv", [("lambda_1", float(sub.eigenvalues[0])), ("ratio_lambda2_lambda1", ratio)])
    print(f"lambda_1 = {sub.eigenvalues[0]:.10g}; lambda_2/lambda_1 = {ratio:.3g}")
    return EXIT_OK


def cmd_adapt(args) -> int:
    cfg = resolve_config(args)
    model, d = build_model(cfg)
    w = read_vector_csv(args.w_file)
    if w.size != d:
        raise UsageError(f"w file has {w.size} entries, dimension is {d}")
    if abs(np.linalg.norm(w) - 1.0) > 1e-8:
        raise UsageError("w must be a unit vector")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cdf = empirical_cdf(w, _int(cfg, "cdf_samples", 2), _int(cfg, "cdf_seed"))
    rule = cc_1d(_int(cfg, "rule_level"))
    ad = adapt_1d(model, w, cdf, _int(cfg, "adapted_order"), rule, clamp=_clamp(cfg))
    ad.to_csv(out / "adapted.csv")
    rec = ad.record
    _write_evaluations(out / "adapt_evaluations.csv", rec.inputs, rec.values, [("zeta", rec.zeta), ("eta", rec.eta)])
    summary = [("n_evaluations", len(rec.values)), ("n_out_of_domain", rec.n_out_of_domain),
               ("clamped", int(rec.clamped))]
    build_summary = out / "build_summary.csv"
    if build_summary.exists():
        n_build = int(read_kv(build_summary)["n_evaluations"])
        summary += [("n_build_evaluations", n_build), ("n_total_evaluations", n_build + len(rec.values))]
    write_kv(out / "adapt_summary.csv", summary)
    msg = f"{len(rec.values)} model evaluations for the 1d expansion"
    if build_summary.exists():
        msg += f"; {n_build + len(rec.values)} in total"
    print(msg)
    return EXIT_OK


def _load_surrogate(path):
    if AdaptedExpansion.is_adapted_file(path):
        ad = AdaptedExpansion.from_csv(path)
        return ad.d, lambda X: adapted_eval(ad, X)
    pce = PCExpansion.from_csv(path)
    return pce.d, pce


def cmd_density(args) -> int:
    cfg = resolve_config(args)
    n = _int(cfg, "mc_samples", 1) if cfg["mc_samples"] else DEFAULT_MC_SAMPLES
    seed, bins = _int(cfg, "seed"), _int(cfg, "bins", 1)
    try:
        d, surrogate = _load_surrogate(args.surrogate)
    except (ValueError, OSError, KeyError) as exc:
        raise UsageError(f"malformed surrogate file: {exc}") from exc
    if isinstance(surrogate, PCExpansion):
        values = sample(surrogate, n, seed)
    else:
        values = surrogate(uniform_inputs(n, d, seed))
    centers, density = histogram(values, bins)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    np.savetxt(out / "density.csv", np.column_stack([centers, density]), fmt="%.17g", delimiter=",",
               header="bin_center,density", comments="")
    print(f"{n} samples, {len(centers)} bins")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = resolve_config(args)
    model, d = build_model(cfg)
    try:
        ad = AdaptedExpansion.from_csv(args.adapted)
    except (ValueError, OSError, KeyError) as exc:
        raise UsageError(f"malformed adapted expansion file: {exc}") from exc
    if ad.d != d:
        raise UsageError(f"adapted expansion has dimension {ad.d}, model has {d}")
    n = _int(cfg, "mc_samples", 1) if cfg["mc_samples"] else 1000
    result = validate_scatter(model, ad, n, _int(cfg, "seed"))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.to_csv(out / "scatter.csv")
    write_kv(out / "validate_summary.csv", [("n", n), ("rms", result.rms), ("relative_rms", result.relative_rms)])
    print(f"rms = {result.rms:.6g}; rms/std = {result.relative_rms:.6g}")
    return EXIT_OK


def cmd_bound(args) -> int:
    cfg = resolve_config(args)
    try:
        ref = PCExpansion.from_csv(args.reference)
        trunc = PCExpansion.from_csv(args.truncated)
    except (ValueError, OSError) as exc:
        raise UsageError(f"malformed expansion file: {exc}") from exc
    if ref.d != trunc.d:
        raise UsageError(f"dimension mismatch: reference d={ref.d}, truncated d={trunc.d}")
    if trunc.order > ref.order:
        raise UsageError("truncated expansion has higher order than the reference")
    n = _int(cfg, "mc_samples", 2) if cfg["mc_samples"] else DEFAULT_MC_SAMPLES
    report = truncation_bound(ref, trunc, n, _int(cfg, "seed"))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report.to_csv(out / "bound_report.csv")
    print(f"bound = {report.bound:.6g} (se {report.bound_se:.2g}); observed = {report.observed_norm:.6g}")
    return EXIT_OK if report.holds() else EXIT_BOUND


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chaosadapt", description="Legendre chaos basis adaptation on 1d active subspaces")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, config=True):
        p.add_argument("--out-dir", default=".", help="output directory (created if missing)")
        p.add_argument("--seed", type=int, help="seed for the command's Monte Carlo draws")
        if config:
            p.add_argument("--config", help="flat key = value config file")
            p.add_argument("--model-cmd", help="external simulator command, called as <cmd> <in.csv> <out.csv>")
            p.add_argument("--bounds-file", help="CSV 'lower,upper' per input dimension")

    p = sub.add_parser("build", help="sparse-grid evaluations and the projected chaos expansion")
    common(p)
    p.add_argument("--level", type=int)
    p.add_argument("--order", type=int)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("active", help="gradient matrix, eigenpairs and active direction of an expansion")
    common(p, config=False)
    p.add_argument("expansion")
    p.set_defaults(func=cmd_active)

    p = sub.add_parser("adapt", help="1d adapted expansion along a given direction")
    common(p)
    p.add_argument("--w-file", required=True, help="one-column CSV with the unit direction")
    p.add_argument("--adapted-order", type=int)
    p.add_argument("--cdf-samples", type=int)
    p.add_argument("--cdf-seed", type=int)
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("density", help="seeded histogram of a surrogate's output")
    common(p, config=False)
    p.add_argument("surrogate", help="expansion.csv or adapted.csv")
    p.add_argument("--mc-samples", type=int)
    p.add_argument("--bins", type=int)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("validate", help="scatter of model vs adapted surrogate")
    common(p)
    p.add_argument("adapted")
    p.add_argument("--mc-samples", type=int)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bound", help="truncation bound on the gradient matrix")
    common(p, config=False)
    p.add_argument("reference")
    p.add_argument("truncated")
    p.add_argument("--mc-samples", type=int)
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"chaosadapt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelEvaluationError as exc:
        print(f"chaosadapt: model failure: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (ConvergenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"chaosadapt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"chaosadapt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
