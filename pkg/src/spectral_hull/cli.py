"""Command-line driver: build examples, hulls, resolutions and N-sweeps.

Exit codes: 0 success, 2 validation failure, 3 numerical failure.
SPECTRAL_HULL_THREADS caps sweep parallelism; output rows are sorted
before writing so concurrency never affects bytes.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bridge, hull as hull_mod, measure as measure_mod, resolution
from .errors import NumericalFailure, ValidationError
from .sampling import (
    PVMOracle,
    build_diff_sampling,
    build_pvm_sampling,
    build_shift_sampling,
)

METRIC_REGISTRY = (
    "isometry_defect",
    "intertwine_defect",
    "arc_measure_err",
    "g0_measure_err",
    "ft_rel_err",
    "plancherel_err",
    "pvm_defect",
    "xn_residual",
    "covering_number",
    "staircase_lp_err",
)

SHIFT_ARCS = ((0.0, 0.25), (1.0 / 3.0, 0.5), (0.9, 1.0))
DIFF_WINDOWS = ((-1.0, 1.0), (0.0, 2.0))

# dense projector algebra is cubic in the dimension; sweeps skip it beyond
PVM_DEFECT_MAX_DIM = 1200


@dataclass
class SweepConfig:
    example: str
    n_list: list
    epsilon: list = field(default_factory=lambda: [0.2])
    j0: int = 16
    seed: int = 7
    out_dir: str = "out"
    j_scale: int = 6
    dim: int = 4
    mesh: int = 0  # 0 -> same as dim

    def __post_init__(self):
        if self.example not in ("shift", "diff", "pvm-demo"):
            raise ValidationError(f"unknown example {self.example!r}")
        if not self.n_list:
            raise ValidationError("empty N list")


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    metric: str
    value: float

    def __post_init__(self):
        if self.metric not in METRIC_REGISTRY:
            raise ValidationError(f"metric {self.metric!r} not in registry")


def _thread_cap():
    raw = os.environ.get("SPECTRAL_HULL_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    return max(1, cap) if cap > 0 else 1


def _write_records(path, records):
    records = sorted(records, key=lambda r: (r.metric, r.n))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "metric", "value"])
        for rec in records:
            writer.writerow([rec.n, rec.metric, f"{rec.value:.17g}"])


def _seeded_unit_vectors(seed, n, dim, count=100):
    rng = np.random.default_rng([seed, n])
    vecs = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return vecs / np.linalg.norm(vecs, axis=1)[:, None]


def _isometry_intertwine(sampling, measure, seed, n):
    vecs = _seeded_unit_vectors(seed, n, sampling.dim)
    iso = 0.0
    itw = 0.0
    for x in vecs:
        u = measure_mod.embed(x, measure)
        norm_sq = measure_mod.kahan_sum(np.abs(x) ** 2)
        iso = max(iso, abs(u.norm_sq() - norm_sq))
        ax = sampling.apply_op(x)
        itw = max(itw, measure_mod.intertwining_defect(x, ax, sampling, measure))
    return iso, itw


def _pvm_defect(sampling, measure, seed):
    lam = sampling.eigenvalues
    lo, hi = float(lam.min()), float(lam.max())
    rng = np.random.default_rng([seed, 0x9A])
    worst = 0.0
    for _ in range(2):
        a1, b1 = np.sort(rng.uniform(lo - 0.5, hi + 0.5, size=2))
        a2, b2 = np.sort(rng.uniform(lo - 0.5, hi + 0.5, size=2))
        report = resolution.pvm_algebra_check(
            [(a1, b1)], [(a2, b2)], sampling, measure, seed=seed
        )
        worst = max(worst, max(report.values()))
    partition, values = resolution.eigenvalue_partition(sampling)
    synth = resolution.integrate_step_function(partition, values, sampling, measure)
    worst = max(worst, float(np.max(np.abs(synth.entries - sampling.operator.entries))))
    return worst


def _shift_records(n, cfg):
    if n < 3 or n % 2 == 0:
        raise ValidationError("N must be odd and >= 3")
    sampling, scale = build_shift_sampling(n)
    measure = measure_mod.atom_measure(sampling, scale)
    records = []
    iso, itw = _isometry_intertwine(sampling, measure, cfg.seed, n)
    records.append(ConvergenceRecord(n, "isometry_defect", iso))
    records.append(ConvergenceRecord(n, "intertwine_defect", itw))

    metric = hull_mod.pseudometric(sampling, scale, measure)
    mult = measure_mod.MultiplierFn.of_sampling(sampling)
    hull = hull_mod.build_hull(metric, measure, mult, epsilon=1.0 / n, j0=cfg.j0)
    charts = hull_mod.chart_circle(hull, scale)
    ts = np.array([c.coordinate for c in charts])
    arc_err = 0.0
    for a, b in SHIFT_ARCS:
        mass = measure_mod.kahan_sum(hull.weights[(ts >= a) & (ts < b)])
        arc_err = max(arc_err, abs(mass - (b - a)))
    records.append(ConvergenceRecord(n, "arc_measure_err", arc_err))
    records.append(ConvergenceRecord(
        n, "covering_number", float(hull_mod.covering_number(metric, cfg.epsilon[0]))))
    if sampling.dim <= PVM_DEFECT_MAX_DIM:
        records.append(ConvergenceRecord(
            n, "pvm_defect", _pvm_defect(sampling, measure, cfg.seed)))
    return records


def _diff_records(n, cfg):
    sampling, scale = build_diff_sampling(n, cfg.j_scale)
    measure = measure_mod.atom_measure(sampling, scale)
    records = []
    iso, itw = _isometry_intertwine(sampling, measure, cfg.seed, n)
    records.append(ConvergenceRecord(n, "isometry_defect", iso))
    records.append(ConvergenceRecord(n, "intertwine_defect", itw))

    freqs = bridge.atom_frequencies(sampling)
    g0_err = 0.0
    for a, b in DIFF_WINDOWS:
        mass = measure_mod.kahan_sum(measure.atoms[(freqs >= a) & (freqs < b)])
        g0_err = max(g0_err, abs(mass - bridge.g0_integral(a, b)))
    records.append(ConvergenceRecord(n, "g0_measure_err", g0_err))

    n1 = sampling.provenance["params"]["N1"]
    gauss = lambda x: (2.0 / np.pi) ** 0.25 * np.exp(-np.asarray(x) ** 2)
    h = bridge.GridFunction.from_function(gauss, n, window=n1)
    table = bridge.fourier_transform(h, sampling, scale, measure)
    sel = np.abs(table.omegas) <= 2.0
    ref = bridge.gaussian_reference(table.omegas[sel])
    ft_err = float(np.max(np.abs(table.f_values[sel] - ref) / ref))
    records.append(ConvergenceRecord(n, "ft_rel_err", ft_err))
    _, plan_rel = bridge.plancherel_check(h, sampling, scale, measure)
    records.append(ConvergenceRecord(n, "plancherel_err", plan_rel))
    records.append(ConvergenceRecord(
        n, "staircase_lp_err",
        bridge.staircase_lp_error(gauss, 2, n, n1)))

    metric = hull_mod.pseudometric(sampling, scale, measure)
    records.append(ConvergenceRecord(
        n, "covering_number", float(hull_mod.covering_number(metric, cfg.epsilon[0]))))
    if sampling.dim <= PVM_DEFECT_MAX_DIM:
        records.append(ConvergenceRecord(
            n, "pvm_defect", _pvm_defect(sampling, measure, cfg.seed)))
    return records


def build_demo_pvm(dim, mesh, probe_count=16):
    """Diagonal demo operator with eigenvalues (2i+1)/(2 dim) inside (0, 1)."""
    if dim < 1 or dim > 64:
        raise ValidationError("demo dimension must be within 1..64")
    mesh = mesh or dim
    eigvals = (2.0 * np.arange(dim) + 1.0) / (2.0 * dim)
    pvm = PVMOracle.from_eigensystem(eigvals)
    g = [np.ones(dim, dtype=np.complex128) / math.sqrt(dim)]
    return build_pvm_sampling(pvm, g, window=1.0, mesh=mesh, probe_count=probe_count)


def _pvm_demo_records(cfg):
    sampling, scale = build_demo_pvm(cfg.dim, cfg.mesh or cfg.dim)
    measure = measure_mod.atom_measure(sampling, scale)
    n_max = max(cfg.n_list)
    series = resolution.surjectivity_diagnostic(measure, scale, n_max, j0=cfg.j0)
    return [ConvergenceRecord(n, "xn_residual", float(series[n - 1])) for n in cfg.n_list]


def cmd_converge(cfg):
    os.makedirs(cfg.out_dir, exist_ok=True)
    if cfg.example == "pvm-demo":
        records = _pvm_demo_records(cfg)
    else:
        worker = _shift_records if cfg.example == "shift" else _diff_records
        with ThreadPoolExecutor(max_workers=_thread_cap()) as pool:
            chunks = list(pool.map(lambda n: worker(n, cfg), cfg.n_list))
        records = [rec for chunk in chunks for rec in chunk]
    path = os.path.join(cfg.out_dir, f"converge_{cfg.example}.csv")
    _write_records(path, records)
    return path


def cmd_shift(n, epsilon, out_dir, j0=16, seed=7):
    if n % 2 == 0:
        raise ValidationError("N must be odd")
    if n < 3:
        raise ValidationError("N must be >= 3")
    os.makedirs(out_dir, exist_ok=True)
    epsilon = epsilon if epsilon and epsilon > 0 else 1.0 / n
    sampling, scale = build_shift_sampling(n)
    measure = measure_mod.atom_measure(sampling, scale)
    mult = measure_mod.MultiplierFn.of_sampling(sampling)
    measure_mod.write_measure_csv(os.path.join(out_dir, "atoms.csv"), measure, mult)

    metric = hull_mod.pseudometric(sampling, scale, measure)
    hull = hull_mod.build_hull(metric, measure, mult, epsilon, j0=j0)
    charts = hull_mod.chart_circle(hull, scale)
    hull_mod.write_hull_json(os.path.join(out_dir, "hull.json"), hull, charts)
    hull_mod.write_hull_csv(os.path.join(out_dir, "hull.csv"), hull, charts)

    ts = np.array([c.coordinate for c in charts])
    with open(os.path.join(out_dir, "arcs.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "measure", "length", "abs_err"])
        for a, b in SHIFT_ARCS:
            mass = measure_mod.kahan_sum(hull.weights[(ts >= a) & (ts < b)])
            writer.writerow([f"{a:.17g}", f"{b:.17g}", f"{mass:.17g}",
                             f"{b - a:.17g}", f"{abs(mass - (b - a)):.17g}"])

    chart_defect = float(np.max(np.abs(
        np.cos(2.0 * np.pi * ts) - hull.multipliers)))
    l_max = min(3, (n - 1) // 2)
    summary = {
        "N": n,
        "epsilon": epsilon,
        "clusters": hull.n_clusters,
        "fourier_series_defect": bridge.fourier_series_check(
            sampling, measure, ls=range(-l_max, l_max + 1)),
        "multiplier_chart_defect": chart_defect,
        "pvm_defect": _pvm_defect(sampling, measure, seed),
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary


def cmd_diff(n, j, epsilon, out_dir, j0=16, seed=7):
    os.makedirs(out_dir, exist_ok=True)
    # the finite scale leaves exact coordinate ties between opposite
    # even-integer frequencies, so the discrete quotient needs an epsilon
    # below floating-point noise
    epsilon = epsilon if epsilon and epsilon > 0 else 1e-30
    sampling, scale = build_diff_sampling(n, j)
    measure = measure_mod.atom_measure(sampling, scale)
    mult = measure_mod.MultiplierFn.of_sampling(sampling)
    measure_mod.write_measure_csv(os.path.join(out_dir, "atoms.csv"), measure, mult)

    freqs = bridge.atom_frequencies(sampling)
    with open(os.path.join(out_dir, "g0_measure.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "measure", "integral", "abs_err"])
        for a, b in DIFF_WINDOWS:
            mass = measure_mod.kahan_sum(measure.atoms[(freqs >= a) & (freqs < b)])
            ref = bridge.g0_integral(a, b)
            writer.writerow([f"{a:.17g}", f"{b:.17g}", f"{mass:.17g}",
                             f"{ref:.17g}", f"{abs(mass - ref):.17g}"])

    metric = hull_mod.pseudometric(sampling, scale, measure)
    hull = hull_mod.build_hull(metric, measure, mult, epsilon, j0=min(j0, j))
    charts = hull_mod.chart_line(hull, sampling)
    hull_mod.write_hull_json(os.path.join(out_dir, "hull.json"), hull, charts)
    hull_mod.write_hull_csv(os.path.join(out_dir, "hull.csv"), hull, charts)
    omegas = np.array([c.coordinate for c in charts])
    sel = np.abs(omegas) <= 2.0
    chart_defect = float(np.max(
        np.abs(hull.multipliers[sel] - np.pi * omegas[sel])
        - np.pi**3 * np.abs(omegas[sel]) ** 3 / (6.0 * n * n)))

    n1 = sampling.provenance["params"]["N1"]
    gauss = lambda x: (2.0 / np.pi) ** 0.25 * np.exp(-np.asarray(x) ** 2)
    h = bridge.GridFunction.from_function(gauss, n, window=n1)
    table = bridge.fourier_transform(h, sampling, scale, measure)
    table.write_csv(os.path.join(out_dir, "transform.csv"))
    plan_exact, plan_rel = bridge.plancherel_check(h, sampling, scale, measure)
    hp = bridge.GridFunction.from_function(
        lambda x: -2.0 * np.asarray(x) * gauss(x), n, window=n1)
    diff_report = bridge.differentiation_check(h, hp, sampling, measure)

    summary = {
        "N": n,
        "J": j,
        "epsilon": epsilon,
        "total_measure": measure.total(),
        "eigenvalue_chart_excess": chart_defect,
        "plancherel_exact": plan_exact,
        "plancherel_quadrature_rel": plan_rel,
        "differentiation": diff_report,
        "pvm_defect": _pvm_defect(sampling, measure, seed) if sampling.dim <= PVM_DEFECT_MAX_DIM else None,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary


def cmd_pvm_demo(dim, mesh, out_dir, n_max=64, j0=16):
    os.makedirs(out_dir, exist_ok=True)
    sampling, scale = build_demo_pvm(dim, mesh)
    measure = measure_mod.atom_measure(sampling, scale)
    series = resolution.surjectivity_diagnostic(measure, scale, n_max, j0=j0)
    records = [ConvergenceRecord(n + 1, "xn_residual", float(v))
               for n, v in enumerate(series)]
    _write_records(os.path.join(out_dir, "xn_residual.csv"), records)
    worst = _pvm_defect(sampling, measure, seed=7)
    summary = {
        "dim": dim,
        "mesh": mesh or dim,
        "atoms": sampling.dim,
        "xn_residual_first": float(series[0]),
        "xn_residual_last": float(series[-1]),
        "one_projection_residual": resolution.one_projection_residual(measure, scale),
        "pvm_defect": worst,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary


def _parse_float_list(text):
    return [float(v) for v in str(text).split(",") if v != ""]


def _parse_int_list(text):
    return [int(v) for v in str(text).split(",") if v != ""]


def load_config(path, overrides):
    with open(path) as fh:
        raw = json.load(fh)
    raw.update({k: v for k, v in overrides.items() if v is not None})
    eps = raw.get("epsilon", [0.2])
    if isinstance(eps, (int, float)):
        eps = [float(eps)]
    return SweepConfig(
        example=raw["example"],
        n_list=[int(v) for v in raw["n_list"]],
        epsilon=[float(v) for v in eps],
        j0=int(raw.get("j0", 16)),
        seed=int(raw.get("seed", 7)),
        out_dir=str(raw.get("out_dir", "out")),
        j_scale=int(raw.get("j_scale", 6)),
        dim=int(raw.get("dim", 4)),
        mesh=int(raw.get("mesh", 0)),
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="spectral-hull")
    sub = parser.add_subparsers(dest="command", required=True)

    p_shift = sub.add_parser("shift", help="shift-operator example reports")
    p_shift.add_argument("--n", type=int, required=True)
    p_shift.add_argument("--epsilon", type=float, default=0.0)
    p_shift.add_argument("--j0", type=int, default=16)
    p_shift.add_argument("--seed", type=int, default=7)
    p_shift.add_argument("--out-dir", default="out")

    p_diff = sub.add_parser("diff", help="derivative-operator example reports")
    p_diff.add_argument("--n", type=int, required=True)
    p_diff.add_argument("--j", type=int, default=6)
    p_diff.add_argument("--epsilon", type=float, default=0.0)
    p_diff.add_argument("--j0", type=int, default=16)
    p_diff.add_argument("--seed", type=int, default=7)
    p_diff.add_argument("--out-dir", default="out")

    p_conv = sub.add_parser("converge", help="N-sweep convergence CSV")
    p_conv.add_argument("--config", default=None)
    p_conv.add_argument("--example", default=None)
    p_conv.add_argument("--n-list", default=None)
    p_conv.add_argument("--epsilon", default=None)
    p_conv.add_argument("--j0", type=int, default=None)
    p_conv.add_argument("--seed", type=int, default=None)
    p_conv.add_argument("--out-dir", default=None)
    p_conv.add_argument("--j-scale", type=int, default=None)

    p_demo = sub.add_parser("pvm-demo", help="PVM surjectivity diagnostic")
    p_demo.add_argument("--dim", type=int, default=4)
    p_demo.add_argument("--mesh", type=int, default=0)
    p_demo.add_argument("--n-max", type=int, default=64)
    p_demo.add_argument("--out-dir", default="out")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "shift":
            cmd_shift(args.n, args.epsilon, args.out_dir, j0=args.j0, seed=args.seed)
        elif args.command == "diff":
            cmd_diff(args.n, args.j, args.epsilon, args.out_dir,
                     j0=args.j0, seed=args.seed)
        elif args.command == "converge":
            overrides = {
                "example": args.example,
                "n_list": _parse_int_list(args.n_list) if args.n_list else None,
                "epsilon": _parse_float_list(args.epsilon) if args.epsilon else None,
                "j0": args.j0,
                "seed": args.seed,
                "out_dir": args.out_dir,
                "j_scale": args.j_scale,
            }
            if args.config:
                cfg = load_config(args.config, overrides)
            else:
                required = {k: v for k, v in overrides.items() if k in ("example", "n_list")}
                if None in required.values():
                    raise ValidationError("converge needs --config or --example with --n-list")
                cfg = SweepConfig(**{k: v for k, v in overrides.items() if v is not None})
            cmd_converge(cfg)
        elif args.command == "pvm-demo":
            cmd_pvm_demo(args.dim, args.mesh, args.out_dir, n_max=args.n_max)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
