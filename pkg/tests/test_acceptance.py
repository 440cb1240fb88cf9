"""Acceptance criteria, one test per criterion at its stated tolerance.

Exact finite identities are asserted at 1e-10/1e-12; convergence claims
are asserted as decreasing sweeps at desk scale. Each test prints a
PASS line on success (FAIL raises).
"""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

import spectral_hull as sh
from spectral_hull.bridge import (
    GridFunction,
    fourier_series_check,
    fourier_transform,
    g0_integral,
    gaussian_reference,
    plancherel_check,
    staircase_lp_error,
)
from spectral_hull.hull import build_hull, chart_circle, chart_line, pseudometric
from spectral_hull.linalg import kahan_sum
from spectral_hull.measure import MultiplierFn, embed, intertwining_defect
from spectral_hull.resolution import (
    eigenvalue_partition,
    integrate_step_function,
    pvm_algebra_check,
    surjectivity_diagnostic,
)

from conftest import gauss


def report(name, detail):
    print(f"PASS {name}: {detail}")


@pytest.fixture(scope="module")
def shift4097():
    sampling, scale = sh.build_shift_sampling(4097)
    measure = sh.atom_measure(sampling, scale)
    metric = pseudometric(sampling, scale, measure)
    mult = MultiplierFn.of_sampling(sampling)
    hull = build_hull(metric, measure, mult, epsilon=1.0 / 4097, j0=16)
    charts = chart_circle(hull, scale)
    return sampling, scale, measure, hull, charts


def seeded_unit_vectors(seed, dim, count=100):
    rng = np.random.default_rng(seed)
    vecs = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return vecs / np.linalg.norm(vecs, axis=1)[:, None]


def test_exact_isometry_shift257(shift257):
    sampling, _, measure = shift257
    worst = 0.0
    for x in seeded_unit_vectors(2024, 257):
        defect = abs(embed(x, measure).norm_sq() - kahan_sum(np.abs(x) ** 2))
        worst = max(worst, defect)
    assert worst <= 1e-10
    report("exact isometry (shift N=257, 100 vectors)", f"max defect {worst:.3e}")


def test_exact_intertwining_shift257(shift257):
    sampling, _, measure = shift257
    worst = 0.0
    for x in seeded_unit_vectors(2025, 257):
        ax = sampling.apply_op(x)
        worst = max(worst, intertwining_defect(x, ax, sampling, measure))
    assert worst <= 1e-10
    report("exact intertwining (shift N=257)", f"max defect {worst:.3e}")


def test_uniform_circle_measure_4097(shift4097):
    _, _, _, hull, charts = shift4097
    ts = np.array([c.coordinate for c in charts])
    worst = 0.0
    for a, b in ((0.0, 0.25), (1.0 / 3.0, 0.5), (0.9, 1.0)):
        mass = kahan_sum(hull.weights[(ts >= a) & (ts < b)])
        worst = max(worst, abs(mass - (b - a)))
    assert worst <= 3.0 / 4097
    report("uniform circle measure (N=4097)",
           f"max arc defect {worst:.3e} <= {3.0 / 4097:.3e}")


def test_multiplier_chart_circle_4097(shift4097):
    _, _, _, hull, charts = shift4097
    ts = np.array([c.coordinate for c in charts])
    defect = float(np.max(np.abs(np.cos(2.0 * np.pi * ts) - hull.multipliers)))
    assert defect <= 1e-12
    report("multiplier chart on the circle", f"max |cos(2 pi t) - m| = {defect:.3e}")


def test_fourier_series_shift257(shift257):
    sampling, _, measure = shift257
    defect = fourier_series_check(sampling, measure, ls=range(-3, 4))
    assert defect <= 1e-10
    report("Fourier series (N=257, |l|<=3)", f"max defect {defect:.3e}")


def test_g0_density_sweep():
    errs = {window: [] for window in ((-1.0, 1.0), (0.0, 2.0))}
    for n in (12, 24, 48):
        sampling, scale = sh.build_diff_sampling(n, 6)
        measure = sh.atom_measure(sampling, scale)
        freqs = (np.arange(sampling.dim) - sampling.dim // 2) / n
        for a, b in errs:
            mass = kahan_sum(measure.atoms[(freqs >= a) & (freqs < b)])
            errs[(a, b)].append(abs(mass - g0_integral(a, b)))
    for window, seq in errs.items():
        assert seq[0] > seq[1] > seq[2], f"not decreasing on {window}: {seq}"
    assert errs[(-1.0, 1.0)][1] <= 0.05
    assert errs[(0.0, 2.0)][1] <= 0.05
    report("g0 density (N in 12,24,48)",
           f"N=24 defects {errs[(-1.0, 1.0)][1]:.2e}, {errs[(0.0, 2.0)][1]:.2e}")


def test_eigenvalue_chart_line_24(diff24):
    sampling, scale, measure = diff24
    metric = pseudometric(sampling, scale, measure)
    mult = MultiplierFn.of_sampling(sampling)
    hull = build_hull(metric, measure, mult, epsilon=1e-30, j0=6)
    charts = chart_line(hull, sampling)
    omegas = np.array([c.coordinate for c in charts])
    sel = np.abs(omegas) <= 2.0
    bound = np.pi**3 * np.abs(omegas[sel]) ** 3 / (6.0 * 24.0 * 24.0) + 1e-12
    excess = np.abs(hull.multipliers[sel] - np.pi * omegas[sel]) - bound
    assert float(excess.max()) <= 0.0
    report("eigenvalue chart on the line (N=24)",
           f"max excess over Taylor bound {float(excess.max()):.3e}")


def test_fourier_transform_recovery_24(diff24):
    sampling, scale, measure = diff24
    n1 = sampling.provenance["params"]["N1"]
    h = GridFunction.from_function(gauss, 24, window=n1)
    table = fourier_transform(h, sampling, scale, measure)
    sel = np.abs(table.omegas) <= 2.0
    ref = gaussian_reference(table.omegas[sel])
    rel = float(np.max(np.abs(table.f_values[sel] - ref) / ref))
    exact, quad = plancherel_check(h, sampling, scale, measure)
    assert rel <= 0.01
    assert exact <= 1e-10
    assert quad <= 0.02
    report("Fourier transform recovery (N=24)",
           f"rel err {rel:.3e}, Plancherel exact {exact:.3e}, quad {quad:.3e}")


def test_pvm_algebra(shift257, diff12):
    worst = 0.0
    for sampling, _, measure in (shift257, diff12):
        rep = pvm_algebra_check([(-0.4, 0.6)], [(0.1, 1.2)], sampling, measure, seed=11)
        worst = max(worst, max(rep.values()))
        part, vals = eigenvalue_partition(sampling)
        synth = integrate_step_function(part, vals, sampling, measure)
        worst = max(worst, float(np.max(np.abs(synth.entries - sampling.operator.entries))))
    assert worst <= 1e-10
    report("PVM algebra (shift 257, diff 12)", f"max defect {worst:.3e}")


def test_surjectivity_diagnostic(pvm4):
    _, scale, measure = pvm4
    series = surjectivity_diagnostic(measure, scale, 64)
    assert series[63] <= series[0] / 5.0
    chain = [series[n - 1] for n in (1, 2, 4, 8, 16, 32, 64)]
    assert all(b <= a + 1e-12 for a, b in zip(chain, chain[1:]))
    report("surjectivity diagnostic (dim=4)",
           f"xn(1)={series[0]:.3e}, xn(64)={series[63]:.3e}")


def test_pseudometric_suite(shift257, diff12, pvm4):
    for label, (sampling, scale, measure) in (
        ("shift257", shift257), ("diff12", diff12), ("pvm4", pvm4)
    ):
        metric = pseudometric(sampling, scale, measure)
        dmat = metric.matrix()
        n = metric.n_atoms
        rng = np.random.default_rng(1000)
        triples = rng.integers(0, n, size=(1000, 3))
        sym = float(np.max(np.abs(dmat - dmat.T)))
        a, b, c = triples[:, 0], triples[:, 1], triples[:, 2]
        slack = float((dmat[a, c] - dmat[a, b] - dmat[b, c]).max())
        dmax = float(dmat.max())
        assert sym <= 1e-12, label
        assert slack <= 1e-10, label
        assert dmax <= 2.0 + 1e-12, label
    report("pseudometric suite (1000 triples x 3 examples)",
           "symmetry, triangle and d <= 2 hold")


def test_staircase_lemma_diagnostic():
    for p in (1, 2):
        errs = []
        for n in (12, 24, 48):
            sampling, _ = sh.build_diff_sampling(n, 6)
            n1 = sampling.provenance["params"]["N1"]
            errs.append(staircase_lp_error(gauss, p, n, n1))
        for a, b in zip(errs, errs[1:]):
            assert b / a <= 0.75, (p, errs)
    report("staircase lemma diagnostic (p=1,2)", "error ratio <= 0.75 per doubling")


def test_determinism_across_threads(tmp_path):
    outs = {}
    for threads in ("1", "4"):
        env = dict(os.environ)
        env["SPECTRAL_HULL_THREADS"] = threads
        out_dir = tmp_path / f"t{threads}"
        result = subprocess.run(
            [sys.executable, "-m", "spectral_hull.cli", "converge",
             "--example", "shift", "--n-list", "5,9,17",
             "--seed", "7", "--out-dir", str(out_dir)],
            capture_output=True, text=True, env=env,
        )
        assert result.returncode == 0, result.stderr
        outs[threads] = (out_dir / "converge_shift.csv").read_bytes()
    assert outs["1"] == outs["4"]
    report("determinism (SPECTRAL_HULL_THREADS 1 vs 4)", "byte-identical CSV")
