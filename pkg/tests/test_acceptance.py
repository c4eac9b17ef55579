"""Acceptance gate.

Each test checks one numbered criterion with its pinned tolerances and
prints a single line ``[PASS] n. ...`` or ``[FAIL] n. ...`` to the terminal,
whatever the outcome.  Run alone with::

    pytest tests/test_acceptance.py -v
"""

import math
import time

import numpy as np
import pytest
from conftest import uniform_instance

from emptystar.bodies import Ball, Cube, Ellipse
from emptystar.cli import main
from emptystar.enumeration import (
    count_empty_simplices,
    empty_simplex_array,
    enumerate_empty_simplices_naive,
    facet_extension_bound,
    fast_planar_empty_triangles,
    gamma_functionals,
)
from emptystar.experiments import ExperimentConfig, draw_instance, poisson_gof, run_sweep_full, trial_stream
from emptystar.geom import convex_hull_2d
from emptystar.integrals import (
    appendix_bound,
    appendix_I,
    section_integral,
    theorem2_constants,
    theorem2_limit_rhs,
)
from emptystar.rng import RngStream

SEED = 7
UPPER_C3 = 3.3841


@pytest.fixture
def report(capsys):
    def emit(number, ok, text):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {number}. {text}")
        assert ok, text
    return emit


@pytest.fixture(scope="module")
def planar_sweep():
    t0 = time.perf_counter()
    r = run_sweep_full(ExperimentConfig("empty_count", Ball(2), [100, 400], 200, SEED))
    return r, time.perf_counter() - t0


def test_01_planar_empty_triangles(report, planar_sweep):
    r, elapsed = planar_sweep
    m100, m400 = r.summary(100).mean, r.summary(400).mean
    ok = 1.70 <= m400 <= 2.30 and abs(m400 - 2) < abs(m100 - 2) and elapsed < 60
    report(1, ok, f"disk N/n^2: n=100 {m100:.4f}, n=400 {m400:.4f} in [1.70, 2.30], "
                  f"closer to 2 at n=400; sweep {elapsed:.1f}s < 60s")


def test_02_typical_pair_degree(report, planar_sweep):
    r, _ = planar_sweep
    m = 6 * r.summary(400).mean
    report(2, 10.2 <= m <= 13.8, f"mean 6N/n^2 at n=400 = {m:.3f} in [10.2, 13.8]")


def test_03_max_degree_magnitude(report):
    parts, ok = [], True
    for body in (Ball(2), Cube(2)):
        r = run_sweep_full(ExperimentConfig("max_degree", body, [400], 100, SEED, k=2))
        mean = r.summary(400).mean
        raw = r.raw_values(400)
        ok &= 0.60 <= mean <= 1.00 and bool(np.all(raw <= 400 - 2))
        parts.append(f"{body.label} mean deg_2/n {mean:.4f}, max deg_2 {int(raw.max())}")
    report(3, ok, "; ".join(parts) + " (band [0.60, 1.00], deg_2 <= n-2)")


def test_04_lemma1_limit(report):
    t0 = time.perf_counter()
    r = run_sweep_full(ExperimentConfig("n_gamma", Cube(2), [2000], 500, SEED, gamma=1.0))
    elapsed = time.perf_counter() - t0
    m = r.summary(2000).mean
    ok = 0.90 * math.pi / 2 <= m <= 1.10 * math.pi / 2 and elapsed < 30
    report(4, ok, f"square n=2000 mean N_gn {m:.4f} within 10% of pi/2; {elapsed:.1f}s < 30s")


def test_05_poisson_approximation(report):
    (g,) = poisson_gof(ExperimentConfig("poisson_gof", Cube(2), [2000], 2000, SEED, gamma=1.0))
    gap = abs(g.p_zero_empirical - math.exp(-g.mean))
    ok = g.tv_distance <= 0.05 and gap <= 0.03
    report(5, ok, f"TV {g.tv_distance:.4f} <= 0.05, |P(N=0) - e^-mean| = {gap:.4f} <= 0.03")


def test_06_section_identities(report):
    t0 = time.perf_counter()
    s = 10 ** 6
    disk = section_integral(Ball(2), 3, s, RngStream(SEED, 1)).mean
    square = section_integral(Cube(2), 3, s, RngStream(SEED, 2)).mean
    lim2 = theorem2_limit_rhs(Ball(2), s, RngStream(SEED, 3)).mean
    lim3 = theorem2_limit_rhs(Ball(3), s, RngStream(SEED, 4)).mean
    elapsed = time.perf_counter() - t0
    errs = [abs(disk / (3 * math.pi) - 1), abs(square / (3 / math.pi) - 1),
            abs(lim2 / 2 - 1), abs(lim3 / UPPER_C3 - 1)]
    ok = errs[0] <= 0.02 and errs[1] <= 0.02 and errs[2] <= 0.02 and errs[3] <= 0.03 and elapsed < 30
    report(6, ok, "relative errors disk {:.4f}, square {:.4f}, limit disk {:.4f}, "
                  "limit ball3 {:.4f}; {:.1f}s < 30s".format(*errs, elapsed))


def test_07_new_inequality(report):
    parts, ok = [], True
    for i, body in enumerate((Cube(2), Ellipse(2.0, 1.0), Cube(3))):
        d = body.dim
        est = section_integral(body, d + 1, 10 ** 6, RngStream(SEED, 10 + i))
        lower = theorem2_constants(d).new_ineq_c * body.volume ** d
        ok &= est.mean >= lower - 4 * est.stderr
        parts.append(f"{body.label} {est.mean:.4f} >= {lower:.4f}")
    report(7, ok, "; ".join(parts))


def test_08_appendix_bound(report):
    est, bound = appendix_I(3, 1.0, Ball(3), 10 ** 6, RngStream(SEED, 20))
    closed = appendix_bound(3, 1.0)
    ok = est.mean <= 4 * math.pi ** 3 + 2 * est.stderr and abs(closed / (4 * math.pi ** 3) - 1) <= 1e-9
    report(8, ok, f"I(B^3) estimate {est.mean:.4f} +- {est.stderr:.4f} <= 4 pi^3 = {bound:.4f}")


def test_09_oracle_equivalence(report):
    bad = []
    for seed in range(100):
        X = uniform_instance(seed, 4 + seed % 11)
        if fast_planar_empty_triangles(X) != enumerate_empty_simplices_naive(X):
            bad.append(seed)
    for seed in range(5):
        X = uniform_instance(1000 + seed, 60)
        if fast_planar_empty_triangles(X) != enumerate_empty_simplices_naive(X):
            bad.append(1000 + seed)
    report(9, not bad, f"fast planar equals naive on 100 small and 5 n=60 instances; mismatches {bad}")


def test_10_combinatorial_identities(report):
    failures = []
    for d in (2, 3):
        for seed in range(50):
            n = 6 + seed % (40 if d == 2 else 12)
            X = uniform_instance(10_000 * d + seed, n, d=d)
            total = int(empty_simplex_array(X).shape[0])
            maxima = []
            for k in range(1, d + 1):
                r = count_empty_simplices(X, k=k)
                if sum(r.per_tuple_degree.values()) != math.comb(d + 1, k) * total:
                    failures.append((d, seed, "sum", k))
                maxima.append(r.witness_max[1])
            if maxima != sorted(maxima, reverse=True):
                failures.append((d, seed, "chain"))
            if d == 2 and 3 * total < facet_extension_bound(n, len(convex_hull_2d(X.coords))):
                failures.append((d, seed, "hull"))
            for gamma in (0.2, 1.0):
                g = gamma_functionals(X, gamma)
                if g.f_value > g.n_count * maxima[-1]:
                    failures.append((d, seed, "F", gamma))
    report(10, not failures, f"identities on 50 instances each for d=2,3; failures {failures}")


def test_11_three_dimensional_sanity(report):
    ns = (30, 50, 70)
    counts, degs = [], []
    for i, n in enumerate(ns):
        c = d1 = 0.0
        for t in range(50):
            r = count_empty_simplices(draw_instance(Ball(3), trial_stream(SEED, i, t), n), k=1)
            c += r.total / n ** 3
            d1 += r.witness_max[1] / n ** 2
        counts.append(c / 50)
        degs.append(d1 / 50)
    lo, hi = theorem2_constants(3).lower_c * 0.5, UPPER_C3 * 1.5
    band = all(lo <= m <= hi for m in counts)
    ratio = max(degs) / min(degs)
    text = ("N/n^3 " + ", ".join(f"{m:.4f}" for m in counts) + f" in [{lo:.4f}, {hi:.4f}]; "
            "max deg_1/n^2 " + ", ".join(f"{m:.4f}" for m in degs) + f", spread factor {ratio:.3f} <= 2")
    report(11, band and ratio <= 2, text)


def test_12_cli_determinism(report, tmp_path, capsys):
    pts = tmp_path / "pts.txt"
    argvs = (
        ["gen", "--body", "disk", "--n", "60", "--seed", "3", "--out", str(pts)],
        ["analyze", "--input", str(pts), "--k", "2"],
        ["star-svg", "--input", str(pts), "--k", "2", "--out", str(tmp_path / "star.svg")],
        ["sweep", "--quantity", "max-degree", "--k", "2", "--body", "square", "--n", "30,60",
         "--trials", "5", "--seed", "3", "--out", str(tmp_path / "sweep")],
        ["sweep", "--quantity", "poisson-gof", "--body", "square", "--n", "200",
         "--trials", "50", "--seed", "3", "--out", str(tmp_path / "gof")],
        ["integral", "--body", "cube3", "--samples", "20000", "--seed", "3"],
        ["constants", "--dim", "3"],
    )

    def invoke():
        # identical argv both times; --force lets the rerun replace its own files
        outs = []
        for argv in argvs:
            extra = ["--force"] if "--out" in argv else []
            outs.append((main(argv + extra), capsys.readouterr().out))
        files = {p.name: p.read_bytes() for p in sorted(tmp_path.iterdir())}
        return outs, files

    a, b = invoke(), invoke()
    ok = a == b and all(c == 0 for c, _ in a[0]) and len(a[1]) == 6
    report(12, ok, f"two runs of {len(argvs)} CLI invocations give identical stdout and "
                   f"{len(a[1])} identical files")
