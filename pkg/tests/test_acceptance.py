"""End-to-end acceptance checks, one test per criterion.

Each test records a single PASS/FAIL line; the lines are printed in the
pytest terminal summary, or directly when this file is run as a script.
"""

import statistics
import sys
import time

import numpy as np
import pytest

from graphmark import harness
from graphmark.graph import (
    Graph,
    adjacency,
    edge_flip_attack,
    edit_distance_percent,
    induced_subgraph,
    splice_subgraph,
    top_degree_selection,
)
from graphmark.scheme import EmbeddingContext, embed_reduced, embed_with_retry, extract, keygen
from graphmark.spectral import binarize, dft2, idft2
from graphmark.tuning import TuneConfig, calibrate_theta, estimate_sigma_max, tune_sigma

pytestmark = pytest.mark.acceptance

RESULTS: dict[int, str] = {}


def verdict(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    RESULTS[number] = line
    print(line)
    assert ok, line


def _direct_dft2(m):
    n = m.shape[0]
    idx = np.arange(n)
    out = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        for l in range(n):
            out[k, l] = np.sum(m * np.exp(-2j * np.pi * (k * idx[:, None] + l * idx[None, :]) / n))
    return out


def _rel(a, b):
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def test_1_spectral_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst, inputs = 0.0, 0
    for n in range(1, 17):
        k = np.arange(n)
        z = np.exp(2j * np.pi * np.outer(k, k) / n) / n
        for _ in range(2):
            binary = rng.integers(0, 2, (n, n)).astype(float)
            cplx = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            for m in (binary, cplx):
                worst = max(worst, _rel(dft2(m), _direct_dft2(m)), _rel(idft2(m), z @ m @ z))
                inputs += 1
    a = rng.integers(0, 2, (256, 256)).astype(float)
    trip = _rel(idft2(dft2(a)), a)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and trip < 1e-9 and inputs >= 50 and elapsed < 60
    verdict(1, "spectral oracle", ok, f"{inputs} inputs N<=16 max rel err {worst:.1e}, N=256 round trip {trip:.1e}, {elapsed:.1f}s")


def test_2_no_false_negative_at_zero():
    t0 = time.perf_counter()
    pairs = bad = errors = 0
    for model in harness.MODELS:
        for n in (100, 1000):
            params = harness.params_for_density(model, n, 3.0)
            for t in range(34):
                seed = 10_000 * (n == 1000) + 100 * harness.MODELS.index(model) + t
                try:
                    g = harness.generate(model, n, params, seed)
                    sigma = estimate_sigma_max(g, 40, None, seed=seed)
                    wm, receipt, key = embed_with_retry(g, 40, sigma, seed=seed + 1)
                    r = extract(g, wm, key, 0.0)
                    bad += not (r.score == 0.0 and r.verdict)
                    pairs += 1
                except Exception:
                    errors += 1
    elapsed = time.perf_counter() - t0
    ok = pairs >= 200 and bad == 0 and errors == 0 and elapsed < 300
    verdict(2, "no FN at theta=0", ok, f"{pairs} pairs, {bad} with s>0, {errors} exceptions, {elapsed:.0f}s")


def test_3_uniqueness():
    t0 = time.perf_counter()
    rep = harness.uniqueness_experiment("ba", 5000, [1, 2, 3, 5], trials=100, seed=3, m=210, n0=1024)
    elapsed = time.perf_counter() - t0
    by_d = {row["density"]: row for row in rep.rows}
    dense_ok = all(by_d[d]["collisions"] == 0 for d in (3, 5))
    sparse = ", ".join(f"d={d}: {by_d[d]['collisions']}/100" for d in (1, 2))
    ok = dense_ok and elapsed < 900
    verdict(3, "uniqueness", ok, f"collisions d=3: {by_d[3]['collisions']}, d=5: {by_d[5]['collisions']}; reported {sparse}; {elapsed:.0f}s")


def test_4_distortion_budget():
    parts, ok = [], True
    for model in harness.MODELS:
        g = harness.generate(model, 20000, harness.params_for_density(model, 20000, 5.0), 4)
        res = tune_sigma(g, TuneConfig(0.0, 0.005, m=210, n0=1024, trial_seed=4))
        wm, _ = embed_reduced(g, keygen(210, res.sigma, 4), 1024)
        ed = edit_distance_percent(g, wm)
        ok &= 0.0 < ed < 0.005
        parts.append(f"{model} sigma={res.sigma:g} ED={ed:.2e}%")
    verdict(4, "distortion budget", ok, "; ".join(parts))


def test_5_false_positive_onset():
    grid = [0, 0.5, 1, 2, 3, 5, 7.5, 10, 12.5, 15, 20, 30, 50]
    rep = harness.false_positive_experiment("ba", 5000, 5.0, grid, regenerations=5, seed=5, base_graphs=10)
    rates = rep.column("fp_rate")
    monotone = all(a <= b for a, b in zip(rates, rates[1:]))
    zero_upto = [t for t, r in zip(grid, rates) if r == 0.0]
    onset = max(zero_upto) if zero_upto and rates[0] == 0.0 else 0.0
    first_fp = next((t for t, r in zip(grid, rates) if r > 0), None)
    ok = monotone and onset > 0
    verdict(
        5, "FP onset shape", ok,
        f"FP rate 0 up to theta={onset:g}, first FP at theta={first_fp}, min ratio {rep.rows[0]['min_ratio']:.2f}, monotone={monotone}",
    )


def test_6_robustness():
    g = harness.generate("ba", 20000, {"a": 5}, 6)
    ctx = EmbeddingContext(g, 1024)
    tuned = tune_sigma(g, TuneConfig(0.0, 0.005, m=210, n0=1024, trial_seed=6), context=ctx)
    cal = calibrate_theta(g, tuned.key, 10.0, 30, n0=1024, attack_seed=1000, context=ctx)
    rep = harness.robustness_experiment(g, tuned.key, cal.theta, [10, 100], trials=10, seed=0, n0=1024)
    at10, at100 = rep.column("successes")
    worst100 = rep.column("max_ratio")[1]
    ok = at10 == 10 and at100 >= 8
    verdict(
        6, "robustness", ok,
        f"theta={cal.theta:.3f} (10% flips, 30 trials, {tuned.receipt.changed_pairs} watermark pairs); "
        f"10% flips {at10}/10, 100% flips {at100}/10 (max ratio {worst100:.1f})",
    )


def test_7_extract_time_invariant_to_attack():
    g = harness.generate("ba", 50000, {"a": 3}, 7)
    wm, _, key = embed_with_retry(g, 210, estimate_sigma_max(g, 210, 1024, seed=7), seed=7, n0=1024)
    suspects = {0: wm, 50: edge_flip_attack(wm, 50.0, 7)}
    extract(g, wm, key, 1.0, n0=1024)  # warm-up
    times = {0: [], 50: []}
    for _ in range(5):
        for p, s in suspects.items():
            t0 = time.perf_counter()
            extract(g, s, key, 1.0, n0=1024)
            times[p].append(time.perf_counter() - t0)
    m0, m50 = statistics.median(times[0]), statistics.median(times[50])
    diff = abs(m50 - m0) / m0
    verdict(7, "extract time vs attack", diff < 0.20, f"median 0%: {m0 * 1e3:.0f} ms, 50%: {m50 * 1e3:.0f} ms, diff {diff:.1%}")


def test_8_embed_scaling():
    sizes = [10_000, 40_000, 160_000]
    medians = []
    for n in sizes:
        g = harness.generate("ba", n, {"a": 3}, 8)
        key = keygen(210, estimate_sigma_max(g, 210, 1024, seed=8), 8)
        embed_reduced(g, key, 1024)
        runs = []
        for _ in range(3):
            t0 = time.perf_counter()
            embed_reduced(g, key, 1024)
            runs.append(time.perf_counter() - t0)
        medians.append(statistics.median(runs))
    slope = float(np.polyfit(np.log(sizes), np.log(medians), 1)[0])
    detail = ", ".join(f"n={n}: {t * 1e3:.0f} ms" for n, t in zip(sizes, medians))
    verdict(8, "embed scaling", slope < 1.2, f"{detail}; log-log slope {slope:.2f}")


def test_9_property_suite():
    t0 = time.perf_counter()
    failures = []
    g = harness.generate("er", 600, {"p": 0.01}, 9)
    for s in range(100):
        p = float(np.random.default_rng(s).uniform(0, 60))
        k = round(p / 100 * g.num_edges)
        if edit_distance_percent(g, edge_flip_attack(g, p, s)) != 100 * k / g.num_edges:
            failures.append(f"ED seed {s}")

    wm, _, key = embed_with_retry(g, 60, 64.0, seed=9)
    ctx = EmbeddingContext(g)
    rec = ctx.watermark(key)
    for s in range(10):
        attacked = edge_flip_attack(wm, 10.0 * s, s)
        verdicts = [ctx.extract(rec, attacked, t).verdict for t in np.linspace(0, 30, 61)]
        if verdicts != sorted(verdicts):
            failures.append(f"monotone seed {s}")

    for s in range(50):
        h = harness.generate("ba", 200, {"a": 2}, s)
        sel = top_degree_selection(h, int(np.random.default_rng(s).integers(1, 250)))
        if splice_subgraph(h, sel, induced_subgraph(h, sel)) != h or Graph.from_adjacency(adjacency(h)) != h:
            failures.append(f"round trip seed {s}")

    rng = np.random.default_rng(9)
    for i in range(1000):
        n = int(rng.integers(1, 20))
        b = binarize(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), float(rng.uniform(0, 2)))
        if not ((b == b.T).all() and not b.diagonal().any()):
            failures.append(f"binarize {i}")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    verdict(9, "property suite", ok, f"{len(failures)} failures {failures[:3]}, {elapsed:.1f}s")


def test_10_laplacian_stability():
    deltas = []
    for s in range(3):
        g = harness.generate("ba", 1000, {"a": 3}, 100 + s)
        # one pair is already ~0.03% here, so 0.1% is the tightest useful window
        res = tune_sigma(g, TuneConfig(0.0, 0.1, m=200, n0=None, trial_seed=s))
        deltas.append(harness.laplacian_delta(g, res.receipt.watermarked))
    worst = max(deltas)
    verdict(
        10, "Laplacian stability", worst <= 0.10,
        f"max relative eigenvalue change {', '.join(f'{d:.2%}' for d in deltas)} (bound 10%, reference observation 4%)",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
