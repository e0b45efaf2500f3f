"""Random graph models and the watermarking experiments.

Every experiment returns an :class:`ExperimentReport` whose rows record the
seeds they were produced with, so any cell can be regenerated exactly
(timings aside).
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

import networkx as nx
import numpy as np
from scipy import linalg

from .graph import Graph, adjacency, density, edge_flip_attack, topk_degree_spearman
from .scheme import EmbeddingContext, Key, embed_full, embed_reduced, extract, keygen
from .tuning import KeyLengthPolicy, TuneConfig, TuningError, choose_key_length, estimate_sigma_max, tune_sigma

logger = logging.getLogger(__name__)

MODELS = ("er", "ba", "ws")


def generate(model: str, n: int, params: dict, seed: int) -> Graph:
    """Seeded Erdős-Rényi (``p``), Barabási-Albert (``a``) or Watts-Strogatz (``k``, ``beta``) graph.

    BA grows from a complete graph on ``c = max(a, 2)`` vertices, so it has
    ``c(c-1)/2 + a(n-c)`` edges.
    """
    model = model.lower()
    if model == "er":
        p = float(params["p"])
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"ER edge probability must lie in [0, 1], got {p}")
        g = nx.fast_gnp_random_graph(n, p, seed=seed)
    elif model == "ba":
        a = int(params["a"])
        if not 1 <= a < n:
            raise ValueError(f"BA attachment count must lie in [1, n), got {a}")
        seed_graph = nx.complete_graph(max(a, 2))
        g = nx.barabasi_albert_graph(n, a, seed=seed, initial_graph=seed_graph)
    elif model == "ws":
        k, beta = int(params["k"]), float(params.get("beta", 0.1))
        if k < 2 or k % 2 or k >= n:
            raise ValueError(f"WS ring degree must be even and in [2, n), got {k}")
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"WS rewiring probability must lie in [0, 1], got {beta}")
        g = nx.watts_strogatz_graph(n, k, beta, seed=seed)
    else:
        raise ValueError(f"unknown graph model {model!r}; expected one of {MODELS}")
    edges = np.fromiter((x for e in g.edges() for x in e), dtype=np.int64, count=2 * g.number_of_edges())
    return Graph.from_edges(n, edges.reshape(-1, 2))


def params_for_density(model: str, n: int, target: float, beta: float = 0.1) -> dict:
    """Model parameters whose expected |E|/|V| is ``target``."""
    model = model.lower()
    if model == "er":
        return {"p": min(1.0, 2.0 * target / (n - 1))}
    if model == "ba":
        return {"a": max(1, int(round(target)))}
    if model == "ws":
        return {"k": max(2, 2 * int(round(target))), "beta": beta}
    raise ValueError(f"unknown graph model {model!r}; expected one of {MODELS}")


def graph_digest(graph: Graph) -> str:
    h = hashlib.sha256(str(graph.n).encode())
    h.update(graph.codes.astype("<i8").tobytes())
    return h.hexdigest()[:12]


@dataclass
class ExperimentReport:
    name: str
    params: dict
    rows: list[dict] = field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        cols: list[str] = []
        for row in self.rows:
            cols.extend(c for c in row if c not in cols)
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# experiment={self.name}\n")
        for k, v in self.params.items():
            buf.write(f"# {k}={v}\n")
        writer = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*items)))


def _cell_seed(seed: int, cell: int) -> int:
    return seed * 1_000_003 + cell


# --- uniqueness ---------------------------------------------------------


def _uniqueness_cell(model, n, target, trials, cell_seed, m, n0, ed_window) -> dict:
    graph = generate(model, n, params_for_density(model, n, target), cell_seed)
    row = {
        "model": model,
        "n": n,
        "density": target,
        "realized_density": round(density(graph), 4),
        "m": m,
        "n0": n0,
        "trials": trials,
        "seed": cell_seed,
        "graph_hash": graph_digest(graph),
    }
    ctx = EmbeddingContext(graph, n0)
    cfg = TuneConfig(ed_window[0], ed_window[1], m=m, n0=n0, trial_seed=cell_seed)
    try:
        tuned = tune_sigma(graph, cfg, context=ctx)
    except TuningError as exc:
        row.update(sigma=float("nan"), collisions=-1, success_rate=float("nan"), failed_embeddings=-1, error=str(exc))
        return row
    collisions = failed = 0
    for t in range(trials):
        k1 = keygen(m, tuned.sigma, 2 * (cell_seed + t) + 1)
        k2 = keygen(m, tuned.sigma, 2 * (cell_seed + t) + 2)
        w1, r1 = ctx.embed(k1)
        w2, r2 = ctx.embed(k2)
        failed += (not r1.succeeded) + (not r2.succeeded)
        collisions += bool(k1 != k2 and w1 == w2)
    row.update(
        sigma=tuned.sigma,
        collisions=collisions,
        success_rate=1.0 - collisions / trials,
        failed_embeddings=failed,
    )
    return row


def uniqueness_experiment(
    model: str,
    n: int,
    density_grid: Iterable[float],
    trials: int,
    seed: int,
    m: int = 210,
    n0: Optional[int] = 1024,
    ed_window: tuple[float, float] = (0.05, 0.5),
    jobs: int = 1,
) -> ExperimentReport:
    """Embed pairs of independent keys and count identical watermarked graphs.

    Sigma is tuned once per density so the tuning key's ED falls inside
    ``ed_window`` (percent). Trial ``t`` uses key seeds ``2(cell+t)+1`` and
    ``2(cell+t)+2``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    grid = list(density_grid)
    items = [(model, n, d, trials, _cell_seed(seed, c), m, n0, ed_window) for c, d in enumerate(grid)]
    rows = _map(_uniqueness_cell, items, jobs)
    params = dict(model=model, n=n, densities=grid, trials=trials, seed=seed, m=m, n0=n0, ed_window=ed_window)
    return ExperimentReport("uniqueness", params, rows)


# --- false positives ----------------------------------------------------


def _fp_base_cell(model, n, target, regenerations, base_seed, m, n0, ed_window) -> dict:
    params = params_for_density(model, n, target)
    graph = generate(model, n, params, base_seed)
    ctx = EmbeddingContext(graph, n0)
    cfg = TuneConfig(ed_window[0], ed_window[1], m=m, n0=n0, trial_seed=base_seed)
    tuned = tune_sigma(graph, cfg, context=ctx)
    record = ctx.watermark(tuned.key)
    ratios = []
    for r in range(regenerations):
        other = generate(model, n, params, _cell_seed(base_seed, r + 1))
        ratios.append(ctx.extract(record, other, 0.0).normalized)
    return {"seed": base_seed, "graph_hash": graph_digest(graph), "sigma": tuned.sigma, "ratios": ratios}


def false_positive_experiment(
    model: str,
    n: int,
    density_target: float,
    theta_grid: Iterable[float],
    regenerations: int = 5,
    seed: int = 0,
    base_graphs: int = 10,
    m: int = 210,
    n0: Optional[int] = 1024,
    ed_window: tuple[float, float] = (0.05, 0.5),
    jobs: int = 1,
) -> ExperimentReport:
    """Try to extract a key from freshly regenerated, never-watermarked graphs.

    A false positive is a regenerated graph whose normalized score is at most
    theta. One row per theta; ``base_seeds`` lists the graphs behind it.
    """
    thetas = sorted(float(t) for t in theta_grid)
    items = [
        (model, n, density_target, regenerations, _cell_seed(seed, b), m, n0, ed_window) for b in range(base_graphs)
    ]
    cells = _map(_fp_base_cell, items, jobs)
    ratios = np.array([r for c in cells for r in c["ratios"]])
    seeds = ";".join(str(c["seed"]) for c in cells)
    hashes = ";".join(c["graph_hash"] for c in cells)
    rows = []
    for theta in thetas:
        fp = int(np.count_nonzero(ratios <= theta))
        rows.append(
            {
                "theta": theta,
                "attempts": ratios.size,
                "false_positives": fp,
                "fp_rate": fp / ratios.size,
                "min_ratio": float(ratios.min()),
                "seed": seed,
                "base_seeds": seeds,
                "graph_hashes": hashes,
            }
        )
    params = dict(
        model=model,
        n=n,
        density=density_target,
        base_graphs=base_graphs,
        regenerations=regenerations,
        seed=seed,
        m=m,
        n0=n0,
        ed_window=ed_window,
        sigmas=[c["sigma"] for c in cells],
    )
    return ExperimentReport("false_positive", params, rows)


# --- robustness ---------------------------------------------------------


def robustness_experiment(
    graph: Graph,
    key: Key,
    theta: float,
    flip_grid: Iterable[float],
    trials: int,
    seed: int,
    n0: Optional[int] = 1024,
) -> ExperimentReport:
    """Success rate of extraction from attacked copies of the watermarked graph.

    Attack ``t`` (1-based) at every flip level uses seed ``seed + t``.
    """
    ctx = EmbeddingContext(graph, n0)
    record = ctx.watermark(key)
    watermarked, _ = ctx.embed(key)
    rows = []
    for p in flip_grid:
        ratios = []
        for t in range(1, trials + 1):
            attacked = edge_flip_attack(watermarked, p, seed + t)
            ratios.append(ctx.extract(record, attacked, theta).normalized)
        ok = sum(r <= theta for r in ratios)
        rows.append(
            {
                "flip_percent": p,
                "theta": theta,
                "trials": trials,
                "successes": ok,
                "success_rate": ok / trials,
                "mean_ratio": float(np.mean(ratios)),
                "max_ratio": float(np.max(ratios)),
                "seed": seed,
            }
        )
    params = dict(n=graph.n, edges=graph.num_edges, key=key.fingerprint, theta=theta, trials=trials, seed=seed, n0=n0)
    return ExperimentReport("robustness", params, rows)


# --- timing -------------------------------------------------------------


def timing_benchmark(
    model: str,
    size_grid: Iterable[int],
    key_policy: KeyLengthPolicy,
    n0: Optional[int] = 1024,
    timeout_seconds: float = 25 * 60,
    seed: int = 0,
    density_target: float = 3.0,
) -> ExperimentReport:
    """Wall-clock Embed and Extract (unattacked) per graph size.

    Sigma is set beforehand and not timed. A cell over the timeout is
    marked ``discarded`` and larger sizes are skipped.
    """
    rows = []
    over = False
    for c, n in enumerate(size_grid):
        cell_seed = _cell_seed(seed, c)
        row: dict[str, Any] = {"n": n, "seed": cell_seed}
        if over:
            row.update(status="discarded", embed_seconds=float("nan"), extract_seconds=float("nan"))
            rows.append(row)
            continue
        graph = generate(model, n, params_for_density(model, n, density_target), cell_seed)
        m = choose_key_length(graph, key_policy)
        sigma = estimate_sigma_max(graph, m, n0, seed=cell_seed)
        key = keygen(m, sigma, cell_seed)

        t0 = time.perf_counter()
        watermarked, receipt = embed_reduced(graph, key, n0) if n0 else embed_full(graph, key)
        t_embed = time.perf_counter() - t0
        t0 = time.perf_counter()
        result = extract(graph, watermarked, key, 0.0, n0)
        t_extract = time.perf_counter() - t0

        status = "ok" if max(t_embed, t_extract) <= timeout_seconds else "discarded"
        over = status == "discarded"
        row.update(
            edges=graph.num_edges,
            m=m,
            sigma=sigma,
            ed_percent=receipt.ed_percent,
            verdict=result.verdict,
            embed_seconds=t_embed,
            extract_seconds=t_extract,
            status=status,
            graph_hash=graph_digest(graph),
        )
        rows.append(row)
    params = dict(
        model=model, sizes=list(size_grid), key_policy=key_policy.describe(), n0=n0, timeout=timeout_seconds, seed=seed
    )
    return ExperimentReport("timing", params, rows)


# --- attack impact ------------------------------------------------------


def attack_impact_spearman(
    graph: Graph, flip_grid: Iterable[float], k: int, trials: int, seed: int
) -> ExperimentReport:
    """Spearman correlation of the top-``k`` degree ranking after attacking the original."""
    if k > graph.n:
        raise ValueError(f"k={k} exceeds the vertex count {graph.n}")
    rows = []
    for p in flip_grid:
        vals = [topk_degree_spearman(graph, edge_flip_attack(graph, p, seed + t), k) for t in range(1, trials + 1)]
        rows.append(
            {
                "flip_percent": p,
                "k": k,
                "trials": trials,
                "mean_spearman": float(np.mean(vals)),
                "min_spearman": float(np.min(vals)),
                "max_spearman": float(np.max(vals)),
                "seed": seed,
            }
        )
    params = dict(n=graph.n, edges=graph.num_edges, k=k, trials=trials, seed=seed)
    return ExperimentReport("attack_spearman", params, rows)


# --- Laplacian ----------------------------------------------------------


def laplacian_spectrum(graph: Graph) -> np.ndarray:
    a = adjacency(graph, dtype=np.float64)
    lap = np.diag(a.sum(axis=1)) - a
    return linalg.eigvalsh(lap)


def laplacian_delta(graph: Graph, watermarked: Graph, max_n: int = 2048, tol: float = 1e-9) -> float:
    """Largest relative change of any sorted Laplacian eigenvalue.

    Eigenvalues are paired by rank; the (numerically) zero ones of the
    original are skipped.
    """
    if graph.n != watermarked.n:
        raise ValueError(f"vertex counts differ: {graph.n} vs {watermarked.n}")
    if graph.n > max_n:
        raise ValueError(f"dense eigensolve refused for n={graph.n} > max_n={max_n}")
    before = laplacian_spectrum(graph)
    after = laplacian_spectrum(watermarked)
    keep = np.abs(before) > tol
    if not keep.any():
        return 0.0
    return float(np.max(np.abs(after[keep] - before[keep]) / np.abs(before[keep])))
