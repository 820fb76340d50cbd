"""Synthetic ground-truth comparison and scalability benchmarks.

The synthetic study draws binomial counts from known subdomain accuracies,
builds three operational-profile scenarios (dataset-proportional, noisy,
exact), runs each estimation method, and summarizes medians, errors, and
90% intervals against the known system reliability.  The scaling sweep
times the full engine while varying one parameter at a time and fits
power laws to the wall-clock measurements.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .baselines import BetaPosterior, bb_system_samples, informative_prior
from .inference import infer, system_sample_arrays
from .model import (
    DomainSpec,
    GridSpec,
    HyperBox,
    McSpec,
    ReliabilityQuery,
    SubdomainData,
    SystemSpec,
    default_box,
    default_grid,
    default_mc,
)
from .numerics import RngState, derive_substream

__all__ = [
    "GroundTruth",
    "MethodSummary",
    "Rq5Row",
    "ScalingRecord",
    "default_ground_truth",
    "generate_counts",
    "op_scenarios",
    "build_system",
    "summarize_method",
    "run_rq5",
    "run_scaling_sweep",
    "fit_power_law",
]

# Concentration of the informative baseline prior: comparable weight to the
# smallest synthetic sample size without dominating it.
INFORMATIVE_KAPPA = 50.0

# Posterior sample count for the closed-form baselines.
BASELINE_SAMPLES = 20_000


@dataclass(frozen=True)
class GroundTruth:
    """Known subdomain accuracies and flattened operational weights."""

    theta: Tuple[float, ...]
    op: Tuple[float, ...]              # flattened W_i * Omega_ij, sums to 1
    sample_sizes: Tuple[int, ...]
    domain_sizes: Tuple[int, ...] = (2, 2)   # subdomains per domain

    def __post_init__(self):
        if not (len(self.theta) == len(self.op) == len(self.sample_sizes)):
            raise ValueError("theta, op, and sample_sizes must have equal length")
        if sum(self.domain_sizes) != len(self.theta):
            raise ValueError("domain_sizes must partition the subdomain list")
        if abs(sum(self.op) - 1.0) > 1e-9:
            raise ValueError("ground-truth weights must sum to 1")

    @property
    def p_system(self) -> float:
        return float(np.dot(self.theta, self.op))


def default_ground_truth(sample_sizes: Sequence[int] = (100, 500, 1000, 300)) -> GroundTruth:
    """Reference configuration for the synthetic study (system reliability
    0.5860 exactly)."""
    return GroundTruth(
        theta=(0.75, 0.65, 0.58, 0.45),
        op=(0.30, 0.10, 0.20, 0.40),
        sample_sizes=tuple(int(n) for n in sample_sizes),
    )


def generate_counts(gt: GroundTruth, seed: int) -> List[SubdomainData]:
    """Seeded binomial counts from the ground-truth accuracies."""
    rng = RngState(seed)
    out = []
    for j, (theta, n) in enumerate(zip(gt.theta, gt.sample_sizes)):
        c = int(rng.substream(j).gen.binomial(n, theta))
        out.append(SubdomainData(correct=c, total=n, label=f"synth{j+1}"))
    return out


def op_scenarios(
    gt: GroundTruth, noise: float, seed: int
) -> Dict[str, Tuple[float, ...]]:
    """Three flattened weight vectors: dataset-size proportional ("data"),
    ground truth perturbed by multiplicative uniform noise and renormalized
    ("approx"), and exact ground truth ("gt")."""
    if not (0.0 <= noise < 1.0):
        raise ValueError("noise must lie in [0, 1)")
    sizes = np.asarray(gt.sample_sizes, dtype=float)
    data = sizes / sizes.sum()
    u = RngState(seed).gen.uniform(-noise, noise, size=len(gt.op))
    approx = np.asarray(gt.op) * (1.0 + u)
    approx = approx / approx.sum()
    return {
        "data": tuple(data),
        "approx": tuple(approx),
        "gt": tuple(gt.op),
    }


def build_system(
    gt: GroundTruth,
    counts: Sequence[SubdomainData],
    op_flat: Sequence[float],
    box: Optional[HyperBox] = None,
) -> SystemSpec:
    """Assemble the two-level hierarchy from flattened weights.

    Domain weights are the per-domain sums of the flattened weights; the
    within-domain weights are the renormalized remainders.
    """
    box = box if box is not None else default_box()
    domains = []
    weights = []
    k = 0
    for i, size in enumerate(gt.domain_sizes):
        chunk = np.asarray(op_flat[k : k + size], dtype=float)
        w_i = chunk.sum()
        if w_i <= 0.0:
            raise ValueError(f"domain {i} has zero total weight")
        domains.append(
            DomainSpec(
                subdomains=tuple(counts[k : k + size]),
                op_weights=tuple(chunk / w_i),
                box=box,
                label=f"synth-dom{i+1}",
            )
        )
        weights.append(w_i)
        k += size
    return SystemSpec(domains=tuple(domains), domain_weights=tuple(weights))


@dataclass(frozen=True)
class MethodSummary:
    """Median, absolute error, and 90% interval for one method.

    Envelope-valued methods report [min, max] bounds over their config
    family; single-posterior methods report degenerate bounds.
    """

    method: str
    median: Tuple[float, float]
    error: Tuple[float, float]
    interval_90: Tuple[float, float]
    scalar: bool

    @property
    def median_mid(self) -> float:
        return 0.5 * (self.median[0] + self.median[1])


def _quantiles(samples: np.ndarray) -> Tuple[float, float, float]:
    q05, med, q95 = np.quantile(samples, [0.05, 0.5, 0.95])
    return float(q05), float(med), float(q95)


def summarize_method(
    method: str,
    samples: Union[np.ndarray, Sequence[np.ndarray]],
    p_gt: float,
) -> MethodSummary:
    """Summarize either a single posterior sample array or a family of
    per-config arrays (envelope method)."""
    if isinstance(samples, np.ndarray) and samples.ndim == 1:
        q05, med, q95 = _quantiles(samples)
        err = abs(med - p_gt)
        return MethodSummary(method, (med, med), (err, err), (q05, q95), scalar=True)
    triples = [_quantiles(np.asarray(s)) for s in samples]
    if not triples:
        raise ValueError("envelope summary requires at least one config")
    meds = [m for _, m, _ in triples]
    errs = [abs(m - p_gt) for m in meds]
    return MethodSummary(
        method,
        (min(meds), max(meds)),
        (min(errs), max(errs)),
        (min(q for q, _, _ in triples), max(q for _, _, q in triples)),
        scalar=len(triples) == 1,
    )


@dataclass(frozen=True)
class Rq5Row:
    regime: str
    scenario: str
    summary: MethodSummary


def run_rq5(
    gt: GroundTruth,
    regimes: Dict[str, Sequence[int]],
    noise: float = 0.2,
    seed: int = 0,
    grid: Optional[GridSpec] = None,
    mc: Optional[McSpec] = None,
    methods: Sequence[str] = ("bb-uninf", "bb-inf", "hip-llm"),
) -> List[Rq5Row]:
    """Synthetic comparison of the estimation methods.

    One row per (sample-size regime x weight scenario x method); counts are
    drawn once per regime and shared by every scenario and method.
    """
    grid = grid if grid is not None else default_grid()
    mc = mc if mc is not None else default_mc()
    rows: List[Rq5Row] = []
    for r_idx, (regime, sizes) in enumerate(regimes.items()):
        regime_gt = replace(gt, sample_sizes=tuple(int(n) for n in sizes))
        counts = generate_counts(regime_gt, derive_substream(seed, (10, r_idx)))
        scenarios = op_scenarios(regime_gt, noise, derive_substream(seed, (20, r_idx)))
        for scenario, op_flat in scenarios.items():
            system = build_system(regime_gt, counts, op_flat)
            for m_idx, method in enumerate(methods):
                m_seed = derive_substream(seed, (30, r_idx, m_idx))
                if method == "bb-uninf":
                    priors = [BetaPosterior(1.0, 1.0)] * len(regime_gt.theta)
                    samples = bb_system_samples(system, priors, BASELINE_SAMPLES, m_seed)
                elif method == "bb-inf":
                    priors = [
                        informative_prior(th, INFORMATIVE_KAPPA) for th in regime_gt.theta
                    ]
                    samples = bb_system_samples(system, priors, BASELINE_SAMPLES, m_seed)
                elif method == "hip-llm":
                    samples = system_sample_arrays(
                        system, grid, replace(mc, master_seed=m_seed)
                    )
                else:
                    raise ValueError(f"unknown method {method!r}")
                rows.append(
                    Rq5Row(
                        regime=regime,
                        scenario=scenario,
                        summary=summarize_method(method, samples, regime_gt.p_system),
                    )
                )
    return rows


@dataclass(frozen=True)
class ScalingRecord:
    parameter: str
    value: float
    seconds: float
    peak_bytes: int


def _bench_system(m: int, n_bar: int, box: HyperBox) -> SystemSpec:
    """Synthetic hierarchy for timing runs; deterministic counts."""
    thetas = (0.75, 0.65, 0.58, 0.45)
    domains = []
    k = 0
    for i in range(m):
        subs = []
        for j in range(n_bar):
            theta = thetas[k % len(thetas)]
            k += 1
            subs.append(SubdomainData(correct=round(theta * 500), total=500))
        domains.append(
            DomainSpec(
                subdomains=tuple(subs),
                op_weights=tuple([1.0 / n_bar] * n_bar),
                box=box,
                label=f"bench-dom{i+1}",
            )
        )
    return SystemSpec(domains=tuple(domains), domain_weights=tuple([1.0 / m] * m))


def _grid_for_size(g: int) -> GridSpec:
    """GridSpec whose total node count approximates g, keeping the default
    5:4 aspect ratio between the two axes."""
    r = np.sqrt(g / 2000.0)
    return GridSpec(n_mu=max(1, round(50 * r)), n_nu=max(1, round(40 * r)))


def run_scaling_sweep(
    parameter: str,
    values: Sequence[float],
    seed: int = 0,
    horizons: Tuple[int, ...] = (1,),
) -> List[ScalingRecord]:
    """Time the full engine while sweeping one parameter around the default
    baseline (m=2, n_bar=2, K=160, S=3000, G=2000).

    The timed run is single-threaded so fitted exponents are independent of
    scheduling.  Peak memory is the engine's own live-array accounting.
    """
    if parameter not in {"m", "n", "K", "S", "G"}:
        raise ValueError(f"unknown sweep parameter {parameter!r}")
    if any(v <= 0 for v in values) or list(values) != sorted(values):
        raise ValueError("sweep values must be positive and increasing")
    box = default_box()
    base_mc = replace(default_mc(), master_seed=seed)
    query = ReliabilityQuery(horizons=horizons)
    records = []
    for v in values:
        m, n_bar, grid, mc = 2, 2, default_grid(), base_mc
        v = int(v)
        if parameter == "m":
            m = v
        elif parameter == "n":
            n_bar = v
        elif parameter == "K":
            mc = replace(mc, configs_per_domain=v)
        elif parameter == "S":
            mc = replace(mc, samples_per_config=v)
        elif parameter == "G":
            grid = _grid_for_size(v)
        system = _bench_system(m, n_bar, box)
        start = time.perf_counter()
        report = infer(system, grid, mc, query, threads=1)
        elapsed = time.perf_counter() - start
        records.append(
            ScalingRecord(
                parameter=parameter,
                value=float(v),
                seconds=elapsed,
                peak_bytes=report.live_array_bytes,
            )
        )
    return records


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """Least-squares fit of y = c * x**alpha on log-log axes; returns
    (c, alpha)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 3:
        raise ValueError("power-law fit needs at least 3 points")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("power-law fit needs positive data")
    if np.allclose(x, x[0]):
        raise ValueError("power-law fit is degenerate for constant x")
    alpha, log_c = np.polyfit(np.log(x), np.log(y), 1)
    return float(np.exp(log_c)), float(alpha)
