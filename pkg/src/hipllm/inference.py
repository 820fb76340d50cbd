"""The imprecise-inference engine.

For every hyperparameter configuration drawn from a domain's admissible box
we compute the grid posterior over (mu, nu), deterministic quadrature CDFs
for each subdomain accuracy, and Monte Carlo samples of the domain and
system aggregates.  Envelopes are the pointwise min-max of the per-config
CDFs; future reliability uses the n_F-th-power transform of the samples
and the matching root transform of the CDFs.

All randomness flows through substreams derived from (master seed, stage,
domain index, config index), so results are identical under any parallel
schedule.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .hyperposterior import (
    HyperGrid,
    build_grid,
    hyper_posterior,
    log_marginal_likelihood_grid,
)
from .model import (
    DomainSpec,
    GridSpec,
    HyperBox,
    HyperConfig,
    McSpec,
    ReliabilityQuery,
    SystemSpec,
    validate,
)
from .numerics import RngState, beta_cdf, sample_categorical

__all__ = [
    "eval_grid",
    "CdfEnvelope",
    "ReliabilityCurve",
    "SampleSet",
    "InferenceReport",
    "generate_configs",
    "subdomain_marginal_cdf",
    "sample_domain",
    "empirical_cdf",
    "generate_pairings",
    "sample_system",
    "envelope",
    "reliability_cdf",
    "expected_reliability",
    "infer",
]

# Grid cells whose combined posterior mass is below this are skipped when
# evaluating quadrature mixtures; counts in the thousands concentrate the
# posterior on a small fraction of the grid.
PRUNE_MASS = 1e-10

# Substream stage tags (first path element after the master seed).
_STAGE_CONFIGS = 1
_STAGE_SAMPLES = 2
_STAGE_PAIRINGS = 3


def eval_grid(t_grid_size: int) -> np.ndarray:
    """Uniform inclusive CDF evaluation grid on [0, 1]."""
    if t_grid_size < 2:
        raise ValueError("t grid needs at least 2 points")
    return np.linspace(0.0, 1.0, t_grid_size)


@dataclass
class CdfEnvelope:
    """Pointwise lower/upper CDF bounds over a family of member CDFs."""

    t: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    members: Optional[np.ndarray] = None  # (n_members, T), kept on request


@dataclass
class ReliabilityCurve:
    """Envelope of expected future reliability per horizon."""

    horizons: Tuple[int, ...]
    expected_lower: np.ndarray
    expected_upper: np.ndarray
    cdf_envelopes: Optional[List[CdfEnvelope]] = None  # one per horizon


@dataclass
class SampleSet:
    """Monte Carlo draws for one (domain, config) unit."""

    theta: np.ndarray   # (S, n_subdomains)
    p: np.ndarray       # (S,) domain aggregate
    config: HyperConfig
    seed: int


@dataclass
class InferenceReport:
    t: np.ndarray
    domain_labels: List[str]
    subdomain_labels: List[List[str]]
    subdomain_envelopes: List[List[CdfEnvelope]]
    domain_envelopes: List[CdfEnvelope]
    system_envelope: CdfEnvelope
    reliability: Dict[Tuple[str, str], ReliabilityCurve]  # (level, entity name)
    master_seed: int
    live_array_bytes: int = 0

    def entity_envelopes(self):
        """Yield (level, entity name, envelope) over every reported envelope."""
        for i, dom_envs in enumerate(self.subdomain_envelopes):
            for j, env in enumerate(dom_envs):
                yield "subdomain", self.subdomain_labels[i][j], env
        for i, env in enumerate(self.domain_envelopes):
            yield "domain", self.domain_labels[i], env
        yield "system", "system", self.system_envelope


def generate_configs(box: HyperBox, k: int, seed: int) -> List[HyperConfig]:
    """Deterministic set of k configs inside the box.

    The 16 corner points of the 4-D box come first (envelope extremes tend
    to sit at extreme prior settings); the remainder is a seeded uniform
    fill of the interior.
    """
    corners = [
        HyperConfig(a, b, c, d)
        for a, b, c, d in itertools.product(*[(lo, hi) for lo, hi in box.ranges()])
    ]
    if k <= len(corners):
        return corners[:k]
    rng = RngState(seed)
    lows = np.array([r[0] for r in box.ranges()])
    highs = np.array([r[1] for r in box.ranges()])
    fill = rng.gen.uniform(lows, highs, size=(k - len(corners), 4))
    return corners + [HyperConfig(*row) for row in fill]


def _pruned_cells(post: HyperGrid, prune_mass: float):
    """Indices of the heaviest grid cells covering 1 - prune_mass of the
    posterior, plus their renormalized weights."""
    w = post.weights
    order = np.argsort(w)[::-1]
    cum = np.cumsum(w[order])
    keep = int(np.searchsorted(cum, 1.0 - prune_mass) + 1)
    idx = order[:keep]
    return idx, w[idx] / w[idx].sum()


def subdomain_marginal_cdf(
    domain: DomainSpec,
    j: int,
    post: HyperGrid,
    t: np.ndarray,
    prune_mass: float = PRUNE_MASS,
) -> np.ndarray:
    """Deterministic quadrature CDF of one subdomain accuracy.

    Mixture over grid cells of conditional Beta CDFs
    I_t(C + mu*nu, N - C + (1-mu)*nu) with the posterior cell weights.
    """
    if post.weights is None:
        raise ValueError("grid posterior weights missing; run hyper_posterior first")
    sub = domain.subdomains[j]
    idx, w = _pruned_cells(post, prune_mass)
    alpha = sub.correct + post.mu[idx] * post.nu[idx]
    beta = sub.total - sub.correct + (1.0 - post.mu[idx]) * post.nu[idx]
    member = beta_cdf(t[None, :], alpha[:, None], beta[:, None])
    return w @ member


def sample_domain(
    domain: DomainSpec,
    config: HyperConfig,
    post: HyperGrid,
    s: int,
    rng: RngState,
    sub_stream_tags: Optional[Sequence[int]] = None,
) -> SampleSet:
    """Monte Carlo draws of subdomain accuracies and the domain aggregate.

    Each draw picks a grid cell from the posterior weights, then draws every
    subdomain accuracy from its conditional Beta, then aggregates with the
    within-domain operational weights.  The cell stream and each subdomain's
    Beta stream are separate substreams, so permuting subdomains together
    with their weights and stream tags leaves the aggregate unchanged.
    """
    if post.weights is None:
        raise ValueError("grid posterior weights missing; run hyper_posterior first")
    n_sub = len(domain.subdomains)
    tags = list(sub_stream_tags) if sub_stream_tags is not None else list(range(1, n_sub + 1))
    if len(tags) != n_sub:
        raise ValueError("need one stream tag per subdomain")
    cells = sample_categorical(rng.substream(0), post.weights, size=s)
    mu, nu = post.mu[cells], post.nu[cells]
    theta = np.empty((s, n_sub))
    for j, sub in enumerate(domain.subdomains):
        alpha = sub.correct + mu * nu
        beta = sub.total - sub.correct + (1.0 - mu) * nu
        theta[:, j] = rng.substream(tags[j]).gen.beta(alpha, beta)
    p = theta @ np.asarray(domain.op_weights)
    return SampleSet(theta=theta, p=p, config=config, seed=rng.seed)


def empirical_cdf(samples: np.ndarray, t: np.ndarray) -> np.ndarray:
    """F(t_k) = #(samples <= t_k) / S on the evaluation grid."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("empirical_cdf requires at least one sample")
    return np.searchsorted(np.sort(samples), t, side="right") / samples.size


def generate_pairings(
    counts: Sequence[int], cap: int, seed: int
) -> List[Tuple[int, ...]]:
    """Cross-domain config index tuples: the full Cartesian product when it
    fits under the cap, otherwise a seeded uniform sample without
    replacement of exactly `cap` distinct tuples."""
    total = 1
    for c in counts:
        total *= c
    if total <= cap:
        return list(itertools.product(*[range(c) for c in counts]))
    rng = RngState(seed)
    chosen: List[int] = []
    seen = set()
    while len(chosen) < cap:
        flat = int(rng.gen.integers(0, total))
        if flat not in seen:
            seen.add(flat)
            chosen.append(flat)
    return [tuple(int(v) for v in np.unravel_index(f, counts)) for f in chosen]


def sample_system(
    system: SystemSpec,
    pairing: Tuple[int, ...],
    domain_samples: Sequence[Sequence[SampleSet]],
) -> np.ndarray:
    """Index-aligned system aggregate p_L for one config pairing."""
    slices = [domain_samples[i][k] for i, k in enumerate(pairing)]
    sizes = {sl.p.size for sl in slices}
    if len(sizes) != 1:
        raise ValueError(f"mismatched sample counts across domains: {sorted(sizes)}")
    w = np.asarray(system.domain_weights)
    return sum(wi * sl.p for wi, sl in zip(w, slices))


def envelope(members: Sequence[np.ndarray], t: np.ndarray, keep_members: bool = False) -> CdfEnvelope:
    """Pointwise min-max over a family of CDFs on a common grid."""
    stack = np.asarray(members)
    if stack.ndim != 2 or stack.shape[0] < 1:
        raise ValueError("envelope requires at least one member CDF")
    return CdfEnvelope(
        t=t,
        lower=stack.min(axis=0),
        upper=stack.max(axis=0),
        members=stack if keep_members else None,
    )


def reliability_cdf(base: np.ndarray, t: np.ndarray, n_f: int) -> np.ndarray:
    """CDF of the n_F-th power of a [0,1] variable whose CDF on `t` is `base`.

    F_R(x) = F_p(x**(1/n_F)), with linear interpolation between grid points.
    """
    if n_f < 1:
        raise ValueError("n_F must be >= 1")
    if n_f == 1:
        return np.asarray(base).copy()
    return np.interp(t ** (1.0 / n_f), t, base)


def expected_reliability(samples: np.ndarray, n_f: int) -> float:
    """Monte Carlo mean of the n_F-th power of the sampled probabilities."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("expected_reliability requires at least one sample")
    return float(np.mean(samples ** n_f))


def _domain_unit(domain, config, grid, log_lik, s, rng, t, want_quadrature):
    """One (domain, config) work unit: grid posterior, optional subdomain
    quadrature CDFs, and Monte Carlo draws."""
    post = hyper_posterior(domain, config, grid, log_lik=log_lik)
    sub_cdfs = None
    if want_quadrature:
        sub_cdfs = [
            subdomain_marginal_cdf(domain, j, post, t)
            for j in range(len(domain.subdomains))
        ]
    samples = sample_domain(domain, config, post, s, rng)
    return sub_cdfs, samples


def _reliability_curve(member_samples, horizons, t, with_cdfs):
    lo, hi = [], []
    cdf_envs = [] if with_cdfs else None
    for n_f in horizons:
        vals = [expected_reliability(p, n_f) for p in member_samples]
        lo.append(min(vals))
        hi.append(max(vals))
        if with_cdfs:
            members = [
                reliability_cdf(empirical_cdf(p, t), t, n_f) for p in member_samples
            ]
            cdf_envs.append(envelope(members, t))
    return ReliabilityCurve(
        horizons=tuple(horizons),
        expected_lower=np.array(lo),
        expected_upper=np.array(hi),
        cdf_envelopes=cdf_envs,
    )


def system_sample_arrays(
    system: SystemSpec,
    grid_spec: Optional[GridSpec] = None,
    mc: Optional[McSpec] = None,
    threads: int = 1,
) -> List[np.ndarray]:
    """Per-pairing arrays of system-level samples p_L, skipping the
    quadrature CDF stage.  Same seeds and draws as `infer`."""
    system, grid_spec, mc, _ = validate(system, grid_spec, mc, None)
    grid = build_grid(grid_spec)
    master = RngState(mc.master_seed)
    t = eval_grid(mc.t_grid_size)

    domain_samples: List[List[SampleSet]] = []
    for i, domain in enumerate(system.domains):
        configs = generate_configs(
            domain.box, mc.configs_per_domain, master.substream(_STAGE_CONFIGS, i).seed
        )
        log_lik = log_marginal_likelihood_grid(domain, grid)

        def unit(k, _domain=domain, _log_lik=log_lik, _i=i, _configs=configs):
            rng = master.substream(_STAGE_SAMPLES, _i, k)
            return _domain_unit(
                _domain, _configs[k], grid, _log_lik, mc.samples_per_config, rng, t, False
            )[1]

        ks = range(len(configs))
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                samples = list(ex.map(unit, ks))
        else:
            samples = [unit(k) for k in ks]
        domain_samples.append(samples)

    pairings = generate_pairings(
        [len(s) for s in domain_samples],
        mc.pairing_cap,
        master.substream(_STAGE_PAIRINGS).seed,
    )
    return [sample_system(system, pr, domain_samples) for pr in pairings]


def infer(
    system: SystemSpec,
    grid_spec: Optional[GridSpec] = None,
    mc: Optional[McSpec] = None,
    query: Optional[ReliabilityQuery] = None,
    threads: int = 1,
    keep_members: bool = False,
    reliability_cdfs: bool = False,
) -> InferenceReport:
    """Full envelope report at subdomain, domain, and system levels.

    Deterministic given the master seed; `threads` only affects speed
    because every work unit owns a substream derived from its indices.
    """
    system, grid_spec, mc, query = validate(system, grid_spec, mc, query)
    t = eval_grid(mc.t_grid_size)
    grid = build_grid(grid_spec)
    master = RngState(mc.master_seed)

    m = len(system.domains)
    domain_configs: List[List[HyperConfig]] = []
    domain_samples: List[List[SampleSet]] = []
    subdomain_envs: List[List[CdfEnvelope]] = []
    domain_envs: List[CdfEnvelope] = []
    retained = grid.mu.nbytes + grid.nu.nbytes + grid.log_measure.nbytes

    for i, domain in enumerate(system.domains):
        configs = generate_configs(
            domain.box,
            mc.configs_per_domain,
            master.substream(_STAGE_CONFIGS, i).seed,
        )
        log_lik = log_marginal_likelihood_grid(domain, grid)
        retained += log_lik.nbytes

        def unit(k, _domain=domain, _log_lik=log_lik, _i=i, _configs=configs):
            rng = master.substream(_STAGE_SAMPLES, _i, k)
            return _domain_unit(
                _domain, _configs[k], grid, _log_lik, mc.samples_per_config, rng, t, True
            )

        ks = range(len(configs))
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(unit, ks))
        else:
            results = [unit(k) for k in ks]

        sub_members = [
            np.array([res[0][j] for res in results])
            for j in range(len(domain.subdomains))
        ]
        samples = [res[1] for res in results]
        p_members = np.array([empirical_cdf(sl.p, t) for sl in samples])

        subdomain_envs.append(
            [envelope(mem, t, keep_members=keep_members) for mem in sub_members]
        )
        domain_envs.append(envelope(p_members, t, keep_members=keep_members))
        domain_configs.append(configs)
        domain_samples.append(samples)
        retained += sum(sl.theta.nbytes + sl.p.nbytes for sl in samples)
        retained += sum(mem.nbytes for mem in sub_members) + p_members.nbytes

    pairings = generate_pairings(
        [len(c) for c in domain_configs],
        mc.pairing_cap,
        master.substream(_STAGE_PAIRINGS).seed,
    )
    p_l_arrays = [sample_system(system, pr, domain_samples) for pr in pairings]
    system_members = np.array([empirical_cdf(p, t) for p in p_l_arrays])
    system_env = envelope(system_members, t, keep_members=keep_members)
    retained += sum(p.nbytes for p in p_l_arrays) + system_members.nbytes

    reliability: Dict[Tuple[str, str], ReliabilityCurve] = {}
    domain_labels = [d.label or f"domain{i+1}" for i, d in enumerate(system.domains)]
    subdomain_labels = [
        [s.label or f"{domain_labels[i]}.sub{j+1}" for j, s in enumerate(d.subdomains)]
        for i, d in enumerate(system.domains)
    ]
    for i, domain in enumerate(system.domains):
        for j in range(len(domain.subdomains)):
            theta_members = [sl.theta[:, j] for sl in domain_samples[i]]
            reliability[("subdomain", subdomain_labels[i][j])] = _reliability_curve(
                theta_members, query.horizons, t, reliability_cdfs
            )
        reliability[("domain", domain_labels[i])] = _reliability_curve(
            [sl.p for sl in domain_samples[i]], query.horizons, t, reliability_cdfs
        )
    reliability[("system", "system")] = _reliability_curve(
        p_l_arrays, query.horizons, t, reliability_cdfs
    )

    return InferenceReport(
        t=t,
        domain_labels=domain_labels,
        subdomain_labels=subdomain_labels,
        subdomain_envelopes=subdomain_envs,
        domain_envelopes=domain_envs,
        system_envelope=system_env,
        reliability=reliability,
        master_seed=mc.master_seed,
        live_array_bytes=retained,
    )
