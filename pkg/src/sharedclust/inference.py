"""Gibbs sampler: conditional updates, sweep orchestration, chains, MAP.

A chain is strictly sequential; chains are independent, chain ``i`` of a run
seeded with ``base_seed`` owns the stream seeded ``base_seed + i``.  The MAP
state is the post-burn-in iteration with the highest unnormalized log joint
posterior (earliest iteration on ties), and the co-clustering matrix is the
frequency with which pairs of objects share a label across kept iterations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _gibbs
from .distributions import (
    RngStream,
    _categorical_draw,
    sample_beta,
    sample_dirichlet,
    sample_inverse_wishart,
    sample_mvnormal,
    logpdf_mvnormal,
)
from .model import (
    GmmParams,
    Labeling,
    MixingWeights,
    ModelState,
    Network,
    Priors,
    SbmParams,
    VectorDataset,
    block_counts,
    likelihood_weights,
    log_joint_posterior,
)

__all__ = [
    "ChainConfig",
    "SufficientStats",
    "PosteriorSummary",
    "compute_stats",
    "sample_sigma",
    "sample_mu",
    "sample_psi",
    "sample_label",
    "sample_weights",
    "init_state",
    "gibbs_sweep",
    "run_chain",
    "run_chains",
]


@dataclass(frozen=True)
class ChainConfig:
    """Sampler run configuration; ``priors.eta`` carries the likelihood weight."""

    k_max: int
    priors: Priors
    iterations: int = 2000
    burn_in: int = 1000
    n_chains: int = 10
    base_seed: int = 0
    record_labels: bool = False

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.n_chains < 1:
            raise ValueError("n_chains must be >= 1")
        if self.priors.k != self.k_max:
            raise ValueError("Dirichlet prior length must equal k_max")

    @property
    def eta(self) -> float:
        return self.priors.eta


@dataclass(frozen=True)
class SufficientStats:
    """Per-cluster feature moments and per-block edge totals.

    ``sscp[k]`` is the centered sum of squares and cross products of cluster
    k's feature rows; ``edge_counts``/``pair_counts`` hold, symmetrically,
    the realized edges and possible pairs of every unordered block.
    """

    counts: np.ndarray
    means: np.ndarray
    sscp: np.ndarray
    edge_counts: np.ndarray
    pair_counts: np.ndarray


@dataclass(frozen=True)
class PosteriorSummary:
    """MAP state, per-iteration log-posterior trace, and co-clustering matrix."""

    map_state: ModelState
    map_iteration: int
    log_post_trace: np.ndarray
    coclustering: np.ndarray
    kept_labelings: np.ndarray | None = None
    chain_index: int = 0


def compute_stats(data: VectorDataset, net: Network, labeling: Labeling) -> SufficientStats:
    """Exact per-cluster moments and per-block counts for the current labels."""
    if not (data.n == net.n == labeling.n):
        raise ValueError("data, network and labeling sizes disagree")
    k, q = labeling.k_max, data.q
    counts = labeling.counts()
    means = np.zeros((k, q))
    sscp = np.zeros((k, q, q))
    for c in range(k):
        rows = data.values[labeling.labels == c]
        if rows.shape[0] == 0:
            continue
        means[c] = rows.mean(axis=0)
        diff = rows - means[c]
        sscp[c] = diff.T @ diff
    edges, pairs = block_counts(net, labeling, k)
    return SufficientStats(counts=counts, means=means, sscp=sscp,
                           edge_counts=edges, pair_counts=pairs)


def _posterior_scale(stats: SufficientStats, k: int, priors: Priors, weight: float):
    nk = weight * stats.counts[k]
    scale = priors.t_scale + weight * stats.sscp[k]
    if stats.counts[k] > 0:
        diff = stats.means[k] - priors.mu0
        scale = scale + (priors.alpha * nk / (priors.alpha + nk)) * np.outer(diff, diff)
    return scale, priors.v0 + nk, nk


def sample_sigma(stats: SufficientStats, k: int, priors: Priors, rng: RngStream,
                 weight: float = 1.0) -> np.ndarray:
    """Draw cluster k's covariance from its inverse-Wishart conditional.

    Empty clusters fall back to the prior.  ``weight`` scales the data
    contribution (1 is the plain conditional; 0 is a prior draw).
    """
    scale, dof, _ = _posterior_scale(stats, k, priors, weight)
    return sample_inverse_wishart(scale, dof, rng)


def sample_mu(stats: SufficientStats, k: int, sigma_k: np.ndarray, priors: Priors,
              rng: RngStream, weight: float = 1.0) -> np.ndarray:
    """Draw cluster k's mean given its covariance."""
    nk = weight * stats.counts[k]
    denom = priors.alpha + nk
    mean = (priors.alpha * priors.mu0 + nk * stats.means[k]) / denom
    return sample_mvnormal(mean, np.asarray(sigma_k) / denom, rng)


def sample_psi(stats: SufficientStats, k1: int, k2: int, priors: Priors,
               rng: RngStream, weight: float = 1.0) -> float:
    """Draw one block's edge probability from its Beta conditional."""
    s = weight * stats.edge_counts[k1, k2]
    n_b = weight * stats.pair_counts[k1, k2]
    return sample_beta(priors.beta1 + s, priors.beta2 + (n_b - s), rng)


def sample_weights(labeling, priors: Priors, rng: RngStream) -> MixingWeights:
    """Draw mixing weights from Dirichlet(a + cluster counts)."""
    if isinstance(labeling, Labeling):
        counts = labeling.counts()
    else:
        counts = np.bincount(np.asarray(labeling, dtype=np.int64),
                             minlength=priors.k)
    return MixingWeights(sample_dirichlet(priors.a + counts, rng))


def label_scores(i: int, data: VectorDataset, net: Network, labels: np.ndarray,
                 weights: MixingWeights, gmm: GmmParams, sbm: SbmParams,
                 priors: Priors) -> np.ndarray:
    """Unnormalized log scores of every candidate cluster for object i."""
    k = gmm.k
    wx, wy = likelihood_weights(priors.eta)
    scores = np.empty(k)
    nbrs = np.flatnonzero(net.adjacency[i])
    counts = np.bincount(labels, minlength=k)
    edge_by_cluster = np.bincount(labels[nbrs], minlength=k).astype(np.float64)
    log_psi = np.log(sbm.psi)
    log_1m = np.log1p(-sbm.psi)
    others = counts.astype(np.float64)
    others[labels[i]] -= 1.0
    for c in range(k):
        sc = np.log(weights.p[c])
        if wx != 0.0:
            sc += wx * logpdf_mvnormal(data.values[i], gmm.means[c], gmm.covs[c])
        if wy != 0.0:
            sc += wy * float(edge_by_cluster @ log_psi[c]
                             + (others - edge_by_cluster) @ log_1m[c])
        scores[c] = sc
    return scores


def sample_label(i: int, data: VectorDataset, net: Network, labels: np.ndarray,
                 weights: MixingWeights, gmm: GmmParams, sbm: SbmParams,
                 priors: Priors, rng: RngStream) -> int:
    """Draw a new label for object i from its full conditional.

    ``labels`` is the mutable working vector and is updated in place.
    """
    scores = label_scores(i, data, net, labels, weights, gmm, sbm, priors)
    new = int(_categorical_draw(rng.gen, scores))
    labels[i] = new
    return new


def _neighbor_lists(net: Network):
    adj = net.adjacency
    degrees = adj.sum(axis=1).astype(np.int64)
    ptr = np.zeros(net.n + 1, dtype=np.int64)
    np.cumsum(degrees, out=ptr[1:])
    flat = np.empty(int(ptr[-1]), dtype=np.int64)
    for i in range(net.n):
        flat[ptr[i]:ptr[i + 1]] = np.flatnonzero(adj[i])
    return flat, ptr


def _kernel_args(data: VectorDataset, priors: Priors):
    from .distributions import check_spd

    t_low = check_spd(priors.t_scale, "t_scale")
    wx, wy = likelihood_weights(priors.eta)
    return (data.values, priors.mu0, priors.alpha, priors.t_scale, t_low,
            float(priors.v0), priors.a, float(priors.beta1), float(priors.beta2),
            wx, wy)


def init_state(data: VectorDataset, net: Network, k: int, priors: Priors,
               rng: RngStream) -> ModelState:
    """Chain initialization: uniform random labels, prior mixing weights,
    placeholder component parameters (overwritten before first use)."""
    labels = np.empty(data.n, dtype=np.int64)
    p = np.empty(k)
    _gibbs._init_chain(rng.gen, data.n, k, priors.a, labels, p)
    gmm = GmmParams(np.zeros((k, data.q)), np.tile(np.eye(data.q), (k, 1, 1)))
    sbm = SbmParams(np.full((k, k), 0.5))
    labeling = Labeling(labels, k)
    weights = MixingWeights(p)
    lp = log_joint_posterior(data, net, labeling, weights, gmm, sbm, priors)
    return ModelState(labeling=labeling, weights=weights, gmm=gmm, sbm=sbm, log_post=lp)


def gibbs_sweep(data: VectorDataset, net: Network, state: ModelState,
                priors: Priors, rng: RngStream) -> ModelState:
    """One full sweep (covariances, means, edge probabilities, labels, weights).

    Returns the updated state with its recomputed log joint posterior.
    """
    if data.n != net.n:
        raise ValueError("data and network sizes disagree")
    k = state.labeling.k_max
    labels = state.labeling.labels.copy()
    counts = state.labeling.counts().astype(np.int64)
    p = state.weights.p.copy()
    mu = state.gmm.means.copy()
    sigma = state.gmm.covs.copy()
    psi = state.sbm.psi.copy()
    nbr_flat, nbr_ptr = _neighbor_lists(net)
    (x, mu0, alpha, t_mat, t_low, v0, a_dir, b1, b2, wx, wy) = _kernel_args(data, priors)
    status, lp = _gibbs._sweep(rng.gen, x, nbr_flat, nbr_ptr, labels, counts,
                               p, mu, sigma, psi, mu0, alpha, t_mat, t_low,
                               v0, a_dir, b1, b2, wx, wy)
    if status != _gibbs.STATUS_OK:
        raise RuntimeError("Cholesky factorization failed during the sweep")
    return ModelState(labeling=Labeling(labels, k), weights=MixingWeights(p),
                      gmm=GmmParams(mu, sigma), sbm=SbmParams(psi), log_post=lp)


def run_chain(data: VectorDataset, net: Network, config: ChainConfig,
              chain_index: int = 0) -> PosteriorSummary:
    """Run one seeded chain and summarize it.

    The chain uses the stream seeded ``config.base_seed + chain_index``.
    """
    if data.n != net.n:
        raise ValueError("data and network sizes disagree")
    rng = RngStream(config.base_seed + chain_index)
    nbr_flat, nbr_ptr = _neighbor_lists(net)
    (x, mu0, alpha, t_mat, t_low, v0, a_dir, b1, b2, wx, wy) = _kernel_args(data, config.priors)
    out = _gibbs._run_chain(rng.gen, x, nbr_flat, nbr_ptr, config.k_max,
                            config.iterations, config.burn_in, mu0, alpha,
                            t_mat, t_low, v0, a_dir, b1, b2, wx, wy,
                            config.record_labels)
    (status, trace, cc, kept, best_iter, best_lp, best_labels, best_p,
     best_mu, best_sigma, best_psi) = out
    if status != _gibbs.STATUS_OK:
        raise RuntimeError("Cholesky factorization failed during the chain")
    map_state = ModelState(
        labeling=Labeling(best_labels, config.k_max),
        weights=MixingWeights(best_p),
        gmm=GmmParams(best_mu, best_sigma),
        sbm=SbmParams(best_psi),
        log_post=float(best_lp),
    )
    return PosteriorSummary(
        map_state=map_state,
        map_iteration=int(best_iter),
        log_post_trace=trace,
        coclustering=cc,
        kept_labelings=kept if config.record_labels else None,
        chain_index=chain_index,
    )


def run_chains(data: VectorDataset, net: Network, config: ChainConfig):
    """Run ``config.n_chains`` independent chains.

    Returns (summaries, selected) where selected is the summary with the
    highest MAP log posterior (lowest chain index on ties).
    """
    summaries = [run_chain(data, net, config, i) for i in range(config.n_chains)]
    best = max(range(len(summaries)),
               key=lambda i: (summaries[i].map_state.log_post, -i))
    return summaries, summaries[best]
