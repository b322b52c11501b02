"""Domain types, likelihoods, and the unnormalized log joint posterior.

Objects carry a feature vector (rows of an N-by-q matrix) and sit in an
undirected binary network (symmetric N-by-N adjacency, zero diagonal).  A
single length-N labeling drives both a Gaussian mixture over the vectors and
a stochastic block model over the edges.  The joint posterior over
(labels, mixing weights, per-cluster Gaussians, block edge probabilities)
admits an optional weight ``eta`` trading the two likelihood contributions:
the log joint is

    wx * log p(X | C, means, covs) + wy * log p(Y | C, psi)
    + log priors + sum_i log p_{c_i}

with ``(wx, wy) = likelihood_weights(eta)``, so ``eta = 0.5`` is the plain
unweighted joint model and ``eta`` of 1 or 0 degenerates to the plain
vectors-only or network-only model.  Parameter priors are never tempered.

Labels are 0-based in memory; file I/O converts to 1-based (see ``io``).
All types are immutable values; the operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_triangular

from .distributions import (
    check_spd,
    logpdf_beta,
    logpdf_dirichlet,
    logpdf_inverse_wishart,
    logpdf_mvnormal,
)

__all__ = [
    "VectorDataset",
    "Network",
    "Labeling",
    "GmmParams",
    "SbmParams",
    "MixingWeights",
    "Priors",
    "ModelState",
    "log_likelihood_x",
    "log_likelihood_y",
    "log_prior",
    "log_joint_posterior",
]


@dataclass(frozen=True)
class VectorDataset:
    """N-by-q real feature matrix, row i = object i."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"feature matrix must be N x q with N,q >= 1, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("feature matrix has non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Network:
    """Symmetric binary adjacency with zero diagonal."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        a = a.astype(np.uint8)
        if np.any(a != a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency diagonal must be zero (no self loops)")
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True)
class Labeling:
    """Length-N cluster assignment, entries in 0..k_max-1; empty clusters allowed."""

    labels: np.ndarray
    k_max: int

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if lab.size < 1 or lab.min(initial=0) < 0 or lab.max(initial=0) >= self.k_max:
            raise ValueError(f"labels must lie in 0..{self.k_max - 1}")
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.labels.size

    def counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k_max)


@dataclass(frozen=True)
class GmmParams:
    """Per-cluster mean vectors (K,q) and SPD covariances (K,q,q)."""

    means: np.ndarray
    covs: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        covs = np.asarray(self.covs, dtype=np.float64)
        if means.ndim != 2 or covs.ndim != 3:
            raise ValueError("means must be (K,q) and covs (K,q,q)")
        k, q = means.shape
        if covs.shape != (k, q, q):
            raise ValueError(f"covs shape {covs.shape} inconsistent with means {means.shape}")
        for j in range(k):
            check_spd(covs[j], f"covariance of component {j}")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covs", covs)

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def q(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True)
class SbmParams:
    """Symmetric K-by-K edge probability matrix with entries in (0,1)."""

    psi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=np.float64)
        if psi.ndim != 2 or psi.shape[0] != psi.shape[1]:
            raise ValueError("psi must be square")
        if np.any(psi <= 0) or np.any(psi >= 1):
            raise ValueError("psi entries must be strictly inside (0,1)")
        if np.max(np.abs(psi - psi.T)) != 0:
            raise ValueError("psi must be symmetric")
        object.__setattr__(self, "psi", psi)

    @property
    def k(self) -> int:
        return self.psi.shape[0]


@dataclass(frozen=True)
class MixingWeights:
    """Strictly positive probability vector summing to one."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64).reshape(-1)
        if np.any(p <= 0) or abs(float(p.sum()) - 1.0) > 1e-12:
            raise ValueError("mixing weights must be positive and sum to 1")
        object.__setattr__(self, "p", p)

    @property
    def k(self) -> int:
        return self.p.size


@dataclass(frozen=True)
class Priors:
    """Hyperparameters of the conjugate priors plus the likelihood weight eta.

    mu0, alpha: Gaussian prior on each cluster mean (mean mu0, covariance
    cov_k / alpha); t_scale, v0: inverse-Wishart prior on each covariance;
    a: Dirichlet prior on mixing weights; beta1, beta2: Beta prior on each
    block edge probability; eta in [0,1] weights the two data likelihoods
    (0.5 = unweighted joint model).
    """

    mu0: np.ndarray
    alpha: float
    t_scale: np.ndarray
    v0: float
    a: np.ndarray
    beta1: float = 1.1
    beta2: float = 1.1
    eta: float = 0.5

    def __post_init__(self):
        mu0 = np.asarray(self.mu0, dtype=np.float64).reshape(-1)
        t_scale = np.asarray(self.t_scale, dtype=np.float64)
        a = np.asarray(self.a, dtype=np.float64).reshape(-1)
        check_spd(t_scale, "t_scale")
        q = mu0.size
        if t_scale.shape != (q, q):
            raise ValueError("t_scale dimension inconsistent with mu0")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.v0 > q - 1:
            raise ValueError(f"v0 must exceed q-1 = {q - 1}")
        if np.any(a <= 0):
            raise ValueError("Dirichlet parameters must be positive")
        if not (self.beta1 > 0 and self.beta2 > 0):
            raise ValueError("Beta shapes must be positive")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0,1]")
        object.__setattr__(self, "mu0", mu0)
        object.__setattr__(self, "t_scale", t_scale)
        object.__setattr__(self, "a", a)

    @property
    def q(self) -> int:
        return self.mu0.size

    @property
    def k(self) -> int:
        return self.a.size

    def with_eta(self, eta: float) -> "Priors":
        return replace(self, eta=float(eta))


def default_priors(data: VectorDataset, k: int, *, alpha: float = 0.01,
                   v0: float | None = None, t_scale: np.ndarray | None = None,
                   mu0: np.ndarray | None = None, a: np.ndarray | None = None,
                   beta1: float = 1.1, beta2: float = 1.1, eta: float = 0.5) -> Priors:
    """Reference defaults: mu0 = column mean of the data, alpha = 0.01,
    v0 = q + 3, T = v0 * I, Dirichlet(5,...,5) on the mixing weights,
    Beta(1.1, 1.1) on edge probabilities.

    The Dirichlet parameter of 5 per component keeps cluster sizes from
    collapsing; a flat Dirichlet makes the marginal over labelings prefer
    merging clusters whenever the (deliberately diffuse) covariance prior
    blurs the feature signal.
    """
    q = data.q
    if v0 is None:
        v0 = q + 3
    if t_scale is None:
        t_scale = v0 * np.eye(q)
    if mu0 is None:
        mu0 = data.values.mean(axis=0)
    if a is None:
        a = np.full(k, 5.0)
    return Priors(mu0=mu0, alpha=alpha, t_scale=t_scale, v0=v0, a=a,
                  beta1=beta1, beta2=beta2, eta=eta)


@dataclass(frozen=True)
class ModelState:
    """One sampler state and its unnormalized log joint posterior."""

    labeling: Labeling
    weights: MixingWeights
    gmm: GmmParams
    sbm: SbmParams
    log_post: float


def log_likelihood_x(data: VectorDataset, labeling: Labeling, gmm: GmmParams) -> float:
    """Sum over objects of the assigned component's Gaussian log density."""
    if labeling.n != data.n:
        raise ValueError("labeling and data sizes disagree")
    if labeling.labels.max() >= gmm.k:
        raise ValueError("label out of range for the mixture parameters")
    total = 0.0
    for k in range(gmm.k):
        rows = data.values[labeling.labels == k]
        if rows.shape[0] == 0:
            continue
        low = check_spd(gmm.covs[k], "component covariance")
        diff = rows - gmm.means[k]
        sol = solve_triangular(low, diff.T, lower=True)
        quad = np.sum(sol * sol)
        logdet = 2.0 * np.sum(np.log(np.diag(low)))
        m = rows.shape[0]
        total += -0.5 * m * data.q * np.log(2.0 * np.pi) - 0.5 * m * logdet - 0.5 * quad
    return float(total)


def log_likelihood_y(net: Network, labeling: Labeling, sbm: SbmParams) -> float:
    """Bernoulli log likelihood over unordered pairs i < j."""
    if labeling.n != net.n:
        raise ValueError("labeling and network sizes disagree")
    if labeling.labels.max() >= sbm.k:
        raise ValueError("label out of range for the block parameters")
    edge_counts, pair_counts = block_counts(net, labeling, sbm.k)
    log_psi = np.log(sbm.psi)
    log_1m = np.log1p(-sbm.psi)
    iu = np.triu_indices(sbm.k)
    s = edge_counts[iu]
    nb = pair_counts[iu]
    return float(np.sum(s * log_psi[iu] + (nb - s) * log_1m[iu]))


def block_counts(net: Network, labeling: Labeling, k: int):
    """Edge and pair counts per unordered block; both returned symmetric."""
    onehot = np.zeros((net.n, k))
    onehot[np.arange(net.n), labeling.labels] = 1.0
    cross = onehot.T @ net.adjacency.astype(np.float64) @ onehot
    counts = labeling.counts().astype(np.float64)
    pair = np.outer(counts, counts)
    np.fill_diagonal(pair, counts * (counts - 1.0) / 2.0)
    edges = cross.copy()
    np.fill_diagonal(edges, np.diag(cross) / 2.0)
    return edges, pair


def log_prior(gmm: GmmParams, sbm: SbmParams, weights: MixingWeights, priors: Priors) -> float:
    """Joint log prior density; -inf (not an error) outside the support."""
    total = 0.0
    for k in range(gmm.k):
        total += logpdf_inverse_wishart(gmm.covs[k], priors.t_scale, priors.v0)
        total += logpdf_mvnormal(gmm.means[k], priors.mu0, gmm.covs[k] / priors.alpha)
    for k1 in range(sbm.k):
        for k2 in range(k1, sbm.k):
            total += logpdf_beta(sbm.psi[k1, k2], priors.beta1, priors.beta2)
    total += logpdf_dirichlet(weights.p, priors.a)
    return float(total)


def likelihood_weights(eta: float) -> tuple[float, float]:
    """Data-likelihood weights (wx, wy) for a given eta.

    Interior values interpolate as (2*eta, 2*(1-eta)) so that eta = 0.5 is
    the plain unweighted joint model; the exact boundaries drop the ignored
    likelihood with weight 1 on the surviving one, i.e. eta = 1 is the plain
    Gaussian mixture and eta = 0 the plain block model rather than tempered
    versions of them.
    """
    if eta == 1.0:
        return 1.0, 0.0
    if eta == 0.0:
        return 0.0, 1.0
    return 2.0 * eta, 2.0 * (1.0 - eta)


def log_joint_posterior(data: VectorDataset, net: Network, labeling: Labeling,
                        weights: MixingWeights, gmm: GmmParams, sbm: SbmParams,
                        priors: Priors) -> float:
    """Unnormalized log joint posterior with eta-dependent likelihood weights."""
    wx, wy = likelihood_weights(priors.eta)
    llx = log_likelihood_x(data, labeling, gmm) if wx != 0.0 else 0.0
    lly = log_likelihood_y(net, labeling, sbm) if wy != 0.0 else 0.0
    label_term = float(np.sum(np.log(weights.p)[labeling.labels]))
    return wx * llx + wy * lly + log_prior(gmm, sbm, weights, priors) + label_term


def make_state(data: VectorDataset, net: Network, labeling: Labeling,
               weights: MixingWeights, gmm: GmmParams, sbm: SbmParams,
               priors: Priors) -> ModelState:
    """Bundle components into a ModelState with its recomputed log posterior."""
    lp = log_joint_posterior(data, net, labeling, weights, gmm, sbm, priors)
    return ModelState(labeling=labeling, weights=weights, gmm=gmm, sbm=sbm, log_post=lp)
