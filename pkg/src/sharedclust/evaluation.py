"""Accuracy measures, ensemble baselines, and the exact tiny-instance oracle.

The experiment harness reproduces the benchmark protocol: per seeded dataset
it reports the median-over-chains MAP accuracy of the joint sampler and of
the two single-data-type boundary samplers (eta = 1 vectors-only, eta = 0
network-only), a deterministic consensus of the two baselines, and the
better baseline ("Oracle").
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import betaln, gammaln, multigammaln

from .inference import ChainConfig, run_chains
from .model import Labeling, Network, Priors, VectorDataset, default_priors
from .synthesis import case_info, generate, preset

__all__ = [
    "ContingencyTable",
    "adjusted_rand_index",
    "combine",
    "oracle_pick",
    "ExactPosterior",
    "exact_posterior",
    "ExperimentResult",
    "experiment",
    "METHOD_ORDER",
]

METHOD_ORDER = ("Shared", "Combine", "Oracle", "Net", "Vec")

# greedy alignment above this many clusters; exact assignment below
_EXACT_ALIGN_MAX_K = 8


def _as_labels(x) -> np.ndarray:
    if isinstance(x, Labeling):
        return x.labels
    return np.asarray(x, dtype=np.int64).reshape(-1)


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-tabulation of two labelings with its marginals."""

    table: np.ndarray
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    n: int

    @classmethod
    def from_labelings(cls, a, b) -> "ContingencyTable":
        a = _as_labels(a)
        b = _as_labels(b)
        if a.size != b.size:
            raise ValueError("labelings have different lengths")
        _, ai = np.unique(a, return_inverse=True)
        _, bi = np.unique(b, return_inverse=True)
        table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
        np.add.at(table, (ai, bi), 1)
        return cls(table=table, row_marginals=table.sum(axis=1),
                   col_marginals=table.sum(axis=0), n=int(a.size))


def _pairs(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def adjusted_rand_index(a, b) -> float:
    """Hubert-Arabie chance-corrected agreement between two partitions.

    When the correction denominator is exactly zero (both partitions
    trivial) this returns 1.0 for identical set partitions and 0.0
    otherwise.
    """
    ct = ContingencyTable.from_labelings(a, b)
    if ct.n < 2:
        raise ValueError("adjusted Rand index needs at least two objects")
    # integer pair counts throughout so small rational results are exact
    index = int(_pairs(ct.table).sum())
    sum_a = int(_pairs(ct.row_marginals).sum())
    sum_b = int(_pairs(ct.col_marginals).sum())
    total = ct.n * (ct.n - 1) // 2
    numer = 2 * (index * total - sum_a * sum_b)
    denom = (sum_a + sum_b) * total - 2 * sum_a * sum_b
    if denom == 0:
        identical = (np.count_nonzero(ct.table) == max(ct.table.shape)
                     and (ct.table != 0).sum(axis=0).max() == 1
                     and (ct.table != 0).sum(axis=1).max() == 1)
        return 1.0 if identical else 0.0
    return numer / denom


def _align_columns(table: np.ndarray) -> dict[int, int]:
    """Map column labels to row labels maximizing total agreement."""
    r, s = table.shape
    if max(r, s) <= _EXACT_ALIGN_MAX_K:
        size = max(r, s)
        padded = np.zeros((size, size), dtype=np.int64)
        padded[:r, :s] = table
        rows, cols = linear_sum_assignment(padded, maximize=True)
        return {int(c): int(rw) for rw, c in zip(rows, cols) if rw < r and c < s}
    mapping: dict[int, int] = {}
    taken = set()
    for rw in range(r):
        order = np.argsort(-table[rw], kind="stable")
        for c in order:
            if int(c) not in mapping and rw not in taken and table[rw, c] >= 0:
                mapping[int(c)] = rw
                taken.add(rw)
                break
    return mapping


def combine(c_vec, c_net) -> Labeling:
    """Deterministic consensus of two labelings.

    The second labeling's clusters are aligned to the first's by maximal
    agreement; objects where the aligned labels agree keep that label and
    every disagreeing object gets a fresh singleton label.
    """
    a = _as_labels(c_vec)
    b = _as_labels(c_net)
    if a.size != b.size:
        raise ValueError("labelings have different lengths")
    ua, ai = np.unique(a, return_inverse=True)
    ub, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ua.size, ub.size), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    col_to_row = _align_columns(table)
    aligned = np.array([col_to_row.get(int(c), -1) for c in bi])
    out = np.empty(a.size, dtype=np.int64)
    fresh = ua.size
    for i in range(a.size):
        if aligned[i] == ai[i]:
            out[i] = ai[i]
        else:
            out[i] = fresh
            fresh += 1
    return Labeling(out, int(out.max()) + 1)


def oracle_pick(ari_vec: float, ari_net: float) -> float:
    """The better of the two single-data-type accuracies."""
    return max(ari_vec, ari_net)


# ---------------------------------------------------------------------------
# exact collapsed posterior on tiny instances
# ---------------------------------------------------------------------------


def _logdet(m: np.ndarray) -> float:
    sign, val = np.linalg.slogdet(m)
    if sign <= 0:
        raise ValueError("matrix must be positive definite")
    return float(val)


def _niw_log_marginal(rows: np.ndarray, priors: Priors) -> float:
    """Closed-form Gaussian marginal likelihood under the conjugate prior."""
    m, q = rows.shape
    if m == 0:
        return 0.0
    xbar = rows.mean(axis=0)
    diff = rows - xbar
    s_mat = diff.T @ diff
    d = xbar - priors.mu0
    t_post = (priors.t_scale + s_mat
              + (priors.alpha * m / (priors.alpha + m)) * np.outer(d, d))
    return float(
        -0.5 * m * q * np.log(np.pi)
        + 0.5 * q * (np.log(priors.alpha) - np.log(priors.alpha + m))
        + multigammaln(0.5 * (priors.v0 + m), q) - multigammaln(0.5 * priors.v0, q)
        + 0.5 * priors.v0 * _logdet(priors.t_scale)
        - 0.5 * (priors.v0 + m) * _logdet(t_post)
    )


def _dirichlet_multinomial_log(counts: np.ndarray, a: np.ndarray) -> float:
    total_a = a.sum()
    return float(gammaln(total_a) - gammaln(total_a + counts.sum())
                 + np.sum(gammaln(a + counts) - gammaln(a)))


def _beta_edges_log(s: float, n_b: float, b1: float, b2: float) -> float:
    if n_b == 0:
        return 0.0
    return float(betaln(b1 + s, b2 + (n_b - s)) - betaln(b1, b2))


@dataclass(frozen=True)
class ExactPosterior:
    """Enumerated collapsed posterior over all labelings of a tiny instance."""

    coclustering: np.ndarray
    labelings: np.ndarray
    probabilities: np.ndarray


def exact_posterior(data: VectorDataset, net: Network, priors: Priors,
                    k: int, limit: int = 1_000_000) -> ExactPosterior:
    """Enumerate p(C | X, Y) by integrating all parameters out analytically.

    Valid for the unweighted joint model; the conjugate marginals
    (Dirichlet-multinomial label term, Gaussian term per cluster, Beta term
    per block) make each labeling's unnormalized probability closed-form.
    """
    n = data.n
    if k ** n > limit:
        raise ValueError(f"instance too large to enumerate: {k}^{n} > {limit}")
    adj = net.adjacency
    labelings = np.array(list(product(range(k), repeat=n)), dtype=np.int64)
    log_post = np.empty(labelings.shape[0])
    iu, ju = np.triu_indices(n, 1)
    edge_flags = adj[iu, ju].astype(np.float64)
    for idx in range(labelings.shape[0]):
        lab = labelings[idx]
        counts = np.bincount(lab, minlength=k)
        lp = _dirichlet_multinomial_log(counts, priors.a)
        for c in range(k):
            lp += _niw_log_marginal(data.values[lab == c], priors)
        b_lo = np.minimum(lab[iu], lab[ju])
        b_hi = np.maximum(lab[iu], lab[ju])
        for k1 in range(k):
            for k2 in range(k1, k):
                mask = (b_lo == k1) & (b_hi == k2)
                n_b = float(mask.sum())
                if n_b:
                    lp += _beta_edges_log(float(edge_flags[mask].sum()), n_b,
                                          priors.beta1, priors.beta2)
        log_post[idx] = lp
    log_norm = np.logaddexp.reduce(log_post)
    probs = np.exp(log_post - log_norm)
    cc = np.zeros((n, n))
    for idx in range(labelings.shape[0]):
        lab = labelings[idx]
        cc += probs[idx] * (lab[:, None] == lab[None, :])
    return ExactPosterior(coclustering=cc, labelings=labelings, probabilities=probs)


# ---------------------------------------------------------------------------
# experiment harness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentResult:
    """Per-method ARI samples over seeded datasets for one benchmark case."""

    case_id: int
    per_dataset: dict[str, np.ndarray]

    def mean(self, method: str) -> float:
        return float(np.mean(self.per_dataset[method]))

    def sd(self, method: str) -> float:
        vals = self.per_dataset[method]
        return float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0

    def rows(self):
        for method in METHOD_ORDER:
            if method in self.per_dataset:
                yield method, self.mean(method), self.sd(method)


_METHOD_SLOT = {"Shared": 0, "Vec": 1, "Net": 2}


def _fit_once(data, net, k, *, eta, n_chains, iterations, burn_in, seed,
              beta1, beta2, alpha, truth):
    priors = default_priors(data, k, beta1=beta1, beta2=beta2, alpha=alpha, eta=eta)
    config = ChainConfig(k_max=k, priors=priors, iterations=iterations,
                         burn_in=burn_in, n_chains=n_chains, base_seed=seed)
    summaries, selected = run_chains(data, net, config)
    aris = [adjusted_rand_index(s.map_state.labeling, truth) for s in summaries]
    return float(np.median(aris)), selected.map_state.labeling


def experiment(case_id: int, n_datasets: int = 10, *, n_chains: int = 10,
               iterations: int | None = None, burn_in: int | None = None,
               base_seed: int = 0, eta: float = 0.5, beta1: float = 1.1,
               beta2: float = 1.1, alpha: float = 0.01,
               methods=METHOD_ORDER, progress=None) -> ExperimentResult:
    """Benchmark one case: mean and spread of ARI per method.

    For each seeded dataset the accuracy of a sampler is the median over
    ``n_chains`` chains of its MAP labeling's ARI against the truth; Combine
    consensus uses the cross-chain MAP labeling of each baseline.
    """
    info = case_info(case_id)
    spec = preset(case_id)
    iterations = info.iterations if iterations is None else iterations
    burn_in = info.burn_in if burn_in is None else burn_in
    methods = tuple(methods)
    need_baselines = bool({"Combine", "Oracle", "Net", "Vec"} & set(methods))
    results: dict[str, list[float]] = {m: [] for m in methods}
    for d in range(n_datasets):
        data, net, truth = generate(spec, base_seed + 1_000_000 + d)
        fit_kwargs = dict(n_chains=n_chains, iterations=iterations,
                          burn_in=burn_in, beta1=beta1, beta2=beta2,
                          alpha=alpha, truth=truth)

        def seed_for(method):
            return base_seed + 10_000 * (d + 1) + 1_000 * _METHOD_SLOT[method]

        if "Shared" in methods:
            shared_ari, _ = _fit_once(data, net, info.k, eta=eta,
                                      seed=seed_for("Shared"), **fit_kwargs)
            results["Shared"].append(shared_ari)
        if need_baselines:
            vec_ari, vec_lab = _fit_once(data, net, info.k, eta=1.0,
                                         seed=seed_for("Vec"), **fit_kwargs)
            net_ari, net_lab = _fit_once(data, net, info.k, eta=0.0,
                                         seed=seed_for("Net"), **fit_kwargs)
            if "Vec" in methods:
                results["Vec"].append(vec_ari)
            if "Net" in methods:
                results["Net"].append(net_ari)
            if "Combine" in methods:
                results["Combine"].append(
                    adjusted_rand_index(combine(vec_lab, net_lab), truth))
            if "Oracle" in methods:
                results["Oracle"].append(oracle_pick(vec_ari, net_ari))
        if progress is not None:
            progress(case_id, d, {m: results[m][-1] for m in methods if results[m]})
    return ExperimentResult(case_id=case_id,
                            per_dataset={m: np.asarray(v) for m, v in results.items()})
