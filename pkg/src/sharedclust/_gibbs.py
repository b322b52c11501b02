"""Compiled Gibbs sweep and chain kernels.

A sweep updates, in order: per-cluster Gaussian parameters (covariance then
mean), block edge probabilities, every cluster label, mixing weights, and
finally recomputes the unnormalized log joint posterior.  The chain kernel
just initializes and loops the same sweep, so a chain is bit-identical to
repeated single sweeps on the same stream.

Label updates score each candidate cluster against per-cluster neighbor
counts (the N-by-K matrix ``edge_by_cluster``), maintained incrementally as
labels change; because the counts are integers this is exactly equal to
recomputing them from scratch for every object.

The likelihood weights ``wx = 2*eta`` and ``wy = 2*(1-eta)`` scale the data
contributions in both the conditional updates and the posterior score;
parameter priors are untouched, so a zero weight turns the corresponding
conditionals into prior draws and the boundary cases degrade to
single-data-type samplers whose draws do not depend on the ignored data.
"""

import math

import numpy as np
from numba import njit

from .distributions import (
    _beta_draw,
    _beta_logpdf,
    _categorical_draw,
    _chol_robust,
    _dirichlet_draw,
    _dirichlet_logpdf,
    _invwishart_draw,
    _invwishart_logpdf,
    _mvn_logpdf,
    _mvnormal_draw,
)

STATUS_OK = 0
STATUS_CHOL_FAIL = 2


@njit(cache=True)
def _cluster_stats(x, labels, k, counts, xbar, sscp):
    """Two-pass per-cluster counts, means and centered SSCP matrices."""
    n, q = x.shape
    counts[:] = 0
    xbar[:, :] = 0.0
    sscp[:, :, :] = 0.0
    for i in range(n):
        counts[labels[i]] += 1
        for d in range(q):
            xbar[labels[i], d] += x[i, d]
    for c in range(k):
        if counts[c] > 0:
            for d in range(q):
                xbar[c, d] /= counts[c]
    for i in range(n):
        c = labels[i]
        for d1 in range(q):
            diff1 = x[i, d1] - xbar[c, d1]
            for d2 in range(d1 + 1):
                sscp[c, d1, d2] += diff1 * (x[i, d2] - xbar[c, d2])
    for c in range(k):
        for d1 in range(q):
            for d2 in range(d1):
                sscp[c, d2, d1] = sscp[c, d1, d2]


@njit(cache=True)
def _block_counts(labels, counts, nbr_flat, nbr_ptr, k, edges, pairs):
    """Edge and pair totals per unordered block, stored in the upper triangle."""
    n = labels.shape[0]
    edges[:, :] = 0.0
    pairs[:, :] = 0.0
    for i in range(n):
        for idx in range(nbr_ptr[i], nbr_ptr[i + 1]):
            j = nbr_flat[idx]
            if j > i:
                a = labels[i]
                b = labels[j]
                if a <= b:
                    edges[a, b] += 1.0
                else:
                    edges[b, a] += 1.0
    for k1 in range(k):
        pairs[k1, k1] = counts[k1] * (counts[k1] - 1) / 2.0
        for k2 in range(k1 + 1, k):
            pairs[k1, k2] = counts[k1] * counts[k2]


@njit(cache=True)
def _sweep(gen, x, nbr_flat, nbr_ptr, labels, counts, p, mu, sigma, psi,
           mu0, alpha, t_mat, t_low, v0, a_dir, b1, b2, wx, wy):
    """One full Gibbs sweep, mutating the state arrays in place.

    Returns (status, log_post); status != 0 flags a Cholesky failure.
    """
    n, q = x.shape
    k = counts.shape[0]

    xbar = np.empty((k, q))
    sscp = np.empty((k, q, q))
    _cluster_stats(x, labels, k, counts, xbar, sscp)

    # --- per-cluster covariance and mean ---------------------------------
    sig_chol = np.empty((k, q, q))
    scale = np.empty((q, q))
    scale_low = np.zeros((q, q))
    mean_t = np.empty(q)
    cov_low = np.empty((q, q))
    for c in range(k):
        nk = wx * counts[c]
        coef = alpha * nk / (alpha + nk) if counts[c] > 0 else 0.0
        for d1 in range(q):
            for d2 in range(q):
                s = t_mat[d1, d2] + wx * sscp[c, d1, d2]
                if coef != 0.0:
                    s += coef * (xbar[c, d1] - mu0[d1]) * (xbar[c, d2] - mu0[d2])
                scale[d1, d2] = s
        scale_low[:, :] = 0.0
        if _chol_robust(scale, scale_low) == 2:
            return STATUS_CHOL_FAIL, 0.0
        _invwishart_draw(gen, scale_low, v0 + nk, sigma[c])
        low = np.zeros((q, q))
        if _chol_robust(sigma[c], low) == 2:
            return STATUS_CHOL_FAIL, 0.0
        sig_chol[c] = low
        denom = alpha + nk
        for d in range(q):
            mean_t[d] = (alpha * mu0[d] + nk * xbar[c, d]) / denom
        root = math.sqrt(denom)
        for d1 in range(q):
            for d2 in range(q):
                cov_low[d1, d2] = low[d1, d2] / root
        _mvnormal_draw(gen, mean_t, cov_low, mu[c])

    # --- block edge probabilities ---------------------------------------
    edges = np.empty((k, k))
    pairs = np.empty((k, k))
    _block_counts(labels, counts, nbr_flat, nbr_ptr, k, edges, pairs)
    for k1 in range(k):
        for k2 in range(k1, k):
            s_b = wy * edges[k1, k2]
            f_b = wy * (pairs[k1, k2] - edges[k1, k2])
            v = _beta_draw(gen, b1 + s_b, b2 + f_b)
            psi[k1, k2] = v
            psi[k2, k1] = v

    # --- cluster labels ---------------------------------------------------
    gauss = np.zeros((k, n))
    if wx != 0.0:
        for c in range(k):
            for i in range(n):
                gauss[c, i] = _mvn_logpdf(x[i], mu[c], sig_chol[c])
    lnp = np.empty(k)
    for c in range(k):
        lnp[c] = math.log(p[c])
    lnpsi = np.empty((k, k))
    ln1m = np.empty((k, k))
    for k1 in range(k):
        for k2 in range(k):
            lnpsi[k1, k2] = math.log(psi[k1, k2])
            ln1m[k1, k2] = math.log1p(-psi[k1, k2])
    edge_by_cluster = np.zeros((n, k))
    for i in range(n):
        for idx in range(nbr_ptr[i], nbr_ptr[i + 1]):
            edge_by_cluster[i, labels[nbr_flat[idx]]] += 1.0
    scores = np.empty(k)
    for i in range(n):
        old = labels[i]
        for c in range(k):
            sc = lnp[c] + wx * gauss[c, i]
            if wy != 0.0:
                acc = 0.0
                for m in range(k):
                    others = counts[m] - (1 if m == old else 0)
                    e = edge_by_cluster[i, m]
                    acc += e * lnpsi[c, m] + (others - e) * ln1m[c, m]
                sc += wy * acc
            scores[c] = sc
        new = _categorical_draw(gen, scores)
        if new != old:
            labels[i] = new
            counts[old] -= 1
            counts[new] += 1
            for idx in range(nbr_ptr[i], nbr_ptr[i + 1]):
                j = nbr_flat[idx]
                edge_by_cluster[j, old] -= 1.0
                edge_by_cluster[j, new] += 1.0

    # --- mixing weights ----------------------------------------------------
    a_post = np.empty(k)
    for c in range(k):
        a_post[c] = a_dir[c] + counts[c]
    _dirichlet_draw(gen, a_post, p)

    # --- unnormalized log joint posterior ----------------------------------
    llx = 0.0
    if wx != 0.0:
        for i in range(n):
            llx += gauss[labels[i], i]
    lly = 0.0
    if wy != 0.0:
        _block_counts(labels, counts, nbr_flat, nbr_ptr, k, edges, pairs)
        for k1 in range(k):
            for k2 in range(k1, k):
                lly += edges[k1, k2] * lnpsi[k1, k2]
                lly += (pairs[k1, k2] - edges[k1, k2]) * ln1m[k1, k2]
    prior = _dirichlet_logpdf(p, a_dir)
    alpha_root = math.sqrt(alpha)
    for c in range(k):
        prior += _invwishart_logpdf(sigma[c], sig_chol[c], t_low, v0)
        for d1 in range(q):
            for d2 in range(q):
                cov_low[d1, d2] = sig_chol[c, d1, d2] / alpha_root
        prior += _mvn_logpdf(mu[c], mu0, cov_low)
    for k1 in range(k):
        for k2 in range(k1, k):
            prior += _beta_logpdf(psi[k1, k2], b1, b2)
    label_term = 0.0
    for c in range(k):
        label_term += counts[c] * math.log(p[c])
    return STATUS_OK, wx * llx + wy * lly + prior + label_term


@njit(cache=True)
def _init_chain(gen, n, k, a_dir, labels, p):
    """Uniform random labels and a prior draw of the mixing weights."""
    for i in range(n):
        labels[i] = gen.integers(0, k)
    _dirichlet_draw(gen, a_dir, p)


@njit(cache=True)
def _run_chain(gen, x, nbr_flat, nbr_ptr, k, iterations, burn_in,
               mu0, alpha, t_mat, t_low, v0, a_dir, b1, b2, wx, wy,
               record_labels):
    """Initialize and run a full chain; see ``inference.run_chain``.

    Returns the trace, co-clustering sum, kept labelings (empty when not
    recorded), and the maximum-posterior snapshot with its iteration index.
    """
    n, q = x.shape
    labels = np.empty(n, dtype=np.int64)
    counts = np.zeros(k, dtype=np.int64)
    p = np.empty(k)
    mu = np.zeros((k, q))
    sigma = np.zeros((k, q, q))
    psi = np.full((k, k), 0.5)
    for c in range(k):
        for d in range(q):
            sigma[c, d, d] = 1.0
    _init_chain(gen, n, k, a_dir, labels, p)

    trace = np.empty(iterations)
    cc = np.zeros((n, n))
    n_kept = iterations - burn_in
    kept = np.empty((n_kept if record_labels else 0, n), dtype=np.int32)
    best_lp = -np.inf
    best_iter = -1
    best_labels = labels.copy()
    best_p = p.copy()
    best_mu = mu.copy()
    best_sigma = sigma.copy()
    best_psi = psi.copy()

    for t in range(iterations):
        status, lp = _sweep(gen, x, nbr_flat, nbr_ptr, labels, counts, p, mu,
                            sigma, psi, mu0, alpha, t_mat, t_low, v0, a_dir,
                            b1, b2, wx, wy)
        if status != STATUS_OK:
            return (status, trace, cc, kept, best_iter, best_lp, best_labels,
                    best_p, best_mu, best_sigma, best_psi)
        trace[t] = lp
        if t >= burn_in:
            for i in range(n):
                for j in range(i + 1):
                    if labels[i] == labels[j]:
                        cc[i, j] += 1.0
            if record_labels:
                for i in range(n):
                    kept[t - burn_in, i] = labels[i]
            if lp > best_lp:
                best_lp = lp
                best_iter = t
                best_labels[:] = labels
                best_p[:] = p
                best_mu[:, :] = mu
                best_sigma[:, :, :] = sigma
                best_psi[:, :] = psi

    for i in range(n):
        for j in range(i + 1):
            cc[i, j] /= n_kept
            cc[j, i] = cc[i, j]
    return (STATUS_OK, trace, cc, kept, best_iter, best_lp, best_labels,
            best_p, best_mu, best_sigma, best_psi)
