"""Seeded random sampling and log-density primitives.

Everything stochastic in the package flows through :class:`RngStream`, a thin
wrapper around ``numpy.random.Generator`` with an explicit 64-bit seed.  The
sampling routines are written against a minimal set of generator primitives
(``random``, ``standard_normal``, ``standard_gamma``) so the compiled Gibbs
kernel and the plain Python API consume the stream identically: the
``_*_draw`` functions below are numba-compiled and are the single
implementation used by both paths.

All matrix work is done with hand-rolled Cholesky/triangular-solve loops
rather than LAPACK so draws are bit-reproducible regardless of the BLAS the
host happens to link.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

BETA_EPS = 1e-12  # Bernoulli parameters are kept inside (0,1) by this margin
SPD_SYM_TOL = 1e-10


class RngStream:
    """A seeded, single-owner random stream.

    Distinct chains must use streams with distinct seeds; a stream must not
    be shared between concurrent consumers.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.gen = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"


# ---------------------------------------------------------------------------
# compiled cores (shared with the Gibbs kernel; see inference._gibbs)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _chol(a, out):
    """Lower Cholesky factor of ``a`` into ``out``; False if not SPD."""
    n = a.shape[0]
    for i in range(n):
        for j in range(i + 1):
            s = a[i, j]
            for k in range(j):
                s -= out[i, k] * out[j, k]
            if i == j:
                if s <= 0.0 or not np.isfinite(s):
                    return False
                out[i, i] = math.sqrt(s)
            else:
                out[i, j] = s / out[j, j]
    return True


@njit(cache=True)
def _chol_robust(a, out):
    """Cholesky with one jittered retry (+1e-9*trace/q on the diagonal).

    Returns 0 on success, 1 on success-after-jitter, 2 on failure.
    """
    if _chol(a, out):
        return 0
    n = a.shape[0]
    tr = 0.0
    for i in range(n):
        tr += a[i, i]
    bumped = a.copy()
    bump = 1e-9 * tr / n
    for i in range(n):
        bumped[i, i] += bump
    if _chol(bumped, out):
        return 1
    return 2


@njit(cache=True)
def _forward_solve(L, b, out):
    """Solve L out = b for lower-triangular L."""
    n = L.shape[0]
    for i in range(n):
        s = b[i]
        for j in range(i):
            s -= L[i, j] * out[j]
        out[i] = s / L[i, i]


@njit(cache=True)
def _logsumexp(v):
    m = -np.inf
    for i in range(v.shape[0]):
        if v[i] > m:
            m = v[i]
    if m == -np.inf:
        return -np.inf
    s = 0.0
    for i in range(v.shape[0]):
        s += math.exp(v[i] - m)
    return m + math.log(s)


@njit(cache=True)
def _categorical_draw(gen, logw):
    """Index draw proportional to exp(logw) via max-shift and one uniform."""
    k = logw.shape[0]
    m = -np.inf
    for i in range(k):
        if logw[i] > m:
            m = logw[i]
    total = 0.0
    w = np.empty(k)
    for i in range(k):
        w[i] = math.exp(logw[i] - m)
        total += w[i]
    r = gen.random() * total
    acc = 0.0
    for i in range(k):
        acc += w[i]
        if r < acc:
            return i
    return k - 1


@njit(cache=True)
def _dirichlet_draw(gen, alpha, out):
    k = alpha.shape[0]
    total = 0.0
    for i in range(k):
        g = gen.standard_gamma(alpha[i])
        if g < 1e-300:
            g = 1e-300
        out[i] = g
        total += g
    for i in range(k):
        out[i] /= total


@njit(cache=True)
def _beta_draw(gen, b1, b2):
    ga = gen.standard_gamma(b1)
    gb = gen.standard_gamma(b2)
    tot = ga + gb
    if tot <= 0.0:
        return 0.5
    x = ga / tot
    if x < BETA_EPS:
        x = BETA_EPS
    elif x > 1.0 - BETA_EPS:
        x = 1.0 - BETA_EPS
    return x


@njit(cache=True)
def _mvnormal_draw(gen, mean, chol_cov, out):
    """Draw mean + L z with z iid standard normal, L lower Cholesky."""
    q = mean.shape[0]
    z = np.empty(q)
    for i in range(q):
        z[i] = gen.standard_normal()
    for i in range(q):
        s = mean[i]
        for j in range(i + 1):
            s += chol_cov[i, j] * z[j]
        out[i] = s


@njit(cache=True)
def _invwishart_draw(gen, chol_scale, dof, out):
    """Draw from InverseWishart(scale, dof) given the lower Cholesky of scale.

    Bartlett construction: A lower-triangular with A[i,i] = sqrt(chi2(dof-i))
    and standard-normal strict lower entries gives A A' ~ Wishart_q(dof, I),
    so with scale T = L L' the matrix (A^{-1} L')' (A^{-1} L') is an
    InverseWishart_q(T, dof) draw.
    """
    q = chol_scale.shape[0]
    a = np.zeros((q, q))
    for i in range(q):
        for j in range(i):
            a[i, j] = gen.standard_normal()
        a[i, i] = math.sqrt(2.0 * gen.standard_gamma(0.5 * (dof - i)))
    # ainv by forward substitution on the identity
    ainv = np.zeros((q, q))
    for c in range(q):
        for i in range(c, q):
            s = 1.0 if i == c else 0.0
            for j in range(c, i):
                s -= a[i, j] * ainv[j, c]
            ainv[i, c] = s / a[i, i]
    # kmat = ainv @ chol_scale.T ; draw = kmat' kmat (exactly symmetric)
    kmat = np.zeros((q, q))
    for i in range(q):
        for j in range(q):
            s = 0.0
            for m in range(q):
                s += ainv[i, m] * chol_scale[j, m]
            kmat[i, j] = s
    for i in range(q):
        for j in range(q):
            s = 0.0
            for m in range(q):
                s += kmat[m, i] * kmat[m, j]
            out[i, j] = s


@njit(cache=True)
def _mvn_logpdf(x, mean, chol_cov):
    """Log density of N(mean, L L') at x, never exponentiating anything."""
    q = x.shape[0]
    z = np.empty(q)
    for i in range(q):
        s = x[i] - mean[i]
        for j in range(i):
            s -= chol_cov[i, j] * z[j]
        z[i] = s / chol_cov[i, i]
    quad = 0.0
    logdet = 0.0
    for i in range(q):
        quad += z[i] * z[i]
        logdet += math.log(chol_cov[i, i])
    return -0.5 * q * math.log(2.0 * math.pi) - logdet - 0.5 * quad


@njit(cache=True)
def _multigammaln(a, d):
    s = 0.25 * d * (d - 1) * math.log(math.pi)
    for j in range(d):
        s += math.lgamma(a - 0.5 * j)
    return s


@njit(cache=True)
def _logdet_from_chol(chol_cov):
    s = 0.0
    for i in range(chol_cov.shape[0]):
        s += math.log(chol_cov[i, i])
    return 2.0 * s


@njit(cache=True)
def _invwishart_logpdf(w, chol_w, chol_scale, dof):
    """Log InverseWishart_q(scale, dof) density at w, given both factors."""
    q = w.shape[0]
    # winv = (L^{-1})' (L^{-1}) with L = chol_w
    linv = np.zeros((q, q))
    for c in range(q):
        for i in range(c, q):
            s = 1.0 if i == c else 0.0
            for j in range(c, i):
                s -= chol_w[i, j] * linv[j, c]
            linv[i, c] = s / chol_w[i, i]
    trace = 0.0
    for i in range(q):
        for j in range(q):
            winv_ij = 0.0
            for m in range(q):
                winv_ij += linv[m, i] * linv[m, j]
            # scale is symmetric; contract entrywise
            trace += winv_ij * _sym_get(chol_scale, i, j)
    # recover logdet(scale) from its factor
    logdet_scale = _logdet_from_chol(chol_scale)
    logdet_w = _logdet_from_chol(chol_w)
    return (
        0.5 * dof * logdet_scale
        - 0.5 * dof * q * math.log(2.0)
        - _multigammaln(0.5 * dof, q)
        - 0.5 * (dof + q + 1) * logdet_w
        - 0.5 * trace
    )


@njit(cache=True)
def _sym_get(chol_scale, i, j):
    # scale = L L' rebuilt entrywise from its lower factor
    s = 0.0
    n = chol_scale.shape[0]
    for m in range(n):
        s += chol_scale[i, m] * chol_scale[j, m]
    return s


@njit(cache=True)
def _beta_logpdf(x, b1, b2):
    if x <= 0.0 or x >= 1.0:
        return -np.inf
    lbeta = math.lgamma(b1) + math.lgamma(b2) - math.lgamma(b1 + b2)
    return (b1 - 1.0) * math.log(x) + (b2 - 1.0) * math.log(1.0 - x) - lbeta


@njit(cache=True)
def _dirichlet_logpdf(p, alpha):
    k = p.shape[0]
    tot_a = 0.0
    norm = 0.0
    s = 0.0
    for i in range(k):
        if p[i] <= 0.0:
            return -np.inf
        tot_a += alpha[i]
        norm += math.lgamma(alpha[i])
        s += (alpha[i] - 1.0) * math.log(p[i])
    return s + math.lgamma(tot_a) - norm


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def check_spd(m, name="matrix"):
    """Validate a symmetric positive-definite matrix; returns its lower factor."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    if np.max(np.abs(m - m.T)) > SPD_SYM_TOL:
        raise ValueError(f"{name} is not symmetric within {SPD_SYM_TOL}")
    low = np.zeros_like(m)
    status = _chol_robust(m, low)
    if status == 2:
        raise ValueError(f"{name} is not positive definite")
    return low


def sample_dirichlet(alpha, rng: RngStream) -> np.ndarray:
    """Draw a probability vector from Dirichlet(alpha)."""
    alpha = np.asarray(alpha, dtype=np.float64).reshape(-1)
    if alpha.size == 0 or np.any(alpha <= 0) or not np.all(np.isfinite(alpha)):
        raise ValueError("Dirichlet parameters must be strictly positive")
    out = np.empty(alpha.size)
    _dirichlet_draw(rng.gen, alpha, out)
    return out


def sample_beta(b1: float, b2: float, rng: RngStream) -> float:
    """Draw from Beta(b1, b2), clamped to [1e-12, 1-1e-12]."""
    if not (b1 > 0 and b2 > 0) or not (np.isfinite(b1) and np.isfinite(b2)):
        raise ValueError("Beta shape parameters must be strictly positive")
    return _beta_draw(rng.gen, float(b1), float(b2))


def sample_categorical(log_weights, rng: RngStream) -> int:
    """Draw an index with probability proportional to exp(log_weights)."""
    logw = np.asarray(log_weights, dtype=np.float64).reshape(-1)
    if logw.size == 0 or np.any(np.isnan(logw)) or not np.any(logw > -np.inf):
        raise ValueError("categorical draw needs at least one finite log weight")
    return int(_categorical_draw(rng.gen, logw))


def sample_mvnormal(mean, cov, rng: RngStream) -> np.ndarray:
    """Draw mean + L z with L the lower Cholesky factor of cov."""
    mean = np.asarray(mean, dtype=np.float64).reshape(-1)
    low = check_spd(cov, "covariance")
    if low.shape[0] != mean.size:
        raise ValueError("mean and covariance dimensions disagree")
    out = np.empty(mean.size)
    _mvnormal_draw(rng.gen, mean, low, out)
    return out


def sample_inverse_wishart(scale, dof: float, rng: RngStream) -> np.ndarray:
    """Draw an SPD matrix from InverseWishart_q(scale, dof), dof > q-1."""
    low = check_spd(scale, "scale")
    q = low.shape[0]
    if not dof > q - 1:
        raise ValueError(f"inverse-Wishart needs dof > q-1 = {q - 1}, got {dof}")
    out = np.empty((q, q))
    _invwishart_draw(rng.gen, low, float(dof), out)
    return out


def logpdf_mvnormal(x, mean, cov) -> float:
    """Exact multivariate normal log density via Cholesky."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    mean = np.asarray(mean, dtype=np.float64).reshape(-1)
    low = check_spd(cov, "covariance")
    if x.size != mean.size or low.shape[0] != x.size:
        raise ValueError("dimension mismatch in mvnormal logpdf")
    return float(_mvn_logpdf(x, mean, low))


def logpdf_inverse_wishart(w, scale, dof: float) -> float:
    """Log InverseWishart_q(scale, dof) density; -inf outside the support."""
    scale_low = check_spd(scale, "scale")
    w = np.asarray(w, dtype=np.float64)
    if w.shape != scale_low.shape:
        raise ValueError("dimension mismatch in inverse-Wishart logpdf")
    w_low = np.zeros_like(w)
    if np.max(np.abs(w - w.T)) > SPD_SYM_TOL or _chol_robust(w, w_low) == 2:
        return -np.inf
    return float(_invwishart_logpdf(w, w_low, scale_low, float(dof)))


def logpdf_beta(x: float, b1: float, b2: float) -> float:
    """Log Beta(b1, b2) density; -inf outside (0,1)."""
    return float(_beta_logpdf(float(x), float(b1), float(b2)))


def logpdf_dirichlet(p, alpha) -> float:
    """Log Dirichlet(alpha) density; -inf off the open simplex."""
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    alpha = np.asarray(alpha, dtype=np.float64).reshape(-1)
    if p.size != alpha.size:
        raise ValueError("dimension mismatch in Dirichlet logpdf")
    if abs(float(p.sum()) - 1.0) > 1e-9:
        return -np.inf
    return float(_dirichlet_logpdf(p, alpha))


def log_sum_exp(v) -> float:
    """ln sum exp(v_i) with max-shift; -inf iff every entry is -inf."""
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError("log_sum_exp of an empty vector")
    return float(_logsumexp(v))
