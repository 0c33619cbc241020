"""The clamp-of-Poisson-sum operator on distributions over {-1, 0, +1}.

For a point p of the 2-simplex, let Z be the sum of a Poisson(d_+) number of
iid p-distributed values minus an independent Poisson(d_-) number of them.
The operator T maps p to the law of the clamp psi(Z); phi(p) is half the
expected number of summands that end up opposing the threshold sign of Z.

Exact evaluation routes Z through a difference of two Poisson counts
(means d_+ p(1) + d_- p(-1) and d_+ p(-1) + d_- p(1)): a Poisson number of
iid marks splits into independent Poisson counts per mark value, so only the
+1 and -1 mark counts matter.  That reduction and the matching size-bias
formula for phi are derived identities, so both are cross-checked here by an
independent truncated-convolution evaluation and by direct Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import BudgetError
from .rng import derive_rng

__all__ = [
    "Dist3",
    "SkellamSpec",
    "bar_swap",
    "wasserstein1",
    "apply_T_exact",
    "apply_T_convolution",
    "apply_T_mc",
    "skew_threshold",
    "is_skewed",
    "sample_skewed",
    "find_fixed_point",
    "FixedPointResult",
    "phi_exact",
    "phi_mc",
    "contraction_ratio",
    "gap_condition",
]

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Dist3:
    """Probability distribution on {-1, 0, +1}; stored normalized."""

    p_minus: float
    p_zero: float
    p_plus: float

    def __post_init__(self):
        # fsum: correctly rounded and independent of component order, so
        # normalization commutes with the +-1 swap; skipping the division
        # inside a few ulps of 1 makes it idempotent
        total = math.fsum((self.p_minus, self.p_zero, self.p_plus))
        if min(self.p_minus, self.p_zero, self.p_plus) < 0:
            raise ValueError("probabilities must be nonnegative")
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        scale = total if abs(total - 1.0) > 1e-15 else 1.0
        object.__setattr__(self, "p_minus", float(self.p_minus) / scale)
        object.__setattr__(self, "p_zero", float(self.p_zero) / scale)
        object.__setattr__(self, "p_plus", float(self.p_plus) / scale)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_minus, self.p_zero, self.p_plus)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    @classmethod
    def point_mass(cls, value: int) -> "Dist3":
        return cls(*(1.0 if v == value else 0.0 for v in (-1, 0, 1)))


def bar_swap(p: Dist3) -> Dist3:
    """Swap the +-1 masses (the law of the negated variable)."""
    return Dist3(p.p_plus, p.p_zero, p.p_minus)


def wasserstein1(p: Dist3, q: Dist3) -> float:
    """L1 optimal-transport distance on the 3-point line with unit spacing:
    |p(-1) - q(-1)| + |p(1) - q(1)| (the CDF closed form)."""
    return abs(p.p_minus - q.p_minus) + abs(p.p_plus - q.p_plus)


@dataclass(frozen=True)
class SkellamSpec:
    """Difference of two independent Poisson counts, evaluated by truncating
    the first count's upper tail below tail_tol/2 and using exact Poisson
    cdf/sf terms for the second."""

    mu_plus: float
    mu_minus: float
    tail_tol: float = 1e-10

    _MAX_SUPPORT = 10**7

    def __post_init__(self):
        if self.mu_plus < 0 or self.mu_minus < 0:
            raise ValueError("Poisson means must be nonnegative")
        if not 0 < self.tail_tol <= 1e-6:
            raise ValueError("tail_tol must lie in (0, 1e-6]")

    def _support(self) -> np.ndarray:
        """[0, j_max] with P(first count > j_max) < tail_tol/2."""
        if self.mu_plus == 0:
            return np.arange(1)
        j_max = int(stats.poisson.isf(self.tail_tol / 2, self.mu_plus)) + 1
        while stats.poisson.sf(j_max, self.mu_plus) >= self.tail_tol / 2:
            j_max = 2 * j_max + 1
            if j_max > self._MAX_SUPPORT:
                raise BudgetError("tail tolerance not met within the truncation budget")
        return np.arange(j_max + 1)

    def cdf(self, k: int) -> float:
        """P(Z <= k), summing pmf of the first count against exact sf terms."""
        j = self._support()
        w = stats.poisson.pmf(j, self.mu_plus)
        return float(np.sum(w * stats.poisson.sf(j - k - 1, self.mu_minus)))

    def sf(self, k: int) -> float:
        """P(Z > k); computed directly rather than as 1 - cdf."""
        j = self._support()
        w = stats.poisson.pmf(j, self.mu_plus)
        return float(np.sum(w * stats.poisson.cdf(j - k - 1, self.mu_minus)))

    def pmf(self, k: int) -> float:
        j = self._support()
        w = stats.poisson.pmf(j, self.mu_plus)
        return float(np.sum(w * stats.poisson.pmf(j - k, self.mu_minus)))

    def clamp_law(self) -> tuple[float, float, float]:
        """(P(Z <= -1), P(Z = 0), P(Z >= 1)), unnormalized."""
        j = self._support()
        w = stats.poisson.pmf(j, self.mu_plus)
        lo = float(np.sum(w * stats.poisson.sf(j, self.mu_minus)))
        mid = float(np.sum(w * stats.poisson.pmf(j, self.mu_minus)))
        hi = float(np.sum(w * stats.poisson.cdf(j - 1, self.mu_minus)))
        return lo, mid, hi


def _mark_means(p: Dist3, d_plus: float, d_minus: float) -> tuple[float, float]:
    """Poisson means of the +1 and -1 contributions to Z under p."""
    mu_plus = d_plus * p.p_plus + d_minus * p.p_minus
    mu_minus = d_plus * p.p_minus + d_minus * p.p_plus
    return mu_plus, mu_minus


def apply_T_exact(p: Dist3, d_plus: float, d_minus: float, tail_tol: float = 1e-10) -> Dist3:
    """Law of psi(Z) computed from the two-Poisson reduction, exact up to
    tail_tol of neglected tail mass."""
    if d_plus < 0 or d_minus < 0:
        raise ValueError("d_plus and d_minus must be nonnegative")
    mu_plus, mu_minus = _mark_means(p, d_plus, d_minus)
    lo, mid, hi = SkellamSpec(mu_plus, mu_minus, tail_tol).clamp_law()
    total = lo + mid + hi
    if abs(total - 1.0) > tail_tol:
        raise BudgetError("tail tolerance not met within the truncation budget")
    return Dist3(lo / total, mid / total, hi / total)


def _poisson_count_trunc(d: float, tol: float) -> np.ndarray:
    """Poisson(d) pmf on [0, g_max] with tail mass below tol, from first
    principles (log-factorial weights), keeping this route independent of the
    scipy machinery used by the primary evaluation."""
    if d == 0:
        return np.ones(1)
    weights = [math.exp(-d)]
    log_w = -d
    g = 0
    remaining = 1.0 - weights[0]
    while remaining >= tol or g < d:
        g += 1
        log_w += math.log(d) - math.log(g)
        w = math.exp(log_w)
        weights.append(w)
        remaining -= w
        if g > 10**7:
            raise BudgetError("tail tolerance not met within the truncation budget")
    return np.array(weights)


def _poisson_sum_law(p: Dist3, d: float, tol: float) -> tuple[np.ndarray, int]:
    """Law of the sum of a Poisson(d) number of iid {-1,0,+1} marks, as a
    pmf vector over [-g_max, g_max] with center index g_max."""
    weights = _poisson_count_trunc(d, tol)
    g_max = weights.size - 1
    size = 2 * g_max + 1
    law = np.zeros(size)
    kernel = np.array([p.p_minus, p.p_zero, p.p_plus])
    conv = np.array([1.0])
    for g, w in enumerate(weights):
        if w > 0:
            lo = g_max - g
            law[lo : lo + conv.size] += w * conv
        if g < g_max:
            conv = np.convolve(conv, kernel)
    return law, g_max


def apply_T_convolution(
    p: Dist3, d_plus: float, d_minus: float, tail_tol: float = 1e-10
) -> tuple[float, float, float]:
    """Second exact route for the law of psi(Z): triple convolution over
    truncated Poisson counts of {-1,0,+1}-valued terms.  Returns the raw
    (P(Z<=-1), P(Z=0), P(Z>=1)) triple for cross-checking apply_T_exact."""
    law_a, ca = _poisson_sum_law(p, d_plus, tail_tol / 4)
    law_b, cb = _poisson_sum_law(p, d_minus, tail_tol / 4)
    law_z = np.convolve(law_a, law_b[::-1])
    center = ca + cb
    lo = float(law_z[:center].sum())
    mid = float(law_z[center])
    hi = float(law_z[center + 1 :].sum())
    return lo, mid, hi


def _sample_block_counts(
    rng: np.random.Generator, counts: np.ndarray, p: Dist3
) -> tuple[np.ndarray, np.ndarray]:
    """(#+1 marks, #-1 marks) among `counts[i]` iid p-marks, per sample i."""
    n_plus = rng.binomial(counts, p.p_plus) if p.p_plus > 0 else np.zeros_like(counts)
    rest = counts - n_plus
    denom = p.p_minus + p.p_zero
    if denom > 0 and p.p_minus > 0 and rest.any():
        n_minus = rng.binomial(rest, p.p_minus / denom)
    else:
        n_minus = np.zeros_like(counts)
    return n_plus, n_minus


def apply_T_mc(p: Dist3, d_plus: float, d_minus: float, samples: int, seed: int) -> Dist3:
    """Empirical law of psi(Z) from direct simulation: draw the two Poisson
    counts, then the mark counts of each block conditioned on its size."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = derive_rng(seed, "apply-T-mc")
    g_plus = rng.poisson(d_plus, samples)
    g_minus = rng.poisson(d_minus, samples)
    a_plus, a_minus = _sample_block_counts(rng, g_plus, p)
    b_plus, b_minus = _sample_block_counts(rng, g_minus, p)
    z = (a_plus - a_minus) - (b_plus - b_minus)
    lo = float(np.count_nonzero(z <= -1)) / samples
    hi = float(np.count_nonzero(z >= 1)) / samples
    return Dist3(lo, 1.0 - lo - hi, hi)


def skew_threshold(d_plus: float) -> float:
    """d_+^(-10); log-space evaluation is the fallback for d_plus so large
    that the power expression leaves the normal float range."""
    if d_plus <= 0:
        raise ValueError("skew threshold needs d_plus > 0")
    thr = d_plus**-10.0
    if thr == 0.0 or math.isinf(thr):
        return math.exp(-10.0 * math.log(d_plus))
    return thr


def is_skewed(p: Dist3, d_plus: float) -> bool:
    """p(1) >= 1 - d_+^(-10), evaluated as p(-1) + p(0) <= d_+^(-10) so the
    comparison survives p(1) rounding to 1.0.  For d_plus <= 0 the threshold
    degenerates; only the point mass at +1 counts as skewed there."""
    if d_plus <= 0:
        return p.p_plus == 1.0
    return p.p_minus + p.p_zero <= skew_threshold(d_plus)


def sample_skewed(rng: np.random.Generator, d_plus: float) -> Dist3:
    """Random skewed point: total off-+1 mass uniform in [0, d_+^(-10))."""
    eps = rng.random() * skew_threshold(d_plus)
    split = rng.random()
    return Dist3(eps * split, eps * (1.0 - split), 1.0 - eps)


@dataclass(frozen=True)
class FixedPointResult:
    p_star: Dist3
    iterations: int
    converged: bool
    skewed: bool
    residual: float
    deltas: tuple[float, ...]

    def __iter__(self):
        return iter((self.p_star, self.iterations, self.converged, self.skewed))


def find_fixed_point(
    d_plus: float,
    d_minus: float,
    eps: float = 1e-12,
    max_iter: int = 10_000,
    tail_tol: float = 1e-10,
) -> FixedPointResult:
    """Iterate p -> T(p) from the point mass at +1 until successive iterates
    are within eps in the transport metric and the residual ell1(T(p), p) is
    below 10*eps.  Non-convergence is reported via the flag, not an error."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    p = Dist3.point_mass(1)
    deltas: list[float] = []
    converged = False
    iterations = 0
    residual = math.inf
    for iterations in range(1, max_iter + 1):
        nxt = apply_T_exact(p, d_plus, d_minus, tail_tol)
        delta = wasserstein1(nxt, p)
        deltas.append(delta)
        p = nxt
        if delta < eps:
            residual = wasserstein1(apply_T_exact(p, d_plus, d_minus, tail_tol), p)
            if residual < 10 * eps:
                converged = True
                break
    return FixedPointResult(
        p_star=p,
        iterations=iterations,
        converged=converged,
        skewed=is_skewed(p, d_plus),
        residual=residual,
        deltas=tuple(deltas),
    )


def phi_exact(p: Dist3, d_plus: float, d_minus: float, tail_tol: float = 1e-10) -> float:
    """phi(p) via the Poisson size-bias identity: a distinguished added mark a
    opposes the threshold sign with probability P(psi_tilde(Z + a) = -a), a
    removed one with P(psi_tilde(Z - a) = a), where Z is an independent copy.
    Only a = +-1 contribute; the events reduce to {Z <= -2} and {Z >= 1}."""
    if d_plus < 0 or d_minus < 0:
        raise ValueError("d_plus and d_minus must be nonnegative")
    if d_plus == 0 and d_minus == 0:
        return 0.0
    mu_plus, mu_minus = _mark_means(p, d_plus, d_minus)
    z = SkellamSpec(mu_plus, mu_minus, tail_tol)
    p_low = z.cdf(-2)  # psi_tilde(Z + 1) = -1
    p_high = z.sf(0)  # psi_tilde(Z - 1) = +1
    added = p.p_plus * p_low + p.p_minus * p_high
    removed = p.p_plus * p_high + p.p_minus * p_low
    return 0.5 * (d_plus * added + d_minus * removed)


def phi_mc(
    p: Dist3, d_plus: float, d_minus: float, samples: int, seed: int
) -> tuple[float, float]:
    """Unbiased Monte Carlo of the defining expectation of phi; returns
    (estimate, standard error)."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = derive_rng(seed, "phi-mc")
    g_plus = rng.poisson(d_plus, samples)
    g_minus = rng.poisson(d_minus, samples)
    a_plus, a_minus = _sample_block_counts(rng, g_plus, p)
    b_plus, b_minus = _sample_block_counts(rng, g_minus, p)
    z = (a_plus - a_minus) - (b_plus - b_minus)
    thresh = np.where(z <= -1, -1, 1)
    # added block opposes thresh; removed block matches it
    added = np.where(thresh == 1, a_minus, a_plus)
    removed = np.where(thresh == 1, b_plus, b_minus)
    values = 0.5 * (added + removed)
    est = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    return est, se


def contraction_ratio(p: Dist3, q: Dist3, d_plus: float, d_minus: float) -> float:
    """ell1(T(p), T(q)) / ell1(p, q); rejects p == q."""
    denom = wasserstein1(p, q)
    if denom == 0:
        raise ValueError("contraction ratio undefined for p == q")
    num = wasserstein1(
        apply_T_exact(p, d_plus, d_minus), apply_T_exact(q, d_plus, d_minus)
    )
    return num / denom


def gap_condition(d_plus: float, d_minus: float, c: float) -> tuple[float, float, bool]:
    """(d_+ - d_-, c*sqrt(d_+ ln d_+), lhs >= rhs); the operating regime check."""
    lhs = d_plus - d_minus
    rhs = c * math.sqrt(d_plus * math.log(d_plus)) if d_plus > 1 else 0.0
    return lhs, rhs, lhs >= rhs
