"""Exact hypergeometric distribution, one-tailed mid-p-values, and the
Benjamini-Hochberg step-up adjustment.

The pmf over the whole support is built once per parameter triple from the
term-ratio recurrence in log space, normalized to unit mass, and cached.
Tail sums always accumulate the requested side directly from that array, so
deep tails keep full relative precision instead of collapsing into
1 - (bulk mass) cancellation. No normal or binomial approximation is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import lgamma

import numpy as np


@dataclass(frozen=True)
class HypergeomParams:
    """Population stubs N, success stubs K, and draw count n."""

    N: int
    K: int
    n: int

    def __post_init__(self) -> None:
        if not (0 <= self.K <= self.N and 0 <= self.n <= self.N):
            raise ValueError(f"invalid hypergeometric parameters {self}")

    @property
    def support(self) -> tuple[int, int]:
        return max(0, self.n + self.K - self.N), min(self.n, self.K)

    @property
    def mean(self) -> float:
        return self.n * self.K / self.N if self.N > 0 else 0.0


def log_choose(n: int, k: int) -> float:
    """ln C(n, k); -inf when k < 0 or k > n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if k < 0 or k > n:
        return -np.inf
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


@lru_cache(maxsize=512)
def _support_pmf(params: HypergeomParams) -> np.ndarray:
    """Unit-normalized pmf over the support, indexed from support[0].

    The cache bound keeps memory flat across long simulation runs while
    still covering every family of a single report.
    """
    N, K, n = params.N, params.K, params.n
    lo, hi = params.support
    if hi == lo:
        out = np.ones(1)
    else:
        xs = np.arange(lo, hi, dtype=np.float64)
        # pmf(x+1) / pmf(x) of the hypergeometric, strictly positive inside
        # the support, so the log walk below never sees a zero.
        ratios = (np.log((K - xs) * (n - xs))
                  - np.log((xs + 1.0) * (N - K - n + xs + 1.0)))
        logw = np.concatenate(([0.0], np.cumsum(ratios)))
        logw -= logw.max()
        out = np.exp(logw)
        out /= out.sum()
    out.setflags(write=False)
    return out


def hypergeom_pmf(x: int, params: HypergeomParams) -> float:
    lo, hi = params.support
    if x < lo or x > hi:
        return 0.0
    return float(_support_pmf(params)[x - lo])


def upper_mid_p(x_obs: int, params: HypergeomParams) -> float:
    """Mid-p-value of the overenrichment tail: P(X > x) + P(X = x) / 2."""
    lo, hi = params.support
    if x_obs < lo:
        return 1.0
    if x_obs > hi:
        return 0.0
    pmf = _support_pmf(params)
    i = x_obs - lo
    return min(0.5 * float(pmf[i]) + float(pmf[i + 1:].sum()), 1.0)


def lower_mid_p(x_obs: int, params: HypergeomParams) -> float:
    """Mid-p-value of the underenrichment tail: P(X < x) + P(X = x) / 2."""
    lo, hi = params.support
    if x_obs < lo:
        return 0.0
    if x_obs > hi:
        return 1.0
    pmf = _support_pmf(params)
    i = x_obs - lo
    return min(0.5 * float(pmf[i]) + float(pmf[:i].sum()), 1.0)


def bh_adjust(pvalues) -> np.ndarray:
    """Benjamini-Hochberg step-up adjusted p-values, in the input order.

    p_adj for the i-th smallest p is min over j >= i of min(1, m * p_(j) / j).
    """
    p = np.asarray(pvalues, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("expected a flat sequence of p-values")
    if p.size == 0:
        return p.copy()
    if p.min() < 0.0 or p.max() > 1.0:
        raise ValueError("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adj = np.minimum(np.minimum.accumulate(scaled[::-1])[::-1], 1.0)
    out = np.empty_like(adj)
    out[order] = adj
    return out
