"""Closed-form predictions for cores of random k-uniform hypergraphs.

Densities are expressed through ``c`` with edge probability ``c / n**(k-1)``;
the matching edge density of the fixed-m model is ``m/n = c / k!``.
All root finders work inside ``lambda in [1e-6, 50]``, which covers
``k, r <= 8`` and ``c <= 100``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

LAMBDA_LO = 1e-6
LAMBDA_HI = 50.0
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class BelowThreshold(ValueError):
    """Raised when a quantity only exists above the core threshold."""


def poisson_pmf(lam: float, j: int) -> float:
    if j < 0:
        return 0.0
    if lam == 0.0:
        return 1.0 if j == 0 else 0.0
    return math.exp(-lam + j * math.log(lam) - math.lgamma(j + 1))


def poisson_tail(lam: float, a: int) -> float:
    """``P[Po(lam) >= a]`` without subtracting nearly equal numbers.

    Below the mean the upper tail is summed term by term (each term is at
    most the previous one); above it the lower sum is small and ``1 - lower``
    is safe.
    """
    if a <= 0:
        return 1.0
    if lam <= 0.0:
        return 0.0
    if lam < a:
        term = poisson_pmf(lam, a)
        total = term
        i = a
        while term > 1e-17 * total:
            i += 1
            term *= lam / i
            total += term
        return min(total, 1.0)
    term = math.exp(-lam)
    lower = term
    for i in range(1, a):
        term *= lam / i
        lower += term
    return 1.0 - lower


def psi(r: int, lam: float) -> float:
    """Psi_r(lam) = e^-lam * sum_{i >= r-1} lam^i / i!."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    return poisson_tail(lam, r - 1)


def f_kr(k: int, r: int, lam: float) -> float:
    """(k-1)! lam / Psi_r(lam)^(k-1); its minimum over lam is the core threshold."""
    return math.factorial(k - 1) * lam / psi(r, lam) ** (k - 1)


def _stationarity(k: int, r: int, lam: float) -> float:
    """Increasing in lam; zero where f_kr is stationary.

    sum_{i>=r-1} lam^i/i! = (k-1) lam^(r-1)/(r-2)!, divided through by
    e^-lam lam^(r-1)/(r-1)!.
    """
    return psi(r, lam) / poisson_pmf(lam, r - 1) - (k - 1) * (r - 1)


def _bisect(fn: Callable[[float], float], lo: float, hi: float) -> float:
    flo = fn(lo)
    if flo == 0:
        return lo
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _golden_min(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-13) -> float:
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fn(x2)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class CriticalPoint:
    c_star: float
    lambda_star: float
    # Same quantities from the stationarity equation, kept for cross-checks.
    c_root: float
    lambda_root: float

    @property
    def rel_gap(self) -> float:
        return abs(self.c_star - self.c_root) / self.c_star


def critical_density(k: int, r: int) -> CriticalPoint:
    """Core threshold c*_{k,r} by two independent routes.

    Golden-section minimisation of f_kr over log(lambda), and bisection on
    the stationarity equation.  The minimum is flat, so the two values of c*
    agree to ~1e-15 while the two lambdas agree only to ~1e-8.
    """
    if k < 2 or r < 2 or k + r <= 4:
        raise ValueError("need k >= 2, r >= 2 and k + r > 4")
    g = _golden_min(lambda s: f_kr(k, r, math.exp(s)), math.log(LAMBDA_LO), math.log(LAMBDA_HI))
    lam_min = math.exp(g)
    lam_root = _bisect(lambda x: _stationarity(k, r, x), LAMBDA_LO, LAMBDA_HI)
    return CriticalPoint(c_star=f_kr(k, r, lam_min), lambda_star=lam_min,
                         c_root=f_kr(k, r, lam_root), lambda_root=lam_root)


def mu_of(k: int, r: int, c: float) -> float:
    """Larger root of f_kr(lambda) = c."""
    crit = critical_density(k, r)
    if c <= crit.c_star:
        raise BelowThreshold(f"c={c} is not above c*={crit.c_star}")
    lo = crit.lambda_root
    hi = LAMBDA_HI
    while f_kr(k, r, hi) <= c:
        hi *= 2.0
    mu = _bisect(lambda x: f_kr(k, r, x) - c, lo, hi)
    if abs(f_kr(k, r, mu) - c) > 1e-10 * c:
        raise ArithmeticError(f"root finder did not converge for c={c}")
    return mu


def branching_margin(k: int, r: int, c: float) -> float:
    """zeta = 1 - (k-1) mu^(r-1) / ((r-2)! sum_{i>=r-1} mu^i/i!).

    Positive exactly above the threshold and increasing in c.
    """
    mu = mu_of(k, r, c)
    return 1.0 - (k - 1) * (r - 1) * poisson_pmf(mu, r - 1) / psi(r, mu)


@dataclass
class StripRecursion:
    """phi_t, lambda_t for t = 0..T and the degree table rho[t, d].

    rho[t, d] approximates the fraction of the n vertices that survive t
    parallel rounds with degree d.  Row 0 is the Poisson(lambda_0) degree
    law of the untouched hypergraph.
    """

    k: int
    r: int
    c: float
    phi: np.ndarray
    lam: np.ndarray
    rho: np.ndarray

    def rho_at(self, t: int, d: int) -> float:
        return _rho(self.r, self.lam, t, d)


def _rho(r: int, lam: np.ndarray, t: int, d: int) -> float:
    if t == 0:
        return poisson_pmf(float(lam[0]), d)
    if d >= r:
        return poisson_pmf(float(lam[t]), d)
    return poisson_pmf(float(lam[t]), d) * poisson_tail(float(lam[t - 1] - lam[t]), r - d)


def strip_recursion(k: int, r: int, c: float, T: int) -> StripRecursion:
    if T < 1:
        raise ValueError("T must be at least 1")
    phi = np.empty(T + 1)
    lam = np.empty(T + 1)
    fact = math.factorial(k - 1)
    phi[0] = 1.0
    lam[0] = c / fact
    for t in range(1, T + 1):
        phi[t] = psi(r, float(lam[t - 1]))
        lam[t] = c * phi[t] ** (k - 1) / fact
    dmax = max(r, int(math.ceil(lam[0] + 12.0 * math.sqrt(lam[0]) + 30)))
    rho = np.array([[_rho(r, lam, t, d) for d in range(dmax + 1)] for t in range(T + 1)])
    return StripRecursion(k=k, r=r, c=c, phi=phi, lam=lam, rho=rho)


def mr_weight(k: int, d: int) -> int:
    """f_k(d) = d [1 - (d-1)(k-1)]; for k = 2 this is d(2-d)."""
    return d * (1 - (d - 1) * (k - 1))


def molloy_reed_sum(k: int, rho: Sequence[float] | Callable[[int], float]) -> float:
    """sum_d rho(d) f_k(d); positive means only logarithmic components.

    A callable ``rho`` is summed until the terms, past their peak, drop
    below 1e-12 in absolute value.
    """
    if callable(rho):
        total = 0.0
        peak = 0.0
        d = 0
        while True:
            term = rho(d) * mr_weight(k, d)
            total += term
            peak = max(peak, abs(term))
            if d > 2 and abs(term) < 1e-12 and abs(term) <= peak:
                return total
            d += 1
    return float(sum(float(p) * mr_weight(k, d) for d, p in enumerate(rho)))


def sat_threshold_estimate(k: int) -> float:
    """Edge density m/n at which the 2-core has as many equations as variables.

    Solves (mu/k) Psi_2(mu) = P[Po(mu) >= 2] for mu above the core threshold
    and converts c = f_{k,2}(mu) to m/n = c / k!.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    crit = critical_density(k, 2)

    def gap(mu: float) -> float:
        return mu / k * psi(2, mu) - poisson_tail(mu, 2)

    mu = _bisect(gap, crit.lambda_root, LAMBDA_HI)
    return f_kr(k, 2, mu) / math.factorial(k)


@dataclass
class ThresholdProfile:
    """Predicted core statistics at density c (fractions of n).

    Fields that only exist above the threshold are None below it.
    """

    k: int
    r: int
    c: float
    m_over_n: float
    c_star: float
    c_star_m_over_n: float
    lambda_star: float
    mu: float | None = None
    zeta: float | None = None
    core_vertex_fraction: float | None = None
    core_edge_density: float | None = None
    gamma: float | None = None
    lambda2: float | None = None
    core_degree_pred: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["core_degree_pred"] = {str(j): p for j, p in self.core_degree_pred.items()}
        return out


def threshold_profile(k: int, r: int, c: float, jmax: int = 12) -> ThresholdProfile:
    crit = critical_density(k, r)
    kfact = math.factorial(k)
    prof = ThresholdProfile(k=k, r=r, c=c, m_over_n=c / kfact, c_star=crit.c_star,
                            c_star_m_over_n=crit.c_star / kfact, lambda_star=crit.lambda_star)
    if c <= crit.c_star:
        return prof
    mu = mu_of(k, r, c)
    prof.mu = mu
    prof.zeta = 1.0 - (k - 1) * (r - 1) * poisson_pmf(mu, r - 1) / psi(r, mu)
    prof.gamma = mu * psi(r, mu)
    prof.core_edge_density = prof.gamma / k
    prof.core_vertex_fraction = poisson_tail(mu, r)
    prof.lambda2 = poisson_pmf(mu, 2)
    prof.core_degree_pred = {j: poisson_pmf(mu, j) for j in range(r, jmax + 1)}
    return prof
