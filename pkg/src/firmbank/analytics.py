"""Representative-agent solution, tail and log-normal fits, growth rates, synchronization."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .model import PeriodRecord


class TailMethod(str, enum.Enum):
    RANK_REGRESSION = "rank_regression"
    HILL = "hill"


@dataclass(frozen=True)
class AnalyticSolution:
    r_star: float
    xi: float
    r_approx: float
    firm_growth_rate: float
    bank_growth_rate: float


@dataclass(frozen=True)
class TailFit:
    exponent_mu: float
    tail_start: float
    n_tail: int
    stderr: float
    method: TailMethod
    ks_statistic: float


@dataclass(frozen=True)
class LogNormalFit:
    mu_log: float
    sigma_log: float
    ks_statistic: float


@dataclass(frozen=True)
class TailStability:
    fractions: tuple[float, ...]
    exponents: tuple[float, ...]
    stderrs: tuple[float, ...]
    drifting: bool


@dataclass(frozen=True)
class Synchronization:
    periods: np.ndarray
    counts: np.ndarray
    equity_change: np.ndarray
    peak_correlation: float | None
    lagged: dict[int, float | None] = field(default_factory=dict)


def firm_growth_factor(r: float, phi: float, sigma: float) -> float:
    return 1.0 + sigma * (phi - r) / r


def bank_growth_factor(r: float, alpha: float, omega: float) -> float:
    return 1.0 - omega * r + omega * r / alpha


def solve_equilibrium_rate(phi: float, sigma: float, alpha: float, omega: float) -> AnalyticSolution:
    """Rate at which a representative firm and the bank grow at the same pace.

    Equating the two growth factors gives ``xi r^2 + r - phi = 0`` with
    ``xi = (omega / sigma)(1/alpha - 1)``.
    """
    xi = (omega / sigma) * (1.0 / alpha - 1.0)
    if xi == 0.0:
        r = phi
    else:
        # rationalized root: avoids cancellation in -1 + sqrt(1 + 4 phi xi) for small xi
        r = 2.0 * phi / (1.0 + math.sqrt(1.0 + 4.0 * phi * xi))
    return AnalyticSolution(
        r_star=r,
        xi=xi,
        r_approx=phi * (1.0 - phi * xi),
        firm_growth_rate=math.log(firm_growth_factor(r, phi, sigma)),
        bank_growth_rate=math.log(bank_growth_factor(r, alpha, omega)),
    )


def _positive(sizes) -> np.ndarray:
    x = np.asarray(sizes, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("no sizes given")
    if not np.all(x > 0) or not np.all(np.isfinite(x)):
        raise ValueError("sizes must be positive and finite")
    return x


def rank_size(sizes, with_index: bool = False) -> list[tuple]:
    """Sizes in descending order with ranks 1..n; ties keep input (firm index) order.

    With ``with_index`` each entry is ``(rank, firm_index, size)``.
    """
    x = _positive(sizes)
    order = np.argsort(-x, kind="stable")
    if with_index:
        return [(i + 1, int(j), float(x[j])) for i, j in enumerate(order)]
    return [(i + 1, float(x[j])) for i, j in enumerate(order)]


def _descending(x: np.ndarray) -> np.ndarray:
    return -np.sort(-x, kind="stable")


def _n_tail(n: int, tail_fraction: float, hill: bool) -> int:
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    k = int(round(n * tail_fraction))
    # Hill needs one order statistic below the tail as its threshold
    return min(k, n - 1) if hill else min(k, n)


def _pareto_ks(tail: np.ndarray, x_min: float, mu: float) -> float:
    return float(stats.kstest(tail, lambda v: 1.0 - (v / x_min) ** (-mu)).statistic)


def fit_power_tail(sizes, method: TailMethod | str = TailMethod.HILL, tail_fraction: float = 0.1) -> TailFit:
    """Fit ``Rank ~ size^-mu`` to the largest ``tail_fraction`` of sizes.

    Hill: ``mu = k / sum(log(x_i / x_(k+1)))`` over the top ``k`` sizes, stderr ``mu / sqrt(k)``.
    Rank regression: ``mu`` is minus the least-squares slope of log rank on log size.
    """
    method = TailMethod(method)
    x = _descending(_positive(sizes))
    n = x.size
    if method is TailMethod.HILL:
        if n < 50:
            raise ValueError(f"Hill estimation needs at least 50 sizes, got {n}")
        k = _n_tail(n, tail_fraction, hill=True)
        if k < 10:
            raise ValueError(f"tail holds {k} sizes; at least 10 are required")
        x_min = x[k]
        logs = np.log(x[:k] / x_min)
        total = logs.sum()
        if not total > 0:
            raise ValueError("degenerate tail: all tail sizes are equal")
        mu = k / total
        return TailFit(mu, float(x_min), k, mu / math.sqrt(k), method, _pareto_ks(x[:k], x_min, mu))

    if n < 100:
        raise ValueError(f"rank regression needs at least 100 sizes, got {n}")
    k = _n_tail(n, tail_fraction, hill=False)
    if k < 10:
        raise ValueError(f"tail holds {k} sizes; at least 10 are required")
    tail = x[:k]
    lx = np.log(tail)
    if np.ptp(lx) == 0:
        raise ValueError("degenerate tail: all tail sizes are equal")
    ly = np.log(np.arange(1, k + 1))
    res = stats.linregress(lx, ly)
    mu = -res.slope
    x_min = float(tail[-1])
    return TailFit(float(mu), x_min, k, float(res.stderr), method, _pareto_ks(tail, x_min, mu))


def tail_stability(sizes, fractions: Sequence[float] = (0.02, 0.05, 0.1, 0.2)) -> TailStability:
    """Hill exponents over several cutoffs; ``drifting`` flags disagreement beyond 3 combined stderrs.

    A pure power law gives the same exponent at every cutoff; a log-normal body does not.
    """
    fits = [fit_power_tail(sizes, TailMethod.HILL, f) for f in fractions]
    drifting = any(
        abs(a.exponent_mu - b.exponent_mu) > 3.0 * math.hypot(a.stderr, b.stderr)
        for a, b in itertools.combinations(fits, 2)
    )
    return TailStability(
        tuple(fractions),
        tuple(f.exponent_mu for f in fits),
        tuple(f.stderr for f in fits),
        drifting,
    )


def fit_lognormal(sizes) -> LogNormalFit:
    x = _positive(sizes)
    lx = np.log(x)
    if np.ptp(lx) == 0:
        raise ValueError("log-normal fit needs at least two distinct sizes")
    mu, s = float(lx.mean()), float(lx.std())
    ks = float(stats.kstest(lx, "norm", args=(mu, s)).statistic)
    return LogNormalFit(mu, s, ks)


def lognormal_tail_ks(sizes, fit: LogNormalFit, tail: TailFit) -> float:
    """KS distance of the tail sample from the fitted log-normal conditioned on ``x > tail_start``."""
    x = _positive(sizes)
    t = x[x > tail.tail_start]
    z0 = (math.log(tail.tail_start) - fit.mu_log) / fit.sigma_log
    s0 = stats.norm.sf(z0)

    def cdf(v):
        return 1.0 - stats.norm.sf((np.log(v) - fit.mu_log) / fit.sigma_log) / s0

    return float(stats.kstest(t, cdf).statistic)


def growth_rate(series) -> float:
    """Least-squares slope of log(series) against period index."""
    y = np.asarray(series, dtype=float)
    if y.size < 2:
        raise ValueError("growth_rate needs at least two points")
    if not np.all(y > 0):
        raise ValueError("growth_rate needs a positive series")
    t = np.arange(y.size, dtype=float)
    ly = np.log(y)
    tc = t - t.mean()
    return float(np.dot(tc, ly - ly.mean()) / np.dot(tc, tc))


def _corr(a: np.ndarray, b: np.ndarray) -> float | None:
    if a.size < 2 or np.ptp(a) == 0 or np.ptp(b) == 0:
        return None
    return float(np.corrcoef(a, b)[0, 1])


def synchronization_series(history: Sequence[PeriodRecord]):
    """Per-period bankruptcy counts and relative bank-equity changes."""
    periods = np.array([h.period for h in history], dtype=int)
    counts = np.array([h.bankruptcies for h in history], dtype=float)
    change = np.array([(h.bank_equity_end - h.bank_equity) / h.bank_equity for h in history])
    return periods, counts, change


def bankruptcy_synchronization(history: Sequence[PeriodRecord], max_lag: int = 3) -> Synchronization:
    """Correlation between bankruptcy counts and equity losses of the bank.

    ``peak_correlation`` is the zero-lag Pearson correlation between the count in a
    period and the bank's relative equity loss ``max(-dE/E, 0)`` in the same period;
    ``None`` when either series is constant. ``lagged[k]`` pairs losses in period t
    with bankruptcies in period t + k.
    """
    if len(history) < 10:
        raise ValueError("synchronization needs at least 10 periods of history")
    periods, counts, change = synchronization_series(history)
    loss = np.maximum(-change, 0.0)
    lagged = {k: _corr(counts[k:], loss[: loss.size - k]) for k in range(0, max_lag + 1)}
    return Synchronization(periods, counts, change, lagged[0], lagged)


def permutation_null(counts, loss, n_perm: int = 2000, seed: int = 0) -> np.ndarray:
    """Zero-lag correlations after shuffling ``counts`` in time."""
    counts = np.asarray(counts, dtype=float)
    loss = np.asarray(loss, dtype=float)
    rng = np.random.default_rng(seed)
    lc = (loss - loss.mean()) / loss.std()
    out = np.empty(n_perm)
    for i in range(n_perm):
        c = rng.permutation(counts)
        out[i] = np.mean((c - c.mean()) / c.std() * lc)
    return out


def dispersion_index(counts) -> float:
    """Variance-to-mean ratio; 1 for a Poisson process, larger for clustered events."""
    c = np.asarray(counts, dtype=float)
    m = c.mean()
    if m == 0:
        raise ValueError("no events")
    return float(c.var() / m)
