"""The monopolistic bank: credit supply, allocation, clearing rates, profit and equity."""
from __future__ import annotations

import numpy as np

from .model import BankFailure, EconomyMode


def total_credit(e: float, alpha: float) -> float:
    """Aggregate credit allowed by the prudential rule ``L = E / alpha``."""
    if not e > 0:
        raise BankFailure(e)
    return e / alpha


def allocate_credit(l_total: float, k_prev) -> np.ndarray:
    """Split ``l_total`` across firms in proportion to last period's capital."""
    k_prev = np.asarray(k_prev, dtype=float)
    if np.any(k_prev < 0):
        raise ValueError("previous capital must be non-negative")
    # np.sum is a fixed pairwise reduction over a contiguous array: bit-stable for a given n
    total = k_prev.sum()
    if not total > 0:
        raise ValueError("total previous capital is zero; credit cannot be allocated")
    return l_total * (k_prev / total)


def clearing_rate(a_plan, a_now, l_supply, sigma):
    """Rate at which a firm's credit demand meets its allocated supply.

    ``r = sigma * a_plan / (l_supply + a_now)``, so the planned capital
    ``sigma * a_plan / r`` equals ``l_supply + a_now``.
    """
    r = sigma * np.asarray(a_plan, dtype=float) / (np.asarray(l_supply, dtype=float) + a_now)
    return r if r.ndim else float(r)


def bad_debt(new_equity):
    """Unrecovered loan of a bankrupt firm.

    The bank liquidates the firm's assets ``K + profit`` against its loan ``L``;
    the shortfall ``L - (K + profit)`` is ``-new_equity``.
    """
    a = np.asarray(new_equity, dtype=float)
    if np.any(a >= 0):
        raise ValueError("bad_debt applies only to firms with negative equity")
    b = -a
    return b if b.ndim else float(b)


def bank_profit(rates, loans, d: float, e: float, omega: float, bad_debt_total: float = 0.0) -> float:
    """Interest income less deposit and equity costs at the mean firm rate, less bad debt."""
    rates = np.asarray(rates, dtype=float)
    loans = np.asarray(loans, dtype=float)
    if rates.shape != loans.shape:
        raise ValueError("rates and loans must have equal length")
    if rates.size == 0:
        raise ValueError("bank_profit needs at least one firm")
    r_mean = rates.mean()
    return float(np.dot(rates, loans) - r_mean * (1.0 - omega) * d - r_mean * e - bad_debt_total)


def update_bank_equity(e: float, profit: float, mode: EconomyMode | str) -> float:
    mode = EconomyMode(mode)
    if mode is EconomyMode.STATIONARY:
        return e
    if mode is EconomyMode.RANDOM_GROWTH:
        # the bank plays no part in the random growth reduction
        return e
    new = e + profit
    if not new > 0:
        raise BankFailure(new)
    return new
