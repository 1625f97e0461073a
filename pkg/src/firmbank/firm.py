"""Per-firm decisions and outcomes.

Every function accepts scalars or numpy arrays; the engine calls them once per
period on the whole population.
"""
from __future__ import annotations

import numpy as np

from .model import FirmState, InfoMode


def planning_equity(f: FirmState, mode: InfoMode | str) -> float:
    """Equity entering the capital plan: current under perfect information, lagged otherwise."""
    return f.equity if InfoMode(mode) is InfoMode.PERFECT else f.equity_prev


def capital_plan(a_plan, r, sigma):
    """Total assets a firm commits to: ``sigma * a_plan / r``."""
    a_plan = np.asarray(a_plan, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(a_plan <= 0):
        raise ValueError("capital_plan needs a positive rate and positive planning equity")
    k = sigma * a_plan / r
    return k if k.ndim else float(k)


def credit_demand(a_plan, a_now, r, sigma):
    """Loan requested from the bank: planned capital minus the equity on hand.

    Negative before clearing is allowed; at the clearing rate it equals the allocated supply.
    """
    d = capital_plan(a_plan, r, sigma) - np.asarray(a_now, dtype=float)
    return d if np.ndim(d) else float(d)


def realized_profit(k, r, u, phi):
    p = (np.asarray(u, dtype=float) * phi - r) * np.asarray(k, dtype=float)
    return p if p.ndim else float(p)


def bankruptcy_probability(k, a, r, phi):
    """Probability that ``u ~ U(0, 2)`` drives end-of-period equity below zero.

    ``a + (u phi - r) k < 0`` iff ``u < (r k - a) / (phi k)``, which has probability
    ``(r k - a) / (2 phi k)`` when positive. Clamped to [0, 1].
    """
    k = np.asarray(k, dtype=float)
    a = np.asarray(a, dtype=float)
    r = np.asarray(r, dtype=float)
    p = np.where(r * k > a, (r * k - a) / (2.0 * phi * k), 0.0)
    p = np.clip(p, 0.0, 1.0)
    return p if p.ndim else float(p)


def end_of_period_update(equity, profit):
    """Return ``(new_equity, bankrupt)``; bankruptcy is strictly negative equity."""
    new_equity = np.asarray(equity, dtype=float) + profit
    bankrupt = new_equity < 0
    if new_equity.ndim:
        return new_equity, bankrupt
    return float(new_equity), bool(bankrupt)


def close_period(f: FirmState, profit: float) -> tuple[FirmState, bool]:
    """Apply a period's profit to a single firm, shifting current equity into the lag slot."""
    new_equity, bankrupt = end_of_period_update(f.equity, profit)
    nxt = FirmState(
        equity=new_equity,
        equity_prev=f.equity,
        capital=f.capital,
        loan=f.loan,
        rate=f.rate,
        shock=f.shock,
        alive=not bankrupt,
        age=f.age + 1,
    )
    return nxt, bankrupt
