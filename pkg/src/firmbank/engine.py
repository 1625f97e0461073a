"""Period loop for the firm-bank economy and its bank-free random growth reduction.

Firm state lives in numpy arrays indexed by firm slot. Price shocks are drawn from a
counter-based generator keyed by the master seed, with the period in the counter, so
``u[i, t]`` depends only on ``(seed, t, i)``: any slice of firms can be drawn
independently and a replacement firm inherits its slot's stream.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import bank as bk
from . import firm as fm
from .model import (
    BankFailure,
    BankState,
    Clearing,
    EconomyMode,
    FirmState,
    InfoMode,
    ModelParams,
    PeriodRecord,
    PriceMode,
    initial_bank_equity,
    validate_params,
)

log = logging.getLogger(__name__)


def period_uniforms(seed: int, period: int, n: int, start: int = 0) -> np.ndarray:
    """Uniform draws on [0, 1) for firm slots ``start .. start + n - 1`` in ``period``."""
    bitgen = np.random.Philox(key=seed, counter=[0, 0, period, 0])
    # Philox emits four 64-bit words per counter step, one word per double
    skip, offset = divmod(start, 4)
    if skip:
        bitgen.advance(skip)
    return np.random.Generator(bitgen).random(offset + n)[offset:]


def price_shocks(p: ModelParams, period: int, n: int | None = None) -> np.ndarray:
    n = p.n_firms if n is None else n
    if p.price_mode is PriceMode.DETERMINISTIC:
        return np.ones(n)
    return 2.0 * period_uniforms(p.seed, period, n)


@dataclass(frozen=True)
class BankruptcyEvent:
    period: int
    firm: int
    size: float
    bad_debt: float


class BankruptcyLog:
    """Column store of bankruptcies; iterating yields :class:`BankruptcyEvent`."""

    def __init__(self):
        self._chunks: list[tuple[int, np.ndarray, np.ndarray, np.ndarray]] = []

    def append(self, period: int, firms, sizes, debts) -> None:
        if len(firms):
            self._chunks.append((period, np.asarray(firms), np.asarray(sizes), np.asarray(debts)))

    def __len__(self) -> int:
        return sum(len(c[1]) for c in self._chunks)

    def __iter__(self) -> Iterator[BankruptcyEvent]:
        for period, firms, sizes, debts in self._chunks:
            for i, s, b in zip(firms.tolist(), sizes.tolist(), debts.tolist()):
                yield BankruptcyEvent(period, i, s, b)

    def columns(self) -> dict[str, np.ndarray]:
        if not self._chunks:
            empty = np.empty(0)
            return {"period": empty.astype(int), "firm": empty.astype(int), "size": empty, "bad_debt": empty}
        return {
            "period": np.concatenate([np.full(len(c[1]), c[0]) for c in self._chunks]),
            "firm": np.concatenate([c[1] for c in self._chunks]),
            "size": np.concatenate([c[2] for c in self._chunks]),
            "bad_debt": np.concatenate([c[3] for c in self._chunks]),
        }


@dataclass
class SimulationRun:
    params: ModelParams
    history: list[PeriodRecord] = field(default_factory=list)
    snapshots: dict[int, np.ndarray] = field(default_factory=dict)
    bankruptcy_log: BankruptcyLog = field(default_factory=BankruptcyLog)
    terminal: str = "completed"

    @property
    def completed(self) -> bool:
        return self.terminal == "completed"

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.history])


class Simulation:
    """Mutable economy state advanced one period at a time by :meth:`step`.

    After a step the arrays describing that period (``capital``, ``loan``, ``rate``,
    ``shock``, ``equity_start``, ``supply``) and ``bank`` stay available for observers.
    """

    def __init__(self, params: ModelParams):
        p = validate_params(params)
        self.params = p
        n = p.n_firms
        self.period = 0
        self.equity = np.full(n, p.initial_equity)
        self.equity_prev = self.equity.copy()
        self.capital_prev = np.full(n, p.initial_capital)
        self.age = np.zeros(n, dtype=np.int64)
        self.bank_equity = initial_bank_equity(p) if p.economy_mode is not EconomyMode.RANDOM_GROWTH else 0.0

        self.equity_start = self.equity.copy()
        self.equity_prev_start = self.equity.copy()
        self.capital = self.capital_prev.copy()
        self.loan = self.capital - self.equity
        self.supply = self.loan.copy()
        self.rate = np.zeros(n)
        self.shock = np.ones(n)
        self.bank = BankState.with_credit(self.bank_equity, float(self.loan.sum()))

        self.run = SimulationRun(params=p)
        self._snap_at = set(p.snapshot_periods)
        self._snapshot()

    # -- observers -----------------------------------------------------------------

    def firm(self, i: int) -> FirmState:
        """The firm in slot ``i`` as seen during the last completed period."""
        return FirmState(
            equity=float(self.equity_start[i]),
            equity_prev=float(self.equity_prev_start[i]),
            capital=float(self.capital[i]),
            loan=float(self.loan[i]),
            rate=float(self.rate[i]),
            shock=float(self.shock[i]),
            alive=True,
            age=int(self.age[i]),
        )

    def sizes(self) -> np.ndarray:
        """Firm sizes at the current period boundary (entrants at their notional capital)."""
        if self.params.economy_mode is EconomyMode.RANDOM_GROWTH:
            return self.params.leverage0 * self.equity
        return self.capital_prev.copy()

    def identity_residuals(self) -> dict[str, float]:
        """Relative residuals of the balance-sheet identities for the last period."""
        scale_k = max(float(np.abs(self.capital).max()), 1e-300)
        firm = float(np.abs(self.capital - self.equity_start - self.loan).max()) / scale_k
        b = self.bank
        scale_l = max(abs(b.credit_total), 1e-300)
        bank_bs = abs(b.credit_total - b.deposits - b.equity) / scale_l
        out = {"firm_balance": firm, "bank_balance": bank_bs}
        if self.params.economy_mode is not EconomyMode.RANDOM_GROWTH:
            out["prudential"] = abs(b.credit_total - b.equity / self.params.alpha) / scale_l
            if self.params.info_mode is InfoMode.PERFECT or self.params.clearing is Clearing.CURRENT:
                out["clearing"] = abs(float(self.loan.sum()) - b.credit_total) / scale_l
        return out

    def _snapshot(self) -> None:
        if self.period in self._snap_at:
            self.run.snapshots[self.period] = self.sizes()

    # -- dynamics ------------------------------------------------------------------

    def step(self) -> PeriodRecord:
        if self.params.economy_mode is EconomyMode.RANDOM_GROWTH:
            return self._step_random_growth()
        return self._step_credit()

    def _step_credit(self) -> PeriodRecord:
        p = self.params
        t = self.period
        e = self.bank_equity
        a = self.equity

        l_total = bk.total_credit(e, p.alpha)
        supply = bk.allocate_credit(l_total, self.capital_prev)

        a_plan = a if p.info_mode is InfoMode.PERFECT else self.equity_prev
        a_clear = a_plan if p.clearing is Clearing.LAGGED else a
        r = bk.clearing_rate(a_plan, a_clear, supply, p.sigma)
        k = fm.capital_plan(a_plan, r, p.sigma)
        loan = k - a

        u = price_shocks(p, t)
        profit = fm.realized_profit(k, r, u, p.phi)
        new_equity, bankrupt = fm.end_of_period_update(a, profit)
        failed = np.flatnonzero(bankrupt)
        debts = bk.bad_debt(new_equity[failed]) if failed.size else np.empty(0)
        debt_total = float(debts.sum())

        deposits = l_total - e
        pi = bk.bank_profit(r, loan, deposits, e, p.omega, debt_total)
        r_mean = float(r.mean())

        self.equity_start, self.equity_prev_start = a, self.equity_prev
        self.capital, self.loan, self.rate, self.shock, self.supply = k, loan, r, u, supply
        self.bank = BankState(e, l_total, deposits, pi, r_mean, debt_total)
        self.run.bankruptcy_log.append(t, failed, k[failed], debts)

        try:
            e_end = bk.update_bank_equity(e, pi, p.economy_mode)
        except BankFailure as exc:
            self._record(t, e, e + pi, pi, debt_total, failed.size, r_mean, k, a, l_total, deposits)
            raise BankFailure(exc.equity, t) from None

        record = self._record(t, e, e_end, pi, debt_total, failed.size, r_mean, k, a, l_total, deposits)

        self.bank_equity = e_end
        self.equity_prev = a
        self.equity = new_equity
        self.capital_prev = k.copy()
        self.age = self.age + 1
        if failed.size:
            self._replace(failed)
        self.period = t + 1
        self._snapshot()
        return record

    def _step_random_growth(self) -> PeriodRecord:
        # r = phi decouples firms from the bank: A' = A + (u - 1)/2 * A_prev
        p = self.params
        t = self.period
        a = self.equity
        u = price_shocks(p, t)
        new_equity, bankrupt = fm.end_of_period_update(a, 0.5 * (u - 1.0) * self.equity_prev)
        failed = np.flatnonzero(bankrupt)
        k = p.leverage0 * a
        shortfall = -new_equity[failed]

        self.equity_start, self.equity_prev_start = a, self.equity_prev
        self.capital, self.loan, self.rate, self.shock = k, k - a, np.full(a.size, p.phi), u
        self.supply = self.loan
        self.bank = BankState(0.0, 0.0, 0.0, 0.0, p.phi, 0.0)
        self.run.bankruptcy_log.append(t, failed, k[failed], shortfall)
        record = self._record(t, 0.0, 0.0, 0.0, 0.0, failed.size, p.phi, k, a, 0.0, 0.0)

        self.equity_prev = a
        self.equity = new_equity
        self.age = self.age + 1
        if failed.size:
            self._replace(failed)
        self.period = t + 1
        self._snapshot()
        return record

    def _replace(self, slots: np.ndarray) -> None:
        p = self.params
        self.equity[slots] = p.entrant
        # equity_prev aliases equity_start, which observers read
        self.equity_prev = self.equity_prev.copy()
        self.equity_prev[slots] = p.entrant
        self.capital_prev[slots] = p.entrant * p.leverage0
        self.age[slots] = 0

    def _record(self, t, e, e_end, pi, debt, n_failed, r_mean, k, a, l_total, deposits) -> PeriodRecord:
        rec = PeriodRecord(
            period=t,
            bank_equity=float(e),
            bank_equity_end=float(e_end),
            bank_profit=float(pi),
            bad_debt=float(debt),
            bankruptcies=int(n_failed),
            mean_rate=float(r_mean),
            total_assets=float(k.sum()),
            total_equity=float(a.sum()),
            credit_total=float(l_total),
            deposits=float(deposits),
        )
        self.run.history.append(rec)
        return rec


Observer = Callable[[Simulation], None]


def run(params: ModelParams, observer: Observer | None = None) -> SimulationRun:
    """Simulate ``params.horizon`` periods, stopping early if the bank fails.

    ``observer`` is called after every period, including a terminal one.
    """
    sim = Simulation(params)
    for _ in range(sim.params.horizon):
        try:
            sim.step()
        except BankFailure as exc:
            log.info("%s; keeping %d periods of history", exc, len(sim.run.history))
            sim.run.terminal = "bank_failure"
            if observer is not None:
                observer(sim)
            break
        if observer is not None:
            observer(sim)
    return sim.run


def run_random_growth(params: ModelParams, observer: Observer | None = None) -> SimulationRun:
    return run(params.replace(economy_mode=EconomyMode.RANDOM_GROWTH), observer)
