"""Parameters, agent state types and the accounting identities of the firm-bank model."""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass


class InfoMode(str, enum.Enum):
    """Which equity figure a firm uses to draw up its capital plan."""

    PERFECT = "perfect"
    IMPERFECT = "imperfect"


class EconomyMode(str, enum.Enum):
    GROWING = "growing"
    STATIONARY = "stationary"
    RANDOM_GROWTH = "random_growth"


class PriceMode(str, enum.Enum):
    STOCHASTIC = "stochastic"
    DETERMINISTIC = "deterministic"


class Clearing(str, enum.Enum):
    """Imperfect-mode market clearing variant.

    ``CURRENT``: r = sigma * A_prev / (Ls + A), so K = Ls + A and the loan equals the supply.
    ``LAGGED``: r = sigma * A_prev / (Ls + A_prev); kept for sensitivity runs only.
    """

    CURRENT = "current"
    LAGGED = "lagged"


class ParamError(ValueError):
    """Raised when a parameter set violates one of the model's bounds."""


class BankFailure(RuntimeError):
    """The bank's equity is no longer positive, so it cannot extend credit."""

    def __init__(self, equity: float, period: int | None = None):
        self.equity = equity
        self.period = period
        where = "" if period is None else f" in period {period}"
        super().__init__(f"bank failure{where}: equity {equity!r} <= 0")


@dataclass(frozen=True)
class ModelParams:
    phi: float = 0.1
    sigma: float = 0.5
    alpha: float = 0.08
    omega: float = 0.002
    n_firms: int = 10_000
    horizon: int = 1_000
    seed: int = 42
    info_mode: InfoMode = InfoMode.IMPERFECT
    economy_mode: EconomyMode = EconomyMode.GROWING
    price_mode: PriceMode = PriceMode.STOCHASTIC
    clearing: Clearing = Clearing.CURRENT
    initial_equity: float = 20.0
    initial_capital: float = 100.0
    # None means "same as initial_equity"
    entrant_equity: float | None = None
    # None means three evenly spaced epochs ending at the horizon
    snapshots: tuple[int, ...] | None = None

    def __post_init__(self):
        for name, kind in (
            ("info_mode", InfoMode),
            ("economy_mode", EconomyMode),
            ("price_mode", PriceMode),
            ("clearing", Clearing),
        ):
            value = getattr(self, name)
            if not isinstance(value, kind):
                object.__setattr__(self, name, kind(value))
        if self.snapshots is not None:
            object.__setattr__(self, "snapshots", tuple(int(s) for s in self.snapshots))

    @property
    def entrant(self) -> float:
        return self.initial_equity if self.entrant_equity is None else self.entrant_equity

    @property
    def leverage0(self) -> float:
        """Initial capital per unit of equity; entrants start with the same ratio."""
        return self.initial_capital / self.initial_equity

    @property
    def snapshot_periods(self) -> tuple[int, ...]:
        if self.snapshots is not None:
            return self.snapshots
        h = self.horizon
        return tuple(sorted({h // 3, (2 * h) // 3, h}))

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)


def validate_params(p: ModelParams) -> ModelParams:
    """Return ``p`` unchanged, or raise :class:`ParamError` naming the first failed bound."""
    checks = [
        (math.isfinite(p.phi) and p.phi > 0, f"phi must be > 0 (got {p.phi})"),
        (
            math.isfinite(p.sigma) and 0 < p.sigma <= 1,
            f"sigma (safety factor) must satisfy 0 < sigma <= 1 (got {p.sigma})",
        ),
        (
            math.isfinite(p.alpha) and 0 < p.alpha < 1,
            f"alpha (risk coefficient) must satisfy 0 < alpha < 1 (got {p.alpha})",
        ),
        (math.isfinite(p.omega) and p.omega >= 0, f"omega must be >= 0 (got {p.omega})"),
        (int(p.n_firms) == p.n_firms and p.n_firms >= 1, f"n_firms must be >= 1 (got {p.n_firms})"),
        (int(p.horizon) == p.horizon and p.horizon >= 0, f"horizon must be >= 0 (got {p.horizon})"),
        (0 <= p.seed < 2**64, f"seed must be a 64-bit unsigned integer (got {p.seed})"),
        (
            math.isfinite(p.initial_equity) and p.initial_equity > 0,
            f"initial_equity must be > 0 (got {p.initial_equity})",
        ),
        (
            math.isfinite(p.initial_capital) and p.initial_capital >= p.initial_equity,
            f"initial_capital must be >= initial_equity (got {p.initial_capital} < {p.initial_equity})",
        ),
        (
            math.isfinite(p.entrant) and p.entrant > 0,
            f"entrant_equity must be > 0 (got {p.entrant_equity})",
        ),
        (
            all(0 <= s <= p.horizon for s in p.snapshot_periods),
            f"snapshot periods must lie in [0, horizon={p.horizon}] (got {p.snapshot_periods})",
        ),
    ]
    for ok, message in checks:
        if not ok:
            raise ParamError(message)
    return p


def initial_bank_equity(p: ModelParams) -> float:
    """Bank equity that makes the prudential rule hold exactly at t=0.

    With every firm borrowing ``K0 - A0`` the aggregate credit is ``n (K0 - A0)`` and
    the rule ``L = E / alpha`` fixes ``E``.
    """
    return p.alpha * p.n_firms * (p.initial_capital - p.initial_equity)


@dataclass
class FirmState:
    equity: float
    equity_prev: float
    capital: float = 0.0
    loan: float = 0.0
    rate: float = 0.0
    shock: float = 1.0
    alive: bool = True
    age: int = 0

    @classmethod
    def initial(cls, p: ModelParams) -> "FirmState":
        return cls(
            equity=p.initial_equity,
            equity_prev=p.initial_equity,
            capital=p.initial_capital,
            loan=p.initial_capital - p.initial_equity,
        )


@dataclass
class BankState:
    equity: float
    credit_total: float = 0.0
    deposits: float = 0.0
    profit: float = 0.0
    mean_rate: float = 0.0
    bad_debt: float = 0.0

    @classmethod
    def with_credit(cls, equity: float, credit_total: float, **kw) -> "BankState":
        # deposits are the balance-sheet residual
        return cls(equity=equity, credit_total=credit_total, deposits=credit_total - equity, **kw)


@dataclass(frozen=True)
class PeriodRecord:
    period: int
    bank_equity: float
    bank_equity_end: float
    bank_profit: float
    bad_debt: float
    bankruptcies: int
    mean_rate: float
    total_assets: float
    total_equity: float
    credit_total: float
    deposits: float

    @classmethod
    def fields(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))
