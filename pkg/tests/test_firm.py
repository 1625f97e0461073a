import numpy as np
import pytest
from hypothesis import given, strategies as st

from firmbank import firm
from firmbank.bank import clearing_rate
from firmbank.model import FirmState, InfoMode


def test_planning_equity_modes():
    f = FirmState(equity=10.0, equity_prev=8.0)
    assert firm.planning_equity(f, InfoMode.PERFECT) == 10.0
    assert firm.planning_equity(f, "imperfect") == 8.0


def test_planning_equity_first_period_agrees():
    f = FirmState(equity=20.0, equity_prev=20.0)
    assert firm.planning_equity(f, "perfect") == firm.planning_equity(f, "imperfect") == 20.0


def test_capital_plan_examples():
    assert firm.capital_plan(20.0, 0.1, 0.5) == pytest.approx(100.0, rel=1e-15)
    assert firm.capital_plan(7.0, 1.0, 1.0) == 7.0
    assert firm.capital_plan(20.0, 0.5, 0.5) == 20.0


@pytest.mark.parametrize("a, r", [(20.0, 0.0), (20.0, -0.1), (0.0, 0.1)])
def test_capital_plan_rejects_nonpositive(a, r):
    with pytest.raises(ValueError):
        firm.capital_plan(a, r, 0.5)


def test_credit_demand_examples():
    assert firm.credit_demand(20.0, 20.0, 0.1, 0.5) == pytest.approx(80.0, rel=1e-15)
    assert firm.credit_demand(20.0, 20.0, 0.5, 0.5) == 0.0


def test_credit_demand_meets_supply_at_clearing_rate_imperfect():
    r = clearing_rate(8.0, 10.0, 80.0, 0.5)
    assert firm.credit_demand(8.0, 10.0, r, 0.5) == pytest.approx(80.0, rel=1e-12)


def test_realized_profit_examples():
    assert firm.realized_profit(100.0, 0.1, 1.0, 0.1) == 0.0
    assert firm.realized_profit(100.0, 0.1, 2.0, 0.1) == pytest.approx(10.0, rel=1e-14)
    assert firm.realized_profit(100.0, 0.1, 0.0, 0.1) == pytest.approx(-10.0, rel=1e-14)


@given(
    k=st.floats(0, 1e6),
    r=st.floats(0.001, 1),
    u=st.floats(0, 2, exclude_max=True),
    phi=st.floats(0.001, 1),
    c=st.floats(0, 10),
)
def test_realized_profit_linear_and_bounded(k, r, u, phi, c):
    p = firm.realized_profit(k, r, u, phi)
    assert firm.realized_profit(c * k, r, u, phi) == pytest.approx(c * p, rel=1e-12, abs=1e-9)
    # linear in u: p(u) = p(0) + u * phi * k
    assert p == pytest.approx(firm.realized_profit(k, r, 0.0, phi) + u * phi * k, rel=1e-12, abs=1e-9)
    assert -r * k - 1e-9 <= p <= (2 * phi - r) * k + 1e-9


def test_bankruptcy_probability_examples():
    assert firm.bankruptcy_probability(100.0, 10.0, 0.1, 0.1) == 0.0  # k = a / r
    assert firm.bankruptcy_probability(50.0, 10.0, 0.1, 0.1) == 0.0
    assert firm.bankruptcy_probability(200.0, 10.0, 0.1, 0.1) == pytest.approx(0.25, rel=1e-14)
    # clamp: a hopeless firm
    assert firm.bankruptcy_probability(1e6, 1.0, 1.0, 0.1) == 1.0


def test_bankruptcy_probability_matches_monte_carlo():
    k, a, r, phi = 200.0, 10.0, 0.1, 0.1
    n = 100_000
    u = 2.0 * np.random.default_rng(2024).random(n)
    _, bankrupt = firm.end_of_period_update(np.full(n, a), firm.realized_profit(k, r, u, phi))
    p = firm.bankruptcy_probability(k, a, r, phi)
    se = np.sqrt(p * (1 - p) / n)
    assert abs(bankrupt.mean() - p) < 4 * se


@given(
    a=st.floats(1e-3, 1e6),
    sigma=st.floats(0.01, 1.0),
    r=st.floats(1e-3, 1.0),
    phi=st.floats(1e-3, 1.0),
)
def test_perfect_plan_never_risks_bankruptcy(a, sigma, r, phi):
    k = firm.capital_plan(a, r, sigma)
    assert firm.bankruptcy_probability(k, a, r, phi) == 0.0


@pytest.mark.parametrize(
    "a, profit, new, bankrupt",
    [(10.0, -12.0, -2.0, True), (10.0, -10.0, 0.0, False), (10.0, 5.0, 15.0, False)],
)
def test_end_of_period_update(a, profit, new, bankrupt):
    assert firm.end_of_period_update(a, profit) == (new, bankrupt)


def test_close_period_shifts_lag():
    f = FirmState(equity=10.0, equity_prev=8.0, capital=50.0)
    nxt, bankrupt = firm.close_period(f, 5.0)
    assert (nxt.equity, nxt.equity_prev, nxt.alive, bankrupt) == (15.0, 10.0, True, False)
    nxt, bankrupt = firm.close_period(f, -12.0)
    assert bankrupt and not nxt.alive
