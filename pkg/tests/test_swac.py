import numpy as np
import pytest

from rentmech.cost import CostFn
from rentmech.dist import Uniform
from rentmech.errors import IRViolationError
from rentmech.reward import RewardFn
from rentmech.swac import (FiniteMenuSwac, MenuEntry, PaymentSchedule, best_response,
                           designer_reward, example_1_1, expected_reward, payment_filter)

REV = RewardFn.revenue()


def test_filter_values():
    assert payment_filter((3, 4, 2)) == 3.5
    assert payment_filter((4, 0, 0, 0, 0)) == 4
    assert payment_filter((2,) * 6) == 2
    assert payment_filter(()) == 0.0
    assert PaymentSchedule((1.0, 3.0)).filter == 2.0


def test_schedule_validation_and_canonical():
    with pytest.raises(ValueError):
        PaymentSchedule((1.0, -0.5))
    s = PaymentSchedule.canonical(3, 6.0, 4.0)
    assert s.per_day == (4.0, 1.0, 1.0) and s.filter == 4.0 and s.total == 6.0
    assert PaymentSchedule.canonical(1, 2.0, 2.0).per_day == (2.0,)
    assert PaymentSchedule.fixed_rate(4, 2.0).per_day == (0.5,) * 4
    with pytest.raises(ValueError):
        PaymentSchedule.canonical(2, 4.0, 1.0)  # filter below the average
    with pytest.raises(ValueError):
        PaymentSchedule.canonical(0, 1.0, 1.0)


def test_menu_validation():
    free = PaymentSchedule((0.0,))
    with pytest.raises(ValueError):
        MenuEntry(1.0, 1.0, 1, free)
    with pytest.raises(ValueError):
        MenuEntry(0.0, 1.0, 2, free)
    with pytest.raises(ValueError):
        FiniteMenuSwac(1, (MenuEntry(0, 1, 1, free), MenuEntry(1.5, 2, 1, free)))
    with pytest.raises(ValueError):
        FiniteMenuSwac(1, (MenuEntry(0, 1, 2, PaymentSchedule((0.0, 0.0))),))


def test_example_best_responses():
    m = example_1_1()
    br = best_response(m, 3.0)
    assert (br.chosen_entry, br.utility) == (0, 6.0)
    br = best_response(m, 4.0)
    assert (br.chosen_entry, br.utility) == (1, 16.0)
    br = best_response(m, 3.9)
    assert br.chosen_entry == 0 and br.feasible_set == (0,)
    # the second offer is better overall but filtered: 5 * 3.9 - 4 > 6 * 3.9 - 12
    assert m.entries[1].utility(3.9) > br.utility
    # below 2 nothing is affordable
    br = best_response(m, 1.5)
    assert br.chosen_entry is None and br.alloc == 0 and br.utility == 0.0
    with pytest.raises(IRViolationError):
        best_response(m, 1.5, allow_outside=False)


def test_designer_reward():
    m = example_1_1()
    c = CostFn.zero(6)
    assert designer_reward(m, REV, c, 3.0) == 12.0
    assert designer_reward(m, REV, c, 4.0) == 4.0
    free = FiniteMenuSwac(1, (MenuEntry(0.0, 1.0, 1, PaymentSchedule((0.0,))),))
    assert designer_reward(free, RewardFn.consumer_surplus(), CostFn.zero(1), 0.6) == 0.6


def test_ties_go_to_the_designer():
    # both options give utility 0.5 at v = 1; revenue prefers the paid one
    m = FiniteMenuSwac(2, (
        MenuEntry(0.0, 0.5, 1, PaymentSchedule((0.5,))),
        MenuEntry(0.5, 1.0, 2, PaymentSchedule((0.75, 0.75))),
    ))
    assert best_response(m, 1.0, REV).chosen_entry == 1
    assert best_response(m, 1.0, RewardFn.consumer_surplus()).chosen_entry == 0
    assert best_response(m, 1.0).chosen_entry == 0  # lowest index without a reward


def test_expected_reward_example():
    # agents below 2 cannot afford the 2-per-day offer and walk away
    m = example_1_1()
    d = Uniform(0.0, 8.0)
    assert expected_reward(m, REV, None, d) == pytest.approx(0.25 * 12 + 0.5 * 4, abs=1e-12)
    # independent check: dense midpoint average of pointwise rewards
    v = (np.arange(80_000) + 0.5) / 10_000
    brute = np.mean([designer_reward(m, REV, None, x) for x in v[::7]])
    assert brute == pytest.approx(5.0, abs=0.01)


def test_expected_reward_simple_menus():
    cs = RewardFn.consumer_surplus()
    free = FiniteMenuSwac(1, (MenuEntry(0.0, 1.0, 1, PaymentSchedule((0.0,))),))
    assert expected_reward(free, cs, CostFn.zero(1), Uniform(0, 1)) == pytest.approx(0.5)
    empty = FiniteMenuSwac(1, (MenuEntry(0.0, 1.0, 0, PaymentSchedule(())),))
    assert expected_reward(empty, cs, None, Uniform(0, 1)) == 0.0


def test_expected_reward_monte_carlo():
    m = FiniteMenuSwac(3, (
        MenuEntry(0.0, 0.3, 0, PaymentSchedule(())),
        MenuEntry(0.3, 0.7, 1, PaymentSchedule((0.3,))),
        MenuEntry(0.7, 1.0, 3, PaymentSchedule((0.8, 0.2, 0.1))),
    ))
    g, c, d = RewardFn.linear(1.0, 0.5), CostFn((0.0, 0.1, 0.2, 0.25)), Uniform(0, 1)
    exact = expected_reward(m, g, c, d)
    rng = np.random.default_rng(5)
    draws = d.sample(rng, 1_000_000)
    xs = [best_response(m, x, g, c) for x in (0.1, 0.5, 0.9)]
    assert [b.alloc for b in xs] == [0, 1, 3]
    # the 3-day offer is filtered until 0.8, so the 1-day offer runs to 0.8
    assert best_response(m, 0.75, g, c).alloc == 1
    vals = np.where(draws < 0.3, 0.0,
                    np.where(draws < 0.8, draws + 0.5 * 0.3 - 0.1,
                             3 * draws + 0.5 * 1.1 - 0.25))
    se = vals.std(ddof=1) / np.sqrt(len(vals))
    assert abs(vals.mean() - exact) <= 3 * se


def test_serialization_roundtrip():
    m = example_1_1()
    back = FiniteMenuSwac.from_dict(m.to_dict())
    assert back.to_dict() == m.to_dict()
    assert m.entry_index(4.0) == 1 and m.entry_index(8.0) == 1 and m.entry_index(0.0) == 0
    with pytest.raises(ValueError):
        m.entry_index(9.0)
