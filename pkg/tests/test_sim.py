import math
from dataclasses import replace

import numpy as np
import pytest

from rentmech import fixed_rate as fr
from rentmech import threshold as th
from rentmech.dist import Uniform
from rentmech.reward import RewardFn
from rentmech.sim import DayRecord, RentalMechanism, RunLog, replay, simulate
from rentmech.swac import FiniteMenuSwac, MenuEntry, PaymentSchedule

U = Uniform(0.0, 1.0)
CS = RewardFn.consumer_surplus()


def test_fixed_rate_consumer_surplus():
    plans = fr.precompute_fixed_rate(10, U, CS)
    res = simulate(fr.rental_mechanism(plans), U, seed=11, episodes=100_000)
    assert abs(res.mean - 5.0) <= 3 * res.stderr


def test_single_day_free_unit():
    mech = RentalMechanism((FiniteMenuSwac(1, (MenuEntry(0.0, 2.0, 1, PaymentSchedule((0.0,))),)),),
                           RewardFn.welfare())
    res = simulate(mech, Uniform(0.0, 2.0), seed=1, episodes=50_000)
    assert abs(res.mean - 1.0) <= 3 * res.stderr


def test_logs_replay_and_stagewise_ir():
    plan = th.precompute_threshold(6, U, CS)
    res = simulate(th.rental_mechanism(plan), U, seed=7, episodes=2000, log_episodes=25)
    assert len(res.logs) == 25
    for log in res.logs:
        assert replay(log).ok
        for r in log.records:
            if r.available and r.alloc == r.horizon and r.alloc > 1:
                assert r.arrival_valuation >= plan.tau[r.horizon]


def test_replay_flags_corruption():
    plans = fr.precompute_fixed_rate(3, U, RewardFn.revenue())
    res = simulate(fr.rental_mechanism(plans), U, seed=2, episodes=50, log_episodes=10)
    log = next(l for l in res.logs if any(r.payment > 0 for r in l.records))
    k = next(i for i, r in enumerate(log.records) if r.payment > 0)
    bumped = list(log.records)
    bumped[k] = replace(bumped[k], payment=bumped[k].payment + 0.1)
    rep = replay(replace(log, records=tuple(bumped)))
    assert rep.reward_mismatch is not None
    # charging above the valuation breaks stagewise-IR
    bumped[k] = replace(log.records[k], payment=5.0)
    assert replay(replace(log, records=tuple(bumped))).ir_violations


def test_replay_flags_bookkeeping():
    g = RewardFn.welfare()
    recs = (DayRecord(1, 2, 0.5, True, 2, 0.5, 0.0), DayRecord(2, 1, 0.7, True, 1, 0.7, 0.0))
    rep = replay(RunLog(recs, 1.2, g))
    assert rep.bookkeeping


def test_determinism_and_common_random_numbers():
    plans = fr.precompute_fixed_rate(4, U, RewardFn.revenue())
    tplan = th.precompute_threshold(4, U, CS)
    a = simulate(fr.rental_mechanism(plans), U, seed=5, episodes=70_000, log_episodes=4)
    b = simulate(fr.rental_mechanism(plans), U, seed=5, episodes=70_000, log_episodes=4)
    assert a.mean == b.mean and a.logs == b.logs
    assert np.array_equal(a.rewards, b.rewards)
    c = simulate(th.rental_mechanism(tplan), U, seed=5, episodes=70_000, log_episodes=4)
    arrivals = lambda r: [d.arrival_valuation for log in r.logs for d in log.records]  # noqa: E731
    assert arrivals(a) == arrivals(c)


def test_per_day_distributions():
    ds = [Uniform(0.0, 2.0), Uniform(0.0, 1.0)]  # D_2, D_1
    plans = fr.precompute_fixed_rate(2, ds, RewardFn.welfare())
    res = simulate(fr.rental_mechanism(plans), ds, seed=9, episodes=200_000)
    assert abs(res.mean - plans.R[2]) <= 3 * res.stderr


def test_mechanism_validation_and_roundtrip():
    free = lambda h: FiniteMenuSwac(h, (MenuEntry(0.0, 1.0, 1, PaymentSchedule((0.0,))),))  # noqa: E731
    with pytest.raises(ValueError):
        RentalMechanism((free(1), free(2)), CS)
    mech = RentalMechanism((free(2), free(1)), CS, name="free")
    assert RentalMechanism.from_dict(mech.to_dict()) == mech
    with pytest.raises(ValueError):
        simulate(mech, U, seed=0, episodes=0)
    one = simulate(mech, U, seed=0, episodes=1)
    assert math.isnan(one.stderr)
