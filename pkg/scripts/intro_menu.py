"""Audit the two-offer introductory menu and print its expected revenue."""

import numpy as np

from rentmech.audit import audit_monotone, audit_truthful
from rentmech.cost import CostFn
from rentmech.dist import Uniform
from rentmech.reward import RewardFn
from rentmech.swac import example_1_1, expected_reward

m = example_1_1()
g, c = RewardFn.revenue(), CostFn.zero(m.horizon)
print("truthful:", audit_truthful(m, 1000).ok)
mono = audit_monotone(m, g, c, np.arange(0.0, 9.0))
print("allocation witness:", mono.allocation_witness, mono.allocation_values)
print("reward witness:", mono.reward_witness, mono.reward_values)
# agents below the filter walk away, so this is below the naive 0.5*12 + 0.5*4
print("expected revenue on Uniform[0,8]:", expected_reward(m, g, c, Uniform(0.0, 8.0)))
