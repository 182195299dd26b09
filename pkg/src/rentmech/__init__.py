"""Optimal rental mechanisms for agents who refuse any temporarily losing deal."""

from .dist import DiscreteGrid, GridDistribution, Uniform
from .errors import ConfigError, InvariantError, RentmechError
from .reward import RewardFn
from .swac import FiniteMenuSwac, MenuEntry, PaymentSchedule, best_response, expected_reward

__all__ = [
    "ConfigError", "DiscreteGrid", "FiniteMenuSwac", "GridDistribution", "InvariantError",
    "MenuEntry", "PaymentSchedule", "RentmechError", "RewardFn", "Uniform", "best_response",
    "expected_reward",
]
__version__ = "0.1.0"
