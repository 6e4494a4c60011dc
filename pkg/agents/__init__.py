"""
Learning agents: skill discovery and the two DQN decision makers
"""

from .replay import ReplayBuffer

__all__ = ["ReplayBuffer"]
