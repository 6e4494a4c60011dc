"""
Replay Buffer
Fixed-capacity FIFO store of transitions with uniform minibatch sampling
"""

from collections import deque
from typing import Deque, Generic, Iterator, List, TypeVar

import numpy as np

T = TypeVar("T")


class ReplayBuffer(Generic[T]):
    """Oldest transitions are evicted first once capacity is reached"""

    def __init__(self, capacity: int = 10000):
        if capacity < 1:
            raise ValueError(f"Replay capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: Deque[T] = deque(maxlen=capacity)
        self.total_added = 0

    def add(self, item: T):
        self._items.append(item)
        self.total_added += 1

    def sample(self, batch_size: int, rng: np.random.Generator) -> List[T]:
        """Uniform draw with replacement"""
        if not self._items:
            raise ValueError("Cannot sample from an empty replay buffer")
        indices = rng.integers(0, len(self._items), size=batch_size)
        return [self._items[i] for i in indices]

    @property
    def is_full(self) -> bool:
        return len(self._items) == self.capacity

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[T]:
        return iter(self._items)

    def __getitem__(self, index: int) -> T:
        return self._items[index]

    def __repr__(self):
        return f"<ReplayBuffer {len(self._items)}/{self.capacity}>"
