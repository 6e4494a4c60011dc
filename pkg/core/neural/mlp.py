"""
Feedforward Networks
Fixed-topology leaky-ReLU MLPs with Xavier-normal init and exact reverse-mode gradients
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

NEGATIVE_SLOPE = 0.01


@dataclass
class MlpParams:
    """
    Weights are stored (fan_in, fan_out) so a batch of row vectors maps as x @ W + b
    Hidden layers use leaky-ReLU, the output layer is affine.
    """
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    role: str = "generic"
    negative_slope: float = NEGATIVE_SLOPE

    @property
    def layer_sizes(self) -> List[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[1]

    def parameters(self) -> List[np.ndarray]:
        return [*self.weights, *self.biases]

    def copy(self) -> "MlpParams":
        return MlpParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            role=self.role,
            negative_slope=self.negative_slope,
        )

    def load_from(self, other: "MlpParams"):
        """Hard copy of another network's values into this one"""
        for mine, theirs in zip(self.parameters(), other.parameters()):
            mine[...] = theirs

    def soft_update(self, source: "MlpParams", tau: float):
        """self <- tau * source + (1 - tau) * self"""
        for mine, theirs in zip(self.parameters(), source.parameters()):
            mine *= 1.0 - tau
            mine += tau * theirs

    def equals(self, other: "MlpParams") -> bool:
        return len(self.weights) == len(other.weights) and all(
            np.array_equal(a, b) for a, b in zip(self.parameters(), other.parameters())
        )

    def __repr__(self):
        return f"<MlpParams {self.role} {'x'.join(str(s) for s in self.layer_sizes)}>"


@dataclass
class Gradients:
    """d loss / d parameter, shape-matched to the owner network, plus d loss / d input"""
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    input_grad: Optional[np.ndarray] = None

    @classmethod
    def zeros_like(cls, net: MlpParams) -> "Gradients":
        return cls(
            weights=[np.zeros_like(w) for w in net.weights],
            biases=[np.zeros_like(b) for b in net.biases],
        )

    def parameters(self) -> List[np.ndarray]:
        return [*self.weights, *self.biases]


def xavier_init(fan_in: int, fan_out: int, rng: np.random.Generator, gain: float = 1.0) -> np.ndarray:
    """Normal(0, gain^2 * 2 / (fan_in + fan_out))"""
    if fan_in <= 0 or fan_out <= 0:
        raise ValueError(f"Layer dimensions must be positive, got ({fan_in}, {fan_out})")
    std = gain * np.sqrt(2.0 / (fan_in + fan_out))
    return rng.normal(0.0, std, size=(fan_in, fan_out))


def build_mlp(
    input_dim: int,
    output_dim: int,
    rng: np.random.Generator,
    hidden_sizes: Sequence[int] = (64, 64),
    role: str = "generic",
) -> MlpParams:
    sizes = [input_dim, *hidden_sizes, output_dim]
    weights = [xavier_init(a, b, rng) for a, b in zip(sizes[:-1], sizes[1:])]
    biases = [np.zeros(b) for b in sizes[1:]]
    return MlpParams(weights=weights, biases=biases, role=role)


def leaky_relu(x: np.ndarray, slope: float = NEGATIVE_SLOPE) -> np.ndarray:
    return np.where(x > 0, x, slope * x)


def _as_batch(net: MlpParams, x: np.ndarray) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != net.input_dim:
        raise ValueError(
            f"{net.role} network expects inputs of width {net.input_dim}, got shape {x.shape}"
        )
    return batch, single


def forward_with_cache(net: MlpParams, x: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray], bool]:
    """Output plus the pre-activations of every layer (layer input first)"""
    h, single = _as_batch(net, x)
    cache = [h]
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = h @ w + b
        cache.append(z)
        h = z if i == last else leaky_relu(z, net.negative_slope)
    return h, cache, single


def forward(net: MlpParams, x: np.ndarray) -> np.ndarray:
    out, _, single = forward_with_cache(net, x)
    return out[0] if single else out


def backward(net: MlpParams, x: np.ndarray, upstream: np.ndarray) -> Gradients:
    """Exact gradients of sum(upstream * forward(net, x)) with respect to every parameter and x"""
    _, cache, single = forward_with_cache(net, x)
    delta = np.asarray(upstream, dtype=np.float64)
    if single:
        delta = delta[None, :]
    if delta.shape != (cache[0].shape[0], net.output_dim):
        raise ValueError(
            f"{net.role} network upstream gradient must have shape "
            f"{(cache[0].shape[0], net.output_dim)}, got {np.shape(upstream)}"
        )

    n_layers = len(net.weights)
    grad_w: List[np.ndarray] = [np.empty(0)] * n_layers
    grad_b: List[np.ndarray] = [np.empty(0)] * n_layers
    for i in reversed(range(n_layers)):
        z = cache[i + 1]
        if i != n_layers - 1:
            delta = delta * np.where(z > 0, 1.0, net.negative_slope)
        layer_input = cache[0] if i == 0 else leaky_relu(cache[i], net.negative_slope)
        grad_w[i] = layer_input.T @ delta
        grad_b[i] = delta.sum(axis=0)
        delta = delta @ net.weights[i].T

    input_grad = delta[0] if single else delta
    return Gradients(weights=grad_w, biases=grad_b, input_grad=input_grad)
