"""
Fully connected Q-network in numpy.

Hidden layers use LeakyReLU (slope 0.01) followed by inverted dropout; the
output layer is linear. Inputs may be a single observation or a batch.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

LEAKY_SLOPE = 0.01


@dataclass
class ForwardCache:
    """Intermediate values kept for the backward pass."""
    inputs: List[np.ndarray]
    pre_activations: List[np.ndarray]
    dropout_masks: List[Optional[np.ndarray]]


def leaky_relu(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, z, LEAKY_SLOPE * z)


def leaky_relu_grad(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, 1.0, LEAKY_SLOPE)


class Mlp:
    """Multi-layer perceptron with explicit forward and backward passes."""

    def __init__(
        self,
        layer_sizes: Sequence[int],
        dropout: float = 0.0,
        rng: Optional[np.random.Generator] = None,
    ):
        """
        Initialize the network.

        Args:
            layer_sizes: [input, hidden..., output]
            dropout: Drop probability on hidden layers in training mode
            rng: Generator for the weight initialization; zeros when omitted
        """
        if len(layer_sizes) < 2 or any(int(s) < 1 for s in layer_sizes):
            raise ValueError(f"Invalid layer sizes {list(layer_sizes)}")
        if not 0.0 <= dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {dropout}")
        self.layer_sizes = [int(s) for s in layer_sizes]
        self.dropout = float(dropout)
        self.weights: List[np.ndarray] = []
        self.biases: List[np.ndarray] = []
        for fan_in, fan_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            if rng is None:
                self.weights.append(np.zeros((fan_in, fan_out)))
                self.biases.append(np.zeros(fan_out))
            else:
                # uniform fan-in scaling
                bound = 1.0 / np.sqrt(fan_in)
                self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
                self.biases.append(rng.uniform(-bound, bound, size=fan_out))

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]

    @property
    def parameter_count(self) -> int:
        return sum(a * b + b for a, b in zip(self.layer_sizes[:-1], self.layer_sizes[1:]))

    def params(self) -> Dict[str, np.ndarray]:
        """Named views of the parameters; in-place updates change the network."""
        named = {}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            named[f"W{i}"] = w
            named[f"b{i}"] = b
        return named

    def forward(
        self,
        x: np.ndarray,
        train: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        """Q-values for one observation (1-D) or a batch (2-D)."""
        out, _ = self.forward_with_cache(x, train, rng)
        return out

    def forward_with_cache(
        self,
        x: np.ndarray,
        train: bool = False,
        rng: Optional[np.random.Generator] = None,
    ):
        """
        Forward pass that also returns the cache for `backward`.

        Raises:
            ValueError: If the input width does not match the first layer, or
                dropout is active without a generator
        """
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.ndim != 2 or h.shape[1] != self.input_size:
            raise ValueError(f"Expected inputs of width {self.input_size}, got shape {x.shape}")
        use_dropout = train and self.dropout > 0.0
        if use_dropout and rng is None:
            raise ValueError("Dropout in training mode needs a generator")

        cache = ForwardCache(inputs=[], pre_activations=[], dropout_masks=[])
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            cache.inputs.append(h)
            z = h @ w + b
            cache.pre_activations.append(z)
            if i == last:
                h = z
                cache.dropout_masks.append(None)
                break
            h = leaky_relu(z)
            if use_dropout:
                mask = (rng.random(h.shape) >= self.dropout) / (1.0 - self.dropout)
                h = h * mask
                cache.dropout_masks.append(mask)
            else:
                cache.dropout_masks.append(None)
        return (h[0] if single else h), cache

    def backward(self, cache: ForwardCache, grad_out: np.ndarray) -> Dict[str, np.ndarray]:
        """
        Gradients of a scalar loss given its gradient with respect to the outputs.

        Args:
            cache: Cache from `forward_with_cache`
            grad_out: dLoss/dOutput with the shape of the forward output

        Returns:
            Gradients keyed like `params()`
        """
        g = np.asarray(grad_out, dtype=float)
        if g.ndim == 1:
            g = g[None, :]
        grads: Dict[str, np.ndarray] = {}
        for i in reversed(range(len(self.weights))):
            if i != len(self.weights) - 1:
                mask = cache.dropout_masks[i]
                if mask is not None:
                    g = g * mask
                g = g * leaky_relu_grad(cache.pre_activations[i])
            grads[f"W{i}"] = cache.inputs[i].T @ g
            grads[f"b{i}"] = g.sum(axis=0)
            if i > 0:
                g = g @ self.weights[i].T
        return grads

    def copy_from(self, other: "Mlp") -> None:
        """Hard copy of another network with the same sizes."""
        self._check_compatible(other)
        for dst, src in zip(self.weights + self.biases, other.weights + other.biases):
            dst[...] = src

    def soft_update(self, other: "Mlp", tau: float) -> None:
        """theta <- tau * other + (1 - tau) * theta."""
        self._check_compatible(other)
        for dst, src in zip(self.weights + self.biases, other.weights + other.biases):
            dst *= 1.0 - tau
            dst += tau * src

    def clone(self) -> "Mlp":
        twin = Mlp(self.layer_sizes, self.dropout)
        twin.copy_from(self)
        return twin

    def _check_compatible(self, other: "Mlp") -> None:
        if other.layer_sizes != self.layer_sizes:
            raise ValueError(f"Layer sizes differ: {other.layer_sizes} vs {self.layer_sizes}")
