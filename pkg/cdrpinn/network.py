"""Fully connected tanh networks

`MlpModel` maps R^d to R with `depth` tanh hidden layers of `width` units and
a linear output layer. Besides plain evaluation it propagates second-order
jets for every input coordinate at once, on numpy arrays or on tape nodes so
that parameter gradients see through the input derivatives.
"""
import json
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .autodiff import Jet2
from .autodiff import _tape as T
from .util import ConfigurationError, get_logger

logger = get_logger(__name__)

CHECKPOINT_MAGIC = "cdrpinn-checkpoint"


@dataclass
class MlpModel:
    """tanh MLP; layer `i` computes `z @ weights[i] + biases[i]`"""

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    seed: int = None
    scheme: str = None
    activation: str = field(default="tanh", init=False)

    def __post_init__(self):
        self.weights = [np.array(w, dtype=np.float64, ndmin=2) for w in self.weights]
        self.biases = [np.array(b, dtype=np.float64, ndmin=1) for b in self.biases]
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ConfigurationError("weights and biases must pair up, one per layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if b.shape != (w.shape[1],):
                raise ConfigurationError(
                    "layer {}: bias shape {} does not match weight {}".format(
                        i, b.shape, w.shape
                    )
                )
            if i and self.weights[i - 1].shape[1] != w.shape[0]:
                raise ConfigurationError("layer {}: shape chain broken".format(i))
        if self.weights[-1].shape[1] != 1:
            raise ConfigurationError("output layer must have a single unit")

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def depth(self) -> int:
        """Number of hidden (tanh) layers"""
        return len(self.weights) - 1

    @property
    def width(self) -> int:
        return self.weights[0].shape[1] if self.depth else 0

    @property
    def layer_dims(self) -> List[int]:
        return [self.input_dim] + [w.shape[1] for w in self.weights]

    def parameters(self) -> List[np.ndarray]:
        """[W0, b0, W1, b1, ...]"""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def set_parameters(self, params: Sequence[np.ndarray]):
        self.weights = [np.asarray(p, dtype=np.float64) for p in params[0::2]]
        self.biases = [np.asarray(p, dtype=np.float64) for p in params[1::2]]

    def copy(self) -> "MlpModel":
        return MlpModel(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            seed=self.seed,
            scheme=self.scheme,
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.parameters())

    def _check_points(self, x):
        points = T.value_of(x)
        if np.shape(points)[-1] != self.input_dim:
            raise ConfigurationError(
                "point has {} coordinates, model expects {}".format(
                    np.shape(points)[-1], self.input_dim
                )
            )

    def forward(self, x) -> np.ndarray:
        """u(x) for points of shape (N, d), or a single point of shape (d,)"""
        x = np.asarray(x, dtype=np.float64)
        self._check_points(x)
        z = np.atleast_2d(x)
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            z = np.tanh(z @ w + b)
        u = (z @ self.weights[-1] + self.biases[-1])[:, 0]
        return float(u[0]) if x.ndim == 1 else u

    __call__ = forward

    def jets(self, x, coords: Sequence[int] = None, params: Sequence = None):
        """Value, first and pure second input derivatives

        Args:
            x: points (N, d) as an array or tape node
            coords: seeded input coordinates, default all of them
            params: parameters to evaluate with (tape nodes for parameter
                gradients), default the model's own arrays

        Returns:
            (u, du, d2u) with shapes (N,), (len(coords), N), (len(coords), N)
        """
        self._check_points(x)
        if coords is None:
            coords = range(self.input_dim)
        if params is None:
            params = self.parameters()
        n = np.shape(T.value_of(x))[0]

        seeds = np.zeros((len(coords), n, self.input_dim))
        for i, k in enumerate(coords):
            seeds[i, :, k] = 1.0
        jet = Jet2(x, seeds, np.zeros_like(seeds))

        layers = list(zip(params[0::2], params[1::2]))
        for w, b in layers[:-1]:
            jet = jet.affine(w, b).tanh()
        jet = jet.affine(*layers[-1])

        return (
            T.take(jet.v, (slice(None), 0)),
            T.take(jet.d1, (slice(None), slice(None), 0)),
            T.take(jet.d2, (slice(None), slice(None), 0)),
        )

    # checkpoints
    def header(self) -> dict:
        return dict(
            format=CHECKPOINT_MAGIC,
            layer_dims=self.layer_dims,
            activation=self.activation,
            seed=self.seed,
            scheme=self.scheme,
            dtype="<f8",
        )

    def save(self, path: str):
        """JSON header line followed by the raw little-endian float64 parameters"""
        with open(path, "wb") as out:
            out.write((json.dumps(self.header()) + "\n").encode("utf-8"))
            for p in self.parameters():
                out.write(np.ascontiguousarray(p, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str) -> "MlpModel":
        with open(path, "rb") as src:
            header = json.loads(src.readline().decode("utf-8"))
            payload = src.read()
        if header.get("format") != CHECKPOINT_MAGIC:
            raise ConfigurationError("{} is not a cdrpinn checkpoint".format(path))
        flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
        dims = header["layer_dims"]
        expected = sum(fi * fo + fo for fi, fo in zip(dims[:-1], dims[1:]))
        if flat.size != expected:
            raise ConfigurationError(
                "{}: {} parameters in payload, header describes {}".format(path, flat.size, expected)
            )
        weights, biases, offset = [], [], 0
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            weights.append(flat[offset : offset + fan_in * fan_out].reshape(fan_in, fan_out))
            offset += fan_in * fan_out
            biases.append(flat[offset : offset + fan_out].copy())
            offset += fan_out
        return cls(weights, biases, seed=header.get("seed"), scheme=header.get("scheme"))


def init_xavier(
    input_dim: int, depth: int, width: int, scheme: str = "normal", seed: int = 0
) -> MlpModel:
    """Xavier (Glorot) initialized tanh MLP with zero biases

    Normal scheme draws N(0, 2/(fan_in+fan_out)); uniform draws from
    [-sqrt(6/(fan_in+fan_out)), sqrt(6/(fan_in+fan_out))].
    """
    if depth < 1 or width < 1 or input_dim < 1:
        raise ConfigurationError(
            "need input_dim, depth, width >= 1, got {}, {}, {}".format(
                input_dim, depth, width
            )
        )
    if scheme not in ("normal", "uniform"):
        raise ConfigurationError("unknown Xavier scheme '{}'".format(scheme))

    rng = np.random.default_rng(seed)
    dims = [input_dim] + [width] * depth + [1]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        if scheme == "normal":
            std = np.sqrt(2.0 / (fan_in + fan_out))
            weights.append(rng.normal(0.0, std, size=(fan_in, fan_out)))
        else:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases, seed=seed, scheme=scheme)


def forward(model, x):
    return model.forward(x)
