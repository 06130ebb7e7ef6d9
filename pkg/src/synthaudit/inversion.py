"""Model-inversion attack harness: a small from-scratch MLP and input reconstruction.

The target model is a fully connected network with rectifier hidden layers and
a softmax output, trained by full-batch gradient descent on cross-entropy with
hand-written gradients (checkable against finite differences). The attack
ascends the model's log-probability of a target class with respect to the
input and keeps the best iterate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .datamodel import Dataset, _as_vector


@dataclass
class MlpModel:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    train_accuracy: float | None = None

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_classes(self) -> int:
        return self.layer_sizes[-1]


@dataclass(frozen=True)
class AttackResult:
    reconstruction: np.ndarray
    final_confidence: float
    quality: float | None
    objective_trace: tuple[float, ...]


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def init_mlp(layer_sizes, seed: int) -> MlpModel:
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ValueError(f"layer_sizes needs >= 2 positive entries, got {sizes}")
    if sizes[-1] < 2:
        raise ValueError(f"class count must be at least 2, got {sizes[-1]}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.normal(size=(fan_in, fan_out)) * np.sqrt(2.0 / fan_in))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_sizes=sizes, weights=weights, biases=biases)


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Softmax class probabilities for inputs ``x`` (single vector or batch)."""
    a = np.atleast_2d(np.asarray(x, dtype=np.float64))
    last = len(model.weights) - 1
    for layer, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        a = _softmax(z) if layer == last else np.maximum(z, 0.0)
    return a if np.ndim(x) == 2 else a[0]


def _forward_cached(model: MlpModel, x: np.ndarray):
    activations = [x]
    pre = []
    a = x
    last = len(model.weights) - 1
    for layer, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        pre.append(z)
        a = _softmax(z) if layer == last else np.maximum(z, 0.0)
        activations.append(a)
    return activations, pre


def loss_and_gradients(model: MlpModel, x: np.ndarray, y: np.ndarray):
    """Mean cross-entropy and its gradients w.r.t. every weight and bias."""
    n = x.shape[0]
    activations, pre = _forward_cached(model, x)
    probs = activations[-1]
    eps = 1e-300  # guards log(0) for saturated predictions
    loss = float(-np.log(probs[np.arange(n), y] + eps).mean())

    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    d_weights = [np.empty(0)] * len(model.weights)
    d_biases = [np.empty(0)] * len(model.weights)
    for layer in range(len(model.weights) - 1, -1, -1):
        d_weights[layer] = activations[layer].T @ delta
        d_biases[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ model.weights[layer].T) * (pre[layer - 1] > 0.0)
    return loss, d_weights, d_biases


def log_class_probability(model: MlpModel, x, target_class: int) -> float:
    """Log-softmax probability the model assigns ``target_class`` at input ``x``."""
    v = _as_vector(x, "input")
    activations, pre = _forward_cached(model, v[None, :])
    z = pre[-1][0]
    shifted = z - z.max()
    return float(shifted[target_class] - np.log(np.exp(shifted).sum()))


def input_gradient(model: MlpModel, x, target_class: int) -> np.ndarray:
    """Gradient of log P(target_class | x) with respect to the input."""
    v = _as_vector(x, "input")
    activations, pre = _forward_cached(model, v[None, :])
    probs = activations[-1]
    delta = -probs.copy()
    delta[0, target_class] += 1.0
    for layer in range(len(model.weights) - 1, 0, -1):
        delta = (delta @ model.weights[layer].T) * (pre[layer - 1] > 0.0)
    return (delta @ model.weights[0].T)[0]


def train_mlp(data: Dataset, layer_sizes, epochs: int, learning_rate: float, seed: int) -> MlpModel:
    """Full-batch gradient descent on cross-entropy; deterministic per seed.

    Records the final training accuracy on the model. Zero epochs returns the
    untouched initialisation.
    """
    if data.labels is None:
        raise ValueError("training data must carry labels")
    if epochs < 0:
        raise ValueError(f"epochs must be non-negative, got {epochs}")
    model = init_mlp(layer_sizes, seed)
    if model.input_dim != data.dim:
        raise ValueError(f"layer_sizes[0] ({model.input_dim}) must equal the data dimension ({data.dim})")
    if int(data.labels.max()) >= model.n_classes:
        raise ValueError(f"label {int(data.labels.max())} out of range for {model.n_classes} classes")
    x, y = data.points, data.labels
    for _ in range(epochs):
        _, d_weights, d_biases = loss_and_gradients(model, x, y)
        for layer in range(len(model.weights)):
            model.weights[layer] = model.weights[layer] - learning_rate * d_weights[layer]
            model.biases[layer] = model.biases[layer] - learning_rate * d_biases[layer]
    predictions = forward(model, x).argmax(axis=1)
    model.train_accuracy = float((predictions == y).mean())
    return model


def reconstruction_quality(x, class_examples: Dataset) -> float:
    """Cosine similarity between ``x`` and the centroid of the class examples."""
    v = _as_vector(x, "reconstruction")
    if v.shape[0] != class_examples.dim:
        raise ValueError(f"dimension mismatch: {v.shape[0]} vs {class_examples.dim}")
    centroid = class_examples.points.mean(axis=0)
    cn = float(np.sqrt((centroid * centroid).sum()))
    xn = float(np.sqrt((v * v).sum()))
    if cn == 0.0 or xn == 0.0:
        raise ValueError("cosine similarity undefined for a zero vector")
    return float((v @ centroid) / (xn * cn))


def invert(
    model: MlpModel,
    target_class: int,
    steps: int,
    step_size: float,
    init,
    class_examples: Dataset | None = None,
) -> AttackResult:
    """Gradient-ascent input reconstruction for ``target_class``.

    Returns the best-objective iterate seen (so the objective at the returned
    point is always >= the objective at ``init``), its softmax confidence, and
    optionally its quality against ``class_examples``.
    """
    if not 0 <= target_class < model.n_classes:
        raise ValueError(f"target_class {target_class} out of range for {model.n_classes} classes")
    x = _as_vector(init, "init").copy()
    if x.shape[0] != model.input_dim:
        raise ValueError(f"init has dim {x.shape[0]}, model expects {model.input_dim}")
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")

    best_x = x.copy()
    best_obj = log_class_probability(model, x, target_class)
    trace = [best_obj]
    for _ in range(steps):
        x = x + step_size * input_gradient(model, x, target_class)
        obj = log_class_probability(model, x, target_class)
        if obj > best_obj:
            best_obj = obj
            best_x = x.copy()
            trace.append(obj)
    quality = None if class_examples is None else reconstruction_quality(best_x, class_examples)
    return AttackResult(
        reconstruction=best_x,
        final_confidence=float(np.exp(best_obj)),
        quality=quality,
        objective_trace=tuple(trace),
    )
