"""Loss, score metric, Adam optimizer, and the shared training loop."""

from __future__ import annotations

import dataclasses

import numpy as np

from .model import Model
from .nn import ShapeError


def mse(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean squared error over all elements."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"mse: shapes differ, {pred.shape} vs {target.shape}")
    return float(np.mean((pred - target) ** 2))


def mse_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    """d(mse)/d(pred) = 2 (pred - target) / N."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"mse: shapes differ, {pred.shape} vs {target.shape}")
    return 2.0 * (pred - target) / pred.size


def mae(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean absolute error over all elements."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"mae: shapes differ, {pred.shape} vs {target.shape}")
    return float(np.mean(np.abs(pred - target)))


class Adam:
    """Bias-corrected Adam; updates the given parameter arrays in place."""

    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        if len(grads) != len(self.params):
            raise ValueError("gradient list does not match parameter list")
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            if g.shape != p.shape:
                raise ShapeError(
                    f"adam: gradient shape {g.shape} != param shape {p.shape}")
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0
    shuffle: bool = True
    lr: float = 1e-3

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def fit(model: Model, x: np.ndarray, y: np.ndarray,
        config: TrainConfig = TrainConfig()) -> list[tuple[float, float]]:
    """Train with minibatch Adam on MSE; returns per-epoch (loss, mae).

    Shuffling is seeded from config.seed, so identical (model seed, config,
    data) runs produce bit-identical weights and histories. Parameters are
    updated in place.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        raise ValueError("fit: empty training slice")
    if y.shape[0] != n:
        raise ShapeError(f"fit: {n} inputs but {y.shape[0]} targets")
    rng = np.random.default_rng(config.seed)
    opt = Adam(model.params(), lr=config.lr)
    history = []
    for _ in range(config.epochs):
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        loss_sum = 0.0
        mae_sum = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            xb, yb = x[idx], y[idx]
            pred = model.forward(xb, training=True)
            loss_sum += mse(pred, yb) * len(idx)
            mae_sum += mae(pred, yb) * len(idx)
            model.backward(mse_grad(pred, yb))
            opt.step(model.grads())
        history.append((loss_sum / n, mae_sum / n))
    return history


def evaluate(model: Model, x: np.ndarray, y: np.ndarray) -> float:
    """MAE of inference-mode predictions (dropout inactive)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] == 0:
        raise ValueError("evaluate: empty slice")
    pred = model.forward(x, training=False)
    return mae(pred, y)


def write_history_csv(history: list[tuple[float, float]], path,
                      header_lines: list[str] | None = None) -> None:
    """Persist a fit() history as epoch,loss,mae rows."""
    with open(path, "w") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        fh.write("epoch,loss,mae\n")
        for epoch, (loss, score) in enumerate(history, start=1):
            fh.write(f"{epoch},{loss!r},{score!r}\n")
