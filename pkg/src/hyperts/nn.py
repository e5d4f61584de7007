"""Neural-network layers with explicit forward/backward passes.

All arithmetic is float64. Sequence layers (HyperDense, Conv1D, LSTM,
MaxPool1D) accept a single sample shaped [time, features] or a batch
shaped [batch, time, features]; Dense applies along the last axis of any
input. Every layer caches what its backward pass needs, exposes its
trainable arrays through ``params()``, and fills ``grads()`` (same shapes)
during ``backward()``.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .algebra import AlgebraKind, table_for


class ShapeError(ValueError):
    """Raised when an input does not match a layer's expected dimensions."""


class Activation(enum.Enum):
    LINEAR = "linear"
    RELU = "relu"


def _apply_act(z: np.ndarray, act: Activation) -> np.ndarray:
    if act is Activation.RELU:
        return np.maximum(z, 0.0)
    return z


def _act_grad(z: np.ndarray, act: Activation) -> np.ndarray:
    """Elementwise dy/dz at pre-activation z."""
    if act is Activation.RELU:
        return (z > 0.0).astype(np.float64)
    return np.ones_like(z)


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int,
                   shape: tuple) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    """Base contract: trainable params, matching grads, forward/backward."""

    name = "layer"

    def params(self) -> list[np.ndarray]:
        return []

    def grads(self) -> list[np.ndarray]:
        return []

    def param_names(self) -> list[str]:
        return []

    def param_count(self) -> int:
        return int(sum(p.size for p in self.params()))

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _require_cache(self):
        if getattr(self, "_cache", None) is None:
            raise RuntimeError(f"{self.name}: backward called before forward")


def _as_batch(x: np.ndarray, layer: str) -> tuple[np.ndarray, bool]:
    """Normalize [time, feat] / [batch, time, feat] input to 3-D."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        return x[None, :, :], True
    if x.ndim == 3:
        return x, False
    raise ShapeError(f"{layer}: expected 2-D or 3-D input, got shape {x.shape}")


class HyperDense(Layer):
    """Dense layer over 4D hypercomplex elements.

    Weights, inputs, and bias are hypercomplex: the input row at each time
    step is split into ``in_h`` consecutive 4-tuples (real, i, j, k), each
    output unit accumulates left products weight*input over the input slots,
    adds a hypercomplex bias, and applies the activation componentwise.
    Weights are shared across time, so [.., time, 4*in_h] maps to
    [.., time, 4*units].

    Trainable reals: 4*units*in_h weights + 4*units biases.
    """

    def __init__(self, in_h: int, units: int, kind: AlgebraKind,
                 activation: Activation = Activation.LINEAR,
                 rng: np.random.Generator | None = None):
        if in_h < 1 or units < 1:
            raise ValueError("in_h and units must be >= 1")
        self.name = f"hyperdense[{AlgebraKind(kind).value}]"
        self.in_h = in_h
        self.units = units
        self.kind = AlgebraKind(kind)
        self.table = table_for(self.kind)
        self.activation = Activation(activation)
        rng = rng or np.random.default_rng()
        # fan computed on real widths; each of the 4 components initialized
        # as an independent real
        self.w = glorot_uniform(rng, 4 * in_h, 4 * units, (units, in_h, 4))
        self.b = np.zeros((units, 4), dtype=np.float64)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._cache = None

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.dw, self.db]

    def param_names(self):
        return ["w", "b"]

    def _block_matrix(self) -> np.ndarray:
        """Real [4*units, 4*in_h] matrix whose (u,s) 4x4 block is the
        left-multiplication matrix of w[u, s]."""
        # m[u, d, s, q] = sum_p w[u,s,p] * c[p,q,d]
        m = np.einsum("usp,pqd->udsq", self.w, self.table)
        return m.reshape(4 * self.units, 4 * self.in_h)

    def forward(self, x, training=False):
        xb, was2d = _as_batch(x, self.name)
        bsz, t, width = xb.shape
        if width != 4 * self.in_h:
            raise ShapeError(
                f"{self.name}: last input dim {width} != 4*in_h = {4 * self.in_h}"
                f" (input shape {np.asarray(x).shape})")
        flat = xb.reshape(bsz * t, width)
        m = self._block_matrix()
        z = flat @ m.T + self.b.reshape(-1)
        y = _apply_act(z, self.activation)
        self._cache = (flat, z, m, bsz, t, was2d)
        out = y.reshape(bsz, t, 4 * self.units)
        return out[0] if was2d else out

    def backward(self, grad_out):
        self._require_cache()
        flat, z, m, bsz, t, was2d = self._cache
        g = np.asarray(grad_out, dtype=np.float64)
        if was2d:
            g = g[None]
        if g.shape != (bsz, t, 4 * self.units):
            raise ShapeError(
                f"{self.name}: upstream gradient shape {grad_out.shape} does not"
                f" match output shape {(bsz, t, 4 * self.units)}")
        dz = g.reshape(bsz * t, 4 * self.units) * _act_grad(z, self.activation)
        self.db[...] = dz.sum(axis=0).reshape(self.units, 4)
        dzh = dz.reshape(-1, self.units, 4)
        xh = flat.reshape(-1, self.in_h, 4)
        # dw[u,s,p] = sum_n dz[n,u,d] x[n,s,q] c[p,q,d]
        gux = np.einsum("nud,nsq->udsq", dzh, xh)
        self.dw[...] = np.einsum("udsq,pqd->usp", gux, self.table)
        dx = (dz @ m).reshape(bsz, t, 4 * self.in_h)
        return dx[0] if was2d else dx


class Dense(Layer):
    """Fully connected layer applied along the last axis: y = f(x @ W + b)."""

    def __init__(self, in_features: int, units: int,
                 activation: Activation = Activation.LINEAR,
                 rng: np.random.Generator | None = None):
        self.name = "dense"
        self.in_features = in_features
        self.units = units
        self.activation = Activation(activation)
        rng = rng or np.random.default_rng()
        self.w = glorot_uniform(rng, in_features, units, (in_features, units))
        self.b = np.zeros(units, dtype=np.float64)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._cache = None

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.dw, self.db]

    def param_names(self):
        return ["w", "b"]

    def forward(self, x, training=False):
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.in_features:
            raise ShapeError(
                f"{self.name}: last input dim {x.shape[-1]} != in_features ="
                f" {self.in_features} (input shape {x.shape})")
        z = x @ self.w + self.b
        self._cache = (x, z)
        return _apply_act(z, self.activation)

    def backward(self, grad_out):
        self._require_cache()
        x, z = self._cache
        g = np.asarray(grad_out, dtype=np.float64)
        if g.shape != z.shape:
            raise ShapeError(
                f"{self.name}: upstream gradient shape {g.shape} does not match"
                f" output shape {z.shape}")
        dz = g * _act_grad(z, self.activation)
        xf = x.reshape(-1, self.in_features)
        dzf = dz.reshape(-1, self.units)
        self.dw[...] = xf.T @ dzf
        self.db[...] = dzf.sum(axis=0)
        return dz @ self.w.T


class Conv1D(Layer):
    """Valid (no-padding) cross-correlation along time, stride 1.

    out[t, f] = act( sum_{k,c} kernel[f, k, c] * x[t+k, c] + b[f] ),
    output time length = time - kernel_size + 1.
    """

    def __init__(self, channels: int, filters: int, kernel_size: int = 3,
                 activation: Activation = Activation.RELU,
                 rng: np.random.Generator | None = None):
        if kernel_size < 1:
            raise ValueError("kernel_size must be >= 1")
        self.name = "conv1d"
        self.channels = channels
        self.filters = filters
        self.kernel_size = kernel_size
        self.activation = Activation(activation)
        rng = rng or np.random.default_rng()
        fan_in = kernel_size * channels
        fan_out = kernel_size * filters
        self.w = glorot_uniform(rng, fan_in, fan_out,
                                (filters, kernel_size, channels))
        self.b = np.zeros(filters, dtype=np.float64)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._cache = None

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.dw, self.db]

    def param_names(self):
        return ["w", "b"]

    def forward(self, x, training=False):
        xb, was2d = _as_batch(x, self.name)
        bsz, t, c = xb.shape
        if c != self.channels:
            raise ShapeError(
                f"{self.name}: {c} input channels, expected {self.channels}")
        if t < self.kernel_size:
            raise ShapeError(
                f"{self.name}: time length {t} < kernel_size {self.kernel_size}")
        # windows[b, t_out, c, k]
        win = np.lib.stride_tricks.sliding_window_view(
            xb, self.kernel_size, axis=1)
        z = np.einsum("btck,fkc->btf", win, self.w, optimize=True) + self.b
        y = _apply_act(z, self.activation)
        self._cache = (win, z, bsz, t, was2d)
        return y[0] if was2d else y

    def backward(self, grad_out):
        self._require_cache()
        win, z, bsz, t, was2d = self._cache
        g = np.asarray(grad_out, dtype=np.float64)
        if was2d:
            g = g[None]
        if g.shape != z.shape:
            raise ShapeError(
                f"{self.name}: upstream gradient shape {grad_out.shape} does"
                f" not match output shape {z.shape}")
        dz = g * _act_grad(z, self.activation)
        self.dw[...] = np.einsum("btf,btck->fkc", dz, win, optimize=True)
        self.db[...] = dz.sum(axis=(0, 1))
        # full correlation of dz with the kernel flipped along k
        k = self.kernel_size
        pad = np.zeros((bsz, t + k - 1, self.filters), dtype=np.float64)
        pad[:, k - 1:k - 1 + dz.shape[1], :] = dz
        dwin = np.lib.stride_tricks.sliding_window_view(pad, k, axis=1)
        dx = np.einsum("btfk,fkc->btc", dwin, self.w[:, ::-1, :], optimize=True)
        return dx[0] if was2d else dx


class LSTM(Layer):
    """Gated recurrent layer returning the full hidden sequence.

    Standard cell without peepholes: sigmoid input/forget/output gates,
    tanh candidate and cell output. Gate blocks are stored in (i, f, g, o)
    order inside the stacked kernels. State starts at zero.
    """

    def __init__(self, channels: int, units: int,
                 rng: np.random.Generator | None = None):
        self.name = "lstm"
        self.channels = channels
        self.units = units
        rng = rng or np.random.default_rng()
        self.w = glorot_uniform(rng, channels, 4 * units, (channels, 4 * units))
        self.u = glorot_uniform(rng, units, 4 * units, (units, 4 * units))
        self.b = np.zeros(4 * units, dtype=np.float64)
        self.dw = np.zeros_like(self.w)
        self.du = np.zeros_like(self.u)
        self.db = np.zeros_like(self.b)
        self._cache = None

    def params(self):
        return [self.w, self.u, self.b]

    def grads(self):
        return [self.dw, self.du, self.db]

    def param_names(self):
        return ["w", "u", "b"]

    @staticmethod
    def _sigmoid(z):
        return 1.0 / (1.0 + np.exp(-z))

    def forward(self, x, training=False):
        xb, was2d = _as_batch(x, self.name)
        bsz, t, c = xb.shape
        if c != self.channels:
            raise ShapeError(
                f"{self.name}: {c} input channels, expected {self.channels}")
        n = self.units
        h = np.zeros((bsz, n))
        cell = np.zeros((bsz, n))
        gates = np.empty((t, bsz, 4 * n))
        cells = np.empty((t, bsz, n))
        tanh_c = np.empty((t, bsz, n))
        hs = np.empty((t, bsz, n))
        h_prev = np.empty((t, bsz, n))
        c_prev = np.empty((t, bsz, n))
        for step in range(t):
            h_prev[step] = h
            c_prev[step] = cell
            zg = xb[:, step, :] @ self.w + h @ self.u + self.b
            gi = self._sigmoid(zg[:, :n])
            gf = self._sigmoid(zg[:, n:2 * n])
            gg = np.tanh(zg[:, 2 * n:3 * n])
            go = self._sigmoid(zg[:, 3 * n:])
            cell = gf * cell + gi * gg
            tc = np.tanh(cell)
            h = go * tc
            gates[step] = np.concatenate([gi, gf, gg, go], axis=1)
            cells[step] = cell
            tanh_c[step] = tc
            hs[step] = h
        self._cache = (xb, gates, cells, tanh_c, h_prev, c_prev, was2d)
        out = hs.transpose(1, 0, 2)
        return out[0] if was2d else out

    def backward(self, grad_out):
        self._require_cache()
        xb, gates, cells, tanh_c, h_prev, c_prev, was2d = self._cache
        bsz, t, _ = xb.shape
        n = self.units
        g = np.asarray(grad_out, dtype=np.float64)
        if was2d:
            g = g[None]
        if g.shape != (bsz, t, n):
            raise ShapeError(
                f"{self.name}: upstream gradient shape {grad_out.shape} does"
                f" not match output shape {(bsz, t, n)}")
        self.dw[...] = 0.0
        self.du[...] = 0.0
        self.db[...] = 0.0
        dx = np.empty_like(xb)
        dh_next = np.zeros((bsz, n))
        dc_next = np.zeros((bsz, n))
        for step in range(t - 1, -1, -1):
            dh = g[:, step, :] + dh_next
            gi = gates[step][:, :n]
            gf = gates[step][:, n:2 * n]
            gg = gates[step][:, 2 * n:3 * n]
            go = gates[step][:, 3 * n:]
            tc = tanh_c[step]
            dc = dc_next + dh * go * (1.0 - tc * tc)
            d_gi = dc * gg * gi * (1.0 - gi)
            d_gf = dc * c_prev[step] * gf * (1.0 - gf)
            d_gg = dc * gi * (1.0 - gg * gg)
            d_go = dh * tc * go * (1.0 - go)
            dzg = np.concatenate([d_gi, d_gf, d_gg, d_go], axis=1)
            self.dw += xb[:, step, :].T @ dzg
            self.du += h_prev[step].T @ dzg
            self.db += dzg.sum(axis=0)
            dx[:, step, :] = dzg @ self.w.T
            dh_next = dzg @ self.u.T
            dc_next = dc * gf
        return dx[0] if was2d else dx


class MaxPool1D(Layer):
    """Non-overlapping max pooling along time; trailing remainder dropped.

    Backward routes the gradient to the argmax position of each window
    (first index on ties).
    """

    def __init__(self, pool_size: int = 2):
        if pool_size < 1:
            raise ValueError("pool_size must be >= 1")
        self.name = "maxpool1d"
        self.pool_size = pool_size
        self._cache = None

    def forward(self, x, training=False):
        xb, was2d = _as_batch(x, self.name)
        bsz, t, f = xb.shape
        if t < self.pool_size:
            raise ShapeError(
                f"{self.name}: time length {t} < pool_size {self.pool_size}")
        t_out = t // self.pool_size
        win = xb[:, :t_out * self.pool_size, :].reshape(
            bsz, t_out, self.pool_size, f)
        idx = win.argmax(axis=2)
        out = np.take_along_axis(win, idx[:, :, None, :], axis=2)[:, :, 0, :]
        self._cache = (idx, bsz, t, f, t_out, was2d)
        return out[0] if was2d else out

    def backward(self, grad_out):
        self._require_cache()
        idx, bsz, t, f, t_out, was2d = self._cache
        g = np.asarray(grad_out, dtype=np.float64)
        if was2d:
            g = g[None]
        if g.shape != (bsz, t_out, f):
            raise ShapeError(
                f"{self.name}: upstream gradient shape {grad_out.shape} does"
                f" not match output shape {(bsz, t_out, f)}")
        dwin = np.zeros((bsz, t_out, self.pool_size, f))
        np.put_along_axis(dwin, idx[:, :, None, :], g[:, :, None, :], axis=2)
        dx = np.zeros((bsz, t, f))
        dx[:, :t_out * self.pool_size, :] = dwin.reshape(bsz, -1, f)
        return dx[0] if was2d else dx


class Flatten(Layer):
    """Reshape [time, feat] -> [time*feat] (or [batch, t, f] -> [batch, t*f])."""

    def __init__(self):
        self.name = "flatten"
        self._cache = None

    def forward(self, x, training=False):
        x = np.asarray(x, dtype=np.float64)
        self._cache = x.shape
        if x.ndim == 3:
            return x.reshape(x.shape[0], -1)
        return x.reshape(-1)

    def backward(self, grad_out):
        self._require_cache()
        return np.asarray(grad_out, dtype=np.float64).reshape(self._cache)


class Dropout(Layer):
    """Inverted dropout: zero each element with probability ``rate`` during
    training, scale survivors by 1/(1-rate); identity at inference."""

    def __init__(self, rate: float = 0.5, rng: np.random.Generator | None = None):
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        self.name = "dropout"
        self.rate = rate
        self.rng = rng or np.random.default_rng()
        self._cache = None

    def forward(self, x, training=False):
        x = np.asarray(x, dtype=np.float64)
        if not training or self.rate == 0.0:
            self._cache = (None, x.shape)
            return x
        mask = (self.rng.random(x.shape) >= self.rate) / (1.0 - self.rate)
        self._cache = (mask, x.shape)
        return x * mask

    def backward(self, grad_out):
        self._require_cache()
        mask, shape = self._cache
        g = np.asarray(grad_out, dtype=np.float64)
        if g.shape != shape:
            raise ShapeError(
                f"{self.name}: upstream gradient shape {g.shape} does not"
                f" match output shape {shape}")
        return g if mask is None else g * mask
