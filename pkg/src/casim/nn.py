"""Minimal fully-connected network stack: forward, backprop, Adam, soft updates.

Hidden layers are rectified-linear (subgradient 0 at exactly 0); the output
layer is identity or sigmoid. Weights are (out, in) matrices, inputs are
(batch, features) or a single feature vector.
"""

import struct

import numpy as np

from .errors import CasimError

MAGIC = b"CANN"
HIDDEN_WIDTHS = (128, 512, 1024)    # fixed hidden architecture of actor/critic


def _sigmoid(z):
    """Overflow-safe logistic; never returns exactly 0 or 1 for finite z."""
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class Mlp:
    def __init__(self, layer_sizes, out_activation="identity", rng=None, out_bias=0.0,
                 dtype=np.float64, init_scale=1.0):
        if len(layer_sizes) < 2:
            raise CasimError("need at least input and output layer sizes")
        if out_activation not in ("identity", "sigmoid"):
            raise CasimError(f"unknown output activation {out_activation!r}")
        self.layer_sizes = list(layer_sizes)
        self.out_activation = out_activation
        self.dtype = np.dtype(dtype)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            if rng is None:
                w = np.zeros((fan_out, fan_in))
            else:
                bound = init_scale / np.sqrt(fan_in)
                w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            self.weights.append(w.astype(self.dtype))
            self.biases.append(np.zeros(fan_out, dtype=self.dtype))
        self.biases[-1][:] = out_bias

    def forward(self, x):
        """Run the net; returns (output, cache) with cache reusable by backward."""
        x = np.asarray(x, dtype=self.dtype)
        squeeze = x.ndim == 1
        a = x.reshape(1, -1) if squeeze else x
        if a.shape[1] != self.layer_sizes[0]:
            raise CasimError(
                f"input width {a.shape[1]} does not match layer 0 ({self.layer_sizes[0]})")
        activations = [a]
        last = len(self.weights) - 1
        for li, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w.T + b
            if li < last:
                a = np.maximum(z, 0.0)
            elif self.out_activation == "sigmoid":
                a = _sigmoid(z)
            else:
                a = z
            activations.append(a)
        out = activations[-1]
        cache = activations
        return (out[0], cache) if squeeze else (out, cache)

    def backward(self, cache, grad_out):
        """Backpropagate grad_out (d objective / d output) through the cache.

        Returns (weight_grads, bias_grads, input_grad); gradients are averaged
        the way the objective was (caller supplies grad_out already scaled).
        """
        grad_out = np.asarray(grad_out, dtype=self.dtype)
        if grad_out.ndim == 1:
            grad_out = grad_out.reshape(1, -1)
        activations = cache
        if grad_out.shape != activations[-1].shape:
            raise CasimError(
                f"grad shape {grad_out.shape} does not match output {activations[-1].shape}")
        if self.out_activation == "sigmoid":
            out = activations[-1]
            delta = grad_out * out * (1.0 - out)
        else:
            delta = grad_out
        w_grads = [None] * len(self.weights)
        b_grads = [None] * len(self.biases)
        for li in range(len(self.weights) - 1, -1, -1):
            a_prev = activations[li]
            w_grads[li] = delta.T @ a_prev
            b_grads[li] = delta.sum(axis=0)
            if li > 0:
                delta = (delta @ self.weights[li]) * (activations[li] > 0.0)
        input_grad = delta @ self.weights[0]
        return w_grads, b_grads, input_grad

    def copy(self):
        clone = Mlp(self.layer_sizes, self.out_activation, dtype=self.dtype)
        for i in range(len(self.weights)):
            clone.weights[i] = self.weights[i].copy()
            clone.biases[i] = self.biases[i].copy()
        return clone

    def params(self):
        return self.weights + self.biases


class AdamState:
    """Per-network Adam accumulators; shapes mirror the owning Mlp."""

    def __init__(self, net, learning_rate=0.01, beta1=0.9, beta2=0.999, eps=1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = [np.zeros_like(p) for p in net.params()]
        self.v = [np.zeros_like(p) for p in net.params()]
        self._scratch = [np.empty_like(p) for p in net.params()]


def adam_step(net, w_grads, b_grads, opt, direction="minimize"):
    """One Adam update in place; direction 'maximize' ascends the objective.

    Maximizing with gradient g is exactly minimizing with -g (the sign is
    applied before the moment updates).
    """
    if direction not in ("minimize", "maximize"):
        raise CasimError(f"unknown direction {direction!r}")
    grads = list(w_grads) + list(b_grads)
    params = net.params()
    if len(grads) != len(params):
        raise CasimError("gradient list does not match parameter list")
    opt.step_count += 1
    t = opt.step_count
    b1, b2 = opt.beta1, opt.beta2
    # bias corrections folded into scalars: m_hat/(sqrt(v_hat)+eps) computed as
    # (m/c1)/(sqrt(v)/c2 + eps) with c1 = 1-b1^t, c2 = sqrt(1-b2^t)
    c1 = 1.0 - b1 ** t
    c2 = np.sqrt(1.0 - b2 ** t)
    for p, g, m, v, s in zip(params, grads, opt.m, opt.v, opt._scratch):
        if p.shape != g.shape:
            raise CasimError("gradient shape mismatch")
        g = np.asarray(g, dtype=p.dtype)
        if direction == "maximize":
            g = -g
        m *= b1
        np.multiply(g, 1.0 - b1, out=s)
        m += s
        v *= b2
        np.multiply(g, g, out=s)
        s *= 1.0 - b2
        v += s
        np.sqrt(v, out=s)
        s /= c2
        s += opt.eps
        np.divide(m, s, out=s)
        s *= opt.learning_rate / c1
        p -= s


def soft_update(target, online, tau):
    """Blend target <- tau * online + (1 - tau) * target, elementwise."""
    if not 0.0 <= tau <= 1.0:
        raise CasimError("tau must lie in [0, 1]")
    if target.layer_sizes != online.layer_sizes:
        raise CasimError("network shapes differ")
    for pt, po in zip(target.params(), online.params()):
        pt *= 1.0 - tau
        pt += tau * po


def save_mlp(net, path):
    """Write the net as little-endian float64 blocks behind a layer-size header."""
    act = 1 if net.out_activation == "sigmoid" else 0
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", len(net.layer_sizes), act))
        fh.write(struct.pack(f"<{len(net.layer_sizes)}I", *net.layer_sizes))
        for w, b in zip(net.weights, net.biases):
            fh.write(w.astype("<f8").tobytes(order="C"))
            fh.write(b.astype("<f8").tobytes())


def load_mlp(path):
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise CasimError(f"{path}: not a network checkpoint")
        n_sizes, act = struct.unpack("<II", fh.read(8))
        sizes = struct.unpack(f"<{n_sizes}I", fh.read(4 * n_sizes))
        net = Mlp(sizes, "sigmoid" if act else "identity")
        for li, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            w = np.frombuffer(fh.read(8 * fan_in * fan_out), dtype="<f8")
            net.weights[li] = w.reshape(fan_out, fan_in).copy()
            net.biases[li] = np.frombuffer(fh.read(8 * fan_out), dtype="<f8").copy()
    return net
