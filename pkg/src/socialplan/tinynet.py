"""Minimal dense sigmoid network with backpropagation, plus the adversarial
generator/discriminator pair used for node-cost learning.

The generator maps a 5-feature row to a scalar cost in (0, 1); the
discriminator maps (features, cost) to the probability that the pair came
from a demonstration. Losses are computed on final-layer pre-activations via
log-sigmoid so nothing overflows even for extreme inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

GENERATOR_SIZES = (5, 10, 1)
DISCRIMINATOR_SIZES = (6, 10, 1)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softplus(x: np.ndarray) -> np.ndarray:
    """log(1 + exp(x)) without overflow."""
    return np.log1p(np.exp(-np.abs(x))) + np.maximum(x, 0.0)


class Mlp:
    """Fully connected net, sigmoid activation on every layer."""

    def __init__(self, sizes, weights=None, biases=None, rng: np.random.Generator | None = None):
        self.sizes = tuple(int(s) for s in sizes)
        if len(self.sizes) < 2:
            raise ValueError("need at least input and output layers")
        if weights is not None:
            self.weights = [np.array(w, dtype=float) for w in weights]
            self.biases = [np.array(b, dtype=float) for b in biases]
            for i, (w, b) in enumerate(zip(self.weights, self.biases)):
                if w.shape != (self.sizes[i + 1], self.sizes[i]) or b.shape != (self.sizes[i + 1],):
                    raise ValueError(f"layer {i} parameter shape mismatch")
        else:
            rng = rng if rng is not None else np.random.default_rng()
            self.weights = []
            self.biases = []
            for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
                bound = 1.0 / math.sqrt(fan_in)
                self.weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
                self.biases.append(rng.uniform(-bound, bound, size=fan_out))

    def copy(self) -> "Mlp":
        return Mlp(self.sizes, [w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def check_finite(self) -> None:
        for w, b in zip(self.weights, self.biases):
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise FloatingPointError("non-finite network parameter")

    def _as_batch(self, x) -> tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.shape[1] != self.sizes[0]:
            raise ValueError(f"input width {arr.shape[1]}, expected {self.sizes[0]}")
        if not np.isfinite(arr).all():
            raise ValueError("non-finite input")
        return arr, single

    def forward_cached(self, x):
        """Returns (activations, pre_activations); activations[0] is the input."""
        arr, _ = self._as_batch(x)
        acts = [arr]
        pres = []
        for w, b in zip(self.weights, self.biases):
            z = acts[-1] @ w.T + b
            pres.append(z)
            acts.append(sigmoid(z))
        return acts, pres

    def forward(self, x) -> np.ndarray:
        arr, single = self._as_batch(x)
        a = arr
        for w, b in zip(self.weights, self.biases):
            a = sigmoid(a @ w.T + b)
        return a[0] if single else a

    def final_preactivation(self, x) -> np.ndarray:
        """Pre-sigmoid output of the last layer, shape (n,) for scalar nets."""
        arr, single = self._as_batch(x)
        a = arr
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = sigmoid(a @ w.T + b)
        z = a @ self.weights[-1].T + self.biases[-1]
        if self.sizes[-1] == 1:
            z = z[:, 0]
        return z[0] if single else z

    def backward(self, cache, grad_output: np.ndarray):
        """Gradients of a scalar loss given d(loss)/d(output activations).

        Returns (param_grads, grad_input): param_grads is a list of (dW, db)
        per layer, grad_input has the shape of the cached input batch.
        """
        acts, pres = cache
        grad = np.asarray(grad_output, dtype=float)
        if grad.ndim == 1:
            grad = grad[None, :]
        if grad.shape != acts[-1].shape:
            raise ValueError(f"upstream gradient shape {grad.shape}, expected {acts[-1].shape}")
        param_grads = [None] * len(self.weights)
        for layer in range(len(self.weights) - 1, -1, -1):
            a_out = acts[layer + 1]
            dz = grad * a_out * (1.0 - a_out)
            param_grads[layer] = (dz.T @ acts[layer], dz.sum(axis=0))
            grad = dz @ self.weights[layer]
        return param_grads, grad

    def backward_from_preactivation(self, cache, grad_z: np.ndarray):
        """Same as backward but the upstream gradient is w.r.t. the final
        pre-activation (one column), skipping the output sigmoid."""
        acts, _ = cache
        dz = np.asarray(grad_z, dtype=float)
        if dz.ndim == 1:
            dz = dz[:, None]
        param_grads = [None] * len(self.weights)
        grad = dz
        for layer in range(len(self.weights) - 1, -1, -1):
            if layer < len(self.weights) - 1:
                a_out = acts[layer + 1]
                grad = grad * a_out * (1.0 - a_out)
            param_grads[layer] = (grad.T @ acts[layer], grad.sum(axis=0))
            grad = grad @ self.weights[layer]
        return param_grads, grad


class SgdMomentum:
    """Classical momentum: v <- mu*v + g; theta <- theta - lr*v."""

    def __init__(self, net: Mlp, lr: float, momentum: float = 0.9):
        if not lr > 0.0:
            raise ValueError("lr must be positive")
        if not 0.0 <= momentum < 1.0:
            raise ValueError("momentum must be in [0, 1)")
        self.net = net
        self.lr = lr
        self.momentum = momentum
        self.vel_w = [np.zeros_like(w) for w in net.weights]
        self.vel_b = [np.zeros_like(b) for b in net.biases]

    def step(self, param_grads) -> None:
        for i, (dw, db) in enumerate(param_grads):
            if not (np.isfinite(dw).all() and np.isfinite(db).all()):
                raise FloatingPointError(f"non-finite gradient at layer {i}")
            self.vel_w[i] = self.momentum * self.vel_w[i] + dw
            self.vel_b[i] = self.momentum * self.vel_b[i] + db
            self.net.weights[i] -= self.lr * self.vel_w[i]
            self.net.biases[i] -= self.lr * self.vel_b[i]
        self.net.check_finite()


def sgd_step(net: Mlp, param_grads, lr: float, momentum: float, velocities=None):
    """One momentum update; returns the velocity buffers for chaining."""
    opt = SgdMomentum(net, lr, momentum)
    if velocities is not None:
        opt.vel_w, opt.vel_b = velocities
    opt.step(param_grads)
    return opt.vel_w, opt.vel_b


@dataclass
class GanPair:
    generator: Mlp
    discriminator: Mlp
    g_opt: SgdMomentum = field(repr=False, default=None)
    d_opt: SgdMomentum = field(repr=False, default=None)
    seed: int = 0

    @classmethod
    def initialize(cls, seed: int, lr_g: float = 1e-3, lr_d: float = 1e-3, momentum: float = 0.9) -> "GanPair":
        rng = np.random.default_rng(seed)
        gen = Mlp(GENERATOR_SIZES, rng=rng)
        dis = Mlp(DISCRIMINATOR_SIZES, rng=rng)
        return cls(
            generator=gen,
            discriminator=dis,
            g_opt=SgdMomentum(gen, lr_g, momentum),
            d_opt=SgdMomentum(dis, lr_d, momentum),
            seed=seed,
        )

    def copy(self) -> "GanPair":
        gen = self.generator.copy()
        dis = self.discriminator.copy()
        g_opt = SgdMomentum(gen, self.g_opt.lr, self.g_opt.momentum)
        d_opt = SgdMomentum(dis, self.d_opt.lr, self.d_opt.momentum)
        g_opt.vel_w = [v.copy() for v in self.g_opt.vel_w]
        g_opt.vel_b = [v.copy() for v in self.g_opt.vel_b]
        d_opt.vel_w = [v.copy() for v in self.d_opt.vel_w]
        d_opt.vel_b = [v.copy() for v in self.d_opt.vel_b]
        return GanPair(gen, dis, g_opt, d_opt, self.seed)

    def node_cost(self, features) -> np.ndarray:
        """Generator output for one feature row or an (n, 5) batch."""
        return self.generator.forward(features)

    def realness(self, features, costs) -> np.ndarray:
        """Discriminator probability for feature rows paired with costs."""
        feats = np.asarray(features, dtype=float)
        single = feats.ndim == 1
        if single:
            feats = feats[None, :]
        c = np.asarray(costs, dtype=float).reshape(len(feats), 1)
        out = self.discriminator.forward(np.hstack([feats, c]))
        return out[0, 0] if single else out[:, 0]


def _d_inputs(pair: GanPair, features: np.ndarray) -> np.ndarray:
    feats = np.asarray(features, dtype=float)
    costs = pair.generator.forward(feats)
    return np.hstack([feats, costs])


def d_loss(pair: GanPair, real_features, fake_features) -> float:
    """Mean binary cross-entropy of the discriminator: demonstration nodes
    (paired with their generator cost) labeled 1, planned nodes labeled 0.
    Group means are averaged so the value is ln 2 at maximal uncertainty."""
    real = np.asarray(real_features, dtype=float)
    fake = np.asarray(fake_features, dtype=float)
    if len(real) == 0 or len(fake) == 0:
        raise ValueError("empty batch")
    z_real = pair.discriminator.final_preactivation(_d_inputs(pair, real))
    z_fake = pair.discriminator.final_preactivation(_d_inputs(pair, fake))
    return float(0.5 * (softplus(-z_real).mean() + softplus(z_fake).mean()))


def d_loss_grads(pair: GanPair, real_features, fake_features):
    """(loss, discriminator parameter gradients); generator held constant."""
    real = np.asarray(real_features, dtype=float)
    fake = np.asarray(fake_features, dtype=float)
    if len(real) == 0 or len(fake) == 0:
        raise ValueError("empty batch")
    x = np.vstack([_d_inputs(pair, real), _d_inputs(pair, fake)])
    cache = pair.discriminator.forward_cached(x)
    z = cache[1][-1][:, 0]
    n_r, n_f = len(real), len(fake)
    loss = float(0.5 * (softplus(-z[:n_r]).mean() + softplus(z[n_r:]).mean()))
    # d/dz of 0.5*(mean softplus(-z_r) + mean softplus(z_f))
    grad_z = np.empty_like(z)
    grad_z[:n_r] = 0.5 * (sigmoid(z[:n_r]) - 1.0) / n_r
    grad_z[n_r:] = 0.5 * sigmoid(z[n_r:]) / n_f
    grads, _ = pair.discriminator.backward_from_preactivation(cache, grad_z)
    return loss, grads


def g_loss(pair: GanPair, fake_features, *, saturating: bool = False) -> float:
    """Generator objective on planned-node features.

    Default is the non-saturating form mean(-log D(f, G(f))); saturating=True
    gives the literal mean(log(1 - D(f, G(f)))).
    """
    fake = np.asarray(fake_features, dtype=float)
    if len(fake) == 0:
        raise ValueError("empty batch")
    z = pair.discriminator.final_preactivation(_d_inputs(pair, fake))
    if saturating:
        return float(-softplus(z).mean())  # log(1 - sigmoid(z)) = -softplus(z)
    return float(softplus(-z).mean())  # -log sigmoid(z)


def g_loss_grads(pair: GanPair, fake_features, *, saturating: bool = False):
    """(loss, generator parameter gradients).

    The gradient reaches the generator only through the cost coordinate of
    the discriminator input; the feature coordinates are constants.
    """
    fake = np.asarray(fake_features, dtype=float)
    if len(fake) == 0:
        raise ValueError("empty batch")
    g_cache = pair.generator.forward_cached(fake)
    costs = g_cache[0][-1]
    d_cache = pair.discriminator.forward_cached(np.hstack([fake, costs]))
    z = d_cache[1][-1][:, 0]
    n = len(fake)
    if saturating:
        loss = float(-softplus(z).mean())
        grad_z = -sigmoid(z) / n
    else:
        loss = float(softplus(-z).mean())
        grad_z = (sigmoid(z) - 1.0) / n
    _, d_input_grad = pair.discriminator.backward_from_preactivation(d_cache, grad_z)
    upstream_cost = d_input_grad[:, -1:]  # only the cost column flows back
    grads, _ = pair.generator.backward(g_cache, upstream_cost)
    return loss, grads


# ---------------------------------------------------------------------------
# persistence


def mlp_to_dict(net: Mlp) -> dict:
    return {
        "layers": list(net.sizes),
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "format_version": 1,
    }


def mlp_from_dict(doc: dict) -> Mlp:
    if doc.get("format_version") != 1:
        raise ValueError(f"unsupported model format_version {doc.get('format_version')!r}")
    return Mlp(doc["layers"], doc["weights"], doc["biases"])


def save_mlp(net: Mlp, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mlp_to_dict(net), fh)
        fh.write("\n")


def load_mlp(path) -> Mlp:
    with open(path, encoding="utf-8") as fh:
        return mlp_from_dict(json.load(fh))


def pair_to_dict(pair: GanPair) -> dict:
    return {
        "format_version": 1,
        "generator": mlp_to_dict(pair.generator),
        "discriminator": mlp_to_dict(pair.discriminator),
    }


def pair_from_dict(doc: dict, lr_g: float = 1e-3, lr_d: float = 1e-3, momentum: float = 0.9) -> GanPair:
    gen = mlp_from_dict(doc["generator"])
    dis = mlp_from_dict(doc["discriminator"])
    return GanPair(gen, dis, SgdMomentum(gen, lr_g, momentum), SgdMomentum(dis, lr_d, momentum))


def save_pair(pair: GanPair, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(pair_to_dict(pair), fh)
        fh.write("\n")


def load_pair(path, **kwargs) -> GanPair:
    with open(path, encoding="utf-8") as fh:
        return pair_from_dict(json.load(fh), **kwargs)


def load_generator(path) -> Mlp:
    """Accepts either a bare model file or a generator/discriminator pair file."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "generator" in doc:
        return mlp_from_dict(doc["generator"])
    return mlp_from_dict(doc)
