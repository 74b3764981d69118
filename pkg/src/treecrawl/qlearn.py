"""Double-Q learning agent: a two-hidden-layer MLP value approximator with an
online and a target copy, experience replay, and plain gradient-descent steps.

The backward pass is written out explicitly so it can be validated against
finite differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class DimensionMismatchError(ValueError):
    pass


class TrainingDivergenceError(RuntimeError):
    """Loss or parameters became non-finite; usually a learning-rate problem."""


@dataclass
class AgentConfig:
    gamma: float = 0.9
    learning_rate: float = 1e-3
    batch_size: int = 32
    target_sync_every: int = 100
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay_steps: int | None = None  # defaults to 20% of the crawl budget
    hidden: tuple = (64, 32)
    activation: str = "relu"
    replay_capacity: int = 50_000
    next_action_cap: int = 256

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        for name in ("learning_rate", "batch_size", "target_sync_every",
                     "replay_capacity", "next_action_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def epsilon(self, step, budget):
        decay = self.eps_decay_steps if self.eps_decay_steps else max(1, int(0.2 * budget))
        frac = min(1.0, step / decay)
        return self.eps_start + (self.eps_end - self.eps_start) * frac


def _activate(name, z):
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh(z)
    raise ValueError(f"unknown activation {name!r}")


def _activate_grad(name, z):
    if name == "relu":
        return (z > 0.0).astype(np.float64)
    if name == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    raise ValueError(f"unknown activation {name!r}")


class QNetwork:
    """MLP with two hidden layers and a linear scalar output."""

    PARAM_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")

    def __init__(self, input_dim, hidden=(64, 32), activation="relu", rng=None):
        if rng is None:
            rng = np.random.default_rng()
        h1, h2 = hidden
        self.input_dim = int(input_dim)
        self.hidden = (int(h1), int(h2))
        self.activation = activation
        self.W1 = _xavier(rng, self.input_dim, h1)
        self.b1 = np.zeros(h1)
        self.W2 = _xavier(rng, h1, h2)
        self.b2 = np.zeros(h2)
        self.W3 = _xavier(rng, h2, 1)
        self.b3 = np.zeros(1)

    def _check_input(self, x):
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise DimensionMismatchError(
                f"expected input dimension {self.input_dim}, got shape {x.shape}")
        return x, single

    def forward(self, x):
        """Q estimate; a single vector gives a float, a batch gives a 1-D array."""
        X, single = self._check_input(x)
        z1 = X @ self.W1 + self.b1
        a1 = _activate(self.activation, z1)
        z2 = a1 @ self.W2 + self.b2
        a2 = _activate(self.activation, z2)
        out = (a2 @ self.W3 + self.b3)[:, 0]
        return float(out[0]) if single else out

    def loss_and_gradients(self, x, targets):
        """Mean squared error against fixed targets, plus its parameter gradients."""
        X, _ = self._check_input(x)
        y = np.asarray(targets, dtype=np.float64).reshape(-1)
        if y.shape[0] != X.shape[0]:
            raise DimensionMismatchError("batch and target sizes differ")
        n = X.shape[0]

        z1 = X @ self.W1 + self.b1
        a1 = _activate(self.activation, z1)
        z2 = a1 @ self.W2 + self.b2
        a2 = _activate(self.activation, z2)
        q = (a2 @ self.W3 + self.b3)[:, 0]

        diff = q - y
        loss = float(np.mean(diff * diff))

        dq = (2.0 * diff / n)[:, None]
        grads = {}
        grads["W3"] = a2.T @ dq
        grads["b3"] = dq.sum(axis=0)
        da2 = dq @ self.W3.T
        dz2 = da2 * _activate_grad(self.activation, z2)
        grads["W2"] = a1.T @ dz2
        grads["b2"] = dz2.sum(axis=0)
        da1 = dz2 @ self.W2.T
        dz1 = da1 * _activate_grad(self.activation, z1)
        grads["W1"] = X.T @ dz1
        grads["b1"] = dz1.sum(axis=0)
        return loss, grads

    def apply_gradients(self, grads, learning_rate):
        for name in self.PARAM_NAMES:
            param = getattr(self, name)
            param -= learning_rate * grads[name]
            if not np.all(np.isfinite(param)):
                raise TrainingDivergenceError(f"{name} became non-finite")

    def copy_from(self, other: "QNetwork"):
        for name in self.PARAM_NAMES:
            setattr(self, name, getattr(other, name).copy())
        self.activation = other.activation

    def clone(self) -> "QNetwork":
        twin = QNetwork.__new__(QNetwork)
        twin.input_dim = self.input_dim
        twin.hidden = self.hidden
        twin.activation = self.activation
        for name in self.PARAM_NAMES:
            setattr(twin, name, getattr(self, name).copy())
        return twin


def _xavier(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


@dataclass
class ReplayRecord:
    x: np.ndarray
    reward: float
    next_vectors: np.ndarray  # (k, d); k may be 0 when no follow-up actions exist


class ReplayBuffer:
    """FIFO ring of replay records with uniform sampling."""

    def __init__(self, capacity):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self._records = []
        self._cursor = 0

    def __len__(self):
        return len(self._records)

    def add(self, record: ReplayRecord):
        if len(self._records) < self.capacity:
            self._records.append(record)
        else:
            self._records[self._cursor] = record
            self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, rng, k):
        if not self._records:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, len(self._records), size=k)
        return [self._records[i] for i in idx]


def seed_replay(buffer: ReplayBuffer, seed_vectors):
    """Bootstrap the buffer with one unit-reward record per seed vector."""
    for x in seed_vectors:
        x = np.asarray(x, dtype=np.float64)
        if not np.all(x[:3] == 0.0):
            raise ValueError("seed vectors must carry zero state features")
        buffer.add(ReplayRecord(x=x, reward=1.0,
                                next_vectors=np.empty((0, x.shape[0]))))
    return buffer


def ddqn_target(record: ReplayRecord, online: QNetwork, target: QNetwork, gamma: float) -> float:
    """r plus gamma times the target net's value of the online net's argmax follow-up."""
    nxt = record.next_vectors
    if nxt.shape[0] == 0:
        return float(record.reward)
    online_q = online.forward(nxt)
    best = int(np.argmax(online_q))
    return float(record.reward) + gamma * float(target.forward(nxt[best]))


def batch_targets(records, online: QNetwork, target: QNetwork, gamma: float) -> np.ndarray:
    """Vectorized targets: one online pass over all follow-up vectors, one
    target pass over the per-record argmax rows."""
    ys = np.array([r.reward for r in records], dtype=np.float64)
    sizes = [r.next_vectors.shape[0] for r in records]
    if sum(sizes) == 0:
        return ys
    stacked = np.concatenate([r.next_vectors for r in records if r.next_vectors.shape[0] > 0])
    online_q = online.forward(stacked)
    chosen = []
    offset = 0
    for i, size in enumerate(sizes):
        if size == 0:
            continue
        seg = online_q[offset:offset + size]
        chosen.append((i, offset + int(np.argmax(seg))))
        offset += size
    rows = stacked[[c[1] for c in chosen]]
    target_q = target.forward(rows)
    if np.isscalar(target_q) or target_q.ndim == 0:
        target_q = np.atleast_1d(target_q)
    for (i, _), tq in zip(chosen, target_q):
        ys[i] += gamma * float(tq)
    return ys


def train_step(online: QNetwork, target: QNetwork, batch, cfg: AgentConfig) -> float:
    """One descent step on the squared error against fixed double-Q targets.

    Returns the pre-step loss.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    targets = batch_targets(batch, online, target, cfg.gamma)
    X = np.stack([r.x for r in batch])
    loss, grads = online.loss_and_gradients(X, targets)
    if not np.isfinite(loss):
        raise TrainingDivergenceError(f"non-finite loss {loss}")
    online.apply_gradients(grads, cfg.learning_rate)
    return loss


def sync_target(online: QNetwork, target: QNetwork):
    target.copy_from(online)
    return target


def save_checkpoint(net: QNetwork, path):
    record = {
        "layers": [net.input_dim, net.hidden[0], net.hidden[1], 1],
        "activation": net.activation,
    }
    for name in QNetwork.PARAM_NAMES:
        arr = getattr(net, name)
        record[name] = {"shape": list(arr.shape), "data": arr.reshape(-1).tolist()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh)
        fh.write("\n")


def load_checkpoint(path) -> QNetwork:
    with open(path, encoding="utf-8") as fh:
        record = json.load(fh)
    layers = record["layers"]
    net = QNetwork(layers[0], hidden=(layers[1], layers[2]),
                   activation=record["activation"], rng=np.random.default_rng(0))
    for name in QNetwork.PARAM_NAMES:
        spec = record[name]
        setattr(net, name, np.array(spec["data"], dtype=np.float64).reshape(spec["shape"]))
    return net
