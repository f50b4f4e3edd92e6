"""Training machinery: chunking, gradient clipping, Adam, the train loop."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, CorpusError, NumericsError, ShapeError
from .lstm import K, LstmModel, init_model, lstm_backward, lstm_forward
from .paths import PathSequence
from .tiles import ACTIONS

log = logging.getLogger(__name__)

ACTION_INDEX = {a: i for i, a in enumerate(ACTIONS)}


@dataclass
class TrainConfig:
    epochs: int = 60
    learning_rate: float = 0.001
    dropout_rate: float = 0.3
    clip_norm: float = 5.0
    batch_size: int = 16
    seed: int = 0
    hidden_size: int = 512
    num_layers: int = 2
    chunk_len: int = 50

    def validate(self):
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ConfigError("dropout_rate must be in [0, 1)")
        if self.clip_norm <= 0:
            raise ConfigError("clip_norm must be > 0")
        if self.batch_size < 1 or self.chunk_len < 1:
            raise ConfigError("batch_size and chunk_len must be >= 1")


def encode_actions(actions: str, chunk_len: int) -> np.ndarray:
    """One-hot (chunk_len, K) matrix; missing tail rows stay all-zero."""
    m = np.zeros((chunk_len, K))
    for t, a in enumerate(actions[:chunk_len]):
        m[t, ACTION_INDEX[a]] = 1.0
    return m


def make_training_pairs(
    paths: list[PathSequence], chunk_len: int = 50
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Consecutive-chunk (input, target) pairs from a path corpus.

    Each path splits into chunks of `chunk_len`; pair i is (chunk i,
    chunk i+1).  The final partial chunk is zero-padded.  Paths too short
    to give one full input chunk plus a nonempty target are skipped with a
    warning; an empty corpus (or one yielding no pairs) is an error.
    """
    if chunk_len < 1:
        raise ConfigError("chunk_len must be >= 1")
    if not paths:
        raise CorpusError("empty path corpus")
    pairs = []
    for idx, path in enumerate(paths):
        a = path.actions
        if len(a) <= chunk_len:
            log.warning(
                "path %d has %d actions (< %d + 1); skipped", idx, len(a), chunk_len
            )
            continue
        n_chunks = (len(a) + chunk_len - 1) // chunk_len
        for i in range(n_chunks - 1):
            src = a[i * chunk_len : (i + 1) * chunk_len]
            dst = a[(i + 1) * chunk_len : (i + 2) * chunk_len]
            pairs.append((encode_actions(src, chunk_len), encode_actions(dst, chunk_len)))
    if not pairs:
        raise CorpusError("corpus yields no training pairs")
    return pairs


def global_norm(grads: dict[str, np.ndarray]) -> float:
    return float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))


def clip_gradients(grads: dict[str, np.ndarray], clip_norm: float) -> dict[str, np.ndarray]:
    """Scale all gradients so the global L2 norm is at most clip_norm."""
    if clip_norm <= 0:
        raise ConfigError("clip_norm must be > 0")
    norm = global_norm(grads)
    if norm <= clip_norm:
        return grads
    scale = clip_norm / norm
    return {name: g * scale for name, g in grads.items()}


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray], **kw) -> "AdamState":
        return cls(
            m={n: np.zeros_like(p) for n, p in params.items()},
            v={n: np.zeros_like(p) for n, p in params.items()},
            **kw,
        )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
) -> None:
    """In-place Adam update with bias correction."""
    if set(params) != set(grads):
        raise ShapeError("parameter/gradient name mismatch")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape mismatch for {name}")
        state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        state.v[name] = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = state.m[name] / bc1
        v_hat = state.v[name] / bc2
        p -= lr * m_hat / (np.sqrt(v_hat) + state.eps)


def train(
    paths: list[PathSequence], config: TrainConfig
) -> tuple[LstmModel, list[float]]:
    """Train a fresh model on the corpus; returns (model, per-epoch loss)."""
    config.validate()
    pairs = make_training_pairs(paths, config.chunk_len)
    model = init_model(config.hidden_size, config.num_layers, seed=config.seed)
    state = AdamState.for_params(model.params)
    rng = np.random.default_rng(config.seed + 1)
    inputs = np.stack([p[0] for p in pairs])
    targets = np.stack([p[1] for p in pairs])
    n = len(pairs)
    history = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total, count = 0.0, 0
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            try:
                probs, cache = lstm_forward(
                    model, inputs[idx], dropout=config.dropout_rate, rng=rng
                )
                grads, loss = lstm_backward(model, cache, targets[idx])
            except NumericsError as exc:
                raise NumericsError(f"epoch {epoch + 1}: {exc}") from exc
            grads = clip_gradients(grads, config.clip_norm)
            adam_step(model.params, grads, state, config.learning_rate)
            total += loss * len(idx)
            count += len(idx)
        history.append(total / count)
        log.info("epoch %d/%d loss %.4f", epoch + 1, config.epochs, history[-1])
    return model, history
