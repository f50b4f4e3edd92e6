"""From-scratch two-layer LSTM over the five-action alphabet.

Parameters live in a flat dict of float64 numpy arrays so the optimizer and
gradient clipping can treat the model as one parameter vector.  Gate order
in the stacked weight matrices is input, forget, cell-candidate, output.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericsError, ShapeError
from .tiles import ACTIONS

K = len(ACTIONS)  # alphabet size

CHECKPOINT_VERSION = 1


@dataclass
class LstmModel:
    hidden_size: int
    num_layers: int
    params: dict[str, np.ndarray] = field(default_factory=dict)
    alphabet: str = ACTIONS

    def param_names(self) -> list[str]:
        return sorted(self.params)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def init_model(hidden_size: int, num_layers: int = 2, seed: int = 0) -> LstmModel:
    """Uniform init in [-1/sqrt(H), 1/sqrt(H)]; forget-gate bias 1."""
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(hidden_size)
    params: dict[str, np.ndarray] = {}
    in_dim = K
    for layer in range(num_layers):
        h = hidden_size
        params[f"l{layer}.W"] = rng.uniform(-scale, scale, (4 * h, in_dim))
        params[f"l{layer}.U"] = rng.uniform(-scale, scale, (4 * h, h))
        b = np.zeros(4 * h)
        b[h : 2 * h] = 1.0  # forget gate
        params[f"l{layer}.b"] = b
        in_dim = h
    params["out.W"] = rng.uniform(-scale, scale, (K, hidden_size))
    params["out.b"] = np.zeros(K)
    return LstmModel(hidden_size, num_layers, params)


def zero_state(model: LstmModel, batch: int):
    """Fresh (h, c) pairs for every layer."""
    h = model.hidden_size
    return [
        (np.zeros((batch, h)), np.zeros((batch, h)))
        for _ in range(model.num_layers)
    ]


def _step(model, layer, x, h_prev, c_prev):
    """One LSTM cell step; returns gate activations and new state."""
    H = model.hidden_size
    p = model.params
    z = x @ p[f"l{layer}.W"].T + h_prev @ p[f"l{layer}.U"].T + p[f"l{layer}.b"]
    i = _sigmoid(z[:, 0:H])
    f = _sigmoid(z[:, H : 2 * H])
    g = np.tanh(z[:, 2 * H : 3 * H])
    o = _sigmoid(z[:, 3 * H : 4 * H])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return i, f, g, o, c, h


def lstm_forward(
    model: LstmModel,
    inputs: np.ndarray,
    dropout: float = 0.0,
    rng: np.random.Generator | None = None,
    state=None,
):
    """Run the network over a (batch, time, K) one-hot array.

    Returns (probs, cache).  Each probability row is a softmax over the
    action alphabet.  `dropout` > 0 applies inverted dropout to each
    layer's output (the feed-forward path only; the recurrent path stays
    undropped) and requires `rng`.
    """
    if inputs.ndim == 2:
        inputs = inputs[None]
    B, T, k = inputs.shape
    if k != K:
        raise ShapeError(f"input feature size {k} != alphabet size {K}")
    if dropout and rng is None:
        raise ShapeError("dropout requires an rng")
    keep = 1.0 - dropout
    if state is None:
        state = zero_state(model, B)

    cache = {
        "inputs": inputs,
        "dropout": dropout,
        "steps": [],  # per timestep: per-layer tuples + projection data
        "probs": None,
    }
    probs = np.empty((B, T, K))
    hs = [s[0] for s in state]
    cs = [s[1] for s in state]
    for t in range(T):
        x = inputs[:, t, :]
        step_layers = []
        for layer in range(model.num_layers):
            h_prev, c_prev = hs[layer], cs[layer]
            i, f, g, o, c, h = _step(model, layer, x, h_prev, c_prev)
            if dropout:
                mask = (rng.random(h.shape) < keep) / keep
            else:
                mask = None
            hd = h * mask if mask is not None else h
            step_layers.append((x, h_prev, c_prev, i, f, g, o, c, h, mask))
            hs[layer], cs[layer] = h, c
            x = hd
        logits = x @ model.params["out.W"].T + model.params["out.b"]
        p = softmax_rows(logits)
        probs[:, t, :] = p
        step_layers.append(x)  # dropped top-layer output fed to projection
        cache["steps"].append(step_layers)
    if not np.all(np.isfinite(probs)):
        raise NumericsError("non-finite activations in forward pass")
    cache["probs"] = probs
    cache["state"] = list(zip(hs, cs))
    return probs, cache


def lstm_backward(model: LstmModel, cache: dict, targets: np.ndarray):
    """Backprop through time; returns (grads, mean cross-entropy loss).

    `targets` is one-hot with all-zero rows marking padding; padded steps
    are excluded from both the loss and the gradients.
    """
    if targets.ndim == 2:
        targets = targets[None]
    probs = cache["probs"]
    if targets.shape != probs.shape:
        raise ShapeError(f"targets {targets.shape} != outputs {probs.shape}")
    B, T, _ = probs.shape
    mask = targets.sum(axis=2) > 0  # (B, T)
    n = int(mask.sum())
    if n == 0:
        raise ShapeError("all target rows are padding")

    p_target = (probs * targets).sum(axis=2)
    loss = float(-np.log(np.where(mask, np.maximum(p_target, 1e-300), 1.0)).sum() / n)

    grads = {name: np.zeros_like(arr) for name, arr in model.params.items()}
    H = model.hidden_size
    L = model.num_layers
    dh_rec = [np.zeros((B, H)) for _ in range(L)]
    dc_rec = [np.zeros((B, H)) for _ in range(L)]
    Wout = model.params["out.W"]

    for t in reversed(range(T)):
        step = cache["steps"][t]
        top_in = step[L]  # dropped top-layer output at this step
        dlogits = (probs[:, t, :] - targets[:, t, :]) * mask[:, t : t + 1] / n
        grads["out.W"] += dlogits.T @ top_in
        grads["out.b"] += dlogits.sum(axis=0)
        d_down = dlogits @ Wout  # gradient w.r.t. dropped output of top layer
        for layer in reversed(range(L)):
            x, h_prev, c_prev, i, f, g, o, c, mdrop = (
                step[layer][0],
                step[layer][1],
                step[layer][2],
                step[layer][3],
                step[layer][4],
                step[layer][5],
                step[layer][6],
                step[layer][7],
                step[layer][9],
            )
            tanh_c = np.tanh(c)
            dh = (d_down * mdrop if mdrop is not None else d_down) + dh_rec[layer]
            do = dh * tanh_c
            dc = dh * o * (1.0 - tanh_c * tanh_c) + dc_rec[layer]
            di = dc * g
            dg = dc * i
            df = dc * c_prev
            dc_rec[layer] = dc * f
            dz = np.concatenate(
                [
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    dg * (1.0 - g * g),
                    do * o * (1.0 - o),
                ],
                axis=1,
            )
            grads[f"l{layer}.W"] += dz.T @ x
            grads[f"l{layer}.U"] += dz.T @ h_prev
            grads[f"l{layer}.b"] += dz.sum(axis=0)
            dh_rec[layer] = dz @ model.params[f"l{layer}.U"]
            d_down = dz @ model.params[f"l{layer}.W"]  # to the layer below
    return grads, loss


def sample_path(
    model: LstmModel,
    length: int = 103,
    rng: np.random.Generator | None = None,
    chunk_len: int = 50,
) -> str:
    """Generate `length` actions autoregressively.

    The first input chunk is all zeros; each subsequent chunk is the
    one-hot encoding of the chunk just generated, with the recurrent state
    carried across chunks.  Every output row is sampled probabilistically.
    """
    if rng is None:
        rng = np.random.default_rng()
    if length <= 0:
        return ""
    out: list[int] = []
    state = zero_state(model, 1)
    chunk = np.zeros((1, chunk_len, K))
    while len(out) < length:
        probs, cache = lstm_forward(model, chunk, state=state)
        state = cache["state"]
        picks = [int(rng.choice(K, p=probs[0, t])) for t in range(chunk_len)]
        out.extend(picks)
        chunk = np.zeros((1, chunk_len, K))
        chunk[0, np.arange(chunk_len), picks] = 1.0
    return "".join(ACTIONS[i] for i in out[:length])


# --- checkpoints ------------------------------------------------------------

def save_model(model: LstmModel, path: str) -> None:
    """Versioned JSON header, newline, then flat little-endian float64 data."""
    names = model.param_names()
    header = {
        "version": CHECKPOINT_VERSION,
        "hidden_size": model.hidden_size,
        "num_layers": model.num_layers,
        "alphabet": model.alphabet,
        "params": [{"name": n, "shape": list(model.params[n].shape)} for n in names],
    }
    blob = b"".join(model.params[n].astype("<f8").tobytes() for n in names)
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(blob)


def load_model(path: str) -> LstmModel:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        blob = fh.read()
    header = json.loads(header_line.decode("utf-8"))
    if header.get("version") != CHECKPOINT_VERSION:
        raise ShapeError(f"unsupported checkpoint version {header.get('version')}")
    params = {}
    offset = 0
    for entry in header["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        size = count * struct.calcsize("<d")
        arr = np.frombuffer(blob[offset : offset + size], dtype="<f8").reshape(shape)
        params[entry["name"]] = arr.copy()
        offset += size
    model = LstmModel(header["hidden_size"], header["num_layers"], params)
    model.alphabet = header["alphabet"]
    return model
