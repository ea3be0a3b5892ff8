"""Model assembly: conv stack -> global average pooling -> LSTM -> head.

Parameters live in an ordered dict mapping names to float64 arrays:
conv{l}/kernel, conv{l}/bias, lstm/wx, lstm/wh, lstm/b, head/w, head/b.
"""

from __future__ import annotations

import numpy as np

from .config import ArchitectureConfig
from . import ops
from .ops import ShapeError

ModelParams = dict


def _uniform_fan(rng: np.random.Generator, shape, fan_in: int, fan_out: int,
                 gain: float = 1.0):
    limit = gain * np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def build_model(config: ArchitectureConfig, seed: int) -> ModelParams:
    """Initialize parameters for one architecture.

    Weights are symmetric fan-scaled uniform; conv kernels get the ReLU
    gain sqrt(2) so activation magnitudes stay stable through the stack.
    Biases are zero except the LSTM forget gate, which starts at 1 so
    early training does not forget. Deterministic for a given seed.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    k = config.kernel_size
    params: ModelParams = {}
    c_in = 1
    for layer in range(1, config.conv_layers + 1):
        c_out = config.channels_at(layer)
        params[f"conv{layer}/kernel"] = _uniform_fan(
            rng, (k, c_in, c_out), k * c_in, k * c_out, gain=np.sqrt(2.0))
        params[f"conv{layer}/bias"] = np.zeros(c_out)
        c_in = c_out
    F, H = config.feature_dim, config.lstm_units
    params["lstm/wx"] = _uniform_fan(rng, (F, 4 * H), F, H)
    params["lstm/wh"] = _uniform_fan(rng, (H, 4 * H), H, H)
    b = np.zeros(4 * H)
    b[H:2 * H] = 1.0  # forget gate
    params["lstm/b"] = b
    out = config.head_outputs
    params["head/w"] = _uniform_fan(rng, (H, out), H, out)
    params["head/b"] = np.zeros(out)
    return params


def param_count(params: ModelParams) -> int:
    return sum(int(a.size) for a in params.values())


def sample_dropout_masks(config: ArchitectureConfig, batch: int, rng: np.random.Generator):
    """Variational dropout masks for the LSTM, one pair per sequence.

    The same input mask (batch, F) and recurrent mask (batch, H) are
    reused at every time step, with inverted scaling so eval needs none.
    """
    rate = config.dropout_rate
    if rate <= 0.0:
        return None
    keep = 1.0 - rate
    mx = (rng.random((batch, config.feature_dim)) < keep) / keep
    mh = (rng.random((batch, config.lstm_units)) < keep) / keep
    return mx, mh


def _check_input(windows: np.ndarray, config: ArchitectureConfig) -> np.ndarray:
    windows = np.asarray(windows, dtype=np.float64)
    if windows.ndim == 3:
        windows = windows[None]
    if windows.ndim != 4 or windows.shape[3] != 1:
        raise ShapeError(f"expected (B, N, W, 1) windows, got {windows.shape}")
    if windows.shape[2] != config.window_size:
        raise ShapeError(
            f"window width {windows.shape[2]} != configured {config.window_size}")
    return windows


def _forward(windows: np.ndarray, params: ModelParams, config: ArchitectureConfig,
             dropout_masks=None):
    B, N, W, _ = windows.shape
    x = windows.reshape(B * N, W, 1)
    conv_caches = []
    for layer in range(1, config.conv_layers + 1):
        x, cache = ops.conv_block_forward(
            x, params[f"conv{layer}/kernel"], params[f"conv{layer}/bias"])
        conv_caches.append(cache)
    feats, gap_shape = ops.global_avg_pool(x)
    seq = feats.reshape(B, N, config.feature_dim)
    h, lstm_cache = ops.lstm_forward(
        seq, params["lstm/wx"], params["lstm/wh"], params["lstm/b"], dropout_masks)
    logits, head_cache = ops.dense(h, params["head/w"], params["head/b"])
    probs = ops.head_probs(logits, config.head)
    return probs, (conv_caches, gap_shape, lstm_cache, head_cache, windows.shape)


def model_forward(windows: np.ndarray, params: ModelParams, config: ArchitectureConfig,
                  mode: str = "eval", dropout_masks=None) -> np.ndarray:
    """Class probabilities for a batch of window tensors.

    windows: (B, N, W, 1), or (N, W, 1) for a single signal (returns a
    (K,) probability vector). Eval mode applies no dropout and is
    deterministic; train mode requires dropout masks from
    sample_dropout_masks (unless dropout is disabled).
    """
    single = np.ndim(windows) == 3
    windows = _check_input(windows, config)
    if mode == "eval":
        dropout_masks = None
    probs, _ = _forward(windows, params, config, dropout_masks)
    return probs[0] if single else probs


def loss_and_gradients(windows: np.ndarray, labels, params: ModelParams,
                       config: ArchitectureConfig, dropout_masks=None):
    """Mean cross-entropy and its gradients w.r.t. every parameter.

    Returns (loss, probs, grads) with grads congruent to params. The same
    dropout masks must be passed as were used for the forward pass being
    differentiated (they are reused internally).
    """
    windows = _check_input(windows, config)
    labels = np.atleast_1d(labels)
    probs, caches = _forward(windows, params, config, dropout_masks)
    conv_caches, gap_shape, lstm_cache, head_cache, in_shape = caches
    loss = ops.cross_entropy(probs, labels)

    grads: ModelParams = {}
    dlogits = ops.head_loss_grad(probs, labels, config.head)
    dh, grads["head/w"], grads["head/b"] = ops.dense_backward(
        dlogits, head_cache, params["head/w"])
    dseq, grads["lstm/wx"], grads["lstm/wh"], grads["lstm/b"] = ops.lstm_backward(
        dh, lstm_cache, params["lstm/wx"], params["lstm/wh"])
    B, N, W, _ = in_shape
    dx = ops.global_avg_pool_backward(
        dseq.reshape(B * N, config.feature_dim), gap_shape)
    for layer in range(config.conv_layers, 0, -1):
        dx, dw, db = ops.conv_block_backward(
            dx, conv_caches[layer - 1], params[f"conv{layer}/kernel"])
        grads[f"conv{layer}/kernel"] = dw
        grads[f"conv{layer}/bias"] = db
    return loss, probs, grads


def model_backward(windows: np.ndarray, params: ModelParams, config: ArchitectureConfig,
                   labels, dropout_masks=None) -> ModelParams:
    """Gradients only; see loss_and_gradients."""
    return loss_and_gradients(windows, labels, params, config, dropout_masks)[2]


def forward_trace(config: ArchitectureConfig, n_windows: int) -> list:
    """Layer-by-layer output shapes, mirroring the architecture table."""
    trace = [("input", (n_windows, config.window_size, 1))]
    for layer in range(1, config.conv_layers + 1):
        trace.append((f"conv{layer}",
                      (n_windows, config.width_at(layer), config.channels_at(layer))))
    trace.append(("global_avg_pool", (n_windows, config.feature_dim)))
    trace.append(("lstm", (config.lstm_units,)))
    trace.append(("head", (config.head_outputs,)))
    return trace
