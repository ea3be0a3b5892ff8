"""Differentiable building blocks: 1-D convolution, pooling, LSTM, heads.

Everything operates on float64 numpy arrays and returns, where relevant,
a cache consumed by the matching backward function. No autodiff framework
is used; gradients are hand-derived and checked against finite differences
in the test suite.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class NumericError(FloatingPointError):
    pass


class ShapeError(ValueError):
    pass


def _check_finite(x: np.ndarray, what: str):
    if not np.all(np.isfinite(x)):
        raise NumericError(f"non-finite values in {what}")


# ---------------------------------------------------------------------------
# Convolution (same-length zero padding, kernel 5) + ReLU + max pool of 2
# ---------------------------------------------------------------------------

def conv1d_same(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """Same-length 1-D convolution.

    x: (B, W, C_in), w: (K, C_in, C_out), b: (C_out,). Zero padding of
    (K-1)/2 on each side so the output width equals the input width.
    Returns (out, cache).
    """
    B, width, c_in = x.shape
    k, c_in_w, c_out = w.shape
    if c_in != c_in_w:
        raise ShapeError(f"channel mismatch: input has {c_in}, kernel expects {c_in_w}")
    pad = (k - 1) // 2
    xp = np.zeros((B, width + 2 * pad, c_in), dtype=x.dtype)
    xp[:, pad:pad + width, :] = x
    # cols: (B, W, K, C_in)
    cols = sliding_window_view(xp, k, axis=1).transpose(0, 1, 3, 2)
    cols2 = np.ascontiguousarray(cols).reshape(B * width, k * c_in)
    out = cols2 @ w.reshape(k * c_in, c_out) + b
    return out.reshape(B, width, c_out), (cols2, x.shape, w.shape)


def conv1d_same_backward(dout: np.ndarray, cache, w: np.ndarray):
    cols2, x_shape, w_shape = cache
    B, width, c_in = x_shape
    k, _, c_out = w_shape
    pad = (k - 1) // 2
    d2 = dout.reshape(B * width, c_out)
    dw = (cols2.T @ d2).reshape(w_shape)
    db = d2.sum(axis=0)
    dcols = (d2 @ w.reshape(k * c_in, c_out).T).reshape(B, width, k, c_in)
    dxp = np.zeros((B, width + 2 * pad, c_in), dtype=dout.dtype)
    for j in range(k):
        dxp[:, j:j + width, :] += dcols[:, :, j, :]
    return dxp[:, pad:pad + width, :], dw, db


def relu(x: np.ndarray):
    mask = x > 0
    return x * mask, mask


def relu_backward(dout: np.ndarray, mask: np.ndarray):
    return dout * mask


def maxpool2(x: np.ndarray):
    """Non-overlapping max pool of size 2 over the width axis.

    x: (B, W, C) with W even -> (B, W/2, C).
    """
    B, width, c = x.shape
    if width % 2 != 0:
        raise ShapeError(f"width {width} not divisible by pool size 2")
    pairs = x.reshape(B, width // 2, 2, c)
    idx = pairs.argmax(axis=2)
    out = np.take_along_axis(pairs, idx[:, :, None, :], axis=2)[:, :, 0, :]
    return out, (idx, x.shape)


def maxpool2_backward(dout: np.ndarray, cache):
    idx, x_shape = cache
    B, width, c = x_shape
    dpairs = np.zeros((B, width // 2, 2, c), dtype=dout.dtype)
    np.put_along_axis(dpairs, idx[:, :, None, :], dout[:, :, None, :], axis=2)
    return dpairs.reshape(x_shape)


def conv_block_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """One conv layer: same-pad convolution, ReLU, then max pool of 2."""
    y, conv_cache = conv1d_same(x, w, b)
    a, mask = relu(y)
    out, pool_cache = maxpool2(a)
    return out, (conv_cache, mask, pool_cache)


def conv_block_backward(dout: np.ndarray, cache, w: np.ndarray):
    conv_cache, mask, pool_cache = cache
    da = maxpool2_backward(dout, pool_cache)
    dy = relu_backward(da, mask)
    return conv1d_same_backward(dy, conv_cache, w)


# ---------------------------------------------------------------------------
# Global average pooling over the width axis
# ---------------------------------------------------------------------------

def global_avg_pool(x: np.ndarray):
    """(B, W, C) -> (B, C), per-channel mean over the window axis."""
    return x.mean(axis=1), x.shape


def global_avg_pool_backward(dout: np.ndarray, x_shape):
    B, width, c = x_shape
    return np.broadcast_to(dout[:, None, :] / width, x_shape).copy()


# ---------------------------------------------------------------------------
# LSTM over the window sequence
# ---------------------------------------------------------------------------

def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def lstm_forward(seq: np.ndarray, wx: np.ndarray, wh: np.ndarray, b: np.ndarray,
                 dropout_masks=None):
    """LSTM over a window sequence, returning the final hidden state.

    seq: (B, T, F) or (T, F) for a single sequence. Gate layout along the
    last weight axis is (input, forget, cell, output), each of width H.
    Initial hidden and cell states are zero.

    dropout_masks, when given, is a pair (input_mask (B, F), recurrent_mask
    (B, H)) of inverted-dropout masks sampled once per sequence and reused
    at every time step.
    """
    single = seq.ndim == 2
    if single:
        seq = seq[None]
    _check_finite(seq, "lstm input")
    B, T, F = seq.shape
    H = wh.shape[0]
    if wx.shape != (F, 4 * H):
        raise ShapeError(f"lstm input weights {wx.shape} incompatible with F={F}, H={H}")
    mx, mh = dropout_masks if dropout_masks is not None else (None, None)
    h = np.zeros((B, H), dtype=seq.dtype)
    c = np.zeros((B, H), dtype=seq.dtype)
    steps = []
    for t in range(T):
        x_t = seq[:, t, :] if mx is None else seq[:, t, :] * mx
        h_in = h if mh is None else h * mh
        z = x_t @ wx + h_in @ wh + b
        i = _sigmoid(z[:, :H])
        f = _sigmoid(z[:, H:2 * H])
        g = np.tanh(z[:, 2 * H:3 * H])
        o = _sigmoid(z[:, 3 * H:])
        c_prev = c
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        steps.append((x_t, h_in, i, f, g, o, c_prev, tc))
    cache = (steps, seq.shape, mx, mh, single)
    return (h[0] if single else h), cache


def lstm_backward(dh_last: np.ndarray, cache, wx: np.ndarray, wh: np.ndarray):
    steps, seq_shape, mx, mh, single = cache
    if single:
        dh_last = dh_last[None]
    B, T, F = seq_shape
    H = wh.shape[0]
    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros(4 * H, dtype=wx.dtype)
    dseq = np.zeros(seq_shape, dtype=wx.dtype)
    dh = dh_last.copy()
    dc = np.zeros((B, H), dtype=wx.dtype)
    for t in range(T - 1, -1, -1):
        x_t, h_in, i, f, g, o, c_prev, tc = steps[t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dz = np.concatenate(
            [di * i * (1 - i), df * f * (1 - f), dg * (1 - g * g), do * o * (1 - o)],
            axis=1,
        )
        dwx += x_t.T @ dz
        dwh += h_in.T @ dz
        db += dz.sum(axis=0)
        dx_t = dz @ wx.T
        dseq[:, t, :] = dx_t if mx is None else dx_t * mx
        dh_in = dz @ wh.T
        dh = dh_in if mh is None else dh_in * mh
        dc = dc * f
    if single:
        dseq = dseq[0]
    return dseq, dwx, dwh, db


# ---------------------------------------------------------------------------
# Classification heads and loss
# ---------------------------------------------------------------------------

def dense(h: np.ndarray, w: np.ndarray, b: np.ndarray):
    return h @ w + b, h


def dense_backward(dout: np.ndarray, h: np.ndarray, w: np.ndarray):
    return dout @ w.T, h.T @ dout, dout.sum(axis=0)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def head_probs(logits: np.ndarray, head: str) -> np.ndarray:
    """Class probabilities from head pre-activations.

    softmax: logits (B, K) -> (B, K). logistic: logits (B, 1) -> (B, 2)
    reported as (1 - p, p) with p the probability of the second class.
    """
    if head == "softmax":
        return softmax(logits)
    p = _sigmoid(logits[:, 0])
    return np.stack([1.0 - p, p], axis=1)


PROB_FLOOR = 1e-12


def cross_entropy(probs: np.ndarray, labels) -> float:
    """Mean negative log-likelihood, probabilities clamped away from zero."""
    probs = np.atleast_2d(probs)
    labels = np.atleast_1d(labels)
    p = np.clip(probs[np.arange(len(labels)), labels], PROB_FLOOR, 1.0)
    return float(-np.log(p).mean())


def head_loss_grad(probs: np.ndarray, labels, head: str) -> np.ndarray:
    """Gradient of the mean cross-entropy w.r.t. head pre-activations."""
    B = probs.shape[0]
    if head == "softmax":
        d = probs.copy()
        d[np.arange(B), labels] -= 1.0
        return d / B
    # logistic: d(-log p_y)/dz = sigmoid(z) - y
    p = probs[:, 1]
    return ((p - np.asarray(labels)) / B)[:, None]
