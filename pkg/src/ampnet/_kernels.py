"""JIT-compiled numerical kernels.

Every float operation of the library funnels through the scalar functions
defined here, both when called one value at a time through the public API and
when called from the fused training loop. That keeps results bit-identical
between the two paths.

Network parameters live in flat 1-D buffers. `dims` holds the layer widths
including the input layer; layer k (1-based, counting only non-input layers)
has its weight block at `w_off[k-1]` with row-major shape
(dims[k], dims[k-1]) and its per-neuron block at `n_off[k-1]`.

Per-neuron role codes:
    primary:   0 parametric softplus (param `pa`), 1 identity, 2 relu
    secondary: 0 plain, 1 amplify, 2 attenuate (param `sb`)
"""

import math

import numpy as np
from numba import njit

PRIM_SOFTPLUS = 0
PRIM_IDENTITY = 1
PRIM_RELU = 2

SEC_NONE = 0
SEC_AMPLIFY = 1
SEC_ATTENUATE = 2

# Above this magnitude h*h may overflow; switch to the reciprocal form.
_ATTENUATE_BIG = 1e75


@njit(cache=True, nogil=True)
def primary_value(code, a, x):
    if code == PRIM_SOFTPLUS:
        # Two equivalent forms of a*x + (1-a)*ln(1+e^x); each is
        # overflow-free on its half line.
        if x <= 0.0:
            return a * x + (1.0 - a) * math.log1p(math.exp(x))
        return x + (1.0 - a) * math.log1p(math.exp(-x))
    if code == PRIM_RELU:
        return x if x > 0.0 else 0.0
    return x


@njit(cache=True, nogil=True)
def primary_derivative(code, a, x):
    if code == PRIM_SOFTPLUS:
        # a + (1-a)*sigmoid(x), sigmoid evaluated on the stable branch
        if x >= 0.0:
            s = 1.0 / (1.0 + math.exp(-x))
        else:
            e = math.exp(x)
            s = e / (1.0 + e)
        return a + (1.0 - a) * s
    if code == PRIM_RELU:
        return 1.0 if x > 0.0 else 0.0
    return 1.0


@njit(cache=True, nogil=True)
def secondary_value(code, b, h):
    if code == SEC_AMPLIFY:
        return h * h
    if code == SEC_ATTENUATE:
        if h > _ATTENUATE_BIG or h < -_ATTENUATE_BIG:
            u = 1.0 / h
            return u / (1.0 + b * u * u)
        return h / (h * h + b)
    return h


@njit(cache=True, nogil=True)
def secondary_derivative(code, b, h):
    if code == SEC_AMPLIFY:
        return 2.0 * h
    if code == SEC_ATTENUATE:
        if h > _ATTENUATE_BIG or h < -_ATTENUATE_BIG:
            u2 = (1.0 / h) * (1.0 / h)
            return (b * u2 - 1.0) * u2 / ((1.0 + b * u2) * (1.0 + b * u2))
        d = h * h + b
        return (b - h * h) / (d * d)
    return 1.0


@njit(cache=True, nogil=True)
def _primary_pair(code, a, x):
    """(H(x), H'(x)), sharing one exp call for the softplus; bit-identical
    to calling primary_value and primary_derivative separately."""
    if code == PRIM_SOFTPLUS:
        if x <= 0.0:
            e = math.exp(x)
            # at x == 0, e/(1+e) and 1/(1+exp(-x)) are both exactly 1/2
            return a * x + (1.0 - a) * math.log1p(e), a + (1.0 - a) * (e / (1.0 + e))
        e = math.exp(-x)
        return x + (1.0 - a) * math.log1p(e), a + (1.0 - a) * (1.0 / (1.0 + e))
    if code == PRIM_RELU:
        if x > 0.0:
            return x, 1.0
        return 0.0, 0.0
    return x, 1.0


@njit(cache=True, nogil=True)
def composite(pcode, pa, scode, sb, x):
    """Per-neuron body of the forward pass: value and chain-rule derivative.

    The pre-secondary value is discarded once the secondary function has
    been applied; only (y, F') leave this function.
    """
    y, fp = _primary_pair(pcode, pa, x)
    if scode == SEC_AMPLIFY:
        fp = fp * 2.0 * y
        y = y * y
    elif scode == SEC_ATTENUATE:
        fp = fp * secondary_derivative(SEC_ATTENUATE, sb, y)
        y = secondary_value(SEC_ATTENUATE, sb, y)
    return y, fp


@njit(cache=True, nogil=True)
def secondary_value_batch(code, b, hs, out):
    for i in range(hs.shape[0]):
        out[i] = secondary_value(code, b, hs[i])


@njit(cache=True, nogil=True)
def composite_batch(pcode, pa, scode, sb, xs, val_out, der_out):
    for i in range(xs.shape[0]):
        y, fp = composite(pcode, pa, scode, sb, xs[i])
        val_out[i] = y
        der_out[i] = fp


@njit(cache=True, nogil=True)
def forward_trace(dims, w_off, n_off, w, b, pcode, pa, scode, sb,
                  x, z_out, y_out, fp_out):
    """Forward pass, filling flat pre-activation / value / derivative buffers.

    Returns the 1-based index of the first layer that produced a non-finite
    value, or 0 if the pass stayed finite.
    """
    n_layers = dims.shape[0] - 1
    for k in range(n_layers):
        fi = dims[k]
        fo = dims[k + 1]
        woff = w_off[k]
        noff = n_off[k]
        poff = n_off[k - 1] if k > 0 else 0
        ok = True
        for i in range(fo):
            acc = b[noff + i]
            row = woff + i * fi
            if k == 0:
                for j in range(fi):
                    acc += w[row + j] * x[j]
            else:
                for j in range(fi):
                    acc += w[row + j] * y_out[poff + j]
            z_out[noff + i] = acc
            y, fp = composite(pcode[noff + i], pa[noff + i],
                              scode[noff + i], sb[noff + i], acc)
            y_out[noff + i] = y
            fp_out[noff + i] = fp
            if not (math.isfinite(y) and math.isfinite(fp)):
                ok = False
        if not ok:
            return k + 1
    return 0


@njit(cache=True, nogil=True)
def backward(dims, w_off, n_off, w, x, y_flat, fp_flat, out_err,
             gw, gb, delta):
    """Backpropagation of dLoss/d(output) to every weight and bias.

    `y_flat`/`fp_flat` come from forward_trace on the same input; `delta` is
    scratch of the same length.
    """
    n_layers = dims.shape[0] - 1
    last = n_off[n_layers - 1]
    for i in range(dims[n_layers]):
        delta[last + i] = out_err[i] * fp_flat[last + i]
    for k in range(n_layers - 1, -1, -1):
        fi = dims[k]
        fo = dims[k + 1]
        woff = w_off[k]
        noff = n_off[k]
        poff = n_off[k - 1] if k > 0 else 0
        for i in range(fo):
            d = delta[noff + i]
            row = woff + i * fi
            gb[noff + i] = d
            if k == 0:
                for j in range(fi):
                    gw[row + j] = d * x[j]
            else:
                for j in range(fi):
                    gw[row + j] = d * y_flat[poff + j]
        if k > 0:
            for j in range(fi):
                s = 0.0
                for i in range(fo):
                    s += w[woff + i * fi + j] * delta[noff + i]
                delta[poff + j] = s * fp_flat[poff + j]


@njit(cache=True, nogil=True)
def adam_update(w, b, gw, gb, m_w, v_w, m_b, v_b, t,
                lr, beta1, beta2, eps):
    """One Adam step over all parameters (t is the already-advanced counter).

    Returns -1 on success, or the flat coordinate of the first non-finite
    gradient component (bias coordinates offset by the weight count).
    """
    bc1 = 1.0 - beta1 ** t
    bc2 = 1.0 - beta2 ** t
    for i in range(gw.shape[0]):
        g = gw[i]
        if not math.isfinite(g):
            return i
        m_w[i] = beta1 * m_w[i] + (1.0 - beta1) * g
        v_w[i] = beta2 * v_w[i] + (1.0 - beta2) * g * g
        w[i] -= lr * (m_w[i] / bc1) / (math.sqrt(v_w[i] / bc2) + eps)
    nw = gw.shape[0]
    for i in range(gb.shape[0]):
        g = gb[i]
        if not math.isfinite(g):
            return nw + i
        m_b[i] = beta1 * m_b[i] + (1.0 - beta1) * g
        v_b[i] = beta2 * v_b[i] + (1.0 - beta2) * g * g
        b[i] -= lr * (m_b[i] / bc1) / (math.sqrt(v_b[i] / bc2) + eps)
    return -1


@njit(cache=True, nogil=True)
def predict_into(dims, w_off, n_off, w, b, pcode, pa, scode, sb, xs, outs):
    """Row-wise forward over a batch; returns (row, layer) of the first
    non-finite propagation, or (-1, 0) when all rows are finite."""
    total_n = n_off[n_off.shape[0] - 1] + dims[dims.shape[0] - 1]
    z = np.empty(total_n)
    y = np.empty(total_n)
    fp = np.empty(total_n)
    n_layers = dims.shape[0] - 1
    last = n_off[n_layers - 1]
    dout = dims[n_layers]
    for r in range(xs.shape[0]):
        bad = forward_trace(dims, w_off, n_off, w, b, pcode, pa, scode, sb,
                            xs[r], z, y, fp)
        if bad != 0:
            return r, bad
        for o in range(dout):
            outs[r, o] = y[last + o]
    return -1, 0


@njit(cache=True, nogil=True)
def train_loop(dims, w_off, n_off, w, b, pcode, pa, scode, sb,
               xs, ys, perms, lr, beta1, beta2, eps, l2_lambda,
               m_w, v_w, m_b, v_b, t_start, epoch_loss_out):
    """Batch-size-1 training: forward, squared-error loss, backward, optional
    L2 gradient contribution, Adam update, one sample at a time.

    `perms[e]` is the visit order for epoch e. Mean per-sample data loss is
    written to `epoch_loss_out[e]`. Returns (status, epoch, sample_row, t):
    status 0 finished, 1 non-finite loss, 2 non-finite gradient.
    """
    n_layers = dims.shape[0] - 1
    total_n = n_off[n_layers - 1] + dims[n_layers]
    total_w = w.shape[0]
    dout = dims[n_layers]
    last = n_off[n_layers - 1]
    z = np.empty(total_n)
    y = np.empty(total_n)
    fp = np.empty(total_n)
    delta = np.empty(total_n)
    gw = np.empty(total_w)
    gb = np.empty(total_n)
    out_err = np.empty(dout)
    t = t_start
    epochs = perms.shape[0]
    n_samples = perms.shape[1]
    for e in range(epochs):
        total = 0.0
        for s in range(n_samples):
            i = perms[e, s]
            forward_trace(dims, w_off, n_off, w, b, pcode, pa, scode, sb,
                          xs[i], z, y, fp)
            loss = 0.0
            for o in range(dout):
                err = y[last + o] - ys[i, o]
                out_err[o] = err
                loss += 0.5 * err * err
            if not math.isfinite(loss):
                return 1, e, i, t
            backward(dims, w_off, n_off, w, xs[i], y, fp, out_err,
                     gw, gb, delta)
            if l2_lambda != 0.0:
                for q in range(total_w):
                    gw[q] += l2_lambda * w[q]
            t += 1
            bad = adam_update(w, b, gw, gb, m_w, v_w, m_b, v_b, t,
                              lr, beta1, beta2, eps)
            if bad >= 0:
                return 2, e, i, t
            total += loss
        epoch_loss_out[e] = total / n_samples
    return 0, -1, -1, t
