"""Three-branch convolutional classifier over community feature matrices.

The square branch stacks 3x3 convolutions with 2x2 max pooling, the wide
branch convolves whole rows (one node's features), the long branch convolves
whole columns (one dimension across nodes); branch outputs feed a two-layer
fully connected head with a softmax.  Everything runs in float64 numpy with
hand-written backward passes so gradients can be checked against finite
differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .labels import ClassResult


# ---------------------------------------------------------------- layer ops

def conv2d_forward(x, w, b, pad):
    """x: (B,H,W,Cin), w: (kh,kw,Cin,Cout), zero padding (ph,pw), stride 1."""
    kh, kw, cin, cout = w.shape
    ph, pw = pad
    xp = np.pad(x, ((0, 0), (ph, ph), (pw, pw), (0, 0))) if ph or pw else x
    batch = xp.shape[0]
    h_out = xp.shape[1] - kh + 1
    w_out = xp.shape[2] - kw + 1
    windows = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(1, 2))
    patches = windows.transpose(0, 1, 2, 4, 5, 3).reshape(batch, h_out, w_out, kh * kw * cin)
    out = patches @ w.reshape(kh * kw * cin, cout) + b
    return out, (patches, x.shape, w, pad)


def conv2d_backward(dout, cache):
    patches, x_shape, w, pad = cache
    kh, kw, cin, cout = w.shape
    batch, h_out, w_out, _ = dout.shape
    dw = (patches.reshape(-1, kh * kw * cin).T @ dout.reshape(-1, cout)).reshape(w.shape)
    db = dout.sum(axis=(0, 1, 2))
    dpatch = (dout @ w.reshape(kh * kw * cin, cout).T).reshape(
        batch, h_out, w_out, kh, kw, cin
    )
    ph, pw = pad
    h_in, w_in = x_shape[1], x_shape[2]
    dxp = np.zeros((batch, h_in + 2 * ph, w_in + 2 * pw, cin))
    for i in range(kh):
        for j in range(kw):
            dxp[:, i : i + h_out, j : j + w_out, :] += dpatch[:, :, :, i, j, :]
    dx = dxp[:, ph : ph + h_in, pw : pw + w_in, :]
    return dx, dw, db


def relu_forward(x):
    return np.maximum(x, 0.0), x > 0


def relu_backward(dout, mask):
    return dout * mask


def maxpool2_forward(x):
    """2x2 max pooling, stride 2; odd extents padded with -inf (ceil mode)."""
    batch, h, w, c = x.shape
    hp, wp = h + (h % 2), w + (w % 2)
    if hp != h or wp != w:
        xp = np.full((batch, hp, wp, c), -np.inf)
        xp[:, :h, :w, :] = x
    else:
        xp = x
    xw = (
        xp.reshape(batch, hp // 2, 2, wp // 2, 2, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(batch, hp // 2, wp // 2, 4, c)
    )
    idx = xw.argmax(axis=3)
    out = np.take_along_axis(xw, idx[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    return out, (idx, x.shape)


def maxpool2_backward(dout, cache):
    idx, x_shape = cache
    batch, h, w, c = x_shape
    hp, wp = h + (h % 2), w + (w % 2)
    dxw = np.zeros((batch, hp // 2, wp // 2, 4, c))
    np.put_along_axis(dxw, idx[:, :, :, None, :], dout[:, :, :, None, :], axis=3)
    dxp = (
        dxw.reshape(batch, hp // 2, wp // 2, 2, 2, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(batch, hp, wp, c)
    )
    return dxp[:, :h, :w, :]


def global_maxpool_forward(x):
    batch, h, w, c = x.shape
    flat = x.reshape(batch, h * w, c)
    idx = flat.argmax(axis=1)
    out = np.take_along_axis(flat, idx[:, None, :], axis=1)[:, 0, :]
    return out, (idx, x.shape)


def global_maxpool_backward(dout, cache):
    idx, (batch, h, w, c) = cache
    dflat = np.zeros((batch, h * w, c))
    np.put_along_axis(dflat, idx[:, None, :], dout[:, None, :], axis=1)
    return dflat.reshape(batch, h, w, c)


def dense_forward(x, w, b):
    return x @ w + b, x


def dense_backward(dout, x, w):
    return dout @ w.T, x.T @ dout, dout.sum(axis=0)


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(probs, y, sample_weights=None):
    """Mean cross-entropy and its gradient w.r.t. the logits."""
    batch = len(y)
    rows = np.arange(batch)
    logp = -np.log(np.maximum(probs[rows, y], 1e-300))
    dlogits = probs.copy()
    dlogits[rows, y] -= 1.0
    if sample_weights is None:
        return float(logp.mean()), dlogits / batch
    wsum = float(sample_weights.sum())
    return (
        float((sample_weights * logp).sum() / wsum),
        dlogits * (sample_weights / wsum)[:, None],
    )


# -------------------------------------------------------------------- model

@dataclass
class CommCnnConfig:
    channels: int = 16
    hidden: int = 64
    seed: int = 0


@dataclass
class TrainConfig:
    learning_rate: float = 1e-2
    batch_size: int = 32
    max_epochs: int = 500
    loss_tol: float = 1e-3
    shuffle_seed: int = 0
    class_weighted: bool = False


def _pooled(extent):
    return (extent + 1) // 2


class CommCnn:
    """Community classifier over k x width feature matrices."""

    PARAM_ORDER = (
        "sq1_w", "sq1_b", "sq2_w", "sq2_b", "sq3_w", "sq3_b",
        "wd1_w", "wd1_b", "wd2_w", "wd2_b",
        "lg1_w", "lg1_b", "lg2_w", "lg2_b",
        "fc1_w", "fc1_b", "fc2_w", "fc2_b",
    )

    def __init__(self, k, width, n_classes, config=None, params=None):
        self.k = int(k)
        self.width = int(width)
        self.n_classes = int(n_classes)
        self.config = config or CommCnnConfig()
        c, h = self.config.channels, self.config.hidden
        hs = _pooled(_pooled(_pooled(self.k)))
        ws = _pooled(_pooled(_pooled(self.width)))
        self.square_flat = hs * ws * c
        self.concat_dim = self.square_flat + 2 * c
        if params is not None:
            self.params = params
            return
        rng = np.random.default_rng(self.config.seed)
        he = lambda *shape: rng.standard_normal(shape) * np.sqrt(
            2.0 / (np.prod(shape[:-1]))
        )
        self.params = {
            "sq1_w": he(3, 3, 1, c), "sq1_b": np.zeros(c),
            "sq2_w": he(3, 3, c, c), "sq2_b": np.zeros(c),
            "sq3_w": he(3, 3, c, c), "sq3_b": np.zeros(c),
            "wd1_w": he(1, self.width, 1, c), "wd1_b": np.zeros(c),
            "wd2_w": he(1, 1, c, c), "wd2_b": np.zeros(c),
            "lg1_w": he(self.k, 1, 1, c), "lg1_b": np.zeros(c),
            "lg2_w": he(1, 1, c, c), "lg2_b": np.zeros(c),
            "fc1_w": he(self.concat_dim, h), "fc1_b": np.zeros(h),
            "fc2_w": he(h, self.n_classes), "fc2_b": np.zeros(self.n_classes),
        }

    @property
    def hyper(self):
        return {
            "k": self.k,
            "width": self.width,
            "n_classes": self.n_classes,
            "channels": self.config.channels,
            "hidden": self.config.hidden,
            "seed": self.config.seed,
        }

    def _check_input(self, x):
        if x.ndim == 2:
            x = x[None]
        if x.shape[1:] != (self.k, self.width):
            raise ValueError(
                f"expected matrices of shape ({self.k}, {self.width}), got {x.shape[1:]}"
            )
        return np.ascontiguousarray(x, dtype=np.float64)[..., None]

    def logits(self, x, want_cache=False):
        p = self.params
        caches = {}

        out, caches["sq1"] = conv2d_forward(x, p["sq1_w"], p["sq1_b"], (1, 1))
        out, caches["sq1r"] = relu_forward(out)
        out, caches["sq1p"] = maxpool2_forward(out)
        out, caches["sq2"] = conv2d_forward(out, p["sq2_w"], p["sq2_b"], (1, 1))
        out, caches["sq2r"] = relu_forward(out)
        out, caches["sq2p"] = maxpool2_forward(out)
        out, caches["sq3"] = conv2d_forward(out, p["sq3_w"], p["sq3_b"], (1, 1))
        out, caches["sq3r"] = relu_forward(out)
        out, caches["sq3p"] = maxpool2_forward(out)
        caches["sq_shape"] = out.shape
        square = out.reshape(out.shape[0], -1)

        out, caches["wd1"] = conv2d_forward(x, p["wd1_w"], p["wd1_b"], (0, 0))
        out, caches["wd1r"] = relu_forward(out)
        out, caches["wd2"] = conv2d_forward(out, p["wd2_w"], p["wd2_b"], (0, 0))
        out, caches["wd2r"] = relu_forward(out)
        wide, caches["wdp"] = global_maxpool_forward(out)

        out, caches["lg1"] = conv2d_forward(x, p["lg1_w"], p["lg1_b"], (0, 0))
        out, caches["lg1r"] = relu_forward(out)
        out, caches["lg2"] = conv2d_forward(out, p["lg2_w"], p["lg2_b"], (0, 0))
        out, caches["lg2r"] = relu_forward(out)
        long_, caches["lgp"] = global_maxpool_forward(out)

        concat = np.hstack([square, wide, long_])
        hid, caches["fc1"] = dense_forward(concat, p["fc1_w"], p["fc1_b"])
        hid, caches["fc1r"] = relu_forward(hid)
        logits, caches["fc2"] = dense_forward(hid, p["fc2_w"], p["fc2_b"])
        return (logits, caches) if want_cache else logits

    def predict_proba(self, x):
        return softmax(self.logits(self._check_input(x)))

    def classify(self, matrix) -> ClassResult:
        return ClassResult(r=self.predict_proba(matrix)[0])

    def loss_and_grads(self, x, y, sample_weights=None):
        """Mean cross-entropy over the batch and its analytic gradients."""
        x = self._check_input(x)
        logits, caches = self.logits(x, want_cache=True)
        probs = softmax(logits)
        loss, dlogits = cross_entropy(probs, y, sample_weights)

        p = self.params
        grads = {}
        dhid, grads["fc2_w"], grads["fc2_b"] = dense_backward(
            dlogits, caches["fc2"], p["fc2_w"]
        )
        dhid = relu_backward(dhid, caches["fc1r"])
        dconcat, grads["fc1_w"], grads["fc1_b"] = dense_backward(
            dhid, caches["fc1"], p["fc1_w"]
        )
        dsquare = dconcat[:, : self.square_flat].reshape(caches["sq_shape"])
        c = self.config.channels
        dwide = dconcat[:, self.square_flat : self.square_flat + c]
        dlong = dconcat[:, self.square_flat + c :]

        d = maxpool2_backward(dsquare, caches["sq3p"])
        d = relu_backward(d, caches["sq3r"])
        d, grads["sq3_w"], grads["sq3_b"] = conv2d_backward(d, caches["sq3"])
        d = maxpool2_backward(d, caches["sq2p"])
        d = relu_backward(d, caches["sq2r"])
        d, grads["sq2_w"], grads["sq2_b"] = conv2d_backward(d, caches["sq2"])
        d = maxpool2_backward(d, caches["sq1p"])
        d = relu_backward(d, caches["sq1r"])
        _, grads["sq1_w"], grads["sq1_b"] = conv2d_backward(d, caches["sq1"])

        d = global_maxpool_backward(dwide, caches["wdp"])
        d = relu_backward(d, caches["wd2r"])
        d, grads["wd2_w"], grads["wd2_b"] = conv2d_backward(d, caches["wd2"])
        d = relu_backward(d, caches["wd1r"])
        _, grads["wd1_w"], grads["wd1_b"] = conv2d_backward(d, caches["wd1"])

        d = global_maxpool_backward(dlong, caches["lgp"])
        d = relu_backward(d, caches["lg2r"])
        d, grads["lg2_w"], grads["lg2_b"] = conv2d_backward(d, caches["lg2"])
        d = relu_backward(d, caches["lg1r"])
        _, grads["lg1_w"], grads["lg1_b"] = conv2d_backward(d, caches["lg1"])

        return loss, grads


def train_commcnn(
    matrices,
    y,
    n_classes,
    model_config=None,
    train_config=None,
):
    """Fit a CommCnn with mini-batch gradient descent on cross-entropy.

    Training order is canonicalized (sorted by label then matrix bytes)
    before the seeded per-epoch shuffles, so the result is independent of
    the input ordering.  Returns the model and the per-epoch loss history.
    """
    tc = train_config or TrainConfig()
    x = np.asarray(matrices, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(x) == 0:
        raise ValueError("no training examples")
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValueError("training data must cover at least 2 classes")
    if len(x) < n_classes:
        raise ValueError(f"need at least {n_classes} examples, got {len(x)}")

    canon = sorted(range(len(x)), key=lambda i: (int(y[i]), x[i].tobytes()))
    x, y = x[canon], y[canon]

    model = CommCnn(x.shape[1], x.shape[2], n_classes, config=model_config)
    weights = None
    if tc.class_weighted:
        freq = np.bincount(y, minlength=n_classes).astype(np.float64)
        inv = np.where(freq > 0, 1.0 / np.maximum(freq, 1), 0.0)
        weights = inv[y] * len(y) / inv[y].sum()

    rng = np.random.default_rng(tc.shuffle_seed)
    history = []
    for _ in range(tc.max_epochs):
        order = rng.permutation(len(x))
        epoch_loss = 0.0
        for start in range(0, len(x), tc.batch_size):
            batch = order[start : start + tc.batch_size]
            bw = weights[batch] if weights is not None else None
            loss, grads = model.loss_and_grads(x[batch], y[batch], bw)
            epoch_loss += loss * len(batch)
            for name, grad in grads.items():
                model.params[name] -= tc.learning_rate * grad
        history.append(epoch_loss / len(x))
        if history[-1] < tc.loss_tol:
            break
    return model, history
