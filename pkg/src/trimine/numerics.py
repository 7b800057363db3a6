"""Minimal dense tensor math with reverse-mode differentiation.

Float64 throughout. A Tensor wraps a numpy array plus the tape bookkeeping
needed for backward(); the op set is exactly what the two classifiers
need (affine, relu, 1-D valid convolution, max-over-time pooling, softmax
cross-entropy, inverted dropout, mean/concat plumbing) plus a few generic
elementwise ops for tests. Adam and a central-finite-difference gradient
checker live here too.

A computation tape is confined to one thread; distinct model instances can
train in parallel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ShapeError(ValueError):
    """Operands whose shapes do not conform."""


class Tensor:
    """A float64 array plus reverse-mode bookkeeping.

    Gradients accumulate into .grad until explicitly zeroed; backward() may
    run at most once per forward graph.
    """

    def __init__(self, data, requires_grad: bool = False, _prev=(), _op: str = ""):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self._prev = tuple(_prev)
        self._backward = None
        self._op = _op
        self._consumed = False

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, op={self._op or 'leaf'!r})"

    def _accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def is_leaf(self) -> bool:
        return not self._prev and self._backward is None


class Parameter(Tensor):
    """A named trainable tensor; .grad starts at zeros and accumulates."""

    def __init__(self, value, name: str):
        super().__init__(value, requires_grad=True)
        self.name = name
        self.grad = np.zeros_like(self.data)

    def zero_grad(self) -> None:
        self.grad[...] = 0.0

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.data.shape})"


def _toposort(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for child in node._prev:
            stack.append((child, False))
    return order


def backward(loss: Tensor) -> None:
    """Populate .grad of every reachable Parameter with d loss / d value.

    Gradients add into existing .grad (call zero_grad between steps).
    Running backward twice on the same forward graph raises: that would
    silently double-count, a classic training-loop bug.
    """
    if loss.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.shape}")
    order = _toposort(loss)
    for node in order:
        if node._consumed and not node.is_leaf():
            raise RuntimeError("backward already ran on this graph; rebuild the forward pass")
    loss._accumulate(np.ones_like(loss.data))
    for node in reversed(order):
        if node._backward is not None:
            node._backward()
        if not node.is_leaf():
            node._consumed = True


def zero_grads(params) -> None:
    for p in params:
        p.zero_grad()


# ---------------------------------------------------------------------------
# Forward primitives


def _requires(*tensors: Tensor) -> bool:
    return any(t.requires_grad for t in tensors)


def affine(x: Tensor, W: Parameter, b: Parameter) -> Tensor:
    """y = x W + b for x of shape (n, d_in) or (d_in,)."""
    if x.data.ndim not in (1, 2) or W.data.ndim != 2 or b.data.ndim != 1:
        raise ShapeError(f"affine expects (n,d)/(d,), (d,k), (k,); got {x.shape}, {W.shape}, {b.shape}")
    if x.data.shape[-1] != W.data.shape[0] or b.data.shape[0] != W.data.shape[1]:
        raise ShapeError(f"affine shapes do not conform: x {x.shape}, W {W.shape}, b {b.shape}")
    out = Tensor(x.data @ W.data + b.data, _requires(x, W, b), (x, W, b), "affine")

    def _back():
        gy = out.grad
        if W.requires_grad:
            W._accumulate(np.outer(x.data, gy) if x.data.ndim == 1 else x.data.T @ gy)
        if b.requires_grad:
            b._accumulate(gy if gy.ndim == 1 else gy.sum(axis=0))
        if x.requires_grad:
            x._accumulate(gy @ W.data.T)

    out._backward = _back
    return out


def relu(x: Tensor) -> Tensor:
    """Elementwise max(0, x); subgradient at 0 is 0."""
    out = Tensor(np.maximum(x.data, 0.0), x.requires_grad, (x,), "relu")

    def _back():
        if x.requires_grad:
            x._accumulate(out.grad * (x.data > 0.0))

    out._backward = _back
    return out


def conv1d_valid(x: Tensor, filters: Parameter, bias: Parameter) -> Tensor:
    """Valid 1-D convolution over the time axis.

    x: (len, d); filters: (k, w, d); bias: (k,) -> output (len-w+1, k) with
    output[t, f] = bias[f] + sum_{j,c} x[t+j, c] * filters[f, j, c].
    """
    if x.data.ndim != 2 or filters.data.ndim != 3 or bias.data.ndim != 1:
        raise ShapeError(f"conv1d_valid expects (len,d), (k,w,d), (k,); got {x.shape}, {filters.shape}, {bias.shape}")
    k, w, d = filters.data.shape
    if x.data.shape[1] != d or bias.data.shape[0] != k:
        raise ShapeError(f"conv1d_valid shapes do not conform: x {x.shape}, filters {filters.shape}, bias {bias.shape}")
    length = x.data.shape[0]
    if length < w:
        raise ShapeError(f"sequence length {length} is shorter than filter width {w}; pad first")
    # windows[t, j, c] = x[t+j, c]
    windows = np.lib.stride_tricks.sliding_window_view(x.data, w, axis=0).transpose(0, 2, 1)
    out_data = np.einsum("tjc,fjc->tf", windows, filters.data) + bias.data
    out = Tensor(out_data, _requires(x, filters, bias), (x, filters, bias), "conv1d")

    def _back():
        gy = out.grad
        if bias.requires_grad:
            bias._accumulate(gy.sum(axis=0))
        if filters.requires_grad:
            filters._accumulate(np.einsum("tf,tjc->fjc", gy, windows))
        if x.requires_grad:
            dwin = np.einsum("tf,fjc->tjc", gy, filters.data)
            dx = np.zeros_like(x.data)
            for j in range(w):
                dx[j:j + gy.shape[0]] += dwin[:, j, :]
            x._accumulate(dx)

    out._backward = _back
    return out


def max_over_time(x: Tensor) -> Tensor:
    """Columnwise max of an (len, k) tensor; ties route gradient to the first row."""
    if x.data.ndim != 2:
        raise ShapeError(f"max_over_time expects (len, k), got {x.shape}")
    if x.data.shape[0] < 1:
        raise ShapeError("max_over_time on an empty time axis")
    idx = np.argmax(x.data, axis=0)  # first max on ties
    cols = np.arange(x.data.shape[1])
    out = Tensor(x.data[idx, cols], x.requires_grad, (x,), "max_over_time")

    def _back():
        if x.requires_grad:
            dx = np.zeros_like(x.data)
            np.add.at(dx, (idx, cols), out.grad)
            x._accumulate(dx)

    out._backward = _back
    return out


def mean_rows(x: Tensor) -> Tensor:
    """Mean over the token axis: (len, d) -> (d,)."""
    if x.data.ndim != 2 or x.data.shape[0] < 1:
        raise ShapeError(f"mean_rows expects a nonempty (len, d) tensor, got {x.shape}")
    n = x.data.shape[0]
    out = Tensor(x.data.mean(axis=0), x.requires_grad, (x,), "mean_rows")

    def _back():
        if x.requires_grad:
            x._accumulate(np.broadcast_to(out.grad / n, x.data.shape))

    out._backward = _back
    return out


def concat(parts: list[Tensor]) -> Tensor:
    """Concatenate 1-D tensors."""
    for p in parts:
        if p.data.ndim != 1:
            raise ShapeError(f"concat expects 1-D tensors, got {p.shape}")
    out = Tensor(np.concatenate([p.data for p in parts]), _requires(*parts), tuple(parts), "concat")
    offsets = np.cumsum([0] + [p.data.shape[0] for p in parts])

    def _back():
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            if p.requires_grad:
                p._accumulate(out.grad[lo:hi])

    out._backward = _back
    return out


def pad_rows(x: Tensor, target_len: int) -> Tensor:
    """Right-pad an (len, d) tensor with zero rows up to target_len."""
    if x.data.ndim != 2:
        raise ShapeError(f"pad_rows expects (len, d), got {x.shape}")
    n = x.data.shape[0]
    if n >= target_len:
        return x
    padded = np.vstack([x.data, np.zeros((target_len - n, x.data.shape[1]))])
    out = Tensor(padded, x.requires_grad, (x,), "pad_rows")

    def _back():
        if x.requires_grad:
            x._accumulate(out.grad[:n])

    out._backward = _back
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    """Numerically stable softmax of a 1-D logit vector (plain numpy)."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def softmax_cross_entropy(logits: Tensor, label: int) -> Tensor:
    """-log softmax(logits)[label], computed with max-subtraction."""
    if logits.data.ndim != 1 or logits.data.shape[0] < 2:
        raise ShapeError(f"softmax_cross_entropy expects (c,) logits with c >= 2, got {logits.shape}")
    c = logits.data.shape[0]
    if not 0 <= label < c:
        raise ValueError(f"label {label} out of range [0, {c})")
    m = logits.data.max()
    z = logits.data - m
    e = np.exp(z)
    s = e.sum()
    out = Tensor(np.log(s) - z[label], logits.requires_grad, (logits,), "softmax_xent")

    def _back():
        if logits.requires_grad:
            dlogits = e / s
            dlogits[label] -= 1.0
            logits._accumulate(dlogits * out.grad)

    out._backward = _back
    return out


def dropout(x: Tensor, rate: float, rng: np.random.Generator | None,
            train_mode: bool) -> Tensor:
    """Inverted dropout: survivors scaled by 1/(1-rate); identity in eval mode."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not train_mode or rate == 0.0:
        return x
    if rng is None:
        raise ValueError("dropout in train mode needs an rng")
    keep = rng.random(x.data.shape) >= rate
    scale = 1.0 / (1.0 - rate)
    out = Tensor(x.data * keep * scale, x.requires_grad, (x,), "dropout")

    def _back():
        if x.requires_grad:
            x._accumulate(out.grad * keep * scale)

    out._backward = _back
    return out


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ShapeError(f"add shapes differ: {a.shape} vs {b.shape}")
    out = Tensor(a.data + b.data, _requires(a, b), (a, b), "add")

    def _back():
        if a.requires_grad:
            a._accumulate(out.grad)
        if b.requires_grad:
            b._accumulate(out.grad)

    out._backward = _back
    return out


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ShapeError(f"mul shapes differ: {a.shape} vs {b.shape}")
    out = Tensor(a.data * b.data, _requires(a, b), (a, b), "mul")

    def _back():
        if a.requires_grad:
            a._accumulate(out.grad * b.data)
        if b.requires_grad:
            b._accumulate(out.grad * a.data)

    out._backward = _back
    return out


def scale(x: Tensor, c: float) -> Tensor:
    out = Tensor(x.data * c, x.requires_grad, (x,), "scale")

    def _back():
        if x.requires_grad:
            x._accumulate(out.grad * c)

    out._backward = _back
    return out


def sum_all(x: Tensor) -> Tensor:
    out = Tensor(x.data.sum(), x.requires_grad, (x,), "sum")

    def _back():
        if x.requires_grad:
            x._accumulate(np.broadcast_to(out.grad, x.data.shape).copy())

    out._backward = _back
    return out


# ---------------------------------------------------------------------------
# Adam


@dataclass
class AdamState:
    """Per-parameter Adam moments and hyperparameters."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_parameter(cls, p: Parameter, lr: float = 1e-3, beta1: float = 0.9,
                      beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        return cls(m=np.zeros_like(p.data), v=np.zeros_like(p.data),
                   lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def adam_step(p: Parameter, s: AdamState) -> None:
    """One bias-corrected Adam update, in place; the gradient is not cleared."""
    if s.m.shape != p.data.shape or s.v.shape != p.data.shape:
        raise ShapeError(f"Adam state shape {s.m.shape} does not match parameter {p.data.shape}")
    g = p.grad
    s.t += 1
    s.m = s.beta1 * s.m + (1.0 - s.beta1) * g
    s.v = s.beta2 * s.v + (1.0 - s.beta2) * (g * g)
    m_hat = s.m / (1.0 - s.beta1 ** s.t)
    v_hat = s.v / (1.0 - s.beta2 ** s.t)
    p.data -= s.lr * m_hat / (np.sqrt(v_hat) + s.eps)


class Adam:
    """Convenience wrapper driving adam_step over a parameter set."""

    def __init__(self, params, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.states = [AdamState.for_parameter(p, lr, beta1, beta2, eps) for p in self.params]

    def step(self) -> None:
        for p, s in zip(self.params, self.states):
            adam_step(p, s)

    def zero_grad(self) -> None:
        zero_grads(self.params)


# ---------------------------------------------------------------------------
# Gradient checking


def _kink_signature(loss: Tensor) -> bytes:
    """Activation pattern of a forward graph: ReLU signs and argmax choices.

    Two evaluations with the same signature lie in the same smooth region,
    so a central difference between them estimates a true derivative.
    """
    parts = []
    for node in _toposort(loss):
        if node._op == "relu":
            parts.append((node._prev[0].data > 0.0).tobytes())
        elif node._op == "max_over_time":
            parts.append(np.argmax(node._prev[0].data, axis=0).tobytes())
    return b"".join(parts)


def grad_check(model_loss, params, eps: float = 1e-4,
               sample_per_param: int | None = None,
               rng: np.random.Generator | None = None) -> float:
    """Max relative error of backward() gradients vs central differences.

    model_loss: zero-argument callable rebuilding the forward graph over
    the given Parameters and returning the scalar loss Tensor; it must be
    deterministic (dropout disabled). Relative error uses denominator
    max(|a|, |b|, 1e-8). With sample_per_param set, only that many randomly
    chosen coordinates of each parameter are probed (needed for large
    models); otherwise every coordinate is checked.

    Coordinates whose +eps/-eps evaluations land in different linear
    regions (a ReLU or argmax flips) are discarded and redrawn: the central
    difference does not measure a derivative across a kink.
    """
    params = list(params)
    zero_grads(params)
    backward(model_loss())
    analytic = [p.grad.copy() for p in params]

    if sample_per_param is not None and rng is None:
        rng = np.random.default_rng(0)

    max_rel = 0.0
    checked = 0
    for p, g_ad in zip(params, analytic):
        n = p.data.size
        if sample_per_param is None or sample_per_param >= n:
            candidates = list(range(n))
            pool: list[int] = []
        else:
            perm = rng.permutation(n)
            candidates = list(perm[:sample_per_param])
            pool = list(perm[sample_per_param:])
        flat = p.data.reshape(-1)
        for i in candidates:
            while True:
                orig = flat[i]
                flat[i] = orig + eps
                loss_p = model_loss()
                f_plus, sig_plus = float(loss_p.data), _kink_signature(loss_p)
                flat[i] = orig - eps
                loss_m = model_loss()
                f_minus, sig_minus = float(loss_m.data), _kink_signature(loss_m)
                flat[i] = orig
                if sig_plus == sig_minus:
                    fd = (f_plus - f_minus) / (2.0 * eps)
                    ad = float(g_ad.reshape(-1)[i])
                    rel = abs(ad - fd) / max(abs(ad), abs(fd), 1e-8)
                    max_rel = max(max_rel, rel)
                    checked += 1
                    break
                if not pool:  # kink with nothing to redraw: skip this probe
                    break
                i = pool.pop()
    if checked == 0:
        raise RuntimeError("grad_check could not evaluate any coordinate away from a kink")
    return max_rel


# ---------------------------------------------------------------------------
# Checkpoint format: JSON header + flat little-endian float64 sidecar


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".bin") if path.suffix == ".json" else Path(str(path) + ".bin")


def save_arrays(path, arrays: dict[str, np.ndarray], header_extra: dict | None = None) -> None:
    """Write named arrays: JSON header at path, raw <f8 data in a .bin sidecar."""
    path = Path(path)
    sidecar = _sidecar(path)
    header = dict(header_extra or {})
    header["params"] = [{"name": name, "shape": list(arr.shape)} for name, arr in arrays.items()]
    header["data_file"] = sidecar.name
    with open(sidecar, "wb") as fh:
        for arr in arrays.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(header, fh, indent=2)
        fh.write("\n")


def load_arrays(path) -> tuple[dict, dict[str, np.ndarray]]:
    """Inverse of save_arrays: (header, name -> float64 array)."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = json.load(fh)
    sidecar = path.parent / header["data_file"]
    raw = sidecar.read_bytes()
    arrays: dict[str, np.ndarray] = {}
    offset = 0
    for entry in header["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).reshape(shape)
        arrays[entry["name"]] = arr.astype(np.float64)
        offset += count * 8
    if offset != len(raw):
        raise ValueError(f"{sidecar}: {len(raw)} bytes but header describes {offset}")
    return header, arrays
