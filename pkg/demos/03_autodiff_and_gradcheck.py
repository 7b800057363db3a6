"""The reverse-mode tape, Adam, and gradient verification.

Everything the classifiers train with is built on a small float64 tape:
affine, ReLU, valid 1-D convolution, max-over-time pooling, softmax
cross-entropy, and inverted dropout. backward() fills Parameter.grad, Adam
applies bias-corrected updates, and grad_check compares the tape's
gradients against central finite differences.
"""

import numpy as np

from trimine import Adam, Parameter, Tensor, backward, grad_check
from trimine.numerics import (
    affine,
    conv1d_valid,
    max_over_time,
    relu,
    softmax_cross_entropy,
)

rng = np.random.default_rng(0)

print("== a tiny convolutional classifier on the tape ==")
filters = Parameter(rng.normal(scale=0.4, size=(3, 2, 5)), "filters")
bias = Parameter(np.zeros(3), "bias")
W = Parameter(rng.normal(scale=0.4, size=(3, 2)), "W")
b = Parameter(np.zeros(2), "b")
params = [filters, bias, W, b]
x = rng.normal(size=(9, 5))  # 9 tokens, 5-dim embeddings


def loss_fn():
    pooled = max_over_time(relu(conv1d_valid(Tensor(x), filters, bias)))
    return softmax_cross_entropy(affine(pooled, W, b), label=1)


loss = loss_fn()
backward(loss)
print(f"  loss {float(loss.data):.4f}; grad norms: "
      + ", ".join(f"{p.name}={np.linalg.norm(p.grad):.3f}" for p in params))

print("\n== gradient check vs central finite differences ==")
err = grad_check(loss_fn, params, eps=1e-4)
print(f"  max relative error over every coordinate: {err:.2e}")

print("\n== Adam drives the loss down ==")
optimizer = Adam(params, lr=0.05)
for step in range(1, 201):
    optimizer.zero_grad()
    loss = loss_fn()
    backward(loss)
    optimizer.step()
    if step in (1, 10, 50, 200):
        print(f"  step {step:3d}: loss {float(loss.data):.6f}")
