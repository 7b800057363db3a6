"""Tape primitives, backward, Adam, and the finite-difference checker."""

import math

import numpy as np
import pytest

from trimine.numerics import (
    Adam,
    AdamState,
    Parameter,
    ShapeError,
    Tensor,
    adam_step,
    add,
    affine,
    backward,
    concat,
    conv1d_valid,
    dropout,
    grad_check,
    max_over_time,
    mean_rows,
    mul,
    pad_rows,
    relu,
    scale,
    softmax,
    softmax_cross_entropy,
    sum_all,
    zero_grads,
    load_arrays,
    save_arrays,
)


class TestAffine:
    def test_identity(self):
        W = Parameter(np.eye(2), "W")
        b = Parameter(np.zeros(2), "b")
        out = affine(Tensor(np.array([[1.0, 2.0]])), W, b)
        np.testing.assert_array_equal(out.data, [[1.0, 2.0]])

    def test_small_product(self):
        W = Parameter(np.array([[2.0], [3.0]]), "W")
        b = Parameter(np.array([1.0]), "b")
        out = affine(Tensor(np.array([[1.0, 1.0]])), W, b)
        np.testing.assert_array_equal(out.data, [[6.0]])

    def test_shape_mismatch_reports_both_shapes(self):
        W = Parameter(np.zeros((2, 4)), "W")
        b = Parameter(np.zeros(4), "b")
        with pytest.raises(ShapeError, match=r"\(1, 3\).*\(2, 4\)"):
            affine(Tensor(np.zeros((1, 3))), W, b)

    def test_gradients(self):
        # y = w . x with x = 2, w = 3: dy/dw = 2
        W = Parameter(np.array([[3.0]]), "w")
        b = Parameter(np.zeros(1), "b")
        out = affine(Tensor(np.array([2.0])), W, b)
        backward(out)
        np.testing.assert_array_equal(W.grad, [[2.0]])
        np.testing.assert_array_equal(b.grad, [1.0])


class TestRelu:
    def test_values(self):
        out = relu(Tensor(np.array([-1.0, 0.0, 2.0])))
        np.testing.assert_array_equal(out.data, [0.0, 0.0, 2.0])

    def test_all_negative_and_all_positive(self):
        np.testing.assert_array_equal(relu(Tensor(np.array([-3.0, -1.0]))).data, [0.0, 0.0])
        np.testing.assert_array_equal(relu(Tensor(np.array([3.0, 1.0]))).data, [3.0, 1.0])

    def test_subgradient_at_zero_is_zero(self):
        x = Parameter(np.array([0.0, 1.0]), "x")
        backward(sum_all(relu(x)))
        np.testing.assert_array_equal(x.grad, [0.0, 1.0])


class TestConv1d:
    def test_width_two_sums(self):
        filters = Parameter(np.array([[[1.0], [1.0]]]), "f")  # (1, 2, 1)
        bias = Parameter(np.zeros(1), "b")
        out = conv1d_valid(Tensor(np.array([[1.0], [2.0], [3.0]])), filters, bias)
        np.testing.assert_array_equal(out.data, [[3.0], [5.0]])

    def test_zero_filter_bias_seven(self):
        filters = Parameter(np.zeros((2, 3, 4)), "f")
        bias = Parameter(np.full(2, 7.0), "b")
        out = conv1d_valid(Tensor(np.ones((6, 4))), filters, bias)
        np.testing.assert_array_equal(out.data, np.full((4, 2), 7.0))

    def test_too_short_errors(self):
        filters = Parameter(np.zeros((1, 5, 1)), "f")
        bias = Parameter(np.zeros(1), "b")
        with pytest.raises(ShapeError, match="pad"):
            conv1d_valid(Tensor(np.zeros((2, 1))), filters, bias)

    def test_matches_direct_triple_loop(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(7, 3))
        f = rng.normal(size=(4, 2, 3))
        b = rng.normal(size=4)
        out = conv1d_valid(Tensor(x), Parameter(f, "f"), Parameter(b, "b")).data
        expected = np.zeros((6, 4))
        for t in range(6):
            for k in range(4):
                acc = b[k]
                for j in range(2):
                    for c in range(3):
                        acc += x[t + j, c] * f[k, j, c]
                expected[t, k] = acc
        np.testing.assert_allclose(out, expected, rtol=1e-12)


class TestMaxOverTime:
    def test_columnwise_max(self):
        out = max_over_time(Tensor(np.array([[1.0, 4.0], [3.0, 2.0]])))
        np.testing.assert_array_equal(out.data, [3.0, 4.0])

    def test_single_row_identity(self):
        out = max_over_time(Tensor(np.array([[5.0, -1.0]])))
        np.testing.assert_array_equal(out.data, [5.0, -1.0])

    def test_tie_routes_gradient_to_first_row(self):
        x = Parameter(np.array([[2.0], [2.0]]), "x")
        backward(sum_all(max_over_time(x)))
        np.testing.assert_array_equal(x.grad, [[1.0], [0.0]])

    def test_empty_time_axis_errors(self):
        with pytest.raises(ShapeError):
            max_over_time(Tensor(np.zeros((0, 3))))


class TestSoftmaxCrossEntropy:
    def test_uniform_two_way(self):
        loss = softmax_cross_entropy(Tensor(np.array([0.0, 0.0])), 0)
        assert loss.data == pytest.approx(math.log(2.0), abs=1e-12)

    def test_large_logit_no_overflow(self):
        loss = softmax_cross_entropy(Tensor(np.array([100.0, 0.0])), 0)
        assert 0.0 <= float(loss.data) < 1e-40

    def test_wrong_class_large_margin(self):
        loss = softmax_cross_entropy(Tensor(np.array([0.0, 100.0])), 0)
        assert loss.data == pytest.approx(100.0, abs=1e-6)

    def test_label_out_of_range(self):
        with pytest.raises(ValueError):
            softmax_cross_entropy(Tensor(np.array([0.0, 0.0])), 2)


class TestSoftmax:
    def test_sums_to_one(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            logits = rng.normal(scale=rng.uniform(0.1, 50), size=rng.integers(2, 8))
            assert abs(softmax(logits).sum() - 1.0) < 1e-12

    def test_shift_invariant(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            logits = rng.normal(scale=5, size=4)
            shift = rng.uniform(-100, 100)
            np.testing.assert_allclose(softmax(logits), softmax(logits + shift), atol=1e-9)


class TestDropout:
    def test_rate_zero_identity(self):
        x = Tensor(np.arange(4.0))
        assert dropout(x, 0.0, np.random.default_rng(0), train_mode=True) is x

    def test_eval_mode_identity(self):
        x = Tensor(np.arange(4.0))
        assert dropout(x, 0.9, None, train_mode=False) is x

    def test_rate_one_rejected(self):
        with pytest.raises(ValueError):
            dropout(Tensor(np.arange(4.0)), 1.0, np.random.default_rng(0), True)

    def test_monte_carlo_mean_preserved(self):
        # inverted dropout: E[out] = x; 1e5 draws pins the mean within 2%
        rng = np.random.default_rng(42)
        x = Tensor(np.array([1.0]))
        total = 0.0
        n = 100_000
        for _ in range(n):
            total += float(dropout(x, 0.5, rng, train_mode=True).data[0])
        assert abs(total / n - 1.0) < 0.02


class TestBackward:
    def test_grad_zero_for_unused_parameter(self):
        used = Parameter(np.array([2.0]), "used")
        unused = Parameter(np.array([5.0]), "unused")
        backward(sum_all(mul(used, used)))
        np.testing.assert_array_equal(unused.grad, [0.0])
        np.testing.assert_array_equal(used.grad, [4.0])

    def test_double_backward_errors(self):
        p = Parameter(np.array([1.0]), "p")
        loss = sum_all(mul(p, p))
        backward(loss)
        with pytest.raises(RuntimeError, match="already ran"):
            backward(loss)

    def test_grads_accumulate_until_zeroed(self):
        p = Parameter(np.array([3.0]), "p")
        backward(sum_all(p))
        backward(sum_all(p))
        np.testing.assert_array_equal(p.grad, [2.0])
        zero_grads([p])
        np.testing.assert_array_equal(p.grad, [0.0])

    def test_shared_subexpression(self):
        # loss = (p + p) * p = 2 p^2 -> dloss/dp = 4p
        p = Parameter(np.array([3.0]), "p")
        backward(sum_all(mul(add(p, p), p)))
        np.testing.assert_array_equal(p.grad, [12.0])

    def test_non_scalar_loss_rejected(self):
        p = Parameter(np.array([1.0, 2.0]), "p")
        with pytest.raises(ValueError):
            backward(add(p, p))


class TestAdam:
    def test_first_step_closed_form(self):
        # t=1 bias correction cancels the moment decay: delta = -lr*g/(|g|+eps)
        g = 0.5
        lr = 1e-3
        eps = 1e-8
        p = Parameter(np.array([1.0]), "p")
        p.grad[...] = g
        s = AdamState.for_parameter(p, lr=lr)
        adam_step(p, s)
        expected_delta = -lr * g / (abs(g) + eps)
        assert p.data[0] - 1.0 == pytest.approx(expected_delta, abs=1e-15)
        assert s.t == 1

    def test_zero_grad_is_identity(self):
        p = Parameter(np.array([1.5, -2.0]), "p")
        s = AdamState.for_parameter(p)
        adam_step(p, s)
        np.testing.assert_array_equal(p.data, [1.5, -2.0])

    def test_constant_grad_steps_do_not_grow(self):
        p = Parameter(np.array([1.0]), "p")
        s = AdamState.for_parameter(p)
        p.grad[...] = 0.7
        before = p.data.copy()
        adam_step(p, s)
        d1 = abs(float(p.data[0] - before[0]))
        before = p.data.copy()
        p.grad[...] = 0.7
        adam_step(p, s)
        d2 = abs(float(p.data[0] - before[0]))
        assert d2 <= d1 * (1.0 + 1e-6)

    def test_grad_not_cleared_by_step(self):
        p = Parameter(np.array([1.0]), "p")
        p.grad[...] = 0.3
        adam_step(p, AdamState.for_parameter(p))
        np.testing.assert_array_equal(p.grad, [0.3])

    def test_shape_mismatch(self):
        p = Parameter(np.zeros(3), "p")
        s = AdamState(m=np.zeros(2), v=np.zeros(2))
        with pytest.raises(ShapeError):
            adam_step(p, s)

    def test_optimizer_descends_quadratic(self):
        p = Parameter(np.array([4.0]), "p")
        opt = Adam([p], lr=0.1)
        for _ in range(500):
            opt.zero_grad()
            backward(scale(sum_all(mul(p, p)), 0.5))
            opt.step()
        assert abs(float(p.data[0])) < 0.05


class TestGradCheck:
    def test_quadratic_is_exact(self):
        theta = Parameter(np.array([3.0]), "theta")

        def loss():
            return scale(sum_all(mul(theta, theta)), 0.5)

        assert grad_check(loss, [theta]) < 1e-7

    def test_composite_network(self):
        rng = np.random.default_rng(11)
        W1 = Parameter(rng.normal(scale=0.6, size=(5, 4)), "W1")
        b1 = Parameter(rng.normal(scale=0.1, size=4), "b1")
        W2 = Parameter(rng.normal(scale=0.6, size=(4, 2)), "W2")
        b2 = Parameter(np.zeros(2), "b2")
        x = rng.normal(size=(6, 5))

        def loss():
            h = mean_rows(relu(affine(Tensor(x), W1, b1)))
            return softmax_cross_entropy(affine(h, W2, b2), 1)

        assert grad_check(loss, [W1, b1, W2, b2]) < 1e-4

    def test_conv_pool_path(self):
        rng = np.random.default_rng(12)
        f = Parameter(rng.normal(scale=0.5, size=(3, 2, 4)), "f")
        b = Parameter(rng.normal(scale=0.1, size=3), "b")
        x = rng.normal(size=(8, 4))

        def loss():
            pooled = max_over_time(relu(conv1d_valid(Tensor(x), f, b)))
            return sum_all(mul(pooled, pooled))

        assert grad_check(loss, [f, b]) < 1e-4

    def test_pad_and_concat_path(self):
        rng = np.random.default_rng(13)
        f = Parameter(rng.normal(scale=0.5, size=(2, 4, 3)), "f")
        b = Parameter(np.zeros(2), "b")
        x = rng.normal(size=(2, 3))  # shorter than the filter width

        def loss():
            h = pad_rows(Tensor(x), 4)
            pooled = max_over_time(relu(conv1d_valid(h, f, b)))
            return softmax_cross_entropy(concat([pooled]), 0)

        assert grad_check(loss, [f, b]) < 1e-4


class TestShapes:
    """Output shapes are pure functions of input shapes."""

    def test_affine_shapes(self):
        rng = np.random.default_rng(1)
        for n, d_in, d_out in [(1, 3, 2), (5, 7, 4), (2, 1, 1)]:
            W = Parameter(rng.normal(size=(d_in, d_out)), "W")
            b = Parameter(np.zeros(d_out), "b")
            assert affine(Tensor(rng.normal(size=(n, d_in))), W, b).shape == (n, d_out)
            assert affine(Tensor(rng.normal(size=d_in)), W, b).shape == (d_out,)

    def test_conv_shapes(self):
        rng = np.random.default_rng(2)
        for length, d, k, w in [(5, 3, 2, 2), (9, 4, 6, 5), (3, 1, 1, 3)]:
            f = Parameter(rng.normal(size=(k, w, d)), "f")
            b = Parameter(np.zeros(k), "b")
            out = conv1d_valid(Tensor(rng.normal(size=(length, d))), f, b)
            assert out.shape == (length - w + 1, k)

    def test_pool_mean_concat_pad_shapes(self):
        rng = np.random.default_rng(3)
        assert max_over_time(Tensor(rng.normal(size=(4, 6)))).shape == (6,)
        assert mean_rows(Tensor(rng.normal(size=(4, 6)))).shape == (6,)
        parts = [Tensor(rng.normal(size=3)), Tensor(rng.normal(size=5))]
        assert concat(parts).shape == (8,)
        assert pad_rows(Tensor(rng.normal(size=(2, 3))), 5).shape == (5, 3)
        assert dropout(Tensor(rng.normal(size=(2, 3))), 0.4,
                       np.random.default_rng(0), True).shape == (2, 3)


class TestArrayCheckpoint:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(4)
        arrays = {"a.W": rng.normal(size=(3, 2)), "a.b": rng.normal(size=2),
                  "s": np.array(2.5)}
        path = tmp_path / "ckpt.json"
        save_arrays(path, arrays, {"kind": "test", "seed": 9})
        header, loaded = load_arrays(path)
        assert header["kind"] == "test" and header["seed"] == 9
        assert list(loaded) == list(arrays)
        for name in arrays:
            np.testing.assert_array_equal(loaded[name], arrays[name])

    def test_truncated_sidecar_detected(self, tmp_path):
        path = tmp_path / "ckpt.json"
        save_arrays(path, {"w": np.zeros(4)})
        binpath = tmp_path / "ckpt.bin"
        binpath.write_bytes(binpath.read_bytes()[:-8])
        with pytest.raises(ValueError):
            load_arrays(path)
