import numpy as np
import pytest

from core.rng import RngStream
from models.params import ParamSet
from nets.autodiff import (
    Tensor,
    bce_with_logits,
    concat,
    pairwise_distances,
    softmax,
    softmax_cross_entropy,
    value_and_grad,
)
from nets.gradcheck import finite_difference_check
from nets.network import apply, forward, init_params
from nets.optim import AdamState, adam_step
from nets.serialization import decode_network, encode_network
from nets.vae import kl_diag_gaussian, reparameterize
from schemas.nets import NetworkSpec
from utils.errors import ContractError, ShapeError, TruncatedBlobError, UnsupportedVersionError


def numeric_gradient(fn, x, h=1e-6):
    grad = np.zeros_like(x)
    for index in np.ndindex(*x.shape):
        up, down = x.copy(), x.copy()
        up[index] += h
        down[index] -= h
        grad[index] = (fn(Tensor(up)).item() - fn(Tensor(down)).item()) / (2 * h)
    return grad


def analytic_gradient(fn, x):
    t = Tensor(x, requires_grad=True)
    fn(t).backward()
    return t.grad


OPS = {
    "polynomial": lambda t: ((t * t - t * 3.0) / 2.0 + 1.0).sum(),
    "exp-log": lambda t: (t.exp() + 1.0).log().mean(),
    "sqrt-abs": lambda t: (t.abs() + 0.5).sqrt().sum(),
    "tanh-sigmoid": lambda t: (t.tanh() * t.sigmoid()).sum(),
    "matmul": lambda t: (t @ t.T).sum(),
    "slice-concat": lambda t: concat([t[:, :1] * 2.0, t[:, 1:] ** 3]).sum(),
    "softmax": lambda t: (softmax(t) * np.arange(3.0)).sum(),
    "cross-entropy": lambda t: softmax_cross_entropy(t, np.array([0, 2, 1, 1])).mean(),
    "bce": lambda t: bce_with_logits(t, np.full((4, 3), 0.3)).sum(),
    "pdist": lambda t: pairwise_distances(t).sum(),
    "broadcast": lambda t: (t + t.sum(axis=0, keepdims=True)).mean(),
}


@pytest.mark.parametrize("name", sorted(OPS))
def test_operation_gradients_match_central_differences(name):
    x = RngStream(11).standard_normal((4, 3))
    fn = OPS[name]
    np.testing.assert_allclose(analytic_gradient(fn, x), numeric_gradient(fn, x), rtol=1e-5, atol=1e-6)


def test_backward_requires_scalar():
    with pytest.raises(ContractError):
        (Tensor(np.ones(3), requires_grad=True) * 2.0).backward()


def test_pairwise_distances_of_coincident_rows_have_zero_gradient():
    t = Tensor(np.ones((3, 2)), requires_grad=True)
    pairwise_distances(t).sum().backward()
    np.testing.assert_array_equal(t.grad, np.zeros((3, 2)))


def test_cross_entropy_rejects_out_of_range_labels():
    with pytest.raises(ShapeError):
        softmax_cross_entropy(Tensor(np.zeros((2, 3))), np.array([0, 3]))


def test_network_gradients_match_finite_differences():
    spec = NetworkSpec.mlp(5, [7, 4], 3, "tanh")
    params = init_params(spec, RngStream(1))
    X = RngStream(2).standard_normal((6, 5))
    labels = np.array([0, 1, 2, 0, 1, 2])

    def loss(tensors):
        return softmax_cross_entropy(apply(spec, tensors, X), labels).mean()

    assert finite_difference_check(loss, [params], RngStream(3), coordinates=40) < 1e-4


def test_forward_checks_input_width():
    spec = NetworkSpec.mlp(3, [4], 2)
    params = init_params(spec, RngStream(0))
    assert forward(spec, params, np.zeros((5, 3))).shape == (5, 2)
    with pytest.raises(ShapeError):
        forward(spec, params, np.zeros((5, 4)))


def test_network_spec_rejects_odd_gaussian_head():
    with pytest.raises(ValueError):
        NetworkSpec.mlp(3, [4], 5, output_head="gaussian-params")


def test_adam_reduces_a_quadratic_and_keeps_inputs():
    params = ParamSet((np.array([[3.0, -2.0]]),), (np.array([1.0, 1.0]),))
    original = [a.copy() for a in params.arrays()]
    state = AdamState.fresh(params, learning_rate=0.1)

    def loss(tensors):
        return (tensors.weights[0] * tensors.weights[0]).sum() + (tensors.biases[0] * tensors.biases[0]).sum()

    first, _ = value_and_grad(loss, params)
    current = params
    for _ in range(100):
        _, (grads,) = value_and_grad(loss, current)
        current, state = adam_step(current, grads, state)
    last, _ = value_and_grad(loss, current)
    assert last < first / 10
    assert state.step == 100
    for before, after in zip(original, params.arrays()):
        np.testing.assert_array_equal(before, after)


def test_adam_rejects_mismatched_gradients():
    params = ParamSet((np.zeros((2, 2)),), (np.zeros(2),))
    grads = ParamSet((np.zeros((2, 3)),), (np.zeros(3),))
    with pytest.raises(ShapeError):
        adam_step(params, grads, AdamState.fresh(params))


def test_reparameterize_with_zero_noise_is_the_mean():
    mu = np.array([0.5, -1.0])
    np.testing.assert_array_equal(reparameterize(mu, np.array([0.3, -0.2]), np.zeros(2)), mu)


def test_kl_of_standard_normal_is_zero():
    assert kl_diag_gaussian(np.zeros(4), np.zeros(4)) == pytest.approx(0.0)
    assert kl_diag_gaussian(np.ones(2), np.zeros(2)) == pytest.approx(1.0)


def test_model_blob_roundtrip_and_errors():
    spec = NetworkSpec.mlp(4, [3], 2, "relu", "logits")
    params = init_params(spec, RngStream(8))
    blob = encode_network(spec, params)
    decoded_spec, decoded, end = decode_network(blob)
    assert decoded_spec == spec
    assert end == len(blob)
    for a, b in zip(params.arrays(), decoded.arrays()):
        np.testing.assert_allclose(a, b, rtol=1e-6, atol=1e-7)

    with pytest.raises(TruncatedBlobError):
        decode_network(blob[:-3])
    bumped = bytearray(blob)
    bumped[4] = 99
    with pytest.raises(UnsupportedVersionError):
        decode_network(bytes(bumped))
