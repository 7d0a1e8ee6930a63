"""
Reverse-mode differentiation over dense numpy arrays.

A Tensor records the operation that produced it together with a function
mapping the upstream gradient to one gradient per parent. Calling
``backward()`` on a scalar walks the recorded graph in reverse topological
order and accumulates gradients into the leaf tensors that require them.

Only the operations the networks in this project need are provided.
Everything is evaluated in float64.
"""

from typing import Callable, Sequence

import numpy as np

from utils.errors import ContractError, ShapeError


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "_parents", "_backward", "op")
    # ndarray (op) Tensor defers to the Tensor's reflected operator.
    __array_ufunc__ = None

    def __init__(self, data, requires_grad: bool = False, parents: Sequence["Tensor"] = (),
                 backward: Callable | None = None, op: str = ""):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad = None
        self._parents = tuple(parents)
        self._backward = backward
        self.op = op

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, op={self.op or 'leaf'}, requires_grad={self.requires_grad})"

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def numpy(self) -> np.ndarray:
        return self.data

    # -- graph construction -------------------------------------------------

    @staticmethod
    def _result(data, parents, backward, op) -> "Tensor":
        if any(p.requires_grad for p in parents):
            return Tensor(data, True, parents, backward, op)
        return Tensor(data, op=op)

    def backward(self) -> None:
        if self.data.size != 1:
            raise ContractError(f"backward needs a scalar loss, got shape {self.data.shape}")
        if not self.requires_grad:
            return
        order = _topological_order(self)
        pending = {id(self): np.ones_like(self.data)}
        for node in reversed(order):
            upstream = pending.pop(id(node), None)
            if upstream is None:
                continue
            if node._backward is None:
                node.grad = upstream if node.grad is None else node.grad + upstream
                continue
            for parent, grad in zip(node._parents, node._backward(upstream)):
                if grad is None or not parent.requires_grad:
                    continue
                grad = _unbroadcast(np.asarray(grad, dtype=np.float64), parent.data.shape)
                key = id(parent)
                pending[key] = pending[key] + grad if key in pending else grad

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = as_tensor(other)
        return Tensor._result(self.data + other.data, (self, other), lambda g: (g, g), "add")

    __radd__ = __add__

    def __sub__(self, other):
        other = as_tensor(other)
        return Tensor._result(self.data - other.data, (self, other), lambda g: (g, -g), "sub")

    def __rsub__(self, other):
        return as_tensor(other) - self

    def __neg__(self):
        return Tensor._result(-self.data, (self,), lambda g: (-g,), "neg")

    def __mul__(self, other):
        other = as_tensor(other)
        a, b = self.data, other.data
        return Tensor._result(a * b, (self, other), lambda g: (g * b, g * a), "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_tensor(other)
        a, b = self.data, other.data
        return Tensor._result(a / b, (self, other), lambda g: (g / b, -g * a / (b * b)), "div")

    def __rtruediv__(self, other):
        return as_tensor(other) / self

    def __pow__(self, exponent):
        if isinstance(exponent, Tensor):
            raise ContractError("only constant exponents are supported")
        a = self.data
        return Tensor._result(a ** exponent, (self,),
                              lambda g: (g * exponent * a ** (exponent - 1),), "pow")

    def __matmul__(self, other):
        other = as_tensor(other)
        a, b = self.data, other.data
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
        return Tensor._result(a @ b, (self, other), lambda g: (g @ b.T, a.T @ g), "matmul")

    def __rmatmul__(self, other):
        return as_tensor(other) @ self

    @property
    def T(self) -> "Tensor":
        return Tensor._result(self.data.T, (self,), lambda g: (g.T,), "transpose")

    def __getitem__(self, key):
        shape = self.data.shape

        def backward(g):
            full = np.zeros(shape)
            full[key] = g
            return (full,)

        return Tensor._result(self.data[key], (self,), backward, "slice")

    # -- reductions ---------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        shape = self.data.shape

        def backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, shape),)

        return Tensor._result(self.data.sum(axis=axis, keepdims=keepdims), (self,), backward, "sum")

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        count = self.data.size if axis is None else np.prod([self.data.shape[a] for a in np.atleast_1d(axis)])
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    # -- elementwise --------------------------------------------------------

    def exp(self) -> "Tensor":
        out = np.exp(self.data)
        return Tensor._result(out, (self,), lambda g: (g * out,), "exp")

    def log(self) -> "Tensor":
        a = self.data
        return Tensor._result(np.log(a), (self,), lambda g: (g / a,), "log")

    def sqrt(self) -> "Tensor":
        out = np.sqrt(self.data)
        return Tensor._result(out, (self,), lambda g: (g / (2.0 * out),), "sqrt")

    def abs(self) -> "Tensor":
        a = self.data
        return Tensor._result(np.abs(a), (self,), lambda g: (g * np.sign(a),), "abs")

    def relu(self) -> "Tensor":
        a = self.data
        return Tensor._result(np.maximum(a, 0.0), (self,), lambda g: (g * (a > 0),), "relu")

    def tanh(self) -> "Tensor":
        out = np.tanh(self.data)
        return Tensor._result(out, (self,), lambda g: (g * (1.0 - out * out),), "tanh")

    def sigmoid(self) -> "Tensor":
        out = stable_sigmoid(self.data)
        return Tensor._result(out, (self,), lambda g: (g * out * (1.0 - out),), "sigmoid")


def as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def stable_sigmoid(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    positive = a >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-a[positive]))
    e = np.exp(a[~positive])
    out[~positive] = e / (1.0 + e)
    return out


def _topological_order(root: Tensor) -> list:
    order, visited = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


# -- composite and fused operations ------------------------------------------

def concat(tensors: Sequence[Tensor], axis: int = 1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in tensors]
    bounds = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return Tensor._result(np.concatenate([t.data for t in tensors], axis=axis), tensors, backward, "concat")


def softmax(logits: Tensor) -> Tensor:
    a = logits.data
    shifted = np.exp(a - a.max(axis=1, keepdims=True))
    out = shifted / shifted.sum(axis=1, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=1, keepdims=True)),)

    return Tensor._result(out, (logits,), backward, "softmax")


def softmax_cross_entropy(logits: Tensor, labels: np.ndarray) -> Tensor:
    """Per-row cross-entropy of integer ``labels`` under softmax(logits)."""
    a = logits.data
    labels = np.asarray(labels, dtype=np.int64)
    if a.ndim != 2 or labels.shape != (a.shape[0],):
        raise ShapeError(f"logits {a.shape} do not match labels {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= a.shape[1]):
        raise ShapeError(f"labels must lie in [0, {a.shape[1]})")
    rows = np.arange(a.shape[0])
    top = a.max(axis=1, keepdims=True)
    log_norm = top[:, 0] + np.log(np.exp(a - top).sum(axis=1))
    probs = np.exp(a - log_norm[:, None])

    def backward(g):
        grad = probs.copy()
        grad[rows, labels] -= 1.0
        return (grad * g[:, None],)

    return Tensor._result(log_norm - a[rows, labels], (logits,), backward, "softmax_xent")


def bce_with_logits(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Elementwise Bernoulli cross-entropy of ``targets`` in [0, 1] under sigmoid(logits)."""
    a = logits.data
    t = np.asarray(targets, dtype=np.float64)
    if a.shape != t.shape:
        raise ShapeError(f"logits {a.shape} do not match targets {t.shape}")
    out = np.maximum(a, 0.0) - a * t + np.log1p(np.exp(-np.abs(a)))
    probs = stable_sigmoid(a)
    return Tensor._result(out, (logits,), lambda g: (g * (probs - t),), "bce_logits")


def pairwise_distances(X: Tensor, smoothing: float = 1e-12) -> Tensor:
    """
    Euclidean distance matrix between the rows of X.

    The forward value is the exact sqrt(sq), not sqrt(sq + smoothing);
    ``smoothing`` enters only the derivative of the square root, so
    coincident rows have a defined (zero) gradient.
    """
    x = X.data
    if x.ndim != 2:
        raise ShapeError(f"expected a 2-D batch, got shape {x.shape}")
    diff = x[:, None, :] - x[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    out = np.sqrt(sq)
    inv = 1.0 / (2.0 * np.sqrt(sq + smoothing))
    np.fill_diagonal(inv, 0.0)

    def backward(g):
        w = g * inv
        w = w + w.T
        return (2.0 * (w.sum(axis=1, keepdims=True) * x - w @ x),)

    return Tensor._result(out, (X,), backward, "pdist")


# -- functional entry points ---------------------------------------------------

def value_and_grad(loss_fn: Callable, *param_sets, **kwargs):
    """
    Evaluate ``loss_fn(*tensor_sets, **kwargs)`` and differentiate it with
    respect to every ParamSet passed in. Inputs are not mutated.
    """
    tensor_sets = [params.as_tensors(requires_grad=True) for params in param_sets]
    loss = loss_fn(*tensor_sets, **kwargs)
    if not isinstance(loss, Tensor):
        loss = as_tensor(loss)
    if loss.data.size != 1:
        raise ContractError(f"loss must be scalar, got shape {loss.data.shape}")
    loss.backward()
    grads = [params.gradient_from(tensors) for params, tensors in zip(param_sets, tensor_sets)]
    return float(loss.data), grads


def grad(loss_fn: Callable, params, *args, **kwargs):
    """Gradient ParamSet of the scalar ``loss_fn(tensors, *args)`` at ``params``."""
    _, grads = value_and_grad(lambda tensors: loss_fn(tensors, *args, **kwargs), params)
    return grads[0]
