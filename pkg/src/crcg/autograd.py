"""Minimal reverse-mode automatic differentiation over float64 numpy arrays.

Only the operations the graph classifier and the R-CAM losses need are
provided. ``detach`` returns a constant copy, so no gradient ever flows
through it.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    __slots__ = ("value", "grad", "requires_grad", "_parents", "_backward", "op")

    def __init__(self, value, requires_grad=False, _parents=(), _backward=None, op=""):
        self.value = np.asarray(value, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = np.zeros_like(self.value) if self.requires_grad else None
        self._parents = _parents
        self._backward = _backward
        self.op = op

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Tensor(shape={self.shape}, op={self.op!r}, requires_grad={self.requires_grad})"

    def zero_grad(self):
        if self.requires_grad:
            self.grad = np.zeros_like(self.value)

    def detach(self) -> "Tensor":
        return Tensor(self.value.copy())

    def backward(self):
        backward(self)

    # operator sugar
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        return add(self, scale(as_tensor(other), -1.0))

    def __matmul__(self, other):
        return matmul(self, other)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(value, parents, backward, op):
    live = tuple(p for p in parents if p.requires_grad)
    if not live:
        return Tensor(value, op=op)
    return Tensor(value, True, parents, backward, op)


def _unbroadcast(grad, shape):
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for ax, size in enumerate(shape):
        if size == 1 and grad.shape[ax] != 1:
            grad = grad.sum(axis=ax, keepdims=True)
    return grad


def detach(x) -> Tensor:
    return Tensor(as_tensor(x).value.copy())


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def back(g):
        if a.requires_grad:
            a.grad += _unbroadcast(g, a.shape)
        if b.requires_grad:
            b.grad += _unbroadcast(g, b.shape)

    return _node(a.value + b.value, (a, b), back, "add")


def mul(a, b) -> Tensor:
    """Elementwise product with broadcasting."""
    a, b = as_tensor(a), as_tensor(b)

    def back(g):
        if a.requires_grad:
            a.grad += _unbroadcast(g * b.value, a.shape)
        if b.requires_grad:
            b.grad += _unbroadcast(g * a.value, b.shape)

    return _node(a.value * b.value, (a, b), back, "mul")


def scale(a, c: float) -> Tensor:
    a = as_tensor(a)

    def back(g):
        a.grad += c * g

    return _node(a.value * c, (a,), back, "scale")


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def back(g):
        if a.requires_grad:
            a.grad += g @ b.value.T if b.value.ndim > 1 else np.outer(g, b.value)
        if b.requires_grad:
            b.grad += a.value.T @ g if a.value.ndim > 1 else np.outer(a.value, g)

    return _node(a.value @ b.value, (a, b), back, "matmul")


def relu(a) -> Tensor:
    a = as_tensor(a)
    mask = a.value > 0

    def back(g):
        a.grad += g * mask

    return _node(a.value * mask, (a,), back, "relu")


def mean_rows(a) -> Tensor:
    """Mean over the first axis: (n, h) -> (h,)."""
    a = as_tensor(a)
    n = a.shape[0]

    def back(g):
        a.grad += np.broadcast_to(g / n, a.shape)

    return _node(a.value.mean(axis=0), (a,), back, "mean_rows")


def total(parts) -> Tensor:
    """Sum of a list of scalar tensors (one graph node instead of a chain)."""
    parts = [as_tensor(p) for p in parts]
    if not parts:
        return Tensor(0.0)

    def back(g):
        for p in parts:
            if p.requires_grad:
                p.grad += g

    return _node(sum(float(p.value) for p in parts), tuple(parts), back, "total")


def cross_entropy(logits, label: int) -> Tensor:
    """``-log softmax(logits)[label]`` with max subtraction."""
    z = as_tensor(logits)
    shifted = z.value - z.value.max()
    logsum = np.log(np.exp(shifted).sum())
    loss = logsum - shifted[label]

    def back(g):
        p = np.exp(shifted - logsum)
        p[label] -= 1.0
        z.grad += g * p

    return _node(loss, (z,), back, "cross_entropy")


def cosine(a, b, eps: float = 1e-12) -> Tensor:
    """Cosine similarity of two vectors; 0 when either has (near) zero norm."""
    a, b = as_tensor(a), as_tensor(b)
    na = float(np.sqrt(a.value @ a.value))
    nb = float(np.sqrt(b.value @ b.value))
    if na < eps or nb < eps:
        return Tensor(0.0)
    dot = float(a.value @ b.value)
    c = dot / (na * nb)

    def back(g):
        if a.requires_grad:
            a.grad += g * (b.value / (na * nb) - c * a.value / (na * na))
        if b.requires_grad:
            b.grad += g * (a.value / (na * nb) - c * b.value / (nb * nb))

    return _node(c, (a, b), back, "cosine")


def cosine_sum(targets, vectors, eps: float = 1e-12) -> Tensor:
    """``sum_k cos(targets[k], vectors[k])`` as a single graph node.

    ``targets`` is a constant ``(k, h)`` array; ``vectors`` are k tensors of
    shape ``(h,)``. Pairs with a (near) zero norm contribute 0.
    """
    vectors = [as_tensor(v) for v in vectors]
    if not vectors:
        return Tensor(0.0)
    T = np.asarray(targets, dtype=np.float64).reshape(len(vectors), -1)
    V = np.stack([v.value for v in vectors])
    nt = np.sqrt(np.einsum("ij,ij->i", T, T))
    nv = np.sqrt(np.einsum("ij,ij->i", V, V))
    ok = (nt >= eps) & (nv >= eps)
    inv = np.where(ok, 1.0 / np.where(ok, nt * nv, 1.0), 0.0)
    cos = np.einsum("ij,ij->i", T, V) * inv
    inv_v2 = np.where(ok, 1.0 / np.where(ok, nv * nv, 1.0), 0.0)
    dV = T * inv[:, None] - cos[:, None] * V * inv_v2[:, None]

    def back(g):
        for k, v in enumerate(vectors):
            if v.requires_grad:
                v.grad += g * dV[k]

    return _node(float(cos.sum()), tuple(vectors), back, "cosine_sum")


def backward(root: Tensor) -> None:
    """Accumulate d(root)/d(leaf) into every leaf with ``requires_grad``."""
    if root.value.size != 1:
        raise ValueError("backward needs a scalar root")
    if not root.requires_grad:
        return
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    for node in order:
        if node._parents:
            node.grad = np.zeros_like(node.value)
    root.grad = np.ones_like(root.value)
    for node in reversed(order):
        if node._backward is not None:
            node._backward(node.grad)
