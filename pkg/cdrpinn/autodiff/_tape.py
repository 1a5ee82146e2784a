"""Reverse accumulation over numpy arrays

A `Node` wraps a float64 array and remembers, for each parent, the
vector-Jacobian product that maps its own adjoint back to that parent.
Nodes are created per batch evaluation; nothing is shared between calls.
"""
from typing import Callable, List, Tuple

import numpy as np


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting"""
    grad = np.asarray(grad)
    if grad.shape == tuple(shape):
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


class Node:
    """Array value recorded on the tape"""

    __slots__ = ("value", "parents", "grad")

    __array_priority__ = 100

    def __init__(self, value, parents: List[Tuple["Node", Callable]] = ()):
        self.value = np.asarray(value, dtype=np.float64)
        self.parents = tuple(parents)
        self.grad = None

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return "Node(shape={})".format(self.value.shape)

    # arithmetic
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(other))

    def __rsub__(self, other):
        return add(neg(self), other)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __truediv__(self, other):
        if isinstance(other, Node):
            raise TypeError("division by a Node is not supported")
        return mul(self, 1.0 / np.asarray(other, dtype=np.float64))

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __pow__(self, power):
        if power != 2:
            raise TypeError("only squaring is supported")
        return square(self)

    def __getitem__(self, index):
        return take(self, index)


def value_of(x):
    return x.value if isinstance(x, Node) else x


def _node(value, *parents):
    parents = [(p, f) for p, f in parents if isinstance(p, Node)]
    if not parents:
        return np.asarray(value, dtype=np.float64)
    return Node(value, parents)


def add(a, b):
    av, bv = value_of(a), value_of(b)
    out = av + bv
    return _node(
        out,
        (a, lambda g: _unbroadcast(g, np.shape(av))),
        (b, lambda g: _unbroadcast(g, np.shape(bv))),
    )


def neg(a):
    if not isinstance(a, Node):
        return -np.asarray(a, dtype=np.float64)
    return Node(-a.value, [(a, lambda g: -g)])


def mul(a, b):
    av, bv = value_of(a), value_of(b)
    return _node(
        av * bv,
        (a, lambda g: _unbroadcast(g * bv, np.shape(av))),
        (b, lambda g: _unbroadcast(g * av, np.shape(bv))),
    )


def square(a):
    av = value_of(a)
    return _node(av * av, (a, lambda g: 2.0 * av * g))


def matmul(a, w):
    """`a @ w` with `a` of shape (..., n) and `w` of shape (n, m)"""
    av, wv = value_of(a), value_of(w)

    def grad_w(g):
        return av.reshape(-1, av.shape[-1]).T @ g.reshape(-1, g.shape[-1])

    return _node(av @ wv, (a, lambda g: g @ wv.T), (w, grad_w))


def _unary(fn, deriv):
    def op(a):
        av = value_of(a)
        out = fn(av)
        return _node(out, (a, lambda g: g * deriv(av, out)))

    op.__name__ = fn.__name__
    return op


tanh = _unary(np.tanh, lambda x, y: 1.0 - y * y)
sin = _unary(np.sin, lambda x, y: np.cos(x))
cos = _unary(np.cos, lambda x, y: -np.sin(x))
exp = _unary(np.exp, lambda x, y: y)
expm1 = _unary(np.expm1, lambda x, y: y + 1.0)


def tsum(a, axis=None):
    av = value_of(a)
    out = np.sum(av, axis=axis)

    def grad(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return np.broadcast_to(g, av.shape)

    return _node(out, (a, grad))


def mean(a):
    av = value_of(a)
    n = av.size
    return _node(np.mean(av), (a, lambda g: np.broadcast_to(g / n, av.shape)))


def take(a, index):
    av = value_of(a)

    fancy = any(
        isinstance(i, (list, np.ndarray))
        for i in (index if isinstance(index, tuple) else (index,))
    )

    def grad(g):
        full = np.zeros_like(av)
        if fancy:
            np.add.at(full, index, g)
        else:
            full[index] += g
        return full

    return _node(av[index], (a, grad))


def backward(root: Node):
    """Accumulate d(root)/d(node) into `node.grad` for every node on the tape

    `root` must hold a scalar.
    """
    if root.value.size != 1:
        raise ValueError("backward needs a scalar root, got {}".format(root.shape))

    order, seen, stack = [], set(), [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent, _ in node.parents:
            if id(parent) not in seen:
                stack.append((parent, False))

    for node in order:
        node.grad = None
    root.grad = np.ones_like(root.value)
    for node in reversed(order):
        if node.grad is None:
            continue
        for parent, vjp in node.parents:
            contrib = vjp(node.grad)
            parent.grad = contrib if parent.grad is None else parent.grad + contrib
