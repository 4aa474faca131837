"""Minimal reverse-mode autodiff on numpy arrays.

Each Value wraps an ndarray (0-d for scalars) and records its parents plus
a local backward closure; backward() runs one reverse topological pass.
Batched nodes are an internal vectorization only — gradients equal the
scalar-by-scalar semantics.
"""

from __future__ import annotations

import numpy as np


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum grad back down to `shape` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and grad.shape[ax] != 1:
            grad = grad.sum(axis=ax, keepdims=True)
    return grad


class Value:
    __slots__ = ("data", "grad", "_backward", "_prev")

    def __init__(self, data, _prev=()):
        self.data = np.asarray(data, dtype=float)
        self.grad = np.zeros_like(self.data)
        self._backward = None
        self._prev = _prev

    def __repr__(self):
        return f"Value({self.data!r})"

    @property
    def shape(self):
        return self.data.shape

    # ------------------------------------------------------------ arithmetic

    def __add__(self, other):
        other = other if isinstance(other, Value) else Value(other)
        out = Value(self.data + other.data, (self, other))

        def _backward():
            self.grad += _unbroadcast(out.grad, self.data.shape)
            other.grad += _unbroadcast(out.grad, other.data.shape)

        out._backward = _backward
        return out

    def __mul__(self, other):
        other = other if isinstance(other, Value) else Value(other)
        out = Value(self.data * other.data, (self, other))

        def _backward():
            self.grad += _unbroadcast(out.grad * other.data, self.data.shape)
            other.grad += _unbroadcast(out.grad * self.data, other.data.shape)

        out._backward = _backward
        return out

    def __pow__(self, exponent):
        assert np.isscalar(exponent), "only constant exponents"
        out = Value(self.data**exponent, (self,))

        def _backward():
            self.grad += out.grad * exponent * self.data ** (exponent - 1)

        out._backward = _backward
        return out

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, Value) else Value(-np.asarray(other, dtype=float)))

    def __truediv__(self, other):
        other = other if isinstance(other, Value) else Value(other)
        return self * other**-1.0

    def __radd__(self, other):
        return self + other

    def __rmul__(self, other):
        return self * other

    def __rsub__(self, other):
        return (-self) + other

    def __rtruediv__(self, other):
        return Value(other) * self**-1.0

    def __matmul__(self, other):
        other = other if isinstance(other, Value) else Value(other)
        out = Value(self.data @ other.data, (self, other))

        def _backward():
            a, b = self.data, other.data
            if a.ndim == 1 and b.ndim == 2:
                self.grad += out.grad @ b.T
                other.grad += np.outer(a, out.grad)
            elif a.ndim == 2 and b.ndim == 2:
                self.grad += out.grad @ b.T
                other.grad += a.T @ out.grad
            elif a.ndim == 2 and b.ndim == 1:
                self.grad += np.outer(out.grad, b)
                other.grad += a.T @ out.grad
            else:
                raise NotImplementedError("matmul backward for these ranks")

        out._backward = _backward
        return out

    def __getitem__(self, idx):
        out = Value(self.data[idx], (self,))

        def _backward():
            np.add.at(self.grad, idx, out.grad)

        out._backward = _backward
        return out

    def reshape(self, *shape):
        out = Value(self.data.reshape(*shape), (self,))

        def _backward():
            self.grad += out.grad.reshape(self.data.shape)

        out._backward = _backward
        return out

    # -------------------------------------------------------------- nonlinear

    def exp(self):
        out = Value(np.exp(self.data), (self,))

        def _backward():
            self.grad += out.grad * out.data

        out._backward = _backward
        return out

    def log(self):
        out = Value(np.log(self.data), (self,))

        def _backward():
            self.grad += out.grad / self.data

        out._backward = _backward
        return out

    def tanh(self):
        out = Value(np.tanh(self.data), (self,))

        def _backward():
            self.grad += out.grad * (1.0 - out.data**2)

        out._backward = _backward
        return out

    def sigmoid(self):
        out = Value(_stable_sigmoid(self.data), (self,))

        def _backward():
            self.grad += out.grad * out.data * (1.0 - out.data)

        out._backward = _backward
        return out

    def relu(self):
        out = Value(np.maximum(self.data, 0.0), (self,))

        def _backward():
            self.grad += out.grad * (self.data > 0)

        out._backward = _backward
        return out

    def elu(self):
        # alpha = 1: value and slope both continuous at 0
        neg = np.expm1(np.minimum(self.data, 0.0))
        out = Value(np.where(self.data > 0, self.data, neg), (self,))

        def _backward():
            self.grad += out.grad * np.where(self.data > 0, 1.0, neg + 1.0)

        out._backward = _backward
        return out

    def abs(self):
        out = Value(np.abs(self.data), (self,))

        def _backward():
            self.grad += out.grad * np.sign(self.data)

        out._backward = _backward
        return out

    def sum(self, axis=None, keepdims=False):
        out = Value(self.data.sum(axis=axis, keepdims=keepdims), (self,))

        def _backward():
            g = out.grad
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self.grad += np.broadcast_to(g, self.data.shape)

        out._backward = _backward
        return out

    def mean(self, axis=None, keepdims=False):
        n = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / n)

    # --------------------------------------------------------------- backward

    def backward(self):
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar output")
        topo: list[Value] = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for child in node._prev:
                if id(child) not in visited:
                    stack.append((child, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None:
                node._backward()


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out
