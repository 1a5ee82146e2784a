"""Second-order forward jets

A `Jet2` carries a value together with its first and pure second derivative
along one seeded input coordinate. Components may be floats, numpy arrays or
tape `Node`s; with arrays, `d1`/`d2` may hold an extra leading axis that
stacks several seeded coordinates against a shared value.
"""
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import _tape as T


@dataclass(frozen=True)
class Jet2:
    """(v, d/dx_k, d^2/dx_k^2) of a scalar quantity"""

    v: Any
    d1: Any
    d2: Any

    __array_ufunc__ = None

    @classmethod
    def seed(cls, x, coord: int, k: int = None):
        """Jet of input coordinate `coord` when seeding coordinate `k`"""
        if k is None:
            k = coord
        zeros = np.zeros_like(np.asarray(T.value_of(x), dtype=np.float64))
        return cls(x, zeros + (1.0 if coord == k else 0.0), zeros)

    @classmethod
    def constant(cls, c):
        return cls(c, 0.0, 0.0)

    def _coerce(self, other):
        return other if isinstance(other, Jet2) else Jet2.constant(other)

    def __add__(self, other):
        o = self._coerce(other)
        return Jet2(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.v, -self.d1, -self.d2)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.v * other, self.d1 * other, self.d2 * other)
        return Jet2(
            self.v * other.v,
            self.d1 * other.v + self.v * other.d1,
            self.d2 * other.v + 2.0 * self.d1 * other.d1 + self.v * other.d2,
        )

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, Jet2):
            raise TypeError("division by a Jet2 is not supported")
        return self * (1.0 / c)

    def _chain(self, f0, f1, f2):
        # f(g): d1 = f'(g.v) g.d1, d2 = f''(g.v) g.d1^2 + f'(g.v) g.d2
        return Jet2(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)

    def tanh(self):
        t = T.tanh(self.v)
        s = 1.0 - t * t
        return self._chain(t, s, -2.0 * t * s)

    def sin(self):
        s, c = T.sin(self.v), T.cos(self.v)
        return self._chain(s, c, -s)

    def cos(self):
        s, c = T.sin(self.v), T.cos(self.v)
        return self._chain(c, -s, -c)

    def exp(self):
        e = T.exp(self.v)
        return self._chain(e, e, e)

    def expm1(self):
        e = T.exp(self.v)
        return self._chain(T.expm1(self.v), e, e)

    def affine(self, weight, bias):
        """Jet of `self @ weight + bias` for a row-vector layer input"""
        return Jet2(
            T.matmul(self.v, weight) + bias,
            T.matmul(self.d1, weight),
            T.matmul(self.d2, weight),
        )


def _dispatch(name):
    def fn(x):
        if isinstance(x, Jet2):
            return getattr(x, name)()
        return getattr(T, name)(x)

    fn.__name__ = name
    return fn


# Elementary functions accepting floats, arrays, tape nodes or jets.
tanh = _dispatch("tanh")
sin = _dispatch("sin")
cos = _dispatch("cos")
exp = _dispatch("exp")
expm1 = _dispatch("expm1")


def one_minus_exp(z):
    """1 - e^{-z} for z >= 0, through expm1"""
    return -expm1(-z)
