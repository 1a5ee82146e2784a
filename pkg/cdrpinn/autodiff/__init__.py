"""Exact input and parameter derivatives for tanh networks"""

from ._jet import Jet2, tanh, sin, cos, exp, expm1, one_minus_exp
from ._tape import Node, backward, value_of
from ._grad import ParamGradient, SpatialGradient
from ._grad import forward_jet, param_gradient, residual_spatial_gradient

__all__ = [
    "Jet2",
    "Node",
    "ParamGradient",
    "SpatialGradient",
    "backward",
    "forward_jet",
    "param_gradient",
    "residual_spatial_gradient",
    "value_of",
    "tanh",
    "sin",
    "cos",
    "exp",
    "expm1",
    "one_minus_exp",
]
