"""Benchmark convection-diffusion-reaction problems

Each problem is `-eps * lap(u) + b . grad(u) + c u = f` on a domain with
Dirichlet data. Coefficient fields, sources and exact solutions are written
against the generic elementary functions of `cdrpinn.autodiff`, so the same
closed form evaluates on arrays, on tape nodes (gradients with respect to the
sample coordinates) and on `Jet2`s (input derivatives of exact solutions).

Exponentials only ever appear as e^{-z} with z >= 0 inside the domain and
1 - e^{-z} goes through expm1; every eps * (1/eps^k) product of the
manufactured sources is cancelled by hand.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .autodiff import Jet2, cos, exp, one_minus_exp, sin
from .autodiff import _tape as T
from .domains import BOUNDARY_TOL, Domain, LShape, Slit
from .domains import unit_cube, unit_interval, unit_square
from .util import ConfigurationError, DomainError

HALF_PI = 0.5 * np.pi
TWO_PI = 2.0 * np.pi


class ProblemId(str, Enum):
    P1D = "P1D"
    P2D_BL = "P2D_BL"
    P2D_IL = "P2D_IL"
    P2D_L = "P2D_L"
    P2D_ROT = "P2D_ROT"
    P3D = "P3D"

    @classmethod
    def parse(cls, name) -> "ProblemId":
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper()
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(
                "unknown problem '{}', expected one of {}".format(
                    name, ", ".join(p.value for p in cls)
                )
            ) from None


Field = Callable[[Sequence], object]


@dataclass(frozen=True)
class PdeProblem:
    """One benchmark equation at a fixed diffusion coefficient"""

    id: ProblemId
    epsilon: float
    domain: Domain
    convection: Field
    reaction: Field
    source: Field
    boundary_data: Callable[[np.ndarray], np.ndarray]
    exact: Optional[Field] = None
    manufactured: bool = False
    divergence_form: bool = False
    divergence: Optional[Field] = None
    slit: Optional[Slit] = None
    outer_bc: bool = True
    value_range: Optional[Tuple[float, float]] = None
    layers: List[Tuple[int, float]] = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ConfigurationError(
                "epsilon must lie in (0, 1], got {}".format(self.epsilon)
            )

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def _check_interior(self, x):
        inside = self.domain.contains(T.value_of(x))
        if not np.all(inside):
            bad = np.atleast_2d(T.value_of(x))[~inside][0]
            raise DomainError("{}: point {} is not interior".format(self.id.value, bad))

    def on_data_boundary(self, x, tol=BOUNDARY_TOL) -> np.ndarray:
        """Points carrying Dirichlet data: the boundary (if imposed) or the slit"""
        x = np.atleast_2d(x)
        hit = np.zeros(x.shape[0], dtype=bool)
        if self.outer_bc:
            hit |= self.domain.on_boundary(x, tol)
        if self.slit is not None:
            hit |= self.slit.contains(x, tol)
        return hit

    def layer_distance(self, x) -> np.ndarray:
        """Distance to the nearest known layer location (inf if none)"""
        x = np.atleast_2d(x)
        dist = np.full(x.shape[0], np.inf)
        for axis, where in self.layers:
            dist = np.minimum(dist, np.abs(x[:, axis] - where))
        return dist

    def residual(self, model, x, check=True):
        """r = L u - f at interior points (N, d); arrays in, arrays out

        `x` may be a tape node, in which case r is differentiable with respect
        to the sample coordinates. Any object with `jets(x)` can stand in for
        the network (e.g. `ExactEvaluator`).
        """
        if check:
            self._check_interior(x)
        u, du, d2u = model.jets(x)
        return self.residual_from_jets(x, u, du, d2u)

    def residual_from_jets(self, x, u, du, d2u):
        xs = _columns(x, self.dim)
        b = self.convection(xs)
        r = -self.epsilon * T.tsum(d2u, axis=0)
        for k in range(self.dim):
            r = r + b[k] * du[k]
        r = r + self.reaction(xs) * u
        if self.divergence_form:
            r = r + self.divergence(xs) * u
        return r - self.source(xs)

    def squared_residual(self, model, x, chunk: int = 8192) -> np.ndarray:
        """r^2 over many interior points, evaluated in chunks"""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        out = np.empty(x.shape[0])
        for start in range(0, x.shape[0], chunk):
            r = self.residual(model, x[start : start + chunk], check=False)
            out[start : start + chunk] = r * r
        return out

    def boundary_residual(self, model, x_b, check=True, params=None):
        """u(x_b) - g(x_b) on the Dirichlet data set"""
        x_b = np.atleast_2d(np.asarray(x_b, dtype=np.float64))
        if check and not np.all(self.on_data_boundary(x_b)):
            bad = x_b[~self.on_data_boundary(x_b)][0]
            raise DomainError(
                "{}: point {} is not on the boundary".format(self.id.value, bad)
            )
        g = self.boundary_data(x_b)
        if params is None:
            return model.forward(x_b) - g
        u, _, _ = model.jets(x_b, coords=[], params=params)
        return u - g

    def source_term(self, x):
        if not self.manufactured:
            raise DomainError(
                "{} has no manufactured source; its source is given directly".format(
                    self.id.value
                )
            )
        return self.source(_columns(x, self.dim))

    def exact_solution(self, x):
        if not self.has_exact:
            raise DomainError("{} has no exact solution".format(self.id.value))
        return np.asarray(self.exact(_columns(np.atleast_2d(x), self.dim)))


def _columns(x, dim):
    if isinstance(x, T.Node):
        return [T.take(x, (slice(None), k)) for k in range(dim)]
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    return [x[:, k] for k in range(dim)]


class ExactEvaluator:
    """Closed-form exact solution with the `forward`/`jets` surface of a model"""

    def __init__(self, problem: PdeProblem):
        if not problem.has_exact:
            raise DomainError("{} has no exact solution".format(problem.id.value))
        self.problem = problem
        self.input_dim = problem.dim

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        u = self.problem.exact_solution(x)
        return float(u[0]) if x.ndim == 1 else u

    __call__ = forward

    def jets(self, x, coords=None, params=None):
        x = np.atleast_2d(T.value_of(x))
        if coords is None:
            coords = range(self.input_dim)
        cols = [x[:, j] for j in range(self.input_dim)]
        u = np.asarray(self.problem.exact([c for c in cols]))
        du, d2u = [], []
        for k in coords:
            jet = self.problem.exact([Jet2.seed(c, j, k) for j, c in enumerate(cols)])
            du.append(np.broadcast_to(jet.d1, u.shape))
            d2u.append(np.broadcast_to(jet.d2, u.shape))
        shape = (len(du), u.shape[0])
        return u, np.reshape(du, shape), np.reshape(d2u, shape)


# -eps u'' + (x - 2) u' = f on (0, 1), u = cos(pi x / 2)(1 - e^{-2x/eps})


def _p1d(eps):
    def exact(xs):
        (x,) = xs
        return cos(HALF_PI * x) * one_minus_exp(2.0 * x / eps)

    def source(xs):
        (x,) = xs
        z = 2.0 * x / eps
        e, om = exp(-z), one_minus_exp(z)
        c, s = cos(HALF_PI * x), sin(HALF_PI * x)
        a = HALF_PI
        return (
            eps * a * a * c * om
            + 4.0 * a * s * e
            - a * (x - 2.0) * s * om
            + z * c * e
        )

    return dict(
        domain=unit_interval(),
        convection=lambda xs: [xs[0] - 2.0],
        reaction=lambda xs: 0.0,
        source=source,
        exact=exact,
        manufactured=True,
        boundary_data=lambda xb: np.zeros(len(xb)),
        layers=[(0, 0.0)],
    )


# -eps lap u + (3 - x1 - x2) u_x1 + 1.5 u = f on (0, 1)^2, u = 0 on the boundary


def _p2d_bl(eps):
    s = np.sqrt(eps)
    d1 = float(-np.expm1(-1.0 / eps))
    d2 = float(-np.expm1(-1.0 / s))
    q = float(np.exp(-1.0 / eps))
    a = HALF_PI

    def factors(xs):
        x1, x2 = xs
        p = exp(-(1.0 - x1) / eps)
        along_x1 = sin(a * x1) - (p - q) / d1
        along_x2 = one_minus_exp(x2 / s) * one_minus_exp((1.0 - x2) / s) / d2
        return p, along_x1, along_x2

    def exact(xs):
        _, A, B = factors(xs)
        return A * B

    def source(xs):
        x1, x2 = xs
        p, A, B = factors(xs)
        f_sum = exp(-x2 / s) + exp(-(1.0 - x2) / s)
        return (
            eps * a * a * sin(a * x1) * B
            + A * f_sum / d2
            + (3.0 - x1 - x2) * a * cos(a * x1) * B
            + (x1 + x2 - 2.0) * (p / (eps * d1)) * B
            + 1.5 * A * B
        )

    return dict(
        domain=unit_square(),
        convection=lambda xs: [3.0 - xs[0] - xs[1], 0.0],
        reaction=lambda xs: 1.5,
        source=source,
        exact=exact,
        manufactured=True,
        boundary_data=lambda xb: np.zeros(len(xb)),
        layers=[(0, 1.0), (1, 0.0), (1, 1.0)],
    )


# -eps lap u + b . grad u = 0, b = (1/2, sqrt(3)/2), discontinuous inflow data


def _p2d_il(eps):
    def boundary_data(xb):
        xb = np.atleast_2d(xb)
        bottom = np.abs(xb[:, 1]) <= BOUNDARY_TOL
        left_low = (np.abs(xb[:, 0]) <= BOUNDARY_TOL) & (xb[:, 1] <= 0.2)
        return np.where(bottom | left_low, 1.0, 0.0)

    return dict(
        domain=unit_square(),
        convection=lambda xs: [0.5, 0.5 * np.sqrt(3.0)],
        reaction=lambda xs: 0.0,
        source=lambda xs: 0.0,
        boundary_data=boundary_data,
        value_range=(0.0, 1.0),
        layers=[(0, 1.0), (1, 1.0)],
    )


# -eps lap u + b . grad u + (3 + sin(2 pi x1 x2)) u = 1 - (x1 + x2)/2 on the L-shape


def _p2d_l(eps):
    return dict(
        domain=LShape(),
        convection=lambda xs: [
            -(1.0 + 0.5 * sin(TWO_PI * xs[0])),
            -(2.0 - cos(TWO_PI * xs[1])),
        ],
        reaction=lambda xs: 3.0 + sin(TWO_PI * xs[0] * xs[1]),
        source=lambda xs: 1.0 - 0.5 * (xs[0] + xs[1]),
        boundary_data=lambda xb: np.zeros(len(xb)),
        # f >= 0 and c >= 2, so 0 <= u <= max f / min c
        value_range=(0.0, 0.75),
        layers=[(0, 0.0), (0, 1.0), (1, 0.0), (1, -1.0)],
    )


# -eps lap u + div(b u) = 0, b = (1/2 - x2, x1 - 1/2), data on the slit


def _p2d_rot(eps, outer_bc=True):
    slit = Slit(at=0.5, lo=0.0, hi=0.5)

    def boundary_data(xb):
        xb = np.atleast_2d(xb)
        on_slit = slit.contains(xb)
        return np.where(on_slit, np.sin(TWO_PI * xb[:, 1]) ** 2, 0.0)

    return dict(
        domain=unit_square(),
        convection=lambda xs: [0.5 - xs[1], xs[0] - 0.5],
        reaction=lambda xs: 0.0,
        source=lambda xs: 0.0,
        divergence_form=True,
        # d(1/2 - x2)/dx1 + d(x1 - 1/2)/dx2
        divergence=lambda xs: 0.0,
        boundary_data=boundary_data,
        slit=slit,
        outer_bc=outer_bc,
        value_range=(0.0, 1.0),
    )


# -eps lap u + (1, 2, 1) . grad u = f on (0, 1)^3, u = 0 on the boundary


def _p3d(eps):
    def parts(xs):
        x1, x2, x3 = xs
        p = exp(-(1.0 - x1) / eps)
        f = exp(-x2 / eps)
        g = exp(-x3 / eps)
        om_p = one_minus_exp((1.0 - x1) / eps)
        om_f = one_minus_exp(x2 / eps)
        om_g = one_minus_exp(x3 / eps)
        w2, w3 = 1.0 - x2, 1.0 - x3
        X1 = sin(x1) * om_p
        X2 = w2 * w2 * om_f
        X3 = w3 * om_g
        # (-eps d^2 + b_k d) applied to each factor
        L1 = eps * sin(x1) * om_p + 2.0 * cos(x1) * p + cos(x1) * om_p
        L2 = (
            -2.0 * eps * om_f
            + 4.0 * w2 * f
            - 4.0 * w2 * om_f
            + 3.0 * w2 * w2 * (f / eps)
        )
        L3 = 2.0 * g - om_g + 2.0 * w3 * (g / eps)
        return (X1, X2, X3), (L1, L2, L3)

    def exact(xs):
        (X1, X2, X3), _ = parts(xs)
        return X1 * X2 * X3

    def source(xs):
        (X1, X2, X3), (L1, L2, L3) = parts(xs)
        return L1 * X2 * X3 + X1 * L2 * X3 + X1 * X2 * L3

    return dict(
        domain=unit_cube(),
        convection=lambda xs: [1.0, 2.0, 1.0],
        reaction=lambda xs: 0.0,
        source=source,
        exact=exact,
        manufactured=True,
        boundary_data=lambda xb: np.zeros(len(xb)),
        layers=[(0, 1.0), (1, 0.0), (2, 0.0)],
    )


_BUILDERS = {
    ProblemId.P1D: _p1d,
    ProblemId.P2D_BL: _p2d_bl,
    ProblemId.P2D_IL: _p2d_il,
    ProblemId.P2D_L: _p2d_l,
    ProblemId.P2D_ROT: _p2d_rot,
    ProblemId.P3D: _p3d,
}


def make_problem(problem_id, epsilon: float, rot_outer_bc: str = "dirichlet") -> PdeProblem:
    """Build a benchmark problem at diffusion coefficient `epsilon`"""
    pid = ProblemId.parse(problem_id)
    epsilon = float(epsilon)
    if not 0.0 < epsilon <= 1.0:
        raise ConfigurationError("epsilon must lie in (0, 1], got {}".format(epsilon))
    if pid is ProblemId.P2D_ROT:
        if rot_outer_bc not in ("dirichlet", "none"):
            raise ConfigurationError(
                "rot_outer_bc must be 'dirichlet' or 'none', got '{}'".format(rot_outer_bc)
            )
        parts = _p2d_rot(epsilon, outer_bc=rot_outer_bc == "dirichlet")
    else:
        parts = _BUILDERS[pid](epsilon)
    return PdeProblem(id=pid, epsilon=epsilon, **parts)


def residual(problem: PdeProblem, model, x):
    """Physical residual L u - f; a single point gives a float"""
    single = np.ndim(x) == 1
    r = problem.residual(model, np.atleast_2d(np.asarray(x, dtype=np.float64)))
    return float(r[0]) if single else r


def source_term(problem: PdeProblem, x):
    single = np.ndim(x) == 1
    f = np.broadcast_to(problem.source_term(np.atleast_2d(x)), (np.atleast_2d(x).shape[0],))
    return float(f[0]) if single else np.array(f)


def boundary_residual(problem: PdeProblem, model, x_b):
    single = np.ndim(x_b) == 1
    r = problem.boundary_residual(model, x_b)
    return float(r[0]) if single else r


def exact_solution(problem: PdeProblem, x):
    single = np.ndim(x) == 1
    u = problem.exact_solution(np.atleast_2d(x))
    return float(u[0]) if single else u
