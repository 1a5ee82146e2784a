"""Computational domains

Every domain answers interior membership, samples its interior and its
boundary (boundary points are constructed on the boundary, never
projected), and lays out regular grids for prediction artifacts.
"""
from abc import ABC, abstractmethod
from typing import List, Tuple

import numpy as np

BOUNDARY_TOL = 1e-12


class Domain(ABC):
    """Open bounded set in R^d"""

    name = "domain"

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = np.asarray(hi, dtype=np.float64)

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def in_box(self, x, tol=0.0) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.all((x > self.lo - tol) & (x < self.hi + tol), axis=1)

    @abstractmethod
    def contains(self, x) -> np.ndarray:
        """True for points strictly inside the domain"""

    @abstractmethod
    def on_boundary(self, x, tol=BOUNDARY_TOL) -> np.ndarray:
        pass

    @abstractmethod
    def sample_boundary(self, rng: np.random.Generator, n: int) -> np.ndarray:
        pass

    def sample_interior(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """i.i.d. uniform points, by rejection from the bounding box"""
        out, have = [], 0
        while have < n:
            batch = rng.uniform(self.lo, self.hi, size=(max(2 * (n - have), 16), self.dim))
            batch = batch[self.contains(batch)]
            out.append(batch)
            have += batch.shape[0]
        return np.concatenate(out)[:n]

    def measure(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def grid(self, resolution: int) -> np.ndarray:
        """Regular grid over the closure, points outside it dropped"""
        axes = [np.linspace(l, h, resolution) for l, h in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=1)
        keep = self.contains(points) | self.on_boundary(points, tol=1e-12)
        return points[keep]

    def clamp(self, x) -> np.ndarray:
        """Pull points into the bounding box, just inside its faces"""
        margin = 1e-9 * (self.hi - self.lo)
        return np.clip(x, self.lo + margin, self.hi - margin)

    def __repr__(self):
        return "{}(lo={}, hi={})".format(self.__class__.__name__, self.lo, self.hi)


class Interval(Domain):
    name = "interval"

    def __init__(self, a=0.0, b=1.0):
        super().__init__([a], [b])

    def contains(self, x):
        return self.in_box(np.reshape(x, (-1, 1)))

    def on_boundary(self, x, tol=BOUNDARY_TOL):
        x = np.reshape(x, (-1, 1))[:, 0]
        return (np.abs(x - self.lo[0]) <= tol) | (np.abs(x - self.hi[0]) <= tol)

    def sample_boundary(self, rng, n):
        # the two end points, alternating
        ends = np.array([self.lo[0], self.hi[0]])
        return np.resize(ends, n).reshape(-1, 1)


class Box(Domain):
    """Axis-aligned box; unit square and unit cube"""

    def __init__(self, lo, hi):
        super().__init__(lo, hi)
        self.name = {2: "unit_square", 3: "unit_cube"}.get(self.dim, "box")

    def contains(self, x):
        return self.in_box(x)

    def on_boundary(self, x, tol=BOUNDARY_TOL):
        x = np.atleast_2d(x)
        closed = np.all((x >= self.lo - tol) & (x <= self.hi + tol), axis=1)
        face = np.any((np.abs(x - self.lo) <= tol) | (np.abs(x - self.hi) <= tol), axis=1)
        return closed & face

    def _faces(self) -> List[Tuple[int, float, float]]:
        """(axis, fixed value, face measure) for the 2d faces"""
        side = self.hi - self.lo
        faces = []
        for axis in range(self.dim):
            area = float(np.prod(np.delete(side, axis)))
            faces.append((axis, self.lo[axis], area))
            faces.append((axis, self.hi[axis], area))
        return faces

    def sample_boundary(self, rng, n):
        faces = self._faces()
        weights = np.array([f[2] for f in faces])
        which = rng.choice(len(faces), size=n, p=weights / weights.sum())
        points = rng.uniform(self.lo, self.hi, size=(n, self.dim))
        for i, (axis, value, _) in enumerate(faces):
            points[which == i, axis] = value
        return points


class LShape(Domain):
    """(-1, 1)^2 minus the closed lower-left quadrant [-1, 0]^2"""

    name = "l_shape"

    # counter-clockwise polygon
    VERTICES = np.array(
        [[0.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, 0.0], [0.0, 0.0]]
    )

    def __init__(self):
        super().__init__([-1.0, -1.0], [1.0, 1.0])

    def contains(self, x):
        x = np.atleast_2d(x)
        notch = (x[:, 0] <= 0.0) & (x[:, 1] <= 0.0)
        return self.in_box(x) & ~notch

    def measure(self):
        return 3.0

    def _edges(self):
        start = self.VERTICES
        end = np.roll(self.VERTICES, -1, axis=0)
        return start, end, np.linalg.norm(end - start, axis=1)

    def on_boundary(self, x, tol=BOUNDARY_TOL):
        x = np.atleast_2d(x)
        start, end, length = self._edges()
        hit = np.zeros(x.shape[0], dtype=bool)
        for a, b, ell in zip(start, end, length):
            t = np.clip((x - a) @ (b - a) / ell ** 2, 0.0, 1.0)
            dist = np.linalg.norm(x - (a + t[:, None] * (b - a)), axis=1)
            hit |= dist <= tol
        return hit

    def sample_boundary(self, rng, n):
        start, end, length = self._edges()
        which = rng.choice(len(length), size=n, p=length / length.sum())
        t = rng.uniform(0.0, 1.0, size=n)
        points = start[which] + t[:, None] * (end[which] - start[which])
        # edges are axis aligned: pin the constant coordinate exactly
        for i, (a, b) in enumerate(zip(start, end)):
            mask = which == i
            axis = 0 if a[0] == b[0] else 1
            points[mask, axis] = a[axis]
        return points

    def clamp(self, x):
        x = super().clamp(x)
        # points pushed into the notch go back across its nearer edge
        notch = (x[:, 0] <= 0.0) & (x[:, 1] <= 0.0)
        if np.any(notch):
            flip = notch & (x[:, 0] > x[:, 1])
            x[flip, 0] = 1e-9
            x[notch & ~flip, 1] = 1e-9
        return x


class Slit:
    """Segment {x1 = at} x [lo, hi] carrying Dirichlet data inside the domain"""

    def __init__(self, at=0.5, lo=0.0, hi=0.5):
        self.at, self.lo, self.hi = at, lo, hi

    def contains(self, x, tol=BOUNDARY_TOL) -> np.ndarray:
        x = np.atleast_2d(x)
        return (
            (np.abs(x[:, 0] - self.at) <= tol)
            & (x[:, 1] >= self.lo - tol)
            & (x[:, 1] <= self.hi + tol)
        )

    def sample(self, rng, n) -> np.ndarray:
        return np.stack(
            [np.full(n, self.at), rng.uniform(self.lo, self.hi, size=n)], axis=1
        )


def unit_interval():
    return Interval(0.0, 1.0)


def unit_square():
    return Box([0.0, 0.0], [1.0, 1.0])


def unit_cube():
    return Box([0.0, 0.0, 0.0], [1.0, 1.0, 1.0])
