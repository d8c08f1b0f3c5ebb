"""Map families and driving measures.

The built-in families:

* ``MoebiusDecay(alpha)`` -- h(x) = x / (1 + alpha x) on [0, 1], alpha >= 1.
  Compositions stay in the family: parameters add.
* ``PolynomialDecay(alpha)`` -- h(x) = x - x**alpha on [0, 1],
  alpha in [5/4, 3/2].
* ``Affine(slope, offset)`` on an interval.
* ``ProjectiveAction(A)`` -- f(x) = A x / ||A x|| on projective space for
  det A = 1, or the induced circle map through the half-angle chart when
  ``chart="circle"``.

A :class:`DrivingMeasure` is either a finite weighted family or a
parametric family with a parameter sampler.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spaces import Circle, Interval, Projective, StateSpace, canonical_direction, distance, grid
from .streams import SeededStream

__all__ = [
    "MoebiusDecay",
    "PolynomialDecay",
    "Affine",
    "ProjectiveAction",
    "MapDescriptor",
    "DrivingMeasure",
    "SingularDerivativeError",
    "sample_map",
    "apply_map",
    "derivative",
    "log_derivative",
    "gee_diameter_sup",
    "gee_diameter_c1",
]

_DERIVATIVE_FLOOR = 1e-300


class SingularDerivativeError(ValueError):
    """Raised when a log-derivative is requested at a critical point."""


@dataclass(frozen=True)
class MoebiusDecay:
    alpha: float

    def __post_init__(self):
        if self.alpha < 1.0:
            raise ValueError("MoebiusDecay needs alpha >= 1")


@dataclass(frozen=True)
class PolynomialDecay:
    alpha: float

    def __post_init__(self):
        if not 1.25 <= self.alpha <= 1.5:
            raise ValueError("PolynomialDecay needs alpha in [5/4, 3/2]")


@dataclass(frozen=True)
class Affine:
    slope: float
    offset: float


class ProjectiveAction:
    """Unit-determinant matrix acting on directions.

    chart="projective" acts on Projective(m) points (unit vectors);
    chart="circle" (m = 2 only) acts on the circle through theta |->
    angle(A (cos pi theta, sin pi theta)) / pi mod 1, turning hyperbolic
    SL(2, R) matrices into smooth circle maps.
    """

    def __init__(self, matrix, chart: str = "projective"):
        A = np.array(matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 2:
            raise ValueError("matrix must be square, size >= 2")
        if abs(np.linalg.det(A) - 1.0) > 1e-9:
            raise ValueError("matrix must have determinant 1")
        if chart not in ("projective", "circle"):
            raise ValueError(f"unknown chart {chart!r}")
        if chart == "circle" and A.shape[0] != 2:
            raise ValueError("circle chart needs a 2x2 matrix")
        self.matrix = A
        self.chart = chart
        self.m = A.shape[0]

    def __repr__(self):
        return f"ProjectiveAction({self.matrix.tolist()}, chart={self.chart!r})"

    def __eq__(self, other):
        return (
            isinstance(other, ProjectiveAction)
            and self.chart == other.chart
            and np.array_equal(self.matrix, other.matrix)
        )


MapDescriptor = MoebiusDecay | PolynomialDecay | Affine | ProjectiveAction


def _circle_direction(theta):
    u = np.pi * np.asarray(theta, dtype=float)
    return np.stack([np.cos(u), np.sin(u)], axis=-1)


def apply_map(f: MapDescriptor, x):
    """Image of x under f.  Broadcasts over arrays for 1-D families."""
    if isinstance(f, MoebiusDecay):
        x = np.asarray(x, dtype=float)
        return (x / (1.0 + f.alpha * x))[()]
    if isinstance(f, PolynomialDecay):
        x = np.asarray(x, dtype=float)
        return (x - x**f.alpha)[()]
    if isinstance(f, Affine):
        x = np.asarray(x, dtype=float)
        return (f.slope * x + f.offset)[()]
    if isinstance(f, ProjectiveAction):
        if f.chart == "circle":
            v = _circle_direction(x)
            w = v @ f.matrix.T
            theta = np.arctan2(w[..., 1], w[..., 0]) / np.pi
            return (theta % 1.0)[()]
        return canonical_direction(f.matrix @ np.asarray(x, dtype=float))
    raise TypeError(f"not a map descriptor: {f!r}")


def derivative(f: MapDescriptor, x):
    """Pointwise derivative of the 1-D (or circle-chart) realization of f."""
    if isinstance(f, MoebiusDecay):
        x = np.asarray(x, dtype=float)
        return (1.0 / (1.0 + f.alpha * x) ** 2)[()]
    if isinstance(f, PolynomialDecay):
        x = np.asarray(x, dtype=float)
        # limit 1 as x -> 0+ since alpha > 1
        with np.errstate(divide="ignore"):
            d = np.where(x > 0.0, 1.0 - f.alpha * x ** (f.alpha - 1.0), 1.0)
        return d[()]
    if isinstance(f, Affine):
        return np.broadcast_to(f.slope, np.shape(x))[()] + 0.0
    if isinstance(f, ProjectiveAction) and f.chart == "circle":
        # angle-chart derivative of an SL(2,R) projective action:
        # d(theta') / d(theta) = det A / ||A v||^2 = 1 / ||A v||^2
        v = _circle_direction(x)
        w = v @ f.matrix.T
        return (1.0 / np.sum(w * w, axis=-1))[()]
    raise TypeError(f"{f!r} has no one-dimensional derivative")


def log_derivative(f: MapDescriptor, x):
    """log |f'(x)| for 1-D kinds; log ||A x|| for the projective norm cocycle."""
    if isinstance(f, ProjectiveAction) and f.chart == "projective":
        return float(np.log(np.linalg.norm(f.matrix @ np.asarray(x, dtype=float))))
    d = np.abs(derivative(f, x))
    if np.any(d < _DERIVATIVE_FLOOR):
        raise SingularDerivativeError(f"vanishing derivative of {f!r}")
    return np.log(d)[()]


@dataclass(frozen=True)
class DrivingMeasure:
    """Law of one random map draw.

    Exactly one of ``atoms`` (finite support: list of (map, weight)) or
    ``family``/``sampler`` (parametric support) is set.  Samplers are
    ("uniform", lo, hi) or ("discrete", values, weights).
    """

    atoms: tuple | None = None
    family: str | None = None  # "moebius" | "polynomial"
    sampler: tuple | None = None

    def __post_init__(self):
        if (self.atoms is None) == (self.family is None):
            raise ValueError("specify either atoms or a parametric family")
        if self.atoms is not None:
            atoms = tuple((m, float(w)) for m, w in self.atoms)
            if not atoms:
                raise ValueError("finite driving measure needs at least one atom")
            if any(w <= 0 for _, w in atoms):
                raise ValueError("atom weights must be positive")
            if abs(sum(w for _, w in atoms) - 1.0) > 1e-12:
                raise ValueError("atom weights must sum to 1")
            object.__setattr__(self, "atoms", atoms)
        else:
            if self.family not in ("moebius", "polynomial"):
                raise ValueError(f"unknown parametric family {self.family!r}")
            lo, hi = self._param_range()
            vlo, vhi = (1.0, np.inf) if self.family == "moebius" else (1.25, 1.5)
            if lo < vlo or hi > vhi:
                raise ValueError("sampler range outside the family's parameter set")

    def _param_range(self):
        kind = self.sampler[0]
        if kind == "uniform":
            return float(self.sampler[1]), float(self.sampler[2])
        if kind == "discrete":
            values = np.asarray(self.sampler[1], dtype=float)
            return float(values.min()), float(values.max())
        raise ValueError(f"unknown sampler kind {kind!r}")

    @property
    def finite(self) -> bool:
        return self.atoms is not None

    def make_map(self, param: float) -> MapDescriptor:
        if self.family == "moebius":
            return MoebiusDecay(param)
        return PolynomialDecay(param)

    def sample_params(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Vectorized parameter draws (parametric measures only)."""
        kind = self.sampler[0]
        if kind == "uniform":
            return rng.uniform(self.sampler[1], self.sampler[2], size=size)
        values = np.asarray(self.sampler[1], dtype=float)
        weights = np.asarray(self.sampler[2], dtype=float)
        return rng.choice(values, size=size, p=weights / weights.sum())

    def sample_indices(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Vectorized atom-index draws (finite measures only)."""
        weights = np.array([w for _, w in self.atoms])
        return rng.choice(len(self.atoms), size=size, p=weights)

    def support_maps(self, param_grid=None) -> list:
        """The support as a finite list of maps.  Parametric measures need
        a finite parameter discretization."""
        if self.finite:
            return [m for m, _ in self.atoms]
        if param_grid is None:
            raise ValueError("parametric support needs an explicit parameter grid")
        return [self.make_map(p) for p in param_grid]


def sample_map(nu: DrivingMeasure, stream_or_rng) -> MapDescriptor:
    """One map draw, consuming the stream."""
    rng = stream_or_rng.generator() if isinstance(stream_or_rng, SeededStream) else stream_or_rng
    if nu.finite:
        return nu.atoms[int(nu.sample_indices(rng, 1)[0])][0]
    return nu.make_map(float(nu.sample_params(rng, 1)[0]))


def gee_diameter_sup(
    nu: DrivingMeasure, space: StateSpace, resolution: int, param_grid=None
) -> float:
    """Grid lower bound for the sup-metric diameter of the support:
    max over map pairs of max over grid points of d(f(x), g(x))."""
    maps = nu.support_maps(param_grid)
    pts = grid(space, resolution)
    best = 0.0
    if isinstance(space, Projective):
        images = [[apply_map(f, p) for p in pts] for f in maps]
        for i in range(len(maps)):
            for j in range(i + 1, len(maps)):
                for u, v in zip(images[i], images[j]):
                    best = max(best, float(distance(space, u, v)))
        return best
    images = [apply_map(f, pts) for f in maps]
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            best = max(best, float(np.max(distance(space, images[i], images[j]))))
    return best


def gee_diameter_c1(
    nu: DrivingMeasure, space: StateSpace, resolution: int, param_grid=None
) -> float:
    """Grid lower bound for the C1-type diameter:
    max over pairs of max over x of d(f(x), g(x)) + |f'(x) - g'(x)|."""
    if isinstance(space, Projective):
        raise ValueError("C1 diameter is defined for 1-D and circle families")
    maps = nu.support_maps(param_grid)
    pts = grid(space, resolution)
    images = [apply_map(f, pts) for f in maps]
    derivs = [np.broadcast_to(derivative(f, pts), pts.shape) for f in maps]
    best = 0.0
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            vals = distance(space, images[i], images[j]) + np.abs(derivs[i] - derivs[j])
            best = max(best, float(np.max(vals)))
    return best


def space_of(f: MapDescriptor) -> StateSpace:
    """Natural state space of a map descriptor."""
    if isinstance(f, (MoebiusDecay, PolynomialDecay)):
        return Interval(0.0, 1.0)
    if isinstance(f, ProjectiveAction):
        return Circle() if f.chart == "circle" else Projective(f.m)
    raise ValueError(f"{f!r} has no canonical space; supply one explicitly")
