"""Trajectory simulation, coupled multi-start runs, matrix products, and an
exact enumeration oracle over length-n words of a finite driving measure.

Composition is on the left: step k applies the k-th drawn map to the
current state, realizing f_n o ... o f_1.  The reversed product
f_1 o ... o f_n is available through :func:`compose_reversed` given a
recorded word.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .maps import (
    DrivingMeasure,
    MapDescriptor,
    ProjectiveAction,
    apply_map,
    log_derivative,
    space_of,
)
from .spaces import StateSpace, distance
from .streams import SeededStream

__all__ = [
    "Trajectory",
    "MatrixProduct",
    "WordTable",
    "EnumerationGuardError",
    "simulate",
    "simulate_coupled",
    "matrix_product",
    "word_table",
    "enumerate_expectation",
    "draw_word",
    "word_maps",
]

ENUMERATION_GUARD = 10_000_000


class EnumerationGuardError(RuntimeError):
    """Word table would exceed the enumeration size guard."""


@dataclass
class Trajectory:
    space: StateSpace
    points: np.ndarray  # (n+1,) floats or (n+1, m) unit vectors
    log_derivative_sum: np.ndarray | None = None  # cumulative, length n
    map_ids: list | None = None  # drawn atom indices or parameters

    @property
    def n(self) -> int:
        return len(self.points) - 1


@dataclass
class MatrixProduct:
    matrix: np.ndarray
    n: int


def _as_rng(stream) -> np.random.Generator:
    return stream.generator() if isinstance(stream, SeededStream) else stream


def draw_word(nu: DrivingMeasure, stream, n: int) -> np.ndarray:
    """Draw the n map labels of one realization: atom indices for finite
    measures, raw parameters for parametric ones."""
    rng = _as_rng(stream)
    if n == 0:
        return np.empty(0, dtype=int if nu.finite else float)
    if nu.finite:
        return nu.sample_indices(rng, n)
    return nu.sample_params(rng, n)


def word_maps(nu: DrivingMeasure, word) -> list[MapDescriptor]:
    if nu.finite:
        return [nu.atoms[int(i)][0] for i in word]
    return [nu.make_map(float(p)) for p in word]


def _resolve_space(nu: DrivingMeasure, space: StateSpace | None) -> StateSpace:
    if space is not None:
        return space
    probe = nu.atoms[0][0] if nu.finite else nu.make_map(nu._param_range()[0])
    return space_of(probe)


def simulate(
    nu: DrivingMeasure,
    x0,
    n: int,
    stream,
    record_log_derivative: bool = False,
    record_maps: bool = False,
    space: StateSpace | None = None,
) -> Trajectory:
    """Run the chain n steps from x0 under one realization of the noise."""
    return simulate_coupled(
        nu,
        [x0],
        n,
        stream,
        record_log_derivative=record_log_derivative,
        record_maps=record_maps,
        space=space,
    )[0]


def simulate_coupled(
    nu: DrivingMeasure,
    starts,
    n: int,
    stream,
    record_log_derivative: bool = False,
    record_maps: bool = False,
    space: StateSpace | None = None,
) -> list[Trajectory]:
    """Draw ONE map sequence and run it from every start, so trajectories
    differ only through their starting point."""
    if n < 0:
        raise ValueError("n must be >= 0")
    space = _resolve_space(nu, space)
    word = draw_word(nu, stream, n)
    maps = word_maps(nu, word)

    out = []
    for x0 in starts:
        pts = [np.asarray(x0, dtype=float) if np.ndim(x0) else float(x0)]
        logs = [] if record_log_derivative else None
        acc = 0.0
        for f in maps:
            x = pts[-1]
            if record_log_derivative:
                acc += float(log_derivative(f, x))
                logs.append(acc)
            pts.append(apply_map(f, x))
        points = np.array(pts)
        out.append(
            Trajectory(
                space=space,
                points=points,
                log_derivative_sum=np.array(logs) if record_log_derivative else None,
                map_ids=list(word) if record_maps else None,
            )
        )
    return out


def matrix_product(nu: DrivingMeasure, n: int, stream) -> MatrixProduct:
    """Left product A_n ... A_1 of n matrix draws from a projective family."""
    if not nu.finite or not all(isinstance(m, ProjectiveAction) for m, _ in nu.atoms):
        raise ValueError("matrix products need a finite measure over ProjectiveAction")
    dims = {m.m for m, _ in nu.atoms}
    if len(dims) != 1:
        raise ValueError("atoms must share the matrix dimension")
    m = dims.pop()
    word = draw_word(nu, stream, n)
    prod = np.eye(m)
    for i in word:
        prod = nu.atoms[int(i)][0].matrix @ prod
    return MatrixProduct(matrix=prod, n=n)


@dataclass
class WordTable:
    words: list  # tuples of atom indices
    probs: np.ndarray

    def __len__(self):
        return len(self.words)


def word_table(nu: DrivingMeasure, n: int) -> WordTable:
    if not nu.finite:
        raise ValueError("word enumeration needs a finite driving measure")
    k = len(nu.atoms)
    if k**n > ENUMERATION_GUARD:
        raise EnumerationGuardError(f"{k}^{n} words exceed the enumeration guard")
    weights = np.array([w for _, w in nu.atoms])
    words = list(itertools.product(range(k), repeat=n))
    probs = np.array([math.prod(weights[i] for i in word) for word in words])
    return WordTable(words=words, probs=probs)


def enumerate_expectation(nu: DrivingMeasure, n: int, functional) -> float:
    """Exact expectation of a per-word functional over all length-n words.

    ``functional`` receives the word's map list (in application order
    f_1, ..., f_n).
    """
    table = word_table(nu, n)
    total = 0.0
    for word, p in zip(table.words, table.probs):
        total += p * float(functional([nu.atoms[i][0] for i in word]))
    return total


def coupled_distance(space: StateSpace, maps, x, y, k: int | None = None) -> float:
    """d(X_k^x, X_k^y) along one explicit word (k defaults to the full word)."""
    if k is None:
        k = len(maps)
    for f in maps[:k]:
        x = apply_map(f, x)
        y = apply_map(f, y)
    return float(distance(space, x, y))


def compose_reversed(maps, x):
    """Apply f_1 o ... o f_n, i.e. the last drawn map acts first."""
    for f in reversed(maps):
        x = apply_map(f, x)
    return x
