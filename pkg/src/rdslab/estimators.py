"""Observables and statistical estimators along random orbits.

Monte Carlo loops are vectorized across trials for the one-dimensional
families; every trial (or fixed-size trial chunk) owns its own stream, so
results do not depend on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chains import Trajectory, draw_word, simulate_coupled, word_maps
from .maps import DrivingMeasure, ProjectiveAction, apply_map, derivative
from .measures import EmpiricalMeasure, kantorovich_circle, kantorovich_interval
from .observables import Observable
from .spaces import Circle, Interval, Projective, RegionSet, StateSpace, circle_delta, distance, grid
from .streams import SeededStream

__all__ = [
    "LambdaEstimate",
    "CorrelationSum",
    "Sigma2Estimate",
    "StationaryApprox",
    "pair_distance_profile",
    "lambda_n",
    "birkhoff_average",
    "empirical_measure",
    "log_averaged_measure",
    "sigma2_estimate",
    "phi0",
    "correlation_sum",
    "correlation_dimension",
    "synchronization",
    "lyapunov_1d",
    "lyapunov_projective",
    "nonexpansive_fixed_points",
    "stationary_approx",
    "correlation_coefficient_pj",
]

TRIAL_CHUNK = 128


# ---------------------------------------------------------------------------
# vectorized 1-D stepping


def _vector_step(nu: DrivingMeasure, labels: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Advance states one step; labels hold the per-trial map draw and X has
    shape (trials, ...) with trials matching labels."""
    if nu.finite:
        out = np.empty_like(X)
        for idx, (m, _) in enumerate(nu.atoms):
            mask = labels == idx
            if np.any(mask):
                out[mask] = apply_map(m, X[mask])
        return out
    a = labels.reshape(labels.shape + (1,) * (X.ndim - 1))
    if nu.family == "moebius":
        return X / (1.0 + a * X)
    return X - X**a


def _pair_distances(space: StateSpace, X: np.ndarray) -> np.ndarray:
    """All pairwise distances of 1-D states, shape (..., G, G)."""
    D = np.abs(X[..., :, None] - X[..., None, :])
    if isinstance(space, Circle):
        D %= 1.0
        np.minimum(D, 1.0 - D, out=D)
    return D


def _require_1d(space: StateSpace):
    if isinstance(space, Projective):
        raise ValueError("vectorized estimators support interval and circle spaces")


# ---------------------------------------------------------------------------
# coupled pair profiles and the contraction functional


def pair_distance_profile(
    nu: DrivingMeasure,
    space: StateSpace,
    x: float,
    y: float,
    n: int,
    trials: int,
    seed: int | SeededStream,
):
    """Means and standard errors of d(X_k^x, X_k^y), k = 0..n, under
    coupled noise.  The k = 0 entry is exact."""
    _require_1d(space)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    stream = seed if isinstance(seed, SeededStream) else SeededStream(seed)
    rng = stream.generator()
    X = np.full(trials, float(x))
    Y = np.full(trials, float(y))
    means = np.empty(n + 1)
    errs = np.empty(n + 1)
    means[0], errs[0] = float(distance(space, x, y)), 0.0
    for k in range(1, n + 1):
        labels = draw_word(nu, rng, trials)
        X = _vector_step(nu, labels, X)
        Y = _vector_step(nu, labels, Y)
        d = np.abs(X - Y)
        if isinstance(space, Circle):
            d %= 1.0
            np.minimum(d, 1.0 - d, out=d)
        means[k] = d.mean()
        errs[k] = d.std(ddof=1) / np.sqrt(trials) if trials > 1 else 0.0
    return list(zip(means, errs))


@dataclass
class LambdaEstimate:
    """Grid-max Monte Carlo estimate of the coupled contraction sum."""

    value: float
    stderr: float
    argmax_pair: tuple
    table: np.ndarray
    table_stderr: np.ndarray
    resolution: int
    trials: int
    n: int
    diverged: bool = False
    grid_lower_bound: bool = True  # suprema are approximated from below


def _pair_sum_stats(nu, space, starts, n, trials, stream, chunk=TRIAL_CHUNK):
    """Per-pair mean and stderr of sum_{k=0}^n d(X_k^x, X_k^y) over a common
    grid of starts, trials chunked with independent streams per chunk."""
    G = len(starts)
    base = _pair_distances(space, np.asarray(starts, dtype=float))
    total = np.zeros((G, G))
    total_sq = np.zeros((G, G))
    done = 0
    chunk_idx = 0
    while done < trials:
        c = min(chunk, trials - done)
        rng = stream.substream(chunk_idx).generator()
        X = np.tile(np.asarray(starts, dtype=float), (c, 1))
        S = np.tile(base, (c, 1, 1))
        # one draw per step keeps the n-step word a prefix of the
        # (n+1)-step word at fixed seed, so the estimate is pathwise
        # nondecreasing in n
        for _ in range(n):
            X = _vector_step(nu, draw_word(nu, rng, c), X)
            S += _pair_distances(space, X)
        total += S.sum(axis=0)
        total_sq += np.square(S).sum(axis=0)
        done += c
        chunk_idx += 1
    mean = total / trials
    var = np.maximum(0.0, total_sq / trials - mean * mean)
    stderr = np.sqrt(var / trials) if trials > 1 else np.zeros_like(mean)
    return mean, stderr


def lambda_n(
    nu: DrivingMeasure,
    space: StateSpace,
    n: int,
    trials: int,
    seed: int | SeededStream,
    resolution: int = 64,
    region: RegionSet | None = None,
    ceiling: float | None = None,
) -> LambdaEstimate:
    """Maximum over grid pairs of the Monte Carlo mean of
    sum_{k=0}^n d(X_k^x, X_k^y).

    With ``region`` set, pairs are confined to each piece and the outer
    maximum runs over pieces.  The reported value is a grid lower bound of
    the underlying supremum.
    """
    _require_1d(space)
    stream = seed if isinstance(seed, SeededStream) else SeededStream(seed)
    if region is not None:
        grids = [g for g in region.grids]
    else:
        grids = [grid(space, resolution)]
    if any(len(g) == 0 for g in grids) or not grids:
        raise ValueError("empty grid")

    best = None
    for piece_idx, starts in enumerate(grids):
        mean, stderr = _pair_sum_stats(nu, space, starts, n, trials, stream.substream(piece_idx))
        flat = int(np.argmax(mean))
        i, j = np.unravel_index(flat, mean.shape)
        cand = (float(mean[i, j]), float(stderr[i, j]),
                (float(starts[i]), float(starts[j])), mean, stderr)
        if best is None or cand[0] > best[0]:
            best = cand
    value, err, pair, table, table_err = best
    return LambdaEstimate(
        value=value,
        stderr=err,
        argmax_pair=pair,
        table=table,
        table_stderr=table_err,
        resolution=len(grids[0]),
        trials=trials,
        n=n,
        diverged=ceiling is not None and value > ceiling,
    )


# ---------------------------------------------------------------------------
# Birkhoff sums, empirical and log-averaged measures


def birkhoff_average(traj: Trajectory, h: Observable) -> float:
    """Time average of h over the first n orbit points."""
    if traj.n < 1:
        raise ValueError("trajectory must have at least one step")
    return float(np.mean(h(traj.points[:-1])))


def empirical_measure(traj: Trajectory) -> EmpiricalMeasure:
    """Equal-weight atoms at the first n orbit points."""
    return EmpiricalMeasure.from_samples(traj.space, traj.points[:-1])


def _log_weights(n: int) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1)
    return w / w.sum()


def log_averaged_measure(
    nu: DrivingMeasure,
    space: StateSpace,
    x0: float,
    n: int,
    h: Observable,
    stream,
) -> EmpiricalMeasure:
    """Log-weighted measure of scaled Birkhoff sums: atoms S_k / sqrt(k)
    with weights proportional to 1/k, k = 1..n."""
    traj = simulate_coupled(nu, [x0], n - 1, stream, space=space)[0]
    return log_averaged_measure_from_values(h(traj.points), n)


def log_averaged_measure_from_values(values: np.ndarray, n: int) -> EmpiricalMeasure:
    """Same, from precomputed per-step observable values h(X_0..X_{n-1})."""
    values = np.asarray(values, dtype=float)[:n]
    if len(values) < n or n < 1:
        raise ValueError("need n observable values")
    k = np.arange(1, n + 1)
    scaled = np.cumsum(values) / np.sqrt(k)
    return EmpiricalMeasure(None, scaled, _log_weights(n))


@dataclass
class Sigma2Estimate:
    value: float
    stderr: float
    centering_offset: float  # mean of h under the eta sample, subtracted


def sigma2_estimate(
    nu: DrivingMeasure,
    space: StateSpace,
    n: int,
    trials: int,
    eta_sample: EmpiricalMeasure,
    h: Observable,
    seed: int | SeededStream,
) -> Sigma2Estimate:
    """Monte Carlo limit-variance estimate: (1/n) E_eta[ S_n(h_centered)^2 ],
    starts drawn from the eta sample and h centered by its eta-sample mean."""
    _require_1d(space)
    stream = seed if isinstance(seed, SeededStream) else SeededStream(seed)
    rng = stream.generator()
    offset = float(np.sum(eta_sample.weights * h(eta_sample.positions)))
    X = rng.choice(eta_sample.positions, size=trials, p=eta_sample.weights)
    S = np.zeros(trials)
    for _ in range(n):
        S += h(X) - offset
        labels = draw_word(nu, rng, trials)
        X = _vector_step(nu, labels, X)
    sq = S * S / n
    return Sigma2Estimate(
        value=float(sq.mean()),
        stderr=float(sq.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0,
        centering_offset=offset,
    )


# ---------------------------------------------------------------------------
# correlation sums and dimension


def phi0(y):
    """Piecewise-linear Lipschitz approximation to the Heaviside step:
    0 below -1/2, affine on [-1/2, 1/2], 1 above.  L = 1, sup = 1."""
    y = np.asarray(y, dtype=float)
    return np.clip(y + 0.5, 0.0, 1.0)[()]


@dataclass
class CorrelationSum:
    n: int
    epsilon: float
    kernel: str
    value: float


def _pairwise_dist_matrix(space, points):
    points = np.asarray(points, dtype=float)
    if isinstance(space, Projective):
        dot = np.abs(points @ points.T)
        np.clip(dot, 0.0, 1.0, out=dot)
        return np.sqrt(np.maximum(0.0, 1.0 - dot * dot))
    return _pair_distances(space, points)


def correlation_sum(space, points, epsilon: float, kernel="heaviside") -> CorrelationSum:
    """(1/n^2) sum over ordered pairs i != j of the kernel response.

    heaviside counts d <= epsilon (ties included); a callable kernel phi is
    evaluated at 1 - d/epsilon.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n < 2:
        raise ValueError("need at least two points")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    D = _pairwise_dist_matrix(space, points)
    if kernel == "heaviside":
        K = (D <= epsilon).astype(float)
        name = "heaviside"
    else:
        K = np.asarray(kernel(1.0 - D / epsilon), dtype=float)
        name = getattr(kernel, "__name__", "smoothed")
    np.fill_diagonal(K, 0.0)
    return CorrelationSum(n=n, epsilon=epsilon, kernel=name, value=float(K.sum()) / n**2)


class CorrelationDimensionError(RuntimeError):
    pass


def _correlation_sums_chunked(space, points, epsilons, kernel, chunk=512):
    """K values for several epsilons without materializing the full pair
    matrix; diagonal (i = j) contributions are removed."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    sums = np.zeros(len(epsilons))
    for lo in range(0, n, chunk):
        block = points[lo : lo + chunk]
        if isinstance(space, Projective):
            dot = np.abs(block @ points.T)
            np.clip(dot, 0.0, 1.0, out=dot)
            D = np.sqrt(np.maximum(0.0, 1.0 - dot * dot))
        else:
            D = np.abs(block[:, None] - points[None, :])
            if isinstance(space, Circle):
                D %= 1.0
                np.minimum(D, 1.0 - D, out=D)
        for e_idx, eps in enumerate(epsilons):
            if kernel == "heaviside":
                sums[e_idx] += np.count_nonzero(D <= eps)
            else:
                sums[e_idx] += float(np.sum(kernel(1.0 - D / eps)))
    diag = float(n) if kernel == "heaviside" else float(n) * float(kernel(1.0))
    return (sums - diag) / n**2


def correlation_dimension(space, points, epsilon_ladder, kernel=phi0):
    """Least-squares log-log slope of the smoothed correlation sum along a
    decreasing epsilon ladder.  Zero rungs are dropped; fewer than three
    survivors is an error.

    Returns (slope, intercept, table) with per-rung (epsilon, K) rows.
    """
    ladder = [float(e) for e in epsilon_ladder]
    if len(ladder) < 3 or any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly decreasing with >= 3 rungs")
    K = _correlation_sums_chunked(space, points, ladder, kernel)
    table = list(zip(ladder, K))
    keep = K > 0
    if keep.sum() < 3:
        raise CorrelationDimensionError("fewer than 3 rungs with positive correlation sum")
    eps = np.array(ladder)[keep]
    slope, intercept = np.polyfit(np.log(eps), np.log(K[keep]), 1)
    return float(slope), float(intercept), table


# ---------------------------------------------------------------------------
# synchronization and Lyapunov estimators


def synchronization(nu: DrivingMeasure, space, x, B, n: int, stream) -> float:
    """Best coupled time-averaged tracking distance between the orbit of x
    and orbits started in the finite candidate set B."""
    B = list(B)
    if not B:
        raise ValueError("candidate set B must be nonempty")
    trajs = simulate_coupled(nu, [x] + B, n - 1, stream, space=space)
    ref = trajs[0].points
    best = np.inf
    for t in trajs[1:]:
        avg = float(np.mean(distance(space, ref, t.points)))
        best = min(best, avg)
    return best


def lyapunov_1d(traj: Trajectory) -> float:
    """Finite-time exponent (1/n) log |G_n'(x0)| from the recorded chain-rule
    sums."""
    if traj.log_derivative_sum is None:
        raise ValueError("trajectory lacks a log-derivative record")
    n = traj.n
    return float(traj.log_derivative_sum[-1]) / n


def lyapunov_projective(nu: DrivingMeasure, x, n: int, stream, qr_period: int = 32):
    """Finite-time rates of a matrix cocycle.

    vector_rate: (1/n) log ||A_n x|| accumulated incrementally in log space.
    norm_rate: (1/n) log of the spectral norm of the full product, kept
    readable by periodic QR re-factorization with the scale split off.
    """
    if not nu.finite or not all(isinstance(m, ProjectiveAction) for m, _ in nu.atoms):
        raise ValueError("projective Lyapunov needs a finite ProjectiveAction measure")
    m = nu.atoms[0][0].m
    v = np.asarray(x, dtype=float)
    if v.shape != (m,):
        raise ValueError("start vector dimension mismatch")
    v = v / np.linalg.norm(v)
    word = draw_word(nu, stream, n)
    acc = 0.0
    Z = np.eye(m)
    log_scale = 0.0
    for step, idx in enumerate(word, start=1):
        A = nu.atoms[int(idx)][0].matrix
        w = A @ v
        r = np.linalg.norm(w)
        acc += np.log(r)
        v = w / r
        Z = A @ Z
        if step % qr_period == 0:
            Q, R = np.linalg.qr(Z)
            scale = np.max(np.abs(np.diag(R)))
            log_scale += np.log(scale)
            Z = Q @ (R / scale)
    norm_rate = (log_scale + np.log(np.linalg.norm(Z, 2))) / n if n > 0 else 0.0
    vector_rate = acc / n if n > 0 else 0.0
    return float(vector_rate), float(norm_rate)


# ---------------------------------------------------------------------------
# non-expansive fixed points of the composed circle map


def _composed_circle(maps, theta, order: str):
    seq = list(reversed(maps)) if order == "reversed" else list(maps)
    deriv = np.ones_like(np.asarray(theta, dtype=float))
    for f in seq:
        deriv = deriv * derivative(f, theta)
        theta = apply_map(f, theta)
    return theta, deriv


def nonexpansive_fixed_points(
    nu: DrivingMeasure,
    n: int,
    stream,
    resolution: int = 4096,
    order: str = "reversed",
    multiplier_slack: float = 1e-9,
    root_tol: float = 1e-10,
):
    """Fixed points of the composed circle map with |derivative| <= 1.

    order selects the composition direction of the drawn word: "reversed"
    applies the last draw first (the product whose derivative appears in
    the fixed-point analysis), "forward" the usual chain order.

    Returns a list of (point, multiplier) pairs; empty when the composed
    map has no non-expansive fixed point.
    """
    if order not in ("forward", "reversed"):
        raise ValueError("order must be 'forward' or 'reversed'")
    word = draw_word(nu, stream, n)
    maps = word_maps(nu, word)

    def displacement(theta):
        g, _ = _composed_circle(maps, theta, order)
        return circle_delta(theta, g)

    thetas = np.arange(resolution) / resolution
    disp = np.atleast_1d(displacement(thetas))

    if np.max(np.abs(disp)) < 1e-12:
        _, derivs = _composed_circle(maps, thetas, order)
        return [(float(t), float(d)) for t, d in zip(thetas, np.atleast_1d(derivs))]

    roots = []
    for i in range(resolution):
        j = (i + 1) % resolution
        a, b = thetas[i], thetas[i] + 1.0 / resolution
        fa, fb = disp[i], disp[j]
        if abs(fa) < 1e-15:
            roots.append(float(a % 1.0))
            continue
        if fa * fb >= 0 or abs(fa - fb) > 0.5:  # same sign, or a wrap artifact
            continue
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = float(displacement(mid % 1.0))
            if fa * fm <= 0:
                b, fb = mid, fm
            else:
                a, fa = mid, fm
            if b - a < root_tol:
                break
        roots.append(float((0.5 * (a + b)) % 1.0))

    out = []
    for r in roots:
        _, d = _composed_circle(maps, r, order)
        mult = float(np.abs(d))
        if mult <= 1.0 + multiplier_slack:
            out.append((r, float(d)))
    return out


# ---------------------------------------------------------------------------
# stationary measure and correlation coefficients


@dataclass
class StationaryApprox:
    measure: EmpiricalMeasure
    self_check_distance: float  # first half vs second half Kantorovich


def stationary_approx(
    nu: DrivingMeasure,
    space,
    burn_in: int,
    samples: int,
    stride: int,
    seed: int | SeededStream,
    x0: float = 0.5,
) -> StationaryApprox:
    """Empirical approximation of the stationary law from one long run,
    with a first-half / second-half Kantorovich self-check."""
    _require_1d(space)
    if burn_in < 0 or samples < 1 or stride < 1:
        raise ValueError("need burn_in >= 0, samples >= 1, stride >= 1")
    stream = seed if isinstance(seed, SeededStream) else SeededStream(seed)
    rng = stream.generator()
    total = burn_in + samples * stride
    labels = draw_word(nu, rng, total)
    x = np.asarray([float(x0)])
    kept = np.empty(samples)
    j = 0
    for k in range(total):
        x = _vector_step(nu, labels[k : k + 1], x)
        if k >= burn_in and (k - burn_in) % stride == stride - 1:
            kept[j] = x[0]
            j += 1
    measure = EmpiricalMeasure.from_samples(space, kept)
    half = samples // 2
    if half >= 1 and samples - half >= 1:
        m1 = EmpiricalMeasure.from_samples(space, kept[:half])
        m2 = EmpiricalMeasure.from_samples(space, kept[half:])
        kant = kantorovich_circle if isinstance(space, Circle) else kantorovich_interval
        check = kant(m1, m2)
    else:
        check = float("nan")
    return StationaryApprox(measure=measure, self_check_distance=check)


def correlation_coefficient_pj(
    nu: DrivingMeasure,
    space,
    eta_sample: EmpiricalMeasure,
    j: int,
    trials: int,
    seed: int | SeededStream,
):
    """Monte Carlo estimate of the double eta-average of E[d(X_j^x, X_j^y)]
    under coupled noise.  Returns (value, stderr)."""
    _require_1d(space)
    stream = seed if isinstance(seed, SeededStream) else SeededStream(seed)
    rng = stream.generator()
    X = rng.choice(eta_sample.positions, size=trials, p=eta_sample.weights)
    Y = rng.choice(eta_sample.positions, size=trials, p=eta_sample.weights)
    for _ in range(j):
        labels = draw_word(nu, rng, trials)
        X = _vector_step(nu, labels, X)
        Y = _vector_step(nu, labels, Y)
    d = np.abs(X - Y)
    if isinstance(space, Circle):
        d %= 1.0
        np.minimum(d, 1.0 - d, out=d)
    err = float(d.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return float(d.mean()), err
