"""Closed-form concentration bounds, validity thresholds, and the two
inequality utilities used by the proofs.

Conventions shared by every routine here:

* bounds above 1 are returned unchanged and flagged vacuous — they are
  still valid upper bounds and dominance tests must not clip them;
* theorems with a validity threshold return a :class:`BoundResult` whose
  ``applicable`` flag is False below the threshold, and callers must not
  compare empirical tails against out-of-regime bounds;
* a degenerate zero denominator (possible only when the contraction and
  diameter inputs are both 0) yields bound 0 for t > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BoundInputs",
    "BoundResult",
    "beta_n",
    "main_tail_bound",
    "refined_alpha",
    "refined_tail_bound",
    "sync_bound",
    "lln_bound",
    "empirical_kappa_bound",
    "interval_kappa_bound",
    "corrdim_bound",
    "circle_lyap_bound",
    "projective_lyap_bound",
    "matrix_norm_bound",
    "devroye_rhs",
    "appendix_checks",
    "wilson_interval",
]


@dataclass
class BoundInputs:
    """Shared ingredient bundle for the bound formulas.

    gamma may be given explicitly (length n+1) or through uniform_c, the
    shorthand for the constant ladder gamma_i = c / n.
    """

    n: int
    gamma: list | None = None
    uniform_c: float | None = None
    gee_diameter: float = 0.0
    lam: float = 0.0
    u: list | None = None
    lipschitz_L: float | None = None
    sup_norm: float | None = None
    m_nu: float | None = None
    M_nu: float | None = None
    C: float | None = None
    m_dim: int | None = None
    diam_M: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if (self.gamma is None) == (self.uniform_c is None):
            raise ValueError("give exactly one of gamma or uniform_c")
        if self.gamma is None:
            self.gamma = [self.uniform_c / self.n] * (self.n + 1)
        self.gamma = [float(g) for g in self.gamma]
        if len(self.gamma) != self.n + 1:
            raise ValueError("gamma must have n + 1 entries")
        if any(g < 0 for g in self.gamma) or not any(g > 0 for g in self.gamma):
            raise ValueError("gamma must be nonnegative with at least one positive entry")
        if self.gee_diameter < 0 or self.lam < 0:
            raise ValueError("diameter and contraction inputs must be nonnegative")


@dataclass(frozen=True)
class BoundResult:
    """A bound value together with its validity gate."""

    value: float
    threshold: float = 0.0
    applicable: bool = True
    note: str = ""

    @property
    def vacuous(self) -> bool:
        return self.applicable and self.value > 1.0


def _gate(threshold: float, value: float, t: float, strict: bool, note: str = "") -> BoundResult:
    ok = (t > threshold) if strict else (t >= threshold)
    return BoundResult(value=value, threshold=threshold, applicable=ok, note=note)


def beta_n(inputs: BoundInputs) -> float:
    """n * (diameter + contraction sum) * max gamma."""
    return inputs.n * (inputs.gee_diameter + inputs.lam) * max(inputs.gamma)


def main_tail_bound(n: int, t: float, beta: float) -> float:
    """One-sided tail bound exp(-n t^2 / (12 beta^2))."""
    if t <= 0:
        raise ValueError("t must be positive")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0.0:
        return 0.0
    return float(np.exp(-n * t * t / (12.0 * beta * beta)))


def refined_alpha(inputs: BoundInputs):
    """Per-index weights alpha_k = gamma_k * diameter
    + sum_j gamma_{k+j} u_{j-1}, and their squared sum."""
    if inputs.u is None or len(inputs.u) != inputs.n:
        raise ValueError("need the n coupled means u_0 .. u_{n-1}")
    g = np.asarray(inputs.gamma)
    u = np.asarray([float(v) for v in inputs.u])
    n = inputs.n
    alpha = np.empty(n + 1)
    for k in range(n + 1):
        alpha[k] = g[k] * inputs.gee_diameter + float(np.dot(g[k + 1 :], u[: n - k]))
    return list(alpha), float(np.sum(alpha * alpha))


def refined_tail_bound(t: float, alpha_sq: float) -> float:
    """One-sided tail bound exp(-t^2 / (12 alpha_sq))."""
    if t <= 0:
        raise ValueError("t must be positive")
    if alpha_sq < 0:
        raise ValueError("alpha_sq must be nonnegative")
    if alpha_sq == 0.0:
        return 0.0
    return float(np.exp(-t * t / (12.0 * alpha_sq)))


def sync_bound(n: int, t: float, gee_inf: float, lambda_nu: float, muB: float) -> BoundResult:
    """Tracking-distance tail bound with its mass-dependent threshold."""
    if not 0.0 < muB <= 1.0:
        raise ValueError("muB must lie in (0, 1]")
    s = gee_inf + lambda_nu
    threshold = 8.0 * s * np.sqrt(np.log(1.0 / muB)) / np.sqrt(n) + lambda_nu / n
    value = float(np.exp(-n * t * t / (48.0 * s * s))) if s > 0 else 0.0
    return _gate(float(threshold), value, t, strict=False)


def lln_bound(n: int, t: float, L_h: float, gee_inf: float, lambda_nu: float) -> BoundResult:
    """Two-sided Birkhoff-average tail bound (prefactor 2)."""
    if L_h <= 0:
        raise ValueError("L_h must be positive")
    s = lambda_nu + gee_inf
    threshold = 2.0 * lambda_nu * L_h / n
    value = 2.0 * float(np.exp(-n * t * t / (48.0 * L_h * L_h * s * s))) if s > 0 else 0.0
    return _gate(threshold, value, t, strict=True)


def empirical_kappa_bound(n: int, t: float, gee_inf: float, lambda_nu: float) -> BoundResult:
    """Two-sided tail bound for the Kantorovich distance of the empirical
    measure from its mean; threshold uses L = 1 (see note)."""
    s = gee_inf + lambda_nu
    threshold = 2.0 * lambda_nu / n
    value = 2.0 * float(np.exp(-n * t * t / (12.0 * s * s))) if s > 0 else 0.0
    return _gate(threshold, value, t, strict=True,
                 note="threshold uses L=1 for the Kantorovich functional")


def interval_kappa_bound(
    n: int, t: float, a: float, b: float, gee_inf: float, lambda_nu: float
) -> BoundResult:
    """One-sided interval empirical-measure bound with the quarter-power
    threshold."""
    if b <= a:
        raise ValueError("need b > a")
    s = gee_inf + lambda_nu
    threshold = (b - a) * (1.0 + 8.0 * lambda_nu) ** 0.25 / n**0.25
    value = float(np.exp(-n * t * t / (48.0 * s * s))) if s > 0 else 0.0
    return _gate(threshold, value, t, strict=False)


def corrdim_bound(
    n: int, t: float, eps: float, L_phi: float, sup_phi: float, gee_inf: float, lambda_nu: float
) -> BoundResult:
    """Two-sided smoothed correlation-sum bound 2 exp(-c n t^2 eps^2)."""
    if eps <= 0 or L_phi <= 0:
        raise ValueError("eps and L_phi must be positive")
    s = gee_inf + lambda_nu
    threshold = 8.0 * L_phi * lambda_nu / (eps * n) + sup_phi / n
    if s == 0:
        return _gate(threshold, 0.0, t, strict=True)
    c = 1.0 / (192.0 * L_phi * L_phi * s * s)
    value = 2.0 * float(np.exp(-c * n * t * t * eps * eps))
    return _gate(threshold, value, t, strict=True)


def circle_lyap_bound(
    n: int, t: float, m_nu: float, M_nu: float, gee_c1: float, lam: float
) -> float:
    """Two-sided circle Lyapunov-exponent tail bound.  The abstract
    threshold sequence is estimated empirically by the harness, not here."""
    if not 0.0 < m_nu <= M_nu:
        raise ValueError("need 0 < m_nu <= M_nu")
    if t <= 0:
        raise ValueError("t must be positive")
    s = gee_c1 + lam
    if s == 0:
        return 0.0
    return 2.0 * float(np.exp(-n * t * t * m_nu * m_nu / (48.0 * M_nu * M_nu * s * s)))


def projective_lyap_bound(t: float, C: float, lambda_nu: float) -> float:
    """Vector-growth tail bound exp(-t^2 / (192 C^4 (lambda + C)^2)).

    As stated there is no n factor in the exponent; the bound is weaker
    than its finite-n analogues but valid, and is reported as-is.
    """
    if C < 1.0:
        raise ValueError("need C >= 1 (unit determinant forces norm >= 1)")
    if t <= 0:
        raise ValueError("t must be positive")
    s = lambda_nu + C
    return float(np.exp(-t * t / (192.0 * C**4 * s * s)))


def matrix_norm_bound(n: int, t: float, m_dim: int, C: float, lambda_nu: float):
    """Matrix-norm growth bound 2m exp(-t^2 / (768 C^4 (lambda + C)^2)).

    Returns (threshold_log_part, bound): the (2/n) log m threshold term;
    the remaining 2 t_n part is estimated empirically and added by the
    caller.
    """
    if C < 1.0:
        raise ValueError("need C >= 1")
    if m_dim < 1:
        raise ValueError("need m_dim >= 1")
    if t <= 0:
        raise ValueError("t must be positive")
    s = lambda_nu + C
    value = 2.0 * m_dim * float(np.exp(-t * t / (768.0 * C**4 * s * s)))
    return (2.0 / n) * float(np.log(m_dim)), value


def devroye_rhs(gamma, lambda_nu: float, diam_M: float) -> float:
    """Second-moment bound lambda * diam * sum gamma_k^2 for strictly
    positive nonincreasing gamma."""
    g = np.asarray([float(x) for x in gamma])
    if len(g) == 0 or np.any(g <= 0):
        raise ValueError("gamma must be strictly positive")
    if np.any(np.diff(g) > 0):
        raise ValueError("gamma must be nonincreasing")
    return float(lambda_nu * diam_M * np.sum(g * g))


def appendix_checks(seed: int = 0, random_cases: int = 1000) -> dict:
    """Grid check of 1 + (u^2 e^u)/2 <= e^{3 u^2} on u in [0, 10] and a
    randomized check of the truncated second-moment inequality
    E[1_{(K, inf)}(Z) Z] <= E[Z^2] / K for positive discrete Z."""
    u = np.arange(0.0, 10.0 + 1e-9, 1e-3)
    # compare in log space: log(1 + u^2 e^u / 2) <= 3 u^2 avoids overflow
    lhs_log = np.logaddexp(0.0, 2.0 * np.log(np.maximum(u, 1e-300)) + u - np.log(2.0))
    lhs_log[u == 0.0] = 0.0
    margins = 3.0 * u * u - lhs_log
    exp_ok = bool(np.all(margins >= -1e-12))

    rng = np.random.default_rng(seed)
    trunc_ok = True
    worst = np.inf
    for _ in range(random_cases):
        k = int(rng.integers(1, 8))
        z = rng.uniform(0.0, 10.0, size=k)
        w = rng.dirichlet(np.ones(k))
        K = float(rng.uniform(0.05, 10.0))
        lhs = float(np.sum(w * z * (z > K)))
        rhs = float(np.sum(w * z * z)) / K
        margin = rhs - lhs
        worst = min(worst, margin)
        if margin < -1e-12:
            trunc_ok = False
    return {
        "exponential_inequality": exp_ok,
        "exponential_min_margin": float(np.min(margins)),
        "truncated_moment": trunc_ok,
        "truncated_moment_min_margin": worst,
        "passed": exp_ok and trunc_ok,
    }


def wilson_interval(successes: int, trials: int, confidence: float = 0.95):
    """95% score interval for a binomial proportion; at the 0/n and n/n
    boundaries the exact (Clopper-Pearson) limit is used so that the
    reported limit is never anti-conservative there."""
    if trials <= 0 or not 0 <= successes <= trials:
        raise ValueError("need 0 <= successes <= trials, trials > 0")
    from scipy.special import ndtri

    alpha = 1.0 - confidence
    z = float(ndtri(1.0 - alpha / 2.0))
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * np.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo, hi = center - half, center + half
    if successes == 0:
        lo, hi = 0.0, 1.0 - (alpha / 2.0) ** (1.0 / trials)
    elif successes == trials:
        lo, hi = (alpha / 2.0) ** (1.0 / trials), 1.0
    return max(0.0, float(lo)), min(1.0, float(hi))
