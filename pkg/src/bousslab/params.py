"""Scalar parameter theory: threshold powers, decay exponents, hypothesis
checks, and the weighted convolution integral behind the global bounds."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

__all__ = [
    "ProblemParams",
    "lambda0",
    "lambda1",
    "validate_hypotheses",
    "scaling_identity_check",
    "weighted_convolution_bound",
    "strichartz_admissible",
    "min_admissible_gamma",
]


def lambda0(n):
    """Positive root of n x^2 - (n+2) x - 2 = 0, the global-existence
    threshold power."""
    n = int(n)
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return (n + 2 + math.sqrt(n * n + 12 * n + 4)) / (2 * n)


def lambda1(n):
    """(n+2)/(n-2) for n >= 3, infinity for n = 1, 2."""
    n = int(n)
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if n <= 2:
        return math.inf
    return (n + 2) / (n - 2)


@dataclass(frozen=True)
class ProblemParams:
    """Nonlinearity power and norm exponents, with the derived decay rates.

    alpha = n (1/2 - 1/p) is the linear decay exponent, beta = (1-alpha) /
    (lam-1) the scaling-critical one; p_prime is the Hoelder conjugate.
    """

    n: int
    lam: int
    p: float
    q: float
    s: float = 0.0

    @property
    def alpha(self):
        return self.n * (0.5 - 1.0 / self.p)

    @property
    def beta(self):
        return (1.0 - self.alpha) / (self.lam - 1)

    @property
    def p_prime(self):
        if self.p == 1:
            return math.inf
        return self.p / (self.p - 1.0)


def _s_range_clauses(pp):
    out = []
    lo = pp.n - pp.n / pp.q
    hi = pp.n / pp.q
    if not (lo <= pp.s):
        out.append(f"s >= n - n/q violated: s={pp.s} < {lo}")
    if not (pp.s < hi):
        out.append(f"s < n/q violated: s={pp.s} >= {hi}")
    return out


def validate_hypotheses(kind, pp):
    """Check a theorem's hypothesis set clause by clause.

    Returns the list of violated clauses by name; an empty list means the
    parameter tuple is admissible.  Violations are data, not errors.
    """
    v = []
    if kind == "global1":
        if pp.lam != int(pp.lam) or pp.lam <= lambda0(pp.n):
            v.append(f"lambda integer > lambda0(n)={lambda0(pp.n):.6f} "
                     f"violated: lambda={pp.lam}")
        if pp.p != pp.lam + 1:
            v.append(f"p = lambda+1 violated: p={pp.p}, lambda={pp.lam}")
        if not (1 <= pp.q < 2):
            v.append(f"1 <= q < 2 violated: q={pp.q}")
        v += _s_range_clauses(pp)
        if pp.q == 1 and pp.lam < 2:
            v.append(f"q=1 requires lambda >= 2: lambda={pp.lam}")
    elif kind == "global4":
        if pp.lam != int(pp.lam) or pp.lam <= 1 + 4.0 / pp.n:
            v.append(f"lambda integer > 1+4/n={1 + 4.0 / pp.n} violated: "
                     f"lambda={pp.lam}")
        if pp.p != int(pp.p) or not (2 + 4.0 / pp.n <= pp.p <= pp.lam + 1):
            v.append(f"p integer in [2+4/n, lambda+1]=[{2 + 4.0 / pp.n}, "
                     f"{pp.lam + 1}] violated: p={pp.p}")
    elif kind == "local1":
        if pp.lam != int(pp.lam) or not (1 < pp.lam <= lambda0(pp.n)):
            v.append(f"1 < lambda <= lambda0(n)={lambda0(pp.n):.6f} "
                     f"violated: lambda={pp.lam}")
        if pp.p != pp.lam + 1:
            v.append(f"p = lambda+1 violated: p={pp.p}, lambda={pp.lam}")
        if not (1 <= pp.q < math.inf):
            v.append(f"1 <= q < inf violated: q={pp.q}")
        v += _s_range_clauses(pp)
        if pp.q == 1 and pp.lam < 2:
            v.append(f"q=1 requires lambda >= 2: lambda={pp.lam}")
    else:
        raise ValueError(f"unknown hypothesis set {kind!r}")
    return v


def scaling_identity_check(pp):
    """Residual of the exponent identity 1 - beta (lam - 1) - alpha = 0.

    Algebraically zero for any parameters by the definition of beta; the
    returned value is the floating-point residual.
    """
    return abs(1.0 - pp.beta * (pp.lam - 1) - pp.alpha)


def weighted_convolution_bound(alpha, lam, t_max, grid_pts=200,
                               variant="global", quad_tol=1e-9):
    """Certify I(t) = int_0^t (1+t-s)^(-alpha) (1+s)^(-alpha*lam) ds bounds.

    variant="global": returns sup over a t-grid of (1+t)^alpha * I(t); finite
    and stable under t_max doubling exactly when alpha*lam > 1.
    variant="local": returns sup of (1+t)^alpha * I(t) / t_max, the constant
    of the linear-in-horizon bound; finite for any positive exponents.

    Returns a dict with sup_C and the per-t table (t, I, weighted value).
    """
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    if variant not in ("global", "local"):
        raise ValueError(f"unknown variant {variant!r}")
    ts = np.linspace(0.0, float(t_max), int(grid_pts))
    table = []
    for t in ts:
        if t == 0.0:
            table.append((0.0, 0.0, 0.0))
            continue
        val, err = quad(
            lambda s: (1.0 + t - s) ** (-alpha) * (1.0 + s) ** (-alpha * lam),
            0.0, t, epsabs=quad_tol, epsrel=quad_tol, limit=400)
        if not np.isfinite(val) or err > max(quad_tol, 1e-6 * abs(val)):
            raise ArithmeticError(
                f"quadrature failed at t={t}: value={val}, err={err}")
        weighted = (1.0 + t) ** alpha * val
        if variant == "local":
            weighted = weighted / float(t_max)
        table.append((float(t), float(val), float(weighted)))
    sup_C = max(row[2] for row in table)
    return {"sup_C": sup_C, "table": table,
            "alpha": float(alpha), "lam": float(lam),
            "t_max": float(t_max), "variant": variant}


def strichartz_admissible(sigma, n):
    """The threshold time exponent gamma_sigma with 2/gamma = n(1/2 - 1/sigma).

    Returns inf at sigma = 2; a pair (gamma, sigma) is admissible when
    gamma >= max(2, gamma_sigma).
    """
    if sigma < 2:
        raise ValueError(f"space exponent must satisfy sigma >= 2, got {sigma}")
    denom = n * (0.5 - 1.0 / sigma)
    if denom == 0.0:
        return math.inf
    return 2.0 / denom


def min_admissible_gamma(sigma, n):
    g = strichartz_admissible(sigma, n)
    return max(2.0, g) if math.isfinite(g) else 2.0
