"""Frequency-uniform decomposition and every norm built on it.

The decomposition windows are tensor products of a one-dimensional C-infinity
bump theta with theta(r) = 1 for |r| <= 1/2 and theta(r) = 0 for |r| >= 1,
normalized so that the integer translates sum to one at every frequency:

    sigma_k(xi) = prod_d theta(xi_d - k_d) / s(xi_d),
    s(x) = sum_m theta(x - m).

Both the numerator and denominator factorize over dimensions, so windows are
stored as sparse per-dimension tables; a box piece of a field is produced by
an outer-product patch multiply in spectral space.

Note: a single box piece of a real field is complex valued (its conjugate
partner is the piece at -k), so projections are represented by BoxPiece
rather than the real-only Field.
"""

import math
from dataclasses import dataclass

import numpy as np

from .propagator import apply_riesz_j

__all__ = [
    "WindowBank",
    "ModParams",
    "BoxPiece",
    "Trajectory",
    "build_windows",
    "box_project",
    "modulation_norm",
    "dinvj_modulation_norm",
    "weighted_sup_norm",
    "lq_box_norm",
    "lq_box_spacetime_norm",
]


def _phi(x):
    """exp(-1/x) for x > 0, zero otherwise; the C-infinity glue."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def bump(r):
    """1 on |r| <= 1/2, 0 on |r| >= 1, smooth monotone blend between."""
    r = np.abs(np.asarray(r, dtype=float))
    a = _phi(2.0 - 2.0 * r)
    b = _phi(2.0 * r - 1.0)
    out = np.zeros_like(r)
    inner = r <= 0.5
    out[inner] = 1.0
    mid = (~inner) & (r < 1.0)
    out[mid] = a[mid] / (a[mid] + b[mid])
    return out


def bump_translate_sum(x):
    """s(x) = sum over integers m of bump(x - m); at most two terms live."""
    x = np.asarray(x, dtype=float)
    frac = x - np.floor(x)
    return bump(frac) + bump(frac - 1.0)


@dataclass(frozen=True)
class ModParams:
    """Modulation-space exponents: L^p in the box, l^q over boxes, weight s."""

    p: float
    q: float
    s: float = 0.0

    def __post_init__(self):
        if not (1 <= self.p) or not (1 <= self.q):
            raise ValueError(f"exponents must satisfy p, q >= 1, got {self}")


class BoxPiece:
    """One frequency-box piece of a field (complex valued in general)."""

    __slots__ = ("grid", "spec", "_phys")

    def __init__(self, grid, spec):
        self.grid = grid
        self.spec = spec
        self._phys = None

    @property
    def phys(self):
        if self._phys is None:
            g = self.grid
            self._phys = np.fft.ifftn(self.spec * g.phase) / g.h**g.n
        return self._phys

    def lp_norm(self, p):
        if p < 1:
            raise ValueError(f"L^p norm needs p >= 1, got {p}")
        a = np.abs(self.phys)
        if np.isinf(p):
            return float(a.max())
        g = self.grid
        return float((np.sum(a**p) * g.h**g.n) ** (1.0 / p))


class WindowBank:
    """Sampled decomposition windows on a grid's frequency lattice.

    k_max covers the lattice plus one ring, so every box beyond the range is
    identically zero on the lattice.  Lambda is the neighbor offset set: two
    windows can overlap only when their centers differ by at most 2 in each
    coordinate.
    """

    def __init__(self, grid):
        self.grid = grid
        self.k_max = int(math.ceil(grid.xi_max)) + 1
        xi = grid.xi_1d
        denom = bump_translate_sum(xi)
        # Per-dimension sparse window table; dimensions share one lattice.
        self._table = {}
        for m in range(-self.k_max, self.k_max + 1):
            vals = bump(xi - m)
            idx = np.flatnonzero(vals > 0.0)
            self._table[m] = (idx, vals[idx] / denom[idx])
        self.k_list = self._build_k_list()
        self.neighbor_offsets = self._build_lambda()
        self.overlap_min = self._min_on_unit_cube()

    def _build_k_list(self):
        rng = range(-self.k_max, self.k_max + 1)
        if self.grid.n == 1:
            return [(m,) for m in rng]
        return [(a, b) for a in rng for b in rng]

    def _build_lambda(self):
        rng = range(-2, 3)
        if self.grid.n == 1:
            return [(m,) for m in rng]
        return [(a, b) for a in rng for b in rng]

    def _min_on_unit_cube(self):
        # Smallest window value over lattice points of the center unit cube.
        xi = self.grid.xi_1d
        on_cube = np.abs(xi) <= 0.5
        w = bump(xi[on_cube]) / bump_translate_sum(xi[on_cube])
        m = float(w.min()) if w.size else 1.0
        return m**self.grid.n

    def normalize_index(self, k):
        if np.isscalar(k):
            k = (int(k),)
        else:
            k = tuple(int(c) for c in k)
        if len(k) != self.grid.n:
            raise ValueError(f"box index {k} has wrong dimension")
        return k

    def in_range(self, k):
        return all(abs(c) <= self.k_max for c in self.normalize_index(k))

    def box_patch(self, k):
        """Sparse window patch for box k: per-dim (indices, values)."""
        k = self.normalize_index(k)
        return [self._table[c] for c in k]

    def sigma0(self, points):
        """Evaluate the base window at arbitrary frequency points.

        points: array of shape (..., n) for n=2, or any shape for n=1.
        """
        pts = np.asarray(points, dtype=float)
        if self.grid.n == 1:
            return bump(pts) / bump_translate_sum(pts)
        num = bump(pts[..., 0]) * bump(pts[..., 1])
        den = bump_translate_sum(pts[..., 0]) * bump_translate_sum(pts[..., 1])
        return num / den

    def window_values(self, k):
        """Dense lattice samples of sigma_k (mostly zeros)."""
        k = self.normalize_index(k)
        out = np.zeros(self.grid.shape)
        if not self.in_range(k):
            return out
        patches = self.box_patch(k)
        if self.grid.n == 1:
            idx, w = patches[0]
            out[idx] = w
        else:
            (i1, w1), (i2, w2) = patches
            out[np.ix_(i1, i2)] = np.outer(w1, w2)
        return out

    def partition_residual(self):
        """max_j |sum_k sigma_k(xi_j) - 1| over the whole lattice."""
        total = np.zeros(self.grid.shape)
        for k in self.k_list:
            total += self.window_values(k)
        return float(np.max(np.abs(total - 1.0)))


_BANK_CACHE = {}


def build_windows(grid):
    """Window bank for a grid, cached (construction is pure)."""
    bank = _BANK_CACHE.get(grid.key)
    if bank is None:
        bank = WindowBank(grid)
        _BANK_CACHE[grid.key] = bank
    return bank


def box_project(k, f, bank):
    """The frequency-box piece of f at center k (zero when k is off-lattice)."""
    g = f.grid
    if g != bank.grid:
        raise ValueError("field and window bank live on different grids")
    out = np.zeros(g.shape, dtype=complex)
    k = bank.normalize_index(k)
    if bank.in_range(k):
        patches = bank.box_patch(k)
        if g.n == 1:
            idx, w = patches[0]
            out[idx] = w * f.spec[idx]
        else:
            (i1, w1), (i2, w2) = patches
            sl = np.ix_(i1, i2)
            out[sl] = np.outer(w1, w2) * f.spec[sl]
    return BoxPiece(g, out)


def _box_is_empty(k, spec, bank):
    patches = bank.box_patch(k)
    if bank.grid.n == 1:
        idx, _ = patches[0]
        return not np.any(spec[idx])
    (i1, _), (i2, _) = patches
    return not np.any(spec[np.ix_(i1, i2)])


def _box_weight(k, s):
    return (1.0 + math.hypot(*k)) ** s


def modulation_norm(f, mp, bank):
    """The weighted l^q-over-boxes of L^p box norms.

    q = inf takes the weighted supremum over boxes.  Boxes with no spectral
    mass are skipped; for band-limited fields this makes the sum exact with
    no truncation error.
    """
    terms = []
    for k in bank.k_list:
        if _box_is_empty(k, f.spec, bank):
            continue
        a = box_project(k, f, bank).lp_norm(mp.p)
        terms.append(_box_weight(k, mp.s) * a)
    if not terms:
        return 0.0
    terms = np.asarray(terms)
    if np.isinf(mp.q):
        return float(terms.max())
    return float(np.sum(terms**mp.q) ** (1.0 / mp.q))


def dinvj_modulation_norm(v, mp, bank):
    """Modulation norm of J^(-1) D v, the natural size of the second
    component."""
    return modulation_norm(apply_riesz_j(v), mp, bank)


class Trajectory:
    """Time-sampled sequence of state pairs with cached norm records."""

    def __init__(self, times, states):
        times = np.asarray(times, dtype=float)
        if times.size == 0:
            raise ValueError("trajectory needs at least one sample")
        if times.size != len(states):
            raise ValueError("times and states disagree in length")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("sample times must be strictly increasing")
        grid = states[0].grid
        for z in states:
            if z.grid != grid:
                raise ValueError("trajectory states live on different grids")
        self.times = times
        self.states = list(states)
        self.grid = grid
        self._cache = {}

    def __len__(self):
        return len(self.states)

    @property
    def dt(self):
        if len(self.states) < 2:
            raise ValueError("single-sample trajectory has no step size")
        steps = np.diff(self.times)
        if not np.allclose(steps, steps[0], rtol=1e-12, atol=1e-12):
            raise ValueError("trajectory is not uniformly sampled")
        return float(steps[0])

    def u_fields(self):
        return [z.u for z in self.states]

    def v_fields(self):
        return [z.v for z in self.states]

    def subsample(self, stride):
        return Trajectory(self.times[::stride], self.states[::stride])

    def state_norm_series(self, mp, bank):
        """Per-time (norm_u, norm_v_dinvj) pairs, cached per exponent set."""
        key = ("state_mnorm", mp.p, mp.q, mp.s)
        if key not in self._cache:
            rec = np.array([
                (modulation_norm(z.u, mp, bank),
                 dinvj_modulation_norm(z.v, mp, bank))
                for z in self.states])
            self._cache[key] = rec
        return self._cache[key]


def _weight_values(weight, times):
    kind, expo = weight
    if kind == "poly_alpha":
        return (1.0 + np.abs(times)) ** expo
    if kind == "pure_beta":
        return np.abs(times) ** expo
    raise ValueError(f"unknown weight {kind!r}")


def weighted_sup_norm(traj, mp, weight, bank):
    """Supremum over sample times of weight(t) * (||u|| + ||v||_dinvj).

    weight is ("poly_alpha", a) for (1+|t|)^a or ("pure_beta", b) for |t|^b.
    Returns the sup together with the per-time series for slope fitting.
    """
    rec = traj.state_norm_series(mp, bank)
    sums = rec[:, 0] + rec[:, 1]
    series = _weight_values(weight, traj.times) * sums
    return {
        "value": float(series.max()),
        "times": traj.times.copy(),
        "series": series,
        "unweighted": sums,
    }


def lq_box_norm(fields, times, q, gamma, sigma, bank):
    """l^q over boxes of the L^gamma-in-time, L^sigma-in-space box norms.

    Time integration is a uniform Riemann sum over the sampled window;
    gamma = inf takes the max over samples.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0 or not fields:
        raise ValueError("empty field series")
    if times.size > 1:
        steps = np.diff(times)
        if not np.allclose(steps, steps[0], rtol=1e-12, atol=1e-12):
            raise ValueError("series must be uniformly sampled in time")
        dt = float(steps[0])
    else:
        dt = 1.0
    specs = [f.spec for f in fields]
    terms = []
    for k in bank.k_list:
        if all(_box_is_empty(k, s, bank) for s in specs):
            continue
        a = np.array([box_project(k, f, bank).lp_norm(sigma) for f in fields])
        if np.isinf(gamma):
            tk = float(a.max())
        else:
            tk = float((np.sum(a**gamma) * dt) ** (1.0 / gamma))
        terms.append(tk)
    if not terms:
        return 0.0
    terms = np.asarray(terms)
    if np.isinf(q):
        return float(terms.max())
    return float(np.sum(terms**q) ** (1.0 / q))


def lq_box_spacetime_norm(traj, q, gamma, sigma, bank, riesz=False):
    """Space-time box norm of a trajectory's u component (riesz=True applies
    J^(-1) D first, giving the D^(-1)J L^sigma variant)."""
    fields = traj.u_fields()
    if riesz:
        fields = [apply_riesz_j(f) for f in fields]
    return lq_box_norm(fields, traj.times, q, gamma, sigma, bank)
