"""Periodic pseudo-spectral substrate: grids, transforms, multipliers, norms.

The computational domain is the periodic box [-L, L)^n with N points per
dimension.  Fourier coefficients approximate the continuum transform

    F(xi_m) ~ h^n * sum_j f(x_j) exp(-i x_j . xi_m),      xi_m = m * pi / L,

so L^p quadrature constants and spectral constants match the usual whole-space
conventions up to (spectrally small) discretization error.  Because the grid
point x_j = -L + j*h carries the half-box offset, the DFT picks up a parity
phase (-1)^m per dimension; the transforms below fold that phase in so that
`spec` is indexed by the signed integer mode m in standard FFT order.
"""

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "SpectralSymbol",
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "apply_multiplier",
    "pointwise_power",
    "lp_norm",
]


class Grid:
    """Discretization of the periodic box [-L, L)^n.

    Attributes
    ----------
    n : spatial dimension (1 or 2)
    L : half-box length
    N : points per dimension (power of two)
    h : grid spacing 2L/N
    dxi : frequency spacing pi/L
    shape : array shape, (N,) or (N, N)
    vol : box volume (2L)^n
    """

    def __init__(self, n, L, N):
        self.n = int(n)
        self.L = float(L)
        self.N = int(N)
        self.h = 2.0 * self.L / self.N
        self.dxi = np.pi / self.L
        self.shape = (self.N,) * self.n
        self.vol = (2.0 * self.L) ** self.n

        # Signed integer mode index per dimension, FFT order.
        self.mode_1d = np.fft.fftfreq(self.N, d=1.0 / self.N)
        self.x_1d = -self.L + self.h * np.arange(self.N)
        self.xi_1d = self.dxi * self.mode_1d

        if self.n == 1:
            self.xi_abs = np.abs(self.xi_1d)
            mode_sum = self.mode_1d
        else:
            mx, my = np.meshgrid(self.mode_1d, self.mode_1d, indexing="ij")
            self.xi_abs = self.dxi * np.hypot(mx, my)
            mode_sum = mx + my
        self.xi_sq = self.xi_abs**2
        self.bracket = np.sqrt(1.0 + self.xi_sq)  # <xi> = (1+|xi|^2)^(1/2)
        # Parity phase compensating the -L origin offset of the grid.
        self.phase = np.where(np.mod(mode_sum, 2) == 0, 1.0, -1.0)

        for arr in (self.mode_1d, self.x_1d, self.xi_1d, self.xi_abs,
                    self.xi_sq, self.bracket, self.phase):
            arr.flags.writeable = False

    @property
    def key(self):
        return (self.n, self.L, self.N)

    @property
    def xi_max(self):
        """Largest represented frequency per dimension, (N/2) * pi / L."""
        return (self.N // 2) * self.dxi

    def points(self):
        """Physical coordinates; array for n=1, tuple of meshes for n=2."""
        if self.n == 1:
            return self.x_1d
        return np.meshgrid(self.x_1d, self.x_1d, indexing="ij")

    def __eq__(self, other):
        return isinstance(other, Grid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Grid(n={self.n}, L={self.L}, N={self.N})"


def make_grid(n, L, N):
    """Build a Grid, rejecting unusable parameters."""
    n = int(n)
    if n not in (1, 2):
        raise ValueError(f"dimension must be 1 or 2, got {n}")
    if L <= 0:
        raise ValueError(f"half-box length must be positive, got {L}")
    N = int(N)
    if N < 8 or N & (N - 1) != 0:
        raise ValueError(f"N must be a power of two >= 8, got {N}")
    return Grid(n, L, N)


class Field:
    """One real scalar unknown on a Grid, with lazily synchronized
    physical samples and Fourier coefficients."""

    __slots__ = ("grid", "_phys", "_spec")

    def __init__(self, grid, phys=None, spec=None):
        if phys is None and spec is None:
            raise ValueError("field needs physical samples or coefficients")
        self.grid = grid
        self._phys = None
        self._spec = None
        if phys is not None:
            phys = np.array(phys, dtype=float)
            if phys.shape != grid.shape:
                raise ValueError(f"shape {phys.shape} != grid shape {grid.shape}")
            phys.flags.writeable = False
            self._phys = phys
        if spec is not None:
            spec = np.array(spec, dtype=complex)
            if spec.shape != grid.shape:
                raise ValueError(f"shape {spec.shape} != grid shape {grid.shape}")
            spec.flags.writeable = False
            self._spec = spec

    @classmethod
    def from_phys(cls, grid, phys):
        return cls(grid, phys=phys)

    @classmethod
    def from_spec(cls, grid, spec):
        return cls(grid, spec=spec)

    @classmethod
    def zero(cls, grid):
        return cls(grid, phys=np.zeros(grid.shape))

    @property
    def phys(self):
        if self._phys is None:
            g = self.grid
            p = np.real(np.fft.ifftn(self._spec * g.phase)) / g.h**g.n
            p.flags.writeable = False
            self._phys = p
        return self._phys

    @property
    def spec(self):
        if self._spec is None:
            g = self.grid
            s = g.h**g.n * g.phase * np.fft.fftn(self._phys)
            s.flags.writeable = False
            self._spec = s
        return self._spec

    def __repr__(self):
        return f"Field({self.grid!r})"


class SpectralSymbol:
    """A Fourier multiplier sampled on the grid's frequency lattice."""

    __slots__ = ("values", "label")

    def __init__(self, values, label=""):
        values = np.asarray(values)
        if not np.all(np.isfinite(values)):
            raise ValueError(f"symbol {label!r} has non-finite lattice values")
        values = values.copy()
        values.flags.writeable = False
        self.values = values
        self.label = label

    def __repr__(self):
        return f"SpectralSymbol({self.label!r})"


def forward_transform(f):
    """Populate and return the Fourier coefficients of a Field."""
    return f.spec


def inverse_transform(f):
    """Populate and return the physical samples of a Field."""
    return f.phys


def apply_multiplier(sym, f):
    """Apply a Fourier multiplier: result_spec = sym * f_spec.

    All symbols in this package are real and even, so the result is again a
    real field (the physical samples drop a machine-size imaginary part).
    """
    if sym.values.shape != f.grid.shape:
        raise ValueError(
            f"symbol shape {sym.values.shape} does not match grid {f.grid.shape}")
    return Field.from_spec(f.grid, sym.values * f.spec)


def _embed_centered(spec, N, M):
    """Zero-pad an FFT-ordered spectrum from N to M points per dimension."""
    shifted = np.fft.fftshift(spec)
    pad = (M - N) // 2
    out = np.zeros((M,) * spec.ndim, dtype=complex)
    sl = tuple(slice(pad, pad + N) for _ in range(spec.ndim))
    out[sl] = shifted
    return np.fft.ifftshift(out)


def _extract_centered(spec, M, N):
    """Truncate an FFT-ordered spectrum from M to N points per dimension."""
    shifted = np.fft.fftshift(spec)
    pad = (M - N) // 2
    sl = tuple(slice(pad, pad + N) for _ in range(spec.ndim))
    return np.fft.ifftshift(shifted[sl])


def _zero_nyquist(spec):
    """Zero the -N/2 mode line(s); the symmetric band keeps the field real."""
    out = spec.copy()
    Nyq = spec.shape[0] // 2
    if spec.ndim == 1:
        out[Nyq] = 0.0
    else:
        out[Nyq, :] = 0.0
        out[:, Nyq] = 0.0
    return out


def pointwise_power(f, lam):
    """Alias-free u^lam via zero padding.

    The spectrum is embedded on a grid of ceil((lam+1)/2) * N points per
    dimension, the power is taken pointwise there, and the result is
    truncated back.  For a polynomial nonlinearity the retained modes are
    exact: aliased images of products fall outside the kept band.  The kept
    band is the symmetric one |m| <= N/2 - 1 (the unpaired Nyquist line is
    projected away, preserving realness).
    """
    lam = _check_power(lam)
    g = f.grid
    pad_factor = -(-(lam + 1) // 2)  # ceil((lam+1)/2)
    M = pad_factor * g.N
    fine = _padded_grid(g.n, g.L, M)
    spec_fine = _embed_centered(_zero_nyquist(f.spec), g.N, M)
    phys_fine = Field.from_spec(fine, spec_fine).phys
    powered = Field.from_phys(fine, phys_fine**lam)
    spec_coarse = _zero_nyquist(_extract_centered(powered.spec, M, g.N))
    return Field.from_spec(g, spec_coarse)


def _check_power(lam):
    if not float(lam).is_integer() or int(lam) < 2:
        raise ValueError(f"power must be an integer >= 2, got {lam}")
    return int(lam)


_PADDED_GRIDS = {}


def _padded_grid(n, L, M):
    # The padded point count need not be a power of two; FFT cost is fine.
    key = (n, L, M)
    g = _PADDED_GRIDS.get(key)
    if g is None:
        g = Grid(n, L, M)
        _PADDED_GRIDS[key] = g
    return g


def lp_norm(f, p):
    """Riemann-sum L^p norm, (sum |f(x_j)|^p h^n)^(1/p); p=inf gives max."""
    if p < 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p}")
    a = np.abs(f.phys)
    if np.isinf(p):
        return float(a.max())
    g = f.grid
    return float((np.sum(a**p) * g.h**g.n) ** (1.0 / p))
