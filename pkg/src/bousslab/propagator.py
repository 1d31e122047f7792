"""The linear group of the first-order system and its Fourier symbols.

Frequency by frequency the linearized system reads

    d/dt [u^, v^] = [[0, -|xi|^2], [<xi>^2, 0]] [u^, v^],

whose exponential is the 2x2 rotation-like matrix with entries

    B1 = cos(t w),  B2 = -(|xi|/<xi>) sin(t w),  B3 = (<xi>/|xi|) sin(t w),

where w(xi) = |xi| <xi>.  The auxiliary symbol l2 = sin(t w) arises from
composing B3 with the bounded operator with symbol |xi|/<xi>; the B3 symbol
has a removable singularity at xi = 0, filled with its limit t so the group
law holds exactly on the zero mode as well.
"""

import threading
from collections import OrderedDict

import numpy as np

from .spectral import Field, SpectralSymbol, apply_multiplier

__all__ = [
    "StatePair",
    "PropagatorBank",
    "omega",
    "group_bank",
    "apply_group",
    "apply_component",
    "apply_bessel",
    "apply_riesz_j",
    "riesz_j_symbol",
    "bessel_symbol",
]

COMPONENTS = ("B1", "B2", "B3", "l2")


def omega(xi):
    """Dispersion relation w(xi) = |xi| (1 + |xi|^2)^(1/2)."""
    xi = np.abs(np.asarray(xi, dtype=float))
    return xi * np.sqrt(1.0 + xi * xi)


class StatePair:
    """The pair [u, v] the group acts on; both real fields on one grid."""

    __slots__ = ("u", "v")

    def __init__(self, u, v):
        if u.grid != v.grid:
            raise ValueError("state components live on different grids")
        self.u = u
        self.v = v

    @property
    def grid(self):
        return self.u.grid

    @classmethod
    def zero(cls, grid):
        return cls(Field.zero(grid), Field.zero(grid))

    def l2_norm(self):
        """Product L^2 x L^2 norm, (||u||_2^2 + ||v||_2^2)^(1/2)."""
        g = self.grid
        w = g.h**g.n
        return float(np.sqrt(
            w * (np.sum(self.u.phys**2) + np.sum(self.v.phys**2))))


class PropagatorBank:
    """Symbols of B1, B2, B3 and l2 at a fixed time, on a fixed grid."""

    __slots__ = ("grid", "t", "b1", "b2", "b3", "l2")

    def __init__(self, grid, t):
        self.grid = grid
        self.t = float(t)
        r = grid.xi_abs / grid.bracket           # |xi|/<xi>
        tw = self.t * grid.xi_abs * grid.bracket  # t * w(xi)
        sin_tw = np.sin(tw)
        self.b1 = np.cos(tw)
        self.b2 = -r * sin_tw
        self.l2 = sin_tw
        # (<xi>/|xi|) sin(t w) -> t <xi>^2 -> t as xi -> 0.
        with np.errstate(divide="ignore", invalid="ignore"):
            b3 = np.where(grid.xi_abs > 0.0,
                          (grid.bracket / np.where(grid.xi_abs > 0.0,
                                                   grid.xi_abs, 1.0)) * sin_tw,
                          self.t)
        self.b3 = b3
        for arr in (self.b1, self.b2, self.b3, self.l2):
            arr.flags.writeable = False

    def symbol(self, which):
        try:
            return {"B1": self.b1, "B2": self.b2,
                    "B3": self.b3, "l2": self.l2}[which]
        except KeyError:
            raise ValueError(f"unknown component {which!r}, expected one of "
                             f"{COMPONENTS}") from None


_BANK_CACHE = OrderedDict()
_BANK_LOCK = threading.Lock()
_BANK_CAPACITY = 512


def group_bank(grid, t):
    """Cached PropagatorBank for (grid, t); experiments sweep times heavily."""
    key = (grid.key, float(t))
    with _BANK_LOCK:
        bank = _BANK_CACHE.get(key)
        if bank is not None:
            _BANK_CACHE.move_to_end(key)
            return bank
    bank = PropagatorBank(grid, t)
    with _BANK_LOCK:
        _BANK_CACHE[key] = bank
        while len(_BANK_CACHE) > _BANK_CAPACITY:
            _BANK_CACHE.popitem(last=False)
    return bank


def apply_group(t, z):
    """Apply the full 2x2 group: one fused frequency-wise matrix action."""
    bank = group_bank(z.grid, t)
    u_spec = z.u.spec
    v_spec = z.v.spec
    new_u = bank.b1 * u_spec + bank.b2 * v_spec
    new_v = bank.b3 * u_spec + bank.b1 * v_spec
    return StatePair(Field.from_spec(z.grid, new_u),
                     Field.from_spec(z.grid, new_v))


def apply_component(which, t, g):
    """Apply a single component multiplier (B1, B2, B3 or l2) to a field."""
    bank = group_bank(g.grid, t)
    sym = SpectralSymbol(bank.symbol(which), label=f"{which}(t={t})")
    return apply_multiplier(sym, g)


def bessel_symbol(grid, s):
    """Symbol of J^s = (I - Laplacian)^(s/2), i.e. <xi>^s."""
    return SpectralSymbol(grid.bracket**s, label=f"J^{s}")


def riesz_j_symbol(grid):
    """Symbol of J^(-1) D, i.e. |xi|/<xi>; vanishes on the mean."""
    return SpectralSymbol(grid.xi_abs / grid.bracket, label="J^-1 D")


def apply_bessel(s, f):
    return apply_multiplier(bessel_symbol(f.grid, s), f)


def apply_riesz_j(f):
    return apply_multiplier(riesz_j_symbol(f.grid), f)
