"""Pseudo-spectral laboratory for the generalized Boussinesq system.

The package simulates the first-order reformulation of the fourth-order
Boussinesq equation on a periodic box, applies its linear group exactly in
Fourier space, measures solutions in modulation-space norms, solves the
mild-solution fixed point by Picard iteration, and empirically checks the
dispersive decay, product, and space-time estimates that drive the
global/local existence, scattering and stability theory.
"""

__version__ = "0.1.0"

from .spectral import (Grid, Field, SpectralSymbol, make_grid,
                       apply_multiplier, pointwise_power, lp_norm)
from .propagator import (StatePair, PropagatorBank, omega, apply_group,
                         apply_component, apply_bessel, apply_riesz_j)
from .modulation import (WindowBank, ModParams, Trajectory, build_windows,
                         box_project, modulation_norm, dinvj_modulation_norm,
                         weighted_sup_norm, lq_box_spacetime_norm)
from .params import (ProblemParams, lambda0, lambda1, validate_hypotheses,
                     scaling_identity_check, weighted_convolution_bound,
                     strichartz_admissible)
from .solver import (SolverConfig, FixedPointReport, duhamel_apply,
                     picard_solve, reference_integrate,
                     residual_fourth_order, scattering_state)
from .harness import (Corpus, RatioReport, make_corpus, decay_ratio,
                      product_ratio, strichartz_ratio, stability_experiment,
                      wrap_around_window)
