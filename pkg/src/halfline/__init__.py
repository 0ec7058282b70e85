"""Boundary-integral machinery for the quadratic Schrodinger equation on
the half line: lattice transforms, dispersive space-time norms, the free
group and Duhamel integral, the boundary operator with its whole-plane
extension, a numerical estimate verifier, and a small-data contraction
solver."""

from .cutoffs import CutoffConfig, DEFAULT_CUTOFF, bracket, cutoff_eval
from .errors import (DataError, GridMismatchError, HalflineError,
                     QuadratureError, RegimeError)
from .lattice import (Field, Grid1D, SpaceTimeGrid, Spectrum, dft_forward,
                      dft_inverse, symmetric_grid)
from .norms import (HalfLineFunction, SobolevParams, halfline_hs_norm,
                    hs_norm, sup_slice_hs, xsb_norm, y_norm, zero_extend,
                    zsb_norm)
from .propagator import InitialData, duhamel_apply, trace_p, trace_q, w_r_apply
from .boundary import (BoundarySpectrum, F_kernel, FrequencyProfile,
                       boundary_spectrum, i3_spectrum, phi_bdr_apply,
                       profile_build, theta1_eval, theta_eval, w_bdr_direct)

__all__ = [name for name in dir() if not name.startswith("_")]
