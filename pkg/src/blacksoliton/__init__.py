"""Numerical laboratory for the black soliton of the cubic defocusing NLS.

Grids and quadrature, analytic soliton profiles, the conserved
functionals (Q, M, E, S and Lam = S - 2E), the linearized operators with
their factorizations and spectra, the exact expansion of Lam around the
soliton, modulation-parameter tracking, and a rotating-frame evolver for
desk-scale orbital-stability experiments.
"""

from .grid import Grid, GridTooSmall, Jet, NotOnGrid, as_jet, jet_product
from .profiles import (SolitonBundle, SpeedOutOfRange, black_soliton,
                       dark_soliton, dark_soliton_jet, du0_jet, d2u0_jet,
                       soliton_jet, translated_soliton)
from .functionals import (BadBoundary, ConservedSet, PerturbationTriple,
                          conserved, distance_dR, rho)
from .operators import (BoundaryPollution, InconsistentPQ, NoConvergence,
                        OperatorKind, OperatorMatrix, SpectrumReport, apply,
                        assemble, coercivity_estimate, duhamel_kernel_k1,
                        duhamel_kernel_kinf, kminus_factors, kplus_factors,
                        qform, reconstruct_u, reconstruct_v, spectrum,
                        w_substitution)
from .expansion import (BDensities, CutOff, CutoffOutsideDomain, ProbeRecord,
                        bident_pointwise, bident_residual, coercivity_probe,
                        lambda_expansion_rhs, lambda_gap, probe_sample, q_total)
from .modulation import (ModulationState, ModulationTracker, RateSystem,
                         ShiftTooLarge, SingularB, f_residual, modulation_rates,
                         solve_modulation)
from .evolution import (LinearSolveFailure, ObserverFailure, SimConfig,
                        Stepper, Trajectory, evolve, from_rotating_frame, step,
                        to_rotating_frame)

__version__ = "0.1.0"
