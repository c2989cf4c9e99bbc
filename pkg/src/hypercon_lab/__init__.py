"""Finite-matrix laboratory for hypercontractions, weighted Bergman
shifts, little Hankel operators and weighted admissibility."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .kernels import BACKEND, available_backends
from .operator_core import (Exp, Log, Mobius, Power, PositivityReport, SpectralData,
                            frac_resolvent_power, frac_resolvent_power_calculus,
                            is_psd, matrix_function, spectral_data, spectral_radius)
from .hypercon import (GammaThreshold, HyperconVerdict, binomial_defect,
                       gamma_defect_series, gamma_defect_superop, gamma_threshold,
                       gamma_verdict, is_n_hypercontraction)
from .bergman import (BergmanModel, BergmanVector, adjoint_shift, adjoint_shift_matrix,
                      inner, monomial_norm, monomial_norms, norm, reproducing_kernel,
                      shift, shift_matrix)
from .hankel import (HankelSymbol, RktReport, gamma_matrix, little_hankel_apply,
                     little_hankel_matrix, rkt_experiment)
from .adm_discrete import (AdmissibilityReport, DiscreteSystem, ResolventScan,
                           control_admissibility, obs_gramian, resolvent_sup,
                           weiss_ratio)
from .semigroup import (BridgePair, ContAdmReport, ContinuousSystem, bridge,
                        cogenerator, cont_obs_gramian, continuous_weiss_experiment,
                        lyapunov_chain, resolvent_sup_halfplane, semigroup_at,
                        two_hypercontractive_tests)
