"""Coupled harmonic-map / spinor fields on flat 2D charts: exact solutions,
conserved-quantity verification, and a relaxation solver."""

__version__ = "0.1.0"

from .charts import DomainChart, Grid2D, MoebiusMap, bandlimited_field
from .fields import (ELResidual, MapField, TwistedSpinorField, action,
                     curvature_term, dirac_along_map, el_residual, energy,
                     field_scale, project_spinor, spinor_gradient,
                     tangency_defect, tension)
from .identities import (CircleBalance, ConformalCheck, EnergyMomentum,
                         QuadraticDifferential, bochner_defect,
                         conformal_invariance_defect, decay_profile,
                         em_divergence, energy_momentum, growth_function,
                         hopf_differential, map_pullback, pohozaev_defect,
                         self_adjointness_defect, spinor_pullback,
                         weitzenboeck_defect)
from .config import ConfigError, RunConfig, build_pair, load_config, parse_config
from .fieldio import FieldFileError, FieldHeader, read_field, read_header, write_field
from .solutions import (RationalMap, conformal_map_field, conformality_defect,
                        elliptic_conformal_field, harmonic_wrap,
                        inverse_stereographic, sphere_dirichlet_energy,
                        stereo_pair, trivial_pair, twistor_pushforward)
from .solver import SolveReport, SolverConfig, dirac_project, flow_step, solve
from .spinors import (clifford_mul, flat_dirac, hermitian, spinor,
                      spinor_norm2, twistor_defect, twistor_eval,
                      twistor_field)
from .targets import Flat, Sphere, TargetGeometry, make_target
from .verify import run_verification, run_verification_on_fields
