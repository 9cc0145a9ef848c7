"""Constant negative curvature surfaces from loop group factorization.

The pipeline runs potentials -> half-frame integration -> pointwise
factorization -> reconstruction, with an analysis suite that checks the
resulting surfaces against their defining identities and two independent
reference routes (a direct sine-Gordon solver and the closed-form
pseudo-sphere).
"""

from ._threads import apply_thread_env

apply_thread_env()

from .loops import (DEFAULT_TRUNC, MAX_DEGREE, ParityError, ScalarLaurent,
                    SingularSeriesError, TruncationOverflowError, TwistedLoop,
                    from_coeff, identity_loop, loop_det, loop_eval,
                    loop_inverse, loop_mul, scalar_reciprocal, unitarity_check)
from .potentials import (DomainError, PotentialSpec, eta_minus, eta_plus,
                         from_json, preset_by_name, preset_c0_kink,
                         preset_pseudosphere, preset_vacuum, to_json)
from .frames import (ConnectionField, ConnectionShapeError, FrameField,
                     GridError, HalfFrameFamily, SplitError, birkhoff_split,
                     build_frame_field, extract_connection,
                     integrate_half_frame, truncation_tail, zcc_residual)
from .sym import (E1, E2, E3, StructureError, SurfaceGrid,
                  analytic_normal_derivatives, analytic_tangents, su2_to_r3,
                  sym_immersion)
from .analysis import (FrameReport, GeometryReport, angle_field,
                       asymptotic_torsion, complete_frame, front_from_normal,
                       fundamental_forms, harmonicity_residual,
                       normal_sign_comparison, procrustes_align,
                       recover_boundary_angles, sine_gordon_residual,
                       tangent_frame)
from .reparam import (ChebyshevError, ChebyshevResult, GraphPatch, PatchError,
                      ReparamMap1D, chebyshev_normalize, graph_patch,
                      graph_patch_evaluated)
from .oracles import (ConvergenceError, GoursatSolution, goursat_solve,
                      pseudosphere_closed_form, pseudosphere_tangents)

__version__ = "0.1.0"
