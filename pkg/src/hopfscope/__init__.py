"""Numerical dynamics near a Hopf bifurcation in a combustion-interface model.

The package exposes the three-mode combustion vector field in original and
Hopf normal coordinates, Taylor-coefficient extraction, the closed-form
slow-manifold and Lyapunov-coefficient asymptotics, adaptive integration
with event detection, Poincare return maps and bifurcation sweeps, and
interspike-interval analysis, plus a CLI (``hopfscope``) that reproduces
the standard experiments as CSV/JSON.
"""

from .asymptotics import (
    HopfAsymptotics,
    IsiBounds,
    analytic_map_G,
    build_trig_polys,
    curvature_torsion,
    fit_second_lyapunov,
    fixed_point_G,
    hopf_asymptotics,
    isi_bounds,
    lyapunov1,
    orbit_approx,
    slow_manifold_constants,
    transit_time,
    u_poly,
    xi0_poly,
)
from .errors import (
    DomainError,
    EventError,
    FitError,
    FlatSignalError,
    HopfscopeError,
    IntegrationError,
    NotMultimodalError,
    RootFindError,
)
from .integrate import (
    Event,
    EventSpec,
    IntegratorConfig,
    Trajectory,
    dominant_frequencies,
    integrate,
    locate_events,
)
from .isi import (
    IsiSeries,
    SpikeTrain,
    check_bounds,
    detect_multimodal,
    fit_isi_scaling,
    isi_series,
    measure_spike_train,
)
from .maps import (
    ContractionProfile,
    OrbitClass,
    ReturnMapData,
    classify_orbit,
    contraction_profile,
    first_return_map,
    flow_map_Q,
    gamma_of_p,
    p_for_gamma,
    sweep_bifurcation,
)
from .model import (
    KineticParams,
    LinearData,
    NormalForm,
    alpha_of_nu,
    find_hopf_nu,
    jacobian_origin,
    kinetic,
    kinetic_deriv,
    normal_form,
    normal_transform,
    nu_of_alpha,
    rhs_normal,
    rhs_original,
)
from .taylor import TaylorData, extract_taylor, taylor_of_model, taylor_poly
from .trig import TrigPoly

__version__ = "0.1.0"
