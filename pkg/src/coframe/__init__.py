"""Exterior calculus over orthonormal coframes, with the 3-sphere as the
built-in model: curl eigenforms, Poisson one-forms, connection forms and
the Xi / Bott obstruction integrals.
"""

from .chart import (ChartPoint, FrameSpec, coframe_at, embed, frame_at, haar_total,
                    measure_weight, metric_from_embedding, s3_frame)
from .errors import (CoframeError, ConfigError, DegreeError, EvaluationError,
                     IllConditionedError, InconsistentSystemError, NonFiniteError,
                     SingularChartError)
from .forms import (Form, exterior_d, form_norm, hodge_star, inner, interior_product,
                    max_abs, omega, one_form, pullback_top, three_form, two_form,
                    volume_form, wedge, zero_form)
from .obstruction import (BottClass, ObstructionReport, QuadratureGrid, bott_class,
                          bott_terms, curvature_and_chern, gauge_connections,
                          integrate_top, run_verification, xi_form)
from .poisson import (ConnectionSolution, PoissonPair, build_poisson_pair,
                      compatibility_check, constant_gauge, curl, eigenvalue_check,
                      jacobi_check, paper_gauge, solve_connection, zero_gauge)
from .scalar import PHI, PSI, THETA, Dual3, PointSet, ScalarField, frame_derivative

__version__ = "0.1.0"

__all__ = [
    "BottClass", "ChartPoint", "CoframeError", "ConfigError", "ConnectionSolution",
    "DegreeError", "Dual3", "EvaluationError", "Form", "FrameSpec",
    "IllConditionedError", "InconsistentSystemError", "NonFiniteError",
    "ObstructionReport", "PHI", "PSI", "PointSet", "PoissonPair", "QuadratureGrid",
    "ScalarField", "SingularChartError", "THETA", "bott_class", "bott_terms",
    "build_poisson_pair", "coframe_at", "compatibility_check", "constant_gauge",
    "curl", "curvature_and_chern", "eigenvalue_check", "embed", "exterior_d",
    "form_norm", "frame_at", "frame_derivative", "gauge_connections", "haar_total",
    "hodge_star", "inner", "integrate_top", "interior_product", "jacobi_check",
    "max_abs", "measure_weight", "metric_from_embedding", "omega", "one_form",
    "paper_gauge", "pullback_top", "run_verification", "s3_frame", "solve_connection",
    "three_form", "two_form", "volume_form", "wedge", "xi_form", "zero_form",
    "zero_gauge",
]
