"""Bipartite quantum correlations and the inequalities that bound them."""

__version__ = "0.1.0"

from .correlations import (
    BehaviorTable,
    CorrelationPoint,
    CorrelationQuadruple,
    Scenario,
    behavior_from_scenario,
    check_no_signaling,
    correlation_point,
    expectation,
    quadruple,
)
from .errors import (
    DimensionError,
    LocalityViolationError,
    NumericalError,
    QlocalError,
    UnsupportedInputError,
    ValidationError,
)
from .files import ReportDocument, load_scenario, loads_scenario
from .inequalities import (
    InequalityReport,
    all_reports,
    bell_report,
    chsh_value,
    circle_report,
    cirelson_report,
    landau_identity_residual,
    lhv_membership,
    lhv_membership_exact,
    phi_sweep,
    rotated_value,
)
from .models import AxisConfiguration, nonlocal_protocol_quadruple, pr_behavior, pr_correlation
from .optimize import maximize_chsh, maximize_rotated, trace_circle
from .quantum import (
    DichotomicObservable,
    MotherPovm,
    Povm,
    QuantumState,
    bloch_observable,
    coarse_grain,
    difference_operator,
    sharp_to_povm,
    singlet_state,
    verify_norm_identity,
    wings_commute,
)
