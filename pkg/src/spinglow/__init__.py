"""Thermal radiation and quantum correlations of dipole-coupled two-level atoms in a line."""

__version__ = "0.1.0"

from .linalg import (  # noqa: E402
    EigenSystem,
    ShapeError,
    ValidationError,
    adjoint,
    hermitian_eig,
    kron,
    multiply,
    partial_trace,
    partial_transpose,
)
from .model import (  # noqa: E402
    SpinOperatorSet,
    SystemConfig,
    analytic_line_spectrum,
    build_hamiltonian,
    build_spin_operators,
    ground_state_crossover,
)
from .thermal import ThermalState, published_density_conformance, thermal_state  # noqa: E402
from .radiation import (  # noqa: E402
    ObservationPoint,
    classify,
    g2_closed_form,
    g2_numeric,
    intensity_closed_form,
    intensity_numeric,
    optical_phases,
)
from .correlations import (  # noqa: E402
    QCReport,
    concurrence,
    monogamy_score,
    negativity,
    quantum_discord,
    thermal_qc_report,
    von_neumann_entropy,
)
from .sweeps import (  # noqa: E402
    EstimationResult,
    SweepGrid,
    estimate_distance,
    monogamy_intensity_curve,
    superradiant_peaks,
    sweep,
)
