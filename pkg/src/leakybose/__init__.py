"""Number-phase physics of an interacting Bose condensate leaking from a box."""

from .bogoliubov import FluxParams, GasParams
from .errors import (
    CutoffError,
    LeakyBoseError,
    NumericalError,
    RegimeError,
    TruncationError,
    ValidationError,
)
from .evolution import LeakSchedule, Trajectory, rho_nsib_mixture, rho_prm_npib, trajectory
from .fock import DensityMixture, OffsetFockVector, to_dense, trace_distance
from .measurement import NumberWindow, PhaseKernel
from .states import NpibLabel, csib, npib, nsib

__version__ = "0.1.0"
