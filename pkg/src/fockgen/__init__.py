"""Classical-drive pulse planning and verification for Fock-state synthesis
in a single bosonic mode coupled to a driven two-level system."""

from .fockspace import FockConfig
from .hamiltonians import DriveParams, SystemParams
from .sidebands import SidebandSpec
from .synthesis import PulseSchedule, TargetState, plan_schedule

__all__ = [
    "FockConfig",
    "SystemParams",
    "DriveParams",
    "SidebandSpec",
    "TargetState",
    "PulseSchedule",
    "plan_schedule",
]

__version__ = "0.1.0"
