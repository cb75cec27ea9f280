"""Simulation and pulse-sequence optimization for an NV-center spin
register under indirect (electron-only) microwave control."""

from .spinsys import CarbonCoupling, NVParams, SpinRegister
from .pulsesim import FidelityReport, PulseSegment, PulseSequence
from .grover import ControlledRxSpec, GroverSpec
from .ga import GAConfig, OptimizationResult, ParameterBounds
from .paperlab import CatalogEntry, NitrogenState, builtin_catalog

__all__ = [
    "CarbonCoupling",
    "NVParams",
    "SpinRegister",
    "FidelityReport",
    "PulseSegment",
    "PulseSequence",
    "ControlledRxSpec",
    "GroverSpec",
    "GAConfig",
    "OptimizationResult",
    "ParameterBounds",
    "CatalogEntry",
    "NitrogenState",
    "builtin_catalog",
]

__version__ = "0.1.0"
