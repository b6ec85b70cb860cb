"""Thermoelastic Bresse beam models: catalog, discretization, integration and diagnostics."""

from .diagnostics import (
    EnergyReport,
    SpectrumReport,
    dissipation_residual,
    energy,
    energy_report,
    fit_decay,
    spectrum,
)
from .discretization import SemiDiscreteSystem, assemble_matrix, build_grid, build_system, discretize, expand_memory
from .model_catalog import (
    BoundaryCondition,
    Cattaneo,
    Coefficients,
    ColemanGurtin,
    CouplingPattern,
    Fourier,
    GreenNaghdiIII,
    GurtinPipkin,
    LordShulman,
    ModelDescription,
    ModelSpec,
    PhysicalParams,
    PronyKernel,
    TypeIIIMemory,
    TzouDPL,
    assemble_model,
    catalog_entries,
    compute_forces,
    derive_coefficients,
    stability_number,
)
from .time_integration import IntegratorConfig, Scheme, Trajectory, integrate, step

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "Cattaneo",
    "Coefficients",
    "ColemanGurtin",
    "CouplingPattern",
    "EnergyReport",
    "Fourier",
    "GreenNaghdiIII",
    "GurtinPipkin",
    "IntegratorConfig",
    "LordShulman",
    "ModelDescription",
    "ModelSpec",
    "PhysicalParams",
    "PronyKernel",
    "Scheme",
    "SemiDiscreteSystem",
    "SpectrumReport",
    "Trajectory",
    "TypeIIIMemory",
    "TzouDPL",
    "assemble_matrix",
    "assemble_model",
    "build_grid",
    "build_system",
    "catalog_entries",
    "compute_forces",
    "derive_coefficients",
    "discretize",
    "dissipation_residual",
    "energy",
    "energy_report",
    "expand_memory",
    "fit_decay",
    "integrate",
    "spectrum",
    "stability_number",
    "step",
]
