"""Design and analysis toolkit for electrostatically transduced
MEMS/NEMS resonators.

Modal frequencies come from closed-form models (clamped-clamped flexural
beam, in-plane wine-glass disk) cross-checked by an in-house FEM solver;
the electromechanical layer extracts the equivalent series RLC circuit,
transmission response and detection currents; process-aware gap
corrections and application spec profiles drive design checking and
constrained design-space search.

All domain objects are immutable after construction and safe to share
across threads; every operation is deterministic for fixed inputs.
"""

from .core import (EPSILON_0, BeamGeometry, DetectionKind, DiskGeometry,
                   EquivalentCircuit, Material, ModeResult, MosParams,
                   Transducer, VibrationAxis, load_material)

__version__ = "0.1.0"

__all__ = [
    "EPSILON_0", "BeamGeometry", "DetectionKind", "DiskGeometry",
    "EquivalentCircuit", "Material", "ModeResult", "MosParams",
    "Transducer", "VibrationAxis", "load_material", "__version__",
]
