"""Spectra, twisted geodesics, and trace formulas for compact flat
3-manifolds, built around the tetracosm/didicosm pair of spectral twins.

Everything that can be exact is exact (rational matrices, integer
eigenvalue keys, rational geodesic data); floating point appears only in
heat-trace evaluation, always with certified truncation bounds.
"""

from .errors import (
    CharacterSumError,
    CutoffBudgetError,
    InvalidPresentationError,
    PlatycosmError,
    UnknownPresetError,
    UnsupportedCircumferenceError,
    UnsupportedGeometryError,
)
from .euclid import (
    Isometry,
    Lattice,
    PlatycosmPresentation,
    PRESET_NAMES,
    betti_one,
    compose,
    inverse,
    load_space_file,
    presentation_from_json,
    presentation_to_json,
    preset,
    translation_lattice,
    volume,
)
from .geodesics import (
    BalanceEntry,
    BalancePair,
    BalanceRow,
    GeodesicClass,
    balance_table,
    imprimitivity,
    twist_factor,
    twisted_classes,
    weight,
)
from .selberg import (
    CountingSample,
    HeatTrace,
    HeatTraceConfig,
    counting_function,
    cylinder_heat_integral,
    exercise_identity_residual,
    exercise_identity_sides,
    geometric_heat_trace,
    lattice_count,
    spectral_heat_trace,
    twisted_cylinder_volume,
)
from .spectrum import (
    DualVector,
    IsospectralVerdict,
    OrbitSpec,
    SpectrumTable,
    circle_spectrum,
    dual_lattice,
    is_isospectral,
    multiplicity,
    orbit_dims,
    orbits_in_shell,
    shell,
    spectrum_table,
)

__version__ = "0.1.0"

__all__ = [
    "PlatycosmError",
    "UnknownPresetError",
    "InvalidPresentationError",
    "UnsupportedGeometryError",
    "UnsupportedCircumferenceError",
    "CharacterSumError",
    "CutoffBudgetError",
    "Isometry",
    "Lattice",
    "PlatycosmPresentation",
    "PRESET_NAMES",
    "preset",
    "compose",
    "inverse",
    "translation_lattice",
    "volume",
    "betti_one",
    "presentation_to_json",
    "presentation_from_json",
    "load_space_file",
    "DualVector",
    "OrbitSpec",
    "SpectrumTable",
    "IsospectralVerdict",
    "dual_lattice",
    "shell",
    "multiplicity",
    "orbit_dims",
    "orbits_in_shell",
    "spectrum_table",
    "is_isospectral",
    "circle_spectrum",
    "GeodesicClass",
    "BalanceEntry",
    "BalanceRow",
    "BalancePair",
    "twisted_classes",
    "imprimitivity",
    "twist_factor",
    "weight",
    "balance_table",
    "HeatTrace",
    "HeatTraceConfig",
    "CountingSample",
    "twisted_cylinder_volume",
    "cylinder_heat_integral",
    "lattice_count",
    "spectral_heat_trace",
    "geometric_heat_trace",
    "exercise_identity_sides",
    "exercise_identity_residual",
    "counting_function",
    "__version__",
]
