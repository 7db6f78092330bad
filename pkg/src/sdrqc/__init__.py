"""Sparse distributed codes over winner-take-all clusters.

One active code is simultaneously a specific retrieved item and a graded
likelihood distribution over everything stored, and both storing and
recalling cost the same number of primitive operations no matter how many
items the memory holds. The `oracle` module carries the explicit localist
reference the claims are checked against.
"""

from .bench import (
    ScalingReport,
    ScalingRow,
    SiscReport,
    SiscRow,
    check_scaling,
    check_sisc,
    emit_report,
    run_scaling,
    run_sisc,
)
from .codes import (
    Code,
    FieldGeometry,
    Likelihood,
    code_from_text,
    code_to_text,
    enumerate_codes,
    intersection,
    likelihood,
    num_codes,
    num_levels,
)
from .counters import CostReport
from .errors import (
    CapacityOverflowError,
    DuplicateLabelError,
    EmptyRegistryError,
    GeometryMismatchError,
    ModelFormatError,
    ModelLockedError,
    NoActiveStateError,
    PatternGenerationError,
    SdrqcError,
    WidthMismatchError,
)
from .memory import (
    Activation,
    ModelParams,
    QueryResult,
    SdrMemory,
    StepResult,
)
from .model_io import load_model, save_model
from .oracle import (
    ExplicitSuperposition,
    Registry,
    RegistryEntry,
    ScanResult,
    TransitionTable,
    evolve_explicit,
    implied_superposition,
    linear_scan_best_match,
    load_registry_file,
    save_registry_file,
    superposition_from_code,
)
from .patterns import (
    BitPattern,
    corrupt_pattern,
    disjoint_patterns,
    distinct_random_patterns,
    jaccard,
    load_pattern_file,
    overlap_pattern,
    random_pattern,
)

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "BitPattern",
    "CapacityOverflowError",
    "Code",
    "CostReport",
    "DuplicateLabelError",
    "EmptyRegistryError",
    "ExplicitSuperposition",
    "FieldGeometry",
    "GeometryMismatchError",
    "Likelihood",
    "ModelFormatError",
    "ModelLockedError",
    "ModelParams",
    "NoActiveStateError",
    "PatternGenerationError",
    "QueryResult",
    "Registry",
    "RegistryEntry",
    "ScalingReport",
    "ScalingRow",
    "ScanResult",
    "SdrMemory",
    "SdrqcError",
    "SiscReport",
    "SiscRow",
    "StepResult",
    "TransitionTable",
    "WidthMismatchError",
    "check_scaling",
    "check_sisc",
    "code_from_text",
    "code_to_text",
    "corrupt_pattern",
    "disjoint_patterns",
    "distinct_random_patterns",
    "emit_report",
    "enumerate_codes",
    "evolve_explicit",
    "implied_superposition",
    "intersection",
    "jaccard",
    "likelihood",
    "linear_scan_best_match",
    "load_model",
    "load_pattern_file",
    "load_registry_file",
    "num_codes",
    "num_levels",
    "overlap_pattern",
    "random_pattern",
    "run_scaling",
    "run_sisc",
    "save_model",
    "save_registry_file",
    "superposition_from_code",
    "__version__",
]
