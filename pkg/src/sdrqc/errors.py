"""Exception types shared across the package.

Every validation failure raises a distinct subclass of SdrqcError so callers
(and the CLI) can distinguish bad geometry from bad files from bad requests
without string matching.
"""

from __future__ import annotations


class SdrqcError(Exception):
    """Base class for all package errors."""


class GeometryMismatchError(SdrqcError):
    """Two objects built against different coding-field geometries were mixed."""


class CapacityOverflowError(SdrqcError):
    """An exact count would exceed the supported integer size."""


class WidthMismatchError(SdrqcError):
    """A bit pattern's width does not match the field it is applied to."""


class NoActiveStateError(SdrqcError):
    """An operation needed an active code but none is set."""


class DuplicateLabelError(SdrqcError):
    """A registry label was registered twice with conflicting content."""


class EmptyRegistryError(SdrqcError):
    """A scan or readout was requested against an empty registry."""


class PatternGenerationError(SdrqcError):
    """A requested pattern (overlap level, disjoint family, ...) is unattainable."""


class ModelFormatError(SdrqcError):
    """A model file is not in the expected format or is damaged."""


class ModelLockedError(SdrqcError):
    """Another process holds the advisory lock for a model file."""
