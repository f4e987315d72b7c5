"""Exception types raised across the package."""


class SquareCutError(Exception):
    """Base class for all package errors."""


class DegenerateTemplate(SquareCutError):
    """All template corners coincide with the centroid; cannot normalize."""


class NoIntersection(SquareCutError):
    """A ray missed the closed template contour (corrupt polygon)."""


class DegenerateRay(SquareCutError):
    """Ray with zero intersection distance; nodes cannot be placed."""


class FormatError(SquareCutError):
    """Malformed PGM payload (bad magic, truncated data, unsupported maxval)."""


class InvalidGeometry(SquareCutError):
    """Synthetic-image geometry outside the canvas or otherwise unusable."""


class Unbounded(SquareCutError):
    """No finite cut separates source from sink."""


class EmptyRay(SquareCutError):
    """A ray has no node in the source set; the forcing invariant was broken."""


class DimensionMismatch(SquareCutError):
    """Masks differ in shape or spacing and cannot be compared."""


class EmptyInput(SquareCutError):
    """Summary statistics requested for an empty value list."""


class SeedOutOfImage(SquareCutError):
    """Seed point lies outside the image bounds."""
