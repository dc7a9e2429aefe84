"""Exception types shared across the package."""


class FloorbeamError(Exception):
    """Base class for all package-specific errors."""


class CircuitError(FloorbeamError):
    """Malformed circuit description (bad ids, dimensions, nets, alignments)."""


class PlacementError(FloorbeamError):
    """Illegal placement operation: unknown module, double placement, overlap."""


class SearchError(FloorbeamError):
    """Search cannot proceed, e.g. every branch of the tree hit a violation."""
