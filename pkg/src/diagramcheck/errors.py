"""Exception hierarchy for the diagramcheck toolkit."""


class DiagramCheckError(Exception):
    """Base class for all toolkit errors."""


# --- image loading / preprocessing ---

class UnreadableFile(DiagramCheckError):
    """File is missing, truncated, or otherwise undecodable."""


class UnsupportedFormat(DiagramCheckError):
    """File decodes but is not PNG or JPEG."""


class InvalidKernel(DiagramCheckError):
    """Morphology kernel dimensions must be odd and positive."""


class VertexOutOfBounds(DiagramCheckError):
    """Radial probe vertex lies outside the mask."""


# --- geometry ---

class TooFewRays(DiagramCheckError):
    """Sector angles need at least two ray directions."""


class DegenerateSegment(DiagramCheckError):
    """Segment with coincident endpoints."""


class CollinearOverlap(DiagramCheckError):
    """Segments lie on one line and share more than a point."""


class BadTopology(DiagramCheckError):
    """Circles are disjoint or nested, so no overlap-region layout exists."""


class EmptyWhole(DiagramCheckError):
    """Denominator mask of an area ratio contains no pixels."""


class DegeneratePolygon(DiagramCheckError):
    """Polygon has fewer than three vertices or zero area."""


# --- constraint evaluation ---

class MissingDetections(DiagramCheckError):
    """A count criterion was evaluated without a detection set."""


class EmptyCriteria(DiagramCheckError):
    """A verdict cannot be aggregated from zero criterion results."""


class UnsupportedRelation(DiagramCheckError):
    """Relation expression falls outside the supported grammar."""


class AxesNotFound(DiagramCheckError):
    """Coordinate axes could not be localized in a function plot."""


class NoVertexFound(DiagramCheckError):
    """No shared ray vertex could be recovered from the image."""


class NoShapeFound(DiagramCheckError):
    """No usable foreground shape was recovered from the image."""


# --- synthesis ---

class InvalidRecipe(DiagramCheckError):
    """Scene recipe parameters do not satisfy their own criterion."""


class InapplicableMutation(DiagramCheckError):
    """Mutation kind does not apply to the given recipe."""


# --- manifests ---

class ManifestParseError(DiagramCheckError):
    """Manifest line failed to parse."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateId(DiagramCheckError):
    """Two manifest records share a problem id."""


class UnknownDomain(DiagramCheckError):
    """Manifest record names a domain outside the supported seven."""
