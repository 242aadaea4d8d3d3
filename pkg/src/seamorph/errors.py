"""Exception types raised across the pipeline.

Every failure mode that callers are expected to handle has its own class so
that per-item fault isolation in the orchestrator can count and log them by
name.
"""


class SeamorphError(Exception):
    """Base class for all pipeline errors."""


# --- ingest / persistence ---------------------------------------------------

class MissingImage(SeamorphError):
    """An annotation references an image file that does not exist."""


class MalformedAnnotation(SeamorphError):
    """The annotation file violates the expected COCO-style schema."""


class OutOfBoundsBox(SeamorphError):
    """A bounding box exceeds its image dimensions."""


class IoFailure(SeamorphError):
    """Reading or writing a ledger/manifest failed."""


class ValidationError(SeamorphError):
    """A record violates its structural invariants."""


class EmptyManifest(SeamorphError):
    """A statistic was requested over a manifest with zero generated images."""


# --- generation backends ----------------------------------------------------

class BackendUnavailable(SeamorphError):
    """The generation service/model could not be reached or loaded."""


class BackendTimeout(SeamorphError):
    """A generation request exceeded its configured deadline."""


class GenerationFailed(SeamorphError):
    """The backend accepted the request but failed to produce images."""

    def __init__(self, message: str, request_id: str | None = None):
        super().__init__(message)
        self.request_id = request_id


# --- classifiers / checkers -------------------------------------------------

class ModelMissing(SeamorphError):
    """A learned-mode model artifact is required but not available."""


class UnreadableImage(SeamorphError):
    """An image buffer or file could not be decoded."""


class EmptyClass(SeamorphError):
    """A training corpus has zero examples for one of its classes."""


class DivergedTraining(SeamorphError):
    """Training produced a non-finite loss."""


class DimensionMismatch(SeamorphError):
    """Edited image dimensions do not match the source (resize was skipped)."""


class NoValidPlacement(SeamorphError):
    """No candidate crop placement fits inside the image bounds."""


class EmptyCrop(SeamorphError):
    """A crop has zero area and cannot be checked."""


# --- evaluation --------------------------------------------------------------

class UnknownImageId(SeamorphError):
    """A detection references an image id absent from the manifest."""


# --- review service ----------------------------------------------------------

class UnknownSession(SeamorphError):
    """Referenced review session does not exist."""


class UnknownItem(SeamorphError):
    """Verdict submitted for an item outside the session sample."""


class DuplicateVerdict(SeamorphError):
    """The item already has a recorded verdict in this session."""


class NoSessions(SeamorphError):
    """A cross-session statistic was requested with no sessions."""
