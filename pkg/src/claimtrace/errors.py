"""Exception hierarchy shared by every claimtrace module.

Graph construction, scoring, metric, gate, and store failures each get a
distinct class so callers (CLI exit codes, HTTP handlers) can map them
without string matching.
"""


class ClaimtraceError(Exception):
    """Base class for every error raised by this package."""


# -- graph construction / validation ------------------------------------


class DuplicateId(ClaimtraceError):
    """A node id is already present in the graph (any node kind)."""


class InvalidNode(ClaimtraceError):
    """A node violates its own invariants (empty text, bad kind, bad id)."""


class UnknownEndpoint(ClaimtraceError):
    """An edge references a node id that is not in the graph."""


class CycleIntroduced(ClaimtraceError):
    """Adding the edge would create a cycle over lineage relations."""


class StrengthOnNonSupport(ClaimtraceError):
    """An entailment strength was supplied for a non-supports relation."""


class MissingStrength(ClaimtraceError):
    """A supports edge has no entailment strength."""


class EdgeIntoSource(ClaimtraceError):
    """Source nodes never have incoming edges."""


class EdgeOutOfClaim(ClaimtraceError):
    """Claim nodes never have outgoing edges."""


class DuplicateEdge(ClaimtraceError):
    """The (from, to, rel) triple is already present."""


class UnknownClaim(ClaimtraceError):
    """The id does not name any node in the graph."""


class NotAClaim(ClaimtraceError):
    """The id names a source or reasoning node where a claim is required."""


# -- scoring -------------------------------------------------------------


class ScorerError(ClaimtraceError):
    """Base class for scoring backend failures."""


class EmptyText(ScorerError):
    """Scoring was asked to compare an empty text."""


class RemoteUnavailable(ScorerError):
    """The remote scoring service could not be reached after retries."""


class RemoteMalformedResponse(ScorerError):
    """The remote scoring service returned an unusable response."""


class InvalidConfig(ClaimtraceError):
    """A configuration document violates its invariants."""


# -- metrics -------------------------------------------------------------


class EmptyClaimSet(ClaimtraceError):
    """A per-claim metric was requested on a graph with no claims."""


class EmptySample(ClaimtraceError):
    """An empirical mean was requested over zero timings."""


class InvalidTiming(ClaimtraceError):
    """An audit timing has a non-positive duration."""


class UnknownNodeInAnnotation(ClaimtraceError):
    """A contradiction annotation references a node not in the graph."""


# -- gate ----------------------------------------------------------------


class UnknownAnnotation(ClaimtraceError):
    """A resolution targets an annotation whose nodes are not in the graph."""


class DuplicateResolution(ClaimtraceError):
    """The annotation has already been resolved."""


# -- store ---------------------------------------------------------------


class UnknownGraph(ClaimtraceError):
    """No event log exists for the requested graph id."""


class CorruptLog(ClaimtraceError):
    """An event log failed its checksum, ordering, or framing checks."""


class StorageFull(ClaimtraceError):
    """The store's byte quota would be exceeded by this append."""


class SchemaViolation(ClaimtraceError):
    """A trace record or document does not match its schema.

    Carries the offending line number (1-based) and field when known.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        super().__init__(message)
        self.line = line
        self.field = field
