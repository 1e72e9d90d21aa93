"""Exception hierarchy for the toolchain."""


class DocXChainError(Exception):
    """Base class for all toolchain errors."""


class InputError(DocXChainError):
    """Problems with input files or arguments."""


class UnsupportedFormat(InputError):
    """File extension is not one of the supported input formats."""


class CorruptFile(InputError):
    """The file could not be decoded."""


class EmptyDocument(InputError):
    """A document with zero pages."""


class PageOutOfRange(InputError):
    """Requested page index does not exist."""


class BackendError(DocXChainError):
    """Problems talking to an inference backend."""


class BackendUnavailable(BackendError):
    """Backend endpoint unreachable, spawn failed, or timed out."""


class BackendProtocolError(BackendError):
    """Backend produced a response violating the wire protocol."""


class ParseError(DocXChainError):
    """The document content could not be parsed as requested."""


class EmptyCrop(ParseError):
    """Recognition crop has no area after clipping to the page."""


class NotATable(ParseError):
    """Fewer than two ruling separators on one of the axes."""


class NonRectangularSpan(ParseError):
    """Merged grid units do not form a full rectangle."""


class CsvSpanUnsupported(ParseError):
    """CSV export requested for a table containing spanned cells."""


class SpecOverlap(DocXChainError):
    """Synthetic page spec violates block separation constraints."""


class AddressInUse(DocXChainError):
    """Requested server address is already bound."""
