"""Exception types raised across the pipeline."""


class ExtractionError(Exception):
    """Base class for pipeline errors."""


class EncodingUndecodable(ExtractionError):
    pass


class EmptyDocument(ExtractionError):
    """No block of the document carries visible text."""


class OversizeInput(ExtractionError):
    def __init__(self, token_count: int, context_limit: int) -> None:
        super().__init__(f"{token_count} tokens exceeds context limit {context_limit}")
        self.token_count = token_count
        self.context_limit = context_limit


class InvalidState(ExtractionError):
    pass


class LabelMismatch(ExtractionError):
    pass


class RemoteUnavailable(ExtractionError):
    pass


class MalformedReply(ExtractionError):
    pass


class FallbackFailed(ExtractionError):
    pass


class UnreadableFile(ExtractionError):
    pass
