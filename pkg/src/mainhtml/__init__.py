"""Main-content extraction from HTML pages by block labelling."""

from mainhtml.errors import ExtractionError
from mainhtml.labeler.labels import BlockLabel, LabelSequence
from mainhtml.postprocess import ExtractionResult, ExtractOptions, extract, select_blocks
from mainhtml.preprocess import DocumentPair, SimplifyConfig, build_document_pair

__all__ = [
    "BlockLabel",
    "DocumentPair",
    "ExtractOptions",
    "ExtractionError",
    "ExtractionResult",
    "LabelSequence",
    "SimplifyConfig",
    "build_document_pair",
    "extract",
    "select_blocks",
]
__version__ = "0.1.0"
