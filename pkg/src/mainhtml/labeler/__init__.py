from mainhtml.labeler.fsm import (
    ConstrainedClassifier,
    DecodeState,
    LabelGrammar,
    Phase,
    TokenModel,
    advance,
    constrained_decode,
    decode_labels,
    fsm_next,
)
from mainhtml.labeler.heuristic import HeuristicClassifier, classify_heuristic
from mainhtml.labeler.labels import BlockLabel, Classifier, LabelSequence, render_label_json
from mainhtml.labeler.prompt import build_prompt
from mainhtml.labeler.remote import RemoteClassifier, RemoteConfig, classify_remote

__all__ = [
    "BlockLabel",
    "Classifier",
    "ConstrainedClassifier",
    "DecodeState",
    "HeuristicClassifier",
    "LabelGrammar",
    "LabelSequence",
    "Phase",
    "RemoteClassifier",
    "RemoteConfig",
    "TokenModel",
    "advance",
    "build_prompt",
    "classify_heuristic",
    "classify_remote",
    "constrained_decode",
    "decode_labels",
    "fsm_next",
    "render_label_json",
]
