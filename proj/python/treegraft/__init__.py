from ._core import (
    TreegraftError,
    __version__,
    bleu,
    decode,
    extract_rules,
    graft_sentence,
    modality_labels,
    named_entity_labels,
    normalize_tree,
    parse_standoff,
    phrase_pairs,
    samt_label,
    score_grammar,
    semantic_part,
    tree_yield,
)

__all__ = [
    "TreegraftError",
    "__version__",
    "bleu",
    "decode",
    "extract_rules",
    "graft_sentence",
    "modality_labels",
    "named_entity_labels",
    "normalize_tree",
    "parse_standoff",
    "phrase_pairs",
    "samt_label",
    "score_grammar",
    "semantic_part",
    "tree_yield",
]
