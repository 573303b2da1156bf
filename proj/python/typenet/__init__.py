import os as _os

_data = _os.path.join(_os.path.dirname(__file__), "data")
if _os.path.isdir(_data):
    _os.environ.setdefault("TYPENET_DATA", _data)

from ._core import (
    SEQ_LEN,
    SEQ_LEN_NO_RETURN_EXPRS,
    EMBEDDING_DIM,
    Classifier,
    DataError,
    NumericError,
    TypeVocabulary,
    UsageError,
    default_epochs,
    embedding_dim,
    encode_type,
    evaluate,
    extract_functions_jsonl,
    gate_param_count,
    normalize_text,
    param_count,
    preprocess_comment,
    preprocess_identifier,
    return_expression_tokens,
    split_identifier,
)

__all__ = [
    "SEQ_LEN",
    "SEQ_LEN_NO_RETURN_EXPRS",
    "EMBEDDING_DIM",
    "Classifier",
    "DataError",
    "NumericError",
    "TypeVocabulary",
    "UsageError",
    "default_epochs",
    "embedding_dim",
    "encode_type",
    "evaluate",
    "extract_functions_jsonl",
    "gate_param_count",
    "normalize_text",
    "param_count",
    "preprocess_comment",
    "preprocess_identifier",
    "return_expression_tokens",
    "split_identifier",
]
