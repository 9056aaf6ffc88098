"""Toolkit for the Modern Uyghur Dependency Treebank annotation scheme."""

__version__ = "0.1.0"

from .conllu import (
    DependencyTree,
    MorphSegmentation,
    Sentence,
    Token,
    Treebank,
    build_tree,
    parse_feats,
    parse_mseg,
    parse_treebank,
    read_treebank,
    serialize_treebank,
)
from .errors import ConlluError, MudtError, PairingError, SchemaError, TransformError, TreeError
from .metrics import align_tokens, divergence, score
from .schema import DEFAULT_REGISTRY, SchemaRegistry, load_registry, normalize_label, validate_assignment
from .transform import apply_all
from .validator import check_projectivity, validate_sentence
from .estimators import MudtConverter, MudtValidator

__all__ = [
    "DEFAULT_REGISTRY", "ConlluError", "DependencyTree", "MorphSegmentation", "MudtConverter",
    "MudtError", "MudtValidator", "PairingError", "SchemaError", "SchemaRegistry", "Sentence",
    "Token", "TransformError", "Treebank", "TreeError", "align_tokens", "apply_all", "build_tree",
    "check_projectivity", "divergence", "load_registry", "normalize_label", "parse_feats",
    "parse_mseg", "parse_treebank", "read_treebank", "score", "serialize_treebank",
    "validate_assignment", "validate_sentence",
]
