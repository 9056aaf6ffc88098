"""Thin scikit-learn style wrappers around conversion and validation.

These make the converter and validator usable inside sklearn pipelines and
with ``clone``/``get_params``. Neither estimator learns anything from data;
``fit`` only checks its input and resolves configuration.
"""

from __future__ import annotations

from collections.abc import Iterable

from sklearn.base import BaseEstimator, TransformerMixin

from .conllu import Sentence, Treebank, parse_treebank
from .schema import DEFAULT_REGISTRY, SchemaRegistry, load_registry
from .transform import RULE_ORDER, apply_all, parse_rule_set
from .validator import validate_sentence


def check_sentences(X) -> list[Sentence]:
    """Coerce a treebank, CoNLL-U text, or iterable of sentences to a list.

    Raises TypeError for anything else and ConlluError for malformed text.
    """
    if isinstance(X, Sentence):
        return [X]
    if isinstance(X, str):
        return list(parse_treebank(X, strict=True))
    if isinstance(X, Treebank):
        return list(X.sentences)
    if isinstance(X, Iterable):
        items = list(X)
        for i, s in enumerate(items):
            if not isinstance(s, Sentence):
                raise TypeError(f"item {i} is {type(s).__name__}, expected Sentence")
        return items
    raise TypeError(f"expected sentences, got {type(X).__name__}")


def _resolve_registry(registry) -> SchemaRegistry:
    if registry is None:
        return DEFAULT_REGISTRY
    if isinstance(registry, SchemaRegistry):
        return registry
    return load_registry(registry)


def _resolve_rules(rules) -> frozenset:
    if rules is None:
        return frozenset(RULE_ORDER)
    if isinstance(rules, str):
        return parse_rule_set(rules)
    return parse_rule_set(",".join(rules))


class MudtConverter(TransformerMixin, BaseEstimator):
    """Rewrites UD-style trees into the MUDT scheme.

    Parameters
    ----------
    registry : SchemaRegistry, path, or None
    rules : iterable of rule ids, comma-separated string, or None for all
    """

    def __init__(self, registry=None, rules=None):
        self.registry = registry
        self.rules = rules

    def fit(self, X=None, y=None):
        if X is not None:
            check_sentences(X)
        self.registry_ = _resolve_registry(self.registry)
        self.rules_ = _resolve_rules(self.rules)
        return self

    def _check_fitted(self):
        if not hasattr(self, "rules_"):
            from sklearn.exceptions import NotFittedError
            raise NotFittedError("call fit before transform")

    def transform_with_trace(self, X):
        self._check_fitted()
        out, traces = [], []
        for i, s in enumerate(check_sentences(X), 1):
            converted, trace = apply_all(s, self.registry_, self.rules_, sent_id=s.sent_id or str(i))
            out.append(converted)
            traces.append(trace)
        return out, traces

    def transform(self, X):
        return self.transform_with_trace(X)[0]


class MudtValidator(BaseEstimator):
    """Predicts whether each sentence passes validation (no errors)."""

    def __init__(self, registry=None):
        self.registry = registry

    def fit(self, X=None, y=None):
        if X is not None:
            check_sentences(X)
        self.registry_ = _resolve_registry(self.registry)
        return self

    def validate(self, X):
        reg = getattr(self, "registry_", None) or _resolve_registry(self.registry)
        return [validate_sentence(s, reg, sent_id=s.sent_id or str(i))
                for i, s in enumerate(check_sentences(X), 1)]

    def predict(self, X) -> list[bool]:
        return [r.passed for r in self.validate(X)]

    def score(self, X, y=None) -> float:
        """Fraction of sentences that pass; with ``y``, accuracy against it."""
        pred = self.predict(X)
        if not pred:
            return 1.0
        if y is None:
            return sum(pred) / len(pred)
        y = list(y)
        if len(y) != len(pred):
            raise ValueError("y must have one label per sentence")
        return sum(bool(a) == bool(b) for a, b in zip(pred, y)) / len(pred)
