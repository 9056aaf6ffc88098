"""POS tagset, relation inventory and feature vocabulary."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Mapping

from . import diagnostics as diag
from .conllu import Token, canonical_feats
from .errors import SchemaError


@dataclass(frozen=True)
class PosTag:
    code: str
    name: str


@dataclass(frozen=True)
class RelationLabel:
    label: str
    main_category: str
    kind: str

    def __str__(self):
        return self.label


POS_TAGS = (
    PosTag("N", "Noun"),
    PosTag("A", "Adjective"),
    PosTag("Num", "Numeral"),
    PosTag("M", "Measure"),
    PosTag("Adv", "Adverb"),
    PosTag("Pron", "Pronoun"),
    PosTag("Onom", "Onomatopoeia"),
    PosTag("V", "Verb"),
    PosTag("Post", "Postposition"),
    PosTag("Conj", "Conjunction"),
    PosTag("Part", "Particle"),
    PosTag("Intj", "Interjection"),
    PosTag("Aux", "Auxiliary Verb"),
)

# Punctuation tokens sit outside the 13 lexical tags.
PUNCT_TAGS = frozenset({"Punct"})

CORE, MODIFIER, FUNCTION, STRUCTURAL = "core-argument", "modifier", "function", "structural"

_RELATIONS = (
    ("advcl", MODIFIER),
    ("appos", MODIFIER),
    ("aux", FUNCTION),
    ("case:abl", MODIFIER),
    ("case:loc", MODIFIER),
    ("case:dat", MODIFIER),
    ("case:poss", MODIFIER),
    ("cc", FUNCTION),
    ("conj", MODIFIER),
    ("cop", FUNCTION),
    ("cop:zero", FUNCTION),
    ("det", MODIFIER),
    ("discourse", MODIFIER),
    ("fixed", FUNCTION),
    ("instr:case=loc", MODIFIER),
    ("instr:case=dat", MODIFIER),
    ("instr:case=post", MODIFIER),
    ("advmod", MODIFIER),
    ("amod", MODIFIER),
    ("nmod", MODIFIER),
    ("nsubj", CORE),
    ("nummod", MODIFIER),
    ("obj", CORE),
    ("post", FUNCTION),
    ("punct", STRUCTURAL),
    ("root", STRUCTURAL),
)

RELATIONS = tuple(RelationLabel(lab, lab.split(":", 1)[0], kind) for lab, kind in _RELATIONS)

DEFAULT_ALIASES = {
    "instr:post": "instr:case=post",
    "instr:loc": "instr:case=loc",
    "instr:dat": "instr:case=dat",
    "case:gen": "case:poss",
}

DEFAULT_FEATS = {
    "Case": frozenset({"ABL", "LOC", "DAT", "GEN", "POSS"}),
    "Tense": frozenset({"Past", "Pres", "Fut"}),
    "Number": frozenset({"Sing", "Plur"}),
    "Person": frozenset({"1", "2", "3"}),
}

DEFAULT_FIXED = (("sewr", "qil"), ("həyran", "bol"), ("jaxfi", "kör"))

DEFAULT_INSTRUMENTAL_POSTPOSITIONS = frozenset({"bilən", "bilen", "arqiliq"})

NOUN_SUBFEATURES = frozenset({"pern", "job", "date", "state"})
_SUBFEATURE = re.compile(r"\[\+(\w+)\]")

# Metric relation sets (see metrics.score).
DEFAULT_CONTENT_RELATIONS = frozenset({
    "root", "nsubj", "obj", "advcl", "amod", "advmod", "nmod", "nummod", "appos",
    "conj", "det", "discourse", "fixed",
    "case:abl", "case:loc", "case:dat", "case:poss",
    "instr:case=loc", "instr:case=dat", "instr:case=post",
})
DEFAULT_FUNCTION_RELATIONS = frozenset({"aux", "cc", "cop", "cop:zero", "post", "punct"})
DEFAULT_MLAS_FEATURES = frozenset({"Case", "Number", "Person", "Tense"})


@dataclass(frozen=True)
class SchemaRegistry:
    pos_tags: tuple[PosTag, ...] = POS_TAGS
    relations: tuple[RelationLabel, ...] = RELATIONS
    feat_vocab: Mapping[str, frozenset] = field(default_factory=lambda: dict(DEFAULT_FEATS))
    aliases: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_ALIASES))
    fixed_lexicon: tuple[tuple[str, str], ...] = DEFAULT_FIXED
    instrumental_postpositions: frozenset = DEFAULT_INSTRUMENTAL_POSTPOSITIONS
    content_relations: frozenset = DEFAULT_CONTENT_RELATIONS
    function_relations: frozenset = DEFAULT_FUNCTION_RELATIONS
    mlas_features: frozenset = DEFAULT_MLAS_FEATURES

    def __post_init__(self):
        labels = {r.label for r in self.relations}
        for alias, target in self.aliases.items():
            if target not in labels:
                raise SchemaError(f"alias {alias!r} points to unregistered label {target!r}")
        for entry in self.fixed_lexicon:
            if len(entry) != 2 or not all(entry):
                raise SchemaError(f"fixed lexicon entry {entry!r} is not a word pair", code="E_CONFIG")

    @property
    def pos_codes(self) -> frozenset:
        return frozenset(t.code for t in self.pos_tags)

    @property
    def labels(self) -> frozenset:
        return frozenset(r.label for r in self.relations)

    def relation(self, label: str) -> RelationLabel:
        for rel in self.relations:
            if rel.label == label:
                return rel
        raise SchemaError(f"unknown relation {label!r}")

    def main_categories(self) -> dict[str, list[str]]:
        groups: dict[str, list[str]] = {}
        for rel in self.relations:
            groups.setdefault(rel.main_category, []).append(rel.label)
        return groups

    def is_fixed_pair(self, first_lemma: str, second_lemma: str) -> bool:
        pair = (first_lemma.casefold(), second_lemma.casefold())
        return any((a.casefold(), b.casefold()) == pair for a, b in self.fixed_lexicon)

    def is_instrumental(self, tok: Token) -> bool:
        words = {w.casefold() for w in self.instrumental_postpositions}
        return tok.lemma.casefold() in words or tok.form.casefold() in words


DEFAULT_REGISTRY = SchemaRegistry()


def normalize_label(raw: str, reg: SchemaRegistry = DEFAULT_REGISTRY) -> RelationLabel:
    """Resolve aliases (``instr:post`` -> ``instr:case=post``)."""
    key = raw.strip().casefold()
    if not key:
        raise SchemaError("empty relation label")
    key = reg.aliases.get(key, key)
    for rel in reg.relations:
        if rel.label == key:
            return rel
    raise SchemaError(f"unknown relation {raw!r}")


def subfeatures(pos_sub: str) -> list[str]:
    return _SUBFEATURE.findall(pos_sub)


def validate_assignment(tok: Token, reg: SchemaRegistry = DEFAULT_REGISTRY) -> list[diag.Diagnostic]:
    out = []
    ids = (tok.id,)
    if tok.pos not in reg.pos_codes and tok.pos not in PUNCT_TAGS:
        out.append(diag.error("E_POS_UNKNOWN", ids, f"unknown POS {tok.pos!r}"))
    if tok.pos_sub is not None and tok.pos != "N":
        noun_only = [f for f in subfeatures(tok.pos_sub) if f in NOUN_SUBFEATURES]
        if noun_only:
            out.append(diag.error(
                "E_POS_SUB", ids, f"noun subcategory {tok.pos_sub!r} on POS {tok.pos!r}"))
    if tok.deprel not in reg.labels:
        try:
            canonical = normalize_label(tok.deprel, reg).label
        except SchemaError:
            out.append(diag.error("E_DEPREL_UNKNOWN", ids, f"unknown relation {tok.deprel!r}"))
        else:
            out.append(diag.warning(
                "E_LABEL_ALIAS", ids, f"relation {tok.deprel!r} should be written {canonical!r}"))
    vocab = {k: {v.casefold() for v in vals} for k, vals in reg.feat_vocab.items()}
    for key, value in tok.feats.items():
        if key not in vocab:
            out.append(diag.warning("E_FEAT_KEY", ids, f"feature {key!r} not in vocabulary"))
        elif value.casefold() not in vocab[key]:
            out.append(diag.error("E_FEAT_VALUE", ids, f"value {key}={value} not in vocabulary"))
    return out


# -- config -------------------------------------------------------------------

_SECTIONS = {
    "aliases", "feats", "fixed", "instrumental",
    "content_relations", "function_relations", "mlas_features",
}


def parse_registry_config(text: str) -> dict[str, list[tuple[str, str]]]:
    """Parse ``[section]`` headers followed by ``key<TAB>value`` lines."""
    sections: dict[str, list[tuple[str, str]]] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.rstrip()
        if not line or line.lstrip().startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in _SECTIONS:
                raise SchemaError(f"line {lineno}: unknown section [{current}]", code="E_CONFIG")
            sections.setdefault(current, [])
            continue
        if current is None:
            raise SchemaError(f"line {lineno}: entry outside any section", code="E_CONFIG")
        key, _, value = line.partition("\t")
        sections[current].append((key.strip(), value.strip()))
    return sections


def registry_from_config(text: str, base: SchemaRegistry = DEFAULT_REGISTRY) -> SchemaRegistry:
    """Extend ``base`` with config entries; metric-set sections replace."""
    sections = parse_registry_config(text)
    changes = {}
    if "aliases" in sections:
        aliases = dict(base.aliases)
        aliases.update({k.casefold(): v.casefold() for k, v in sections["aliases"]})
        changes["aliases"] = aliases
    if "feats" in sections:
        vocab = {k: set(v) for k, v in base.feat_vocab.items()}
        for key, values in sections["feats"]:
            for value in filter(None, (v.strip() for v in values.split(","))):
                canon = canonical_feats({key: value})
                (k, v), = canon.items()
                vocab.setdefault(k, set()).add(v)
        changes["feat_vocab"] = {k: frozenset(v) for k, v in vocab.items()}
    if "fixed" in sections:
        extra = tuple((a, b) for a, b in sections["fixed"] if (a, b) not in base.fixed_lexicon)
        changes["fixed_lexicon"] = base.fixed_lexicon + extra
    if "instrumental" in sections:
        changes["instrumental_postpositions"] = base.instrumental_postpositions | {
            k for k, _ in sections["instrumental"]}
    for name in ("content_relations", "function_relations", "mlas_features"):
        if name in sections:
            changes[name] = frozenset(k for k, _ in sections[name])
    return replace(base, **changes)


def load_registry(path=None) -> SchemaRegistry:
    if path is None:
        return DEFAULT_REGISTRY
    with open(path, encoding="utf-8") as f:
        return registry_from_config(f.read())
