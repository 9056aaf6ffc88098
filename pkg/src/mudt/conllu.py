"""Data model and I/O for CoNLL-U treebanks with four-layer morphology.

Column mapping::

    ID FORM LEMMA UPOS XPOS FEATS HEAD DEPREL DEPS MISC
       |    |     |    |    |
       |    |     |    |    +-- feature bundle (layer 4)
       |    |     |    +------- POS subcategory, e.g. ``N[+pern]``
       |    |     +------------ main POS tag
       |    +------------------ lemma (layer 2)
       +----------------------- surface form (layer 1)

Morpheme segmentation (layer 3) lives in MISC as ``MSeg=oqu-yan-lar-im-din``
with an optional parallel ``MGloss=read-PST-PL-P1SG.POS-ABL``.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, TextIO

from .errors import ConlluError, TreeError

COLUMNS = ("ID", "FORM", "LEMMA", "UPOS", "XPOS", "FEATS", "HEAD", "DEPREL", "DEPS", "MISC")
EMPTY = "_"
MSEG_KEY = "MSeg"
MGLOSS_KEY = "MGloss"

_RANGE_ID = re.compile(r"^[1-9][0-9]*-[1-9][0-9]*$")
_EMPTY_ID = re.compile(r"^[0-9]+\.[1-9][0-9]*$")
_INT = re.compile(r"^[0-9]+$")


def _canonical_key(key: str) -> str:
    return key[:1].upper() + key[1:]


def _canonical_value(key: str, value: str) -> str:
    # Case values are uppercase (ABL, LOC, DAT); everything else title-case.
    if key == "Case":
        return value.upper()
    return ",".join(part[:1].upper() + part[1:].lower() for part in value.split(","))


def canonical_feats(feats: Mapping[str, str]) -> dict[str, str]:
    """Normalize keys/values and sort by key."""
    out = {}
    for key, value in feats.items():
        key = _canonical_key(key)
        out[key] = _canonical_value(key, value)
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class MorphSegmentation:
    segments: tuple[str, ...]
    gloss: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.gloss is not None:
            object.__setattr__(self, "gloss", tuple(self.gloss))
        if not self.segments or any(not seg for seg in self.segments):
            raise ConlluError("segmentation has an empty segment", code="E_MSEG")
        if self.gloss is not None and len(self.gloss) != len(self.segments):
            raise ConlluError(
                f"gloss has {len(self.gloss)} items for {len(self.segments)} segments",
                code="E_MSEG",
            )

    @property
    def root(self) -> str:
        return self.segments[0]

    @property
    def suffixes(self) -> tuple[str, ...]:
        return self.segments[1:]

    def __str__(self):
        return "-".join(self.segments)


@dataclass(frozen=True)
class Token:
    """One syntactic word.

    ``feats`` is stored in canonical order (alphabetical by key) with
    canonical value casing. ``misc`` holds the MISC items other than the
    segmentation keys; a bare flag is stored with value ``None``.
    """

    id: int
    form: str
    lemma: str
    pos: str
    head: int
    deprel: str
    pos_sub: str | None = None
    feats: Mapping[str, str] = field(default_factory=dict)
    deps: str | None = None
    misc: Mapping[str, str | None] = field(default_factory=dict)
    mseg: MorphSegmentation | None = None

    def __post_init__(self):
        if self.id < 1:
            raise ValueError(f"token id must be >= 1, got {self.id}")
        if self.head < 0:
            raise ValueError(f"head must be >= 0, got {self.head}")
        object.__setattr__(self, "feats", canonical_feats(self.feats))
        object.__setattr__(self, "misc", dict(self.misc))
        if self.mseg is not None and self.mseg.root != self.lemma:
            raise ConlluError(
                f"first segment {self.mseg.root!r} differs from lemma {self.lemma!r}",
                code="E_MSEG",
            )

    def with_arc(self, head: int, deprel: str) -> "Token":
        return Token(
            id=self.id, form=self.form, lemma=self.lemma, pos=self.pos, head=head,
            deprel=deprel, pos_sub=self.pos_sub, feats=self.feats, deps=self.deps,
            misc=self.misc, mseg=self.mseg,
        )

    @property
    def arc(self) -> tuple[int, str]:
        return self.head, self.deprel


@dataclass(frozen=True)
class RawLine:
    """A multiword-token range line or empty-node line, kept verbatim.

    ``position`` is the number of regular tokens preceding the line.
    """

    position: int
    text: str

    @property
    def columns(self) -> list[str]:
        return self.text.split("\t")

    @property
    def is_range(self) -> bool:
        return "-" in self.columns[0]


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    comments: tuple[str, ...] = ()
    specials: tuple[RawLine, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "comments", tuple(self.comments))
        object.__setattr__(self, "specials", tuple(self.specials))
        for i, tok in enumerate(self.tokens, 1):
            if tok.id != i:
                raise ValueError(f"token ids must be 1..n in order; position {i} has id {tok.id}")

    @classmethod
    def build(cls, tokens, sent_id=None, text=None, comments=(), specials=()):
        head = []
        if sent_id is not None:
            head.append(f"# sent_id = {sent_id}")
        if text is not None:
            head.append(f"# text = {text}")
        return cls(tuple(tokens), tuple(head) + tuple(comments), tuple(specials))

    def _comment_value(self, key):
        prefix = f"# {key} ="
        for line in self.comments:
            if line.startswith(prefix):
                return line[len(prefix):].strip()
        return None

    @property
    def sent_id(self) -> str | None:
        return self._comment_value("sent_id")

    @property
    def text(self) -> str | None:
        return self._comment_value("text")

    def __len__(self):
        return len(self.tokens)

    def __getitem__(self, token_id: int) -> Token:
        """1-based token access."""
        if token_id < 1:
            raise IndexError(token_id)
        return self.tokens[token_id - 1]

    @property
    def heads(self) -> list[int]:
        return [t.head for t in self.tokens]

    @property
    def deprels(self) -> list[str]:
        return [t.deprel for t in self.tokens]

    def with_tokens(self, tokens) -> "Sentence":
        return Sentence(tuple(tokens), self.comments, self.specials)


@dataclass(frozen=True)
class Treebank:
    sentences: tuple[Sentence, ...] = ()
    source: str | None = None
    errors: tuple[ConlluError, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        object.__setattr__(self, "errors", tuple(self.errors))

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)


@dataclass(frozen=True)
class DependencyTree:
    """Children-adjacency view. ``children[0]`` holds the root."""

    root: int
    children: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.children) - 1

    def dependents(self, node: int) -> tuple[int, ...]:
        return self.children[node]

    def depth(self) -> int:
        """Number of arcs on the longest root-to-leaf path."""
        best = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in self.children[node])
        return best

    def subtree(self, node: int) -> list[int]:
        out, stack = [], [node]
        while stack:
            cur = stack.pop()
            out.append(cur)
            stack.extend(self.children[cur])
        return sorted(out)


# -- FEATS / MSeg -------------------------------------------------------------

def parse_feats(raw: str) -> dict[str, str]:
    """Parse a FEATS column into a canonical ordered dict.

    >>> parse_feats("Tense=Past|Number=Plur|Person=1|Case=ABL")
    {'Case': 'ABL', 'Number': 'Plur', 'Person': '1', 'Tense': 'Past'}
    """
    if raw == EMPTY:
        return {}
    feats = {}
    for pair in raw.split("|"):
        key, sep, value = pair.partition("=")
        if not sep or not key or not value:
            raise ConlluError(f"malformed feature {pair!r}", code="E_FEATS")
        key = _canonical_key(key)
        if key in feats:
            raise ConlluError(f"duplicate feature key {key!r}", code="E_FEATS")
        feats[key] = value
    return canonical_feats(feats)


def format_feats(feats: Mapping[str, str]) -> str:
    if not feats:
        return EMPTY
    return "|".join(f"{k}={v}" for k, v in canonical_feats(feats).items())


def parse_mseg(raw: str, gloss: str | None = None) -> MorphSegmentation:
    """Split a hyphen-joined morph string, root first."""
    if not raw:
        raise ConlluError("empty segmentation", code="E_MSEG")
    segments = raw.split("-")
    glosses = gloss.split("-") if gloss is not None else None
    return MorphSegmentation(tuple(segments), tuple(glosses) if glosses else None)


def _parse_misc(raw: str):
    misc: dict[str, str | None] = {}
    if raw == EMPTY:
        return misc, None
    for item in raw.split("|"):
        key, sep, value = item.partition("=")
        misc[key] = value if sep else None
    seg = misc.pop(MSEG_KEY, None)
    gloss = misc.pop(MGLOSS_KEY, None)
    if gloss is not None and seg is None:
        raise ConlluError("MGloss without MSeg", code="E_MSEG")
    mseg = parse_mseg(seg, gloss) if seg is not None else None
    return misc, mseg


def _format_misc(tok: Token) -> str:
    items = []
    if tok.mseg is not None:
        items.append(f"{MSEG_KEY}={tok.mseg}")
        if tok.mseg.gloss is not None:
            items.append(f"{MGLOSS_KEY}={'-'.join(tok.mseg.gloss)}")
    for key, value in tok.misc.items():
        items.append(key if value is None else f"{key}={value}")
    return "|".join(items) if items else EMPTY


# -- parsing ------------------------------------------------------------------

def _iter_blocks(lines: Iterable[str]) -> Iterator[tuple[int, list[str]]]:
    """Yield (first line number, lines) for each blank-line-delimited block."""
    block: list[str] = []
    start = 0
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if line.strip() == "":
            if block:
                yield start, block
                block = []
            continue
        if not block:
            start = lineno
        block.append(line)
    if block:
        yield start, block


def parse_sentence(lines: list[str], first_line: int = 1) -> Sentence:
    """Parse one sentence block; raises ConlluError on the first problem."""
    comments: list[str] = []
    tokens: list[Token] = []
    specials: list[RawLine] = []
    head_lines: list[int] = []
    for offset, line in enumerate(lines):
        lineno = first_line + offset
        if line.startswith("#"):
            if tokens or specials:
                raise ConlluError("comment after token lines", code="E_COMMENT", line=lineno)
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"expected 10 columns, found {len(cols)}", code="E_COLUMNS", line=lineno)
        tid = cols[0]
        if _RANGE_ID.match(tid) or _EMPTY_ID.match(tid):
            specials.append(RawLine(len(tokens), line))
            continue
        if not _INT.match(tid) or int(tid) == 0:
            raise ConlluError(f"non-numeric token id {tid!r}", code="E_ID", line=lineno)
        idx = int(tid)
        if idx != len(tokens) + 1:
            code = "E_ID_DUP" if idx <= len(tokens) else "E_ID_SEQ"
            raise ConlluError(f"token id {idx} out of sequence", code=code, line=lineno)
        if not _INT.match(cols[6]):
            raise ConlluError(f"non-numeric head {cols[6]!r}", code="E_HEAD", line=lineno)
        try:
            feats = parse_feats(cols[5])
            misc, mseg = _parse_misc(cols[9])
            tok = Token(
                id=idx, form=cols[1], lemma=cols[2], pos=cols[3],
                pos_sub=None if cols[4] == EMPTY else cols[4],
                feats=feats, head=int(cols[6]), deprel=cols[7],
                deps=None if cols[8] == EMPTY else cols[8],
                misc=misc, mseg=mseg,
            )
        except ConlluError as exc:
            raise ConlluError(exc.message, code=exc.code, line=lineno) from None
        tokens.append(tok)
        head_lines.append(lineno)
    if not tokens:
        raise ConlluError("sentence without tokens", code="E_EMPTY", line=first_line)
    n = len(tokens)
    for tok, lineno in zip(tokens, head_lines):
        if tok.head > n:
            raise ConlluError(f"head {tok.head} outside 0..{n}", code="E_HEAD_RANGE", line=lineno)
    return Sentence(tuple(tokens), tuple(comments), tuple(specials))


def iter_sentences(stream: TextIO | str, strict: bool = False) -> Iterator[Sentence | ConlluError]:
    """Stream sentences one block at a time.

    A malformed block yields its ConlluError in place of a sentence; with
    ``strict`` the error is raised instead.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for start, block in _iter_blocks(stream):
        try:
            yield parse_sentence(block, start)
        except ConlluError as exc:
            if strict:
                raise
            yield exc


def parse_treebank(stream: TextIO | str, strict: bool = False, source: str | None = None) -> Treebank:
    sentences, errors = [], []
    for item in iter_sentences(stream, strict=strict):
        if isinstance(item, ConlluError):
            errors.append(item)
        else:
            sentences.append(item)
    return Treebank(tuple(sentences), source, tuple(errors))


def read_treebank(path, strict: bool = False) -> Treebank:
    with open(path, encoding="utf-8") as f:
        return parse_treebank(f, strict=strict, source=str(path))


# -- serialization ------------------------------------------------------------

def format_token(tok: Token) -> str:
    return "\t".join((
        str(tok.id), tok.form, tok.lemma, tok.pos,
        tok.pos_sub if tok.pos_sub is not None else EMPTY,
        format_feats(tok.feats), str(tok.head), tok.deprel,
        tok.deps if tok.deps is not None else EMPTY,
        _format_misc(tok),
    ))


def serialize_sentence(s: Sentence) -> str:
    lines = list(s.comments)
    specials = sorted(s.specials, key=lambda r: r.position)
    k = 0
    for i, tok in enumerate(s.tokens):
        while k < len(specials) and specials[k].position <= i:
            lines.append(specials[k].text)
            k += 1
        lines.append(format_token(tok))
    lines.extend(r.text for r in specials[k:])
    return "\n".join(lines) + "\n\n"


def serialize_treebank(tb: Treebank | Iterable[Sentence]) -> str:
    sentences = tb.sentences if isinstance(tb, Treebank) else tb
    return "".join(serialize_sentence(s) for s in sentences)


def write_treebank(tb, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(serialize_treebank(tb))


# -- trees --------------------------------------------------------------------

def build_tree(s: Sentence) -> DependencyTree:
    n = len(s)
    children: list[list[int]] = [[] for _ in range(n + 1)]
    roots = []
    for tok in s.tokens:
        if tok.head > n:
            raise TreeError(f"token {tok.id} has head {tok.head} outside 0..{n}", code="E_HEAD_RANGE")
        children[tok.head].append(tok.id)
        if tok.head == 0:
            roots.append(tok.id)
    # A vector without any root always contains a cycle, so cycles are
    # reported first and the root count only for otherwise acyclic input.
    seen = set(descendants(children, 0))
    if len(seen) != n:
        missing = sorted(set(range(1, n + 1)) - seen)
        raise TreeError(f"tokens {missing} are on a cycle", code="E_CYCLE")
    if len(roots) != 1:
        raise TreeError(f"expected exactly one root, found {len(roots)}", code="E_ROOT_COUNT")
    return DependencyTree(roots[0], tuple(tuple(c) for c in children))


def descendants(children, node) -> list[int]:
    out, stack = [], list(children[node])
    while stack:
        cur = stack.pop()
        out.append(cur)
        stack.extend(children[cur])
    return out
