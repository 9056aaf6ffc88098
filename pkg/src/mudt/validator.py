"""Annotation-principle and construction checks over single sentences."""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import diagnostics as diag
from .conllu import Sentence, build_tree
from .diagnostics import Diagnostic
from .schema import DEFAULT_REGISTRY, SchemaRegistry, validate_assignment

ROOT_POS = frozenset({"V", "Aux", "N", "A", "Num", "Pron", "Adv"})
VERBAL_POS = frozenset({"V", "Aux"})
NONVERBAL_PREDICATE_POS = frozenset({"N", "A", "Num", "Pron"})
NOMINAL_POS = frozenset({"N", "Pron", "Num"})

CASE_RELATIONS = {
    "case:abl": "ABL",
    "case:loc": "LOC",
    "case:dat": "DAT",
    "instr:case=loc": "LOC",
    "instr:case=dat": "DAT",
}
POST_RELATIONS = frozenset({"instr:case=post", "post"})
SENTENCE_FINAL = frozenset({".", "!", "?", "…", "؟", "۔"})


@dataclass(frozen=True)
class ValidationReport:
    sent_id: str
    diagnostics: tuple[Diagnostic, ...]

    @property
    def passed(self) -> bool:
        return not self.errors

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == diag.ERROR]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == diag.WARNING]

    def codes(self, include_notes: bool = False) -> set[str]:
        return {d.code for d in self.diagnostics if include_notes or d.severity != diag.NOTE}

    def to_dict(self) -> dict:
        return {
            "sent_id": self.sent_id,
            "passed": self.passed,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
        }

    def to_tsv(self) -> str:
        return "".join(
            f"{self.sent_id}\t{d.code}\t{d.severity}\t{','.join(map(str, d.token_ids))}\t{d.message}\n"
            for d in self.diagnostics
        )


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], ensure_ascii=False, indent=2) + "\n"


# -- projectivity -------------------------------------------------------------

def arcs(s: Sentence) -> list[tuple[int, int]]:
    """Non-root arcs as (head, dependent)."""
    return [(t.head, t.id) for t in s.tokens if t.head != 0]


def check_projectivity(s: Sentence):
    """Return every pair of properly interleaving arcs.

    Raises TreeError when the sentence is not a tree. Arcs sharing an
    endpoint never count as crossing; the root attachment is ignored.
    """
    build_tree(s)
    spans = sorted((min(h, d), max(h, d), (h, d)) for h, d in arcs(s))
    crossings = []
    for i, (l1, r1, a1) in enumerate(spans):
        for l2, r2, a2 in spans[i + 1:]:
            if l2 >= r1:
                break
            if l1 < l2 < r1 < r2:
                crossings.append((a1, a2))
    return crossings


# -- helpers ------------------------------------------------------------------

def _children(s: Sentence) -> dict[int, list[int]]:
    kids: dict[int, list[int]] = {i: [] for i in range(len(s) + 1)}
    for t in s.tokens:
        if 0 <= t.head <= len(s):
            kids[t.head].append(t.id)
    return kids


def is_quotative(tok) -> bool:
    return tok.lemma.casefold() in ("de", "de-") or tok.form.casefold() in ("dəp", "dep")


def _conj_groups(s: Sentence) -> list[list[int]]:
    """Token sets connected by conj arcs, each sorted."""
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for t in s.tokens:
        if t.deprel == "conj" and t.head != 0:
            parent.setdefault(t.id, t.id)
            parent.setdefault(t.head, t.head)
            parent[find(t.id)] = find(t.head)
    groups: dict[int, list[int]] = {}
    for x in parent:
        groups.setdefault(find(x), []).append(x)
    return [sorted(g) for g in groups.values()]


# -- principle checks ---------------------------------------------------------

def _structural(s: Sentence, out: list[Diagnostic]) -> bool:
    """P1, P2, P3, P5, P7. Returns True when the basic tree is well formed."""
    n = len(s)
    bad_heads = set()
    for t in s.tokens:
        if t.head == t.id:
            bad_heads.add(t.id)
            out.append(diag.error("P5", [t.id], f"token {t.id} heads itself"))
        elif t.head > n:
            bad_heads.add(t.id)
            out.append(diag.error("P5", [t.id], f"head {t.head} is outside the sentence"))

    roots = [t.id for t in s.tokens if t.head == 0]
    if len(roots) != 1:
        out.append(diag.error("P2", roots, f"expected exactly one root, found {len(roots)}"))

    # Reachability from any root; P5-flagged tokens are anchors so only
    # genuine cycles show up as isolated.
    kids = _children(s)
    reached = set()
    stack = list(roots) + sorted(bad_heads)
    while stack:
        cur = stack.pop()
        if cur in reached:
            continue
        reached.add(cur)
        stack.extend(c for c in kids.get(cur, ()) if c not in bad_heads)
    isolated = [t.id for t in s.tokens if t.id not in reached]
    if isolated:
        out.append(diag.error("P1", isolated, "tokens not attached to the tree (cycle)"))

    for t in s.tokens:
        if t.deps is None:
            continue
        heads = set()
        for item in t.deps.split("|"):
            h, _, _ = item.partition(":")
            heads.add(h)
        extra = heads - {str(t.head)}
        if extra:
            out.append(diag.error(
                "P3", [t.id], f"DEPS carries additional head(s) {sorted(extra)} beside {t.head}"))

    for raw in s.specials:
        cols = raw.columns
        if cols[6] != "_" or cols[7] != "_":
            kind = "multiword range" if raw.is_range else "empty node"
            ids = [] if not raw.is_range else [int(x) for x in cols[0].split("-")]
            out.append(diag.error("P7", ids, f"{kind} {cols[0]} carries a basic arc"))

    return not bad_heads and len(roots) == 1 and not isolated


def _root_checks(s: Sentence, root: int, out):
    tok = s[root]
    if tok.pos not in ROOT_POS:
        out.append(diag.error("P6", [root], f"root has POS {tok.pos!r}; expected a predicate"))


def _aux_checks(s: Sentence, out):
    for t in s.tokens:
        if t.deprel != "aux":
            continue
        if t.pos not in VERBAL_POS:
            out.append(diag.error("P8", [t.id], f"aux dependent has POS {t.pos!r}"))
        elif t.head == 0 or s[t.head].pos not in VERBAL_POS:
            out.append(diag.error("P8", [t.id, t.head], "aux must depend on the lexical verb"))


def _c1_zero_copula(s, root, out):
    for t in s.tokens:
        if t.deprel != "cop:zero":
            continue
        if t.head != root:
            out.append(diag.error("C1", [t.id, t.head], "cop:zero must attach to the root"))
        elif s[root].pos not in NONVERBAL_PREDICATE_POS:
            out.append(diag.error(
                "C1", [t.id, root], f"cop:zero predicate has verbal POS {s[root].pos!r}"))


def _c2_conj_chain(s, out):
    conj_deps: dict[int, list[int]] = {}
    for t in s.tokens:
        if t.deprel != "conj":
            continue
        if t.head == 0:
            out.append(diag.error("C2", [t.id], "conj on the root"))
            continue
        conj_deps.setdefault(t.head, []).append(t.id)
        if t.id > t.head:
            out.append(diag.error(
                "C2", [t.id, t.head], "conjunct must precede the element it depends on"))
    for head, deps in conj_deps.items():
        if len(deps) > 1:
            out.append(diag.error("C2", [head] + deps, "several conjuncts share one head"))


def _c3_punct(s, root, out):
    last = s.tokens[-1]
    if last.deprel == "punct" and last.head != root:
        out.append(diag.error("C3", [last.id, last.head], "sentence-final punctuation must depend on the root"))
    for group in _conj_groups(s):
        lo, hi = group[0], group[-1]
        for t in s.tokens[lo:hi - 1]:
            if t.deprel != "punct" or t.id in group:
                continue
            following = next(g for g in group if g > t.id)
            if t.head != following:
                out.append(diag.error(
                    "C3", [t.id, following], "punctuation inside coordination must depend on the following conjunct"))


def _c4_case(s, out):
    for t in s.tokens:
        if t.deprel in CASE_RELATIONS:
            want = CASE_RELATIONS[t.deprel]
            have = t.feats.get("Case")
            if have is None:
                out.append(diag.warning("C4", [t.id], f"{t.deprel} without a Case feature"))
            elif have.upper() != want:
                out.append(diag.error("C4", [t.id], f"{t.deprel} with Case={have}"))
        elif t.deprel in POST_RELATIONS and t.pos != "Post":
            out.append(diag.error("C4", [t.id], f"{t.deprel} dependent has POS {t.pos!r}"))


def _is_predicate(s, idx, root):
    return idx == root or (idx != 0 and s[idx].pos in VERBAL_POS)


def _c5_postposition(s, root, out):
    kids = _children(s)
    for t in s.tokens:
        if t.pos != "Post":
            continue
        nominal = [c for c in kids[t.id] if s[c].pos in NOMINAL_POS]
        for c in nominal:
            if s[c].deprel != "obj":
                out.append(diag.error(
                    "C5", [c, t.id], f"nominal complement of a postposition labelled {s[c].deprel!r}"))
        if nominal and not _is_predicate(s, t.head, root):
            out.append(diag.error("C5", [t.id, t.head], "postpositional phrase must attach to a predicate"))
        if not kids[t.id] and t.head != 0 and s[t.head].pos in NOMINAL_POS:
            out.append(diag.error("C5", [t.id, t.head], "postposition depends on its noun (inverted)"))


def _c6_fixed(s, out):
    for t in s.tokens:
        if t.deprel == "fixed" and t.id > t.head:
            out.append(diag.error("C6", [t.id, t.head], "fixed dependent must precede its head"))


def _discourse(s, root, out):
    for t in s.tokens:
        if t.deprel == "discourse" and not _is_predicate(s, t.head, root):
            out.append(diag.error(
                "E_DISCOURSE_HEAD", [t.id, t.head], "discourse element must attach to the root"))


def validate_sentence(s: Sentence, reg: SchemaRegistry = DEFAULT_REGISTRY, sent_id: str | None = None) -> ValidationReport:
    out: list[Diagnostic] = []
    for tok in s.tokens:
        out.extend(validate_assignment(tok, reg))
    tree_ok = _structural(s, out)
    heads_in_range = all(t.head <= len(s) and t.head != t.id for t in s.tokens)
    if tree_ok:
        root = next(t.id for t in s.tokens if t.head == 0)
        for (h1, d1), (h2, d2) in check_projectivity(s):
            out.append(diag.error("P4", [d1, d2], f"arcs {h1}->{d1} and {h2}->{d2} cross"))
        _root_checks(s, root, out)
        _c1_zero_copula(s, root, out)
        _c3_punct(s, root, out)
        _discourse(s, root, out)
    else:
        root = 0
    if heads_in_range:
        _aux_checks(s, out)
        _c2_conj_chain(s, out)
        _c4_case(s, out)
        _c5_postposition(s, root, out)
        _c6_fixed(s, out)
    fired = sorted({d.code for d in out if d.code.startswith("C")})
    if fired:
        out.append(diag.note("P9", [], f"construction checks {', '.join(fired)} fired; review lexical semantics"))
    return ValidationReport(sent_id or s.sent_id or "", tuple(out))


def validate_treebank(tb, reg: SchemaRegistry = DEFAULT_REGISTRY) -> list[ValidationReport]:
    return [validate_sentence(s, reg, sent_id=s.sent_id or str(i)) for i, s in enumerate(tb, 1)]
