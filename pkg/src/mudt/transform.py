"""Rule-based conversion of UD-style trees into MUDT.

Rules (applied in this order by :func:`apply_all`):

    R7  chain_coordination     bouquet coordination -> leftward conj chain
    R5  rehead_postposition    noun-headed postposition -> postposition heads noun
    R2  reroot_compound        auxiliary root over converb -> lexical verb root
    R4  restructure_quotative  speech-verb advcl -> obj of the quotative converb
    R3  lexicalize_fixed       lexicon word pair -> fixed
    R1  refine_case            obl + Case -> case:*
    R6  relabel_zero_copula    nsubj under non-verbal root -> cop:zero

Every rule is a pure function of a Sentence; tokens are never added,
removed or reordered, only HEAD and DEPREL change.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conllu import Sentence, build_tree
from .errors import TransformError
from .schema import DEFAULT_REGISTRY, SchemaRegistry
from .validator import NOMINAL_POS, NONVERBAL_PREDICATE_POS, is_quotative


@dataclass(frozen=True)
class RewriteRule:
    id: str
    name: str
    description: str


RULES = {
    "R1": RewriteRule("R1", "refine_case", "obl with a Case feature becomes case:dat/loc/abl/poss"),
    "R2": RewriteRule("R2", "reroot_compound", "lexical converb replaces the auxiliary as root"),
    "R3": RewriteRule("R3", "lexicalize_fixed", "lexicon word pairs are bound with fixed"),
    "R4": RewriteRule("R4", "restructure_quotative", "quoted clause becomes obj of the quotative converb"),
    "R5": RewriteRule("R5", "rehead_postposition", "postposition heads its nominal complement"),
    "R6": RewriteRule("R6", "relabel_zero_copula", "subject of a verbless predicate becomes cop:zero"),
    "R7": RewriteRule("R7", "chain_coordination", "coordination becomes a leftward chain"),
}
RULE_ORDER = ("R7", "R5", "R2", "R4", "R3", "R1", "R6")

CASE_TO_LABEL = {"DAT": "case:dat", "LOC": "case:loc", "ABL": "case:abl", "GEN": "case:poss", "POSS": "case:poss"}
MAX_PASSES = 8
R2_REATTACH = frozenset({"nsubj", "advmod", "obj", "discourse"})


@dataclass(frozen=True)
class Edit:
    rule: str
    token: int
    old_head: int
    old_rel: str
    new_head: int
    new_rel: str

    def to_tsv(self, sent_id: str) -> str:
        return f"{sent_id}\t{self.rule}\t{self.token}\t{self.old_head}:{self.old_rel}\t{self.new_head}:{self.new_rel}\n"


@dataclass(frozen=True)
class Note:
    rule: str
    token_ids: tuple[int, ...]
    message: str


@dataclass
class TransformTrace:
    sent_id: str = ""
    applications: list[Edit] = field(default_factory=list)
    notes: list[Note] = field(default_factory=list)

    def to_tsv(self) -> str:
        return "".join(e.to_tsv(self.sent_id) for e in self.applications)

    def __bool__(self):
        return bool(self.applications)


def replay(s: Sentence, edits) -> Sentence:
    """Apply recorded arc edits to ``s``."""
    toks = list(s.tokens)
    for e in edits:
        toks[e.token - 1] = toks[e.token - 1].with_arc(e.new_head, e.new_rel)
    return s.with_tokens(toks)


class _Editor:
    """Mutable head/deprel arrays over an immutable sentence."""

    def __init__(self, s: Sentence, rule: str, trace: TransformTrace | None):
        self.s = s
        self.rule = rule
        self.trace = trace
        self.head = [0] + [t.head for t in s.tokens]
        self.rel = [""] + [t.deprel for t in s.tokens]

    def tok(self, i):
        return self.s[i]

    def n(self):
        return len(self.s)

    def children(self, i):
        return [j for j in range(1, len(self.head)) if self.head[j] == i]

    def set(self, i, head, rel):
        if (self.head[i], self.rel[i]) == (head, rel):
            return
        if self.trace is not None:
            self.trace.applications.append(Edit(self.rule, i, self.head[i], self.rel[i], head, rel))
        self.head[i], self.rel[i] = head, rel

    def apply_group(self, changes: dict, ids, message) -> bool:
        """Apply {token: (head, rel)} together unless that adds crossings or cycles."""
        head = list(self.head)
        for i, (h, _) in changes.items():
            head[i] = h
        if _has_cycle(head) or _crossing_arcs(head) - _crossing_arcs(self.head):
            self.note(ids, message)
            return False
        for i in sorted(changes):
            self.set(i, *changes[i])
        return True

    def note(self, ids, message):
        if self.trace is not None:
            self.trace.notes.append(Note(self.rule, tuple(ids), message))

    def root(self):
        roots = [i for i in range(1, len(self.head)) if self.head[i] == 0]
        return roots[0] if len(roots) == 1 else None

    def result(self) -> Sentence:
        toks = [
            t if (t.head, t.deprel) == (self.head[t.id], self.rel[t.id]) else t.with_arc(self.head[t.id], self.rel[t.id])
            for t in self.s.tokens
        ]
        return self.s.with_tokens(toks)


def _crosses(a, b):
    l1, r1 = sorted(a)
    l2, r2 = sorted(b)
    return l1 < l2 < r1 < r2 or l2 < l1 < r2 < r1


def _has_cycle(head) -> bool:
    for start in range(1, len(head)):
        cur, steps = start, 0
        while cur != 0:
            cur = head[cur]
            steps += 1
            if steps >= len(head):
                return True
    return False


def _crossing_arcs(head) -> set:
    arcs = [(head[d], d) for d in range(1, len(head)) if head[d] != 0]
    return {(a, b) for i, a in enumerate(arcs) for b in arcs[i + 1:] if _crosses(a, b)}


# -- R1 -----------------------------------------------------------------------

def refine_case(s: Sentence, trace: TransformTrace | None = None) -> Sentence:
    ed = _Editor(s, "R1", trace)
    for t in s.tokens:
        if t.deprel != "obl":
            continue
        case = t.feats.get("Case")
        label = CASE_TO_LABEL.get(case.upper()) if case else None
        if label is None:
            ed.note([t.id], "obl without a mappable Case feature; left unchanged")
            continue
        ed.set(t.id, t.head, label)
    return ed.result()


# -- R2 -----------------------------------------------------------------------

def _aux_chain(ed: _Editor, root: int):
    """Walk leftward from an Aux root through adjacent advcl tokens.

    Returns (lexical core, [auxiliaries]) or None.
    """
    if ed.tok(root).pos != "Aux":
        return None
    chain = [root]
    cur = root - 1
    while cur >= 1 and ed.rel[cur] == "advcl" and ed.head[cur] in chain:
        pos = ed.tok(cur).pos
        if pos == "V":
            return cur, chain
        if pos != "Aux":
            return None
        chain.append(cur)
        cur -= 1
    return None


def reroot_compound(s: Sentence, trace: TransformTrace | None = None) -> Sentence:
    ed = _Editor(s, "R2", trace)
    root = ed.root()
    if root is None:
        return s
    found = _aux_chain(ed, root)
    if found is None:
        return s
    core, auxes = found
    last = ed.n()
    moved = []
    for aux in auxes:
        for dep in ed.children(aux):
            if dep in auxes or dep == core:
                continue
            final_punct = ed.rel[dep] == "punct" and dep == last
            if ed.rel[dep] in R2_REATTACH or final_punct:
                moved.append(dep)
    # Kept dependents whose arcs would cross a moved arc move as well.
    changed = True
    while changed:
        changed = False
        new_arcs = [(core, m) for m in moved] + [(core, a) for a in auxes]
        for aux in auxes:
            for dep in ed.children(aux):
                if dep in moved or dep in auxes or dep == core:
                    continue
                if any(_crosses((aux, dep), arc) for arc in new_arcs):
                    moved.append(dep)
                    changed = True
    ed.set(core, 0, "root")
    for aux in sorted(auxes):
        ed.set(aux, core, "aux")
    for dep in sorted(moved):
        ed.set(dep, core, ed.rel[dep])
    return ed.result()


# -- R3 -----------------------------------------------------------------------

def _is_ancestor(ed: _Editor, anc: int, node: int) -> bool:
    seen = set()
    cur = ed.head[node]
    while cur != 0 and cur not in seen:
        if cur == anc:
            return True
        seen.add(cur)
        cur = ed.head[cur]
    return False


def lexicalize_fixed(s: Sentence, reg: SchemaRegistry = DEFAULT_REGISTRY, trace: TransformTrace | None = None) -> Sentence:
    ed = _Editor(s, "R3", trace)
    for first in range(1, ed.n()):
        second = first + 1
        if not reg.is_fixed_pair(ed.tok(first).lemma, ed.tok(second).lemma):
            continue
        if ed.head[first] == second and ed.rel[first] == "fixed":
            continue
        changes = {first: (second, "fixed")}
        if _is_ancestor(ed, first, second):
            # second sat below first: hand first's attachment over to second
            changes[second] = (ed.head[first], "root" if ed.head[first] == 0 else ed.rel[first])
        # a fixed dependent takes no dependents of its own
        for c in ed.children(first):
            if c != second:
                changes[c] = (second, ed.rel[c])
        ed.apply_group(changes, [first, second], "binding this pair would make arcs cross; left unchanged")
    return ed.result()


# -- R4 -----------------------------------------------------------------------

def restructure_quotative(s: Sentence, trace: TransformTrace | None = None) -> Sentence:
    ed = _Editor(s, "R4", trace)
    for q in range(1, ed.n() + 1):
        if not is_quotative(ed.tok(q)):
            continue
        if any(ed.rel[c] == "obj" for c in ed.children(q)):
            continue
        verbs = [v for v in range(q + 1, ed.n() + 1)
                 if any(ed.rel[c] == "advcl" and c < q for c in ed.children(v))]
        clause = None
        for v in verbs:
            cands = [c for c in ed.children(v) if ed.rel[c] == "advcl" and c < q]
            if cands:
                clause, verb = max(cands), v
                break
        if clause is None or _is_ancestor(ed, q, verb):
            ed.note([q], "quotative marker without a clausal dependent; left unchanged")
            continue
        ed.apply_group({clause: (q, "obj"), q: (verb, "advcl")}, [clause, q],
                       "quoted clause cannot move under the marker without crossing arcs; left unchanged")
    return ed.result()


# -- R5 -----------------------------------------------------------------------

def rehead_postposition(s: Sentence, reg: SchemaRegistry = DEFAULT_REGISTRY, trace: TransformTrace | None = None) -> Sentence:
    ed = _Editor(s, "R5", trace)
    for p in range(1, ed.n() + 1):
        tok = ed.tok(p)
        if tok.pos != "Post":
            continue
        noun = ed.head[p]
        rel = ed.rel[p]
        if noun == 0 or ed.tok(noun).pos not in NOMINAL_POS:
            continue
        # UD input labels only; case:* here is already MUDT and left alone
        if not (rel in ("nmod", "case") or rel.startswith("nmod:")):
            continue
        if any(ed.rel[c] == "obj" for c in ed.children(p)):
            continue
        pred = ed.head[noun]
        if pred == 0:
            ed.note([p, noun], "postposition under the root noun has no predicate to attach to; left unchanged")
            continue
        label = "instr:case=post" if reg.is_instrumental(tok) else "post"
        ed.apply_group({noun: (p, "obj"), p: (pred, label)}, [p, noun],
                       "re-heading this postposition would make arcs cross; left unchanged")
    return ed.result()


# -- R6 -----------------------------------------------------------------------

def relabel_zero_copula(s: Sentence, trace: TransformTrace | None = None) -> Sentence:
    ed = _Editor(s, "R6", trace)
    root = ed.root()
    if root is None or ed.tok(root).pos not in NONVERBAL_PREDICATE_POS:
        return s
    kids = ed.children(root)
    if any(ed.rel[c] == "cop" for c in kids):
        return s
    for c in kids:
        if ed.rel[c] == "nsubj":
            ed.set(c, root, "cop:zero")
    return ed.result()


# -- R7 -----------------------------------------------------------------------

def chain_coordination(s: Sentence, trace: TransformTrace | None = None) -> Sentence:
    ed = _Editor(s, "R7", trace)
    skipped = set()
    for _ in range(ed.n()):
        first = next(
            (i for i in range(1, ed.n() + 1)
             if i not in skipped and any(ed.rel[c] == "conj" and c > i for c in ed.children(i))),
            None,
        )
        if first is None:
            break
        conjuncts = [first] + sorted(c for c in ed.children(first) if ed.rel[c] == "conj" and c > first)
        members = set(conjuncts)
        changes = {a: (b, "conj") for a, b in zip(conjuncts, conjuncts[1:])}
        changes[conjuncts[-1]] = (ed.head[first], ed.rel[first])
        for i in range(conjuncts[0] + 1, conjuncts[-1]):
            if i in members or ed.rel[i] not in ("cc", "punct") or ed.head[i] not in members:
                continue
            changes[i] = (next(c for c in conjuncts if c > i), ed.rel[i])
        if not ed.apply_group(changes, conjuncts, "chaining these conjuncts would make arcs cross; left unchanged"):
            skipped.add(first)
    return ed.result()


# -- driver -------------------------------------------------------------------

def parse_rule_set(spec: str | None) -> frozenset:
    if not spec:
        return frozenset(RULE_ORDER)
    ids = frozenset(x.strip().upper() for x in spec.split(",") if x.strip())
    unknown = ids - set(RULES)
    if unknown:
        raise ValueError(f"unknown rule id(s): {', '.join(sorted(unknown))}")
    return ids


def apply_all(s: Sentence, reg: SchemaRegistry = DEFAULT_REGISTRY, rules=None, sent_id=None):
    """Run the enabled rules in canonical order; returns (sentence, trace)."""
    try:
        build_tree(s)
    except ValueError as exc:
        raise TransformError(str(exc)) from None
    enabled = frozenset(RULE_ORDER) if rules is None else frozenset(rules)
    trace = TransformTrace(sent_id or s.sent_id or "")
    steps = {
        "R7": lambda x: chain_coordination(x, trace),
        "R5": lambda x: rehead_postposition(x, reg, trace),
        "R2": lambda x: reroot_compound(x, trace),
        "R4": lambda x: restructure_quotative(x, trace),
        "R3": lambda x: lexicalize_fixed(x, reg, trace),
        "R1": lambda x: refine_case(x, trace),
        "R6": lambda x: relabel_zero_copula(x, trace),
    }
    # One ordered pass can set up a trigger for an earlier rule (R3 handing
    # an advcl to a converb, for instance), so passes repeat until stable.
    out = s
    for _ in range(MAX_PASSES):
        before = len(trace.applications)
        for rid in RULE_ORDER:
            if rid in enabled:
                out = steps[rid](out)
        if len(trace.applications) == before:
            break
    trace.notes[:] = list(dict.fromkeys(trace.notes))
    return out, trace


def arc_listing(before: Sentence, after: Sentence, sent_id: str = "") -> str:
    """Side-by-side before/after arcs for changed tokens."""
    lines = [f"# {sent_id}" if sent_id else "#"]
    for b, a in zip(before.tokens, after.tokens):
        if b.arc == a.arc:
            continue
        old = "ROOT" if b.head == 0 else before[b.head].form
        new = "ROOT" if a.head == 0 else after[a.head].form
        lines.append(f"{b.id}\t{b.form}\t{b.deprel}: {b.form} <- {old}\t=>\t{a.deprel}: {a.form} <- {new}")
    return "\n".join(lines) + "\n"
