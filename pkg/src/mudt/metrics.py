"""Attachment scores and divergence reports between two annotations.

Scores follow the CoNLL 2018 shared task conventions: F1 over gold and
predicted token totals, crediting only aligned tokens. MLAS is restricted to
content relations; BLEX here is computed over all tokens (head, relation and
lemma must match).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .conllu import Sentence, Treebank
from .errors import PairingError
from .schema import DEFAULT_REGISTRY, SchemaRegistry
from .validator import is_quotative

CATEGORIES = (
    "case-relations",
    "compound-predicates",
    "fixed-expressions",
    "quotative",
    "postposition-headedness",
    "other",
)
CASE_LABELS = frozenset({"case:abl", "case:loc", "case:dat", "case:poss"})


def fmt(value: float) -> str:
    """Two decimals, round half up."""
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class Alignment:
    pairs: tuple[tuple[int, int], ...]
    unmatched_gold: tuple[int, ...] = ()
    unmatched_pred: tuple[int, ...] = ()

    def gold_to_pred(self) -> dict[int, int]:
        return dict(self.pairs)

    def pred_to_gold(self) -> dict[int, int]:
        return {p: g for g, p in self.pairs}


def lcs_pairs(a, b) -> list[tuple[int, int]]:
    """1-based index pairs of a longest common subsequence of ``a`` and ``b``."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                table[i][j] = table[i + 1][j + 1] + 1
            else:
                table[i][j] = max(table[i + 1][j], table[i][j + 1])
    pairs, i, j = [], 0, 0
    while i < n and j < m:
        if a[i] == b[j]:
            pairs.append((i + 1, j + 1))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1
    return pairs


def align_tokens(gold: Sentence, pred: Sentence) -> Alignment:
    gforms = [t.form for t in gold.tokens]
    pforms = [t.form for t in pred.tokens]
    if gforms == pforms:
        pairs = [(i, i) for i in range(1, len(gforms) + 1)]
    else:
        pairs = lcs_pairs(gforms, pforms)
    gset = {g for g, _ in pairs}
    pset = {p for _, p in pairs}
    return Alignment(
        tuple(pairs),
        tuple(i for i in range(1, len(gforms) + 1) if i not in gset),
        tuple(i for i in range(1, len(pforms) + 1) if i not in pset),
    )


@dataclass
class Tally:
    """Counts for one metric; summed associatively across sentences."""

    gold: int = 0
    pred: int = 0
    correct: int = 0

    def __add__(self, other):
        return Tally(self.gold + other.gold, self.pred + other.pred, self.correct + other.correct)

    @property
    def precision(self) -> float:
        return 100.0 * self.correct / self.pred if self.pred else (100.0 if not self.gold else 0.0)

    @property
    def recall(self) -> float:
        return 100.0 * self.correct / self.gold if self.gold else (100.0 if not self.pred else 0.0)

    @property
    def f1(self) -> float:
        total = self.gold + self.pred
        # Nothing to score on either side counts as full agreement.
        return 200.0 * self.correct / total if total else 100.0


@dataclass
class EvalScores:
    uas: Tally = field(default_factory=Tally)
    las: Tally = field(default_factory=Tally)
    mlas: Tally = field(default_factory=Tally)
    blex: Tally = field(default_factory=Tally)
    aligned: int = 0
    per_label: dict[str, Tally] = field(default_factory=dict)

    @property
    def uas_f1(self) -> float:
        return self.uas.f1

    @property
    def las_f1(self) -> float:
        return self.las.f1

    @property
    def mlas_f1(self) -> float:
        return self.mlas.f1

    @property
    def blex_f1(self) -> float:
        return self.blex.f1

    @property
    def counts(self) -> dict[str, int]:
        return {"gold": self.las.gold, "predicted": self.las.pred, "aligned": self.aligned, "matched": self.las.correct}

    def __add__(self, other):
        labels = dict(self.per_label)
        for k, v in other.per_label.items():
            labels[k] = labels.get(k, Tally()) + v
        return EvalScores(
            self.uas + other.uas, self.las + other.las, self.mlas + other.mlas,
            self.blex + other.blex, self.aligned + other.aligned, labels,
        )

    def rows(self):
        return [("UAS", self.uas), ("LAS", self.las), ("MLAS", self.mlas), ("BLEX", self.blex)]

    def to_tsv(self) -> str:
        return "".join(f"{name}\t{fmt(t.f1)}\n" for name, t in self.rows())

    def to_text(self) -> str:
        lines = [f"{'Metric':<8}| {'Precision':>9} | {'Recall':>9} | {'F1 Score':>9}", "-" * 44]
        for name, t in self.rows():
            lines.append(f"{name:<8}| {fmt(t.precision):>9} | {fmt(t.recall):>9} | {fmt(t.f1):>9}")
        lines.append(f"tokens: gold {self.las.gold}, predicted {self.las.pred}, aligned {self.aligned}")
        if self.per_label:
            lines.append("")
            lines.append(f"{'Label':<18}{'P':>8}{'R':>8}{'F1':>8}")
            for label in sorted(self.per_label):
                t = self.per_label[label]
                lines.append(f"{label:<18}{fmt(t.precision):>8}{fmt(t.recall):>8}{fmt(t.f1):>8}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "scores": {name: fmt(t.f1) for name, t in self.rows()},
            "counts": self.counts,
            "per_label": {
                k: {"precision": fmt(v.precision), "recall": fmt(v.recall), "f1": fmt(v.f1)}
                for k, v in sorted(self.per_label.items())
            },
        }


def _pair(gold, pred):
    gold = list(gold.sentences if isinstance(gold, Treebank) else gold)
    pred = list(pred.sentences if isinstance(pred, Treebank) else pred)
    if len(gold) != len(pred):
        raise PairingError(f"gold has {len(gold)} sentences, prediction has {len(pred)}")
    return list(zip(gold, pred))


def _mapped_head(pred: Sentence, idx: int, p2g: dict[int, int]):
    head = pred[idx].head
    if head == 0:
        return 0
    return p2g.get(head)


def _feats(tok, names):
    return tuple(sorted((k, v) for k, v in tok.feats.items() if k in names))


def _function_children(s: Sentence, idx: int, reg: SchemaRegistry, to_gold=None):
    out = []
    for t in s.tokens:
        if t.head == idx and t.deprel in reg.function_relations:
            ref = t.id if to_gold is None else to_gold.get(t.id)
            out.append((ref, t.deprel, t.pos, _feats(t, reg.mlas_features)))
    return sorted(out, key=repr)


def score_sentence(gold: Sentence, pred: Sentence, reg: SchemaRegistry = DEFAULT_REGISTRY) -> EvalScores:
    al = align_tokens(gold, pred)
    p2g = al.pred_to_gold()
    content = reg.content_relations
    sc = EvalScores(aligned=len(al.pairs))
    sc.uas = Tally(len(gold), len(pred))
    sc.las = Tally(len(gold), len(pred))
    sc.blex = Tally(len(gold), len(pred))
    sc.mlas = Tally(
        sum(t.deprel in content for t in gold.tokens),
        sum(t.deprel in content for t in pred.tokens),
    )
    labels: dict[str, Tally] = {}
    for t in gold.tokens:
        labels.setdefault(t.deprel, Tally()).gold += 1
    for t in pred.tokens:
        labels.setdefault(t.deprel, Tally()).pred += 1
    for g, p in al.pairs:
        gt, pt = gold[g], pred[p]
        head_ok = _mapped_head(pred, p, p2g) == gt.head
        if not head_ok:
            continue
        sc.uas.correct += 1
        if gt.deprel != pt.deprel:
            continue
        sc.las.correct += 1
        labels[gt.deprel].correct += 1
        if gt.lemma == pt.lemma:
            sc.blex.correct += 1
        if (
            gt.deprel in content
            and gt.pos == pt.pos
            and _feats(gt, reg.mlas_features) == _feats(pt, reg.mlas_features)
            and _function_children(gold, g, reg) == _function_children(pred, p, reg, p2g)
        ):
            sc.mlas.correct += 1
    sc.per_label = labels
    return sc


def score(gold, pred, reg: SchemaRegistry = DEFAULT_REGISTRY) -> EvalScores:
    total = EvalScores()
    for g, p in _pair(gold, pred):
        total = total + score_sentence(g, p, reg)
    return total


# -- divergence ---------------------------------------------------------------

@dataclass
class DivergenceReport:
    confusion: Counter = field(default_factory=Counter)
    categories: Counter = field(default_factory=Counter)
    aligned: int = 0
    agreed: int = 0
    instances: list = field(default_factory=list)

    @property
    def agreement_rate(self) -> float:
        return 100.0 * self.agreed / self.aligned if self.aligned else 100.0

    def __add__(self, other):
        return DivergenceReport(
            self.confusion + other.confusion,
            self.categories + other.categories,
            self.aligned + other.aligned,
            self.agreed + other.agreed,
            self.instances + other.instances,
        )

    def category_counts(self) -> dict[str, int]:
        return {c: self.categories.get(c, 0) for c in CATEGORIES}

    def off_diagonal(self) -> dict:
        return {k: v for k, v in self.confusion.items() if k[0] != k[1]}

    def to_tsv(self) -> str:
        lines = [f"{g}\t{p}\t{n}" for (g, p), n in sorted(self.confusion.items())]
        lines.append("")
        lines.append("# categories")
        lines.extend(f"{c}\t{n}" for c, n in self.category_counts().items())
        lines.append(f"agreement_rate\t{fmt(self.agreement_rate)}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = ["Divergences by category:"]
        lines.extend(f"  {c:<26}{n:>6}" for c, n in self.category_counts().items())
        lines.append(f"Agreement (LAS over aligned tokens): {fmt(self.agreement_rate)}")
        off = self.off_diagonal()
        if off:
            lines.append("")
            lines.append("Confusions (gold -> predicted):")
            for (g, p), n in sorted(off.items(), key=lambda kv: (-kv[1], kv[0])):
                lines.append(f"  {g:<18}{p:<18}{n:>6}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "confusion": [[g, p, n] for (g, p), n in sorted(self.confusion.items())],
            "categories": self.category_counts(),
            "aligned": self.aligned,
            "agreement_rate": fmt(self.agreement_rate),
        }


def _classify(gold: Sentence, pred: Sentence, al: Alignment):
    """Group disagreeing aligned tokens into phenomenon instances.

    Returns a list of (category, gold token ids). Each token is claimed by at
    most one instance; unclaimed disagreements count as ``other`` one by one.
    """
    g2p = al.gold_to_pred()
    p2g = al.pred_to_gold()
    phead, prel = {}, {}
    for g, p in al.pairs:
        phead[g] = _mapped_head(pred, p, p2g)
        prel[g] = pred[p].deprel
    wrong = {g for g in g2p if (phead[g], prel[g]) != gold[g].arc}
    claimed: set[int] = set()
    found = []

    def claim(category, ids):
        ids = sorted(i for i in ids if i in wrong and i not in claimed)
        if ids:
            claimed.update(ids)
            found.append((category, ids))

    for g in sorted(wrong):
        gt = gold[g]
        if g in claimed:
            continue
        if gt.deprel in CASE_LABELS and prel[g] == "obl":
            claim("case-relations", [g])
        elif gt.deprel == "fixed" and prel[g].split(":")[0] == "compound":
            claim("fixed-expressions", [g])

    for g in sorted(wrong):
        gt = gold[g]
        if g in claimed or gt.deprel != "aux" or gt.head == 0:
            continue
        core = gt.head
        if core in phead and prel.get(core) == "advcl" and phead[core] == g:
            moved = [t for t in wrong if gold[t].head == core and phead.get(t) == g]
            claim("compound-predicates", [g, core] + moved)

    for g in sorted(wrong):
        gt = gold[g]
        if g in claimed or gt.deprel != "obj" or gt.head == 0:
            continue
        if is_quotative(gold[gt.head]) and prel[g] == "advcl":
            claim("quotative", [g, gt.head])

    for g in sorted(wrong):
        gt = gold[g]
        if g in claimed or gt.deprel != "obj" or gt.head == 0:
            continue
        post = gt.head
        if gold[post].pos == "Post" and phead.get(post) == g:
            claim("postposition-headedness", [g, post])

    for g in sorted(wrong - claimed):
        found.append(("other", [g]))
    return found


def divergence_sentence(gold: Sentence, pred: Sentence) -> DivergenceReport:
    al = align_tokens(gold, pred)
    p2g = al.pred_to_gold()
    rep = DivergenceReport(aligned=len(al.pairs))
    for g, p in al.pairs:
        gt, pt = gold[g], pred[p]
        rep.confusion[(gt.deprel, pt.deprel)] += 1
        if _mapped_head(pred, p, p2g) == gt.head and gt.deprel == pt.deprel:
            rep.agreed += 1
    sid = gold.sent_id or ""
    for category, ids in _classify(gold, pred, al):
        rep.categories[category] += 1
        rep.instances.append((sid, category, tuple(ids)))
    return rep


def divergence(gold, pred) -> DivergenceReport:
    total = DivergenceReport()
    for g, p in _pair(gold, pred):
        total = total + divergence_sentence(g, p)
    return total


def scores_to_json(scores: EvalScores) -> str:
    return json.dumps(scores.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"
