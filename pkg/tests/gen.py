"""Random tree/sentence generators and brute-force oracles shared by tests."""

import random

from hypothesis import strategies as st

from mudt.conllu import MorphSegmentation, RawLine, Sentence, Token, Treebank
from mudt.schema import DEFAULT_REGISTRY

POS = sorted(DEFAULT_REGISTRY.pos_codes)
LABELS = sorted(DEFAULT_REGISTRY.labels)
FEATS = {
    "Case": ["ABL", "LOC", "DAT", "GEN", "POSS"],
    "Number": ["Sing", "Plur"],
    "Person": ["1", "2", "3"],
    "Tense": ["Past", "Pres", "Fut"],
}
LETTERS = "abdefghijklmnopqrstuvxyzəöüçşğ"


# -- head vectors -------------------------------------------------------------

def random_tree(rng: random.Random, n: int) -> list[int]:
    """Head vector of a uniformly shaped random tree over tokens 1..n."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    heads = [0] * n
    for k, node in enumerate(order[1:], 1):
        heads[node - 1] = order[rng.randrange(k)]
    return heads


def random_projective_tree(rng: random.Random, lo: int, hi: int, heads: list[int], parent: int = 0):
    """Fill ``heads`` for span lo..hi with a random projective subtree."""
    if lo > hi:
        return
    r = rng.randint(lo, hi)
    heads[r - 1] = parent
    random_projective_tree(rng, lo, r - 1, heads, r)
    random_projective_tree(rng, r + 1, hi, heads, r)


def random_head_vector(rng: random.Random, n: int) -> list[int]:
    """Any vector with entries in 0..n; usually not a tree."""
    return [rng.randint(0, n) for _ in range(n)]


def tree_oracle(heads: list[int]) -> str | None:
    """Error code build_tree should give, found by walking parent pointers."""
    n = len(heads)
    for start in range(1, n + 1):
        cur, steps = start, 0
        while cur != 0:
            cur = heads[cur - 1]
            steps += 1
            if steps > n:
                return "E_CYCLE"
    if sum(h == 0 for h in heads) != 1:
        return "E_ROOT_COUNT"
    return None


def crossing_oracle(heads: list[int]) -> set[frozenset]:
    """All pairs of non-root arcs whose spans strictly interleave."""
    arcs = [(h, d) for d, h in enumerate(heads, 1) if h != 0]
    out = set()
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            a, b = arcs[i], arcs[j]
            l1, r1 = sorted(a)
            l2, r2 = sorted(b)
            if l1 < l2 < r1 < r2 or l2 < l1 < r2 < r1:
                out.add(frozenset((a, b)))
    return out


# -- sentences ----------------------------------------------------------------

def _word(rng, lo=1, hi=6):
    return "".join(rng.choice(LETTERS) for _ in range(rng.randint(lo, hi)))


def random_token(rng: random.Random, idx: int, head: int, rich: bool = True) -> Token:
    lemma = _word(rng)
    form = lemma + (_word(rng, 0, 3) if rng.random() < 0.5 else "")
    feats, mseg, misc, pos_sub, deps = {}, None, {}, None, None
    if rich:
        for key in rng.sample(sorted(FEATS), rng.randint(0, 3)):
            feats[key] = rng.choice(FEATS[key])
        if rng.random() < 0.5:
            segs = [lemma] + [_word(rng, 1, 3) for _ in range(rng.randint(0, 4))]
            gloss = [_word(rng, 2, 4).upper() for _ in segs] if rng.random() < 0.5 else None
            mseg = MorphSegmentation(tuple(segs), tuple(gloss) if gloss else None)
        if rng.random() < 0.3:
            misc["SpaceAfter"] = "No"
        if rng.random() < 0.1:
            misc["Flag"] = None
        if rng.random() < 0.2:
            pos_sub = "N[+pern]"
        if rng.random() < 0.1:
            deps = f"{head}:{rng.choice(LABELS)}"
    return Token(
        id=idx, form=form, lemma=lemma, pos=rng.choice(POS), head=head,
        deprel="root" if head == 0 else rng.choice(LABELS),
        pos_sub=pos_sub, feats=feats, deps=deps, misc=misc, mseg=mseg,
    )


def random_sentence(rng: random.Random, n: int | None = None, sent_id=None, rich: bool = True,
                    projective: bool = False) -> Sentence:
    n = n if n is not None else rng.randint(1, 12)
    if projective:
        heads = [0] * n
        random_projective_tree(rng, 1, n, heads)
    else:
        heads = random_tree(rng, n)
    tokens = [random_token(rng, i, h, rich) for i, h in enumerate(heads, 1)]
    specials = []
    if rich and n >= 2 and rng.random() < 0.2:
        i = rng.randint(1, n - 1)
        specials.append(RawLine(i - 1, f"{i}-{i + 1}\t{_word(rng)}\t_\t_\t_\t_\t_\t_\t_\t_"))
    comments = ("# note = generated",) if rng.random() < 0.3 else ()
    return Sentence.build(tokens, sent_id=sent_id, text=" ".join(t.form for t in tokens),
                          comments=comments, specials=specials)


def random_treebank(rng: random.Random, max_sentences: int = 5) -> Treebank:
    count = rng.randint(0, max_sentences)
    return Treebank(tuple(random_sentence(rng, sent_id=f"s{i}") for i in range(count)))


seeds = st.integers(min_value=0, max_value=2**32 - 1)


# -- UD-style fuzz input for the converter ------------------------------------

UD_LABELS = ["nsubj", "obj", "obl", "advcl", "advmod", "amod", "nmod", "case", "conj", "cc",
             "compound", "punct", "aux", "det", "discourse", "mark"]
TRIGGER_WORDS = [
    ("sewr", "N"), ("qil", "V"), ("həyran", "A"), ("bol", "V"), ("de", "V"), ("bilən", "Post"),
    ("üčün", "Post"), ("tur", "Aux"), ("kitab", "N"), ("u", "Pron"), ("kel", "V"), ("jaxfi", "A"),
]


def random_ud_sentence(rng: random.Random, n: int | None = None, projective: bool = True) -> Sentence:
    """Random tree whose labels, lemmas and tags often hit converter triggers."""
    n = n if n is not None else rng.randint(1, 12)
    if projective:
        heads = [0] * n
        random_projective_tree(rng, 1, n, heads)
    else:
        heads = random_tree(rng, n)
    tokens = []
    for i, h in enumerate(heads, 1):
        if rng.random() < 0.6:
            lemma, pos = rng.choice(TRIGGER_WORDS)
        else:
            lemma, pos = _word(rng), rng.choice(POS)
        form = "dəp" if lemma == "de" and rng.random() < 0.5 else lemma
        feats = {"Case": rng.choice(FEATS["Case"])} if rng.random() < 0.3 else {}
        rel = "root" if h == 0 else rng.choice(UD_LABELS)
        tokens.append(Token(i, form, lemma, pos, h, rel, feats=feats))
    return Sentence.build(tokens)
