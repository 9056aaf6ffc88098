import io
import itertools
import random

import pytest
from hypothesis import given, settings

from gen import random_sentence, random_treebank, seeds, tree_oracle
from mudt.conllu import (
    MorphSegmentation,
    Sentence,
    Token,
    build_tree,
    iter_sentences,
    parse_feats,
    parse_mseg,
    parse_treebank,
    read_treebank,
    serialize_sentence,
    serialize_treebank,
)
from mudt.errors import ConlluError, TreeError

OQYAN = (
    "# sent_id = x\n"
    "1\toqyanlarimdin\toqu\tN\t_\tCase=ABL|Number=Plur|Person=1|Tense=Past\t0\troot\t_\tMSeg=oqu-yan-lar-im-din\n"
    "\n"
)


def _sent(heads, deprels=None):
    deprels = deprels or ["root" if h == 0 else "nmod" for h in heads]
    toks = [Token(i, f"w{i}", f"w{i}", "N", h, r) for i, (h, r) in enumerate(zip(heads, deprels), 1)]
    return Sentence(tuple(toks))


class TestParse:
    def test_four_layer_token(self):
        tb = parse_treebank(OQYAN)
        tok = tb.sentences[0][1]
        assert tok.form == "oqyanlarimdin"
        assert tok.lemma == "oqu"
        assert tok.feats == {"Case": "ABL", "Number": "Plur", "Person": "1", "Tense": "Past"}
        assert tok.mseg.segments == ("oqu", "yan", "lar", "im", "din")
        assert tok.mseg.root == "oqu"
        assert tok.mseg.suffixes == ("yan", "lar", "im", "din")

    def test_empty_input(self):
        tb = parse_treebank("")
        assert len(tb) == 0 and tb.errors == ()

    def test_nine_columns(self):
        text = "# sent_id = a\n1\tU\tu\tPron\t_\t_\t0\troot\t_\n\n"
        with pytest.raises(ConlluError) as exc:
            parse_treebank(text, strict=True)
        assert exc.value.code == "E_COLUMNS"
        assert exc.value.line == 2

    def test_lenient_skips_bad_block(self):
        bad = "1\tU\tu\tPron\t_\t_\tx\troot\t_\t_\n\n"
        tb = parse_treebank(bad + OQYAN)
        assert len(tb) == 1
        assert [e.code for e in tb.errors] == ["E_HEAD"]
        assert tb.errors[0].line == 1

    @pytest.mark.parametrize("line,code", [
        ("1\ta\ta\tN\t_\t_\t0\troot\t_\t_\n1\tb\tb\tN\t_\t_\t1\tnmod\t_\t_", "E_ID_DUP"),
        ("1\ta\ta\tN\t_\t_\t0\troot\t_\t_\n3\tb\tb\tN\t_\t_\t1\tnmod\t_\t_", "E_ID_SEQ"),
        ("x\ta\ta\tN\t_\t_\t0\troot\t_\t_", "E_ID"),
        ("1\ta\ta\tN\t_\t_\t5\troot\t_\t_", "E_HEAD_RANGE"),
        ("1\ta\ta\tN\t_\tCase\t0\troot\t_\t_", "E_FEATS"),
        ("1\ta\ta\tN\t_\t_\t0\troot\t_\tMSeg=b-c", "E_MSEG"),
        ("1\ta\ta\tN\t_\t_\t0\troot\t_\t_\n# late", "E_COMMENT"),
        ("# only a comment", "E_EMPTY"),
    ])
    def test_error_codes(self, line, code):
        items = list(iter_sentences(line + "\n\n"))
        assert len(items) == 1 and isinstance(items[0], ConlluError)
        assert items[0].code == code

    def test_strict_aborts(self):
        with pytest.raises(ConlluError):
            parse_treebank("1\ta\n\n" + OQYAN, strict=True)

    def test_range_and_empty_nodes_preserved(self):
        text = (
            "1-2\tkəldim\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tkəl\tkəl\tV\t_\t_\t0\troot\t_\t_\n"
            "2\tdim\tdi\tAux\t_\t_\t1\taux\t_\t_\n"
            "2.1\tnull\t_\t_\t_\t_\t_\t_\t_\t_\n\n"
        )
        s = parse_treebank(text, strict=True).sentences[0]
        assert len(s) == 2
        assert [r.position for r in s.specials] == [0, 2]
        assert s.specials[0].is_range and not s.specials[1].is_range
        assert serialize_sentence(s) == text


class TestFeatsAndMseg:
    def test_parse_feats_example(self):
        assert parse_feats("Tense=Past|Number=Plur|Person=1|Case=ABL") == {
            "Tense": "Past", "Number": "Plur", "Person": "1", "Case": "ABL"}

    def test_empty_marker(self):
        assert parse_feats("_") == {}

    def test_duplicate_key(self):
        with pytest.raises(ConlluError) as exc:
            parse_feats("Case=LOC|Case=DAT")
        assert exc.value.code == "E_FEATS"

    def test_case_insensitive_values(self):
        assert parse_feats("case=abl|number=plur") == {"Case": "ABL", "Number": "Plur"}

    @given(seeds)
    def test_sorted_like_reference(self, seed):
        rng = random.Random(seed)
        keys = rng.sample(["Tense", "Number", "Person", "Case", "Mood", "Voice"], rng.randint(1, 6))
        raw = "|".join(f"{k}={rng.choice(['X', 'Y'])}" for k in keys)
        tok = Token(1, "a", "a", "N", 0, "root", feats=parse_feats(raw))
        col = serialize_sentence(Sentence((tok,))).split("\t")[5]
        assert [p.split("=")[0] for p in col.split("|")] == sorted(keys)

    def test_empty_feats_render_underscore(self):
        tok = Token(1, "a", "a", "N", 0, "root")
        assert serialize_sentence(Sentence((tok,))).split("\t")[5] == "_"

    @pytest.mark.parametrize("raw,segs", [
        ("oqu-yan-lar-im-din", ["oqu", "yan", "lar", "im", "din"]),
        ("oqu", ["oqu"]),
        ("jurt-da", ["jurt", "da"]),
    ])
    def test_parse_mseg(self, raw, segs):
        m = parse_mseg(raw)
        assert list(m.segments) == segs and m.root == segs[0]
        assert str(m) == raw

    @pytest.mark.parametrize("raw", ["", "oqu--lar", "-lar", "oqu-"])
    def test_bad_mseg(self, raw):
        with pytest.raises(ConlluError) as exc:
            parse_mseg(raw)
        assert exc.value.code == "E_MSEG"

    def test_gloss_length_mismatch(self):
        with pytest.raises(ConlluError):
            MorphSegmentation(("oqu", "yan"), ("read",))

    def test_root_must_equal_lemma(self):
        with pytest.raises(ConlluError):
            Token(1, "oqyan", "oqu", "V", 0, "root", mseg=parse_mseg("oq-yan"))


class TestRoundTrip:
    def test_fixture_bytes(self, fixtures_dir):
        for path in sorted(fixtures_dir.glob("*.conllu")):
            text = path.read_text(encoding="utf-8")
            assert serialize_treebank(parse_treebank(text, strict=True)) == text, path.name

    @settings(max_examples=200)
    @given(seeds)
    def test_structural(self, seed):
        tb = random_treebank(random.Random(seed))
        assert parse_treebank(io.StringIO(serialize_treebank(tb)), strict=True) == tb

    def test_sentence_metadata(self):
        s = parse_treebank(OQYAN).sentences[0]
        assert s.sent_id == "x" and s.text is None

    def test_read_treebank_source(self, fixtures_dir):
        tb = read_treebank(fixtures_dir / "morphology.conllu")
        assert tb.source.endswith("morphology.conllu") and len(tb) == 1


class TestBuildTree:
    def test_keldi(self):
        s = parse_treebank(
            "1\tU\tu\tPron\t_\t_\t2\tnsubj\t_\t_\n"
            "2\tkeldi\tkel\tV\t_\t_\t0\troot\t_\t_\n"
            "3\t.\t.\tPunct\t_\t_\t2\tpunct\t_\t_\n\n", strict=True).sentences[0]
        tree = build_tree(s)
        assert tree.root == 2
        assert tree.dependents(2) == (1, 3)

    def test_single_token(self):
        tree = build_tree(_sent([0]))
        assert tree.root == 1 and tree.dependents(1) == ()

    def test_two_cycle(self):
        with pytest.raises(TreeError) as exc:
            build_tree(_sent([2, 1]))
        assert exc.value.code == "E_CYCLE"

    def test_two_roots(self):
        with pytest.raises(TreeError) as exc:
            build_tree(_sent([0, 0]))
        assert exc.value.code == "E_ROOT_COUNT"

    def test_two_cycle_with_root(self):
        with pytest.raises(TreeError) as exc:
            build_tree(_sent([0, 3, 2]))
        assert exc.value.code == "E_CYCLE"

    def test_agrees_with_reachability_oracle(self):
        # every head vector over tokens 1..n for n <= 5
        checked = 0
        for n in range(1, 6):
            for heads in itertools.product(range(n + 1), repeat=n):
                heads = list(heads)
                want = tree_oracle(heads)
                try:
                    build_tree(_sent(heads))
                    got = None
                except TreeError as exc:
                    got = exc.code
                assert got == want, heads
                checked += 1
        assert checked == sum((n + 1) ** n for n in range(1, 6))

    def test_subtree_and_depth(self):
        tree = build_tree(_sent([2, 0, 2, 3]))
        assert sorted(tree.subtree(3)) == [3, 4]
        assert tree.depth() == 2

    @given(seeds)
    def test_random_trees_build(self, seed):
        s = random_sentence(random.Random(seed), rich=False)
        tree = build_tree(s)
        assert sorted(tree.subtree(tree.root)) == list(range(1, len(s) + 1))


def test_first_segment_equals_lemma_on_fixtures(fixtures_dir):
    for path in fixtures_dir.glob("*.conllu"):
        for s in read_treebank(path, strict=True):
            for t in s.tokens:
                if t.mseg is not None:
                    assert t.mseg.segments[0] == t.lemma
