from collections import Counter

from hypothesis import given, settings
from hypothesis import strategies as st

from reviewsum import assets
from reviewsum.preprocess import (
    LexiconNounTagger, Preprocessor, SentenceRecord, TextNormalizer, build_combined_docs, normalize_and_filter,
    split_sentences, tag_nouns,
)
from reviewsum.corpus import ProductRecord

STOP = assets.load_stopwords()
CONTRACTIONS = assets.load_contractions()


def test_split_examples():
    assert split_sentences("") == []
    assert split_sentences("   \n ") == []
    assert split_sentences("Great phone. Battery lasts long!") == ["Great phone.", "Battery lasts long!"]
    assert split_sentences("I paid $200 vs. the old price.") == ["I paid $200 vs. the old price."]


def test_split_newlines_and_quotes():
    assert split_sentences("First line\nSecond line") == ["First line", "Second line"]
    assert split_sentences('He said "wow." Then left.') == ['He said "wow."', "Then left."]
    assert split_sentences("Is it good?! Yes.") == ["Is it good?!", "Yes."]


def test_ambiguous_abbreviation():
    assert len(split_sentences("Model no. 5 works.")) == 1
    assert split_sentences("I said no. Then it broke.") == ["I said no.", "Then it broke."]


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="ab .!?\n\"'", max_size=60))
def test_split_covers_all_characters(text):
    parts = split_sentences(text)
    assert "".join(parts).replace(" ", "").replace("\n", "") == text.replace(" ", "").replace("\n", "")
    assert all(p == p.strip() and p for p in parts)


def test_normalize_examples():
    tokens, _ = normalize_and_filter("Check your e-mail", CONTRACTIONS, STOP)
    assert "email" in tokens
    assert normalize_and_filter("the of and", CONTRACTIONS, STOP)[1] == []
    norm = TextNormalizer({"don't": "do not"}, frozenset())
    assert norm.tokenize("don't") == ["do", "not"]
    assert norm.tokenize("Don’t") == ["do", "not"]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(sorted(STOP)[:60] + ["battery", "Screen", "e-mail", "won't", "42"]), max_size=15))
def test_normalize_drops_stopwords(words):
    tokens, stems = normalize_and_filter(" ".join(words), CONTRACTIONS, STOP)
    norm = TextNormalizer(CONTRACTIONS, STOP)
    assert not set(norm.content_tokens(tokens)) & STOP
    assert len(stems) <= len(tokens)


def test_tag_nouns_examples():
    assert tag_nouns(["battery", "last", "one", "day"]) == {"batteri", "dai"}
    assert tag_nouns(["very", "quickly"]) == set()
    assert tag_nouns(["resolution"]) == {"resolut"}


def test_tagger_plurals_and_suffix_length():
    tagger = LexiconNounTagger({"battery", "screen"})
    assert set(tagger(["batteries", "screens"])) == {"batteri", "screen"}
    # suffix heuristic needs something before the suffix
    assert not tagger(["nation"])
    assert set(tagger(["happiness"])) == {"happi"}


def test_sentence_record_invariants():
    pre = Preprocessor()
    recs = pre.product(ProductRecord(
        "p", ("The battery last one day long. It is pretty heavy due to the battery.",), "Nice screen."
    ))
    assert [r.source for r in recs] == ["review", "review", "summary"]
    for r in recs:
        assert r.nouns <= set(r.stems)
        assert len(r.stems) <= len(r.tokens)
    assert len({(r.source, r.doc_index, r.sent_index) for r in recs}) == len(recs)
    docs = {d.noun_key: d for d in build_combined_docs(recs)}
    assert set(docs["batteri"].member_ids) == {recs[0].sentence_id, recs[1].sentence_id}


def test_combined_doc_membership():
    pre = Preprocessor()
    recs = [
        pre.sentence("p", "review", 0, 0, "The screen and the battery are fine."),
        pre.sentence("p", "review", 1, 0, "Really quickly."),
    ]
    assert recs[0].nouns == {"screen", "batteri"}
    docs = build_combined_docs(recs)
    assert sum(recs[0].sentence_id in d.member_ids for d in docs) == 2
    assert not any(recs[1].sentence_id in d.member_ids for d in docs)
    assert build_combined_docs([]) == []


_phrases = st.sampled_from([
    "The battery died.", "Screen and camera are great.", "Very quickly done.",
    "The price of the case was fair.", "Sound quality and battery life.", "ok",
])


@settings(max_examples=100, deadline=None)
@given(st.lists(_phrases, max_size=8))
def test_combined_doc_invariants(texts):
    pre = Preprocessor()
    recs = [pre.sentence("p", "review", i, 0, t) for i, t in enumerate(texts)]
    docs = build_combined_docs(recs)
    by_id = {r.sentence_id: r for r in recs}
    assert sum(len(d.member_ids) for d in docs) == sum(len(r.nouns) for r in recs)
    for d in docs:
        assert d.member_ids
        assert all(d.noun_key in by_id[m].nouns for m in d.member_ids)
        expected = Counter()
        for m in d.member_ids:
            expected.update(by_id[m].stems)
        assert Counter(d.bag) == expected


def test_sentence_json_round_trip():
    rec = Preprocessor().sentence("p|x", "review", 3, 1, "Battery is great.")
    assert SentenceRecord.from_json(rec.to_json()) == rec
    assert rec.key == "p|x|review|3|1"


def test_asset_directory_overrides(tmp_path):
    (tmp_path / "nouns.txt").write_text("# custom\nwidget\n")
    (tmp_path / "contractions.txt").write_text("gr8\tgreat\n")
    pre = Preprocessor(asset_dir=tmp_path)
    rec = pre.sentence("p", "review", 0, 0, "This widget is gr8 and the battery too.")
    assert "great" in rec.tokens
    assert rec.nouns == {"widget"}
    # files missing from the directory fall back to the bundled copies
    assert pre.normalizer.stoplist == assets.load_stopwords()
