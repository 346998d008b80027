"""Text extraction, lexical signatures, similarity, and change grading."""

import random

import pytest

from remcurator.fingerprint import (
    PREVIEW_CHARS,
    SIGNATURE_SIZE,
    SNAPSHOT_CHARS,
    STOPWORDS,
    ChangeClass,
    ChangeSeverity,
    DfTable,
    EmptyText,
    Fingerprint,
    WICopy,
    build_fingerprint,
    classify_change,
    content_digest,
    extract_text,
    is_wrong_content,
    lexical_signature,
    similarity,
    text_preview_renderer,
)

from oracles import (
    EMPTY_SHA256,
    load_stopwords,
    oracle_signature,
    oracle_similarity,
    tokenize,
)
from support import utc

VOCAB = (
    "heron marsh sluice culvert plankton mudflat sampling winch beacon "
    "dredge causeway lichen grayling weir outfall the and of to in"
).split()


def _random_text(rng: random.Random, max_tokens: int = 40) -> str:
    return " ".join(rng.choice(VOCAB) for _ in range(rng.randrange(max_tokens)))


def _df_for(corpus) -> DfTable:
    df = DfTable()
    for text in corpus:
        df.add_document(text)
    return df


def _fp(text: str, corpus=None, uri: str = "http://x.example/r") -> Fingerprint:
    return build_fingerprint(uri, text, utc(2008, 7, 1), _df_for(corpus or [text]))


# -- text extraction ---------------------------------------------------------


def test_html_markup_is_stripped_and_text_normalized():
    content = b"<html><body>Hello <b>World</b></body></html>"
    assert extract_text(content, "text/html") == "hello world"


def test_script_and_style_bodies_are_dropped():
    content = (
        b"<html><head><style>body { color: red }</style>"
        b"<script>var x = 1;</script></head><body>Visible only</body></html>"
    )
    assert extract_text(content, "text/html") == "visible only"


def test_plain_text_is_case_folded_and_punctuation_stripped():
    assert extract_text(b"Tide, gauge; CALIBRATION!", "text/plain") == "tide gauge calibration"


def test_media_type_parameters_are_ignored():
    assert extract_text(b"<p>Hi</p>", "text/html; charset=utf-8") == "hi"


def test_binary_media_types_yield_empty_text():
    assert extract_text(b"%PDF-1.4 junk", "application/pdf") == ""


def test_underscores_split_tokens():
    assert extract_text(b"snake_case name", "text/plain") == "snake case name"


# -- stopwords ---------------------------------------------------------------


def test_stopword_list_is_exactly_fifty_lowercase_words():
    assert len(STOPWORDS) == 50
    assert all(w == w.lower() and " " not in w for w in STOPWORDS)
    assert STOPWORDS == frozenset(load_stopwords())


# -- lexical signatures ------------------------------------------------------


def test_signature_matches_brute_force_ranking():
    rng = random.Random(41)
    for _ in range(25):
        corpus = [_random_text(rng) for _ in range(rng.randrange(2, 9))]
        target = rng.choice([t for t in corpus if tokenize(t)] or ["heron"])
        df = _df_for(corpus)
        assert lexical_signature(target, df) == oracle_signature(target, corpus)


def test_signature_has_at_most_five_terms():
    corpus = ["heron marsh sluice culvert plankton mudflat winch beacon dredge"]
    assert len(lexical_signature(corpus[0], _df_for(corpus))) == SIGNATURE_SIZE


def test_signature_can_be_shorter_than_five():
    corpus = ["heron marsh heron marsh"]
    assert lexical_signature(corpus[0], _df_for(corpus)) == ["heron", "marsh"]


def test_signature_excludes_stopwords():
    text = "the the the and of to in heron"
    sig = lexical_signature(text, _df_for([text]))
    assert sig == ["heron"]


def test_signature_ties_break_alphabetically():
    # equal tf and df for every term, so rank is purely lexicographic
    text = "winch beacon dredge culvert marsh sluice heron"
    sig = lexical_signature(text, _df_for([text]))
    assert sig == sorted(sig)
    assert sig == ["beacon", "culvert", "dredge", "heron", "marsh"]


def test_rare_terms_outrank_common_ones():
    corpus = ["heron marsh", "heron sluice", "heron dredge beacon"]
    sig = lexical_signature(corpus[2], _df_for(corpus))
    # heron appears in every document, so it scores below the rare pair
    assert sig == ["beacon", "dredge", "heron"]


def test_signature_of_empty_text_raises():
    with pytest.raises(EmptyText):
        lexical_signature("", _df_for(["heron"]))


def test_signature_against_empty_table_raises():
    with pytest.raises(ValueError):
        lexical_signature("heron", DfTable())


# -- digests -----------------------------------------------------------------


def test_digest_is_sha256_of_utf8_text():
    assert content_digest("") == EMPTY_SHA256
    assert content_digest("heron") != content_digest("marsh")
    assert len(content_digest("heron")) == 64


# -- similarity --------------------------------------------------------------


def test_similarity_matches_oracle_on_random_pairs():
    rng = random.Random(42)
    for _ in range(40):
        a, b = _random_text(rng), _random_text(rng)
        assert similarity(a, b) == oracle_similarity(a, b)


def test_similarity_is_symmetric_and_bounded():
    rng = random.Random(43)
    for _ in range(40):
        a, b = _random_text(rng), _random_text(rng)
        s = similarity(a, b)
        assert s == similarity(b, a)
        assert 0.0 <= s <= 1.0


def test_identical_texts_score_one():
    assert similarity("heron marsh sluice culvert plankton", "heron marsh sluice culvert plankton") == 1.0


def test_two_empty_texts_are_identical():
    assert similarity("", "") == 1.0


def test_one_empty_text_is_a_total_mismatch():
    assert similarity("heron marsh sluice culvert", "") == 0.0
    assert similarity("", "heron marsh sluice culvert") == 0.0


def test_short_texts_fall_back_to_token_sets():
    # three tokens cannot form a 4-shingle; token sets give 3/4
    assert similarity("red blue green", "red blue green yellow") == 0.75


def test_disjoint_texts_score_zero():
    assert similarity("heron marsh sluice culvert", "winch beacon dredge causeway") == 0.0


# -- change classification ---------------------------------------------------


def test_unchanged_content_short_circuits_on_digest():
    text = "heron marsh sluice culvert plankton"
    change = classify_change(_fp(text), text)
    assert change.kind is ChangeSeverity.UNCHANGED
    assert change.similarity == 1.0


def test_small_drift_grades_minor():
    # one word swapped deep inside sixty distinct tokens: 53/61 shingles agree
    tokens = [f"w{i:02d}" for i in range(60)]
    old = " ".join(tokens)
    tokens[30] = "swapped"
    new = " ".join(tokens)
    change = classify_change(_fp(old), new)
    assert change.kind is ChangeSeverity.MINOR
    assert change.similarity == pytest.approx(53 / 61)


def test_rewrite_grades_significant():
    old = "heron marsh sluice culvert plankton mudflat sampling winch"
    new = "beacon dredge causeway lichen grayling weir outfall heron marsh sluice culvert"
    change = classify_change(_fp(old), new)
    assert change.kind is ChangeSeverity.SIGNIFICANT
    assert change.similarity < 0.80


def test_minor_threshold_is_inclusive():
    old = "red blue green"
    new = "red blue green yellow"  # token-set similarity exactly 0.75
    assert classify_change(_fp(old), new, minor_threshold=0.75).kind is ChangeSeverity.MINOR
    assert classify_change(_fp(old), new, minor_threshold=0.76).kind is ChangeSeverity.SIGNIFICANT


def test_severity_ranks_are_ordered():
    ranks = [
        ChangeClass(ChangeSeverity.UNCHANGED, 1.0).rank,
        ChangeClass(ChangeSeverity.MINOR, 0.9).rank,
        ChangeClass(ChangeSeverity.SIGNIFICANT, 0.1).rank,
    ]
    assert ranks == sorted(ranks)
    assert len(set(ranks)) == 3


# -- wrong content heuristic -------------------------------------------------


def test_hijacked_page_is_a_wrong_content_candidate():
    old = "heron marsh sluice culvert plankton mudflat"
    new = "buy cheap insurance deals online casino winner"
    assert is_wrong_content(_fp(old), new)


def test_surviving_signature_term_vetoes_the_candidate():
    old = "heron marsh sluice culvert plankton mudflat"
    new = "buy cheap insurance deals online heron casino"
    assert similarity(old, new) < 0.20
    assert not is_wrong_content(_fp(old), new)


def test_moderate_similarity_vetoes_the_candidate():
    # shared 12-token prefix, disjoint tails; the tail avoids every signature
    # term, so only the similarity floor can veto here
    prefix = " ".join(f"p{i:02d}" for i in range(12))
    old = prefix + " " + " ".join(f"o{i:02d}" for i in range(8))
    new = prefix + " " + " ".join(f"n{i:02d}" for i in range(8))
    fp = _fp(old)
    assert not any(term in new.split() for term in fp.lexical_signature)
    assert 0.20 <= similarity(old, new) < 0.80
    assert not is_wrong_content(fp, new)


def test_unchanged_content_is_never_wrong():
    text = "heron marsh sluice culvert"
    assert not is_wrong_content(_fp(text), text)


def test_wrong_verdict_is_candidate_only():
    """The heuristic returns a plain bool; nothing is flagged without a
    decision, which the curator layer enforces."""
    assert isinstance(is_wrong_content(_fp("heron marsh"), "casino deals"), bool)


# -- document frequency table ------------------------------------------------


def test_df_counts_each_document_once_per_term():
    df = DfTable()
    df.add_document("heron heron heron marsh")
    df.add_document("heron sluice")
    assert df.document_count == 2
    assert df.df("heron") == 2
    assert df.df("marsh") == 1
    assert df.df("absent") == 0


def test_df_table_round_trips_through_dict():
    df = DfTable()
    df.add_document("heron marsh")
    df.add_document("sluice")
    back = DfTable.from_dict(df.to_dict())
    assert back.document_count == df.document_count
    assert back.df("heron") == 2 - 1
    assert back.to_dict() == df.to_dict()


# -- fingerprints ------------------------------------------------------------


def test_build_fingerprint_bundles_all_aids():
    text = "heron marsh sluice culvert plankton mudflat"
    copies = (WICopy("arch", "arch/2008/http://x.example/r", utc(2008, 7, 1)),)
    df = _df_for([text])
    fp = build_fingerprint("http://x.example/r", text, utc(2008, 7, 1), df, wi_copies=copies)
    assert fp.ar_uri == "http://x.example/r"
    assert fp.lexical_signature == tuple(oracle_signature(text, [text]))
    assert fp.content_digest == content_digest(text)
    assert fp.text_snapshot == text
    assert fp.thumbnail_ref == "text:" + text
    assert fp.wi_copies == copies


def test_empty_text_degrades_to_metadata_only_fingerprint():
    fp = build_fingerprint("http://x.example/r", "", utc(2008, 7, 1), _df_for(["heron"]))
    assert fp.lexical_signature == ()
    assert fp.content_digest == EMPTY_SHA256
    assert fp.text_snapshot == ""


def test_snapshot_and_preview_are_truncated():
    text = "heron " * 4000
    fp = build_fingerprint("http://x.example/r", text, utc(2008, 7, 1), _df_for([text]))
    assert len(fp.text_snapshot) == SNAPSHOT_CHARS
    assert fp.thumbnail_ref == "text:" + text[:PREVIEW_CHARS]


def test_preview_renderer_truncates_at_500_chars():
    assert text_preview_renderer("http://x.example/r", "x" * 900) == "text:" + "x" * 500


def test_fingerprint_round_trips_through_dict():
    text = "heron marsh sluice culvert"
    copies = (WICopy("arch", "arch/2008/u", utc(2008, 7, 1, 8)),)
    fp = build_fingerprint("http://x.example/r", text, utc(2008, 7, 1), _df_for([text]), wi_copies=copies)
    assert Fingerprint.from_dict(fp.to_dict()) == fp
