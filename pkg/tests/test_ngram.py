import math

import pytest

from ctckit import ArpaParseError, NgramModel, VocabularyTrie, is_prefix, parse_arpa, serialize_arpa

from conftest import TOY_BIGRAM_ARPA

UNIGRAM_ARPA = """\
\\data\\
ngram 1=3

\\1-grams:
-1.0\tcat
-0.7\tdog
-0.5\tthe

\\end\\
"""


class TestParse:
    def test_unigram_read_back(self):
        model = parse_arpa(UNIGRAM_ARPA)
        assert model.order == 1
        assert model.score_word((), "cat") == -1.0
        assert model.unk_token is None

    def test_count_mismatch_names_section(self):
        bad = UNIGRAM_ARPA.replace("ngram 1=3", "ngram 1=4")
        with pytest.raises(ArpaParseError, match=r"\\1-grams"):
            parse_arpa(bad)

    def test_missing_end_marker(self):
        with pytest.raises(ArpaParseError, match="end of input"):
            parse_arpa(UNIGRAM_ARPA.replace("\\end\\\n", ""))

    def test_malformed_line_reports_line_number(self):
        bad = UNIGRAM_ARPA.replace("-0.7\tdog", "not a number\tdog")
        with pytest.raises(ArpaParseError, match="line 6"):
            parse_arpa(bad)

    def test_positive_log_prob_rejected(self):
        bad = UNIGRAM_ARPA.replace("-0.7\tdog", "0.7\tdog")
        with pytest.raises(ArpaParseError, match="positive"):
            parse_arpa(bad)

    def test_duplicate_entry_rejected(self):
        bad = UNIGRAM_ARPA.replace("-0.7\tdog", "-0.7\tcat")
        with pytest.raises(ArpaParseError, match="duplicate"):
            parse_arpa(bad)

    def test_missing_prefix_rejected(self):
        bad = TOY_BIGRAM_ARPA.replace("-0.2\tthe dog", "-0.2\tfox dog")
        with pytest.raises(ArpaParseError, match="prefix"):
            parse_arpa(bad)

    def test_backoff_on_top_order_rejected(self):
        bad = TOY_BIGRAM_ARPA.replace("-0.2\tthe dog", "-0.2\tthe dog\t-0.1")
        with pytest.raises(ArpaParseError, match="top-order"):
            parse_arpa(bad)

    def test_missing_data_header(self):
        with pytest.raises(ArpaParseError, match="data"):
            parse_arpa("\\1-grams:\n-1.0\tcat\n\\end\\\n")


class TestScoreWord:
    @pytest.fixture
    def model(self) -> NgramModel:
        return parse_arpa(TOY_BIGRAM_ARPA)

    def test_unigram_direct(self, model):
        assert model.score_word((), "cat") == pytest.approx(-1.0, abs=1e-6)

    def test_bigram_direct(self, model):
        assert model.score_word(("the",), "dog") == pytest.approx(-0.2, abs=1e-6)

    def test_backoff_recursion(self, model):
        # "the cat" absent: backoff(the) + unigram(cat) = -0.3 + -1.0
        assert model.score_word(("the",), "cat") == pytest.approx(-1.3, abs=1e-6)

    def test_backoff_defaults_to_zero(self, model):
        # "cat dog" absent and "cat" has no backoff field.
        assert model.score_word(("cat",), "dog") == pytest.approx(-0.9, abs=1e-6)

    def test_oov_default_penalty(self, model):
        assert model.score_word((), "fish") == -10.0

    def test_oov_penalty_configurable(self, model):
        assert model.score_word((), "fish", oov_log10_penalty=-5.0) == -5.0

    def test_oov_history_falls_through(self, model):
        assert model.score_word(("fish",), "cat") == pytest.approx(-1.0, abs=1e-6)

    def test_history_truncated_to_order(self, model):
        long_history = ("x", "y", "z", "the")
        assert model.score_word(long_history, "dog") == pytest.approx(-0.2, abs=1e-6)

    def test_unk_token_preferred_over_penalty(self):
        text = UNIGRAM_ARPA.replace("ngram 1=3", "ngram 1=4").replace(
            "-0.5\tthe", "-0.5\tthe\n-2.5\t<unk>"
        )
        model = parse_arpa(text)
        assert model.unk_token == "<unk>"
        assert model.score_word((), "fish") == pytest.approx(-2.5, abs=1e-6)

    def test_empty_history_equals_unigram(self, model):
        for word in ("the", "cat", "dog"):
            assert model.score_word((), word) == model.tables[0][(word,)][0]


class TestScoreSentence:
    def test_empty_sequence_no_sentinels(self):
        model = parse_arpa(UNIGRAM_ARPA)
        assert model.score_sentence([]) == 0.0

    def test_unigram_independence(self):
        model = parse_arpa(UNIGRAM_ARPA)
        assert model.score_sentence(["cat", "cat"]) == pytest.approx(2 * model.score_word((), "cat"))

    def test_toy_bigram_hand_sum(self):
        model = parse_arpa(TOY_BIGRAM_ARPA)
        # p(the) + p(dog | the) + p(cat | dog):
        #   -0.5 + -0.2 + (backoff(dog)=0 + -1.0)
        assert model.score_sentence(["the", "dog", "cat"]) == pytest.approx(-1.7, abs=1e-6)

    def test_sentinels_used_when_present(self):
        text = (
            "\\data\\\nngram 1=3\nngram 2=2\n\n\\1-grams:\n"
            "-99\t<s>\t-0.1\n-0.5\tcat\t-0.2\n-0.4\t</s>\n\n"
            "\\2-grams:\n-0.3\t<s> cat\n-0.6\tcat </s>\n\n\\end\\\n"
        )
        model = parse_arpa(text)
        # p(cat | <s>) + p(</s> | cat) = -0.3 + -0.6
        assert model.score_sentence(["cat"]) == pytest.approx(-0.9, abs=1e-6)


class TestVocabularyTrie:
    def test_prefix_membership(self):
        trie = VocabularyTrie(["cat", "car"])
        assert is_prefix(trie, "ca")
        assert is_prefix(trie, "")
        assert not is_prefix(trie, "cb")
        assert trie.is_prefix("cat")
        assert not trie.is_prefix("cats")

    def test_has_word(self):
        trie = VocabularyTrie(["cat", "car"])
        assert trie.has_word("cat")
        assert not trie.has_word("ca")
        assert len(trie) == 2

    def test_from_model_excludes_sentinels(self):
        text = (
            "\\data\\\nngram 1=3\n\n\\1-grams:\n-99\t<s>\n-1.0\tcat\n-2.0\t<unk>\n\n\\end\\\n"
        )
        model = parse_arpa(text)
        trie = VocabularyTrie.from_model(model)
        assert trie.is_prefix("c")
        assert not trie.is_prefix("<")
        assert model.vocabulary() == ["cat"]


def _random_arpa(rng) -> str:
    """A random well-formed model: prefix-closed, floats in repr form."""
    words = [f"w{i}" for i in range(int(rng.integers(2, 7)))]
    order = int(rng.integers(1, 4))
    tables = []
    unigrams = {(w,): (round(-5 * float(rng.random()), 6), _maybe_backoff(rng, order > 1)) for w in words}
    tables.append(unigrams)
    for k in range(2, order + 1):
        entries = {}
        for prev in tables[k - 2]:
            for w in words:
                if rng.random() < 0.4:
                    entries[prev + (w,)] = (
                        round(-5 * float(rng.random()), 6),
                        _maybe_backoff(rng, k < order),
                    )
        if not entries:  # keep declared orders non-degenerate
            first = next(iter(tables[k - 2]))
            entries[first + (words[0],)] = (-1.0, 0.0)
        tables.append(entries)
    return serialize_arpa(NgramModel(order=order, tables=tables))


def _maybe_backoff(rng, allowed: bool) -> float:
    if allowed and rng.random() < 0.5:
        return round(float(rng.random()) * 2 - 1, 6)
    return 0.0


class TestRoundTrip:
    def test_parse_serialize_parse_fixed_point(self):
        import numpy as np

        rng = np.random.default_rng(17)
        for _ in range(100):
            text = _random_arpa(rng)
            model1 = parse_arpa(text)
            model2 = parse_arpa(serialize_arpa(model1))
            assert model1.order == model2.order
            assert model1.tables == model2.tables

    def test_toy_fixture_round_trip(self):
        model1 = parse_arpa(TOY_BIGRAM_ARPA)
        model2 = parse_arpa(serialize_arpa(model1))
        assert model1.tables == model2.tables


def _discounted_bigram_model(rng) -> NgramModel:
    """A properly normalized bigram model built from random counts.

    Seen bigrams keep 0.9 of their history's conditional mass; the remaining
    0.1 backs off to the unigram distribution restricted to unseen words.
    """
    words = [f"w{i}" for i in range(5)]
    counts = {w: int(rng.integers(1, 20)) for w in words}
    total = sum(counts.values())
    unigrams = {}
    bigrams = {}
    for h in words:
        seen = sorted(rng.choice(words, size=int(rng.integers(1, 4)), replace=False))
        h_counts = {w: int(rng.integers(1, 10)) for w in seen}
        h_total = sum(h_counts.values())
        if len(seen) == len(words):
            backoff = 0.0
            for w, c in h_counts.items():
                bigrams[(h, w)] = (math.log10(c / h_total), 0.0)
        else:
            unseen_mass = sum(counts[w] / total for w in words if w not in h_counts)
            backoff = 0.1 / unseen_mass
            for w, c in h_counts.items():
                bigrams[(h, w)] = (math.log10(0.9 * c / h_total), 0.0)
        unigrams[(h,)] = (math.log10(counts[h] / total), math.log10(backoff) if backoff else 0.0)
    return NgramModel(order=2, tables=[unigrams, bigrams])


class TestNormalization:
    def test_conditional_mass_sums_to_one(self):
        import numpy as np

        rng = np.random.default_rng(23)
        for _ in range(20):
            model = _discounted_bigram_model(rng)
            vocab = [w for (w,) in model.tables[0]]
            for history in [()] + [(w,) for w in vocab]:
                mass = sum(10 ** model.score_word(history, w) for w in vocab)
                assert mass <= 1 + 1e-3
                assert mass == pytest.approx(1.0, abs=1e-6)
