import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctckit import (
    Alphabet,
    InvalidInputError,
    PosteriorTable,
    ResourceLimitError,
    best_path_decode,
    collapse,
    forward_labeling_probability,
    labeling_probability,
)

from conftest import make_alphabet, make_table, random_table


class TestAlphabet:
    def test_basic(self):
        ab = make_alphabet("ab")
        assert len(ab) == 4
        assert ab.blank == "-"
        assert ab.space == " "
        assert ab.index_of("b") == 3

    def test_duplicate_symbols_rejected(self):
        with pytest.raises(InvalidInputError):
            Alphabet(("-", " ", "a", "a"), 0, 1)

    def test_blank_equals_space_rejected(self):
        with pytest.raises(InvalidInputError):
            Alphabet(("-", " ", "a"), 0, 0)

    def test_out_of_range_indices_rejected(self):
        with pytest.raises(InvalidInputError):
            Alphabet(("-", " ", "a"), 0, 5)

    def test_from_symbols(self):
        ab = Alphabet.from_symbols([" ", "x", "-"])
        assert ab.blank_index == 2
        assert ab.space_index == 0


class TestPosteriorTable:
    def test_row_sum_enforced(self):
        with pytest.raises(InvalidInputError, match="sum"):
            make_table([[0.5, 0.1, 0.1, 0.1]], "ab")

    def test_width_must_match_alphabet(self):
        with pytest.raises(InvalidInputError, match="width"):
            make_table([[0.5, 0.5]], "ab")

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            make_table(np.empty((0, 4)), "ab")

    def test_negative_probability_rejected(self):
        with pytest.raises(InvalidInputError):
            make_table([[1.2, -0.2, 0.0, 0.0]], "ab")


class TestCollapse:
    # '-' is the blank (index 0) throughout.

    def test_duplicates_then_blanks(self):
        ab = make_alphabet("ab")
        path = [ab.index_of(c) for c in "aa-ab-"]
        assert collapse(path, ab) == "aab"

    def test_all_blank(self):
        ab = make_alphabet("ab")
        assert collapse([0, 0, 0, 0], ab) == ""

    def test_blank_separates_duplicates(self):
        ab = make_alphabet("ab")
        path = [ab.index_of(c) for c in "a-a"]
        assert collapse(path, ab) == "aa"

    def test_out_of_range_index(self):
        with pytest.raises(InvalidInputError):
            collapse([0, 9], make_alphabet("ab"))

    @given(st.text(alphabet=" ab", max_size=12))
    def test_idempotent_on_blank_free_duplicate_free_strings(self, text):
        # Collapse only fixes strings with no blanks and no adjacent duplicates.
        ab = make_alphabet("ab")
        deduped = "".join(c for i, c in enumerate(text) if i == 0 or c != text[i - 1])
        path = [ab.index_of(c) for c in deduped]
        assert collapse(path, ab) == deduped


class TestBestPath:
    def test_single_frame_certain(self):
        t = make_table([[0.0, 0.0, 1.0, 0.0]], "ab")
        assert best_path_decode(t) == ("a", 1.0)

    def test_four_frame_argmax_sequence(self):
        # argmax sequence: a, a, blank, b
        t = make_table(
            [
                [0.1, 0.0, 0.7, 0.2],
                [0.2, 0.0, 0.6, 0.2],
                [0.8, 0.0, 0.1, 0.1],
                [0.3, 0.0, 0.2, 0.5],
            ],
            "ab",
        )
        text, prob = best_path_decode(t)
        assert text == "ab"
        assert prob == pytest.approx(0.7 * 0.6 * 0.8 * 0.5)

    def test_weakly_predicted_label_counterexample(self):
        # Per-frame argmax says blank twice, yet the summed mass of "a" wins.
        t = make_table([[0.6, 0.0, 0.4, 0.0]] * 2, "ab")
        text, prob = best_path_decode(t)
        assert text == ""
        assert prob == pytest.approx(0.36)
        assert labeling_probability(t, "a") == pytest.approx(0.64)

    def test_tie_breaks_to_lowest_index(self):
        t = make_table([[0.5, 0.0, 0.5, 0.0]], "ab")
        assert best_path_decode(t)[0] == ""  # blank is index 0

    def test_matches_argmax_then_collapse_on_random_tables(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            t = random_table(rng)
            text, prob = best_path_decode(t)
            path = [int(np.argmax(row)) for row in t.frames]
            assert text == collapse(path, t.alphabet)
            assert prob == pytest.approx(float(np.prod(np.max(t.frames, axis=1))))

    def test_path_probability_dominates_random_paths(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            t = random_table(rng)
            _, best_prob = best_path_decode(t)
            for _ in range(20):
                path = rng.integers(0, len(t.alphabet), size=t.num_frames)
                p = float(np.prod(t.frames[np.arange(t.num_frames), path]))
                assert best_prob >= p - 1e-12


class TestLabelingProbability:
    def test_two_frame_blank_a(self):
        t = make_table([[0.6, 0.0, 0.4, 0.0]] * 2, "ab")
        # paths: aa, a-, -a -> "a"; -- -> ""
        assert labeling_probability(t, "a") == pytest.approx(0.4 * 0.4 + 0.4 * 0.6 + 0.6 * 0.4)
        assert labeling_probability(t, "") == pytest.approx(0.36)

    def test_distribution_sums_to_one(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            t = random_table(rng)
            labelings = set()
            import itertools

            for path in itertools.product(range(len(t.alphabet)), repeat=t.num_frames):
                labelings.add(collapse(path, t.alphabet))
            total = sum(labeling_probability(t, l) for l in labelings)
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_cap_refusal_names_forward_variant(self):
        t = make_table([[1.0, 0.0, 0.0, 0.0]] * 13, "ab")
        with pytest.raises(ResourceLimitError, match="forward_labeling_probability"):
            labeling_probability(t, "")

    def test_configurable_cap(self):
        t = make_table([[1.0, 0.0, 0.0, 0.0]] * 3, "ab")
        with pytest.raises(ResourceLimitError):
            labeling_probability(t, "", max_frames=2)


class TestForwardLabelingProbability:
    def test_agrees_with_enumeration(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            t = random_table(rng)
            for label in ("", "a", "aa", "ab", "b"):
                if any(c not in t.alphabet.symbols for c in label):
                    continue
                assert forward_labeling_probability(t, label) == pytest.approx(
                    labeling_probability(t, label), abs=1e-12
                )

    def test_no_length_cap(self):
        t = make_table([[0.5, 0.0, 0.5, 0.0]] * 20, "ab")
        assert forward_labeling_probability(t, "") == pytest.approx(0.5**20)

    def test_impossible_labeling(self):
        t = make_table([[0.5, 0.0, 0.5, 0.0]], "ab")
        assert forward_labeling_probability(t, "ab") == 0.0
