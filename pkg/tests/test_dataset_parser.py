import os

import pytest

from prompt_learning_engine.config.loader import load_task
from prompt_learning_engine.models.errors import InvalidDatasetError
from prompt_learning_engine.parsers.dataset_parser import DatasetParser, read_corpus


@pytest.fixture
def sst2_parser():
    return DatasetParser(load_task("sst-2").label_index)


@pytest.fixture
def mrpc_parser():
    task = load_task("mrpc")
    return DatasetParser(task.label_index, pair=task.pair)


class TestSingleSentenceRows:
    def test_label_names_and_indices(self, sst2_parser):
        examples = sst2_parser.parse_lines(["positive\tgood movie\n", "0\tdull plot\n", "negative\t slow \n"])
        assert [ex.label for ex in examples] == [1, 0, 0]
        assert [ex.text_a for ex in examples] == ["good movie", "dull plot", "slow"]
        assert all(ex.text_b is None for ex in examples)

    def test_uid_is_the_line_number(self, sst2_parser):
        examples = sst2_parser.parse_lines(["# header\n", "\n", "positive\tgood\n", "negative\tbad\r\n"])
        assert [ex.uid for ex in examples] == [3, 4]
        assert examples[1].text_a == "bad"

    def test_extra_column_is_rejected(self, sst2_parser):
        with pytest.raises(InvalidDatasetError, match="line 2: expected 2 tab-separated columns, got 3"):
            sst2_parser.parse_lines(["positive\tfine\n", "positive\tgood movie\tbut long\n"])

    def test_missing_text_column(self, sst2_parser):
        with pytest.raises(InvalidDatasetError, match="line 1"):
            sst2_parser.parse_lines(["positive\n"])

    @pytest.mark.parametrize("label", ["neutral", "2", "-1"])
    def test_unknown_label_names_the_line(self, sst2_parser, label):
        with pytest.raises(InvalidDatasetError, match="line 1"):
            sst2_parser.parse_lines([f"{label}\tsome text\n"])

    def test_only_comments_is_empty(self, sst2_parser):
        with pytest.raises(InvalidDatasetError, match="no examples"):
            sst2_parser.parse_lines(["# nothing here\n", "\n"])


class TestPairRows:
    def test_both_texts_are_kept(self, mrpc_parser):
        [example] = mrpc_parser.parse_lines(["equivalent\the left\the went away\n"])
        assert example.label == 1
        assert (example.text_a, example.text_b) == ("he left", "he went away")

    def test_pair_row_needs_three_columns(self, mrpc_parser):
        with pytest.raises(InvalidDatasetError, match="expected 3 tab-separated columns, got 2"):
            mrpc_parser.parse_lines(["equivalent\the left\n"])

    def test_pair_row_with_a_fourth_column(self, mrpc_parser):
        with pytest.raises(InvalidDatasetError, match="got 4"):
            mrpc_parser.parse_lines(["1\ta\tb\tc\n"])


class TestFiles:
    def test_load_packaged_planted_data(self, data_dir):
        examples = DatasetParser(load_task("planted").label_index).load(os.path.join(data_dir, "train.tsv"))
        assert len(examples) == 80
        assert sorted({ex.label for ex in examples}) == [0, 1]

    def test_read_corpus_drops_the_label_column(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("positive\tgood movie\nplain sentence here\n\n0\tdull plot\n", encoding="utf-8")
        assert read_corpus(str(path)) == ["good movie", "plain sentence here", "dull plot"]
