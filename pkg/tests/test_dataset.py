import numpy as np
import pytest
from hypothesis import given, strategies as st

from mccalib.dataset import (
    WAVEFORM_BASES,
    WAVEFORM_CLASS_PAIRS,
    LabeledDataset,
    generate_waveform,
    load_csv,
    merge_classes,
    stratified_kfold,
)
from mccalib.errors import (
    DataFileError,
    EmptyDatasetError,
    OverlappingGroupsError,
    SchemaError,
    TooFewSamplesError,
    UnknownClassError,
)


def write_csv(path, text):
    path.write_text(text)
    return str(path)


class TestLoadCsv:
    def test_first_appearance_encoding(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", "x,y\n1.0,a\n2.0,b\n3.0,a\n")
        ds = load_csv(p, "y")
        assert ds.n_classes == 2
        assert ds.class_names == ("a", "b")
        assert ds.labels.tolist() == [0, 1, 0]
        assert ds.features[:, 0].tolist() == [1.0, 2.0, 3.0]

    def test_rows_with_missing_cells_dropped(self, tmp_path):
        # 303 data rows, six of them with a missing cell, like the clinical
        # file that motivated row-wise deletion
        rows = ["f1,f2,label"]
        for i in range(303):
            if i % 50 == 7:  # rows 7, 57, ..., 257: six in total
                rows.append(f",{i}.5,yes")
            else:
                rows.append(f"{i}.0,{i}.5,{'yes' if i % 2 else 'no'}")
        p = write_csv(tmp_path / "heart.csv", "\n".join(rows) + "\n")
        ds = load_csv(p, "label")
        assert ds.n_samples == 297
        assert ds.n_dropped == 6

    def test_unparseable_cell_dropped(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", "x,y\n1.0,a\n?,b\nnan,b\n2.0,b\n")
        ds = load_csv(p, "y")
        assert ds.n_samples == 2
        assert ds.n_dropped == 2

    def test_misspelled_label_column(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", "x,y\n1.0,a\n")
        with pytest.raises(SchemaError):
            load_csv(p, "label")

    def test_label_by_index_without_header(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", "1.0,2.0,a\n3.0,4.0,b\n")
        ds = load_csv(p, 2, header=False)
        assert ds.class_names == ("a", "b")
        assert ds.n_features == 2

    def test_negative_label_index(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", "1.0,a\n2.0,b\n")
        ds = load_csv(p, -1, header=False)
        assert ds.class_names == ("a", "b")

    def test_custom_delimiter(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", "x;y\n1.5;a\n2.5;b\n")
        ds = load_csv(p, "y", delimiter=";")
        assert ds.features[:, 0].tolist() == [1.5, 2.5]

    def test_missing_file(self):
        with pytest.raises(DataFileError):
            load_csv("/nonexistent/nowhere.csv", "y")

    def test_no_usable_rows(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", "x,y\nbad,a\n")
        with pytest.raises(EmptyDatasetError):
            load_csv(p, "y")


class TestMergeClasses:
    def make(self, labels, k):
        labels = np.asarray(labels)
        X = np.arange(len(labels), dtype=float)[:, None]
        return LabeledDataset(X, labels, tuple(f"c{i}" for i in range(k)))

    def test_pair_merge(self):
        ds = self.make([0, 1, 2, 3, 4, 0, 1], 5)
        out = merge_classes(ds, [["c0", "c1"]])
        assert out.n_classes == 4
        assert out.class_names[0] == "c0+c1"
        # all former c0/c1 samples share one label
        merged = out.labels[[0, 1, 5, 6]]
        assert (merged == merged[0]).all()
        assert out.n_samples == ds.n_samples

    def test_abalone_style_merge_gives_eleven_classes(self):
        ring_values = [str(r) for r in range(1, 30)]
        labels = np.arange(29) % 29
        X = np.zeros((29, 1))
        ds = LabeledDataset(X, labels, tuple(ring_values))
        groups = [
            [str(r) for r in range(1, 6)],
            ["14", "15"],
            [str(r) for r in range(16, 30)],
        ]
        assert merge_classes(ds, groups).n_classes == 11

    def test_empty_groups_identity(self):
        ds = self.make([0, 1, 2], 3)
        out = merge_classes(ds, [])
        assert out is ds

    def test_unknown_class(self):
        ds = self.make([0, 1], 2)
        with pytest.raises(UnknownClassError):
            merge_classes(ds, [["c0", "zz"]])

    def test_overlapping_groups(self):
        ds = self.make([0, 1, 2], 3)
        with pytest.raises(OverlappingGroupsError):
            merge_classes(ds, [["c0", "c1"], ["c1", "c2"]])

    def test_features_shared_bit_exact(self):
        ds = self.make([0, 1, 2, 1], 3)
        out = merge_classes(ds, [["c1", "c2"]])
        assert out.features is ds.features


class TestStratifiedKfold:
    def test_exact_divisibility(self):
        X = np.zeros((100, 1))
        y = np.repeat([0, 1], 50)
        ds = LabeledDataset(X, y, ("a", "b"))
        plan = stratified_kfold(ds, 10, seed=3)
        for f in range(10):
            test = plan.test_indices(f)
            assert len(test) == 10
            assert (ds.labels[test] == 0).sum() == 5
            assert (ds.labels[test] == 1).sum() == 5

    def test_determinism(self):
        ds = LabeledDataset(np.zeros((40, 1)), np.arange(40) % 3, ("a", "b", "c"))
        a = stratified_kfold(ds, 5, seed=9)
        b = stratified_kfold(ds, 5, seed=9)
        assert (a.assignments == b.assignments).all()
        c = stratified_kfold(ds, 5, seed=10)
        assert (a.assignments != c.assignments).any()

    def test_thirteen_samples_over_ten_folds(self):
        y = np.concatenate([np.zeros(13, dtype=int), np.ones(60, dtype=int)])
        ds = LabeledDataset(np.zeros((73, 1)), y, ("small", "big"))
        plan = stratified_kfold(ds, 10, seed=0)
        counts = [int((ds.labels[plan.test_indices(f)] == 0).sum()) for f in range(10)]
        assert sum(counts) == 13
        assert max(counts) - min(counts) <= 1

    def test_every_sample_in_exactly_one_test_fold(self):
        ds = LabeledDataset(np.zeros((37, 1)), np.arange(37) % 4, tuple("abcd"))
        plan = stratified_kfold(ds, 5, seed=1)
        seen = np.concatenate([plan.test_indices(f) for f in range(5)])
        assert sorted(seen.tolist()) == list(range(37))

    def test_k_below_two(self):
        ds = LabeledDataset(np.zeros((4, 1)), np.array([0, 0, 1, 1]), ("a", "b"))
        with pytest.raises(ValueError):
            stratified_kfold(ds, 1, seed=0)

    def test_empty_dataset(self):
        ds = LabeledDataset(np.zeros((0, 1)), np.zeros(0, dtype=int), ("a",))
        with pytest.raises(TooFewSamplesError):
            stratified_kfold(ds, 2, seed=0)

    @given(
        counts=st.lists(st.integers(min_value=1, max_value=40), min_size=1, max_size=5),
        k=st.integers(min_value=2, max_value=10),
        seed=st.integers(min_value=0, max_value=2**32),
    )
    def test_per_class_balance_property(self, counts, k, seed):
        y = np.concatenate([np.full(n, c) for c, n in enumerate(counts)])
        ds = LabeledDataset(np.zeros((len(y), 1)), y, tuple(f"c{i}" for i in range(len(counts))))
        plan = stratified_kfold(ds, k, seed)
        for c in range(len(counts)):
            per_fold = [int((ds.labels[plan.test_indices(f)] == c).sum()) for f in range(k)]
            assert max(per_fold) - min(per_fold) <= 1
            assert sum(per_fold) == counts[c]


class TestWaveform:
    def test_class_balance_at_5000(self):
        ds = generate_waveform(5000, seed=20200117)
        counts = ds.class_counts()
        assert counts.sum() == 5000
        # binomial noise: sd ~ 33, allow 5 sigma around 1667
        assert counts.min() > 1500 and counts.max() < 1834

    def test_shape_and_determinism(self):
        a = generate_waveform(3, seed=5)
        b = generate_waveform(3, seed=5)
        assert a.features.shape == (3, 21)
        assert (a.features == b.features).all()
        assert (a.labels == b.labels).all()

    def test_zero_noise_rows_on_convex_combinations(self):
        ds = generate_waveform(50, seed=2, noise_scale=0.0)
        for row, label in zip(ds.features, ds.labels):
            a, b = WAVEFORM_CLASS_PAIRS[label]
            ha, hb = WAVEFORM_BASES[a], WAVEFORM_BASES[b]
            direction = ha - hb
            u = float(np.dot(row - hb, direction) / np.dot(direction, direction))
            assert 0.0 <= u <= 1.0
            np.testing.assert_allclose(row, u * ha + (1 - u) * hb, atol=1e-12)

    def test_n_too_small(self):
        with pytest.raises(ValueError):
            generate_waveform(2, seed=0)


def test_load_merge_split_pipeline_deterministic(tmp_path):
    rng = np.random.default_rng(8)
    rows = ["a,b,cls"]
    for i in range(60):
        rows.append(f"{rng.normal():.6f},{rng.normal():.6f},k{i % 4}")
    p = write_csv(tmp_path / "d.csv", "\n".join(rows) + "\n")

    def pipeline():
        ds = load_csv(p, "cls")
        ds = merge_classes(ds, [["k0", "k3"]])
        return ds, stratified_kfold(ds, 5, seed=77)

    (ds1, plan1), (ds2, plan2) = pipeline(), pipeline()
    assert (ds1.features == ds2.features).all()
    assert (ds1.labels == ds2.labels).all()
    assert (plan1.assignments == plan2.assignments).all()
