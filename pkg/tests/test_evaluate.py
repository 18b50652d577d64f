import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masc.evaluate import (
    Decision,
    error_rate,
    make_classifier,
    observation_sweep,
    random_split_errors,
    resolve_threads,
    session_metric,
    session_pair_errors,
    sweep_to_csv,
)


class TestErrorRate:
    def test_all_correct(self):
        assert error_rate([(1, 1), (2, 2)]) == 0.0

    def test_all_wrong(self):
        assert error_rate([(1, 2), (2, 1)]) == 1.0

    def test_three_of_ten(self):
        pairs = [(1, 1)] * 7 + [(2, 1)] * 3
        assert error_rate(pairs) == pytest.approx(0.3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            error_rate([])

    @given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 4)), min_size=1, max_size=40))
    @settings(max_examples=50)
    def test_bounds(self, pairs):
        assert 0.0 <= error_rate(pairs) <= 1.0


class TestSessionMetric:
    def test_constant_table(self):
        errors = {(i, j): 0.1 for i in (1, 2, 3) for j in (1, 2, 3) if i != j}
        assert session_metric(errors) == pytest.approx(0.1)

    def test_arithmetic(self):
        pairs = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]
        errors = dict.fromkeys(pairs, 0.0)
        errors[(3, 2)] = 0.6
        assert session_metric(errors) == pytest.approx(0.1)

    def test_exactly_six_terms(self):
        errors = {(i, j): 1.0 for i in (1, 2, 3) for j in (1, 2, 3) if i != j}
        assert len(errors) == 6
        assert session_metric(errors, sessions=3) == 1.0

    def test_missing_pair_rejected(self):
        with pytest.raises(ValueError, match="missing"):
            session_metric({(1, 2): 0.0}, sessions=3)


def blob_factory(cls, m, rng):
    """Trivially separable instance: far-apart class blobs."""
    centers = [np.zeros(3), 10.0 * np.ones(3), -10.0 * np.ones(3)]
    train = [c + 0.2 * rng.normal(size=(6, 3)) for c in centers]
    obs = centers[cls - 1] + 0.2 * rng.normal(size=(m, 3))
    return train, obs


class TestObservationSweep:
    def test_separable_error_zero(self):
        reports = observation_sweep(
            blob_factory, make_classifier("masc", k=3), classes=3,
            m_values=[4, 8], trials=2, seed=0, classifier_name="masc",
        )
        assert [r.mean_error for r in reports] == [0.0, 0.0]
        assert all(len(r.errors) == 2 for r in reports)

    def test_deterministic(self):
        kwargs = dict(classes=3, m_values=[5], trials=3, seed=42,
                      classifier_name="masc")
        clf = make_classifier("masc", k=3)
        a = observation_sweep(blob_factory, clf, **kwargs)
        b = observation_sweep(blob_factory, clf, **kwargs)
        assert a == b

    def test_thread_count_does_not_change_results(self):
        clf = make_classifier("masc", k=3)
        kwargs = dict(classes=3, m_values=[5, 7], trials=4, seed=7,
                      classifier_name="masc")
        serial = observation_sweep(blob_factory, clf, threads=1, **kwargs)
        parallel = observation_sweep(blob_factory, clf, threads=4, **kwargs)
        assert serial == parallel
        assert sweep_to_csv(serial) == sweep_to_csv(parallel)

    def test_csv_shape(self):
        reports = observation_sweep(
            blob_factory, make_classifier("kld"), classes=3,
            m_values=[6], trials=2, seed=1, classifier_name="kld",
        )
        lines = sweep_to_csv(reports).strip().splitlines()
        assert lines[0] == "m,classifier,mean_error,std_error,trials,seed"
        assert lines[1].startswith("6,kld,")

    def test_rejects_empty_m_values(self):
        with pytest.raises(ValueError):
            observation_sweep(blob_factory, make_classifier("masc"), 3, [], 1, 0)


class TestSessionProtocols:
    def make_sessions(self, seed, classes=3, per_class=12):
        rng = np.random.default_rng(seed)
        centers = [8.0 * np.eye(4)[c] for c in range(classes)]
        def one():
            return [c + 0.3 * rng.normal(size=(per_class, 4)) for c in centers]
        return [one(), one(), one()]

    def test_pairs_on_separable_data(self):
        sessions = self.make_sessions(0)
        errors = session_pair_errors(sessions, make_classifier("masc", k=3), r=2)
        assert set(errors) == {(i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i != j}
        assert session_metric(errors, sessions=3) == 0.0

    def test_resampling_thins_both_sides(self):
        sessions = self.make_sessions(1, per_class=9)
        seen = {}

        def spy(train_sets, obs):
            seen["train"] = [len(ts) for ts in train_sets]
            seen["obs"] = len(obs)
            return Decision(1, (0.0,) * 3, False)

        session_pair_errors(sessions[:2], spy, r=4)
        assert seen["train"] == [3, 3, 3]
        assert seen["obs"] == 3

    def test_random_split_protocol(self):
        rng = np.random.default_rng(2)
        centers = [6.0 * np.eye(3)[c] for c in range(3)]
        gallery = [c + 0.3 * rng.normal(size=(20, 3)) for c in centers]
        report = random_split_errors(gallery, make_classifier("masc", k=3),
                                     train_count=10, trials=4, seed=0)
        assert report.mean_error == 0.0
        assert len(report.errors) == 4
        again = random_split_errors(gallery, make_classifier("masc", k=3),
                                    train_count=10, trials=4, seed=0)
        assert report == again

    def test_split_needs_spare_samples(self):
        gallery = [np.zeros((5, 2)), np.ones((5, 2))]
        with pytest.raises(ValueError, match="needs more than"):
            random_split_errors(gallery, make_classifier("kld"), 5, 1, 0)


def test_unknown_classifier_rejected():
    with pytest.raises(ValueError, match="unknown classifier"):
        make_classifier("svm")


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv("MSC_THREADS", "3")
    assert resolve_threads() == 3
    monkeypatch.setenv("MSC_THREADS", "0")
    assert resolve_threads() >= 1
    monkeypatch.delenv("MSC_THREADS")
    assert resolve_threads() >= 1
    monkeypatch.setenv("MSC_THREADS", "zebra")
    with pytest.raises(ValueError):
        resolve_threads()
