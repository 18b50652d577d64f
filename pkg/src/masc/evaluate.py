"""Experiment protocols: classifier dispatch, sweeps, session metrics, reports."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import resample_set
from .graph import GraphConfig, build_knn_graph
from .labelprop import lp_solve, row_labels
from .smoothing import masc_classify, one_hot_labels
from .statdist import fit_gaussian, kl_gaussian, symmetric_kl
from .subspace import gaussian_kernel, kmsm_similarity, kpca_subspace, msm_similarity, pca_subspace

CLASSIFIERS = ("masc", "lp", "msm", "kmsm", "kld")


@dataclass(frozen=True)
class Decision:
    """Outcome of classifying one observation set.

    ``scores`` has one entry per class: smoothness values for masc (lower is
    better), vote fractions for lp, similarities for msm/kmsm (higher is
    better) and divergences for kld (lower is better).
    """

    decision: int
    scores: tuple[float, ...]
    tie: bool


def resolve_threads(threads: int | None = None) -> int:
    """Worker count; None reads MSC_THREADS (0 or unset means auto)."""
    if threads is None:
        raw = os.environ.get("MSC_THREADS", "0")
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"MSC_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    if threads == 0:
        return min(8, os.cpu_count() or 1)
    return threads


def _check_sets(train_sets, observations):
    sets = [np.atleast_2d(np.asarray(ts, dtype=float)) for ts in train_sets]
    obs = np.atleast_2d(np.asarray(observations, dtype=float))
    d = obs.shape[1]
    for p, ts in enumerate(sets, start=1):
        if ts.shape[0] < 1:
            raise ValueError(f"class {p} has no labelled samples")
        if ts.shape[1] != d:
            raise ValueError(f"class {p} dimension {ts.shape[1]} != {d}")
    return sets, obs


def _graph_inputs(train_sets, observations):
    sets, obs = _check_sets(train_sets, observations)
    X = np.vstack(sets + [obs])
    labels = np.concatenate(
        [np.full(ts.shape[0], p, dtype=int) for p, ts in enumerate(sets, start=1)]
    )
    c = len(sets)
    return X, one_hot_labels(labels, c), obs.shape[0], c


def _argmax_decision(scores) -> tuple[int, bool]:
    scores = np.asarray(scores, dtype=float)
    best = scores.max()
    return int(np.argmax(scores)) + 1, int(np.count_nonzero(scores == best)) > 1


def _argmin_decision(scores) -> tuple[int, bool]:
    scores = np.asarray(scores, dtype=float)
    best = scores.min()
    return int(np.argmin(scores)) + 1, int(np.count_nonzero(scores == best)) > 1


def _subspace_q(q, sets, obs):
    smallest = min(min(ts.shape[0] for ts in sets), obs.shape[0])
    return max(1, min(int(q), smallest - 1, obs.shape[1]))


def make_classifier(name: str, *, k: int = 5, sigma: float | None = None,
                    sigma_sample_cap: int = 1000, sigma_seed: int = 0,
                    mu: float = 1.0, q: int = 9, sigma_kernel: float | None = None,
                    energy_cutoff: float = 0.96, msm_top: int = 1,
                    kld_symmetric: bool = True):
    """Callable (train_sets, observations) -> Decision for one classifier id.

    For the graph methods the samples are stacked labelled-first and a fresh
    k-NN graph is built per observation set. The subspace dimension is capped
    at (smallest set size - 1) so thin sets stay usable.
    """
    if name not in CLASSIFIERS:
        raise ValueError(f"unknown classifier {name!r} (choose from {CLASSIFIERS})")
    graph_config = GraphConfig(k=k, sigma=sigma, sigma_sample_cap=sigma_sample_cap,
                               sigma_seed=sigma_seed)

    if name == "masc":
        def classify(train_sets, observations):
            X, Y_l, m, _ = _graph_inputs(train_sets, observations)
            g = build_knn_graph(X, graph_config)
            res = masc_classify(g.S, Y_l, m)
            return Decision(res.decision, tuple(float(v) for v in res.scores), res.tie)

    elif name == "lp":
        def classify(train_sets, observations):
            X, Y_l, m, c = _graph_inputs(train_sets, observations)
            g = build_knn_graph(X, graph_config)
            Y = np.vstack([Y_l, np.zeros((m, c))])
            M = lp_solve(g.S, Y, mu)
            votes = row_labels(M[-m:])
            counts = np.bincount(votes, minlength=c + 1)[1:]
            decision, tie = _argmax_decision(counts)
            return Decision(decision, tuple(float(v) / m for v in counts), tie)

    elif name == "msm":
        def classify(train_sets, observations):
            sets, obs = _check_sets(train_sets, observations)
            q_eff = _subspace_q(q, sets, obs)
            test = pca_subspace(obs, q_eff)
            sims = [msm_similarity(pca_subspace(ts, q_eff), test, msm_top)
                    for ts in sets]
            decision, tie = _argmax_decision(sims)
            return Decision(decision, tuple(sims), tie)

    elif name == "kmsm":
        def classify(train_sets, observations):
            sets, obs = _check_sets(train_sets, observations)
            q_eff = _subspace_q(q, sets, obs)
            skern = sigma_kernel
            if skern is None:
                from .graph import estimate_sigma

                skern = estimate_sigma(np.vstack(sets + [obs]), graph_config)
            kernel = gaussian_kernel(skern)
            test = kpca_subspace(obs, q_eff, kernel=kernel)
            sims = [kmsm_similarity(kpca_subspace(ts, q_eff, kernel=kernel), test, msm_top)
                    for ts in sets]
            decision, tie = _argmax_decision(sims)
            return Decision(decision, tuple(sims), tie)

    else:  # kld
        def classify(train_sets, observations):
            sets, obs = _check_sets(train_sets, observations)
            test = fit_gaussian(obs, energy_cutoff)
            models = [fit_gaussian(ts, energy_cutoff) for ts in sets]
            if kld_symmetric:
                scores = [symmetric_kl(test, mdl) for mdl in models]
            else:
                scores = [kl_gaussian(test, mdl) for mdl in models]
            decision, tie = _argmin_decision(scores)
            return Decision(decision, tuple(scores), tie)

    return classify


def error_rate(decisions) -> float:
    """Fraction of (predicted, true) pairs that disagree."""
    pairs = list(decisions)
    if not pairs:
        raise ValueError("decisions nonempty required")
    wrong = sum(1 for pred, true in pairs if pred != true)
    return wrong / len(pairs)


def session_metric(errors, sessions: int = 3) -> float:
    """Mean error over all ordered (train session, test session) pairs."""
    pairs = [(i, j) for i in range(1, sessions + 1)
             for j in range(1, sessions + 1) if i != j]
    missing = [p for p in pairs if p not in errors]
    if missing:
        raise ValueError(f"missing error entries for session pairs {missing}")
    return sum(float(errors[p]) for p in pairs) / len(pairs)


@dataclass(frozen=True)
class TrialReport:
    """Per-m sweep outcome across seeded trials."""

    m: int
    classifier: str
    trials: int
    seed: int
    errors: tuple[float, ...]
    decisions: tuple[tuple[tuple[int, int], ...], ...]
    mean_error: float
    std_error: float


def observation_sweep(factory, classifier, classes: int, m_values, trials: int,
                      seed: int, classifier_name: str = "",
                      threads: int | None = None) -> list[TrialReport]:
    """For each m, classify ``trials`` fresh observation sets per class.

    ``factory(class_id, m, rng)`` returns (train_sets, observations). Each
    (m, trial, class) task gets its own generator split off the master seed,
    so parallel runs reproduce serial ones; errors are accumulated as integer
    counts before dividing.
    """
    m_values = [int(m) for m in m_values]
    if not m_values:
        raise ValueError("m_values nonempty required")
    if trials < 1:
        raise ValueError("trials >= 1 required")
    workers = resolve_threads(threads)
    reports = []
    for m in m_values:
        def run_trial(t, m=m):
            wrong = 0
            decs = []
            for cls in range(1, classes + 1):
                rng = np.random.default_rng(np.random.SeedSequence([seed, m, t, cls]))
                train_sets, obs = factory(cls, m, rng)
                dec = classifier(train_sets, obs)
                decs.append((dec.decision, cls))
                wrong += int(dec.decision != cls)
            return wrong, tuple(decs)

        if workers <= 1:
            results = [run_trial(t) for t in range(trials)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run_trial, range(trials)))
        wrongs = [r[0] for r in results]
        errors = tuple(w / classes for w in wrongs)
        mean = sum(wrongs) / (classes * trials)
        std = float(np.std(np.asarray(errors)))
        reports.append(TrialReport(
            m=m, classifier=classifier_name, trials=trials, seed=seed,
            errors=errors, decisions=tuple(r[1] for r in results),
            mean_error=float(mean), std_error=std,
        ))
    return reports


SWEEP_CSV_HEADER = "m,classifier,mean_error,std_error,trials,seed"


def sweep_to_csv(reports) -> str:
    lines = [SWEEP_CSV_HEADER]
    for r in reports:
        lines.append(
            f"{r.m},{r.classifier},{r.mean_error!r},{r.std_error!r},{r.trials},{r.seed}"
        )
    return "\n".join(lines) + "\n"


def sweep_to_json(reports) -> str:
    payload = [
        {
            "m": r.m,
            "classifier": r.classifier,
            "mean_error": r.mean_error,
            "std_error": r.std_error,
            "trials": r.trials,
            "seed": r.seed,
            "errors": list(r.errors),
        }
        for r in reports
    ]
    return json.dumps(payload) + "\n"


def session_pair_errors(sessions, classifier, r: int = 1) -> dict[tuple[int, int], float]:
    """e(i, j): error with session i as training and session j as test.

    Both sides are thinned with step r before use; each class's test-session
    set is classified as one observation set.
    """
    if len(sessions) < 2:
        raise ValueError("need at least 2 sessions")
    classes = len(sessions[0])
    for s, gallery in enumerate(sessions, start=1):
        if len(gallery) != classes:
            raise ValueError(f"session {s} has {len(gallery)} classes, expected {classes}")
    errors = {}
    for i, train_gallery in enumerate(sessions, start=1):
        train_sets = [resample_set(np.asarray(xs, dtype=float), r) for xs in train_gallery]
        for j, test_gallery in enumerate(sessions, start=1):
            if i == j:
                continue
            wrong = 0
            for cls in range(1, classes + 1):
                obs = resample_set(np.asarray(test_gallery[cls - 1], dtype=float), r)
                wrong += int(classifier(train_sets, obs).decision != cls)
            errors[(i, j)] = wrong / classes
    return errors


@dataclass(frozen=True)
class SplitReport:
    """Random train/test split protocol outcome."""

    train_count: int
    trials: int
    seed: int
    r: int
    errors: tuple[float, ...]
    mean_error: float
    std_error: float


def random_split_errors(gallery, classifier, train_count: int, trials: int,
                        seed: int, r: int = 1) -> SplitReport:
    """Split each class's set into train/test at random, ``trials`` times.

    The held-out part of each class is classified as one observation set;
    both sides are thinned with step r after the split.
    """
    sets = [np.asarray(xs, dtype=float) for xs in gallery]
    classes = len(sets)
    if train_count < 1:
        raise ValueError("train_count >= 1 required")
    for p, xs in enumerate(sets, start=1):
        if xs.shape[0] <= train_count:
            raise ValueError(
                f"class {p} has {xs.shape[0]} samples, needs more than {train_count}"
            )
    wrongs = []
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
        train_sets, test_sets = [], []
        for xs in sets:
            perm = rng.permutation(xs.shape[0])
            train_sets.append(resample_set(xs[perm[:train_count]], r))
            test_sets.append(resample_set(xs[perm[train_count:]], r))
        wrong = 0
        for cls in range(1, classes + 1):
            wrong += int(classifier(train_sets, test_sets[cls - 1]).decision != cls)
        wrongs.append(wrong)
    errors = tuple(w / classes for w in wrongs)
    mean = sum(wrongs) / (classes * trials)
    return SplitReport(train_count=train_count, trials=trials, seed=seed, r=r,
                       errors=errors, mean_error=float(mean),
                       std_error=float(np.std(np.asarray(errors))))
