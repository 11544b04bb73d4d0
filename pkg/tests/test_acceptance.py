"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every expected value here is either computed by an independent oracle
inside this module (enumeration, brute force, byte-level fixtures) or is
a tolerance stated up front.  Run with ``pytest -s tests/test_acceptance.py``
to see the per-criterion lines.
"""

import struct
import time
from contextlib import contextmanager

import numpy as np
import pytest

import telkit as tk
from telkit.ensemble import majority_error_probability, telvi_fit
from telkit.experiment import (
    ExperimentConfig,
    run_experiment,
    write_learner_csv,
    write_report,
)
from telkit.hosvd import hosvd, reconstruct
from telkit.io import (
    BadMagicError,
    ImageFormatError,
    ShapeError,
    TruncatedFileError,
    UnsupportedDtypeError,
    UnsupportedVersionError,
    decode_ppm,
    load_tensor_dataset,
    save_tensor_dataset,
)
from telkit.learners import ClassifierSpec, VectorDataset, accuracy, fit
from telkit.learners.logit import logit_gradient, logit_loss
from telkit.synth import BENCHMARK_SPEC
from telkit.tensor import DenseTensor, frobenius_norm, mode_n_product, unfold


@contextmanager
def criterion(number: int, description: str):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} FAIL - {description}")
        raise
    elapsed = time.perf_counter() - start
    print(f"ACCEPTANCE {number} PASS - {description} ({elapsed:.2f}s)")


def random_tensor(rng, shape) -> DenseTensor:
    return DenseTensor(shape, rng.standard_normal(int(np.prod(shape))))


def test_criterion_1_mode_product_unfolded_identity():
    """unfold(X x_n A, n) == A @ unfold(X, n) to 1e-12 relative."""
    with criterion(1, "mode-product / unfolding equivalence"):
        start = time.perf_counter()
        rng = np.random.default_rng(2024)
        for _ in range(200):
            order = int(rng.integers(2, 5))
            shape = tuple(int(d) for d in rng.integers(1, 9, size=order))
            x = random_tensor(rng, shape)
            mode = int(rng.integers(0, order))
            a = rng.standard_normal((int(rng.integers(1, 9)), shape[mode]))
            lhs = unfold(mode_n_product(x, a, mode), mode)
            rhs = a @ unfold(x, mode)
            scale = max(np.linalg.norm(rhs), 1e-300)
            assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale
        assert time.perf_counter() - start < 5.0


def test_criterion_2_hosvd_losslessness():
    """Full-rank reconstruction to 1e-9; orthonormality to 1e-10."""
    with criterion(2, "full-rank HOSVD losslessness and orthonormality"):
        start = time.perf_counter()
        rng = np.random.default_rng(2025)
        for _ in range(100):
            shape = (
                int(rng.integers(2, 9)),
                int(rng.integers(2, 10)),
                int(rng.integers(2, 11)),
            )
            x = random_tensor(rng, shape)
            f = hosvd(x, shape)
            err = np.linalg.norm(reconstruct(f).data - x.data)
            assert err <= 1e-9 * frobenius_norm(x)
            for factor in f.factors:
                gram = factor.T @ factor
                assert np.linalg.norm(gram - np.eye(factor.shape[1])) <= 1e-10
        assert time.perf_counter() - start < 10.0


def test_criterion_3_truncation_error_bound():
    """||X - Xhat||^2 <= sum over modes of the discarded spectra."""
    with criterion(3, "truncation error bounded by discarded spectra"):
        rng = np.random.default_rng(2026)
        for _ in range(50):
            shape = tuple(int(d) for d in rng.integers(2, 9, size=3))
            x = random_tensor(rng, shape)
            rank = tuple(int(rng.integers(1, d + 1)) for d in shape)
            f = hosvd(x, rank)
            err_sq = float(np.linalg.norm(reconstruct(f).data - x.data) ** 2)
            bound = 0.0
            for n in range(3):
                # independent spectra: plain LAPACK on each unfolding
                s = np.linalg.svd(unfold(x, n), compute_uv=False)
                bound += float(np.sum(s[f.effective_rank[n] :] ** 2))
            assert err_sq <= bound + 1e-8 * frobenius_norm(x) ** 2


def test_criterion_4_majority_error_probability():
    """Closed form vs enumeration (exact), Monte Carlo, monotonicity."""
    with criterion(4, "vote-error closed form vs enumeration and simulation"):
        # exhaustive enumeration over every voter outcome, N <= 15
        for n in range(1, 16):
            popcounts = np.array([bin(m).count("1") for m in range(1 << n)])
            for p in [0.05, 0.1, 0.3, 0.45, 0.5, 0.7, 0.95]:
                probs = p ** popcounts * (1 - p) ** (n - popcounts)
                enumerated = float(np.sum(probs[popcounts >= (n + 1) // 2]))
                closed = majority_error_probability(p, n)
                assert abs(closed - enumerated) <= 1e-12

        # Monte Carlo with 200k draws of N voters each
        rng = np.random.default_rng(2027)
        for p in [0.1, 0.3, 0.45]:
            for n in [3, 11, 25]:
                wrong = rng.binomial(n, p, size=200_000)
                simulated = float(np.mean(wrong >= (n + 1) // 2))
                assert abs(simulated - majority_error_probability(p, n)) <= 0.005

        # monotone nonincreasing over odd N at p = 0.3
        values = [majority_error_probability(0.3, n) for n in range(1, 42, 2)]
        assert all(a >= b - 1e-15 for a, b in zip(values, values[1:]))


def _two_class_tensors(rng, shape, per_class):
    samples, labels = [], []
    size = int(np.prod(shape))
    for label in range(2):
        center = 4.0 * rng.standard_normal(size)
        for _ in range(per_class):
            samples.append(DenseTensor(shape, center + rng.standard_normal(size)))
            labels.append(label)
    return tk.LabeledTensorDataset(samples, np.array(labels))


def test_criterion_5_learner_count_structure():
    """Rank (5,5,2) instantiates 12 base learners; (2,2,1) five."""
    with criterion(5, "learner count equals the sum of the rank tuple"):
        rng = np.random.default_rng(2028)
        knn = ClassifierSpec("knn", {"k": 1})
        for shape in [(6, 6, 3), (8, 9, 4)]:
            data = _two_class_tensors(rng, shape, 4)
            model = telvi_fit(data, (5, 5, 2), knn, seed=1)
            assert model.n_learners == 12
            assert set(model.base_models) == {
                (0, r) for r in range(5)
            } | {(1, r) for r in range(5)} | {(2, r) for r in range(2)}

            model_small = telvi_fit(data, (2, 2, 1), knn, seed=1)
            assert model_small.n_learners == 5


def _benchmark_config(**overrides):
    payload = {
        "dataset": {"synthetic": BENCHMARK_SPEC.to_dict()},
        "train_fraction": 0.5,
        "method": "telvi",
        "rank": [2, 2, 1],
        "base_grid": [{"kind": "knn", "hyperparameters": {"k": 3}}],
        "seed": 7,
    }
    payload.update(overrides)
    return ExperimentConfig.from_dict(payload)


def test_criterion_6_ensemble_benefit_on_benchmark():
    """Ensemble beats its learners' mean and reaches 0.9 absolute."""
    with criterion(6, "ensemble accuracy exceeds mean learner and 0.9"):
        start = time.perf_counter()
        report = run_experiment(_benchmark_config())
        assert report.ensemble_accuracy > report.mean_learner_accuracy()
        assert report.ensemble_accuracy >= 0.9
        assert time.perf_counter() - start < 30.0


def test_criterion_7_baseline_parity_and_determinism(tmp_path):
    """Bagging runs end-to-end; both reports byte-stable across reruns."""
    with criterion(7, "bagging parity harness with byte-identical reports"):
        telvi_config = _benchmark_config()
        bagging_config = _benchmark_config(
            method="bagging", rank=None, pca_dim=16, n_estimators=12
        )
        bagging_report = run_experiment(bagging_config)
        assert len(bagging_report.per_learner) == 12

        for name, config in [("telvi", telvi_config), ("bagging", bagging_config)]:
            blobs = []
            for run in range(2):
                report = run_experiment(config)
                json_path = tmp_path / f"{name}{run}.json"
                csv_path = tmp_path / f"{name}{run}.csv"
                write_report(report, json_path)
                write_learner_csv(report, csv_path)
                blobs.append(json_path.read_bytes() + csv_path.read_bytes())
            assert blobs[0] == blobs[1]


def test_criterion_8_learner_unit_contracts():
    """Gradient check, SVM dual feasibility, tree monotonicity, KNN."""
    with criterion(8, "base-learner optimizer and consistency contracts"):
        start = time.perf_counter()
        rng = np.random.default_rng(2029)

        # logistic loss: analytic vs central finite differences
        X = rng.standard_normal((10, 3))
        labels = rng.integers(0, 3, size=10)
        Y = (labels[:, None] == np.arange(3)[None, :]).astype(float)
        W = 0.4 * rng.standard_normal((3, 3))
        b = 0.4 * rng.standard_normal(3)
        gW, gb = logit_gradient(W, b, X, Y, 0.01)
        h = 1e-6
        for i in range(3):
            for j in range(3):
                Wp, Wm = W.copy(), W.copy()
                Wp[i, j] += h
                Wm[i, j] -= h
                numeric = (
                    logit_loss(Wp, b, X, Y, 0.01) - logit_loss(Wm, b, X, Y, 0.01)
                ) / (2 * h)
                denom = max(abs(numeric), 1e-8)
                assert abs(gW[i, j] - numeric) / denom <= 1e-5
        for j in range(3):
            bp, bm = b.copy(), b.copy()
            bp[j] += h
            bm[j] -= h
            numeric = (
                logit_loss(W, bp, X, Y, 0.01) - logit_loss(W, bm, X, Y, 0.01)
            ) / (2 * h)
            denom = max(abs(numeric), 1e-8)
            assert abs(gb[j] - numeric) / denom <= 1e-5

        # SVM dual constraints at convergence
        features = np.vstack(
            [rng.standard_normal((12, 2)) + c for c in [(-2, 0), (2, 0), (0, 3)]]
        )
        data = VectorDataset(features, np.repeat([0, 1, 2], 12))
        C = 2.0
        svm = fit(ClassifierSpec("svm", {"kernel": "rbf", "C": C}), data, seed=4)
        for binary in svm.binaries:
            alphas = np.abs(binary.dual_coefs)
            assert np.all(alphas >= 0.0) and np.all(alphas <= C + 1e-12)
            assert abs(float(np.sum(binary.dual_coefs))) <= 1e-6

        # tree training accuracy monotone in depth
        tree_data = VectorDataset(
            rng.standard_normal((60, 3)), rng.integers(0, 3, size=60)
        )
        scores = []
        for depth in range(1, 7):
            tree = fit(ClassifierSpec("tree", {"max_depth": depth}), tree_data, 0)
            scores.append(accuracy(tree.predict(tree_data.features), tree_data.labels))
        assert all(a <= b + 1e-12 for a, b in zip(scores, scores[1:]))

        # 1-NN self-consistency
        knn_data = VectorDataset(
            rng.standard_normal((25, 4)), rng.integers(0, 4, size=25)
        )
        knn = fit(ClassifierSpec("knn", {"k": 1}), knn_data, 0)
        assert np.array_equal(knn.predict(knn_data.features), knn_data.labels)

        assert time.perf_counter() - start < 20.0


def test_criterion_9_io_round_trips_and_diagnostics(tmp_path):
    """TELD lossless, PPM byte-exact, malformed files classified."""
    with criterion(9, "dataset I/O round-trips and error classes"):
        rng = np.random.default_rng(2030)

        # TELD round-trip on 50 random datasets
        for i in range(50):
            order = int(rng.integers(1, 5))
            shape = tuple(int(d) for d in rng.integers(1, 6, size=order))
            n = int(rng.integers(1, 7))
            samples = [random_tensor(rng, shape) for _ in range(n)]
            data = tk.LabeledTensorDataset(samples, rng.integers(0, 5, size=n))
            path = tmp_path / f"rt{i}.teld"
            save_tensor_dataset(data, path)
            back = load_tensor_dataset(path)
            assert back.labels.tolist() == data.labels.tolist()
            assert all(a == b for a, b in zip(back.samples, data.samples))

        # PPM fixtures: byte-exact against the format definition
        red = decode_ppm(b"P6\n2 2\n255\n" + bytes([255, 0, 0] * 4))
        assert red.shape == (2, 2, 3)
        assert np.all(red.to_array()[:, :, 0] == 1.0)
        assert np.all(red.to_array()[:, :, 1:] == 0.0)
        gray = decode_ppm(b"P5\n1 1\n255\n" + bytes([128]))
        assert gray.shape == (1, 1, 1)
        assert gray[0, 0, 0] == 128 / 255

        # malformed fixtures hit their designated error classes
        with pytest.raises(ImageFormatError):
            decode_ppm(b"P3\n1 1\n255\n255 0 0\n")
        with pytest.raises(BadMagicError):
            load_tensor_dataset(_write(tmp_path, "m.teld", b"XXXX" + b"\x00" * 32))
        with pytest.raises(UnsupportedVersionError):
            load_tensor_dataset(
                _write(
                    tmp_path, "v.teld",
                    b"TELD" + struct.pack("<III", 2, 1, 1) + b"\x00" * 16,
                )
            )
        with pytest.raises(UnsupportedDtypeError):
            load_tensor_dataset(
                _write(
                    tmp_path, "d.teld",
                    b"TELD" + struct.pack("<IIIII", 1, 1, 1, 2, 9) + b"\x00" * 16,
                )
            )
        with pytest.raises(TruncatedFileError):
            load_tensor_dataset(
                _write(
                    tmp_path, "t.teld",
                    b"TELD" + struct.pack("<IIIII", 1, 1, 1, 2, 1) + b"\x00" * 4,
                )
            )
        with pytest.raises(ShapeError):
            load_tensor_dataset(
                _write(
                    tmp_path, "s.teld",
                    b"TELD"
                    + struct.pack("<III", 1, 1, 3)
                    + struct.pack("<III", 70000, 70000, 70000)
                    + b"\x00" * 8,
                )
            )


def _write(tmp_path, name, blob):
    path = tmp_path / name
    path.write_bytes(blob)
    return path
