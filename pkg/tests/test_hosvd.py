"""HOSVD: factorization contracts, truncation bounds, rank search."""

import itertools

import numpy as np
import pytest

from telkit.hosvd import clamp_rank, hosvd, rank_search, reconstruct, relative_error
from telkit.tensor import DenseTensor, frobenius_norm, outer_product, unfold


def random_tensor(rng, shape) -> DenseTensor:
    return DenseTensor(shape, rng.standard_normal(int(np.prod(shape))))


def outer_sum_reconstruction(factors) -> np.ndarray:
    """Oracle: sum core-weighted outer products over all index tuples."""
    core = factors.core.to_array()
    out = np.zeros(factors.shape)
    for idx in itertools.product(*map(range, core.shape)):
        rank1 = outer_product(
            [factors.factors[n][:, idx[n]] for n in range(len(idx))]
        )
        out += core[idx] * rank1.to_array()
    return out


def unfolding_spectra(x: DenseTensor) -> list[np.ndarray]:
    return [
        np.linalg.svd(unfold(x, n), compute_uv=False) for n in range(x.order)
    ]


class TestHosvd:
    def test_rank_one_basis_tensor(self):
        e1 = np.array([1.0, 0.0])
        x = outer_product([e1, e1, e1])
        f = hosvd(x, (1, 1, 1))
        assert abs(abs(f.core[0, 0, 0]) - 1.0) <= 1e-12
        for factor in f.factors:
            assert np.allclose(np.abs(factor[:, 0]), e1, atol=1e-12)
        err = np.linalg.norm(reconstruct(f).data - x.data)
        assert err <= 1e-12

    def test_full_rank_is_lossless(self):
        rng = np.random.default_rng(97)
        x = random_tensor(rng, (4, 5, 3))
        f = hosvd(x, (4, 5, 3))
        err = np.linalg.norm(reconstruct(f).data - x.data)
        assert err <= 1e-9 * frobenius_norm(x)

    def test_truncation_error_bounded_by_discarded_spectra(self):
        rng = np.random.default_rng(101)
        x = random_tensor(rng, (6, 7, 8))
        rank = (3, 3, 3)
        f = hosvd(x, rank)
        err_sq = np.linalg.norm(reconstruct(f).data - x.data) ** 2
        bound = sum(
            float(np.sum(s[r:] ** 2))
            for s, r in zip(unfolding_spectra(x), rank)
        )
        assert err_sq <= bound * (1 + 1e-8)

    def test_factor_orthonormality(self):
        rng = np.random.default_rng(103)
        for _ in range(5):
            x = random_tensor(rng, (5, 4, 6))
            f = hosvd(x, (3, 2, 4))
            for factor in f.factors:
                gram = factor.T @ factor
                assert np.linalg.norm(gram - np.eye(factor.shape[1])) <= 1e-10

    def test_rank_clamping_reported(self):
        rng = np.random.default_rng(107)
        x = random_tensor(rng, (2, 3, 4))
        f = hosvd(x, (9, 9, 9))
        assert f.effective_rank == (2, 3, 4)
        assert f.core.shape == (2, 3, 4)

    def test_clamp_uses_product_of_other_dims(self):
        # a 5x2x2 tensor's mode-0 unfolding has only 4 columns
        assert clamp_rank((5, 2, 2), (5, 2, 2)) == (4, 2, 2)

    def test_rank_length_mismatch(self):
        x = DenseTensor((2, 2), range(4))
        with pytest.raises(ValueError, match="length"):
            hosvd(x, (2, 2, 2))

    def test_non_finite_rejected(self):
        x = DenseTensor((2, 2), [1.0, np.inf, 0.0, 0.0])
        with pytest.raises(ValueError, match="non-finite"):
            hosvd(x, (2, 2))

    def test_projection_idempotence(self):
        rng = np.random.default_rng(109)
        x = random_tensor(rng, (5, 6, 4))
        rank = (2, 3, 2)
        projected = reconstruct(hosvd(x, rank))
        again = reconstruct(hosvd(projected, rank))
        assert relative_error(projected, again) <= 1e-9

    def test_arbitrary_orders(self):
        rng = np.random.default_rng(125)
        for shape, rank in [((6,), (2,)), ((5, 7), (3, 3)), ((3, 4, 2, 5), (2, 2, 2, 2))]:
            x = random_tensor(rng, shape)
            f = hosvd(x, rank)
            assert f.core.shape == f.effective_rank
            full = hosvd(x, shape)
            err = np.linalg.norm(reconstruct(full).data - x.data)
            assert err <= 1e-9 * frobenius_norm(x)

    def test_error_monotone_in_each_rank(self):
        rng = np.random.default_rng(113)
        x = random_tensor(rng, (5, 5, 5))
        base = (2, 2, 2)
        base_err = relative_error(x, reconstruct(hosvd(x, base)))
        for n in range(3):
            grown = base[:n] + (base[n] + 1,) + base[n + 1 :]
            grown_err = relative_error(x, reconstruct(hosvd(x, grown)))
            assert grown_err <= base_err + 1e-10


class TestReconstruct:
    def test_identity_factors_reproduce_core(self):
        rng = np.random.default_rng(127)
        x = random_tensor(rng, (3, 4, 2))
        f = hosvd(x, (3, 4, 2))
        from telkit.hosvd import HosvdFactors

        identity = HosvdFactors(
            core=x,
            factors=[np.eye(s) for s in x.shape],
            effective_rank=x.shape,
        )
        assert reconstruct(identity) == x

    def test_matches_outer_product_sum(self):
        rng = np.random.default_rng(131)
        x = random_tensor(rng, (3, 3, 3))
        f = hosvd(x, (2, 2, 2))
        via_products = reconstruct(f).to_array()
        via_sum = outer_sum_reconstruction(f)
        assert np.linalg.norm(via_products - via_sum) <= 1e-10

    def test_shape_inconsistency_rejected(self):
        rng = np.random.default_rng(137)
        x = random_tensor(rng, (3, 3))
        f = hosvd(x, (2, 2))
        from telkit.hosvd import HosvdFactors

        broken = HosvdFactors(
            core=f.core, factors=[f.factors[0][:, :1], f.factors[1]],
            effective_rank=f.effective_rank,
        )
        with pytest.raises(ValueError, match="columns"):
            reconstruct(broken)


class TestRankSearch:
    def test_rank_one_samples(self):
        rng = np.random.default_rng(139)
        samples = []
        for _ in range(4):
            vectors = [rng.standard_normal(d) for d in (4, 3, 5)]
            samples.append(outer_product(vectors))
        assert rank_search(samples, 0.01) == (1, 1, 1)

    def test_zero_threshold_returns_full_rank(self):
        rng = np.random.default_rng(149)
        samples = [random_tensor(rng, (3, 4, 2)) for _ in range(3)]
        assert rank_search(samples, 0.0) == clamp_rank((3, 4, 2), (3, 4, 2))

    def test_against_exhaustive_enumeration(self):
        rng = np.random.default_rng(151)
        x = random_tensor(rng, (4, 4, 4))
        target = relative_error(x, reconstruct(hosvd(x, (2, 2, 2))))
        threshold = target + 1e-6

        result = rank_search([x], threshold)
        result_err = relative_error(x, reconstruct(hosvd(x, result)))
        assert result_err <= threshold
        # greedy-minimal: no single decrement stays within budget
        for n in range(3):
            if result[n] > 1:
                smaller = result[:n] + (result[n] - 1,) + result[n + 1 :]
                err = relative_error(x, reconstruct(hosvd(x, smaller)))
                assert err > threshold
        # the exhaustive feasible set contains the greedy answer
        feasible = set()
        for tup in itertools.product(range(1, 5), repeat=3):
            err = relative_error(x, reconstruct(hosvd(x, tup)))
            if err <= threshold:
                feasible.add(clamp_rank(tup, (4, 4, 4)))
        assert result in feasible

    def test_empty_sample_list_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            rank_search([], 0.1)

    def test_shape_mismatch_rejected(self):
        rng = np.random.default_rng(157)
        samples = [random_tensor(rng, (2, 2)), random_tensor(rng, (3, 2))]
        with pytest.raises(ValueError, match="disagree"):
            rank_search(samples, 0.1)

    def test_threshold_domain(self):
        rng = np.random.default_rng(163)
        samples = [random_tensor(rng, (2, 2))]
        with pytest.raises(ValueError, match="max_relative_error"):
            rank_search(samples, 1.0)
