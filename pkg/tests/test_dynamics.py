import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyplab.dynamics import (
    IllConditionedGramError,
    Region,
    RegionEmptyError,
    construct_hypercyclic_approx,
    eigen_residual_bound,
    kernel_gram,
    kernel_matrix,
    kernel_vector,
    sample_eigen_family,
    span_residual,
)
from hyplab.shiftop import apply, build_truncation, power
from hyplab.symbol import Symbol, evaluate

inside = st.builds(
    lambda r, t: r * cmath.exp(1j * t),
    st.floats(0, 0.9), st.floats(0, 2 * math.pi),
)


def unit_targets(seed, count, N, support=8):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = np.zeros(N, dtype=complex)
        v = rng.normal(size=support) + 1j * rng.normal(size=support)
        g[:support] = v / np.linalg.norm(v)
        out.append(g)
    return out


def dense_visit_errors(s, x, schedule, targets):
    A = build_truncation(s, len(x)).dense()
    return [float(np.linalg.norm(np.linalg.matrix_power(A, n) @ x - g)) for n, g in zip(schedule, targets)]


class TestKernelVector:
    def test_zero_is_e0(self):
        k = kernel_vector(0, 6)
        np.testing.assert_array_equal(k.entries, np.eye(6)[0])
        assert k.tail_norm == 0 and k.dim == 6

    def test_shift_eigen_relation(self):
        k = kernel_vector(0.5, 8)
        y = apply(build_truncation(Symbol.polynomial(0, 1), 8), k.entries)
        np.testing.assert_array_equal(y[:7], 0.5 * k.entries[:7])

    @given(inside, st.integers(2, 400))
    def test_shift_relation_any_lambda(self, lam, N):
        v = kernel_vector(lam, N).entries
        y = apply(build_truncation(Symbol.polynomial(0, 1), N), v)
        # one rounding of lam * v[n-1]; numpy's complex kernels may round it differently by an ulp
        np.testing.assert_allclose(y[: N - 1], lam * v[: N - 1], rtol=4e-16, atol=0)
        if lam.imag == 0:
            np.testing.assert_array_equal(y[: N - 1], lam * v[: N - 1])
        # entries stay close to the true powers
        np.testing.assert_allclose(v, [lam**n for n in range(N)], rtol=1e-12, atol=1e-300)

    def test_boundary_rejected(self):
        with pytest.raises(ValueError):
            kernel_vector(1 - 1e-7, 4)
        with pytest.raises(ValueError):
            kernel_vector(0.5, 0)

    @given(st.floats(0, 0.99), st.floats(0, 2 * math.pi), st.integers(1, 64))
    def test_tail_norm_direct_summation(self, r, t, N):
        k = kernel_vector(r * cmath.exp(1j * t), N)
        r = abs(k.lam)
        # |lam|^(2n) for n >= N, summed until the terms vanish below 1e-34
        terms = [r ** (2 * n) for n in range(N, N + 8000)]
        assert abs(k.tail_norm - math.sqrt(math.fsum(terms))) <= 1e-14

    @given(inside, st.integers(1, 200))
    def test_norm_closed_form(self, lam, N):
        k = kernel_vector(lam, N)
        r2 = abs(lam) ** 2
        assert abs(np.linalg.norm(k.entries) ** 2 - (1 - r2**N) / (1 - r2)) <= 1e-12 * (1 / (1 - r2))

    def test_one_plus_z_residual_dense(self):
        s = Symbol.polynomial(1, 1)
        N, lam = 256, 0.5
        v = kernel_vector(lam, N).entries
        A = build_truncation(s, N).dense()
        res = A @ v - evaluate(s, lam) * v
        # only the last entry misses a_1 lam^N; the rest is rounding
        assert abs(res[-1] + 0.5**N) <= 1e-14 * 0.5**N
        assert abs(res[-1]) <= eigen_residual_bound(s, lam, N) * (1 + 1e-12)
        assert np.max(np.abs(res[:-1])) <= 1e-15


class TestEigenProperties:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 6), inside, st.integers(16, 200), st.integers(0, 2**32 - 1))
    def test_residual_confined_to_last_d(self, d, lam, N, seed):
        rng = np.random.default_rng(seed)
        s = Symbol.polynomial(*(rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)))
        v = kernel_vector(lam, N).entries
        res = apply(build_truncation(s, N), v) - evaluate(s, lam) * v
        assert np.max(np.abs(res[: N - s.degree]), initial=0.0) <= 1e-14 * max(1.0, np.sum(np.abs(s.coeffs)))
        assert np.linalg.norm(res) <= eigen_residual_bound(s, lam, N) * (1 + 1e-9) + 1e-14

    @settings(max_examples=40, deadline=None)
    @given(st.lists(inside, min_size=1, max_size=6), st.integers(1, 512))
    def test_gram_matches_inner_products(self, lams, N):
        G = kernel_gram(lams, N)
        V = kernel_matrix(lams, N)
        for j in range(len(lams)):
            for k in range(len(lams)):
                direct = np.vdot(V[:, k], V[:, j])  # sum (lam_j conj lam_k)^n
                assert abs(G[j, k] - direct) <= 1e-12 * max(1.0, abs(direct))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), inside, st.integers(1, 12), st.integers(0, 2**32 - 1))
    def test_power_scaling_law(self, d, lam, n, seed):
        rng = np.random.default_rng(seed)
        N = 2 * d * n + 8
        s = Symbol.polynomial(*(rng.normal(size=d + 1)))
        s = Symbol.polynomial(*(np.array(s.coeffs) / sum(abs(a) for a in s.coeffs)))
        v = kernel_vector(lam, N).entries
        got = power(build_truncation(s, N), v, n, fast=False)
        phi = evaluate(s, lam)
        want = phi**n * v
        keep = N - s.degree * n
        # rounding scales with (sum |a_k lam^k|)^n, not |phi(lam)|^n
        kappa = (sum(abs(a) * abs(lam) ** k for k, a in enumerate(s.coeffs)) / abs(phi)) ** n
        err = np.linalg.norm(got[:keep] - want[:keep])
        assert err <= 1e-10 * max(1.0, kappa) * np.linalg.norm(want[:keep])


class TestSampling:
    def test_rolewicz_sublevel(self):
        fam = sample_eigen_family(Symbol.polynomial(0, 2), Region.SUBLEVEL, 40)
        # |2 lam| <= 1 - margin, the boundary itself included
        assert np.all(np.abs(fam.lams) <= (0.5 - fam.margin / 2) * (1 + 1e-15))

    def test_rolewicz_superlevel(self):
        fam = sample_eigen_family(Symbol.polynomial(0, 2), "superlevel", 40)
        assert np.all(np.abs(fam.lams) >= (0.5 + fam.margin / 2) * (1 - 1e-15))
        assert np.all(np.abs(fam.lams) <= 1 - fam.interior_margin)

    def test_contraction_superlevel_empty(self):
        with pytest.raises(RegionEmptyError):
            sample_eigen_family(Symbol.polynomial(0, 0.5), Region.SUPERLEVEL, 5, max_candidates=5000)

    @pytest.mark.parametrize("region", list(Region))
    def test_invariants(self, region):
        s = Symbol.polynomial(1, 1)
        fam = sample_eigen_family(s, region, 64, margin=1e-2, max_radius=0.8)
        mod = np.abs(evaluate(s, fam.lams))
        np.testing.assert_array_equal(fam.values, evaluate(s, fam.lams))
        if region is Region.SUBLEVEL:
            assert np.all(mod <= 1 - 1e-2)
        else:
            assert np.all(mod >= 1 + 1e-2)
        assert fam.interior_margin > 0 and np.all(np.abs(fam.lams) <= 1 - fam.interior_margin + 1e-15)
        gaps = np.abs(fam.lams[:, None] - fam.lams[None, :]) + np.eye(len(fam))
        assert gaps.min() >= 1e-6

    def test_nested_and_deterministic(self):
        s = Symbol.polynomial(1, 1)
        small = sample_eigen_family(s, Region.SUBLEVEL, 10)
        big = sample_eigen_family(s, Region.SUBLEVEL, 50)
        np.testing.assert_array_equal(small.lams, big.lams[:10])
        np.testing.assert_array_equal(big.head(10).lams, small.lams)

    def test_csv_rows(self):
        fam = sample_eigen_family(Symbol.polynomial(0, 2), Region.SUBLEVEL, 3)
        rows = fam.csv_rows()
        assert len(rows) == 3 and all(len(r) == 4 for r in rows)
        assert complex(float(rows[0][0]), float(rows[0][1])) == fam.lams[0]

    def test_bad_count(self):
        with pytest.raises(ValueError):
            sample_eigen_family(Symbol.polynomial(0, 2), Region.SUBLEVEL, 0)


class TestSpanResidual:
    def test_member_kernel_fits_exactly(self):
        fam = sample_eigen_family(Symbol.polynomial(0, 2), Region.SUBLEVEL, 4)
        N = 64
        g = kernel_vector(fam.lams[2], N).entries
        fit = span_residual([g], fam, N)
        assert fit.residuals[0] <= 1e-10
        np.testing.assert_allclose(fit.coeffs[:, 0], np.eye(4)[2], atol=1e-8)

    def test_matches_dense_lstsq(self):
        fam = sample_eigen_family(Symbol.polynomial(0, 2), Region.SUPERLEVEL, 6)
        N = 40
        g = unit_targets(1, 2, N)
        fit = span_residual(g, fam, N)
        V = kernel_matrix(fam.lams, N)
        for t in range(2):
            c = np.linalg.lstsq(V, g[t], rcond=None)[0]
            assert abs(fit.residuals[t] - np.linalg.norm(V @ c - g[t])) <= 1e-8

    def test_ridge_matches_augmented_oracle(self):
        fam = sample_eigen_family(Symbol.polynomial(1, 1), Region.SUBLEVEL, 8)
        N, ridge = 32, 1e-3
        g = unit_targets(2, 1, N)[0]
        V = kernel_matrix(fam.lams, N)
        aug = np.vstack([V, math.sqrt(ridge) * np.eye(8)])
        c = np.linalg.lstsq(aug, np.concatenate([g, np.zeros(8)]), rcond=None)[0]
        fit = span_residual([g], fam, N, ridge=ridge)
        np.testing.assert_allclose(fit.coeffs[:, 0], c, atol=1e-9)

    def test_nonincreasing_under_growth(self):
        fam = sample_eigen_family(Symbol.polynomial(1, 1), Region.SUBLEVEL, 50)
        N = 128
        g = unit_targets(3, 1, N)[0]
        res = [span_residual([g], fam.head(n), N, ridge=1e-14).residuals[0] for n in (5, 10, 20, 30, 50)]
        assert all(b <= a * (1 + 1e-9) for a, b in zip(res, res[1:]))

    def test_ill_conditioned_reported_then_ridge(self):
        fam = sample_eigen_family(Symbol.polynomial(1, 1), Region.SUBLEVEL, 50)
        e0 = np.eye(128)[0]
        with pytest.raises(IllConditionedGramError) as info:
            span_residual([e0], fam, 128)
        assert info.value.cond > 1e15
        assert span_residual([e0], fam, 128, ridge=1e-14).residuals[0] < 1e-6

    def test_errors(self):
        fam = sample_eigen_family(Symbol.polynomial(0, 2), Region.SUBLEVEL, 3)
        with pytest.raises(ValueError):
            span_residual([np.zeros(5)], fam, 6)
        with pytest.raises(ValueError):
            span_residual([np.zeros(6)], fam, 6, ridge=-1)
        with pytest.raises(ValueError):
            span_residual([np.zeros(6)], fam.head(0), 6)


class TestConstructor:
    def test_single_eigenvector_target(self):
        s = Symbol.polynomial(1, 1)
        sup = sample_eigen_family(s, Region.SUPERLEVEL, 32, max_radius=0.75)
        N, n = 256, 20
        g = kernel_vector(sup.lams[0], N).entries
        # phi(mu)^-n v_mu misses g only through the truncation tail
        x = sup.values[0] ** -n * g
        assert dense_visit_errors(s, x, [n], [g])[0] <= 1e-12
        res = construct_hypercyclic_approx(s, [g], [n], N=N, superlevel=sup)
        assert res.success and res.errors[0] <= 1e-5
        # without damping the fit recovers that vector
        exact = construct_hypercyclic_approx(s, [g], [n], N=N, superlevel=sup, ridge=0.0)
        assert exact.errors[0] <= 1e-12
        assert np.linalg.norm(exact.x - x) <= 1e-5 * np.linalg.norm(x)

    def test_rolewicz_coordinates_both_schedules(self):
        s = Symbol.polynomial(0, 2)
        targets = unit_targets(0, 3, 512)
        for sched in ((40, 80, 120), (80, 160, 240)):
            res = construct_hypercyclic_approx(s, targets, sched, eps=1e-2, N=512, basis="coordinates")
            assert res.success
            errs = dense_visit_errors(s, res.x, sched, targets)
            assert max(errs) <= 1e-2
            np.testing.assert_allclose(errs, res.errors, atol=1e-12)

    def test_update_norm_decreases_with_power(self):
        s = Symbol.polynomial(0, 2)
        sup = sample_eigen_family(s, Region.SUPERLEVEL, 16, max_radius=0.75)
        g = kernel_vector(sup.lams[0], 256).entries
        norms = [construct_hypercyclic_approx(s, [g], [n], N=256, superlevel=sup).steps[0].update_norm
                 for n in (5, 10, 20, 40)]
        assert all(b < a for a, b in zip(norms, norms[1:]))

    def test_diagnostics_and_failure_flag(self):
        # one-step horizon, eps below what the family can reach
        s = Symbol.polynomial(1, 1)
        res = construct_hypercyclic_approx(s, unit_targets(4, 2, 128), [10, 20], eps=1e-12, N=128)
        assert not res.success
        k = res.failed_step
        assert res.errors[k] > 1e-12
        kv = dict(line.split("=", 1) for line in res.to_kv().splitlines())
        assert kv["success"] == "false" and int(kv["failed_step"]) == k
        assert len(res.steps) == 2 and all(st.update_norm >= 0 for st in res.steps)

    def test_best_effort_never_worse_than_zero(self):
        s = Symbol.polynomial(1, 1)
        targets = unit_targets(5, 3, 256)
        res = construct_hypercyclic_approx(s, targets, (40, 80, 120), N=256)
        assert max(res.errors) <= 1 + 1e-12

    @pytest.mark.parametrize("kwargs", [
        dict(targets=[np.zeros(16)], schedule=[1, 2]),
        dict(targets=[np.zeros(16)] * 2, schedule=[2, 2]),
        dict(targets=[np.zeros(15)], schedule=[1]),
        dict(targets=[np.zeros(16)], schedule=[1], basis="wavelets"),
    ])
    def test_errors(self, kwargs):
        with pytest.raises(ValueError):
            construct_hypercyclic_approx(Symbol.polynomial(0, 2), N=16, **kwargs)

    def test_missing_region_reported(self):
        with pytest.raises(RegionEmptyError):
            construct_hypercyclic_approx(Symbol.polynomial(0, 0.5), [np.eye(16)[0]], [1], N=16)
