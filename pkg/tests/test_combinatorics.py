"""Unit tests for the composition layer.

The ground truth here is a direct itertools enumeration of
Omega(k, n) = {x in Z_+^k : sum_i i x_i = n}, small enough to brute force for
k <= 4, n <= 12, plus the generating identity
sum_n kernel(k, n, w) u^n = exp(w (u + .. + u^k)) that ties the grouped sums
to the transforms used elsewhere.
"""

import itertools
import math

import numpy as np
import pytest

from fracppk import (
    CapExceeded,
    Composition,
    DomainError,
    OrderParams,
    enumerate_omega,
    log_omega_kernel,
    omega_kernel,
    zeta_profile,
)


def brute_force_omega(k, n):
    """All vectors (x_1, .., x_k) with sum_i i x_i = n, by exhaustion."""
    ranges = [range(n // part + 1) for part in range(1, k + 1)]
    return [
        x
        for x in itertools.product(*ranges)
        if sum((i + 1) * v for i, v in enumerate(x)) == n
    ]


class TestEnumerateOmega:
    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    @pytest.mark.parametrize("n", [0, 1, 2, 5, 9, 12])
    def test_matches_brute_force(self, k, n):
        got = {c.counts for c in enumerate_omega(k, n)}
        expected = set(brute_force_omega(k, n))
        assert got == expected

    def test_descending_lex_order(self):
        assert [c.counts for c in enumerate_omega(2, 2)] == [(2, 0), (0, 1)]
        for k, n in ((3, 7), (4, 10)):
            counts = [c.counts for c in enumerate_omega(k, n)]
            assert counts == sorted(counts, reverse=True)

    def test_every_element_hits_the_total(self):
        for c in enumerate_omega(4, 11):
            assert c.total == 11
            assert c.zeta == sum(c.counts)

    def test_composition_log_factorial_product(self):
        c = Composition((3, 0, 2))
        assert c.log_factorial_product() == pytest.approx(
            math.log(math.factorial(3) * math.factorial(2))
        )

    def test_caps(self):
        with pytest.raises(CapExceeded):
            enumerate_omega(3, 61)
        with pytest.raises(CapExceeded):
            enumerate_omega(60, 60)  # ~966k partitions, over the 500k guard
        with pytest.raises(DomainError):
            enumerate_omega(0, 3)
        with pytest.raises(DomainError):
            enumerate_omega(3, -1)


class TestZetaProfile:
    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    @pytest.mark.parametrize("n", [0, 1, 2, 5, 9, 12])
    def test_matches_brute_force_grouping(self, k, n):
        zetas, logc = zeta_profile(k, n)
        grouped = {}
        for x in brute_force_omega(k, n):
            zeta = sum(x)
            weight = 1.0 / math.prod(math.factorial(v) for v in x)
            grouped[zeta] = grouped.get(zeta, 0.0) + weight
        assert list(zetas) == sorted(grouped)
        for z, lc in zip(zetas, logc):
            assert math.exp(lc) == pytest.approx(grouped[z], rel=1e-12)

    def test_zeta_range(self):
        # zeta runs from ceil(n/k) (all batches maximal) to n (all singletons).
        zetas, _ = zeta_profile(3, 11)
        assert zetas[0] == math.ceil(11 / 3)
        assert zetas[-1] == 11

    def test_all_singletons_weight(self):
        # The zeta = n group is the single all-ones vector, weight 1/n!... times
        # the multiplicity structure: x_1 = n gives 1/n!.
        for n in (4, 7, 10):
            zetas, logc = zeta_profile(3, n)
            assert math.exp(logc[-1]) == pytest.approx(1.0 / math.factorial(n), rel=1e-12)

    def test_n_zero(self):
        zetas, logc = zeta_profile(5, 0)
        assert list(zetas) == [0]
        assert list(logc) == [0.0]

    def test_large_k_reduces_to_partition_structure(self):
        # For k >= n the parts are unconstrained: every partition of n counts.
        z_small, c_small = zeta_profile(12, 12)
        z_big, c_big = zeta_profile(40, 12)
        assert np.array_equal(z_small, z_big)
        np.testing.assert_allclose(c_small, c_big, rtol=1e-12)


class TestOmegaKernel:
    @pytest.mark.parametrize("k", [1, 2, 3, 5])
    def test_generating_identity(self, k):
        # sum_n kernel(k, n, w) u^n = exp(w sum_{j<=k} u^j), truncation tail
        # below 1e-12 for these (w, u).
        w, u = 0.4, 0.5
        lhs = sum(omega_kernel(k, n, w) * u**n for n in range(0, 55))
        rhs = math.exp(w * sum(u**j for j in range(1, k + 1)))
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_scalar_and_array_agree(self):
        w = np.array([0.0, 0.3, 1.7, 4.0])
        arr = omega_kernel(3, 5, w)
        assert arr.shape == w.shape
        for wi, vi in zip(w, arr):
            assert vi == pytest.approx(omega_kernel(3, 5, float(wi)), rel=1e-13)

    def test_log_kernel_at_zero_weight(self):
        assert log_omega_kernel(3, 4, 0.0) == -math.inf
        assert omega_kernel(3, 4, 0.0) == 0.0
        assert omega_kernel(3, 0, 0.0) == 1.0

    def test_poisson_reduction_at_k_one(self):
        # k = 1 collapses to kernel(1, n, w) = w^n / n!.
        for n in (0, 1, 3, 8):
            assert omega_kernel(1, n, 2.5) == pytest.approx(
                2.5**n / math.factorial(n), rel=1e-12
            )

    def test_rejects_negative_weight(self):
        with pytest.raises(DomainError):
            omega_kernel(3, 4, -0.1)
        with pytest.raises(DomainError):
            log_omega_kernel(3, 4, np.array([0.5, -2.0]))

    def test_no_overflow_at_large_weight(self):
        # Log-space evaluation keeps large w finite.
        val = log_omega_kernel(3, 60, 200.0)
        assert math.isfinite(val)


class TestOrderParams:
    def test_accepts_valid(self):
        p = OrderParams(k=3, lam=2.0)
        assert p.k == 3 and p.lam == 2.0

    def test_rejects_invalid(self):
        with pytest.raises(DomainError):
            OrderParams(k=0, lam=1.0)
        with pytest.raises(DomainError):
            OrderParams(k=2.5, lam=1.0)
        with pytest.raises(DomainError):
            OrderParams(k=2, lam=0.0)
        with pytest.raises(DomainError):
            OrderParams(k=2, lam=math.inf)
