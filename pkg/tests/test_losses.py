import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import central_difference, relative_error
from dcs.losses import (
    BatchRisk,
    LossSettings,
    batch_risk,
    cs_loss,
    dcs_loss,
    dcs_loss_approx,
    mse_loss,
    n2v_loss,
    prepare_sample,
)
from dcs.masking import MaskSpec, MaskVec, MaskedPair, tau_amn_mask
from dcs.numerics import RngStream
from dcs.weights import estimate_k_mc


def make_pair(rng, dim=12, rho=0.4):
    x = rng.generator.uniform(0.2, 1.5, dim)
    return tau_amn_mask(rng.child(0), x, rho, 2)


class TestCsLoss:
    def test_self_similarity(self):
        v = np.array([1.0, 2.0, 3.0])
        assert cs_loss(v, v).value == pytest.approx(-1.0, abs=1e-15)

    def test_orthogonal(self):
        assert cs_loss(np.array([1.0, 0.0]), np.array([0.0, 1.0])).value == 0.0

    def test_antipodal(self):
        assert cs_loss(np.array([1.0, 1.0]), np.array([-1.0, -1.0])).value == pytest.approx(1.0)

    def test_guard_branch(self):
        u = np.array([1e-9, 0.0])
        v = np.array([1e-9, 0.0])
        lv = cs_loss(u, v, eta=1e-8)
        assert lv.value == pytest.approx(-1e-18 / 1e-8)
        np.testing.assert_allclose(lv.grad, -u / 1e-8)

    def test_scale_invariance_power_of_two_exact(self):
        gen = RngStream(0, 50).generator
        u = gen.uniform(-1, 1, 8)
        v = gen.uniform(-1, 1, 8)
        base = cs_loss(u, v).value
        for alpha in (0.5, 2.0, 1024.0):
            assert cs_loss(u, alpha * v).value == base

    def test_scale_invariance_general(self):
        gen = RngStream(0, 51).generator
        u = gen.uniform(-1, 1, 8)
        v = gen.uniform(-1, 1, 8)
        base = cs_loss(u, v).value
        for alpha in (0.3, 7.7, 123.456):
            assert cs_loss(u, alpha * v).value == pytest.approx(base, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_value_in_unit_interval(self, seed):
        gen = RngStream(seed, 52).generator
        u = gen.uniform(-2, 2, 6) + 0.1
        v = gen.uniform(-2, 2, 6) + 0.1
        lv = cs_loss(u, v)
        assert -1.0 - 1e-12 <= lv.value <= 1.0 + 1e-12


class TestMseLoss:
    def test_zero_at_match(self):
        x = np.array([1.0, 2.0])
        assert mse_loss(x, x).value == 0.0

    def test_value_and_gradient(self):
        lv = mse_loss(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        assert lv.value == 2.0
        np.testing.assert_array_equal(lv.grad, np.array([-2.0, 2.0]))


class TestN2vLoss:
    def test_zero_on_support_match(self, rng):
        pair = make_pair(rng)
        s_hat = pair.x.copy()
        assert n2v_loss(pair, s_hat).value == 0.0

    def test_squared_error_on_support_only(self):
        mask = MaskVec(bits=np.array([1, 0], dtype=np.uint8), rho=0.5)
        pair = MaskedPair(
            x=np.array([2.0, 9.0]), x_tilde=np.array([4.0, 9.0]), mask=mask
        )
        lv = n2v_loss(pair, np.array([5.0, 9.0]))
        assert lv.value == 9.0

    def test_gradient_zero_off_support(self, rng):
        pair = make_pair(rng)
        lv = n2v_loss(pair, rng.generator.uniform(0, 1, pair.dim))
        assert np.all(lv.grad[pair.mask.bits == 0] == 0.0)


class TestDcsLoss:
    def test_unit_weight_reduces_to_cs_on_masked_subvectors(self, rng):
        pair = make_pair(rng)
        s_hat = rng.generator.uniform(0.1, 1.0, pair.dim)
        b = pair.mask.bits.astype(np.float64)
        lv = dcs_loss(pair, s_hat, k_hat=1.0)
        ref = cs_loss(b * pair.x, b * s_hat)
        assert lv.value == ref.value

    def test_self_match_value(self, rng):
        pair = make_pair(rng)
        assert dcs_loss(pair, pair.x, k_hat=1.0).value == pytest.approx(-1.0, abs=1e-12)

    def test_linear_in_inverse_weight(self, rng):
        pair = make_pair(rng)
        s_hat = rng.generator.uniform(0.1, 1.0, pair.dim)
        full = dcs_loss(pair, s_hat, k_hat=1.0)
        half = dcs_loss(pair, s_hat, k_hat=0.5)
        assert half.value == pytest.approx(2.0 * full.value, rel=1e-15)
        np.testing.assert_allclose(half.grad, 2.0 * full.grad, rtol=1e-15)

    def test_cosine_scale_invariance_on_support(self, rng):
        pair = make_pair(rng)
        for factor in (0.5, 2.0, 8.0):
            lv = dcs_loss(pair, factor * pair.x, k_hat=0.8)
            assert lv.value == pytest.approx(-1.0 / 0.8, abs=1e-12)

    def test_gradient_zero_off_support(self, rng):
        pair = make_pair(rng)
        lv = dcs_loss(pair, rng.generator.uniform(0.1, 1.0, pair.dim), k_hat=0.7)
        assert np.all(lv.grad[pair.mask.bits == 0] == 0.0)


class TestDcsLossApprox:
    def test_weight_formula_endpoints(self):
        # sqrt(c^2+1)/(c+eta): sqrt(2) at c=1 with vanishing eta, 1 as c grows
        assert math.sqrt(1.0 + 1.0) / (1.0 + 0.0) == pytest.approx(math.sqrt(2.0))
        c = 1e6
        assert math.sqrt(c * c + 1.0) / (c + 1e-8) == pytest.approx(1.0, abs=1e-11)

    def test_weight_limits(self, rng):
        # c_hat = 1 gives weight sqrt(2); huge c_hat gives weight 1
        pair = make_pair(rng)
        s_hat = rng.generator.uniform(0.1, 1.0, pair.dim)
        lv = dcs_loss_approx(pair, s_hat, eta=1e-12)
        from dcs.weights import estimate_c_from_pair

        c_hat = estimate_c_from_pair(pair)
        expected_weight = math.sqrt(c_hat**2 + 1.0) / (c_hat + 1e-12)
        b = pair.mask.bits.astype(np.float64)
        base = cs_loss(b * pair.x, b * s_hat, 1e-12).value
        assert lv.value == pytest.approx(expected_weight * base, rel=1e-12)

    def test_degenerate_pair_rejected(self):
        mask = MaskVec(bits=np.array([1, 1], dtype=np.uint8), rho=0.5)
        pair = MaskedPair(
            x=np.array([1.0, 2.0]), x_tilde=np.array([1.0, 2.0]), mask=mask
        )
        with pytest.raises(ValueError):
            dcs_loss_approx(pair, np.array([1.0, 2.0]))

    def test_agrees_with_mc_weight_at_large_dim(self):
        # closed-form weight vs a high-precision MC weight at D=4096, c~1
        dim, sigma = 4096, 1.0
        rng = RngStream(0, 53)
        s = sigma * np.ones(dim)
        x = s + sigma * rng.generator.standard_normal(dim)
        x_tilde = s + sigma * rng.generator.standard_normal(dim)
        mask = MaskVec(bits=np.ones(dim, dtype=np.uint8), rho=0.5)
        pair = MaskedPair(x=x, x_tilde=x_tilde, mask=mask)
        s_hat = s + 0.3 * rng.generator.standard_normal(dim)

        from dcs.weights import estimate_c_from_pair, floor_k

        c_hat = estimate_c_from_pair(pair)
        mc = estimate_k_mc(RngStream(0, 54), c_hat, dim, 10**5)
        lv_mc = dcs_loss(pair, s_hat, floor_k(mc.k_hat))
        lv_approx = dcs_loss_approx(pair, s_hat)
        assert lv_approx.value == pytest.approx(lv_mc.value, rel=0.01)


class TestGradientsAgainstFiniteDifferences:
    # step 1e-5, relative tolerance 1e-4, inputs kept away from the guard
    N_INPUTS = 100

    def _check(self, fn_value, analytic_grad, s_hat):
        fd = central_difference(fn_value, s_hat)
        assert relative_error(analytic_grad, fd) < 1e-4

    def test_cs(self):
        rng = RngStream(0, 55)
        for _ in range(self.N_INPUTS):
            u = rng.generator.uniform(0.2, 1.5, 6)
            v = rng.generator.uniform(0.2, 1.5, 6)
            lv = cs_loss(u, v)
            self._check(lambda w: cs_loss(u, w).value, lv.grad, v)

    def test_mse(self):
        rng = RngStream(0, 56)
        for _ in range(self.N_INPUTS):
            x = rng.generator.uniform(-1, 1, 6)
            s_hat = rng.generator.uniform(-1, 1, 6)
            lv = mse_loss(x, s_hat)
            self._check(lambda w: mse_loss(x, w).value, lv.grad, s_hat)

    def test_n2v(self):
        rng = RngStream(0, 57)
        for _ in range(self.N_INPUTS):
            pair = make_pair(rng.child(2))
            s_hat = rng.generator.uniform(0.1, 1.0, pair.dim)
            lv = n2v_loss(pair, s_hat)
            self._check(lambda w: n2v_loss(pair, w).value, lv.grad, s_hat)

    def test_dcs(self):
        rng = RngStream(0, 58)
        for i in range(self.N_INPUTS):
            pair = make_pair(rng.child(i))
            s_hat = rng.generator.uniform(0.1, 1.0, pair.dim)
            lv = dcs_loss(pair, s_hat, k_hat=0.6)
            self._check(lambda w: dcs_loss(pair, w, k_hat=0.6).value, lv.grad, s_hat)

    def test_dcs_approx(self):
        rng = RngStream(0, 59)
        for i in range(self.N_INPUTS):
            pair = make_pair(rng.child(i))
            s_hat = rng.generator.uniform(0.1, 1.0, pair.dim)
            lv = dcs_loss_approx(pair, s_hat)
            self._check(lambda w: dcs_loss_approx(pair, w).value, lv.grad, s_hat)


class TestMaskedMseIdentities:
    def test_rho_factor_exact(self):
        # analytic Bernoulli expectation: sum_d rho*diff^2 == rho*||diff||^2
        gen = RngStream(0, 60).generator
        rho = 0.1
        for _ in range(100):
            diff = gen.uniform(-3, 3, 32)
            lhs = float(np.sum(rho * diff * diff))
            rhs = rho * float(np.dot(diff, diff))
            assert abs(lhs - rhs) < 1e-12

    def test_noisy_clean_offset_is_reconstruction_independent(self):
        gen = RngStream(0, 61).generator
        dim, sigma, n = 16, 1.0, 50_000
        s = gen.uniform(0, 1, dim)
        bits = (gen.random(dim) < 0.5).astype(np.float64)
        eps = sigma * gen.standard_normal((n, dim))
        bn = np.einsum("ij,ij->i", eps * bits, eps * bits)
        a1 = bits * (gen.uniform(-1, 2, dim) - s)
        a2 = bits * (gen.uniform(-1, 2, dim) - s)
        o1 = bn - 2.0 * (eps * bits) @ a1
        o2 = bn - 2.0 * (eps * bits) @ a2
        d = o1 - o2
        assert abs(d.mean()) <= 3.0 * d.std(ddof=1) / math.sqrt(n)


class TestBatchRisk:
    SETTINGS = LossSettings(mask=MaskSpec(kind="tau-amn", rho=0.4, delta=2))

    @staticmethod
    def _forward(v):
        return 0.8 * v + 0.05

    def test_single_sample_matches_per_sample_loss(self, rng):
        x = rng.generator.uniform(0.2, 1.0, 10)
        stream = RngStream(77, 1)
        risk = batch_risk("dcs", [x], self._forward, rng, self.SETTINGS, streams=[stream])
        prep = prepare_sample("dcs", x, RngStream(77, 1), self.SETTINGS)
        expected = prep.evaluate(self._forward(prep.net_input))
        assert risk.mean_value == expected.value
        assert risk.batch_size == 1

    def test_duplicated_samples_with_duplicated_draws(self, rng):
        xs = [rng.generator.uniform(0.2, 1.0, 10) for _ in range(3)]
        streams = [RngStream(5, i) for i in range(3)]
        base = batch_risk("dcs", xs, self._forward, rng, self.SETTINGS, streams=streams)
        dup_streams = [RngStream(5, i) for i in (0, 0, 1, 1, 2, 2)]
        dup = batch_risk(
            "dcs", [xs[0], xs[0], xs[1], xs[1], xs[2], xs[2]],
            self._forward, rng, self.SETTINGS, streams=dup_streams,
        )
        assert dup.mean_value == base.mean_value

    def test_permutation_invariance_of_mean(self, rng):
        xs = [rng.generator.uniform(0.2, 1.0, 10) for _ in range(5)]
        streams = [RngStream(9, i) for i in range(5)]
        base = batch_risk("n2v", xs, self._forward, rng, self.SETTINGS, streams=streams)
        order = [3, 1, 4, 0, 2]
        perm = batch_risk(
            "n2v", [xs[i] for i in order], self._forward, rng, self.SETTINGS,
            streams=[RngStream(9, i) for i in order],
        )
        assert perm.mean_value == base.mean_value

    def test_deterministic_across_runs(self, rng):
        xs = [rng.generator.uniform(0.2, 1.0, 12) for _ in range(8)]
        r1 = batch_risk("dcs", xs, self._forward, RngStream(3, 0), self.SETTINGS)
        r2 = batch_risk("dcs", xs, self._forward, RngStream(3, 0), self.SETTINGS)
        assert r1.mean_value == r2.mean_value
        assert [a.value for a in r1.per_sample] == [a.value for a in r2.per_sample]

    def test_empty_batch_rejected(self, rng):
        with pytest.raises(ValueError):
            batch_risk("mse", [], self._forward, rng, self.SETTINGS)

    def test_unknown_kind_rejected(self, rng):
        with pytest.raises(ValueError):
            batch_risk("huber", [np.ones(4)], self._forward, rng, self.SETTINGS)

    def test_mean_is_exactly_rounded_sum(self, rng):
        xs = [rng.generator.uniform(0.2, 1.0, 10) for _ in range(7)]
        risk = batch_risk("cs", xs, self._forward, RngStream(1, 0), self.SETTINGS)
        assert risk.mean_value == math.fsum(v.value for v in risk.per_sample) / 7
