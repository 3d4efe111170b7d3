"""Truncated Gaussian expansions: product sums, closed forms, conversion."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from stochint.coeffs import KernelSpec, coeff_tensor, scaled_tensor
from stochint.expansion import (
    DOUBLE_SERIES_WEIGHTS,
    IndexPattern,
    NoiseDraws,
    TruncationSpec,
    diagonal_trace,
    draw_noise,
    hermite_diagonal,
    ito_expansion,
    ito_strat_convert,
    legendre_closed_single,
    legendre_double_series,
    pair_series_support,
    strat_expansion,
    trig_milstein,
)

DT = 0.6


def batched_draws(seeds, q_max: int, m: int) -> NoiseDraws:
    """Stack per-seed Gaussian tables along a batch axis (m, batch, q+1)."""
    zeta = np.stack([draw_noise(q_max, m, s).zeta for s in seeds], axis=1)
    return NoiseDraws(zeta=zeta, xi=None, mu=None, seed=min(seeds))


class TestNoiseDraws:
    def test_validation(self):
        with pytest.raises(ValueError):
            draw_noise(q_max=-1, m=1, seed=0)
        with pytest.raises(ValueError):
            draw_noise(q_max=3, m=0, seed=0)
        with pytest.raises(ValueError):
            IndexPattern(())
        with pytest.raises(ValueError):
            IndexPattern((0, 1))
        with pytest.raises(ValueError):
            TruncationSpec(-1)

    def test_shapes_and_properties(self):
        draws = draw_noise(q_max=5, m=3, seed=42)
        assert draws.zeta.shape == (3, 6)
        assert draws.m == 3
        assert draws.q_max == 5
        assert draws.xi.shape == (3,)
        assert draws.mu.shape == (3,)

    def test_row_bounds(self):
        draws = draw_noise(q_max=4, m=2, seed=1)
        assert draws.row(1, 5).shape == (5,)
        with pytest.raises(ValueError):
            draws.row(3, 2)
        with pytest.raises(ValueError):
            draws.row(1, 6)

    def test_determinism_and_tail_invariance(self):
        a = draw_noise(q_max=6, m=2, seed=7)
        b = draw_noise(q_max=6, m=2, seed=7)
        c = draw_noise(q_max=6, m=2, seed=7, tails=False)
        assert np.array_equal(a.zeta, b.zeta)
        assert np.array_equal(a.xi, b.xi)
        assert np.array_equal(a.zeta, c.zeta)
        assert c.xi is None and c.mu is None
        assert not np.array_equal(a.zeta, draw_noise(q_max=6, m=2, seed=8).zeta)

    def test_moments(self):
        # Pooled Gaussians over many seeds: mean 0, variance 1.
        zeta = np.concatenate(
            [draw_noise(q_max=9, m=2, seed=s).zeta.ravel() for s in range(200)]
        )
        n = zeta.size
        assert abs(zeta.mean()) < 4.0 / math.sqrt(n)
        assert abs(zeta.var() - 1.0) < 4.0 * math.sqrt(2.0 / n)

    def test_equality_groups(self):
        assert IndexPattern((1, 2, 1)).equality_groups() == ((1, 3), (2,))
        assert IndexPattern((2, 2)).equality_groups() == ((1, 2),)


class TestClosedSingles:
    @pytest.mark.parametrize("l", [0, 1, 2, 3])
    def test_variance_identity(self, l):
        # The squared coefficients of the exact single integral sum to
        # its second moment dt^(2l+1) / (2l + 1).
        unit = []
        for j in range(l + 1):
            zeta = np.zeros((1, l + 1))
            zeta[0, j] = 1.0
            draws = NoiseDraws(zeta=zeta, xi=None, mu=None, seed=0)
            unit.append(legendre_closed_single(l, 1, draws, DT))
        total = sum(c * c for c in unit)
        assert total == pytest.approx(DT ** (2 * l + 1) / (2 * l + 1), rel=1e-13)

    def test_leading_forms(self):
        draws = draw_noise(q_max=3, m=1, seed=2)
        z = draws.zeta[0]
        assert legendre_closed_single(0, 1, draws, DT) == pytest.approx(
            math.sqrt(DT) * z[0], rel=1e-14
        )
        expected1 = -(DT**1.5) / 2.0 * (z[0] + z[1] / math.sqrt(3.0))
        assert legendre_closed_single(1, 1, draws, DT) == pytest.approx(
            expected1, rel=1e-14
        )

    def test_unsupported_weight(self):
        draws = draw_noise(q_max=5, m=1, seed=0)
        with pytest.raises(ValueError):
            legendre_closed_single(4, 1, draws, DT)

    def test_batched(self):
        seeds = [5, 6, 7]
        batch = batched_draws(seeds, q_max=3, m=1)
        values = legendre_closed_single(1, 1, batch, DT)
        singles = [
            legendre_closed_single(1, 1, draw_noise(3, 1, s), DT) for s in seeds
        ]
        assert np.allclose(values, singles, rtol=0, atol=0)


class TestTensorExpansions:
    def test_distinct_components_have_no_corrections(self):
        tensor = scaled_tensor(coeff_tensor(KernelSpec.unweighted(3), 4), DT)
        draws = draw_noise(q_max=6, m=3, seed=8)
        pattern = IndexPattern((1, 2, 3))
        for q in range(5):
            assert ito_expansion(tensor, pattern, draws, q) == strat_expansion(
                tensor, pattern, draws, q
            )

    def test_pair_matches_manual_wick(self):
        spec = KernelSpec.unweighted(2)
        tensor = scaled_tensor(coeff_tensor(spec, 5), DT)
        draws = draw_noise(q_max=6, m=2, seed=19)
        for q in (0, 2, 5):
            grid = tensor.truncated(q)
            z1 = draws.zeta[0, : q + 1]
            z2 = draws.zeta[1, : q + 1]
            plain = float(z1 @ grid @ z2)
            assert strat_expansion(
                tensor, IndexPattern((1, 2)), draws, q
            ) == pytest.approx(plain, rel=1e-13)
            equal_plain = float(z1 @ grid @ z1)
            trace = float(np.trace(grid))
            assert ito_expansion(
                tensor, IndexPattern((1, 1)), draws, q
            ) == pytest.approx(equal_plain - trace, rel=1e-12)

    @pytest.mark.parametrize("q", [0, 1, 3, 6])
    def test_all_equal_triple_is_hermite_form(self, q):
        tensor = scaled_tensor(coeff_tensor(KernelSpec.unweighted(3), 8), DT)
        draws = draw_noise(q_max=10, m=1, seed=5)
        pattern = IndexPattern((1, 1, 1))
        single = legendre_closed_single(0, 1, draws, DT)
        strat = strat_expansion(tensor, pattern, draws, q)
        assert strat == pytest.approx(single**3 / 6.0, rel=1e-12)
        assert strat == pytest.approx(
            hermite_diagonal(3, 0, 1, draws, DT, "strat"), rel=1e-12
        )
        assert ito_expansion(tensor, pattern, draws, q) == pytest.approx(
            hermite_diagonal(3, 0, 1, draws, DT, "ito"), rel=1e-12
        )

    @pytest.mark.parametrize("q", [0, 1, 3, 6])
    def test_all_equal_quadruple_is_hermite_form(self, q):
        tensor = scaled_tensor(coeff_tensor(KernelSpec.unweighted(4), 6), DT)
        draws = draw_noise(q_max=10, m=1, seed=5)
        pattern = IndexPattern((1, 1, 1, 1))
        assert strat_expansion(tensor, pattern, draws, q) == pytest.approx(
            hermite_diagonal(4, 0, 1, draws, DT, "strat"), rel=1e-12
        )
        assert ito_expansion(tensor, pattern, draws, q) == pytest.approx(
            hermite_diagonal(4, 0, 1, draws, DT, "ito"), rel=1e-12
        )

    def test_truncation_beyond_tensor_rejected(self):
        tensor = scaled_tensor(coeff_tensor(KernelSpec.unweighted(2), 3), DT)
        draws = draw_noise(q_max=6, m=2, seed=1)
        with pytest.raises(ValueError):
            ito_expansion(tensor, IndexPattern((1, 2)), draws, 4)

    def test_second_moment_matches_parseval_mass(self):
        # Statistical check of the distinct-pair truncated expansion:
        # its variance equals the retained squared coefficient mass.
        q = 3
        tensor = scaled_tensor(coeff_tensor(KernelSpec.unweighted(2), q), DT)
        grid = tensor.truncated(q)
        mass = float(np.sum(grid * grid))
        n = 4000
        values = np.empty(n)
        for s in range(n):
            draws = draw_noise(q_max=q, m=2, seed=50_000 + s)
            values[s] = strat_expansion(tensor, IndexPattern((1, 2)), draws, q)
        second = float(np.mean(values**2))
        stderr = float(np.std(values**2, ddof=1)) / math.sqrt(n)
        assert abs(second - mass) < 4.0 * stderr


class TestDiagonalTrace:
    def test_exact_low_order_values(self):
        # Frozen exact rational partial traces (dt = 1).
        assert diagonal_trace((0, 0), 0, 1.0) == pytest.approx(0.5, abs=0)
        assert diagonal_trace((0, 0), 7, 1.0) == pytest.approx(0.5, abs=0)
        assert diagonal_trace((1, 0), 0, 1.0) == pytest.approx(-1.0 / 6.0, rel=1e-15)
        assert diagonal_trace((1, 0), 1, 1.0) == pytest.approx(-13.0 / 60.0, rel=1e-15)
        assert diagonal_trace((1, 0), 3, 1.0) == pytest.approx(-59.0 / 252.0, rel=1e-15)
        assert diagonal_trace((1, 1), 0, 1.0) == pytest.approx(1.0 / 8.0, rel=1e-15)
        assert diagonal_trace((1, 1), 1, 1.0) == pytest.approx(1.0 / 6.0, rel=1e-15)
        assert diagonal_trace((1, 1), 6, 1.0) == pytest.approx(1.0 / 6.0, rel=1e-15)
        assert diagonal_trace((0, 2), 0, 1.0) == pytest.approx(1.0 / 4.0, rel=1e-15)
        assert diagonal_trace((0, 2), 2, 1.0) == pytest.approx(79.0 / 420.0, rel=1e-15)

    def test_limits_are_conversion_constants(self):
        # sum_{i <= q} C_ii -> (1/2) int_0^dt w1 w2 ds as q grows.
        dt = 0.8
        targets = {
            (1, 0): -(dt**2) / 4.0,
            (0, 1): -(dt**2) / 4.0,
            (2, 0): dt**3 / 6.0,
            (0, 2): dt**3 / 6.0,
        }
        for weights, limit in targets.items():
            near = diagonal_trace(weights, 40, dt)
            far = diagonal_trace(weights, 5, dt)
            assert abs(near - limit) < abs(far - limit)
            assert near == pytest.approx(limit, rel=2e-2)

    def test_scaling(self):
        assert diagonal_trace((1, 0), 4, 0.5) == pytest.approx(
            diagonal_trace((1, 0), 4, 1.0) * 0.25, rel=1e-14
        )


class TestDoubleSeries:
    def test_validation(self):
        draws = draw_noise(q_max=8, m=2, seed=0)
        with pytest.raises(ValueError):
            legendre_double_series((3, 0), IndexPattern((1, 2)), draws, 1, DT)
        with pytest.raises(ValueError):
            legendre_double_series((0, 0), IndexPattern((1, 2, 3)), draws, 1, DT)
        with pytest.raises(ValueError):
            legendre_double_series((0, 0), IndexPattern((1, 2)), draws, -1, DT)
        with pytest.raises(ValueError):
            legendre_double_series((0, 0), IndexPattern((1, 2)), draws, 1, DT, "both")

    def test_supported_weights(self):
        assert set(DOUBLE_SERIES_WEIGHTS) == {
            (0, 0),
            (0, 1),
            (1, 0),
            (1, 1),
            (2, 0),
            (0, 2),
        }

    @pytest.mark.parametrize("q", [0, 1, 3, 6])
    def test_unweighted_equals_truncated_contraction(self, q):
        tensor = scaled_tensor(coeff_tensor(KernelSpec.unweighted(2), q), DT)
        grid = tensor.truncated(q)
        draws = draw_noise(q_max=q + 1, m=2, seed=21)
        z1 = draws.zeta[0, : q + 1]
        z2 = draws.zeta[1, : q + 1]
        series = legendre_double_series((0, 0), IndexPattern((1, 2)), draws, q, DT)
        assert series == pytest.approx(float(z1 @ grid @ z2), rel=1e-13)

    @pytest.mark.parametrize("weights", [(1, 0), (0, 1)])
    @pytest.mark.parametrize("q", [1, 2, 5])
    def test_single_weight_equals_masked_contraction(self, weights, q):
        # For one time-weight factor and q >= 1 the truncated series is
        # exactly the tensor restricted to its banded support.
        spec = KernelSpec(2, weights)
        tensor = scaled_tensor(coeff_tensor(spec, q + 2), DT)
        masked = np.where(pair_series_support(q), tensor.truncated(q + 2), 0.0)
        draws = draw_noise(q_max=q + 3, m=2, seed=33)
        z1 = draws.zeta[0, : q + 3]
        z2 = draws.zeta[1, : q + 3]
        series = legendre_double_series(weights, IndexPattern((1, 2)), draws, q, DT)
        assert series == pytest.approx(float(z1 @ masked @ z2), rel=1e-12)

    def test_double_weight_boundary_is_adjusted(self):
        # The (2, 0) form keeps an outermost off-diagonal cell with a
        # value different from the plain coefficient; the plain masked
        # contraction therefore does not reproduce it.
        q = 1
        spec = KernelSpec(2, (2, 0))
        tensor = scaled_tensor(coeff_tensor(spec, q + 3), DT)
        n = q + 4
        eff = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                zeta = np.zeros((2, n))
                zeta[0, i] = 1.0
                zeta[1, j] = 1.0
                draws = NoiseDraws(zeta=zeta, xi=None, mu=None, seed=0)
                eff[i, j] = legendre_double_series(
                    (2, 0), IndexPattern((1, 2)), draws, q, DT
                )
        full = tensor.truncated(q + 3)
        boundary = (q, q + 1)
        assert eff[boundary] != pytest.approx(full[boundary], rel=1e-6)
        # Interior cells agree with the plain coefficients.
        assert eff[0, 0] == pytest.approx(full[0, 0], rel=1e-12)
        assert eff[0, 2] == pytest.approx(full[0, 2], rel=1e-12)

    def test_ito_subtracts_retained_trace(self):
        draws = draw_noise(q_max=9, m=1, seed=3)
        pattern = IndexPattern((1, 1))
        for weights in DOUBLE_SERIES_WEIGHTS:
            for q in (0, 2, 5):
                strat = legendre_double_series(weights, pattern, draws, q, DT, "strat")
                ito = legendre_double_series(weights, pattern, draws, q, DT, "ito")
                assert strat - ito == pytest.approx(
                    diagonal_trace(weights, q, DT), rel=1e-12, abs=1e-15
                )

    def test_ito_equals_strat_for_distinct(self):
        draws = draw_noise(q_max=9, m=2, seed=3)
        pattern = IndexPattern((1, 2))
        for weights in DOUBLE_SERIES_WEIGHTS:
            assert legendre_double_series(
                weights, pattern, draws, 3, DT, "ito"
            ) == legendre_double_series(weights, pattern, draws, 3, DT, "strat")

    def test_batched_matches_scalar(self):
        seeds = [11, 22, 33, 44]
        batch = batched_draws(seeds, q_max=9, m=2)
        for weights in [(0, 0), (1, 0), (1, 1)]:
            for pattern, calculus in [
                (IndexPattern((1, 2)), "strat"),
                (IndexPattern((1, 1)), "ito"),
            ]:
                vb = legendre_double_series(weights, pattern, batch, 4, DT, calculus)
                vs = [
                    legendre_double_series(
                        weights, pattern, draw_noise(9, 2, s), 4, DT, calculus
                    )
                    for s in seeds
                ]
                assert np.array_equal(vb, np.array(vs))


@pytest.fixture(scope="module")
def batch():
    return batched_draws(range(50), q_max=24, m=1)


class TestDiagonalIdentities:
    """Closed product identities of the equal-component pair forms.

    These hold pathwise at every truncation order; the boundary
    adjustments of the double-weight forms exist precisely to keep them
    exact.
    """

    @pytest.mark.parametrize("q", [0, 1, 5, 20])
    def test_mixed_weight_pair_sum(self, batch, q):
        pattern = IndexPattern((1, 1))
        s10 = legendre_double_series((1, 0), pattern, batch, q, DT, "strat")
        s01 = legendre_double_series((0, 1), pattern, batch, q, DT, "strat")
        i0 = legendre_closed_single(0, 1, batch, DT)
        i1 = legendre_closed_single(1, 1, batch, DT)
        assert np.allclose(s10 + s01, i0 * i1, rtol=1e-10, atol=1e-14)

    @pytest.mark.parametrize("q", [0, 1, 5, 20])
    def test_double_weight_square(self, batch, q):
        pattern = IndexPattern((1, 1))
        s11 = legendre_double_series((1, 1), pattern, batch, q, DT, "strat")
        i1 = legendre_closed_single(1, 1, batch, DT)
        assert np.allclose(s11, i1 * i1 / 2.0, rtol=1e-10, atol=1e-14)

    @pytest.mark.parametrize("q", [0, 1, 5, 20])
    def test_second_weight_pair_sum(self, batch, q):
        pattern = IndexPattern((1, 1))
        s20 = legendre_double_series((2, 0), pattern, batch, q, DT, "strat")
        s02 = legendre_double_series((0, 2), pattern, batch, q, DT, "strat")
        i0 = legendre_closed_single(0, 1, batch, DT)
        i2 = legendre_closed_single(2, 1, batch, DT)
        assert np.allclose(s20 + s02, i0 * i2, rtol=1e-10, atol=1e-14)

    @pytest.mark.parametrize("q", [0, 1, 5, 20])
    def test_unweighted_square(self, batch, q):
        # The equal-component unweighted pair collapses to dt zeta_0^2 / 2.
        pattern = IndexPattern((1, 1))
        s00 = legendre_double_series((0, 0), pattern, batch, q, DT, "strat")
        z0 = batch.zeta[0, :, 0]
        assert np.allclose(s00, DT * z0 * z0 / 2.0, rtol=1e-12, atol=1e-15)


class TestSupportMask:
    def test_shape_and_cells(self):
        mask = pair_series_support(2)
        assert mask.shape == (5, 5)
        assert mask[0, 0] and mask[1, 1] and mask[2, 2]
        assert mask[0, 2] and mask[2, 0] and mask[2, 4] and mask[4, 2]
        assert mask[0, 1] and mask[1, 0] and mask[1, 2] and mask[2, 1]
        assert not mask[3, 3] and not mask[0, 3] and not mask[4, 4]

    def test_q0(self):
        mask = pair_series_support(0)
        assert mask.sum() == 3  # (0,0), (0,2), (2,0)


class TestHermiteDiagonal:
    def test_validation(self):
        draws = draw_noise(q_max=4, m=1, seed=0)
        with pytest.raises(ValueError):
            hermite_diagonal(2, 0, 1, draws, DT)
        with pytest.raises(ValueError):
            hermite_diagonal(3, -1, 1, draws, DT)
        with pytest.raises(ValueError):
            hermite_diagonal(3, 0, 1, draws, DT, "both")

    @pytest.mark.parametrize("l", [0, 1, 2])
    def test_triple_forms(self, l):
        draws = draw_noise(q_max=4, m=1, seed=31)
        single = legendre_closed_single(l, 1, draws, DT)
        delta = DT ** (2 * l + 1) / (2 * l + 1)
        assert hermite_diagonal(3, l, 1, draws, DT, "strat") == pytest.approx(
            single**3 / 6.0, rel=1e-13
        )
        assert hermite_diagonal(3, l, 1, draws, DT, "ito") == pytest.approx(
            (single**3 - 3.0 * single * delta) / 6.0, rel=1e-13
        )

    @pytest.mark.parametrize("l", [0, 1])
    def test_quadruple_forms(self, l):
        draws = draw_noise(q_max=4, m=1, seed=37)
        single = legendre_closed_single(l, 1, draws, DT)
        delta = DT ** (2 * l + 1) / (2 * l + 1)
        assert hermite_diagonal(4, l, 1, draws, DT, "strat") == pytest.approx(
            single**4 / 24.0, rel=1e-13
        )
        expected = (single**4 - 6.0 * single**2 * delta + 3.0 * delta**2) / 24.0
        assert hermite_diagonal(4, l, 1, draws, DT, "ito") == pytest.approx(
            expected, rel=1e-13
        )


class TestConversion:
    def test_validation(self):
        pattern = IndexPattern((1, 1))
        with pytest.raises(ValueError):
            ito_strat_convert(0.0, pattern, (0, 0), DT, "sideways")
        with pytest.raises(ValueError):
            ito_strat_convert(0.0, pattern, (0, 0, 0), DT, "strat_to_ito")
        with pytest.raises(ValueError):
            ito_strat_convert(
                0.0, IndexPattern((1, 1, 1)), (0, 0, 0), DT, "strat_to_ito"
            )
        with pytest.raises(ValueError):
            ito_strat_convert(
                0.0, IndexPattern((1, 1, 1, 1)), (0, 0, 0, 0), DT, "strat_to_ito",
                draws=draw_noise(4, 1, 0),
            )
        with pytest.raises(ValueError):
            ito_strat_convert(0.0, IndexPattern((1, 2)), (2, 1), DT, "strat_to_ito")

    def test_pair_shifts_are_exact_constants(self):
        # Ito - Strat = -(1/2) int w1 w2 over the interval.
        pattern = IndexPattern((1, 1))
        expected = {
            (0, 0): -DT / 2.0,
            (1, 0): DT * DT / 4.0,
            (0, 1): DT * DT / 4.0,
            (1, 1): -(DT**3) / 6.0,
            (2, 0): -(DT**3) / 6.0,
            (0, 2): -(DT**3) / 6.0,
        }
        for weights, shift in expected.items():
            assert ito_strat_convert(
                0.0, pattern, weights, DT, "strat_to_ito"
            ) == pytest.approx(shift, rel=1e-15)

    def test_distinct_pair_identity(self):
        pattern = IndexPattern((1, 2))
        for weights in DOUBLE_SERIES_WEIGHTS:
            assert ito_strat_convert(1.25, pattern, weights, DT, "ito_to_strat") == 1.25

    def test_round_trip(self):
        pattern = IndexPattern((1, 1))
        value = 0.33
        out = ito_strat_convert(value, pattern, (1, 0), DT, "strat_to_ito")
        back = ito_strat_convert(out, pattern, (1, 0), DT, "ito_to_strat")
        assert back == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("q", [0, 1, 3, 6])
    def test_all_equal_triple_exact_at_every_order(self, q):
        tensor = scaled_tensor(coeff_tensor(KernelSpec.unweighted(3), 8), DT)
        pattern = IndexPattern((1, 1, 1))
        draws = draw_noise(q_max=8, m=1, seed=11)
        strat = strat_expansion(tensor, pattern, draws, q)
        ito = ito_expansion(tensor, pattern, draws, q)
        converted = ito_strat_convert(
            strat, pattern, (0, 0, 0), DT, "strat_to_ito", draws=draws
        )
        assert converted == pytest.approx(ito, rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize("q", [0, 1, 3, 6])
    def test_all_equal_quadruple_exact_at_every_order(self, q):
        tensor = scaled_tensor(coeff_tensor(KernelSpec.unweighted(4), 6), DT)
        pattern = IndexPattern((1, 1, 1, 1))
        draws = draw_noise(q_max=10, m=1, seed=11)
        strat = strat_expansion(tensor, pattern, draws, q)
        ito = ito_expansion(tensor, pattern, draws, q)
        converted = ito_strat_convert(
            strat, pattern, (0, 0, 0, 0), DT, "strat_to_ito", draws=draws, q=q
        )
        assert converted == pytest.approx(ito, rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize("comps", [(1, 1, 2), (1, 2, 2)])
    def test_mixed_triple_converges_with_order(self, comps):
        # For mixed patterns the correction uses exact single integrals
        # while the expansion truncates, so the pathwise gap shrinks as
        # the truncation order grows.
        tensor = scaled_tensor(coeff_tensor(KernelSpec.unweighted(3), 10), DT)
        pattern = IndexPattern(comps)
        rms = {}
        for q in (0, 10):
            acc = 0.0
            n = 120
            for s in range(n):
                draws = draw_noise(q_max=10, m=2, seed=7000 + s)
                ito = ito_expansion(tensor, pattern, draws, q)
                strat = strat_expansion(tensor, pattern, draws, q)
                conv = ito_strat_convert(
                    strat, pattern, (0, 0, 0), DT, "strat_to_ito", draws=draws
                )
                acc += (ito - conv) ** 2
            rms[q] = math.sqrt(acc / n)
        assert rms[10] < 0.2 * rms[0]


class TestTrigForms:
    def test_validation(self):
        draws = draw_noise(q_max=8, m=2, seed=0)
        with pytest.raises(ValueError):
            trig_milstein("I7", IndexPattern((1,)), draws, 1, DT)
        with pytest.raises(ValueError):
            trig_milstein("I00", IndexPattern((1,)), draws, 1, DT)
        with pytest.raises(ValueError):
            trig_milstein("I00", IndexPattern((1, 2)), draws, -1, DT)
        tailless = draw_noise(q_max=8, m=1, seed=0, tails=False)
        with pytest.raises(ValueError):
            trig_milstein("I1", IndexPattern((1,)), tailless, 1, DT)

    @pytest.mark.parametrize("q", [0, 1, 2])
    def test_pair_resummation(self, q):
        # The closed pair form equals the contraction of the numerically
        # integrated sine/cosine coefficient grid.
        import itertools

        from stochint.coeffs import trig_coeff

        draws = draw_noise(q_max=8, m=2, seed=3)
        direct = trig_milstein("I00", IndexPattern((1, 2)), draws, q, DT)
        spec = KernelSpec.unweighted(2)
        total = 0.0
        for i, j in itertools.product(range(2 * q + 1), repeat=2):
            total += trig_coeff(spec, (i, j), DT) * draws.zeta[0, i] * draws.zeta[1, j]
        assert direct == pytest.approx(total, rel=1e-10)

    def test_tail_term_vanishes_with_zero_tail_draws(self):
        base = draw_noise(q_max=8, m=2, seed=9)
        zeroed = NoiseDraws(
            zeta=base.zeta,
            xi=np.zeros_like(base.xi),
            mu=np.zeros_like(base.mu),
            seed=base.seed,
        )
        for q in (0, 2):
            a = trig_milstein("I00", IndexPattern((1, 2)), zeroed, q, DT)
            b = trig_milstein("I00_tail", IndexPattern((1, 2)), zeroed, q, DT)
            assert a == b

    @pytest.mark.parametrize("q", [0, 1, 3])
    def test_weighted_single_variances_are_exact(self, q):
        # Tail-augmented weighted singles reproduce the full second
        # moment dt^3/3 (one weight) and dt^5/5 (squared weight) at any
        # truncation order: unit-vector draws read off one coefficient
        # at a time.
        n = 2 * q + 1
        total1 = 0.0
        total2 = 0.0
        for slot in range(n + 2):
            zeta = np.zeros((1, max(n, 1)))
            xi = np.zeros(1)
            mu = np.zeros(1)
            if slot < n:
                zeta[0, slot] = 1.0
            elif slot == n:
                xi[0] = 1.0
            else:
                mu[0] = 1.0
            draws = NoiseDraws(zeta=zeta, xi=xi, mu=mu, seed=0)
            c1 = trig_milstein("I1", IndexPattern((1,)), draws, q, DT)
            c2 = trig_milstein("I2", IndexPattern((1,)), draws, q, DT)
            total1 += c1 * c1
            total2 += c2 * c2
        assert total1 == pytest.approx(DT**3 / 3.0, rel=1e-12)
        assert total2 == pytest.approx(DT**5 / 5.0, rel=1e-12)

    def test_pair_tail_augmentation_changes_value(self):
        draws = draw_noise(q_max=8, m=2, seed=12)
        a = trig_milstein("I00", IndexPattern((1, 2)), draws, 2, DT)
        b = trig_milstein("I00_tail", IndexPattern((1, 2)), draws, 2, DT)
        assert a != b
