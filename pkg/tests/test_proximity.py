import numpy as np
import pytest

from conftest import random_connected_graph
from pprinv.graph import Graph, transition_matrix
from pprinv.proximity import (
    LOG,
    ROW_L2,
    Preset,
    ProximityConfig,
    build_proximity,
    deepwalk_log_proximity,
    hop_coefficients,
    parse_alpha_schedule,
    preset_config,
    truncated_ppr,
)


def constant_cfg(alpha, k_horizon, *, b=1.0, k_start=0, epsilon=1.0, **kw):
    return ProximityConfig.constant_alpha(
        alpha, b=b, k_start=k_start, k_horizon=k_horizon, epsilon=epsilon, **kw
    )


def geometric_weights(alpha, k_horizon, k_start=0):
    w = alpha * (1.0 - alpha) ** np.arange(k_horizon + 1)
    w[:k_start] = 0.0
    return w


class TestConfigValidation:
    def test_rejects_bad_scalars(self):
        with pytest.raises(ValueError, match="b must"):
            constant_cfg(0.5, 2, b=0.0)
        with pytest.raises(ValueError, match="epsilon"):
            constant_cfg(0.5, 2, epsilon=0.0)

    def test_rejects_bad_hop_window(self):
        with pytest.raises(ValueError, match="k_start"):
            constant_cfg(0.5, 2, k_start=3)

    def test_rejects_bad_alphas(self):
        with pytest.raises(ValueError, match="probabilities"):
            ProximityConfig(
                b=1, beta=0, gamma=0, k_start=0, k_horizon=1,
                alphas=(0.5, 1.5), epsilon=1.0, activation="identity",
            )
        with pytest.raises(ValueError, match="length"):
            ProximityConfig(
                b=1, beta=0, gamma=0, k_start=0, k_horizon=2,
                alphas=(0.5, 0.5), epsilon=1.0, activation="identity",
            )

    def test_rejects_unknown_activation(self):
        with pytest.raises(ValueError, match="activation"):
            constant_cfg(0.5, 2, activation="tanh")


class TestHopCoefficients:
    def test_constant_geometric(self):
        c = hop_coefficients(constant_cfg(0.5, 2))
        assert np.allclose(c, [0.5, 0.25, 0.125])

    def test_geometric_series_sum(self):
        c = hop_coefficients(constant_cfg(0.1, 60))
        assert c.sum() == pytest.approx(1 - 0.9**61, abs=1e-15)

    def test_schedule_with_terminal_stop(self):
        cfg = ProximityConfig(
            b=1, beta=0, gamma=0, k_start=0, k_horizon=2,
            alphas=(0.2, 0.5, 1.0), epsilon=1.0, activation="identity",
        )
        c = hop_coefficients(cfg)
        assert np.allclose(c, [0.2, 0.4, 0.4])
        assert c.sum() == pytest.approx(1.0)

    def test_k_start_zeroes_prefix(self):
        c = hop_coefficients(constant_cfg(0.5, 3, k_start=2))
        assert np.allclose(c, [0, 0, 0.125, 0.0625])


class TestTruncatedPpr:
    def test_zero_horizon_is_scaled_identity(self, k3):
        cfg = constant_cfg(0.5, 0)
        assert np.allclose(truncated_ppr(k3, cfg), 0.5 * np.eye(3))

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.7])
    @pytest.mark.parametrize("k_horizon", [1, 10, 50])
    def test_row_sums(self, alpha, k_horizon):
        g = random_connected_graph(20, 0.25, 1)
        m = truncated_ppr(g, constant_cfg(alpha, k_horizon))
        expected = 1 - (1 - alpha) ** (k_horizon + 1)
        assert np.abs(m.sum(axis=1) - expected).max() < 1e-12

    def test_single_edge_two_hops(self):
        g = Graph.from_edges(2, [(0, 1)])
        m = truncated_ppr(g, constant_cfg(0.5, 2))
        assert np.allclose(np.diag(m), 0.625)  # P^2 = I for one edge
        assert m[0, 1] == pytest.approx(0.25)

    def test_walk_reversibility(self):
        # D @ Pi == Pi.T @ D for the undirected walk sum.
        g = random_connected_graph(18, 0.25, 4)
        m = truncated_ppr(g, constant_cfg(0.3, 8))
        d = np.diag(g.degrees.astype(float))
        assert np.abs(d @ m - m.T @ d).max() < 1e-10

    def test_matches_matrix_power_oracle(self):
        g = random_connected_graph(12, 0.3, 5)
        cfg = constant_cfg(0.4, 5, k_start=1)
        p = transition_matrix(g)
        weights = geometric_weights(0.4, 5, k_start=1)
        oracle = sum(
            w * np.linalg.matrix_power(p, i) for i, w in enumerate(weights)
        )
        assert np.abs(truncated_ppr(g, cfg) - oracle).max() < 1e-12


def strap_direct(g, alpha, epsilon, k_horizon):
    """Independent coding of the STRAP form: max{0, log((2/eps) sum c_i P^i)}."""
    p = transition_matrix(g)
    acc = sum(
        alpha * (1 - alpha) ** i * np.linalg.matrix_power(p, i)
        for i in range(k_horizon + 1)
    )
    scaled = (2.0 / epsilon) * acc
    out = np.where(scaled > 0, np.log(np.where(scaled > 0, scaled, 1.0)), 0.0)
    return np.maximum(out, 0.0)


def approxppr_direct(g, alpha, k_horizon):
    p = transition_matrix(g)
    return sum(
        alpha * (1 - alpha) ** i * np.linalg.matrix_power(p, i)
        for i in range(1, k_horizon + 1)
    )


def nrp_direct(g, alpha, k_horizon):
    d = np.diag(g.degrees.astype(float))
    return d @ approxppr_direct(g, alpha, k_horizon) @ d


def lemane_direct(g, schedule, epsilon):
    p = transition_matrix(g)
    k_horizon = len(schedule) - 1
    acc = schedule[0] * np.eye(g.n)
    survive = 1.0 - schedule[0]
    for l in range(1, k_horizon + 1):
        acc += schedule[l] * survive * np.linalg.matrix_power(p, l)
        survive *= 1.0 - schedule[l]
    scaled = (2.0 / epsilon) * acc
    out = np.where(scaled > 0, np.log(np.where(scaled > 0, scaled, 1.0)), 0.0)
    return np.maximum(out, 0.0)


def sensei_direct(g, alpha, k_horizon):
    p = transition_matrix(g)
    acc = sum(
        alpha * (1 - alpha) ** i * np.linalg.matrix_power(p, i)
        for i in range(k_horizon + 1)
    )
    norms = np.linalg.norm(acc, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return acc / norms


def deepwalk_direct(g, alpha, k_horizon):
    p = transition_matrix(g)
    acc = sum(
        alpha * (1 - alpha) ** i * np.linalg.matrix_power(p, i)
        for i in range(1, k_horizon + 1)
    )
    inner = (g.volume / k_horizon) * acc @ np.diag(1.0 / g.degrees)
    return np.log(inner) - np.log(1.0 - alpha)


class TestPresetEquivalence:
    ALPHA, EPS, K = 0.3, 1e-6, 8

    def graphs(self):
        return [random_connected_graph(30, 0.2, seed) for seed in range(3)]

    def test_strap(self):
        for g in self.graphs():
            cfg = preset_config(Preset.STRAP, alpha=self.ALPHA, epsilon=self.EPS, k_horizon=self.K)
            direct = strap_direct(g, self.ALPHA, self.EPS, self.K)
            assert np.abs(build_proximity(g, cfg) - direct).max() < 1e-12

    def test_approxppr_equals_truncated_walk(self, k3):
        cfg = preset_config("approxppr", alpha=0.4, epsilon=1e-5, k_horizon=6)
        assert np.abs(
            build_proximity(k3, cfg) - approxppr_direct(k3, 0.4, 6)
        ).max() < 1e-12
        tail = truncated_ppr(k3, constant_cfg(0.4, 6, k_start=1))
        assert np.abs(build_proximity(k3, cfg) - tail).max() < 1e-12

    def test_nrp(self):
        for g in self.graphs():
            cfg = preset_config("nrp", alpha=self.ALPHA, epsilon=self.EPS, k_horizon=self.K)
            direct = nrp_direct(g, self.ALPHA, self.K)
            assert np.abs(build_proximity(g, cfg) - direct).max() < 1e-12

    def test_lemane(self):
        schedule = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95)
        for g in self.graphs():
            cfg = preset_config(
                "lemane", epsilon=self.EPS, k_horizon=self.K, alpha_schedule=schedule
            )
            direct = lemane_direct(g, schedule, self.EPS)
            assert np.abs(build_proximity(g, cfg) - direct).max() < 1e-12

    def test_sensei_rows_unit_norm(self):
        for g in self.graphs():
            cfg = preset_config("sensei", alpha=self.ALPHA, epsilon=self.EPS, k_horizon=self.K)
            m = build_proximity(g, cfg)
            direct = sensei_direct(g, self.ALPHA, self.K)
            assert np.abs(m - direct).max() < 1e-12
            norms = np.linalg.norm(m, axis=1)
            assert np.abs(norms[norms > 0] - 1.0).max() < 1e-12

    def test_deepwalk(self):
        for g in self.graphs():
            cfg = preset_config(
                "deepwalk", alpha=self.ALPHA, k_horizon=self.K, volume=g.volume
            )
            direct = np.maximum(deepwalk_direct(g, self.ALPHA, self.K), 0.0)
            assert np.abs(build_proximity(g, cfg) - direct).max() < 1e-12

    def test_nonnegative_output(self):
        for g in self.graphs():
            for preset in ("strap", "approxppr", "nrp", "deepwalk"):
                cfg = preset_config(
                    preset, alpha=self.ALPHA, epsilon=self.EPS,
                    k_horizon=self.K, volume=g.volume,
                )
                assert build_proximity(g, cfg).min() >= 0.0


class TestPresetConfig:
    def test_strap_parameters(self):
        cfg = preset_config("strap", alpha=0.5, epsilon=1e-7, k_horizon=10)
        assert (cfg.b, cfg.beta, cfg.gamma, cfg.k_start) == (20.0, 0.0, 0.0, 0)
        assert cfg.activation == LOG

    def test_nrp_parameters(self):
        cfg = preset_config("nrp", alpha=0.5, epsilon=1e-7, k_horizon=10)
        assert (cfg.b, cfg.beta, cfg.gamma, cfg.k_start) == (1e-6, 1.0, 1.0, 1)
        assert cfg.activation == "identity"

    def test_deepwalk_parameters(self):
        cfg = preset_config("deepwalk", alpha=0.7, k_horizon=10, volume=100)
        assert cfg.b == 1.0
        assert cfg.epsilon == pytest.approx(0.3 / 100)
        assert (cfg.beta, cfg.gamma, cfg.k_start) == (0.0, -1.0, 1)
        assert cfg.activation == LOG

    def test_sensei_activation(self):
        cfg = preset_config("sensei", alpha=0.5, epsilon=1e-7, k_horizon=10)
        assert cfg.activation == ROW_L2

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            preset_config("node2vec", alpha=0.5, epsilon=1e-7, k_horizon=10)

    def test_missing_requirements(self):
        with pytest.raises(ValueError, match="alpha"):
            preset_config("strap", epsilon=1e-7, k_horizon=10)
        with pytest.raises(ValueError, match="volume"):
            preset_config("deepwalk", alpha=0.5, k_horizon=10)
        with pytest.raises(ValueError, match="schedule"):
            preset_config("lemane", epsilon=1e-7, k_horizon=10)


class TestLogOfZero:
    def test_unreachable_pairs_emit_zero_not_nan(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        cfg = preset_config("strap", alpha=0.5, epsilon=1e-7, k_horizon=5)
        m = build_proximity(g, cfg)
        assert np.all(np.isfinite(m))
        assert m[0, 2] == 0.0 and m[1, 3] == 0.0
        assert m[0, 1] > 0.0


class TestDeepwalkLogProximity:
    def test_matches_direct_form(self):
        g = random_connected_graph(15, 0.3, 9)
        out = deepwalk_log_proximity(g, 0.3, 8)
        assert np.abs(out - deepwalk_direct(g, 0.3, 8)).max() < 1e-12

    def test_rejects_unreachable_pairs(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        with pytest.raises(ValueError, match="hops"):
            deepwalk_log_proximity(g, 0.5, 4)


class TestAlphaSchedule:
    def test_parse(self):
        assert parse_alpha_schedule("0.1\n0.2\n0.3\n", 2) == (0.1, 0.2, 0.3)

    def test_wrong_length(self):
        with pytest.raises(ValueError, match="need 4"):
            parse_alpha_schedule("0.1\n0.2\n", 3)
