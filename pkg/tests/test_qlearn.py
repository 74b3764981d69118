import numpy as np
import pytest
from scipy import stats

from treecrawl.qlearn import (AgentConfig, DimensionMismatchError, QNetwork,
                              ReplayBuffer, ReplayRecord, batch_targets,
                              ddqn_target, load_checkpoint, save_checkpoint,
                              seed_replay, sync_target, train_step)


def zero_net(dim=8, hidden=(5, 5)):
    net = QNetwork(dim, hidden=hidden, rng=np.random.default_rng(0))
    for name in net.PARAM_NAMES:
        getattr(net, name)[:] = 0.0
    return net


def mse(net, X, y):
    q = net.forward(X)
    return float(np.mean((q - y) ** 2))


def finite_difference_grads(net, X, y, h=1e-6):
    out = {}
    for name in net.PARAM_NAMES:
        p = getattr(net, name)
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            orig = p[i]
            p[i] = orig + h
            lp = mse(net, X, y)
            p[i] = orig - h
            lm = mse(net, X, y)
            p[i] = orig
            g[i] = (lp - lm) / (2 * h)
        out[name] = g
    return out


def max_relative_error(analytic, numeric):
    worst = 0.0
    for name in analytic:
        a, n = analytic[name], numeric[name]
        rel = np.abs(a - n) / np.maximum(np.abs(a) + np.abs(n), 1e-8)
        worst = max(worst, float(rel.max()))
    return worst


class _FixedNet:
    """Maps each input row to a preset value; stands in for a trained net."""

    def __init__(self, mapping):
        self.mapping = {tuple(k): v for k, v in mapping.items()}

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self.mapping[tuple(x)]
        return np.array([self.mapping[tuple(row)] for row in x])


class TestForward:
    def test_zero_net_outputs_zero(self):
        net = zero_net()
        rng = np.random.default_rng(1)
        for _ in range(10):
            assert net.forward(rng.normal(size=8)) == 0.0

    def test_hand_computed_identity_chain(self):
        net = QNetwork(1, hidden=(1, 1), rng=np.random.default_rng(0))
        for name in ("W1", "W2", "W3"):
            getattr(net, name)[:] = 1.0
        for name in ("b1", "b2", "b3"):
            getattr(net, name)[:] = 0.0
        assert net.forward(np.array([2.0])) == 2.0

    def test_finite_on_random_inputs(self):
        net = QNetwork(8, rng=np.random.default_rng(2))
        rng = np.random.default_rng(3)
        X = rng.normal(scale=5.0, size=(10_000, 8))
        out = net.forward(X)
        assert np.all(np.isfinite(out))

    def test_dimension_mismatch(self):
        net = QNetwork(8, rng=np.random.default_rng(0))
        with pytest.raises(DimensionMismatchError):
            net.forward(np.zeros(6))


class TestGradients:
    def test_backprop_matches_central_differences(self):
        rng = np.random.default_rng(0)
        net = QNetwork(8, hidden=(5, 5), rng=rng)
        X = rng.normal(size=(7, 8))
        y = rng.normal(size=7)
        _, grads = net.loss_and_gradients(X, y)
        fd = finite_difference_grads(net, X, y)
        assert max_relative_error(grads, fd) < 1e-4

    def test_gradcheck_with_tanh(self):
        rng = np.random.default_rng(4)
        net = QNetwork(6, hidden=(4, 3), activation="tanh", rng=rng)
        X = rng.normal(size=(5, 6))
        y = rng.normal(size=5)
        _, grads = net.loss_and_gradients(X, y)
        fd = finite_difference_grads(net, X, y)
        assert max_relative_error(grads, fd) < 1e-4


class TestDdqnTarget:
    def test_gamma_zero_equals_reward(self):
        rng = np.random.default_rng(5)
        online = QNetwork(4, hidden=(3, 3), rng=rng)
        target = online.clone()
        record = ReplayRecord(x=np.zeros(4), reward=0.75,
                              next_vectors=rng.normal(size=(6, 4)))
        assert ddqn_target(record, online, target, gamma=0.0) == 0.75

    def test_empty_next_set_equals_reward(self):
        online = zero_net(4, (3, 3))
        record = ReplayRecord(x=np.zeros(4), reward=1.0,
                              next_vectors=np.empty((0, 4)))
        assert ddqn_target(record, online, online, gamma=0.9) == 1.0

    def test_three_candidate_worked_example(self):
        rows = [np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0])]
        online = _FixedNet({tuple(rows[0]): 0.2, tuple(rows[1]): 0.9, tuple(rows[2]): 0.5})
        target = _FixedNet({tuple(rows[0]): 0.1, tuple(rows[1]): 0.4, tuple(rows[2]): 0.8})
        record = ReplayRecord(x=np.zeros(3), reward=1.0, next_vectors=np.stack(rows))
        # online argmax picks index 1, evaluated by the target net: 1 + 0.5*0.4
        assert ddqn_target(record, online, target, gamma=0.5) == pytest.approx(1.2)

    def test_identical_nets_reduce_to_max_form(self):
        rng = np.random.default_rng(6)
        online = QNetwork(4, hidden=(4, 4), rng=rng)
        for _ in range(50):
            record = ReplayRecord(x=rng.normal(size=4), reward=float(rng.integers(0, 2)),
                                  next_vectors=rng.normal(size=(int(rng.integers(1, 8)), 4)))
            y = ddqn_target(record, online, online, gamma=0.7)
            max_form = record.reward + 0.7 * float(np.max(online.forward(record.next_vectors)))
            assert y == pytest.approx(max_form, abs=1e-12)

    def test_batch_targets_match_single(self):
        rng = np.random.default_rng(7)
        online = QNetwork(5, hidden=(4, 4), rng=rng)
        target = QNetwork(5, hidden=(4, 4), rng=rng)
        records = []
        for _ in range(20):
            k = int(rng.integers(0, 6))
            records.append(ReplayRecord(x=rng.normal(size=5),
                                        reward=float(rng.integers(0, 2)),
                                        next_vectors=rng.normal(size=(k, 5))))
        batched = batch_targets(records, online, target, gamma=0.9)
        singles = [ddqn_target(r, online, target, 0.9) for r in records]
        assert np.allclose(batched, singles, atol=1e-12)


class TestTrainStep:
    def test_zero_gradient_when_predictions_match_targets(self):
        net = zero_net(4, (3, 3))
        target = zero_net(4, (3, 3))
        records = [ReplayRecord(x=np.ones(4) * i, reward=0.0,
                                next_vectors=np.empty((0, 4))) for i in range(4)]
        before = {n: getattr(net, n).copy() for n in net.PARAM_NAMES}
        loss = train_step(net, target, records, AgentConfig(learning_rate=0.1))
        assert loss == 0.0
        for n in net.PARAM_NAMES:
            assert np.array_equal(before[n], getattr(net, n))

    def test_descent_reduces_loss(self):
        rng = np.random.default_rng(8)
        net = QNetwork(4, hidden=(4, 4), rng=rng)
        target = net.clone()
        record = ReplayRecord(x=rng.normal(size=4), reward=1.0,
                              next_vectors=np.empty((0, 4)))
        cfg = AgentConfig(learning_rate=1e-3, gamma=0.9)
        before = train_step(net, target, [record], cfg)
        after = mse(net, record.x[None, :], np.array([1.0]))
        assert after < before

    def test_convergence_smoke(self):
        rng = np.random.default_rng(0)
        net = QNetwork(8, hidden=(16, 16), rng=rng)
        target = net.clone()
        X = rng.normal(size=(16, 8))
        rewards = rng.integers(0, 2, size=16).astype(float)
        records = [ReplayRecord(x=X[i], reward=float(rewards[i]),
                                next_vectors=np.empty((0, 8))) for i in range(16)]
        cfg = AgentConfig(gamma=0.0, learning_rate=0.01)
        loss = np.inf
        for _ in range(10_000):
            loss = train_step(net, target, records, cfg)
            if loss < 1e-3:
                break
        assert loss < 1e-3


class TestSyncTarget:
    def test_copy_semantics(self):
        rng = np.random.default_rng(9)
        online = QNetwork(6, rng=rng)
        target = QNetwork(6, rng=rng)
        X = rng.normal(size=(100, 6))
        assert not np.allclose(online.forward(X), target.forward(X))
        sync_target(online, target)
        assert np.array_equal(online.forward(X), target.forward(X))
        online.W1[0, 0] += 1.0  # later perturbation must not leak into the copy
        assert not np.array_equal(online.forward(X), target.forward(X))


class TestReplay:
    def test_capacity_fifo(self):
        buf = ReplayBuffer(capacity=3)
        for i in range(5):
            buf.add(ReplayRecord(x=np.array([float(i)]), reward=0.0,
                                 next_vectors=np.empty((0, 1))))
        assert len(buf) == 3
        kept = sorted(float(r.x[0]) for r in buf._records)
        assert kept == [2.0, 3.0, 4.0]

    def test_sampling_uniform_chi_square(self):
        buf = ReplayBuffer(capacity=10)
        for i in range(10):
            buf.add(ReplayRecord(x=np.array([float(i)]), reward=0.0,
                                 next_vectors=np.empty((0, 1))))
        rng = np.random.default_rng(10)
        counts = np.zeros(10)
        for record in buf.sample(rng, 100_000):
            counts[int(record.x[0])] += 1
        assert stats.chisquare(counts).pvalue > 0.001

    def test_seed_replay(self):
        buf = ReplayBuffer(capacity=10)
        vecs = [np.concatenate([np.zeros(3), np.ones(5) * i]) for i in range(3)]
        seed_replay(buf, vecs)
        assert len(buf) == 3
        net = zero_net(8, (3, 3))
        for record in buf._records:
            assert record.reward == 1.0
            assert record.next_vectors.shape == (0, 8)
            assert ddqn_target(record, net, net, gamma=0.9) == 1.0

    def test_seed_replay_empty(self):
        buf = ReplayBuffer(capacity=10)
        seed_replay(buf, [])
        assert len(buf) == 0

    def test_seed_replay_rejects_nonzero_state(self):
        buf = ReplayBuffer(capacity=10)
        with pytest.raises(ValueError):
            seed_replay(buf, [np.ones(8)])


class TestAgentConfig:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            AgentConfig(gamma=1.5)
        with pytest.raises(ValueError):
            AgentConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            AgentConfig(batch_size=0)

    def test_epsilon_schedule_endpoints(self):
        cfg = AgentConfig(eps_start=1.0, eps_end=0.05)
        assert cfg.epsilon(0, 5000) == 1.0
        assert cfg.epsilon(1000, 5000) == pytest.approx(0.05)  # 20% of budget
        assert cfg.epsilon(4999, 5000) == pytest.approx(0.05)


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(11)
        net = QNetwork(8, hidden=(6, 4), rng=rng)
        path = tmp_path / "net.json"
        save_checkpoint(net, path)
        loaded = load_checkpoint(path)
        X = rng.normal(size=(20, 8))
        assert np.array_equal(net.forward(X), loaded.forward(X))
