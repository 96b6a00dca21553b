"""
Unit tests for the Q-network, replay memory, agents, checkpoints and the trainer.
"""

import json
import math
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

# Add the parent directory to the Python path
sys.path.append(str(Path(__file__).parent.parent))

from src.agents.adam import Adam
from src.agents.checkpoint import FORMAT_VERSION, MAGIC, load_checkpoint, save_checkpoint
from src.agents.ddqn_agent import DdqnAgent, ddqn_targets, epsilon_at, select_action, smooth_l1, smooth_l1_grad
from src.agents.mlp import Mlp
from src.agents.random_agent import RandomAgent
from src.agents.replay_buffer import NStepAccumulator, ReplayBuffer, TransitionBatch, TransitionRecord
from src.agents.trainer import Trainer, circuit_from_record, run_experiment
from src.config.config_manager import AgentSettings, EnvConfig, OptimizerConfig
from src.env.environment import QasEnvironment
from src.quantum.gates import Circuit, Gate
from src.quantum.states import QuantumState
from src.vqa.problems import VqsdProblem


def small_settings(**kwargs) -> AgentSettings:
    settings = dict(
        network="custom",
        hidden_layers=[16],
        dropout=0.0,
        batch_size=4,
        replay_capacity=64,
        learning_rate=1e-2,
        target_period=5,
    )
    settings.update(kwargs)
    return AgentSettings(**settings)


def record(obs_size=3, n_actions=2, action=0, reward=1.0, done=False) -> TransitionRecord:
    return TransitionRecord(
        obs=np.full(obs_size, float(action)),
        action=action,
        reward=reward,
        next_obs=np.ones(obs_size),
        done=done,
        next_legal=np.ones(n_actions, dtype=bool),
    )


def plus_environment(seed: int = 0, max_steps: int = 3) -> QasEnvironment:
    plus = QuantumState.from_statevector(np.array([1.0, 1.0]) / math.sqrt(2))
    return QasEnvironment(
        VqsdProblem(plus),
        EnvConfig(max_steps=max_steps, threshold=1e-4),
        OptimizerConfig(method="simplex", budget=80, restarts=1),
        np.random.default_rng(seed),
    )


class TestMlp(unittest.TestCase):
    """Test cases for the numpy Q-network."""

    def test_shapes(self):
        net = Mlp([4, 8, 3], rng=np.random.default_rng(0))
        self.assertEqual(net.forward(np.zeros(4)).shape, (3,))
        self.assertEqual(net.forward(np.zeros((5, 4))).shape, (5, 3))
        self.assertEqual(net.parameter_count, 4 * 8 + 8 + 8 * 3 + 3)
        with self.assertRaises(ValueError):
            net.forward(np.zeros(5))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        net = Mlp([3, 5, 4, 2], rng=rng)
        x = rng.normal(size=(6, 3))
        weights = rng.normal(size=(6, 2))

        def loss() -> float:
            return float(np.sum(net.forward(x) * weights))

        _, cache = net.forward_with_cache(x)
        grads = net.backward(cache, weights)
        eps = 1e-6
        for name, param in net.params().items():
            flat = param.reshape(-1)
            for i in range(0, flat.size, max(1, flat.size // 5)):
                saved = flat[i]
                flat[i] = saved + eps
                up = loss()
                flat[i] = saved - eps
                down = loss()
                flat[i] = saved
                self.assertAlmostEqual(grads[name].reshape(-1)[i], (up - down) / (2 * eps), places=5)

    def test_dropout_needs_generator(self):
        net = Mlp([2, 4, 1], dropout=0.5, rng=np.random.default_rng(0))
        with self.assertRaises(ValueError):
            net.forward(np.ones(2), train=True)
        np.testing.assert_array_equal(net.forward(np.ones(2)), net.forward(np.ones(2)))

    def test_copy_and_soft_update(self):
        a = Mlp([2, 3, 1], rng=np.random.default_rng(0))
        b = Mlp([2, 3, 1])
        b.soft_update(a, 0.25)
        np.testing.assert_allclose(b.weights[0], 0.25 * a.weights[0])
        b.copy_from(a)
        np.testing.assert_array_equal(b.forward(np.ones(2)), a.forward(np.ones(2)))
        with self.assertRaises(ValueError):
            b.copy_from(Mlp([2, 4, 1]))

    def test_clone_is_independent(self):
        a = Mlp([2, 2], rng=np.random.default_rng(0))
        twin = a.clone()
        a.weights[0] += 1.0
        self.assertFalse(np.allclose(a.weights[0], twin.weights[0]))


class TestAdam(unittest.TestCase):
    """Test cases for the Adam optimizer."""

    def test_first_step_has_learning_rate_size(self):
        params = {"p": np.array([1.0])}
        Adam(lr=0.1).step(params, {"p": np.array([2.0])})
        self.assertAlmostEqual(float(params["p"][0]), 0.9, places=6)

    def test_minimizes_quadratic(self):
        params = {"p": np.array([3.0, -2.0])}
        adam = Adam(lr=0.05)
        for _ in range(2000):
            adam.step(params, {"p": 2.0 * params["p"]})
        np.testing.assert_allclose(params["p"], [0.0, 0.0], atol=5e-2)

    def test_state_round_trip(self):
        params = {"p": np.array([1.0, 2.0])}
        adam = Adam(lr=0.1)
        adam.step(params, {"p": np.array([0.5, -0.5])})
        other = Adam(lr=0.1)
        other.load_state(adam.t, adam.state_arrays())
        a, b = {"p": params["p"].copy()}, {"p": params["p"].copy()}
        adam.step(a, {"p": np.array([1.0, 1.0])})
        other.step(b, {"p": np.array([1.0, 1.0])})
        np.testing.assert_array_equal(a["p"], b["p"])


class TestReplay(unittest.TestCase):
    """Test cases for replay memory and n-step returns."""

    def test_ring_eviction(self):
        buffer = ReplayBuffer(3, 3, 2)
        for action in range(5):
            buffer.push(record(action=action % 2, reward=float(action)))
        self.assertEqual(len(buffer), 3)
        order = buffer.oldest_first()
        np.testing.assert_array_equal(buffer.rewards[order], [2.0, 3.0, 4.0])

    def test_sample_without_replacement(self):
        buffer = ReplayBuffer(10, 3, 2)
        for i in range(6):
            buffer.push(record(reward=float(i)))
        batch = buffer.sample(6, np.random.default_rng(0))
        self.assertEqual(sorted(batch.rewards.tolist()), [0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
        with self.assertRaises(ValueError):
            buffer.sample(7, np.random.default_rng(0))

    def test_n_step_returns(self):
        acc = NStepAccumulator(2, 0.5)
        self.assertEqual(acc.push(record(reward=1.0)), [])
        ready = acc.push(record(reward=2.0))
        self.assertEqual(len(ready), 1)
        self.assertAlmostEqual(ready[0].reward, 2.0)
        self.assertEqual(ready[0].steps, 2)
        ready = acc.push(record(reward=4.0, done=True))
        self.assertEqual([r.steps for r in ready], [2, 1])
        self.assertAlmostEqual(ready[0].reward, 4.0)
        self.assertAlmostEqual(ready[1].reward, 4.0)
        self.assertTrue(all(r.done for r in ready))
        self.assertEqual(acc.flush(), [])

    def test_one_step_passthrough(self):
        acc = NStepAccumulator(1, 0.9)
        ready = acc.push(record(reward=3.0))
        self.assertEqual(len(ready), 1)
        self.assertEqual(ready[0].reward, 3.0)


class TestDdqnPieces(unittest.TestCase):
    """Test cases for the DDQN helper functions."""

    def test_epsilon_schedule(self):
        self.assertEqual(epsilon_at(0), 1.0)
        self.assertEqual(epsilon_at(10 ** 6), 0.05)
        self.assertAlmostEqual(epsilon_at(1000, 1.0, 0.999, 0.05), 0.999 ** 1000)

    def test_smooth_l1(self):
        self.assertAlmostEqual(smooth_l1(0.5), 0.125)
        self.assertAlmostEqual(smooth_l1(2.0), 1.5)
        self.assertAlmostEqual(smooth_l1(-3.0), 2.5)
        np.testing.assert_allclose(smooth_l1(np.array([0.5, -2.0])), [0.125, 1.5])
        np.testing.assert_allclose(smooth_l1_grad(np.array([0.5, -2.0, 3.0])), [0.5, -1.0, 1.0])
        with self.assertRaises(ValueError):
            smooth_l1(1.0, beta=0.0)

    def test_select_action(self):
        rng = np.random.default_rng(0)
        legal = np.array([False, True, True])
        self.assertEqual(select_action(np.array([5.0, 1.0, 3.0]), legal, 0.0, rng), 2)
        self.assertEqual(select_action(np.array([1.0, 1.0]), np.array([True, True]), 0.0, rng), 0)
        picks = {select_action(np.zeros(3), legal, 1.0, rng) for _ in range(50)}
        self.assertEqual(picks, {1, 2})
        with self.assertRaises(ValueError):
            select_action(np.zeros(2), np.array([False, False]), 0.5, rng)

    def test_targets_use_masked_policy_argmax(self):
        policy, target = Mlp([2, 3]), Mlp([2, 3])
        policy.biases[0][...] = [0.0, 5.0, 1.0]
        target.biases[0][...] = [10.0, 20.0, 30.0]
        batch = TransitionBatch(
            obs=np.zeros((3, 2)),
            actions=np.zeros(3, dtype=np.int64),
            rewards=np.array([1.0, 1.0, 1.0]),
            next_obs=np.zeros((3, 2)),
            dones=np.array([False, False, True]),
            next_legal=np.array([[True, False, True], [True, True, True], [True, True, True]]),
            steps=np.array([1, 2, 1]),
        )
        y = ddqn_targets(batch, policy, target, 0.5)
        np.testing.assert_allclose(y, [1.0 + 0.5 * 30.0, 1.0 + 0.25 * 20.0, 1.0])


class TestAgents(unittest.TestCase):
    """Test cases for the DDQN and random agents."""

    def test_greedy_act_keeps_counters(self):
        agent = DdqnAgent.from_config(small_settings(), 3, 2, np.random.default_rng(0))
        agent.act(np.zeros(3), np.ones(2, dtype=bool), greedy=True)
        self.assertEqual(agent.steps_done, 0)
        agent.act(np.zeros(3), np.ones(2, dtype=bool))
        self.assertEqual(agent.steps_done, 1)

    def test_observe_trains_once_buffer_is_full(self):
        agent = DdqnAgent.from_config(small_settings(), 3, 2, np.random.default_rng(0))
        for i in range(3):
            agent.observe(np.zeros(3), 0, 1.0, np.ones(3), False, np.ones(2, dtype=bool))
        self.assertEqual(agent.train_steps, 0)
        agent.observe(np.zeros(3), 1, 1.0, np.ones(3), True, np.ones(2, dtype=bool))
        self.assertEqual(agent.train_steps, 1)
        self.assertIsNotNone(agent.last_loss)

    def test_fits_terminal_rewards(self):
        agent = DdqnAgent.from_config(small_settings(), 3, 2, np.random.default_rng(2))
        batch = TransitionBatch.from_records([record(action=a, reward=2.0 * a - 1.0, done=True) for a in (0, 1)] * 2)
        first = agent.train_step(batch)
        for _ in range(300):
            last = agent.train_step(batch)
        self.assertLess(last, first)
        self.assertLess(last, 1e-2)

    def test_soft_target_update(self):
        agent = DdqnAgent.from_config(small_settings(target_update="soft", tau=0.5), 3, 2, np.random.default_rng(0))
        before = agent.target.weights[0].copy()
        batch = TransitionBatch.from_records([record(done=True)] * 4)
        agent.train_step(batch)
        expected = 0.5 * before + 0.5 * agent.policy.weights[0]
        np.testing.assert_allclose(agent.target.weights[0], expected)

    def test_state_round_trip(self):
        settings = small_settings()
        agent = DdqnAgent.from_config(settings, 3, 2, np.random.default_rng(0))
        for i in range(6):
            agent.observe(np.full(3, i), i % 2, 1.0, np.ones(3), i == 5, np.ones(2, dtype=bool))
        with tempfile.TemporaryDirectory() as tmp:
            path = save_checkpoint(Path(tmp) / "agent.npz", {"agent_state": agent.state_header()}, agent.state_arrays())
            header, arrays = load_checkpoint(path)
        twin = DdqnAgent.from_config(settings, 3, 2, np.random.default_rng(99))
        twin.load_state(header["agent_state"], arrays)
        obs = np.array([0.3, -0.2, 1.0])
        np.testing.assert_array_equal(twin.q_values(obs), agent.q_values(obs))
        self.assertEqual(twin.steps_done, agent.steps_done)
        self.assertEqual(len(twin.buffer), len(agent.buffer))
        self.assertEqual(twin.act(obs, np.ones(2, dtype=bool)), agent.act(obs, np.ones(2, dtype=bool)))

    def test_load_rejects_other_agent(self):
        agent = DdqnAgent.from_config(small_settings(), 3, 2, np.random.default_rng(0))
        random_agent = RandomAgent(3, 2, np.random.default_rng(0))
        with self.assertRaises(ValueError):
            agent.load_state(random_agent.state_header(), {})

    def test_random_agent_picks_legal(self):
        agent = RandomAgent(3, 4, np.random.default_rng(0))
        legal = np.array([False, True, False, True])
        picks = {agent.act(np.zeros(3), legal) for _ in range(40)}
        self.assertEqual(picks, {1, 3})
        self.assertFalse(agent.learns)


class TestCheckpoint(unittest.TestCase):
    """Test cases for checkpoint files."""

    def test_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = save_checkpoint(Path(tmp) / "c.npz", {"episode": 3}, {"w": np.arange(4.0)})
            header, arrays = load_checkpoint(path)
        self.assertEqual(header["episode"], 3)
        self.assertEqual(header["magic"], MAGIC)
        np.testing.assert_array_equal(arrays["w"], np.arange(4.0))

    def test_foreign_and_future_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            foreign = Path(tmp) / "foreign.npz"
            np.savez(foreign, header=np.array(json.dumps({"magic": "OTHER", "format_version": FORMAT_VERSION})))
            with self.assertRaises(ValueError):
                load_checkpoint(foreign)
            future = Path(tmp) / "future.npz"
            np.savez(future, header=np.array(json.dumps({"magic": MAGIC, "format_version": FORMAT_VERSION + 1})))
            with self.assertRaises(ValueError):
                load_checkpoint(future)
            with self.assertRaises(FileNotFoundError):
                load_checkpoint(Path(tmp) / "missing.npz")

    def test_reserved_name(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ValueError):
                save_checkpoint(Path(tmp) / "c.npz", {}, {"header": np.zeros(1)})


class TestTrainer(unittest.TestCase):
    """Test cases for the training loop."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def ddqn(self, env, seed=1):
        return DdqnAgent.from_config(small_settings(), env.observation_size, env.action_count, np.random.default_rng(seed))

    def test_random_search_logs_train_only(self):
        env = plus_environment()
        agent = RandomAgent(env.observation_size, env.action_count, np.random.default_rng(0))
        summary = run_experiment(env, agent, 3, seed=7, output_dir=self.out / "random", checkpoint_every=2)
        train = pd.read_csv(self.out / "random" / "train.csv")
        self.assertEqual(train["episode"].tolist(), [1, 2, 3])
        self.assertFalse((self.out / "random" / "test.csv").exists())
        self.assertEqual(summary["episodes"], 3)
        self.assertTrue((self.out / "random" / "checkpoint.npz").exists())

    def test_ddqn_logs_train_and_test(self):
        env = plus_environment()
        trainer = Trainer(env, self.ddqn(env), seed=1, output_dir=self.out / "ddqn", checkpoint_every=10)
        summary = trainer.run(4)
        train = pd.read_csv(self.out / "ddqn" / "train.csv")
        test = pd.read_csv(self.out / "ddqn" / "test.csv")
        self.assertEqual(len(train), 4)
        self.assertEqual(len(test), 4)
        self.assertTrue((test["epsilon"] == 0.0).all())
        self.assertTrue((train["steps"] <= 3).all())
        self.assertEqual(summary["successes"]["train"], int(train["success"].sum()))
        self.assertIsNotNone(trainer.lowest)

    def test_best_circuit_rebuilds(self):
        env = plus_environment()
        trainer = Trainer(env, self.ddqn(env), seed=1, output_dir=self.out / "best", checkpoint_every=10)
        trainer.run(6)
        record_ = trainer.best or trainer.lowest
        circuit = circuit_from_record(1, record_)
        self.assertEqual(circuit.gate_count, record_["gate_count"])
        np.testing.assert_allclose(circuit.angles(), record_["angles"])
        if trainer.best is not None:
            saved = json.loads((self.out / "best" / "best_circuit.json").read_text())
            self.assertEqual(saved["gate_count"], trainer.best["gate_count"])

    def test_resume_reproduces_uninterrupted_run(self):
        env = plus_environment(seed=3, max_steps=2)
        run_experiment(env, self.ddqn(env, 4), 4, seed=5, output_dir=self.out / "full", checkpoint_every=2)

        env = plus_environment(seed=3, max_steps=2)
        run_experiment(env, self.ddqn(env, 4), 2, seed=5, output_dir=self.out / "split", checkpoint_every=2)
        env = plus_environment(seed=42, max_steps=2)
        run_experiment(env, self.ddqn(env, 42), 4, seed=5, output_dir=self.out / "split", checkpoint_every=2, resume=True)

        for name in ("train.csv", "test.csv"):
            full = pd.read_csv(self.out / "full" / name).drop(columns=["wall_time_s"])
            split = pd.read_csv(self.out / "split" / name).drop(columns=["wall_time_s"])
            pd.testing.assert_frame_equal(full, split)

    def test_resume_rejects_other_seed(self):
        env = plus_environment()
        run_experiment(env, self.ddqn(env), 1, seed=5, output_dir=self.out / "seed", checkpoint_every=1)
        with self.assertRaises(ValueError):
            run_experiment(env, self.ddqn(env), 2, seed=6, output_dir=self.out / "seed", resume=True)

    def test_resume_without_checkpoint(self):
        env = plus_environment()
        with self.assertRaises(FileNotFoundError):
            run_experiment(env, self.ddqn(env), 2, seed=5, output_dir=self.out / "none", resume=True)

    def test_circuit_from_record(self):
        record_ = {"gates": [["RY", [0]], ["CNOT", [0, 1]], ["RZ", [1]]], "angles": [0.4, -0.1]}
        circuit = circuit_from_record(2, record_)
        expected = Circuit(2, [Gate("RY", (0,), 0.4), Gate("CNOT", (0, 1)), Gate("RZ", (1,), -0.1)])
        self.assertEqual(circuit.structure(), expected.structure())
        np.testing.assert_allclose(circuit.angles(), expected.angles())


if __name__ == "__main__":
    unittest.main()
