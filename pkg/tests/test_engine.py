import numpy as np
import pytest

from consensus_subgrad.absolute_probability import compute_abs_prob, pushsum_induced_sequence
from consensus_subgrad.engine import (
    AlgorithmInputs,
    embed,
    run_dgd,
    run_dgd_post,
    run_push_first,
    run_row_stochastic,
    run_subgradient_push,
    run_unified,
    snapshot_times,
    unified_step,
    verify_embedding,
)
from consensus_subgrad.errors import (
    DimensionMismatch,
    EmbeddingUnavailable,
    KindMismatch,
    NonFiniteState,
    NonpositiveMass,
    ZeroDiagonalDivisor,
)
from consensus_subgrad.graph_conditions import check_A1
from consensus_subgrad.problems import CustomProblem, L1MedianInstance
from consensus_subgrad.sequences import MatrixSequence, lazy, ring_metropolis, uniform
from consensus_subgrad.step_schedules import common_power, per_agent_explicit, pi_scaled_power


@pytest.fixture
def median4():
    return L1MedianInstance.random(4, 2, seed=11, scale=3.0)


class TestUnifiedStep:
    def test_identity(self):
        x = np.arange(6.0).reshape(3, 2)
        np.testing.assert_array_equal(unified_step(x, np.eye(3), np.zeros(3), np.ones((3, 2))), x)

    def test_averaging(self):
        x = np.arange(6.0).reshape(3, 2)
        out = unified_step(x, uniform(3), np.zeros(3), np.zeros((3, 2)))
        np.testing.assert_allclose(out, np.tile(x.mean(axis=0), (3, 1)))

    def test_hand_example(self):
        out = unified_step([[0.0], [2.0]], np.full((2, 2), 0.5), [0.1, 0.1], [[1.0], [-1.0]])
        np.testing.assert_allclose(out, [[0.9], [1.1]], atol=1e-15)

    def test_dimensions(self):
        with pytest.raises(DimensionMismatch):
            unified_step(np.zeros((2, 1)), np.eye(3), np.zeros(2), np.zeros((2, 1)))

    def test_non_finite(self):
        with pytest.raises(NonFiniteState):
            unified_step([[np.inf]], [[1.0]], [0.0], [[0.0]])

    def test_run_aborts_on_nan(self):
        prob = CustomProblem([lambda x: 0.0], [lambda x: np.array([np.nan])], [1.0], 1,
                             x0=[[0.0]])
        with pytest.raises(NonFiniteState):
            run_unified(prob, MatrixSequence.constant([[1.0]]), common_power(1, -0.75, 1),
                        steps=3, diagnostics=False)


class TestDGD:
    def test_symmetric_start_equals_centralized(self):
        n = 4
        prob = L1MedianInstance(np.zeros((n, 1)) + 2.0)
        seq = MatrixSequence.constant(ring_metropolis(n), "doubly")
        x0 = np.full((n, 1), -1.0)
        traj = run_dgd(prob, seq, common_power(1, -0.75, n), x0, 50, snapshots="all")
        x = -1.0
        for s in traj.snapshots:
            assert np.all(s.state.x == s.state.x[0])
            assert s.state.x[0, 0] == pytest.approx(x, abs=1e-14)
            x -= (s.t + 1.0) ** -0.75 * np.sign(x - 2.0)

    def test_zero_steps(self, median4):
        seq = MatrixSequence.constant(uniform(4), "doubly")
        traj = run_dgd(median4, seq, common_power(1, -0.75, 4), steps=0)
        assert traj.times == [0]
        np.testing.assert_array_equal(traj.final.state.x, median4.initial_states())

    def test_kind_mismatch(self, median4, sep_p):
        with pytest.raises(KindMismatch):
            run_dgd(median4, MatrixSequence.constant(sep_p), common_power(1, -0.75, 4), steps=1)
        seq = MatrixSequence.constant(uniform(4), "doubly")
        with pytest.raises(KindMismatch):
            run_dgd(median4, seq, per_agent_explicit(np.arange(8.0).reshape(2, 4)), steps=1)


class TestDGDPost:
    def test_pure_consensus_limit(self, median4, sep_p):
        seq = MatrixSequence.constant(sep_p)
        ap = compute_abs_prob(seq, 1, check_A1(seq))
        traj = run_dgd_post(median4, seq, per_agent_explicit(np.zeros((400, 4))), steps=400)
        target = median4.initial_states().T @ ap.at(0)
        assert np.abs(traj.final.state.x - target[None, :]).max() <= 1e-6

    def test_identity_mixing_is_independent_descent(self, median4):
        seq = MatrixSequence.constant(np.eye(4))
        x = median4.initial_states() + 0.3
        traj = run_dgd_post(median4, seq, common_power(0.5, -0.75, 4), x0=x, steps=20,
                            snapshots="all")
        for s in traj.snapshots:
            np.testing.assert_allclose(s.state.x, x, atol=1e-14)
            x = x - 0.5 * (s.t + 1.0) ** -0.75 * np.sign(x - median4.anchors)


class TestRowStochastic:
    def test_uniform_diagonal(self, median4):
        traj = run_row_stochastic(median4, uniform(4), 1.0, -0.75, steps=5)
        np.testing.assert_allclose(traj.meta["z_diagonal"], 0.25)

    def test_single_agent(self):
        prob = L1MedianInstance([[3.0]])
        traj = run_row_stochastic(prob, [[1.0]], 1.0, -0.75, x0=[[0.0]], steps=30,
                                  snapshots="all")
        x = 0.0
        for s in traj.snapshots:
            assert s.state.x[0, 0] == pytest.approx(x, abs=1e-14)
            x -= (s.t + 1.0) ** -0.75 * np.sign(x - 3.0)

    def test_zero_diagonal_raises(self, median4, sep_p):
        with pytest.raises(ZeroDiagonalDivisor):
            run_row_stochastic(median4, sep_p, 1.0, -0.75, steps=5)

    def test_skip_mode_and_diagonal_limit(self, median4, sep_p):
        traj = run_row_stochastic(median4, sep_p, 1.0, -0.75, steps=300,
                                  skip_until_positive=True)
        np.testing.assert_allclose(traj.meta["z_diagonal"], [0.2, 0.2, 0.4, 0.2], atol=1e-10)

    def test_needs_constant(self, median4):
        seq = MatrixSequence.periodic([uniform(4), np.eye(4)])
        with pytest.raises(KindMismatch):
            run_row_stochastic(median4, seq, 1.0, -0.75, steps=2)


class TestPushSum:
    def test_identity_mixing(self, median4):
        a = MatrixSequence.constant(np.eye(4), "column")
        y0 = np.array([1.0, 2.0, 0.5, 4.0])
        w0 = median4.initial_states() * y0[:, None]
        for runner in (run_subgradient_push, run_push_first):
            traj = runner(median4, a, 1.0, -0.75, w0=w0, y0=y0, steps=30, snapshots="all")
            z = median4.initial_states().copy()
            for s in traj.snapshots:
                np.testing.assert_array_equal(s.state.y, y0)
                np.testing.assert_allclose(s.state.z, z, atol=1e-13)
                z = z - ((s.t + 1.0) ** -0.75 / y0)[:, None] * np.sign(z - median4.anchors)

    def test_doubly_matches_dgd_post(self, median4):
        a = MatrixSequence.constant(ring_metropolis(4), "doubly")
        sp = run_subgradient_push(median4, a, 1.0, -0.75, steps=200, snapshots="all")
        dp = run_dgd_post(median4, a, common_power(1.0, -0.75, 4), steps=200, snapshots="all")
        for s1, s2 in zip(sp.snapshots, dp.snapshots):
            np.testing.assert_allclose(s1.state.y, 1.0, atol=1e-14)
            np.testing.assert_allclose(s1.state.z, s2.state.x, atol=1e-12)

    def test_ratio_consensus_without_descent(self, median4, sep_p):
        a = MatrixSequence.constant(sep_p.T, "column")
        traj = run_push_first(median4, a, 0.0, -0.75, steps=400)
        z = traj.final.state.z
        assert np.abs(z - z[0]).max() <= 1e-8

    def test_mass_conservation(self, median4):
        a = MatrixSequence.seeded_random(4, "column", seed=5)
        y0 = np.array([1.0, 2.0, 3.0, 4.0])
        traj = run_subgradient_push(median4, a, 1.0, -0.75, y0=y0, steps=500, snapshots="every:50")
        for s in traj.snapshots:
            assert abs(s.state.y.sum() - 10.0) <= 1e-10

    def test_zero_row(self, median4):
        a = np.array([[1, .5, .5, 0], [0, 0, 0, 0], [0, .5, .5, 0], [0, 0, 0, 1.0]])
        with pytest.raises(NonpositiveMass):
            run_push_first(median4, MatrixSequence.constant(a, "column"), 1.0, -0.75, steps=3)

    def test_requires_column_kind(self, median4, sep_p):
        with pytest.raises(KindMismatch):
            run_push_first(median4, MatrixSequence.constant(sep_p), 1.0, -0.75, steps=1)


class TestEmbedding:
    def test_dgd_post_structure(self, median4, sep_p):
        inp = AlgorithmInputs(median4, seq=MatrixSequence.constant(sep_p),
                              schedule=common_power(1, -0.75, 4))
        emb = embed("dgd_post", inp, 10)
        assert emb.time_map(3) == 6 and emb.unified_steps == 20
        np.testing.assert_array_equal(emb.seq.at(4), np.eye(4))
        np.testing.assert_array_equal(emb.seq.at(5), sep_p)
        np.testing.assert_array_equal(emb.schedule.delta_at(4), np.full(4, 3.0 ** -0.75))
        np.testing.assert_array_equal(emb.schedule.delta_at(5), np.zeros(4))

    def test_row_stochastic_structure(self, median4, sep_p):
        inp = AlgorithmInputs(median4, seq=MatrixSequence.constant(sep_p), c=1, alpha=-0.75,
                              skip_until_positive=True)
        emb = embed("row_stochastic", inp, 10)
        z = np.diag(np.linalg.matrix_power(sep_p, 7))
        np.testing.assert_allclose(emb.schedule.delta_at(7), 8.0 ** -0.75 / z)
        assert emb.time_map(7) == 7

    def test_push_first_uses_next_mass(self, median4, sep_p):
        a = MatrixSequence.constant(sep_p.T, "column")
        inp = AlgorithmInputs(median4, a_seq=a, c=1, alpha=-0.75)
        emb = embed("push_first", inp, 10)
        y = np.ones(4)
        for _ in range(4):
            y = sep_p.T @ y
        np.testing.assert_allclose(emb.schedule.delta_at(3), 4.0 ** -0.75 / y)

    def test_unknown(self, median4):
        with pytest.raises(EmbeddingUnavailable):
            embed("gradient_tracking", AlgorithmInputs(median4), 5)

    @pytest.mark.parametrize("alg", ["dgd_post", "row_stochastic", "subgradient_push",
                                     "push_first", "unified", "dgd"])
    def test_verify(self, alg, sep_p):
        prob = L1MedianInstance.random(4, 2, seed=0)
        seq = (MatrixSequence.constant(ring_metropolis(4), "doubly") if alg == "dgd"
               else MatrixSequence.constant(sep_p))
        inp = AlgorithmInputs(prob, seq=seq, a_seq=MatrixSequence.seeded_random(4, "column", 3),
                              schedule=common_power(1, -0.75, 4), c=1, alpha=-0.75,
                              skip_until_positive=True)
        rep = verify_embedding(alg, inp, 300)
        assert rep.passed, rep

    def test_literal_table_index_does_not_reproduce(self, sep_p):
        """Dividing by y(t) instead of y(t+1) gives a different trajectory."""
        prob = L1MedianInstance.random(4, 2, seed=0)
        a = MatrixSequence.constant(sep_p.T, "column")
        steps = 100
        special = run_push_first(prob, a, 1, -0.75, steps=steps, diagnostics=False)
        induced = pushsum_induced_sequence(a, np.ones(4))
        ys = np.array([induced.mass(t) for t in range(steps + 1)])
        theta = (np.arange(steps) + 1.0) ** -0.75
        wrong = per_agent_explicit(theta[:, None] / ys[:steps])
        uni = run_unified(prob, induced, wrong, steps=steps, diagnostics=False)
        assert np.abs(uni.final.state.x - special.final.state.z).max() > 1e-3


class TestInvariants:
    def test_convex_combination_bounds(self, sep_p):
        prob = L1MedianInstance.random(4, 3, seed=8, scale=4.0)
        seq = MatrixSequence.constant(sep_p)
        ap = compute_abs_prob(seq, 1, check_A1(seq))
        sched = pi_scaled_power(1, -0.75, ap)
        traj = run_unified(prob, seq, sched, steps=200, snapshots="all", diagnostics=False)
        for prev, nxt in zip(traj.snapshots, traj.snapshots[1:]):
            step = sched.delta_at(prev.t).max() * prob.l_max
            x, y = prev.state.x, nxt.state.x
            assert (y >= x.min(axis=0) - step - 1e-12).all()
            assert (y <= x.max(axis=0) + step + 1e-12).all()

    def test_linear_state_bound(self, median4, sep_p):
        seq = MatrixSequence.constant(lazy(sep_p))
        traj = run_unified(median4, seq, common_power(1, -0.6, 4), steps=500, snapshots="all")
        x0 = np.abs(median4.initial_states()).sum(axis=1).max()
        acc = 0.0
        for s in traj.snapshots:
            assert np.abs(s.state.x).sum(axis=1).max() <= x0 + median4.l_max * acc + 1e-9
            assert s.diagnostics.state_norm <= s.diagnostics.state_bound + 1e-9
            acc += (s.t + 1.0) ** -0.6

    def test_determinism(self):
        prob = L1MedianInstance.random(6, 2, seed=1)
        seq = MatrixSequence.seeded_random(6, "doubly", seed=4)
        runs = [run_dgd(prob, seq, common_power(1, -0.75, 6), steps=300).to_csv()
                for _ in range(2)]
        assert runs[0] == runs[1]


def test_snapshot_times():
    assert snapshot_times(10) == {0, 1, 2, 4, 8, 10}
    assert snapshot_times(10, "every:4") == {0, 4, 8, 10}
    assert snapshot_times(3, "all") == {0, 1, 2, 3}
    with pytest.raises(ValueError):
        snapshot_times(3, "sometimes")


def test_trajectory_outputs(median4):
    seq = MatrixSequence.constant(uniform(4), "doubly")
    traj = run_dgd(median4, seq, common_power(1, -0.75, 4), steps=4)
    lines = traj.to_csv().strip().split("\n")
    assert lines[0] == "t,agent,coordinate,value"
    assert len(lines) == 1 + len(traj.times) * 4 * 2
    assert traj.times == sorted(set(traj.times))
    side = traj.sidecar()
    assert side["snapshots"] == 4 and side["diagnostics"]["t"] == 4
