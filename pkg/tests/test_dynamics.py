"""Field law, step bounding, and the iteration loop."""

import numpy as np
import pytest

from flockcn import Dataset, RunConfig
from flockcn.dynamics import (
    AgentState,
    DivergenceError,
    bounded_step,
    iterate,
    pairwise_field,
    total_field,
)
from flockcn.network import build_complex_network


def state_at(positions, initial=None):
    s = AgentState.from_positions(initial if initial is not None else positions)
    if initial is not None:
        s.current = np.array(positions, dtype=float)
    return s


class TestPairwiseField:
    def test_unit_gap_oracle(self):
        # d_t = d_0 = 1, degree 3: magnitude 3 / (1*1)^2 = 3, direction +x
        s = state_at([[0.0, 0.0], [1.0, 0.0]])
        f = pairwise_field(0, 1, s, degrees=np.array([1, 3]), theta=0.1)
        np.testing.assert_allclose(f, [3.0, 0.0], atol=1e-15)

    def test_zero_at_or_below_threshold(self):
        s = state_at([[0.0, 0.0], [0.1, 0.0]])
        f = pairwise_field(0, 1, s, degrees=np.array([1, 5]), theta=0.1)
        np.testing.assert_array_equal(f, [0.0, 0.0])

    def test_scales_with_degree(self):
        s = state_at([[0.0], [2.0]])
        f1 = pairwise_field(0, 1, s, degrees=np.array([1, 1]), theta=0.1)
        f4 = pairwise_field(0, 1, s, degrees=np.array([1, 4]), theta=0.1)
        np.testing.assert_allclose(f4, 4 * f1)

    def test_initial_distance_in_denominator(self):
        # same current gap, but started twice as far apart -> 1/4 the pull
        near = state_at([[0.0], [2.0]], initial=[[0.0], [2.0]])
        far = state_at([[0.0], [2.0]], initial=[[0.0], [4.0]])
        f_near = pairwise_field(0, 1, near, degrees=np.array([1, 1]), theta=0.1)
        f_far = pairwise_field(0, 1, far, degrees=np.array([1, 1]), theta=0.1)
        np.testing.assert_allclose(f_far, f_near / 4)

    def test_initial_distance_clamped_by_theta(self):
        # agents that started together use theta as their initial gap
        s = state_at([[0.0], [1.0]], initial=[[0.0], [0.0]])
        f = pairwise_field(0, 1, s, degrees=np.array([1, 2]), theta=0.5)
        np.testing.assert_allclose(f, [2 / (1.0 * 0.5) ** 2])

    def test_antisymmetric_direction(self):
        s = state_at([[0.0, 0.0], [1.0, 1.0]])
        deg = np.array([3, 3])
        f01 = pairwise_field(0, 1, s, deg, theta=0.1)
        f10 = pairwise_field(1, 0, s, deg, theta=0.1)
        np.testing.assert_allclose(f01, -f10)


class TestTotalField:
    def test_sums_only_declared_neighbors(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(size=(10, 2)) * 3
        net = build_complex_network(x, k=2, r=2, variant="flcn1")
        s = AgentState.from_positions(x)
        for i in range(10):
            want = sum(
                pairwise_field(i, int(j), s, net.degrees, 0.1)
                for j in net.all_neighbors(i)
            )
            np.testing.assert_allclose(total_field(i, net, s, 0.1), want, atol=1e-12)


class TestBoundedStep:
    def make_net(self):
        x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 3.0]])
        return x, build_complex_network(x, k=2, r=1, variant="flcn1")

    def test_cap_is_degree_weighted_mean_neighbor_distance(self):
        x, net = self.make_net()
        s = AgentState.from_positions(x)
        i = 0
        w = net.degrees[net.base.neighbors[i]].astype(float)
        want_cap = (w * net.base.distances[i]).sum() / w.sum()
        big = np.array([1e6, 0.0])
        alpha, length, step = bounded_step(i, big, net, s)
        assert length == pytest.approx(want_cap)
        assert alpha == pytest.approx(want_cap / 1e6)
        np.testing.assert_allclose(step, alpha * big)

    def test_alpha_oracle(self):
        # field of norm 10 against a cap of 2 -> alpha 0.2
        x, net = self.make_net()
        s = AgentState.from_positions(x)
        w = net.degrees[net.base.neighbors[0]].astype(float)
        cap = (w * net.base.distances[0]).sum() / w.sum()
        field = np.array([10.0, 0.0])
        alpha, length, _ = bounded_step(0, field, net, s)
        assert alpha == pytest.approx(cap / 10.0)
        assert length == pytest.approx(cap)

    def test_short_field_passes_through(self):
        x, net = self.make_net()
        s = AgentState.from_positions(x)
        tiny = np.array([1e-4, 0.0])
        alpha, length, step = bounded_step(0, tiny, net, s)
        assert alpha == 1.0
        assert length == pytest.approx(1e-4)
        np.testing.assert_array_equal(step, tiny)


class TestIterate:
    def blob_pair(self, seed=0, n=30):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((n // 2, 2)) * 0.05 + [0.2, 0.2]
        b = rng.standard_normal((n - n // 2, 2)) * 0.05 + [0.8, 0.8]
        return Dataset(points=np.vstack([a, b]), name="pair")

    def test_converges_and_reports(self):
        state, trace = iterate(self.blob_pair(), RunConfig(k=3, variant="flcn1", normalize=False))
        assert trace.converged
        assert trace.iterations == len(trace.totals_per_iteration)
        assert trace.iterations <= 100
        assert np.isfinite(state.current).all()

    def test_max_iters_respected(self):
        cfg = RunConfig(k=3, variant="flcn1", max_iters=2, normalize=False)
        _, trace = iterate(self.blob_pair(), cfg)
        assert trace.iterations <= 2

    def test_zero_motion_when_everything_within_theta(self):
        rng = np.random.default_rng(1)
        ds = Dataset(points=rng.uniform(size=(12, 2)) * 0.01, name="tight")
        cfg = RunConfig(k=3, variant="flcn1", theta=0.1, normalize=False)
        state, trace = iterate(ds, cfg)
        assert trace.converged and trace.iterations == 1
        assert trace.totals_per_iteration[0] == 0.0
        np.testing.assert_array_equal(state.current, ds.points)

    def test_step_lengths_never_exceed_caps(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            ds = Dataset(points=rng.uniform(size=(25, 2)), name="u")
            cfg = RunConfig(k=4, variant="flcn1", trace=True, normalize=False, max_iters=30)
            _, trace = iterate(ds, cfg)
            for rec in trace.step_records:
                assert (rec.per_agent_length <= rec.cap + 1e-12).all()

    def test_translation_equivariance(self):
        rng = np.random.default_rng(3)
        pts = rng.uniform(size=(20, 2))
        shift = np.array([13.0, -7.0])
        cfg = RunConfig(k=3, variant="flcn1", normalize=False, max_iters=20)
        s1, t1 = iterate(Dataset(points=pts, name="a"), cfg)
        s2, t2 = iterate(Dataset(points=pts + shift, name="b"), cfg)
        assert t1.iterations == t2.iterations
        assert np.abs((s2.current - shift) - s1.current).max() < 1e-9

    def test_synchronous_update_matches_per_agent_reference(self):
        # one traced step must equal the naive loop: total field per agent,
        # then the step bound, all against the *pre-update* positions
        rng = np.random.default_rng(7)
        pts = rng.uniform(size=(15, 2)) * 2
        ds = Dataset(points=pts, name="sync")
        cfg = RunConfig(k=3, r=2, variant="flcn1", theta=0.1, trace=True,
                        normalize=False, max_iters=1)
        state, trace = iterate(ds, cfg)
        net = build_complex_network(pts, k=3, r=2, variant="flcn1")
        ref = AgentState.from_positions(pts)
        for i in range(15):
            field = total_field(i, net, ref, 0.1)
            _, _, step = bounded_step(i, field, net, ref)
            np.testing.assert_allclose(state.current[i], pts[i] + step, atol=1e-10)

    def test_identical_runs_identical_trajectories(self):
        ds = self.blob_pair(seed=5)
        cfg = RunConfig(k=4, variant="flcn2", eta=0.3, normalize=False, trace=True)
        s1, t1 = iterate(ds, cfg)
        s2, t2 = iterate(ds, cfg)
        np.testing.assert_array_equal(s1.current, s2.current)
        assert t1.totals_per_iteration == t2.totals_per_iteration

    def test_frozen_pool_constant_across_iterations(self, monkeypatch):
        import flockcn.dynamics as dyn

        seen = []
        original = dyn.build_complex_network

        def spy(*args, **kwargs):
            net = original(*args, **kwargs)
            seen.append(net.candidate_set)
            return net

        monkeypatch.setattr(dyn, "build_complex_network", spy)
        ds = self.blob_pair(seed=2)
        iterate(ds, RunConfig(k=3, variant="flcn2", eta=0.3, normalize=False, max_iters=10))
        pools = [p for p in seen if p is not None]
        assert len(pools) >= 2
        for pool in pools[1:]:
            np.testing.assert_array_equal(pool, pools[0])

    def test_normalization_flag(self):
        # raw coordinates sit far outside the unit box; normalized runs
        # start inside it, so trajectories must differ
        pts = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0],
                        [5.0, 5.0], [2.0, 7.0]])
        on, _ = iterate(Dataset(points=pts, name="n"), RunConfig(k=2, variant="flcn1", max_iters=3))
        off, _ = iterate(Dataset(points=pts, name="n"), RunConfig(k=2, variant="flcn1", max_iters=3, normalize=False))
        assert on.current.max() <= 1.5
        assert off.current.shape == on.current.shape
        assert not np.allclose(on.current, off.current)

    def test_non_finite_input_rejected(self):
        ds = Dataset(points=np.array([[0.0, np.nan], [1.0, 2.0]]), name="bad")
        with pytest.raises(ValueError, match="impute"):
            iterate(ds, RunConfig(k=1))

    def test_untraced_run_has_no_snapshots(self):
        _, trace = iterate(self.blob_pair(), RunConfig(k=3, variant="flcn1", normalize=False))
        assert trace.snapshots is None and trace.step_records is None
        assert not trace.traced

    def test_traced_run_has_one_snapshot_per_iteration(self):
        cfg = RunConfig(k=3, variant="flcn1", trace=True, normalize=False)
        _, trace = iterate(self.blob_pair(), cfg)
        assert trace.traced
        assert len(trace.snapshots) == trace.iterations
        assert len(trace.step_records) == trace.iterations

    def test_initial_positions_are_frozen(self):
        s = AgentState.from_positions(np.zeros((3, 2)))
        with pytest.raises(ValueError):
            s.initial[0, 0] = 1.0
