import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frogz.classify import ProcessParams
from frogz.errors import OutOfRangeError, ResourceLimitError
from frogz.exact import partial_survival_product
from frogz.mc import (
    SimConfig,
    estimate_activation_profile,
    estimate_survival,
    run_trials,
    simulate_trial,
    wilson_interval,
)
from frogz.sequences import ConstantForm, single


def make_cfg(spec, N=1, L=1, horizon=50, trials=200, seed=7):
    return SimConfig(params=ProcessParams(N=N, L=L, spec=spec),
                     horizon=horizon, trials=trials, seed=seed)


class TestConfig:
    def test_horizon_must_exceed_lifetime(self, const_spec):
        with pytest.raises(OutOfRangeError):
            make_cfg(const_spec, L=5, horizon=5)

    def test_trials_positive(self, const_spec):
        with pytest.raises(OutOfRangeError):
            make_cfg(const_spec, trials=0)

    def test_budget_guard(self, const_spec):
        cfg = make_cfg(const_spec, trials=1000, horizon=1000)
        with pytest.raises(ResourceLimitError):
            run_trials(cfg, budget=10)

    def test_to_dict_round_trips_through_json(self, mod2_spec):
        cfg = make_cfg(mod2_spec, N=2, L=3, horizon=40)
        assert json.loads(json.dumps(cfg.to_dict())) == cfg.to_dict()


class TestWilson:
    def test_symmetric_at_half(self):
        lo, hi = wilson_interval(50, 100)
        assert lo == pytest.approx(1 - hi, abs=1e-12)
        assert lo < 0.5 < hi

    def test_contains_phat(self):
        for k, n in [(0, 10), (10, 10), (3, 17), (999, 1000)]:
            lo, hi = wilson_interval(k, n)
            eps = 1e-15
            assert 0.0 <= lo <= k / n + eps
            assert k / n - eps <= hi <= 1.0

    def test_narrows_with_n(self):
        w1 = np.diff(wilson_interval(5, 10))[0]
        w2 = np.diff(wilson_interval(500, 1000))[0]
        assert w2 < w1

    def test_wider_at_higher_level(self):
        w95 = np.diff(wilson_interval(30, 100, 0.95))[0]
        w99 = np.diff(wilson_interval(30, 100, 0.99))[0]
        assert w99 > w95


class TestDeterminism:
    def test_same_seed_same_result(self, mod2_spec):
        cfg = make_cfg(mod2_spec, N=2, L=2, horizon=30, trials=300)
        a = run_trials(cfg)
        b = run_trials(cfg)
        assert np.array_equal(a, b)

    def test_threads_do_not_change_result(self, mod2_spec):
        cfg = make_cfg(mod2_spec, N=2, L=2, horizon=30, trials=300)
        assert np.array_equal(run_trials(cfg, threads=1), run_trials(cfg, threads=3))

    def test_chunking_does_not_change_result(self, mod2_spec, monkeypatch):
        import frogz.mc as mc_mod
        cfg = make_cfg(mod2_spec, N=2, L=2, horizon=30, trials=97)
        baseline = run_trials(cfg)
        monkeypatch.setattr(mc_mod, "_CHUNK_ELEMENTS", 2000)
        assert np.array_equal(mc_mod.run_trials(cfg), baseline)

    def test_different_seeds_differ(self, const_spec):
        a = run_trials(make_cfg(const_spec, horizon=30, trials=500, seed=1))
        b = run_trials(make_cfg(const_spec, horizon=30, trials=500, seed=2))
        assert not np.array_equal(a, b)

    def test_single_trial_matches_batch(self, mod2_spec):
        cfg = make_cfg(mod2_spec, N=2, L=2, horizon=30, trials=20)
        batch = np.minimum(run_trials(cfg), cfg.horizon)
        for t in range(cfg.trials):
            h, active = simulate_trial(cfg.params, cfg.horizon, t, cfg.seed)
            assert h == batch[t]
            assert active == frozenset(range(1, max(active) + 1))


class TestPhysicality:
    def test_frontier_bounds(self, mod2_spec):
        cfg = make_cfg(mod2_spec, N=1, L=3, horizon=25, trials=400)
        fr = run_trials(cfg)
        assert np.all(fr >= 1)
        assert np.all(fr <= cfg.horizon + cfg.params.L)

    def test_tiny_left_prob_reaches_horizon(self):
        spec = single(ConstantForm(q=1e-9))
        cfg = make_cfg(spec, N=1, L=2, horizon=20, trials=50)
        assert np.all(run_trials(cfg) >= cfg.horizon)

    def test_huge_left_prob_stalls(self):
        spec = single(ConstantForm(q=1 - 1e-9))
        cfg = make_cfg(spec, N=1, L=3, horizon=20, trials=50)
        assert np.all(run_trials(cfg) == 1)

    def test_coupled_monotone_in_N(self, sqrt_spec):
        for t in range(30):
            prev = 0
            for N in (1, 2, 3, 4):
                h, _ = simulate_trial(ProcessParams(N=N, L=2, spec=sqrt_spec), 40, t, 99)
                assert h >= prev
                prev = h

    def test_coupled_monotone_in_L(self, sqrt_spec):
        for t in range(30):
            prev = 0
            for L in (1, 2, 3, 4):
                h, _ = simulate_trial(ProcessParams(N=1, L=L, spec=sqrt_spec), 40, t, 99)
                assert h >= prev
                prev = h


class TestEstimates:
    def test_survival_matches_product(self, inv_square_spec):
        # exact survival-to-horizon P(E_M) within CI of the truncated product
        cfg = make_cfg(inv_square_spec, horizon=200, trials=4000, seed=11)
        res = estimate_survival(cfg)
        exact_p = partial_survival_product(inv_square_spec, 1, 1, cfg.horizon + 50)
        assert res.ci_low - 0.02 <= exact_p <= res.ci_high + 0.02

    def test_site_counts_consistent(self, mod2_spec):
        cfg = make_cfg(mod2_spec, N=1, L=2, horizon=30, trials=500)
        res = estimate_survival(cfg)
        counts = res.site_counts
        assert counts.shape == (cfg.horizon,)
        assert counts[0] == cfg.trials              # site 1 is always active
        assert np.all(np.diff(counts) <= 0)         # E_i is nested
        assert counts[-1] == res.survival_count

    def test_aggregate_serializes(self, mod2_spec):
        cfg = make_cfg(mod2_spec, N=1, L=2, horizon=30, trials=100)
        line = estimate_survival(cfg).to_jsonl()
        payload = json.loads(line)
        assert payload["result"]["trials"] == 100
        assert 0 <= payload["result"]["p_hat"] <= 1

    def test_profile_dominates_lower_curve(self, inv_square_spec):
        cfg = make_cfg(inv_square_spec, horizon=80, trials=3000, seed=3)
        prof = estimate_activation_profile(cfg)
        assert prof.p_hat[0] == 1.0
        for i in range(cfg.horizon):
            lb = prof.lower_curve[i]
            if not math.isnan(lb):
                assert prof.p_hat[i] >= lb - prof.ci_half[i] - 1e-12

    def test_profile_nonincreasing(self, mod2_spec):
        cfg = make_cfg(mod2_spec, N=2, L=2, horizon=40, trials=2000, seed=5)
        prof = estimate_activation_profile(cfg)
        assert np.all(np.diff(prof.p_hat) <= 1e-12)

    @given(seed=st.integers(0, 2**32), trials=st.integers(1, 64))
    @settings(max_examples=25, deadline=None)
    def test_phat_consistent_with_counts(self, seed, trials):
        cfg = make_cfg(single(ConstantForm(q=0.5)), horizon=10, trials=trials, seed=seed)
        res = estimate_survival(cfg)
        assert res.p_hat == res.survival_count / trials
        assert res.ci_low - 1e-15 <= res.p_hat <= res.ci_high + 1e-15
