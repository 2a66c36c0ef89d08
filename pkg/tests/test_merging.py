import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyto.errors import ConfigError, InputError, ScheduleError, ValidationError
from dyto.merging import (
    MatchSet,
    MergeSchedule,
    TokenSet,
    bipartite_match,
    compress_frame,
    head_similarity,
    merge_matched,
    plan_budget,
)
from dyto.oracles import exhaustive_match_oracle
from dyto.rng import CounterRng

from helpers import naive_head_similarity, random_token_set


class TestHeadSimilarity:
    def test_self_similarity_is_one(self):
        v = CounterRng(1).gaussians(0, 8)
        assert head_similarity(v, v, 2) == pytest.approx(1.0, abs=1e-12)

    def test_half_matching_heads(self):
        assert head_similarity((1, 0, 0, 1), (1, 0, 1, 0), 2) == pytest.approx(0.5)

    def test_orthogonal_in_every_head(self):
        assert head_similarity((1, 0, 0, 1), (0, 1, 1, 0), 2) == pytest.approx(0.0)

    def test_symmetric_and_scale_invariant(self):
        a = CounterRng(2).gaussians(0, 12)
        b = CounterRng(3).gaussians(0, 12)
        s = head_similarity(a, b, 3)
        assert head_similarity(b, a, 3) == pytest.approx(s, abs=1e-12)
        assert head_similarity(a * 7.5, b, 3) == pytest.approx(s, abs=1e-12)
        assert head_similarity(a, b * 0.001, 3) == pytest.approx(s, abs=1e-12)

    def test_heads_must_divide_dim(self):
        with pytest.raises(ConfigError, match="does not divide"):
            head_similarity((1.0, 2.0, 3.0), (1.0, 2.0, 3.0), 2)

    def test_zero_norm_head_named(self):
        with pytest.raises(ValidationError, match="head slice 1"):
            head_similarity((1.0, 1.0, 0.0, 0.0), (1.0, 1.0, 1.0, 1.0), 2)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10_000), heads=st.sampled_from([1, 2, 4]), d_per=st.integers(1, 6))
    def test_matches_naive_reference(self, seed, heads, d_per):
        d = heads * d_per
        vals = CounterRng(seed).gaussians(0, 2 * d)
        a, b = vals[:d], vals[d:]
        got = head_similarity(a, b, heads)
        assert got == pytest.approx(naive_head_similarity(a, b, heads), abs=1e-6)
        assert -1.0 - 1e-12 <= got <= 1.0 + 1e-12


WORKED_TOKENS = np.array([(1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.6, 0.8)])


class TestBipartiteMatch:
    def test_worked_instance_top1(self):
        m = bipartite_match(TokenSet.fresh(WORKED_TOKENS), r=1, heads=1)
        assert [(p, q) for p, q, _ in m.pairs] == [(0, 1)]
        assert m.pairs[0][2] == pytest.approx(1.0)

    def test_worked_instance_top2(self):
        m = bipartite_match(TokenSet.fresh(WORKED_TOKENS), r=2, heads=1)
        assert [(p, q) for p, q, _ in m.pairs] == [(0, 1), (2, 3)]
        assert m.pairs[1][2] == pytest.approx(0.8)

    def test_two_identical_tokens(self):
        m = bipartite_match(TokenSet.fresh(np.ones((2, 4))), r=1, heads=2)
        assert [(p, q) for p, q, _ in m.pairs] == [(0, 1)]
        assert m.pairs[0][2] == pytest.approx(1.0)

    def test_r_above_half_rejected(self):
        with pytest.raises(ScheduleError):
            bipartite_match(TokenSet.fresh(np.ones((4, 2))), r=3, heads=1)

    def test_single_token_rejected(self):
        with pytest.raises(InputError):
            bipartite_match(TokenSet.fresh(np.ones((1, 2))), r=0, heads=1)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10_000), count=st.integers(2, 12), heads=st.sampled_from([1, 2, 4]))
    def test_matches_oracle_for_all_valid_r(self, seed, count, heads):
        tokens = random_token_set(seed, count, 8)
        for r in range(count // 2 + 1):
            fast = bipartite_match(tokens, r, heads)
            slow = exhaustive_match_oracle(tokens, r, heads)
            assert [(p, q) for p, q, _ in fast.pairs] == [(p, q) for p, q, _ in slow.pairs]
            for (_, _, sa), (_, _, sb) in zip(fast.pairs, slow.pairs):
                assert sa == pytest.approx(sb, abs=1e-9)


class TestMergeMatched:
    def test_identical_tokens_merge(self):
        t = TokenSet.fresh(np.array([(1.0, 0.0), (1.0, 0.0)]))
        out = merge_matched(t, bipartite_match(t, 1, 1))
        assert out.count == 1
        assert np.allclose(out.values[0], (1.0, 0.0))
        assert out.sizes.tolist() == [2]
        assert out.provenance == [frozenset({0, 1})]

    def test_size_weighted_mean(self):
        t = TokenSet(
            values=np.array([(1.0, 0.0), (0.0, 1.0)]),
            sizes=np.array([1, 3], dtype=np.int64),
            provenance=[frozenset({0}), frozenset({1, 2, 3})],
        )
        out = merge_matched(t, MatchSet(pairs=[(0, 1, 1.0)]))
        assert np.allclose(out.values[0], (0.25, 0.75))
        assert out.sizes.tolist() == [4]

    def test_empty_match_is_identity(self):
        t = random_token_set(5, 6, 4)
        out = merge_matched(t, MatchSet(pairs=[]))
        assert np.array_equal(out.values, t.values)
        assert out.provenance == t.provenance

    def test_survivors_keep_original_order(self):
        t = TokenSet.fresh(np.array([(1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.6, 0.8)]))
        out = merge_matched(t, bipartite_match(t, 1, 1))
        # p=0 disappears; survivors are old positions 1,2,3
        assert out.count == 3
        assert np.allclose(out.values[1], (0.0, 1.0))
        assert out.provenance[0] == frozenset({0, 1})


class TestPlanBudget:
    def test_full_scale_single_step(self):
        s = plan_budget(577, 3680, 10, 288)
        assert (s.start_count, s.target, s.merges) == (576, 368, [208])

    def test_full_scale_three_steps(self):
        s = plan_budget(577, 3680, 30, 288)
        assert s.target == 122
        assert s.merges == [288, 144, 22]

    def test_budget_exceeds_tokens_no_merging(self):
        s = plan_budget(577, 10**9, 1, 288)
        assert (s.target, s.merges) == (576, [])

    def test_budget_below_clusters_rejected(self):
        with pytest.raises(ConfigError, match="below the cluster count"):
            plan_budget(577, 5, 6, 288)

    @settings(max_examples=60, deadline=None)
    @given(
        tokens=st.integers(2, 700),
        budget=st.integers(1, 8000),
        clusters=st.integers(1, 64),
        cap=st.integers(1, 300),
    )
    def test_schedule_invariants(self, tokens, budget, clusters, cap):
        if budget < clusters:
            with pytest.raises(ConfigError):
                plan_budget(tokens, budget, clusters, cap)
            return
        s = plan_budget(tokens, budget, clusters, cap)
        assert s.target == min(tokens - 1, budget // clusters)
        assert sum(s.merges) == s.start_count - s.target
        remaining = s.start_count
        for i, r in enumerate(s.merges):
            assert 1 <= r <= remaining // 2
            if i == 0:
                assert r <= cap
            remaining -= r
        assert remaining == s.target

    def test_infeasible_schedule_rejected(self):
        with pytest.raises(ScheduleError):
            MergeSchedule(start_count=4, target=1, merges=[3], heads=1)
        with pytest.raises(ScheduleError):
            MergeSchedule(start_count=4, target=2, merges=[1], heads=1)


class TestCompressFrame:
    def test_empty_schedule_is_identity(self):
        values = CounterRng(4).gaussians(0, 6 * 4).reshape(6, 4)
        s = MergeSchedule(start_count=6, target=6, merges=[], heads=2)
        out = compress_frame(values, s)
        assert np.array_equal(out.tokens.values, values.astype(np.float32))
        assert out.tokens.sizes.tolist() == [1] * 6
        assert out.tokens.provenance == [frozenset({i}) for i in range(6)]

    def test_worked_instance_one_merge(self):
        s = MergeSchedule(start_count=4, target=3, merges=[1], heads=1)
        out = compress_frame(WORKED_TOKENS, s)
        assert out.tokens.count == 3
        assert sorted(out.tokens.sizes.tolist()) == [1, 1, 2]
        out.tokens.validate()

    def test_count_follows_schedule(self):
        values = CounterRng(9).gaussians(0, 36 * 8).reshape(36, 8)
        s = plan_budget(37, 36, 3, 288, heads=2)
        out = compress_frame(values, s)
        assert out.tokens.count == s.target == 12
        out.tokens.validate()

    def test_dimension_mismatch_rejected(self):
        s = MergeSchedule(start_count=4, target=4, merges=[], heads=1)
        with pytest.raises(InputError):
            compress_frame(np.ones((3, 2)), s)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000), count=st.integers(4, 40))
    def test_conservation_and_provenance(self, seed, count):
        values = CounterRng(seed).gaussians(0, count * 8).reshape(count, 8)
        target = max(1, count // 3)
        s = plan_budget(count + 1, target, 1, 288, heads=2)
        out = compress_frame(values, s)
        out.tokens.validate()
        weighted = (out.tokens.values.astype(np.float64) * out.tokens.sizes[:, None]).sum(axis=0)
        assert np.abs(weighted - values.sum(axis=0)).max() < 1e-4

    def test_duplicate_tokens_merge_losslessly(self):
        base = CounterRng(21).gaussians(0, 4 * 6).reshape(4, 6).astype(np.float32)
        values = np.repeat(base, 2, axis=0)  # adjacent duplicates split into P/Q
        s = MergeSchedule(start_count=8, target=4, merges=[4], heads=2)
        out = compress_frame(values, s)
        assert out.tokens.count == 4
        assert np.array_equal(np.sort(out.tokens.values, axis=0), np.sort(base, axis=0))
        assert out.tokens.sizes.tolist() == [2, 2, 2, 2]

    def test_deterministic_bitwise(self):
        values = CounterRng(13).gaussians(0, 30 * 8).reshape(30, 8)
        s = plan_budget(31, 10, 1, 288, heads=4)
        a = compress_frame(values, s, keep_steps=True)
        b = compress_frame(values, s, keep_steps=True)
        assert a.tokens.values.tobytes() == b.tokens.values.tobytes()
        assert a.steps == b.steps


class TestOracleGuards:
    def test_r_zero_empty(self):
        assert exhaustive_match_oracle(random_token_set(1, 6, 4), 0, 2).pairs == []

    def test_token_limit(self):
        with pytest.raises(InputError, match="limited"):
            exhaustive_match_oracle(random_token_set(1, 18, 4), 1, 2)

    def test_worked_instance(self):
        m = exhaustive_match_oracle(TokenSet.fresh(WORKED_TOKENS), 1, 1)
        assert [(p, q) for p, q, _ in m.pairs] == [(0, 1)]
        assert m.pairs[0][2] == pytest.approx(1.0)
