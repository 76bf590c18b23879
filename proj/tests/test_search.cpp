#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "swamp/generate.hpp"
#include "swamp/oracle.hpp"
#include "swamp/search.hpp"
#include "test_support.hpp"

using namespace swamp;

namespace {

  SearchStats without_timings(SearchStats s) {
    s.seed_seconds = s.phase_one_seconds = s.phase_two_seconds = 0;
    for (auto& l : s.levels) { l.seconds = 0; }
    return s;
  }

  void expect_matches_oracle(const TimeSeries& ts, const SearchConfig& cfg, const std::string& label) {
    const auto truth = oracle::brute_force_motif(ts, cfg);
    const auto got = swamp_search(ts, cfg);
    EXPECT_EQ(got.first, truth.first) << label;
    EXPECT_EQ(got.second, truth.second) << label;
    EXPECT_NEAR(got.distance, truth.distance, 1e-9) << label;
  }

} // namespace

TEST(TieFrontier, KeepsSmallestPairWithinEpsilon) {
  TieFrontier f;
  f.add(5, 20, 1.0);
  f.add(3, 30, 2.0);
  f.add(1, 40, 1.0 + 1e-12);
  f.add(7, 9, 0.5);
  ASSERT_NE(f.select(0.5, 1e-9), nullptr);
  EXPECT_EQ(f.select(0.5, 1e-9)->first, 7u);
  // Had the minimum been 1.0, (1, 40) would win the tie.
  EXPECT_EQ(f.select(1.0, 1e-9)->first, 1u);
  EXPECT_EQ(f.select(1.0, 0.0)->first, 5u);
  EXPECT_EQ(f.select(0.1, 0.0), nullptr);
}

TEST(TieFrontier, PairOrderIsNormalizedAndDominatedEntriesDropped) {
  TieFrontier f;
  f.add(20, 5, 1.0);
  EXPECT_EQ(f.select(1.0, 0)->first, 5u);
  EXPECT_EQ(f.select(1.0, 0)->second, 20u);
  f.add(6, 30, 3.0);   // dominated by (5, 20)
  EXPECT_EQ(f.size(), 1u);
  f.add(2, 30, 0.5);   // dominates (5, 20)
  EXPECT_EQ(f.size(), 1u);
  f.add(5, 20, 0.25);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.select(0.25, 0)->first, 5u);
}

TEST(TieFrontier, AgreesWithExhaustiveSelection) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> idx(0, 30);
  std::uniform_int_distribution<int> level(0, 5);
  for (int t = 0; t < 300; ++t) {
    TieFrontier f;
    std::vector<TieFrontier::Entry> all;
    for (int k = 0; k < 40; ++k) {
      std::size_t i = idx(rng), j = idx(rng);
      if (i == j) { continue; }
      const double d = level(rng) * 0.5;
      f.add(i, j, d);
      all.push_back({std::min(i, j), std::max(i, j), d});
    }
    double best = POSITIVE_INFINITY;
    for (const auto& e : all) { best = std::min(best, e.distance); }
    for (const double eps : {0.0, 0.6}) {
      const TieFrontier::Entry* want = nullptr;
      for (const auto& e : all) {
        if (e.distance <= best + eps
            && (want == nullptr || std::make_pair(e.first, e.second) < std::make_pair(want->first, want->second))) {
          want = &e;
        }
      }
      const auto* got = f.select(best, eps);
      ASSERT_NE(got, nullptr);
      ASSERT_EQ(got->first, want->first);
      ASSERT_EQ(got->second, want->second);
    }
  }
}

TEST(LevelSchedule, HalvesDownToOne) {
  EXPECT_EQ(detail::level_schedule(100, Normalization::raw), (std::vector<std::size_t>{100, 50, 25, 12, 6, 3, 1}));
  EXPECT_EQ(detail::level_schedule(100, Normalization::znorm), (std::vector<std::size_t>{1}));
}

TEST(ComputeDsmp, PlantedDuplicateIsFoundBySeed) {
  const auto planted = planted_motif(600, 30, 3, 0.0);
  const SearchConfig cfg{.length = 30, .window = 3};
  const auto state = compute_dsmp(planted.series, cfg);
  EXPECT_EQ(state.best_so_far, 0.0);
  EXPECT_EQ(state.stats.seed_dtw_calls, 1u);
  EXPECT_EQ(state.stats.levels.size(), detail::level_schedule(30, Normalization::raw).size());
}

TEST(ComputeDsmp, BestSoFarNeverBelowTruthAndNonIncreasing) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const TimeSeries ts(fixtures::walk(300, rng));
    const SearchConfig cfg{.length = 20, .window = 2};
    const auto truth = oracle::brute_force_motif(ts, cfg);
    const auto state = compute_dsmp(ts, cfg);
    EXPECT_GE(state.best_so_far, truth.distance - 1e-9);
    double prev = POSITIVE_INFINITY;
    for (const auto& l : state.stats.levels) {
      EXPECT_LE(l.best_so_far, prev);
      prev = l.best_so_far;
    }
    for (const auto& r : state.audit) { EXPECT_GT(r.bound, r.best_so_far + cfg.epsilon); }
  }
}

TEST(ComputeDsmp, SingleLegalPair) {
  std::mt19937_64 rng(5);
  const TimeSeries ts(fixtures::walk(16, rng));
  const SearchConfig cfg{.length = 8, .window = 1};
  const auto result = swamp_search(ts, cfg);
  EXPECT_EQ(result.first, 0u);
  EXPECT_EQ(result.second, 8u);
  EXPECT_NEAR(result.distance, dtw(ts.subsequence(0, 8), ts.subsequence(8, 8), 1), 1e-12);
  EXPECT_EQ(result.stats.total_pairs, 1u);
}

TEST(SwampSearch, MatchesBruteForceRaw) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 12; ++t) {
    const std::size_t len = 12 + 4 * (t % 4);
    const std::size_t w = t % 5;
    const TimeSeries ts(fixtures::walk(250 + 10 * t, rng));
    expect_matches_oracle(ts, {.length = len, .window = w}, "walk " + std::to_string(t));
  }
  for (int t = 0; t < 6; ++t) {
    const auto p = planted_motif(400, 25, 100 + t, 0.1 * t);
    expect_matches_oracle(p.series, {.length = 25, .window = 3}, "planted " + std::to_string(t));
  }
}

TEST(SwampSearch, MatchesBruteForceZnorm) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 8; ++t) {
    auto v = fixtures::walk(260, rng);
    if (t % 2 == 1) {
      for (std::size_t k = 60; k < 90; ++k) { v[k] = 2.0; }
    }
    expect_matches_oracle(TimeSeries(v), {.length = 16, .window = 2, .normalization = Normalization::znorm},
                          "znorm " + std::to_string(t));
  }
}

TEST(SwampSearch, QuantizedValuesWithManyTies) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> level(0, 2);
  for (int t = 0; t < 6; ++t) {
    std::vector<double> v(200);
    for (auto& x : v) { x = level(rng); }
    expect_matches_oracle(TimeSeries(v), {.length = 8, .window = 2}, "ties " + std::to_string(t));
  }
}

TEST(SwampSearch, ExactDuplicateHasZeroDistance) {
  const auto p = planted_motif(1000, 40, 9, 0.0);
  const auto result = swamp_search(p.series, {.length = 40, .window = 4});
  EXPECT_EQ(result.distance, 0.0);
  EXPECT_EQ(result.first, std::min(p.source, p.copy));
  EXPECT_EQ(result.second, std::max(p.source, p.copy));
}

TEST(SwampSearch, ZeroWindowIsEuclideanMotif) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 5; ++t) {
    const TimeSeries ts(fixtures::walk(500, rng));
    const auto ed = ed_matrix_profile(ts, 24, Normalization::raw);
    const double best = *std::min_element(ed.distances.begin(), ed.distances.end());
    const auto result = swamp_search(ts, {.length = 24, .window = 0});
    EXPECT_NEAR(result.distance, best, 1e-9);
  }
}

TEST(SwampSearch, ShuffledOuterLoopGivesSameAnswer) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    const TimeSeries ts(fixtures::walk(400, rng));
    const SearchConfig cfg{.length = 20, .window = 3};
    const auto ordered = swamp_search(ts, cfg);
    SearchOptions opts;
    opts.shuffle_outer = true;
    opts.shuffle_seed = 1000 + t;
    const auto shuffled = swamp_search(ts, cfg, opts);
    EXPECT_EQ(shuffled.first, ordered.first);
    EXPECT_EQ(shuffled.second, ordered.second);
    EXPECT_EQ(shuffled.distance, ordered.distance);
  }
}

TEST(SwampSearch, NoQualifyingPairHasAPrunedEndpoint) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 4; ++t) {
    const TimeSeries ts(fixtures::walk(300, rng));
    const SearchConfig cfg{.length = 16, .window = 2};
    auto state = compute_dsmp(ts, cfg);
    const auto result = refine(ts, cfg, state);
    const auto mp = oracle::brute_force_dtw_mp(ts, cfg);
    for (std::size_t i = 0; i < mp.distances.size(); ++i) {
      if (mp.distances[i] <= result.distance + cfg.epsilon) {
        EXPECT_FALSE(state.pruned[i]) << "position " << i << " holds a motif-quality pair but was pruned";
      }
    }
    for (const auto& r : state.audit) { EXPECT_GT(r.bound, r.best_so_far + cfg.epsilon); }
  }
}

TEST(SearchStats, Accounting) {
  std::mt19937_64 rng(13);
  const TimeSeries ts(fixtures::walk(800, rng));
  const SearchConfig cfg{.length = 32, .window = 3};
  const auto r = swamp_search(ts, cfg);
  const auto& s = r.stats;
  EXPECT_EQ(s.positions, 800u - 32 + 1);
  EXPECT_EQ(s.total_pairs, nontrivial_pair_count(800, 32));
  std::size_t pruned = 0;
  for (const auto& l : s.levels) { pruned += l.newly_pruned; }
  EXPECT_EQ(pruned, s.pruned_before_phase_two);
  EXPECT_DOUBLE_EQ(s.pruned_fraction, static_cast<double>(pruned) / static_cast<double>(s.positions));
  EXPECT_LE(s.phase_two_dtw_calls, s.phase_two_keogh_calls);
  EXPECT_LE(s.phase_two_keogh_calls, s.phase_two_kim_calls);
  EXPECT_EQ(s.phase_two_kim_calls, s.cascade_pairs);
  EXPECT_EQ(s.total_dtw_calls(), s.seed_dtw_calls + s.confirmation_dtw_calls + s.phase_two_dtw_calls);
  EXPECT_LE(static_cast<double>(s.cascade_pairs), s.predicted_pair_bound() + static_cast<double>(s.levels.size()));
}

TEST(SearchStats, ConstantSeriesPrunesNothing) {
  const TimeSeries ts(std::vector<double>(100, 1.5));
  const auto r = swamp_search(ts, {.length = 10, .window = 2});
  EXPECT_EQ(r.distance, 0.0);
  EXPECT_EQ(r.first, 0u);
  EXPECT_EQ(r.second, 10u);
  EXPECT_EQ(r.stats.pruned_before_phase_two, 0u);
  EXPECT_EQ(r.stats.pruned_fraction, 0.0);
}

TEST(SwampSearch, IndependentOfThreadCount) {
  const auto p = planted_motif(3000, 64, 14, 0.2);
  for (const auto mode : {Normalization::raw, Normalization::znorm}) {
    const SearchConfig cfg{.length = 64, .window = 6, .normalization = mode};
    SearchOptions one, many;
    many.threads = 8;
    const auto a = swamp_search(p.series, cfg, one);
    const auto b = swamp_search(p.series, cfg, many);
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
    EXPECT_EQ(a.distance, b.distance);
    EXPECT_EQ(without_timings(a.stats), without_timings(b.stats));
  }
}

TEST(SwampSearch, RejectsInvalidConfig) {
  const TimeSeries ts(std::vector<double>(50, 0.0));
  EXPECT_THROW((void)swamp_search(ts, {.length = 30, .window = 2}), std::invalid_argument);
  EXPECT_THROW((void)swamp_search(ts, {.length = 10, .window = 10}), std::invalid_argument);
}
