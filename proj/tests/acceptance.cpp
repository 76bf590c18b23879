// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "swamp.hpp"
#include "swamp/cli.hpp"

using namespace swamp;

namespace {

  struct Verdict {
    bool pass = true;
    std::string detail;
  };

  /// Every search run anywhere in the suite, checked against the pair-count arithmetic afterwards.
  struct PairCountLog {
    std::size_t runs = 0;
    std::size_t violations = 0;
    double worst_ratio = 0;  // cascade / ((1-p)^2 total + levels)

    void record(const SearchStats& s) {
      ++runs;
      const double allowed = s.predicted_pair_bound() + static_cast<double>(s.levels.size());
      const double used = static_cast<double>(s.cascade_pairs);
      if (used > allowed) { ++violations; }
      if (allowed > 0) { worst_ratio = std::max(worst_ratio, used / allowed); }
    }
  };

  PairCountLog pair_log;

  MotifResult search(const TimeSeries& ts, const SearchConfig& cfg, const SearchOptions& opts = {}) {
    auto r = swamp_search(ts, cfg, opts);
    pair_log.record(r.stats);
    return r;
  }

  double seconds_of(const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
  }

  // 1 -----------------------------------------------------------------------------------------------------------
  Verdict exactness() {
    const SearchConfig cfg{.length = 50, .window = 5};
    std::size_t mismatches = 0, runs = 0;
    double worst = 0;
    std::string first_bad;
    auto check = [&](const TimeSeries& ts, const std::string& label) {
      const auto truth = oracle::brute_force_motif(ts, cfg);
      const auto got = search(ts, cfg);
      ++runs;
      const double diff = std::abs(got.distance - truth.distance);
      worst = std::max(worst, diff);
      if (got.first != truth.first || got.second != truth.second || !(diff <= 1e-9)) {
        ++mismatches;
        if (first_bad.empty()) {
          first_bad = fmt(" first mismatch %s: got (%zu,%zu,%.12g) want (%zu,%zu,%.12g)", label.c_str(), got.first,
                          got.second, got.distance, truth.first, truth.second, truth.distance);
        }
      }
    };
    for (std::uint64_t s = 0; s < 50; ++s) { check(random_walk(2000, 1000 + s), "random-walk seed " + std::to_string(1000 + s)); }
    const double noises[] = {0.0, 0.05, 0.2};
    for (std::uint64_t s = 0; s < 50; ++s) {
      const double noise = noises[s % 3];
      check(planted_motif(2000, 50, 2000 + s, noise).series, fmt("planted seed %llu noise %g", 2000 + s, noise));
    }
    return {mismatches == 0, fmt("%zu/%zu instances identical, max |distance diff| %.3g", runs - mismatches, runs, worst)
                               + first_bad};
  }

  // 2 -----------------------------------------------------------------------------------------------------------
  Verdict bound_chain() {
    const std::size_t len = 128, w = 8, pairs = 10'000;
    const std::vector<std::size_t> factors{2, 4, 8, 16, 32, 64, 128};
    std::mt19937_64 rng(42);
    std::size_t sampled = 0, kim = 0, keogh = 0, paa_v = 0, ed = 0;
    DtwWorkspace ws;
    std::uint64_t series_seed = 500;
    while (sampled < pairs) {
      const TimeSeries ts = random_walk(4096, series_seed++);
      std::uniform_int_distribution<std::size_t> pick(0, ts.size() - len);
      for (int k = 0; k < 500 && sampled < pairs; ++k) {
        const std::size_t i = pick(rng), j = pick(rng);
        if ((i > j ? i - j : j - i) < len) { continue; }
        ++sampled;
        const auto a = ts.subsequence(i, len);
        const auto b = ts.subsequence(j, len);
        const double d = dtw(a, b, w, POSITIVE_INFINITY, ws);
        const double slack = 1e-9;
        if (lb_kim_fl(a, b) > d + slack) { ++kim; }
        const auto env = compute_envelope(a, w);
        if (lb_keogh(env, b) > d + slack) { ++keogh; }
        for (const auto f : factors) {
          const auto [u, l] = downsampled_envelope(env, f);
          if (lb_keogh_paa(u, l, paa(b, f)) > d + slack) { ++paa_v; }
        }
        if (d > euclidean(a, b) + slack) { ++ed; }
      }
    }
    const std::size_t total = kim + keogh + paa_v + ed;
    return {total == 0, fmt("%zu pairs; violations kim=%zu keogh=%zu paa=%zu dtw>ed=%zu", sampled, kim, keogh, paa_v, ed)};
  }

  // 3 -----------------------------------------------------------------------------------------------------------
  Verdict tightness_spectrum() {
    const SearchConfig cfg{.length = 128, .window = 8};
    BenchOptions opts;
    opts.pairs = 1000;
    opts.seed = 7;
    opts.trials = 9;
    opts.min_trial_seconds = 0.02;
    const auto result = bench_lb(random_walk(20'000, 77), cfg, opts);
    // rows: lb_kim_fl, lb_keogh coarse -> fine, dtw
    bool ok = result.pairs_used >= 1000;
    std::ostringstream os;
    os << result.pairs_used << " pairs;";
    for (std::size_t r = 1; r < result.rows.size(); ++r) {
      const auto& row = result.rows[r];
      os << fmt(" %s t=%.3f %.3gs", row.name.c_str(), row.mean_tightness, row.mean_seconds);
      if (!(row.mean_tightness > 0.0 && row.mean_tightness <= 1.0)) { ok = false; }
      if (r > 1) {
        const auto& prev = result.rows[r - 1];
        // Finer factor (or DTW) must be at least as tight and at least as costly.
        if (row.mean_tightness < prev.mean_tightness) {
          ok = false;
          os << " [tightness drop]";
        }
        if (row.mean_seconds < prev.mean_seconds) {
          ok = false;
          os << " [time drop]";
        }
      }
    }
    return {ok, os.str()};
  }

  // 4 -----------------------------------------------------------------------------------------------------------
  Verdict pruning_power() {
    const auto p = planted_motif(50'000, 200, 4, 0.05);
    const auto r = search(p.series, {.length = 200, .window = 10});
    const auto& s = r.stats;
    const double share = static_cast<double>(s.total_dtw_calls()) / static_cast<double>(s.total_pairs);
    const bool counters_consistent =
      s.total_dtw_calls() == s.seed_dtw_calls + s.confirmation_dtw_calls + s.phase_two_dtw_calls
      && s.total_pairs == nontrivial_pair_count(50'000, 200);
    return {counters_consistent && share <= 0.01,
            fmt("%llu DTW calls of %llu pairs (%.4g%%), p=%.6f, motif (%zu,%zu) d=%.6g",
                static_cast<unsigned long long>(s.total_dtw_calls()), static_cast<unsigned long long>(s.total_pairs),
                100 * share, s.pruned_fraction, r.first, r.second, r.distance)};
  }

  // 6 -----------------------------------------------------------------------------------------------------------
  Verdict zero_window() {
    std::size_t bad = 0;
    double worst = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const TimeSeries ts = s % 2 == 0 ? random_walk(1500, 300 + s) : planted_motif(1500, 40, 300 + s, 0.1).series;
      const SearchConfig cfg{.length = 40, .window = 0};
      const auto ed = ed_matrix_profile(ts, 40, Normalization::raw);
      const double ed_best = *std::min_element(ed.distances.begin(), ed.distances.end());
      // Independent check on the ED motif itself: the exhaustive w = 0 profile.
      const auto exhaustive = oracle::brute_force_motif(ts, cfg);
      const auto got = search(ts, cfg);
      const double diff = std::max(std::abs(got.distance - ed_best), std::abs(exhaustive.distance - ed_best));
      worst = std::max(worst, diff);
      if (!(diff <= 1e-9)) { ++bad; }
    }
    return {bad == 0, fmt("20 instances, %zu mismatches, max |diff| %.3g", bad, worst)};
  }

  // 7 -----------------------------------------------------------------------------------------------------------
  Verdict speedup() {
    const auto p = planted_motif(20'000, 100, 9, 0.05);
    const SearchConfig cfg{.length = 100, .window = 8};
    MotifResult fast;
    const double t_fast = seconds_of([&] { fast = search(p.series, cfg); });
    oracle::BruteForceProfile mp;
    const double t_slow = seconds_of([&] { mp = oracle::brute_force_dtw_mp(p.series, cfg, 1); });
    const double best = *std::min_element(mp.distances.begin(), mp.distances.end());
    const bool same = std::abs(best - fast.distance) <= 1e-9;
    const double ratio = t_slow / t_fast;
    return {same && ratio >= 10.0, fmt("swamp %.3fs, brute force %.1fs, speedup %.1fx, distances agree: %s", t_fast,
                                       t_slow, ratio, same ? "yes" : "no")};
  }

  // 8 -----------------------------------------------------------------------------------------------------------
  Verdict determinism() {
    std::vector<std::vector<std::string>> configs = {
      {"--generate", "planted-motif", "--n", "8000", "--seed", "3", "--noise", "0.1", "--length", "100", "--window", "8"},
      {"--generate", "random-walk", "--n", "5000", "--seed", "5", "--length", "64", "--window", "6", "--mode", "znorm"},
    };
    std::size_t compared = 0, differing = 0;
    for (auto base : configs) {
      base.insert(base.begin(), "find");
      base.push_back("--no-timings");
      std::string reference;
      for (const char* threads : {"1", "8", "1", "8"}) {
        auto args = base;
        args.insert(args.end(), {"--threads", threads});
        std::ostringstream out, err;
        if (cli::run(args, out, err) != 0) { return {false, "cli failed: " + err.str()}; }
        const auto parsed = nlohmann::json::parse(out.str());
        pair_log.record(stats_from_json(parsed.at("stats")));
        if (reference.empty()) {
          reference = out.str();
        } else {
          ++compared;
          if (out.str() != reference) { ++differing; }
        }
      }
    }
    return {differing == 0, fmt("%zu comparisons across threads {1,8} and repeats, %zu differ", compared, differing)};
  }

  // 5 -----------------------------------------------------------------------------------------------------------
  Verdict pair_count() {
    // Extra runs that exercise heavy pruning, no pruning, and znorm.
    search(TimeSeries(std::vector<double>(400, 1.0)), {.length = 20, .window = 3});
    search(random_walk(3000, 11), {.length = 64, .window = 6, .normalization = Normalization::znorm});
    search(planted_motif(10'000, 128, 12, 0.2).series, {.length = 128, .window = 12});
    return {pair_log.violations == 0 && pair_log.runs > 0,
            fmt("%zu runs, %zu violations, max cascade/allowed %.4g", pair_log.runs, pair_log.violations,
                pair_log.worst_ratio)};
  }

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*fn)();
  };
  // Criterion 5 audits every search performed by the others, so it runs last.
  const Criterion order[] = {
    {1, "exactness against brute force", exactness},
    {2, "bound-chain admissibility", bound_chain},
    {3, "tightness spectrum shape", tightness_spectrum},
    {4, "pruning power", pruning_power},
    {6, "zero-window equivalence", zero_window},
    {7, "speedup over brute force", speedup},
    {8, "determinism", determinism},
    {5, "pair-count arithmetic", pair_count},
  };
  int failures = 0;
  for (const auto& c : order) {
    Verdict v;
    double secs = 0;
    try {
      secs = seconds_of([&] { v = c.fn(); });
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) { ++failures; }
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
