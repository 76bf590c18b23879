#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "distance.hpp"
#include "paa.hpp"
#include "search.hpp"

namespace swamp {

  /// One row of the lower-bound spectrum: mean tightness LB/DTW and mean time per evaluation.
  struct BoundRow {
    std::string name;
    std::size_t factor = 0;   ///< 0 for LB_KimFL and DTW
    double mean_tightness = 0;
    double mean_seconds = 0;
  };

  struct BenchOptions {
    std::size_t pairs = 1000;
    std::uint64_t seed = 0;
    std::vector<std::size_t> levels;  ///< empty: L, L/2, ..., 1
    std::size_t trials = 5;
    double min_trial_seconds = 2e-3;
  };

  struct BenchResult {
    std::vector<BoundRow> rows;  ///< LB_KimFL, LB_Keogh coarse to fine, DTW
    std::size_t pairs_used = 0;
    std::size_t pairs_skipped = 0;  ///< pairs with DTW = 0 (tightness undefined)
  };

  namespace detail {

    /// Best per-call time over `trials`, each trial repeating `pass` until it ran `min_seconds`.
    template<typename Pass>
    [[nodiscard]] double time_per_call(Pass&& pass, std::size_t calls_per_pass, std::size_t trials,
                                       double min_seconds) {
      double best = POSITIVE_INFINITY;
      for (std::size_t t = 0; t < trials; ++t) {
        std::size_t passes = 0;
        const auto start = Clock::now();
        double elapsed = 0;
        do {
          pass();
          ++passes;
          elapsed = seconds_since(start);
        } while (elapsed < min_seconds);
        best = std::min(best, elapsed / static_cast<double>(passes * calls_per_pass));
      }
      return best;
    }

  } // namespace detail

  /// Tightness/time spectrum over randomly sampled non-trivial subsequence pairs of `ts`.
  ///
  /// Each downsampled bound uses the query's own envelope (window w) reduced by PAA, against the PAA of
  /// the candidate. Representations are prepared once; only the per-pair kernel is timed.
  [[nodiscard]] inline BenchResult bench_lb(const TimeSeries& ts, const SearchConfig& cfg, const BenchOptions& opts) {
    validate(cfg, ts.size());
    const std::size_t len = cfg.length;
    const std::size_t m = ts.size() - len + 1;
    std::vector<std::size_t> levels = opts.levels;
    if (levels.empty()) {
      for (std::size_t d = len; d > 0; d /= 2) { levels.push_back(d); }
    }
    for (auto d : levels) {
      if (d < 1 || d > len) { throw std::invalid_argument("bench level " + std::to_string(d) + " out of range"); }
    }
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    const SubsequenceSource source(ts, len, cfg.normalization);
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);

    struct Sample {
      std::vector<double> a, b;
      Envelope env;
      double dtw = 0;
    };
    std::vector<Sample> samples;
    BenchResult result;
    DtwWorkspace ws;
    std::size_t attempts = 0;
    while (samples.size() < opts.pairs && attempts < opts.pairs * 100) {
      ++attempts;
      std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      if ((i > j ? i - j : j - i) < len) { continue; }
      Sample s;
      std::vector<double> buf;
      const auto va = source.view(i, buf);
      s.a.assign(va.begin(), va.end());
      const auto vb = source.view(j, buf);
      s.b.assign(vb.begin(), vb.end());
      s.dtw = dtw(s.a, s.b, cfg.window, POSITIVE_INFINITY, ws);
      if (s.dtw == 0.0) {
        ++result.pairs_skipped;
        continue;
      }
      s.env = compute_envelope(s.a, cfg.window);
      samples.push_back(std::move(s));
    }
    if (samples.empty()) { throw std::invalid_argument("bench: no usable pairs (all sampled DTW distances are 0)"); }
    result.pairs_used = samples.size();
    const std::size_t count = samples.size();
    const auto dcount = static_cast<double>(count);
    volatile double sink = 0;

    {
      BoundRow row{"lb_kim_fl", 0, 0, 0};
      for (const auto& s : samples) { row.mean_tightness += lb_kim_fl(s.a, s.b) / s.dtw; }
      row.mean_tightness /= dcount;
      row.mean_seconds = detail::time_per_call([&] {
        double acc = 0;
        for (const auto& s : samples) { acc += lb_kim_fl(s.a, s.b); }
        sink = sink + acc;
      }, count, opts.trials, opts.min_trial_seconds);
      result.rows.push_back(row);
    }

    for (const std::size_t d : levels) {
      const std::size_t frames = len / d;
      std::vector<double> up(count * frames), lo(count * frames), cand(count * frames);
      BoundRow row{"lb_keogh_" + std::to_string(d) + ":1", d, 0, 0};
      for (std::size_t p = 0; p < count; ++p) {
        const auto& s = samples[p];
        const auto [pu, pl] = downsampled_envelope(s.env, d);
        const auto pc = paa(s.b, d);
        std::copy(pu.values.begin(), pu.values.end(), up.begin() + static_cast<std::ptrdiff_t>(p * frames));
        std::copy(pl.values.begin(), pl.values.end(), lo.begin() + static_cast<std::ptrdiff_t>(p * frames));
        std::copy(pc.values.begin(), pc.values.end(), cand.begin() + static_cast<std::ptrdiff_t>(p * frames));
        row.mean_tightness += lb_keogh_paa(pu, pl, pc) / s.dtw;
      }
      row.mean_tightness /= dcount;
      const double scale = static_cast<double>(d);
      row.mean_seconds = detail::time_per_call([&] {
        double acc = 0;
        for (std::size_t p = 0; p < count; ++p) {
          const std::size_t off = p * frames;
          acc += std::sqrt(scale * detail::lb_keogh_sq(up.data() + off, lo.data() + off, cand.data() + off, frames,
                                                       POSITIVE_INFINITY));
        }
        sink = sink + acc;
      }, count, opts.trials, opts.min_trial_seconds);
      result.rows.push_back(row);
    }

    {
      // DTW bounds itself.
      BoundRow row{"dtw", 0, 1.0, 0};
      row.mean_seconds = detail::time_per_call([&] {
        double acc = 0;
        for (const auto& s : samples) { acc += dtw(s.a, s.b, cfg.window, POSITIVE_INFINITY, ws); }
        sink = sink + acc;
      }, count, opts.trials, opts.min_trial_seconds);
      result.rows.push_back(row);
    }
    return result;
  }

} // namespace swamp
