#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "core.hpp"
#include "distance.hpp"
#include "mprofile.hpp"
#include "paa.hpp"

namespace swamp {

  /// One level of the pruning hierarchy, as observed after it ran.
  struct LevelStats {
    std::size_t factor = 1;
    std::size_t pruned_before = 0;   ///< positions already pruned when the level started
    std::size_t newly_pruned = 0;
    double lbmp_min = POSITIVE_INFINITY;
    std::uint64_t lb_evaluations = 0;
    bool confirmed = false;           ///< a confirmation DTW was computed
    double confirmation_distance = POSITIVE_INFINITY;
    double best_so_far = POSITIVE_INFINITY;  ///< after the level
    double seconds = 0;

    bool operator==(const LevelStats&) const = default;
  };

  struct SearchStats {
    std::size_t positions = 0;                 ///< n - L + 1
    std::uint64_t total_pairs = 0;             ///< non-trivial unordered pairs
    std::vector<LevelStats> levels;
    std::size_t pruned_before_phase_two = 0;
    double pruned_fraction = 0;                ///< p
    std::size_t pruned_in_phase_two = 0;

    std::uint64_t seed_dtw_calls = 0;
    std::uint64_t confirmation_dtw_calls = 0;
    std::uint64_t phase_two_dtw_calls = 0;
    std::uint64_t phase_two_kim_calls = 0;
    std::uint64_t phase_two_keogh_calls = 0;
    std::uint64_t cascade_pairs = 0;           ///< Phase II pairs entering the LB cascade
    std::uint64_t phase_one_lb_evaluations = 0;

    double seed_seconds = 0;
    double phase_one_seconds = 0;
    double phase_two_seconds = 0;

    bool operator==(const SearchStats&) const = default;

    [[nodiscard]] std::uint64_t total_dtw_calls() const noexcept {
      return seed_dtw_calls + confirmation_dtw_calls + phase_two_dtw_calls;
    }
    /// (1 - p)^2 of all pairs, the share left after pruning a fraction p of positions.
    [[nodiscard]] double predicted_pair_bound() const noexcept {
      return (1.0 - pruned_fraction) * (1.0 - pruned_fraction) * static_cast<double>(total_pairs);
    }
  };

  /// Top-1 motif. `first` < `second`, both 0-based.
  struct MotifResult {
    std::size_t first = NO_INDEX;
    std::size_t second = NO_INDEX;
    double distance = POSITIVE_INFINITY;
    SearchStats stats;
  };

  /// Why a position was pruned: its governing bound exceeded the best-so-far at that moment.
  struct PruneRecord {
    std::size_t position = 0;
    std::size_t factor = 0;    ///< level, or 0 for Phase II
    double bound = 0;
    double best_so_far = 0;
  };

  /// Lexicographically ordered candidates with strictly decreasing distance.
  ///
  /// Keeps just enough pairs to answer "smallest (i, j) whose distance is within epsilon of the final
  /// minimum", whatever that minimum turns out to be.
  class TieFrontier {
  public:
    struct Entry {
      std::size_t first;
      std::size_t second;
      double distance;
    };

    void add(std::size_t i, std::size_t j, double distance) {
      if (i > j) { std::swap(i, j); }
      const auto key = std::make_pair(i, j);
      auto it = std::lower_bound(entries_.begin(), entries_.end(), key, [](const Entry& e, const auto& k) {
        return std::make_pair(e.first, e.second) < k;
      });
      // Dominated by a lexicographically smaller pair that is at least as close.
      if (it != entries_.begin() && std::prev(it)->distance <= distance) { return; }
      if (it != entries_.end() && it->first == i && it->second == j) {
        if (it->distance <= distance) { return; }
        it->distance = distance;
      } else {
        it = entries_.insert(it, Entry{i, j, distance});
      }
      auto tail = std::next(it);
      auto keep = std::find_if(tail, entries_.end(), [&](const Entry& e) { return e.distance < distance; });
      entries_.erase(tail, keep);
    }

    /// Smallest pair within `epsilon` of `best`, if any.
    [[nodiscard]] const Entry* select(double best, double epsilon) const {
      for (const auto& e : entries_) {
        if (e.distance <= best + epsilon) { return &e; }
      }
      return nullptr;
    }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  private:
    std::vector<Entry> entries_;
  };

  /// Access to (optionally z-normalized) subsequences of one series.
  class SubsequenceSource {
  public:
    SubsequenceSource(const TimeSeries& ts, std::size_t length, Normalization mode)
      : t_(ts.values()), length_(length), mode_(mode) {
      if (mode_ == Normalization::znorm) { stats_ = sliding_stats(t_, length_); }
    }

    [[nodiscard]] std::size_t length() const noexcept { return length_; }

    /// The subsequence at `i`; in znorm mode it is written into `buffer`.
    [[nodiscard]] std::span<const double> view(std::size_t i, std::vector<double>& buffer) const {
      const auto raw = t_.subspan(i, length_);
      if (mode_ == Normalization::raw) { return raw; }
      buffer.resize(length_);
      znormalize_into(raw, stats_.means[i], stats_.stds[i], buffer);
      return buffer;
    }

    [[nodiscard]] double first(std::size_t i) const noexcept { return value(i, 0); }
    [[nodiscard]] double last(std::size_t i) const noexcept { return value(i, length_ - 1); }

  private:
    [[nodiscard]] double value(std::size_t i, std::size_t k) const noexcept {
      const double x = t_[i + k];
      if (mode_ == Normalization::raw) { return x; }
      const double sd = stats_.stds[i];
      return sd < DEGENERATE_STD ? 0.0 : (x - stats_.means[i]) / sd;
    }

    std::span<const double> t_;
    std::size_t length_;
    Normalization mode_;
    SlidingStats stats_;
  };

  struct SearchOptions {
    unsigned threads = 1;
    /// Keep every level's profile in PhaseOneState::levels (for dumps).
    bool keep_levels = false;
    /// Visit Phase II candidates in a seeded random order instead of ascending bound order.
    bool shuffle_outer = false;
    std::uint64_t shuffle_seed = 0;
  };

  struct PhaseOneState {
    double best_so_far = POSITIVE_INFINITY;
    std::pair<std::size_t, std::size_t> best_pair{NO_INDEX, NO_INDEX};
    Mask pruned;
    LevelProfile final_level;
    Profile ed_profile;
    std::vector<LevelProfile> levels;   ///< only with SearchOptions::keep_levels
    std::vector<PruneRecord> audit;
    TieFrontier frontier;
    SearchStats stats;
  };

  namespace detail {

    using Clock = std::chrono::steady_clock;

    [[nodiscard]] inline double seconds_since(Clock::time_point start) {
      return std::chrono::duration<double>(Clock::now() - start).count();
    }

    /// D = L, L/2, ..., 1 (halving, floored). znorm runs the full-resolution level only.
    [[nodiscard]] inline std::vector<std::size_t> level_schedule(std::size_t length, Normalization mode) {
      std::vector<std::size_t> out;
      if (mode == Normalization::znorm) { return {1}; }
      for (std::size_t d = length; d > 0; d /= 2) { out.push_back(d); }
      return out;
    }

  } // namespace detail

  /// Phase I: seed the best-so-far from the Euclidean motif, then run the lower-bound hierarchy from
  /// the coarsest factor down to D = 1, confirming each level's most promising pair with a true DTW and
  /// pruning every position whose bound exceeds best-so-far + epsilon.
  [[nodiscard]] inline PhaseOneState compute_dsmp(const TimeSeries& ts, const SearchConfig& cfg,
                                                  const SearchOptions& opts = {}) {
    validate(cfg, ts.size());
    const std::size_t n = ts.size();
    const std::size_t len = cfg.length;
    const std::size_t m = n - len + 1;
    const SubsequenceSource source(ts, len, cfg.normalization);

    PhaseOneState state;
    state.stats.positions = m;
    state.stats.total_pairs = nontrivial_pair_count(n, len);
    state.pruned.assign(m, false);

    DtwWorkspace ws;
    std::vector<double> buf_a, buf_b;
    auto true_dtw = [&](std::size_t i, std::size_t j, double abandon) {
      return dtw(source.view(i, buf_a), source.view(j, buf_b), cfg.window, abandon, ws);
    };
    auto offer = [&](std::size_t i, std::size_t j, double distance) {
      if (distance <= state.best_so_far + cfg.epsilon) { state.frontier.add(i, j, distance); }
      if (distance < state.best_so_far) {
        state.best_so_far = distance;
        state.best_pair = std::minmax(i, j);
      }
    };

    // Seed.
    const auto seed_start = detail::Clock::now();
    state.ed_profile = ed_matrix_profile(ts, len, cfg.normalization, opts.threads);
    {
      const auto& dist = state.ed_profile.distances;
      const auto i = static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
      const std::size_t j = state.ed_profile.nn_index[i];
      offer(i, j, true_dtw(i, j, POSITIVE_INFINITY));
      state.stats.seed_dtw_calls = 1;
    }
    state.stats.seed_seconds = detail::seconds_since(seed_start);

    const auto phase_start = detail::Clock::now();
    std::vector<std::size_t> hint;
    std::size_t pruned_count = 0;
    for (const std::size_t factor : detail::level_schedule(len, cfg.normalization)) {
      const auto level_start = detail::Clock::now();
      LevelStats ls;
      ls.factor = factor;
      ls.pruned_before = pruned_count;

      DsmpOptions dopts;
      dopts.normalization = cfg.normalization;
      dopts.abandon_above = state.best_so_far + cfg.epsilon;
      dopts.hint = hint;
      dopts.threads = opts.threads;
      LevelProfile level = lb_keogh_dsmp(ts, len, factor, cfg.window, state.pruned, dopts);
      ls.lb_evaluations = level.lb_evaluations;

      // Confirm the pair named by the smallest bound.
      const auto min_it = std::min_element(level.lbmp.begin(), level.lbmp.end());
      ls.lbmp_min = *min_it;
      const auto arg = static_cast<std::size_t>(min_it - level.lbmp.begin());
      if (std::isfinite(ls.lbmp_min) && level.lb_index[arg] != NO_INDEX) {
        const std::size_t j = level.lb_index[arg];
        const double distance = true_dtw(arg, j, state.best_so_far + cfg.epsilon);
        ++state.stats.confirmation_dtw_calls;
        ls.confirmed = true;
        ls.confirmation_distance = distance;
        offer(arg, j, distance);
      }

      const double threshold = state.best_so_far + cfg.epsilon;
      for (std::size_t i = 0; i < m; ++i) {
        if (!state.pruned[i] && level.lbmp[i] > threshold) {
          state.pruned[i] = true;
          state.audit.push_back({i, factor, level.lbmp[i], state.best_so_far});
          ++ls.newly_pruned;
        }
      }
      pruned_count += ls.newly_pruned;
      ls.best_so_far = state.best_so_far;
      ls.seconds = detail::seconds_since(level_start);
      state.stats.phase_one_lb_evaluations += level.lb_evaluations;
      state.stats.levels.push_back(ls);

      hint = level.lb_index;
      if (opts.keep_levels) { state.levels.push_back(level); }
      state.final_level = std::move(level);
    }
    state.stats.pruned_before_phase_two = pruned_count;
    state.stats.pruned_fraction = static_cast<double>(pruned_count) / static_cast<double>(m);
    state.stats.phase_one_seconds = detail::seconds_since(phase_start);
    return state;
  }

  /// Recomputes the derived fields of `stats` (p and the pair-count prediction inputs).
  inline void collect_stats(SearchStats& stats) {
    stats.pruned_before_phase_two = 0;
    for (const auto& l : stats.levels) { stats.pruned_before_phase_two += l.newly_pruned; }
    stats.pruned_fraction = stats.positions == 0
                              ? 0.0
                              : static_cast<double>(stats.pruned_before_phase_two)
                                  / static_cast<double>(stats.positions);
  }

  /// Phase II over the survivors of `state`: ordered nested loop with the LB_KimFL, LB_Keogh, DTW
  /// cascade. `state` is consumed (its mask and audit trail are extended).
  [[nodiscard]] inline MotifResult refine(const TimeSeries& ts, const SearchConfig& cfg, PhaseOneState& state,
                                          const SearchOptions& opts = {}) {
    const auto phase_start = detail::Clock::now();
    const std::size_t len = cfg.length;
    const std::size_t m = state.pruned.size();
    const SubsequenceSource source(ts, len, cfg.normalization);
    const auto& lbmp = state.final_level.lbmp;
    const auto& lb_index = state.final_level.lb_index;
    auto& pruned = state.pruned;
    auto& stats = state.stats;

    // Ascending bound order; pruning always removes a suffix of it.
    std::vector<std::size_t> sorted;
    for (std::size_t i = 0; i < m; ++i) {
      if (!pruned[i]) { sorted.push_back(i); }
    }
    std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return lbmp[a] < lbmp[b]; });
    std::size_t live_end = sorted.size();
    double threshold = state.best_so_far + cfg.epsilon;
    auto reprune = [&] {
      while (live_end > 0 && lbmp[sorted[live_end - 1]] > threshold) {
        const std::size_t i = sorted[--live_end];
        if (!pruned[i]) {
          pruned[i] = true;
          state.audit.push_back({i, 0, lbmp[i], state.best_so_far});
          ++stats.pruned_in_phase_two;
        }
      }
    };
    reprune();

    std::vector<std::size_t> order = sorted;
    if (opts.shuffle_outer) {
      std::mt19937_64 rng(opts.shuffle_seed);
      std::shuffle(order.begin(), order.end(), rng);
    }

    DtwWorkspace ws;
    std::vector<double> buf_a, buf_b;
    for (const std::size_t i : order) {
      if (pruned[i]) {
        if (!opts.shuffle_outer) { break; }  // everything after it in bound order is pruned too
        continue;
      }
      const auto a = source.view(i, buf_a);
      const Envelope env = compute_envelope(a, cfg.window);
      const double a_first = a.front();
      const double a_last = a.back();

      auto visit = [&](std::size_t j) {
        if (pruned[j]) { return; }
        ++stats.cascade_pairs;
        ++stats.phase_two_kim_calls;
        const double kim_sq = detail::square(a_first - source.first(j)) + detail::square(a_last - source.last(j));
        if (kim_sq > detail::squared_limit(threshold)) { return; }
        const auto b = source.view(j, buf_b);
        ++stats.phase_two_keogh_calls;
        if (lb_keogh(env, b, threshold) > threshold) { return; }
        ++stats.phase_two_dtw_calls;
        const double distance = dtw(a, b, cfg.window, threshold, ws);
        if (distance > threshold) { return; }
        state.frontier.add(i, j, distance);
        if (distance < state.best_so_far) {
          state.best_so_far = distance;
          state.best_pair = {i, j};
          threshold = state.best_so_far + cfg.epsilon;
          reprune();
        }
      };

      const std::size_t first = lb_index[i];
      const bool first_ok = first != NO_INDEX && first >= i + len && first < m;
      if (first_ok) { visit(first); }
      for (std::size_t j = i + len; j < m && !pruned[i]; ++j) {
        if (first_ok && j == first) { continue; }
        visit(j);
      }
    }
    stats.phase_two_seconds = detail::seconds_since(phase_start);
    collect_stats(stats);

    MotifResult result;
    const auto* chosen = state.frontier.select(state.best_so_far, cfg.epsilon);
    if (chosen == nullptr) { throw std::logic_error("motif search finished without a candidate pair"); }
    result.first = chosen->first;
    result.second = chosen->second;
    result.distance = chosen->distance;
    result.stats = stats;
    return result;
  }

  /// Exact top-1 DTW motif: Phase I pruning hierarchy followed by Phase II refinement.
  [[nodiscard]] inline MotifResult swamp_search(const TimeSeries& ts, const SearchConfig& cfg,
                                                const SearchOptions& opts = {}) {
    PhaseOneState state = compute_dsmp(ts, cfg, opts);
    return refine(ts, cfg, state, opts);
  }

} // namespace swamp
