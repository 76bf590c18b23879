#pragma once

// Brute-force references for testing the optimized search. Nothing here calls into distance.hpp,
// mprofile.hpp or search.hpp: a bug shared with the fast path would otherwise go unnoticed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"

namespace swamp::oracle {

  /// Largest series accepted without `force`.
  inline constexpr std::size_t MAX_UNFORCED_LENGTH = 20'000;

  /// Full (L+1) x (L+1) cumulative-cost matrix, cells outside |i - j| <= w left at +inf. Squared costs.
  class ReferenceDtw {
  public:
    explicit ReferenceDtw(std::size_t length, std::size_t window)
      : len_(length), w_(window), cells_((length + 1) * (length + 1), std::numeric_limits<double>::infinity()) {
      cells_[0] = 0.0;
    }

    [[nodiscard]] double operator()(const double* a, const double* b) {
      const std::size_t stride = len_ + 1;
      for (std::size_t i = 1; i <= len_; ++i) {
        const std::size_t jlo = i > w_ ? i - w_ : 1;
        const std::size_t jhi = std::min(len_, i + w_);
        for (std::size_t j = jlo; j <= jhi; ++j) {
          const double diff = a[i - 1] - b[j - 1];
          const double here = diff * diff;
          const double prior = std::min(std::min(cells_[(i - 1) * stride + j], cells_[i * stride + j - 1]),
                                        cells_[(i - 1) * stride + j - 1]);
          cells_[i * stride + j] = here + prior;
        }
      }
      return std::sqrt(cells_[len_ * stride + len_]);
    }

  private:
    std::size_t len_;
    std::size_t w_;
    std::vector<double> cells_;
  };

  /// Top-down memoized DTW, written independently of ReferenceDtw. Meant for short sequences.
  [[nodiscard]] inline double memoized_dtw(std::span<const double> a, std::span<const double> b, std::size_t w) {
    const std::size_t len = a.size();
    if (b.size() != len) { throw std::invalid_argument("memoized_dtw: length mismatch"); }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> memo(len * len, -1.0);
    std::function<double(std::size_t, std::size_t)> cost = [&](std::size_t i, std::size_t j) -> double {
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap > w) { return inf; }
      double& slot = memo[i * len + j];
      if (slot >= 0) { return slot; }
      const double here = (a[i] - b[j]) * (a[i] - b[j]);
      double prior;
      if (i == 0 && j == 0) {
        prior = 0;
      } else {
        prior = inf;
        if (i > 0) { prior = std::min(prior, cost(i - 1, j)); }
        if (j > 0) { prior = std::min(prior, cost(i, j - 1)); }
        if (i > 0 && j > 0) { prior = std::min(prior, cost(i - 1, j - 1)); }
      }
      slot = here + prior;
      return slot;
    };
    return std::sqrt(cost(len - 1, len - 1));
  }

  /// Minimum over every monotone, continuous path from (0,0) to (L-1,L-1) inside the band, by explicit
  /// enumeration. Exponential; sequences of a handful of points only.
  [[nodiscard]] inline double enumerated_dtw(std::span<const double> a, std::span<const double> b, std::size_t w) {
    const std::size_t len = a.size();
    if (b.size() != len || len > 10) { throw std::invalid_argument("enumerated_dtw: needs equal lengths <= 10"); }
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap > w) { return; }
      acc += (a[i] - b[j]) * (a[i] - b[j]);
      if (i == len - 1 && j == len - 1) {
        best = std::min(best, acc);
        return;
      }
      if (i + 1 < len) { walk(i + 1, j, acc); }
      if (j + 1 < len) { walk(i, j + 1, acc); }
      if (i + 1 < len && j + 1 < len) { walk(i + 1, j + 1, acc); }
    };
    walk(0, 0, 0.0);
    return std::sqrt(best);
  }

  /// Every subsequence, materialized and (in znorm mode) normalized with a plain two-pass mean/std.
  [[nodiscard]] inline std::vector<double> materialize(const TimeSeries& ts, std::size_t length, Normalization mode) {
    const std::size_t m = ts.size() - length + 1;
    std::vector<double> out(m * length);
    for (std::size_t i = 0; i < m; ++i) {
      double* dst = out.data() + i * length;
      for (std::size_t k = 0; k < length; ++k) { dst[k] = ts[i + k]; }
      if (mode == Normalization::znorm) {
        double mean = 0;
        for (std::size_t k = 0; k < length; ++k) { mean += dst[k]; }
        mean /= static_cast<double>(length);
        double var = 0;
        for (std::size_t k = 0; k < length; ++k) { var += (dst[k] - mean) * (dst[k] - mean); }
        const double sd = std::sqrt(var / static_cast<double>(length));
        for (std::size_t k = 0; k < length; ++k) { dst[k] = sd < DEGENERATE_STD ? 0.0 : (dst[k] - mean) / sd; }
      }
    }
    return out;
  }

  struct BruteForceProfile {
    std::vector<double> distances;
    std::vector<std::size_t> nn_index;
    std::uint64_t dtw_calls = 0;
  };

  /// DTW matrix profile by exhaustive pairwise DTW over all non-trivial pairs.
  [[nodiscard]] inline BruteForceProfile brute_force_dtw_mp(const TimeSeries& ts, const SearchConfig& cfg,
                                                            unsigned threads = 1, bool force = false) {
    validate(cfg, ts.size());
    if (ts.size() > MAX_UNFORCED_LENGTH && !force) {
      throw std::invalid_argument("brute force refused for n = " + std::to_string(ts.size()) + " > "
                                  + std::to_string(MAX_UNFORCED_LENGTH) + " without force");
    }
    const std::size_t len = cfg.length;
    const std::size_t m = ts.size() - len + 1;
    const auto subs = materialize(ts, len, cfg.normalization);
    const double inf = std::numeric_limits<double>::infinity();

    // Rows are split into contiguous stripes; each stripe keeps its own column minima.
    const std::size_t stripes = std::max<std::size_t>(1, std::min<std::size_t>(threads, m - len));
    std::vector<std::vector<double>> best(stripes, std::vector<double>(m, inf));
    std::vector<std::vector<std::size_t>> arg(stripes, std::vector<std::size_t>(m, NO_INDEX));
    auto better = [](double d, std::size_t idx, double cur, std::size_t cur_idx) {
      return d < cur || (d == cur && idx < cur_idx);
    };

    // Interleaved rows balance the triangular workload across stripes.
    parallel_for(stripes, threads, [&](std::size_t s) {
      ReferenceDtw kernel(len, cfg.window);
      auto& bd = best[s];
      auto& ba = arg[s];
      for (std::size_t i = s; i + len < m; i += stripes) {
        for (std::size_t j = i + len; j < m; ++j) {
          const double d = kernel(subs.data() + i * len, subs.data() + j * len);
          if (better(d, j, bd[i], ba[i])) {
            bd[i] = d;
            ba[i] = j;
          }
          if (better(d, i, bd[j], ba[j])) {
            bd[j] = d;
            ba[j] = i;
          }
        }
      }
    }, 1);

    BruteForceProfile out;
    out.distances.assign(m, inf);
    out.nn_index.assign(m, NO_INDEX);
    for (std::size_t s = 0; s < stripes; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        if (better(best[s][i], arg[s][i], out.distances[i], out.nn_index[i])) {
          out.distances[i] = best[s][i];
          out.nn_index[i] = arg[s][i];
        }
      }
    }
    out.dtw_calls = nontrivial_pair_count(ts.size(), len);
    return out;
  }

  struct BruteForceMotif {
    std::size_t first = NO_INDEX;
    std::size_t second = NO_INDEX;
    double distance = std::numeric_limits<double>::infinity();
    std::uint64_t dtw_calls = 0;
  };

  /// Lexicographically smallest (i, j), i < j, whose DTW is within epsilon of the profile minimum.
  [[nodiscard]] inline BruteForceMotif motif_from_profile(const TimeSeries& ts, const SearchConfig& cfg,
                                                          const BruteForceProfile& mp) {
    const std::size_t len = cfg.length;
    const std::size_t m = mp.distances.size();
    const double best = *std::min_element(mp.distances.begin(), mp.distances.end());
    const double limit = best + cfg.epsilon;
    // The smallest row whose minimum qualifies is the first coordinate; its partner cannot lie before it.
    std::size_t i = 0;
    while (mp.distances[i] > limit) { ++i; }
    const auto subs = materialize(ts, len, cfg.normalization);
    ReferenceDtw kernel(len, cfg.window);
    BruteForceMotif out;
    out.dtw_calls = mp.dtw_calls;
    for (std::size_t j = i + len; j < m; ++j) {
      const double d = kernel(subs.data() + i * len, subs.data() + j * len);
      ++out.dtw_calls;
      if (d <= limit) {
        out.first = i;
        out.second = j;
        out.distance = d;
        return out;
      }
    }
    throw std::logic_error("brute force: qualifying row has no qualifying partner");
  }

  [[nodiscard]] inline BruteForceMotif brute_force_motif(const TimeSeries& ts, const SearchConfig& cfg,
                                                         unsigned threads = 1, bool force = false) {
    return motif_from_profile(ts, cfg, brute_force_dtw_mp(ts, cfg, threads, force));
  }

} // namespace swamp::oracle
