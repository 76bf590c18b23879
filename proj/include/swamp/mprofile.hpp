#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "distance.hpp"
#include "paa.hpp"
#include "parallel.hpp"

namespace swamp {

  /// Nearest-neighbour distance and index per subsequence start.
  struct Profile {
    std::vector<double> distances;
    std::vector<std::size_t> nn_index;

    [[nodiscard]] std::size_t size() const noexcept { return distances.size(); }
  };

  /// One level of the lower-bound hierarchy, expanded back to full resolution.
  struct LevelProfile {
    std::size_t factor = 1;
    std::vector<double> lbmp;             ///< sqrt(D) * block_profile[i / D]; +inf where pruned
    std::vector<std::size_t> lb_index;    ///< full-resolution neighbour hint, NO_INDEX if none
    std::vector<double> block_profile;    ///< unscaled per-block minimum
    std::vector<std::size_t> block_index; ///< argmin block per block, NO_INDEX if none
    std::uint64_t lb_evaluations = 0;     ///< block pairs whose bound was evaluated
  };

  // --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- ---
  // Euclidean matrix profile
  // --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- ---

  namespace detail {

    /// Exact squared ED between two subsequences under `mode`.
    [[nodiscard]] inline double subsequence_ed_sq(std::span<const double> t, const SlidingStats* stats, std::size_t i,
                                                  std::size_t j, std::size_t len, Normalization mode) {
      double sum = 0;
      if (mode == Normalization::raw) {
        for (std::size_t k = 0; k < len; ++k) { sum += square(t[i + k] - t[j + k]); }
        return sum;
      }
      const double si = stats->stds[i];
      const double sj = stats->stds[j];
      const double ii = si < DEGENERATE_STD ? 0.0 : 1.0 / si;
      const double ij = sj < DEGENERATE_STD ? 0.0 : 1.0 / sj;
      const double mi = stats->means[i];
      const double mj = stats->means[j];
      for (std::size_t k = 0; k < len; ++k) { sum += square((t[i + k] - mi) * ii - (t[j + k] - mj) * ij); }
      return sum;
    }

    inline void keep_min(double d, std::size_t idx, double& best, std::size_t& best_idx) {
      if (d < best || (d == best && idx < best_idx)) {
        best = d;
        best_idx = idx;
      }
    }

  } // namespace detail

  /// Exact Euclidean matrix profile with the |i - j| < L exclusion zone.
  ///
  /// Walks the diagonals of the distance matrix with an O(1) update per cell (squared differences in raw
  /// mode, centred covariance in znorm mode), refreshing each running value exactly every L steps. Final
  /// distances are recomputed directly against the chosen neighbour.
  [[nodiscard]] inline Profile ed_matrix_profile(const TimeSeries& ts, std::size_t length, Normalization mode,
                                                 unsigned threads = 1) {
    const std::size_t n = ts.size();
    if (length < 1 || n < 2 * length) {
      throw std::invalid_argument("ed_matrix_profile: series of length " + std::to_string(n)
                                  + " too short for subsequence length " + std::to_string(length));
    }
    const auto t = ts.values();
    const std::size_t m = n - length + 1;
    const std::size_t refresh = std::max<std::size_t>(length, 16);

    SlidingStats stats;
    std::vector<double> df, dg, invn;
    if (mode == Normalization::znorm) {
      stats = sliding_stats(t, length);
      df.assign(m, 0.0);
      dg.assign(m, 0.0);
      invn.resize(m);
      for (std::size_t i = 1; i < m; ++i) {
        df[i] = (t[i + length - 1] - t[i - 1]) / 2.0;
        dg[i] = (t[i + length - 1] - stats.means[i]) + (t[i - 1] - stats.means[i - 1]);
      }
      for (std::size_t i = 0; i < m; ++i) {
        const double s = stats.stds[i];
        invn[i] = s < DEGENERATE_STD ? 0.0 : 1.0 / (s * std::sqrt(static_cast<double>(length)));
      }
    }
    const auto dl = static_cast<double>(length);

    auto exact_cov = [&](std::size_t i, std::size_t j) {
      double c = 0;
      for (std::size_t k = 0; k < length; ++k) { c += (t[i + k] - stats.means[i]) * (t[j + k] - stats.means[j]); }
      return c;
    };
    auto znorm_dist_sq = [&](double cov, std::size_t i, std::size_t j) {
      const bool di = invn[i] == 0.0;
      const bool dj = invn[j] == 0.0;
      if (di && dj) { return 0.0; }
      if (di || dj) { return dl; }
      const double corr = std::clamp(cov * invn[i] * invn[j], -1.0, 1.0);
      return std::max(0.0, 2.0 * dl * (1.0 - corr));
    };

    // Diagonals are dealt round-robin to `parts` partial profiles, then reduced.
    const std::size_t diagonals = m - length;
    const std::size_t parts = std::max<std::size_t>(1, std::min<std::size_t>(threads, diagonals));
    std::vector<std::vector<double>> part_dist(parts, std::vector<double>(m, POSITIVE_INFINITY));
    std::vector<std::vector<std::size_t>> part_idx(parts, std::vector<std::size_t>(m, NO_INDEX));

    parallel_for(parts, threads, [&](std::size_t part) {
      auto& best = part_dist[part];
      auto& best_idx = part_idx[part];
      for (std::size_t k = length + part; k < m; k += parts) {
        double run = 0;
        for (std::size_t i = 0; i + k < m; ++i) {
          const std::size_t j = i + k;
          double d2;
          if (mode == Normalization::raw) {
            if (i % refresh == 0) {
              run = detail::subsequence_ed_sq(t, nullptr, i, j, length, mode);
            } else {
              run += detail::square(t[i + length - 1] - t[j + length - 1]) - detail::square(t[i - 1] - t[j - 1]);
            }
            d2 = std::max(0.0, run);
          } else {
            if (i % refresh == 0) {
              run = exact_cov(i, j);
            } else {
              run += df[i] * dg[j] + df[j] * dg[i];
            }
            d2 = znorm_dist_sq(run, i, j);
          }
          detail::keep_min(d2, j, best[i], best_idx[i]);
          detail::keep_min(d2, i, best[j], best_idx[j]);
        }
      }
    }, 1);

    Profile out;
    out.distances.assign(m, POSITIVE_INFINITY);
    out.nn_index.assign(m, NO_INDEX);
    for (std::size_t part = 0; part < parts; ++part) {
      for (std::size_t i = 0; i < m; ++i) {
        detail::keep_min(part_dist[part][i], part_idx[part][i], out.distances[i], out.nn_index[i]);
      }
    }
    const SlidingStats* sp = mode == Normalization::znorm ? &stats : nullptr;
    for (std::size_t i = 0; i < m; ++i) {
      if (out.nn_index[i] == NO_INDEX) { continue; }  // n < i + 2L and i < L: no legal partner
      out.distances[i] = std::sqrt(detail::subsequence_ed_sq(t, sp, i, out.nn_index[i], length, mode));
    }
    return out;
  }

  // --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- ---
  // Downsampled LB_Keogh matrix profile
  // --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- ---

  struct DsmpOptions {
    Normalization normalization = Normalization::raw;
    /// Blocks whose minimum bound exceeds this are reported as +inf (their exact value is not needed).
    double abandon_above = POSITIVE_INFINITY;
    /// Optional full-resolution neighbour hints from a coarser level; tried first in each row.
    std::span<const std::size_t> hint = {};
    unsigned threads = 1;
  };

  namespace detail {

    /// Full-resolution neighbour suggested by block pair (p, q) for start i, or NO_INDEX.
    [[nodiscard]] inline std::size_t block_partner(std::size_t i, std::size_t p, std::size_t q, std::size_t factor,
                                                   std::size_t length, std::size_t m) {
      const auto shift = (static_cast<long long>(q) - static_cast<long long>(p)) * static_cast<long long>(factor);
      long long j = static_cast<long long>(i) + shift;
      j = std::clamp<long long>(j, 0, static_cast<long long>(m) - 1);
      const auto li = static_cast<long long>(i);
      const auto ll = static_cast<long long>(length);
      if (std::llabs(j - li) < ll) { j = q > p ? li + ll : li - ll; }
      if (j < 0 || j >= static_cast<long long>(m)) { return NO_INDEX; }
      return static_cast<std::size_t>(j);
    }

  } // namespace detail

  /// Lower-bound matrix profile at downsampling factor D.
  ///
  /// Start positions are grouped into blocks of D. For a query block p and candidate block q the bound
  /// compares the PAA of the series against the PAA of an envelope widened to w + D - 1, shifted by
  /// (q - p) frames, over the L/D - 1 frames fully contained in every subsequence of block q (all L frames
  /// when D = 1). The widening absorbs the unknown offset of each start inside its block, so the scaled
  /// value lower-bounds DTW for every pair (i in p, j in q), not just block-aligned starts. Blocks that
  /// are entirely pruned are neither queried nor used as candidates.
  [[nodiscard]] inline LevelProfile lb_keogh_dsmp(const TimeSeries& ts, std::size_t length, std::size_t factor,
                                                  std::size_t window, const Mask& pruned,
                                                  const DsmpOptions& opts = {}) {
    const std::size_t n = ts.size();
    if (length < 1 || n < 2 * length) {
      throw std::invalid_argument("lb_keogh_dsmp: series too short for subsequence length "
                                  + std::to_string(length));
    }
    if (factor < 1 || factor > length) {
      throw std::invalid_argument("lb_keogh_dsmp: factor " + std::to_string(factor) + " out of range [1, "
                                  + std::to_string(length) + "]");
    }
    if (window > length - 1) {
      throw std::invalid_argument("lb_keogh_dsmp: window " + std::to_string(window) + " exceeds length - 1");
    }
    const std::size_t m = n - length + 1;
    if (pruned.size() != m) {
      throw std::invalid_argument("lb_keogh_dsmp: mask has " + std::to_string(pruned.size())
                                  + " entries, expected " + std::to_string(m));
    }
    if (opts.normalization == Normalization::znorm && factor != 1) {
      throw std::invalid_argument("lb_keogh_dsmp: znorm mode supports factor 1 only");
    }
    if (!opts.hint.empty() && opts.hint.size() != m) {
      throw std::invalid_argument("lb_keogh_dsmp: hint length mismatch");
    }

    const auto t = ts.values();
    const std::size_t blocks = (m + factor - 1) / factor;
    const std::size_t frames_per_subsequence = length / factor;
    const std::size_t first_frame = factor == 1 ? 0 : 1;
    const std::size_t frames = frames_per_subsequence - first_frame;
    const std::size_t separation = frames_per_subsequence;
    const double d = static_cast<double>(factor);
    const double limit_sq = detail::squared_limit(opts.abandon_above, d);

    const Envelope env = compute_envelope(t, std::min(n - 1, window + factor - 1));
    std::vector<double> series_d, upper_d, lower_d;
    detail::paa_into(t, factor, series_d);
    detail::paa_into(env.upper, factor, upper_d);
    detail::paa_into(env.lower, factor, lower_d);
    const Mask block_pruned = downsample_mask(pruned, factor);

    SlidingStats stats;
    if (opts.normalization == Normalization::znorm) { stats = sliding_stats(t, length); }

    LevelProfile out;
    out.factor = factor;
    out.block_profile.assign(blocks, POSITIVE_INFINITY);
    out.block_index.assign(blocks, NO_INDEX);
    std::vector<std::uint64_t> evaluations(blocks, 0);

    parallel_for(blocks, opts.threads, [&](std::size_t p) {
      if (block_pruned[p]) { return; }
      double row_min = POSITIVE_INFINITY;
      std::size_t row_arg = NO_INDEX;
      std::uint64_t evals = 0;

      // znorm: the query envelope normalized by the query's own statistics.
      std::vector<double> qu, ql;
      double qmean = 0, qinv = 0;
      if (opts.normalization == Normalization::znorm) {
        qu.resize(length);
        ql.resize(length);
        qmean = stats.means[p];
        qinv = stats.stds[p] < DEGENERATE_STD ? 0.0 : 1.0 / stats.stds[p];
        for (std::size_t k = 0; k < length; ++k) {
          qu[k] = (env.upper[p + k] - qmean) * qinv;
          ql[k] = (env.lower[p + k] - qmean) * qinv;
        }
      }

      auto bound_sq = [&](std::size_t q, double limit) {
        if (opts.normalization == Normalization::raw) {
          return detail::lb_keogh_sq(upper_d.data() + p + first_frame, lower_d.data() + p + first_frame,
                                     series_d.data() + q + first_frame, frames, limit);
        }
        const double cmean = stats.means[q];
        const double cinv = stats.stds[q] < DEGENERATE_STD ? 0.0 : 1.0 / stats.stds[q];
        double sum = 0;
        for (std::size_t k = 0; k < length; ++k) {
          sum += detail::clipped_sq((t[q + k] - cmean) * cinv, ql[k], qu[k]);
          if (sum > limit) { return POSITIVE_INFINITY; }
        }
        return sum;
      };
      auto consider = [&](std::size_t q) {
        ++evals;
        const double s = bound_sq(q, std::min(row_min, limit_sq));
        if (s < row_min) {
          row_min = s;
          row_arg = q;
        }
      };
      auto legal = [&](std::size_t q) {
        return q < blocks && !block_pruned[q] && (q >= p ? q - p : p - q) >= separation;
      };

      std::size_t hinted = NO_INDEX;
      if (!opts.hint.empty()) {
        for (std::size_t i = p * factor; i < std::min(m, (p + 1) * factor); ++i) {
          if (!pruned[i]) {
            if (opts.hint[i] != NO_INDEX) { hinted = opts.hint[i] / factor; }
            break;
          }
        }
        if (hinted != NO_INDEX && legal(hinted)) {
          consider(hinted);
        } else {
          hinted = NO_INDEX;
        }
      }
      if (p >= separation) {
        for (std::size_t q = 0; q <= p - separation; ++q) {
          if (q != hinted && !block_pruned[q]) { consider(q); }
        }
      }
      for (std::size_t q = p + separation; q < blocks; ++q) {
        if (q != hinted && !block_pruned[q]) { consider(q); }
      }

      evaluations[p] = evals;
      if (row_min <= limit_sq) {
        out.block_profile[p] = std::sqrt(row_min);
        out.block_index[p] = row_arg;
      }
    }, 4);

    out.lbmp.assign(m, POSITIVE_INFINITY);
    out.lb_index.assign(m, NO_INDEX);
    const double scale = std::sqrt(d);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t p = i / factor;
      if (pruned[i] || out.block_index[p] == NO_INDEX) { continue; }
      out.lbmp[i] = scale * out.block_profile[p];
      out.lb_index[i] = factor == 1 ? out.block_index[p]
                                    : detail::block_partner(i, p, out.block_index[p], factor, length, m);
    }
    for (auto e : evaluations) { out.lb_evaluations += e; }
    return out;
  }

} // namespace swamp
