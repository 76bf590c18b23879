#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "distance.hpp"

namespace swamp {

  /// Boolean per-position flags (pruned / not pruned).
  using Mask = std::vector<bool>;

  /// Piecewise aggregate approximation: frame means of D consecutive source points.
  struct PaaSeries {
    std::vector<double> values;
    std::size_t factor = 1;
    std::size_t source_length = 0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  };

  namespace detail {

    /// floor(len / D) frame means written into `out`; a short trailing frame is dropped.
    inline void paa_into(std::span<const double> src, std::size_t factor, std::vector<double>& out) {
      const std::size_t frames = src.size() / factor;
      out.resize(frames);
      const double inv = 1.0 / static_cast<double>(factor);
      for (std::size_t f = 0; f < frames; ++f) {
        double sum = 0;
        const double* p = src.data() + f * factor;
        for (std::size_t k = 0; k < factor; ++k) { sum += p[k]; }
        out[f] = factor == 1 ? sum : sum * inv;
      }
    }

  } // namespace detail

  [[nodiscard]] inline PaaSeries paa(std::span<const double> ts, std::size_t factor) {
    if (factor < 1 || factor > ts.size()) {
      throw std::invalid_argument("paa factor " + std::to_string(factor) + " out of range [1, "
                                  + std::to_string(ts.size()) + "]");
    }
    PaaSeries out;
    out.factor = factor;
    out.source_length = ts.size();
    detail::paa_into(ts, factor, out.values);
    return out;
  }

  /// PAA of the upper and lower envelope separately (envelope first, then downsample).
  [[nodiscard]] inline std::pair<PaaSeries, PaaSeries> downsampled_envelope(const Envelope& env, std::size_t factor) {
    return {paa(env.upper, factor), paa(env.lower, factor)};
  }

  /// LB_Keogh on downsampled data, scaled by sqrt(D) so it stays below DTW of the full-resolution pair.
  ///
  /// Per frame, D * clip(mean c; mean lo, mean up)^2 <= sum of the D full-resolution clipped terms
  /// (clip is convex, then Cauchy-Schwarz), so the scaled sum never exceeds LB_Keogh.
  [[nodiscard]] inline double lb_keogh_paa(const PaaSeries& upper, const PaaSeries& lower, const PaaSeries& c,
                                           double abandon_at = POSITIVE_INFINITY) {
    if (upper.size() != c.size() || lower.size() != c.size() || upper.factor != c.factor
        || lower.factor != c.factor) {
      throw std::invalid_argument("lb_keogh_paa: envelope and candidate PAA shapes differ");
    }
    const auto d = static_cast<double>(c.factor);
    const double abandon_sq = abandon_at * abandon_at / d;
    const double sq = detail::lb_keogh_sq(upper.values.data(), lower.values.data(), c.values.data(), c.size(),
                                          abandon_sq);
    return std::sqrt(d * sq);
  }

  /// A downsampled position is pruned only when every full-resolution position it covers is pruned.
  ///
  /// Produces ceil(len / D) entries; the last one covers the (possibly short) tail.
  [[nodiscard]] inline Mask downsample_mask(const Mask& pruned, std::size_t factor) {
    if (factor < 1) { throw std::invalid_argument("downsample_mask: factor must be at least 1"); }
    const std::size_t blocks = (pruned.size() + factor - 1) / factor;
    Mask out(blocks, true);
    for (std::size_t i = 0; i < pruned.size(); ++i) {
      if (!pruned[i]) { out[i / factor] = false; }
    }
    return out;
  }

} // namespace swamp
