#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace swamp {

  namespace detail {

    [[nodiscard]] inline double square(double x) noexcept { return x * x; }

    /// Squared deviation of `c` outside [lo, up], zero inside.
    [[nodiscard]] inline double clipped_sq(double c, double lo, double up) noexcept {
      if (c > up) { return square(c - up); }
      if (c < lo) { return square(c - lo); }
      return 0.0;
    }

    inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
      if (a != b) {
        throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs "
                                    + std::to_string(b) + ")");
      }
    }

    /// Sliding max/min of radius `w` over `q`, clamped at both ends, O(len) via monotonic deques.
    inline void envelope_into(std::span<const double> q, std::size_t w, std::span<double> upper,
                              std::span<double> lower) {
      const std::size_t n = q.size();
      std::deque<std::size_t> maxq;
      std::deque<std::size_t> minq;
      std::size_t next = 0;  // next index to push
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t hi = std::min(n - 1, i + w);
        for (; next <= hi; ++next) {
          while (!maxq.empty() && q[maxq.back()] <= q[next]) { maxq.pop_back(); }
          maxq.push_back(next);
          while (!minq.empty() && q[minq.back()] >= q[next]) { minq.pop_back(); }
          minq.push_back(next);
        }
        const std::size_t lo = i >= w ? i - w : 0;
        while (maxq.front() < lo) { maxq.pop_front(); }
        while (minq.front() < lo) { minq.pop_front(); }
        upper[i] = q[maxq.front()];
        lower[i] = q[minq.front()];
      }
    }

    /// (x^2 / scale) nudged up by a few ulps: a non-negative sum above it satisfies sqrt(scale * sum) > x
    /// despite rounding, so abandoning on it never discards a value that is actually <= x.
    [[nodiscard]] inline double squared_limit(double x, double scale = 1.0) noexcept {
      return x * x / scale * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
    }

    /// Sum of clipped squared deviations, abandoning once the partial sum exceeds `abandon_sq`.
    [[nodiscard]] inline double lb_keogh_sq(const double* upper, const double* lower, const double* c, std::size_t len,
                                            double abandon_sq) noexcept {
      double sum = 0;
      for (std::size_t k = 0; k < len; ++k) {
        sum += clipped_sq(c[k], lower[k], upper[k]);
        if (sum > abandon_sq) { return POSITIVE_INFINITY; }
      }
      return sum;
    }

  } // namespace detail

  /// Upper and lower warping envelopes of a sequence.
  struct Envelope {
    std::vector<double> upper;
    std::vector<double> lower;
    std::size_t window = 0;

    [[nodiscard]] std::size_t size() const noexcept { return upper.size(); }
  };

  [[nodiscard]] inline double euclidean(std::span<const double> a, std::span<const double> b) {
    detail::require_same_length(a.size(), b.size(), "euclidean");
    double sum = 0;
    for (std::size_t k = 0; k < a.size(); ++k) { sum += detail::square(a[k] - b[k]); }
    return std::sqrt(sum);
  }

  /// U[i] = max(q[i-w .. i+w]), Lo[i] = min(q[i-w .. i+w]), window clamped to the sequence.
  [[nodiscard]] inline Envelope compute_envelope(std::span<const double> q, std::size_t w) {
    if (q.empty() || w > q.size() - 1) {
      throw std::invalid_argument("envelope window " + std::to_string(w) + " out of range for length "
                                  + std::to_string(q.size()));
    }
    Envelope env;
    env.upper.resize(q.size());
    env.lower.resize(q.size());
    env.window = w;
    detail::envelope_into(q, w, env.upper, env.lower);
    return env;
  }

  /// LB_Keogh of candidate `c` against the envelope of a query.
  ///
  /// Returns +inf as soon as the running sum proves the bound exceeds `abandon_at`.
  [[nodiscard]] inline double lb_keogh(const Envelope& env, std::span<const double> c,
                                       double abandon_at = POSITIVE_INFINITY) {
    detail::require_same_length(env.size(), c.size(), "lb_keogh");
    const double abandon_sq = detail::squared_limit(abandon_at);
    const double sq = detail::lb_keogh_sq(env.upper.data(), env.lower.data(), c.data(), c.size(), abandon_sq);
    return std::sqrt(sq);
  }

  /// First/last point bound: every warping path matches both pairs of endpoints.
  [[nodiscard]] inline double lb_kim_fl(std::span<const double> a, std::span<const double> b) {
    detail::require_same_length(a.size(), b.size(), "lb_kim_fl");
    if (a.size() < 2) { throw std::invalid_argument("lb_kim_fl: sequences need at least 2 points"); }
    return std::sqrt(detail::square(a.front() - b.front()) + detail::square(a.back() - b.back()));
  }

  /// Reusable DP rows for dtw(). One per worker.
  class DtwWorkspace {
  public:
    void reserve(std::size_t len) {
      if (prev_.size() < len) {
        prev_.resize(len);
        curr_.resize(len);
      }
    }

  private:
    friend double dtw(std::span<const double>, std::span<const double>, std::size_t, double, DtwWorkspace&);
    std::vector<double> prev_;
    std::vector<double> curr_;
  };

  /// Banded DTW with squared pointwise cost; returns the square root of the optimal path cost.
  ///
  /// Abandons (returning +inf) when every cell of a DP row exceeds `abandon_at`^2 (path costs only grow). A result not above
  /// `abandon_at` is always exact.
  inline double dtw(std::span<const double> a, std::span<const double> b, std::size_t w, double abandon_at,
                    DtwWorkspace& ws) {
    detail::require_same_length(a.size(), b.size(), "dtw");
    const std::size_t len = a.size();
    if (len == 0) { return 0.0; }
    if (w > len - 1) {
      throw std::invalid_argument("dtw: window " + std::to_string(w) + " out of range for length "
                                  + std::to_string(len));
    }
    const double abandon_sq = detail::squared_limit(abandon_at);
    ws.reserve(len);
    double* prev = ws.prev_.data();
    double* curr = ws.curr_.data();
    std::fill(prev, prev + len, POSITIVE_INFINITY);
    std::fill(curr, curr + len, POSITIVE_INFINITY);

    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t lo = i >= w ? i - w : 0;
      const std::size_t hi = std::min(len - 1, i + w);
      double row_min = POSITIVE_INFINITY;
      double left = POSITIVE_INFINITY;
      for (std::size_t j = lo; j <= hi; ++j) {
        const double cost = detail::square(a[i] - b[j]);
        double best;
        if (i == 0 && j == 0) {
          best = 0.0;
        } else {
          const double up = prev[j];
          const double diag = j > 0 ? prev[j - 1] : POSITIVE_INFINITY;
          best = std::min({left, up, diag});
        }
        const double cell = cost + best;
        curr[j] = cell;
        left = cell;
        row_min = std::min(row_min, cell);
      }
      if (row_min > abandon_sq) { return POSITIVE_INFINITY; }
      std::swap(prev, curr);
    }
    return std::sqrt(prev[len - 1]);
  }

  [[nodiscard]] inline double dtw(std::span<const double> a, std::span<const double> b, std::size_t w,
                                  double abandon_at = POSITIVE_INFINITY) {
    DtwWorkspace ws;
    return dtw(a, b, w, abandon_at, ws);
  }

} // namespace swamp
