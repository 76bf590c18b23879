#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace swamp {

  inline constexpr double POSITIVE_INFINITY = std::numeric_limits<double>::infinity();

  /// Absolute tolerance used when comparing distances.
  inline constexpr double DEFAULT_EPSILON = 1e-9;

  /// Below this standard deviation a subsequence is treated as constant and z-normalizes to zeros.
  inline constexpr double DEGENERATE_STD = 1e-12;

  inline constexpr std::size_t NO_INDEX = std::numeric_limits<std::size_t>::max();

  /// Raised for malformed input data (as opposed to a bad configuration).
  class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  enum class Normalization { raw, znorm };

  [[nodiscard]] inline std::string_view to_string(Normalization mode) {
    return mode == Normalization::raw ? "raw" : "znorm";
  }

  [[nodiscard]] inline std::optional<Normalization> parse_normalization(std::string_view text) {
    if (text == "raw") { return Normalization::raw; }
    if (text == "znorm") { return Normalization::znorm; }
    return std::nullopt;
  }

  /// A finite-valued time series. Immutable once built.
  class TimeSeries {
  public:
    TimeSeries() = default;

    explicit TimeSeries(std::vector<double> values, std::string name = {})
      : values_(std::move(values)), name_(std::move(name)) {
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
          throw DataError("non-finite value at position " + std::to_string(i + 1));
        }
      }
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    /// Raw (unnormalized) subsequence starting at 0-based offset `start`.
    [[nodiscard]] std::span<const double> subsequence(std::size_t start, std::size_t length) const {
      if (length == 0 || start + length > values_.size()) {
        throw std::out_of_range("subsequence [" + std::to_string(start) + ", +" + std::to_string(length)
                                + ") outside series of length " + std::to_string(values_.size()));
      }
      return std::span<const double>(values_).subspan(start, length);
    }

  private:
    std::vector<double> values_;
    std::string name_;
  };

  /// Parameters of one motif search.
  ///
  /// Positions are 0-based inside the library. Reports and the command line use 1-based positions.
  struct SearchConfig {
    std::size_t length = 0;            ///< subsequence length L
    std::size_t window = 0;            ///< Sakoe-Chiba radius w, absolute
    Normalization normalization = Normalization::raw;
    double epsilon = DEFAULT_EPSILON;  ///< tie / comparison tolerance on distances

    bool operator==(const SearchConfig&) const = default;
  };

  /// Number of subsequence start positions.
  [[nodiscard]] constexpr std::size_t subsequence_count(std::size_t n, std::size_t length) noexcept {
    return (length == 0 || length > n) ? 0 : n - length + 1;
  }

  /// Number of unordered non-trivially-matching pairs, |i - j| >= L.
  [[nodiscard]] constexpr std::uint64_t nontrivial_pair_count(std::size_t n, std::size_t length) noexcept {
    const std::size_t m = subsequence_count(n, length);
    if (m <= length) { return 0; }
    const std::uint64_t k = m - length;
    return k * (k + 1) / 2;
  }

  /// Throws std::invalid_argument unless `cfg` admits a motif search over a series of length n.
  inline void validate(const SearchConfig& cfg, std::size_t n) {
    if (cfg.length < 4) {
      throw std::invalid_argument("subsequence length must be at least 4, got " + std::to_string(cfg.length));
    }
    if (cfg.window > cfg.length - 1) {
      throw std::invalid_argument("warping window " + std::to_string(cfg.window) + " exceeds length - 1 = "
                                  + std::to_string(cfg.length - 1));
    }
    if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) {
      throw std::invalid_argument("epsilon must be finite and non-negative");
    }
    // One non-trivial pair needs two starts at least L apart.
    if (n < 2 * cfg.length) {
      throw std::invalid_argument("series of length " + std::to_string(n) + " is too short for length "
                                  + std::to_string(cfg.length) + " (need at least " + std::to_string(2 * cfg.length)
                                  + ")");
    }
  }

  // --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- ---
  // Sliding statistics
  // --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- ---

  struct SlidingStats {
    std::vector<double> means;
    std::vector<double> stds;  ///< population standard deviation
  };

  /// Mean and population std of every length-L window, in one pass.
  ///
  /// Uses a sliding Welford update; the accumulators are rebuilt from scratch every `REFRESH` windows so
  /// rounding drift stays bounded on long series.
  [[nodiscard]] inline SlidingStats sliding_stats(std::span<const double> values, std::size_t length) {
    constexpr std::size_t REFRESH = 1024;
    const std::size_t n = values.size();
    if (length < 1 || length > n) {
      throw std::invalid_argument("window length " + std::to_string(length) + " out of range [1, "
                                  + std::to_string(n) + "]");
    }
    const std::size_t m = n - length + 1;
    SlidingStats out;
    out.means.resize(m);
    out.stds.resize(m);

    const auto dl = static_cast<double>(length);
    double mean = 0;
    double m2 = 0;
    auto rebuild = [&](std::size_t start) {
      mean = 0;
      m2 = 0;
      for (std::size_t k = 0; k < length; ++k) {
        const double x = values[start + k];
        const double delta = x - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (x - mean);
      }
    };

    rebuild(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (i > 0) {
        if (i % REFRESH == 0) {
          rebuild(i);
        } else {
          const double x_out = values[i - 1];
          const double x_in = values[i + length - 1];
          const double old_mean = mean;
          mean += (x_in - x_out) / dl;
          m2 += (x_in - x_out) * (x_in - mean + x_out - old_mean);
        }
      }
      out.means[i] = mean;
      out.stds[i] = std::sqrt(std::max(0.0, m2 / dl));
      // Near-flat windows: the running update leaves residue proportional to the magnitude, redo two-pass.
      if (out.stds[i] < 1e-6 * (1.0 + std::abs(mean))) {
        double sum = 0;
        for (std::size_t k = 0; k < length; ++k) { sum += values[i + k]; }
        const double exact_mean = sum / dl;
        double ss = 0;
        for (std::size_t k = 0; k < length; ++k) {
          const double d = values[i + k] - exact_mean;
          ss += d * d;
        }
        out.means[i] = exact_mean;
        out.stds[i] = std::sqrt(ss / dl);
      }
    }
    return out;
  }

  /// Writes the z-normalized copy of `src` into `dst`. Constant inputs map to zeros.
  inline void znormalize_into(std::span<const double> src, double mean, double sd, std::span<double> dst) {
    if (sd < DEGENERATE_STD) {
      std::fill(dst.begin(), dst.end(), 0.0);
      return;
    }
    const double inv = 1.0 / sd;
    for (std::size_t k = 0; k < src.size(); ++k) { dst[k] = (src[k] - mean) * inv; }
  }

  /// Subsequence at 0-based `start`, optionally z-normalized.
  [[nodiscard]] inline std::vector<double> subsequence_view(const TimeSeries& ts, std::size_t start, std::size_t length,
                                                            Normalization mode) {
    if (length < 1 || length > ts.size() || start > ts.size() - length) {
      throw std::out_of_range("subsequence start " + std::to_string(start + 1) + " out of range [1, "
                              + std::to_string(subsequence_count(ts.size(), length)) + "]");
    }
    const auto raw = ts.subsequence(start, length);
    std::vector<double> out(raw.begin(), raw.end());
    if (mode == Normalization::znorm) {
      const auto stats = sliding_stats(raw, length);
      znormalize_into(raw, stats.means[0], stats.stds[0], out);
    }
    return out;
  }

} // namespace swamp
