#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace swamp {

  enum class GeneratorKind { random_walk, planted_motif };

  [[nodiscard]] inline std::string_view to_string(GeneratorKind kind) {
    return kind == GeneratorKind::random_walk ? "random-walk" : "planted-motif";
  }

  [[nodiscard]] inline std::optional<GeneratorKind> parse_generator(std::string_view text) {
    if (text == "random-walk") { return GeneratorKind::random_walk; }
    if (text == "planted-motif") { return GeneratorKind::planted_motif; }
    return std::nullopt;
  }

  /// Cumulative sum of n standard-normal steps. Deterministic per seed.
  [[nodiscard]] inline std::vector<double> random_walk_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 1.0);
    std::vector<double> out(n);
    double x = 0;
    for (auto& v : out) {
      x += step(rng);
      v = x;
    }
    return out;
  }

  [[nodiscard]] inline TimeSeries random_walk(std::size_t n, std::uint64_t seed) {
    if (n < 1) { throw std::invalid_argument("random walk needs n >= 1"); }
    return TimeSeries(random_walk_values(n, seed), "random-walk");
  }

  struct PlantedMotif {
    TimeSeries series;
    std::size_t source = 0;  ///< 0-based start of the original pattern
    std::size_t copy = 0;    ///< 0-based start of the perturbed copy
  };

  /// Random walk with its length-L block at `source` copied over a non-overlapping block at `copy`,
  /// plus Gaussian noise of standard deviation `noise` on the copy.
  [[nodiscard]] inline PlantedMotif planted_motif(std::size_t n, std::size_t length, std::uint64_t seed, double noise) {
    if (length < 1 || n < 2 * length) {
      throw std::invalid_argument("planted motif needs n >= 2L (n = " + std::to_string(n) + ", L = "
                                  + std::to_string(length) + ")");
    }
    if (!(noise >= 0.0) || !std::isfinite(noise)) { throw std::invalid_argument("noise must be finite and >= 0"); }
    auto values = random_walk_values(n, seed);
    // A separate stream so the walk itself matches random_walk(n, seed).
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const std::size_t m = n - length + 1;
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    std::size_t a = 0;
    std::size_t b = 0;
    for (;;) {
      a = pick(rng);
      const std::size_t left = a >= length ? a - length + 1 : 0;        // choices in [0, a - L]
      const std::size_t right = a + length < m ? m - (a + length) : 0;  // choices in [a + L, m - 1]
      if (left + right == 0) { continue; }
      const std::size_t r = std::uniform_int_distribution<std::size_t>(0, left + right - 1)(rng);
      b = r < left ? r : a + length + (r - left);
      break;
    }
    std::normal_distribution<double> jitter(0.0, 1.0);
    for (std::size_t k = 0; k < length; ++k) {
      values[b + k] = values[a + k] + (noise > 0 ? noise * jitter(rng) : 0.0);
    }
    return {TimeSeries(std::move(values), "planted-motif"), a, b};
  }

} // namespace swamp
