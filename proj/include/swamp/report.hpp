#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "generate.hpp"
#include "search.hpp"

namespace swamp {

  /// Where the series came from: a file, or a generator and its parameters.
  struct InputDescriptor {
    std::string path;
    std::string column;
    std::optional<GeneratorKind> generator;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double noise = 0;

    bool operator==(const InputDescriptor&) const = default;
  };

  /// Result of a `find` or `oracle` run. Motif positions are 1-based here.
  struct RunReport {
    std::string command;
    InputDescriptor input;
    SearchConfig config;
    std::size_t i = 0;
    std::size_t j = 0;
    double distance = 0;
    SearchStats stats;
    bool timings = true;
    std::optional<std::string> dump_dir;
    std::vector<std::string> dump_files;
  };

  // --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- ---
  // JSON
  // --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- --- ---

  namespace detail {

    using nlohmann::json;

    /// JSON has no infinity; +inf travels as null.
    [[nodiscard]] inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

    [[nodiscard]] inline double number_or_inf(const json& j) {
      return j.is_null() ? POSITIVE_INFINITY : j.get<double>();
    }

  } // namespace detail

  [[nodiscard]] inline nlohmann::json input_to_json(const InputDescriptor& in) {
    nlohmann::json j;
    if (in.generator) {
      j["generator"] = std::string(to_string(*in.generator));
      j["seed"] = in.seed;
      j["noise"] = in.noise;
    } else {
      j["path"] = in.path;
      if (!in.column.empty()) { j["column"] = in.column; }
    }
    j["n"] = in.n;
    return j;
  }

  [[nodiscard]] inline InputDescriptor input_from_json(const nlohmann::json& j) {
    InputDescriptor in;
    if (j.contains("generator")) {
      in.generator = parse_generator(j.at("generator").get<std::string>());
      in.seed = j.at("seed").get<std::uint64_t>();
      in.noise = j.at("noise").get<double>();
    } else {
      in.path = j.at("path").get<std::string>();
      in.column = j.value("column", std::string{});
    }
    in.n = j.at("n").get<std::size_t>();
    return in;
  }

  [[nodiscard]] inline nlohmann::json config_to_json(const SearchConfig& cfg) {
    return {{"length", cfg.length},
            {"window", cfg.window},
            {"mode", std::string(to_string(cfg.normalization))},
            {"epsilon", cfg.epsilon}};
  }

  [[nodiscard]] inline SearchConfig config_from_json(const nlohmann::json& j) {
    SearchConfig cfg;
    cfg.length = j.at("length").get<std::size_t>();
    cfg.window = j.at("window").get<std::size_t>();
    cfg.normalization = parse_normalization(j.at("mode").get<std::string>()).value_or(Normalization::raw);
    cfg.epsilon = j.at("epsilon").get<double>();
    return cfg;
  }

  [[nodiscard]] inline nlohmann::json stats_to_json(const SearchStats& s, bool timings) {
    using detail::finite_or_null;
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : s.levels) {
      nlohmann::json e = {{"factor", l.factor},
                          {"pruned", l.pruned_before + l.newly_pruned},
                          {"newly_pruned", l.newly_pruned},
                          {"lbmp_min", finite_or_null(l.lbmp_min)},
                          {"lb_evaluations", l.lb_evaluations},
                          {"confirmed", l.confirmed},
                          {"confirmation_distance", finite_or_null(l.confirmation_distance)},
                          {"best_so_far", finite_or_null(l.best_so_far)}};
      if (timings) { e["seconds"] = l.seconds; }
      levels.push_back(std::move(e));
    }
    nlohmann::json j = {
      {"p", s.pruned_fraction},
      {"positions", s.positions},
      {"total_pairs", s.total_pairs},
      {"pruned_before_phase_two", s.pruned_before_phase_two},
      {"pruned_in_phase_two", s.pruned_in_phase_two},
      {"pruned_per_level", levels},
      {"dtw_calls",
       {{"seed", s.seed_dtw_calls},
        {"confirmation", s.confirmation_dtw_calls},
        {"phase_two", s.phase_two_dtw_calls},
        {"total", s.total_dtw_calls()}}},
      {"lb_calls",
       {{"kim_fl", s.phase_two_kim_calls},
        {"keogh", s.phase_two_keogh_calls},
        {"phase_one_blocks", s.phase_one_lb_evaluations}}},
      {"pairs", {{"cascade", s.cascade_pairs}, {"predicted_bound", s.predicted_pair_bound()}}},
    };
    if (timings) {
      j["timings"] = {{"seed", s.seed_seconds}, {"phase_one", s.phase_one_seconds}, {"phase_two", s.phase_two_seconds}};
    }
    return j;
  }

  [[nodiscard]] inline SearchStats stats_from_json(const nlohmann::json& j) {
    using detail::number_or_inf;
    SearchStats s;
    s.pruned_fraction = j.at("p").get<double>();
    s.positions = j.at("positions").get<std::size_t>();
    s.total_pairs = j.at("total_pairs").get<std::uint64_t>();
    s.pruned_before_phase_two = j.at("pruned_before_phase_two").get<std::size_t>();
    s.pruned_in_phase_two = j.at("pruned_in_phase_two").get<std::size_t>();
    for (const auto& e : j.at("pruned_per_level")) {
      LevelStats l;
      l.factor = e.at("factor").get<std::size_t>();
      l.newly_pruned = e.at("newly_pruned").get<std::size_t>();
      l.pruned_before = e.at("pruned").get<std::size_t>() - l.newly_pruned;
      l.lbmp_min = number_or_inf(e.at("lbmp_min"));
      l.lb_evaluations = e.at("lb_evaluations").get<std::uint64_t>();
      l.confirmed = e.at("confirmed").get<bool>();
      l.confirmation_distance = number_or_inf(e.at("confirmation_distance"));
      l.best_so_far = number_or_inf(e.at("best_so_far"));
      l.seconds = e.value("seconds", 0.0);
      s.levels.push_back(l);
    }
    const auto& dtw = j.at("dtw_calls");
    s.seed_dtw_calls = dtw.at("seed").get<std::uint64_t>();
    s.confirmation_dtw_calls = dtw.at("confirmation").get<std::uint64_t>();
    s.phase_two_dtw_calls = dtw.at("phase_two").get<std::uint64_t>();
    const auto& lb = j.at("lb_calls");
    s.phase_two_kim_calls = lb.at("kim_fl").get<std::uint64_t>();
    s.phase_two_keogh_calls = lb.at("keogh").get<std::uint64_t>();
    s.phase_one_lb_evaluations = lb.at("phase_one_blocks").get<std::uint64_t>();
    s.cascade_pairs = j.at("pairs").at("cascade").get<std::uint64_t>();
    if (j.contains("timings")) {
      const auto& t = j.at("timings");
      s.seed_seconds = t.at("seed").get<double>();
      s.phase_one_seconds = t.at("phase_one").get<double>();
      s.phase_two_seconds = t.at("phase_two").get<double>();
    }
    return s;
  }

  [[nodiscard]] inline nlohmann::json to_json(const RunReport& r) {
    nlohmann::json j = {
      {"command", r.command},
      {"input", input_to_json(r.input)},
      {"config", config_to_json(r.config)},
      {"motif", {{"i", r.i}, {"j", r.j}, {"distance", r.distance}}},
      {"stats", stats_to_json(r.stats, r.timings)},
    };
    if (r.dump_dir) { j["dumps"] = {{"dir", *r.dump_dir}, {"files", r.dump_files}}; }
    return j;
  }

  [[nodiscard]] inline RunReport report_from_json(const nlohmann::json& j) {
    RunReport r;
    r.command = j.at("command").get<std::string>();
    r.input = input_from_json(j.at("input"));
    r.config = config_from_json(j.at("config"));
    const auto& motif = j.at("motif");
    r.i = motif.at("i").get<std::size_t>();
    r.j = motif.at("j").get<std::size_t>();
    r.distance = motif.at("distance").get<double>();
    r.stats = stats_from_json(j.at("stats"));
    r.timings = j.at("stats").contains("timings");
    if (j.contains("dumps")) {
      r.dump_dir = j.at("dumps").at("dir").get<std::string>();
      r.dump_files = j.at("dumps").at("files").get<std::vector<std::string>>();
    }
    return r;
  }

  /// Builds the report for a completed search.
  [[nodiscard]] inline RunReport make_report(std::string command, InputDescriptor input, const SearchConfig& cfg,
                                             const MotifResult& result, bool timings) {
    RunReport r;
    r.command = std::move(command);
    r.input = std::move(input);
    r.config = cfg;
    r.i = result.first + 1;
    r.j = result.second + 1;
    r.distance = result.distance;
    r.stats = result.stats;
    r.timings = timings;
    return r;
  }

} // namespace swamp
