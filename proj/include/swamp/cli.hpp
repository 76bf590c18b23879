#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bench.hpp"
#include "core.hpp"
#include "generate.hpp"
#include "ingest.hpp"
#include "oracle.hpp"
#include "report.hpp"
#include "search.hpp"

namespace swamp::cli {

  inline constexpr int EXIT_OK = 0;
  inline constexpr int EXIT_USAGE = 1;
  inline constexpr int EXIT_DATA = 2;

  /// Raised for bad flags or combinations of flags.
  class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  struct Options {
    std::string input;
    std::string column;
    std::string generate;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double noise = 0;
    std::size_t length = 0;
    std::optional<std::size_t> window;
    std::optional<double> window_frac;
    std::string mode = "raw";
    std::string output;
    std::string dump_dir;
    unsigned threads = 1;
    bool no_timings = false;
    bool force = false;
    std::size_t pairs = 1000;
    std::uint64_t sample_seed = 0;
    std::vector<std::size_t> levels;
  };

  namespace detail {

    [[nodiscard]] inline std::string format_value(double v) {
      if (std::isinf(v)) { return v > 0 ? "inf" : "-inf"; }
      std::ostringstream os;
      os << std::setprecision(17) << v;
      return os.str();
    }

    inline void write_column(const std::filesystem::path& path, const std::vector<double>& values) {
      std::ofstream out(path);
      if (!out) { throw DataError("cannot write '" + path.string() + "'"); }
      for (double v : values) { out << format_value(v) << '\n'; }
    }

    [[nodiscard]] inline SearchConfig make_config(const Options& o) {
      if (o.window && o.window_frac) { throw UsageError("--window and --window-frac are mutually exclusive"); }
      SearchConfig cfg;
      cfg.length = o.length;
      if (o.window_frac) {
        if (!(*o.window_frac >= 0.0 && *o.window_frac <= 1.0)) { throw UsageError("--window-frac must be in [0, 1]"); }
        cfg.window = static_cast<std::size_t>(std::floor(*o.window_frac * static_cast<double>(o.length)));
        cfg.window = std::min(cfg.window, o.length == 0 ? 0 : o.length - 1);
      } else {
        cfg.window = o.window.value_or(0);
      }
      const auto mode = parse_normalization(o.mode);
      if (!mode) { throw UsageError("--mode must be raw or znorm"); }
      cfg.normalization = *mode;
      return cfg;
    }

    /// Loads or generates the series named by the options.
    [[nodiscard]] inline std::pair<TimeSeries, InputDescriptor> load_input(const Options& o) {
      InputDescriptor desc;
      if (!o.input.empty() && !o.generate.empty()) { throw UsageError("--input and --generate are mutually exclusive"); }
      if (!o.input.empty()) {
        desc.path = o.input;
        desc.column = o.column;
        TimeSeries ts = ingest_file(o.input, o.column);
        desc.n = ts.size();
        return {std::move(ts), desc};
      }
      if (o.generate.empty()) { throw UsageError("one of --input or --generate is required"); }
      const auto kind = parse_generator(o.generate);
      if (!kind) { throw UsageError("--generate must be random-walk or planted-motif"); }
      if (o.n == 0) { throw UsageError("--generate needs --n"); }
      desc.generator = kind;
      desc.n = o.n;
      desc.seed = o.seed;
      desc.noise = o.noise;
      if (*kind == GeneratorKind::random_walk) { return {random_walk(o.n, o.seed), desc}; }
      if (o.length == 0) { throw UsageError("planted-motif needs --length"); }
      return {planted_motif(o.n, o.length, o.seed, o.noise).series, desc};
    }

    inline void emit(const Options& o, const std::string& text, std::ostream& out) {
      if (o.output.empty()) {
        out << text;
        return;
      }
      std::ofstream file(o.output);
      if (!file) { throw DataError("cannot write '" + o.output + "'"); }
      file << text;
    }

    [[nodiscard]] inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

    inline int run_find(const Options& o, std::ostream& out) {
      const SearchConfig cfg = make_config(o);
      auto [ts, desc] = load_input(o);
      validate(cfg, ts.size());
      SearchOptions sopts;
      sopts.threads = o.threads;
      sopts.keep_levels = !o.dump_dir.empty();
      PhaseOneState state = compute_dsmp(ts, cfg, sopts);
      const MotifResult result = refine(ts, cfg, state, sopts);
      RunReport report = make_report("find", desc, cfg, result, !o.no_timings);
      if (!o.dump_dir.empty()) {
        const std::filesystem::path dir(o.dump_dir);
        std::filesystem::create_directories(dir);
        report.dump_dir = o.dump_dir;
        write_column(dir / "ed_mp.csv", state.ed_profile.distances);
        report.dump_files.push_back("ed_mp.csv");
        for (const auto& level : state.levels) {
          const std::string name = "lbmp_D" + std::to_string(level.factor) + ".csv";
          write_column(dir / name, level.lbmp);
          report.dump_files.push_back(name);
        }
      }
      emit(o, dump_json(to_json(report)), out);
      return EXIT_OK;
    }

    inline int run_oracle(const Options& o, std::ostream& out) {
      const SearchConfig cfg = make_config(o);
      auto [ts, desc] = load_input(o);
      validate(cfg, ts.size());
      const auto start = swamp::detail::Clock::now();
      const auto mp = oracle::brute_force_dtw_mp(ts, cfg, o.threads, o.force);
      const auto motif = oracle::motif_from_profile(ts, cfg, mp);
      MotifResult result;
      result.first = motif.first;
      result.second = motif.second;
      result.distance = motif.distance;
      result.stats.positions = mp.distances.size();
      result.stats.total_pairs = nontrivial_pair_count(ts.size(), cfg.length);
      result.stats.phase_two_dtw_calls = motif.dtw_calls;
      result.stats.phase_two_seconds = swamp::detail::seconds_since(start);
      RunReport report = make_report("oracle", desc, cfg, result, !o.no_timings);
      if (!o.dump_dir.empty()) {
        const std::filesystem::path dir(o.dump_dir);
        std::filesystem::create_directories(dir);
        report.dump_dir = o.dump_dir;
        write_column(dir / "dtw_mp.csv", mp.distances);
        report.dump_files.push_back("dtw_mp.csv");
      }
      emit(o, dump_json(to_json(report)), out);
      return EXIT_OK;
    }

    inline int run_bench(const Options& o, std::ostream& out) {
      const SearchConfig cfg = make_config(o);
      auto [ts, desc] = load_input(o);
      validate(cfg, ts.size());
      BenchOptions bopts;
      bopts.pairs = o.pairs;
      bopts.seed = o.sample_seed;
      bopts.levels = o.levels;
      const BenchResult bench = bench_lb(ts, cfg, bopts);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : bench.rows) {
        nlohmann::json row = {{"bound", r.name}, {"factor", r.factor}, {"mean_tightness", r.mean_tightness}};
        if (!o.no_timings) { row["mean_seconds"] = r.mean_seconds; }
        rows.push_back(std::move(row));
      }
      const nlohmann::json doc = {{"command", "bench-lb"},
                                  {"input", input_to_json(desc)},
                                  {"config", config_to_json(cfg)},
                                  {"pairs_used", bench.pairs_used},
                                  {"pairs_skipped", bench.pairs_skipped},
                                  {"rows", rows}};
      emit(o, dump_json(doc), out);
      return EXIT_OK;
    }

    inline int run_generate(const Options& o, std::ostream& out) {
      auto [ts, desc] = load_input(o);
      std::ostringstream os;
      for (double v : ts.values()) { os << format_value(v) << '\n'; }
      emit(o, os.str(), out);
      return EXIT_OK;
    }

  } // namespace detail

  /// Entry point shared by the executable and the tests. `args` excludes the program name.
  inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact DTW motif discovery", "swamp"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool search) {
      sub->add_option("--input", o.input, "Input file: one value per line, or CSV with --column");
      sub->add_option("--column", o.column, "CSV column name or 1-based index");
      sub->add_option("--generate", o.generate, "Synthetic input: random-walk | planted-motif");
      sub->add_option("--n", o.n, "Generated series length");
      sub->add_option("--seed", o.seed, "Generator seed");
      sub->add_option("--noise", o.noise, "Noise std of the planted copy");
      sub->add_option("--output", o.output, "Write output here instead of stdout");
      if (search) {
        sub->add_option("--length", o.length, "Subsequence length L")->required();
        sub->add_option("--window", o.window, "Warping window (absolute)");
        sub->add_option("--window-frac", o.window_frac, "Warping window as a fraction of L (floored)");
        sub->add_option("--mode", o.mode, "raw | znorm")->check(CLI::IsMember({"raw", "znorm"}));
        sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--no-timings", o.no_timings, "Omit wall-clock timings from the report");
      } else {
        sub->add_option("--length", o.length, "Motif length for planted-motif");
      }
    };

    auto* find = app.add_subcommand("find", "Exact top-1 DTW motif");
    add_common(find, true);
    find->add_option("--dump-profiles", o.dump_dir, "Write ED MP and per-level LB profiles as CSV here");

    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force top-1 DTW motif");
    add_common(oracle_cmd, true);
    oracle_cmd->add_option("--dump-profiles", o.dump_dir, "Write the DTW matrix profile as CSV here");
    oracle_cmd->add_flag("--force", o.force, "Allow series longer than 20000");

    auto* bench = app.add_subcommand("bench-lb", "Tightness and cost of each lower bound");
    add_common(bench, true);
    bench->add_option("--pairs", o.pairs, "Number of sampled pairs")->check(CLI::PositiveNumber);
    bench->add_option("--sample-seed", o.sample_seed, "Seed for pair sampling");
    bench->add_option("--levels", o.levels, "Downsampling factors (default L, L/2, ..., 1)")->delimiter(',');

    auto* gen = app.add_subcommand("generate", "Write a synthetic series, one value per line");
    add_common(gen, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return EXIT_OK;
    } catch (const CLI::ParseError& e) {
      err << "usage error: " << e.what() << "\n";
      return EXIT_USAGE;
    }

    try {
      if (find->parsed()) { return detail::run_find(o, out); }
      if (oracle_cmd->parsed()) { return detail::run_oracle(o, out); }
      if (bench->parsed()) { return detail::run_bench(o, out); }
      return detail::run_generate(o, out);
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << "\n";
      return EXIT_USAGE;
    } catch (const std::invalid_argument& e) {
      err << "usage error: " << e.what() << "\n";
      return EXIT_USAGE;
    } catch (const std::exception& e) {
      err << "data error: " << e.what() << "\n";
      return EXIT_DATA;
    }
  }

} // namespace swamp::cli
