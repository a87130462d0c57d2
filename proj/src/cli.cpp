#include "bmit/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bmit/baselines.hpp"
#include "bmit/data.hpp"
#include "bmit/multires.hpp"
#include "bmit/report.hpp"
#include "bmit/synth.hpp"

namespace bmit {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Input {
  std::string label;
  std::string bytes;
};

Input read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    return {"-", std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>())};
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open '" + path + "'");
  return {path, std::string(std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>())};
}

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double six_digits(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

struct DataArgs {
  std::string path;
  std::string x;
  std::string y;
  std::string col_hints;
  bool full_precision = false;
  bool timing = false;
};

void add_data_args(CLI::App& cmd, DataArgs& a) {
  cmd.add_option("data", a.path, "CSV file with a header row, or - for stdin")->required();
  cmd.add_option("--x", a.x, "X column")->required();
  cmd.add_option("--y", a.y, "Y column")->required();
  cmd.add_option("--col", a.col_hints, "column kinds, e.g. x:continuous,z:categorical");
  cmd.add_flag("--full-precision", a.full_precision, "print numbers at full precision");
  cmd.add_flag("--timing", a.timing, "include wall-clock duration in the report");
}

struct Loaded {
  Dataset data;
  json input;
};

Loaded load(const DataArgs& a, std::istream& in) {
  TypeHints hints;
  try {
    hints = parse_type_hints(a.col_hints);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Input input = read_input(a.path, in);
  std::istringstream stream(input.bytes);
  Dataset data = load_csv(stream, hints);
  json fingerprint{{"file", input.label},
                   {"fnv1a64", fnv1a(input.bytes)},
                   {"rows", data.n_rows()},
                   {"columns", data.n_cols()}};
  return {std::move(data), std::move(fingerprint)};
}

void require_column(const Dataset& data, const std::string& name) {
  if (!data.has_column(name)) throw UsageError("no column named '" + name + "'");
}

struct TestArgs {
  DataArgs data;
  std::vector<std::string> cond;
  TestConfig cfg;
  std::size_t max_iters = 0;
  std::string trace_path;
  bool baselines = false;
};

int cmd_test(const TestArgs& a, std::istream& in, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (a.data.x == a.data.y) throw UsageError("--x and --y name the same column");
  TestConfig cfg = a.cfg;
  if (a.max_iters > 0) cfg.max_iterations = a.max_iters;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  auto [data, input] = load(a.data, in);
  require_column(data, a.data.x);
  require_column(data, a.data.y);
  for (const auto& c : a.cond) require_column(data, c);
  const AxisVars vars{a.data.x, a.data.y, a.cond};
  const auto result = multires_test(data, vars, cfg);
  const auto num = [&](double v) { return a.data.full_precision ? v : six_digits(v); };

  const std::size_t max_iters = effective_max_iterations(data, vars, cfg);
  json config{{"x", vars.x},
              {"y", vars.y},
              {"cond", vars.cond},
              {"col", a.data.col_hints},
              {"prior", cfg.prior_independence},
              {"hyper", cfg.hyper},
              {"window", cfg.window},
              {"std_threshold", cfg.std_threshold},
              {"max_iters", max_iters},
              {"cond_cap", cfg.cond_candidate_cap},
              {"cond_in_pt", cfg.cond_in_pt}};

  json res{{"posterior_independence", num(result.posterior_independence)},
           {"posterior_dependence", num(1.0 - result.posterior_independence)},
           {"decision", result.independent ? "independent" : "dependent"},
           {"p_max", num(result.p_max)},
           {"t_star", result.t_star},
           {"iterations", result.trace.size()},
           {"resolution", result.t_star ? json(result.trace[result.t_star - 1].resolution) : json::array()},
           {"grid", boundaries_json(result.boundaries, vars)}};

  json report{{"schema", kSchemaVersion},
              {"command", "test"},
              {"input", input},
              {"config", config},
              {"result", res}};
  if (a.baselines) {
    const auto& xs = data.column(vars.x).values;
    const auto& ys = data.column(vars.y).values;
    report["baselines"] = {{"spearman", num(spearman(xs, ys))}, {"kendall", num(kendall_tau(xs, ys))}};
  }

  if (!a.trace_path.empty()) {
    std::ofstream trace(a.trace_path);
    if (!trace) throw UsageError("cannot write trace file '" + a.trace_path + "'");
    write_trace_jsonl(trace, result);
  }
  if (a.data.timing) {
    report["duration_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  out << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_baseline(const DataArgs& a, std::istream& in, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  auto [data, input] = load(a, in);
  require_column(data, a.x);
  require_column(data, a.y);
  const auto& xc = data.column(a.x);
  const auto& yc = data.column(a.y);
  if (!xc.kind.numeric() || !yc.kind.numeric()) {
    throw DataError("rank correlations need numeric columns");
  }
  const auto num = [&](double v) { return a.full_precision ? v : six_digits(v); };
  json report{{"schema", kSchemaVersion},
              {"command", "baseline"},
              {"input", input},
              {"x", a.x},
              {"y", a.y},
              {"spearman", num(spearman(xc.values, yc.values))},
              {"kendall", num(kendall_tau(xc.values, yc.values))}};
  if (a.timing) {
    report["duration_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  out << report.dump(2) << '\n';
  return kExitOk;
}

struct SynthArgs {
  std::string family;
  long long n = 1000;
  std::uint64_t seed = 0;
  double noise = 0.1;
  std::string out_path;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SynthSpec spec;
  try {
    spec.family = parse_family(a.family);
    if (a.n < 1) throw std::invalid_argument("--n must be at least 1");
    spec.n = static_cast<std::size_t>(a.n);
    spec.seed = a.seed;
    spec.noise = a.noise;
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Dataset data = generate(spec);
  if (a.out_path.empty()) {
    write_csv(out, data);
  } else {
    std::ofstream file(a.out_path, std::ios::binary);
    if (!file) throw UsageError("cannot write '" + a.out_path + "'");
    write_csv(file, data);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Bayesian multiresolution test of (conditional) independence", "bmit"};
  app.require_subcommand(1);

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "posterior probability that X and Y are independent");
  add_data_args(*test_cmd, test.data);
  test_cmd->add_option("--cond", test.cond, "conditioning columns")->delimiter(',');
  test_cmd->add_option("--prior", test.cfg.prior_independence, "prior probability of independence");
  test_cmd->add_option("--hyper", test.cfg.hyper, "Dirichlet hyperparameter");
  test_cmd->add_option("--window", test.cfg.window, "p(t) values in the stopping window");
  test_cmd->add_option("--std-threshold", test.cfg.std_threshold, "stop when the window's std is below this");
  test_cmd->add_option("--max-iters", test.max_iters, "iteration cap (default min(63, distinct-1))");
  test_cmd->add_option("--cond-cap", test.cfg.cond_candidate_cap, "conditioning tuples per iteration");
  test_cmd->add_option("--cond-in-pt", test.cfg.cond_in_pt, "conditioning moves contribute to p(t)");
  test_cmd->add_option("--threads", test.cfg.threads, "worker threads (0 = all cores)");
  test_cmd->add_option("--trace", test.trace_path, "write the per-iteration trace as JSON lines");
  test_cmd->add_flag("--baselines", test.baselines, "also report Spearman and Kendall coefficients");

  DataArgs baseline;
  auto* baseline_cmd = app.add_subcommand("baseline", "Spearman and Kendall rank correlations");
  add_data_args(*baseline_cmd, baseline);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset as CSV");
  synth_cmd->add_option("--family", synth.family,
                        "independent-uniform | independent-mixture | nonlinear-sine | checkerboard | ring")
      ->required();
  synth_cmd->add_option("--n", synth.n, "sample count");
  synth_cmd->add_option("--seed", synth.seed, "PRNG seed");
  synth_cmd->add_option("--noise", synth.noise, "noise standard deviation");
  synth_cmd->add_option("--out", synth.out_path, "output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*test_cmd) return cmd_test(test, in, out);
    if (*baseline_cmd) return cmd_baseline(baseline, in, out);
    return cmd_synth(synth, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace bmit
