#include "cgtree/benchmark.hpp"
#include "cgtree/sampling.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace cgtree;

namespace {

struct Common {
  std::string data;
  std::string schema;
  bool header = false;
  int depth = 2;
  std::uint64_t seed = 1;
  double time_limit = 600.0;
  bool big_data = false;
  bool no_big_data = false;
  std::string exact = "enumeration";
  std::string out = "out";
};

void add_solver_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--time-limit", c.time_limit, "CGH time limit in seconds (CGH_TIME_LIMIT overrides)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--big-data", c.big_data, "skip exact pricing (on by default above 10000 training rows)");
  cmd->add_flag("--no-big-data", c.no_big_data, "never switch to big-data mode");
  cmd->add_option("--exact", c.exact, "exact pricing route")->check(CLI::IsMember({"enumeration", "milp"}));
}

CghConfig make_config(const Common& c) {
  CghConfig cfg;
  cfg.depth = c.depth;
  cfg.seed = c.seed;
  cfg.time_limit_seconds = c.time_limit;
  if (const char* env = std::getenv("CGH_TIME_LIMIT")) {
    try {
      cfg.time_limit_seconds = std::stod(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("CGH_TIME_LIMIT is not a number: ") + env);
    }
  }
  if (c.big_data) cfg.big_data = true;
  if (c.no_big_data) cfg.big_data = false;
  cfg.exact = c.exact == "milp" ? ExactPricing::milp : ExactPricing::enumeration;
  return cfg;
}

Dataset load(const Common& c) {
  std::optional<fs::path> schema;
  if (!c.schema.empty()) schema = c.schema;
  return load_dataset(c.data, schema, c.header);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  return os;
}

int cmd_train(const Common& c, const std::string& method_name) {
  const auto d = load(c);
  const auto method = parse_method(method_name);
  auto cfg = make_config(c);
  const fs::path out(c.out);
  auto log = open_out(out, "run.log");
  cfg.log = &log;
  const auto split = split_train_test(d, c.seed);
  log << "data=" << c.data << " rows=" << d.n_rows() << " features=" << d.n_features() << " classes=" << d.n_classes()
      << " train=" << split.train.size() << " test=" << split.test.size() << " method=" << method_name << '\n';
  const auto run = run_method(method, d, split, cfg);
  save_model(out / "model.json", run.tree);
  auto metrics = open_out(out, "metrics.csv");
  write_metrics_csv(metrics, fs::path(c.data).stem().string(), c.depth, c.seed, method, run);
  std::cout << method_name << " train=" << run.train_accuracy << " test=" << run.test_accuracy << " seconds="
            << run.wall_seconds << " termination=" << run.termination << '\n';
  return 0;
}

int cmd_sample(const Common& c, int tau) {
  const auto d = load(c);
  const auto split = split_train_test(d, c.seed);
  SamplingParams p;
  p.seed = c.seed;
  p.tau = tau;
  const auto r = run_threshold_sampling(d, split.train, c.depth, p);
  auto os = open_out(c.out, "splits.csv");
  write_splits(os, r.splits, r.frequencies);
  std::cout << "iterations=" << r.iterations << " splits=" << r.splits.total() << '\n';
  return 0;
}

int cmd_benchmark(const Common& c, const std::vector<std::string>& data, const std::vector<int>& depths,
                  const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& methods, unsigned jobs) {
  std::vector<Dataset> loaded;
  std::vector<std::string> names;
  for (const auto& path : data) {
    loaded.push_back(load_dataset(path, std::nullopt, c.header));
    names.push_back(fs::path(path).stem().string());
  }
  BenchmarkSpec spec;
  for (std::size_t i = 0; i < loaded.size(); ++i) spec.datasets.push_back({names[i], &loaded[i]});
  spec.depths = depths;
  spec.seeds = seeds;
  spec.methods.clear();
  for (const auto& m : methods) spec.methods.push_back(parse_method(m));
  spec.cgh = make_config(c);
  spec.jobs = jobs;
  const fs::path out(c.out);
  auto log = open_out(out, "run.log");
  spec.log = &log;
  const auto report = run_benchmark(spec);
  auto csv = open_out(out, "report.csv");
  write_report_csv(csv, report);
  write_report_csv(std::cout, report);
  if (!report.all_ok()) {
    std::cerr << "some cells failed; see " << (out / "report.csv").string() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Column-generation classification trees"};
  app.require_subcommand(1);

  Common train_opts;
  std::string method = "cgh";
  auto* train = app.add_subcommand("train", "train one model on a seeded 50/25 split");
  train->add_option("--data", train_opts.data, "CSV file")->required()->check(CLI::ExistingFile);
  train->add_option("--schema", train_opts.schema, "schema file (default: <data stem>.schema if present)")
      ->check(CLI::ExistingFile);
  train->add_flag("--header", train_opts.header, "first CSV line is a header");
  train->add_option("--depth", train_opts.depth, "tree depth")->check(CLI::Range(1, 6));
  train->add_option("--method", method, "cart, cart_star or cgh")->check(CLI::IsMember({"cart", "cart_star", "cgh"}));
  train->add_option("--seed", train_opts.seed, "split and sampling seed");
  train->add_option("--out", train_opts.out, "output directory");
  add_solver_flags(train, train_opts);

  Common bench_opts;
  std::vector<std::string> bench_data;
  std::vector<int> depths{2};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::string> methods{"cart", "cart_star", "cgh"};
  unsigned jobs = 1;
  auto* bench = app.add_subcommand("benchmark", "CART, CART* and CGH over datasets, depths and seeds");
  bench->add_option("--data", bench_data, "CSV files (repeatable)")->required()->check(CLI::ExistingFile);
  bench->add_flag("--header", bench_opts.header, "first CSV line is a header when no schema says otherwise");
  bench->add_option("--depth,--depths", depths, "tree depths")->delimiter(',')->check(CLI::Range(1, 6));
  bench->add_option("--seed,--seeds", seeds, "split seeds")->delimiter(',');
  bench->add_option("--method,--methods", methods, "methods")
      ->delimiter(',')
      ->check(CLI::IsMember({"cart", "cart_star", "cgh"}));
  bench->add_option("--jobs", jobs, "concurrent cells")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_opts.out, "output directory");
  add_solver_flags(bench, bench_opts);

  Common sample_opts;
  int tau = 300;
  auto* sample = app.add_subcommand("sample-splits", "run threshold sampling and dump the split sets");
  sample->add_option("--data", sample_opts.data, "CSV file")->required()->check(CLI::ExistingFile);
  sample->add_option("--schema", sample_opts.schema, "schema file")->check(CLI::ExistingFile);
  sample->add_flag("--header", sample_opts.header, "first CSV line is a header");
  sample->add_option("--depth", sample_opts.depth, "tree depth")->check(CLI::Range(1, 6));
  sample->add_option("--seed", sample_opts.seed, "split and sampling seed");
  sample->add_option("--tau", tau, "stall length")->check(CLI::PositiveNumber);
  sample->add_option("--out", sample_opts.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (*train) return cmd_train(train_opts, method);
    if (*bench) return cmd_benchmark(bench_opts, bench_data, depths, seeds, methods, jobs);
    if (*sample) return cmd_sample(sample_opts, tau);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
