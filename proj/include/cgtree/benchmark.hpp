#ifndef CGTREE_BENCHMARK_HPP
#define CGTREE_BENCHMARK_HPP

#include "cgtree/driver.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cgtree {

enum class Method { cart, cart_star, cgh };
const char* to_string(Method m);
Method parse_method(const std::string& s);

/// Loads a CSV, picking up `<stem>.schema` next to it when no schema path
/// is given.
Dataset load_dataset(const std::filesystem::path& csv, const std::optional<std::filesystem::path>& schema = std::nullopt,
                     bool header = false);

struct MethodRun {
  DecisionTree tree;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double wall_seconds = 0.0;
  std::string termination;  // CGH only; "done" for CART variants
  std::optional<bool> lp_integral;
  std::optional<CghResult> cgh;
};

/// Trains one method on the seeded 50/25 split and scores it.
MethodRun run_method(Method m, const Dataset& d, const SplitPartition& split, const CghConfig& cfg);

struct ReportRow {
  std::string dataset;
  int depth = 0;
  std::uint64_t seed = 0;
  Method method = Method::cart;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double wall_seconds = 0.0;
  std::string termination;
  std::optional<bool> lp_integral;
  std::string error;  // nonempty when the cell failed

  bool ok() const { return error.empty(); }
};

struct ReportAverage {
  std::string dataset;
  int depth = 0;
  Method method = Method::cart;
  std::size_t runs = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double wall_seconds = 0.0;
  std::optional<double> integral_ratio;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<ReportAverage> averages;

  bool all_ok() const;
};

struct NamedDataset {
  std::string name;
  const Dataset* data;
};

struct BenchmarkSpec {
  std::vector<NamedDataset> datasets;
  std::vector<int> depths{2};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<Method> methods{Method::cart, Method::cart_star, Method::cgh};
  CghConfig cgh;  // depth and seed are set per cell
  unsigned jobs = 1;
  std::ostream* log = nullptr;
};

/// Every (dataset, depth, seed, method) cell, in that nesting order, plus
/// averages over the successful seeds. A failing cell is recorded and the
/// run continues.
ExperimentReport run_benchmark(const BenchmarkSpec& spec);

void write_report_csv(std::ostream& os, const ExperimentReport& r);

/// metrics.csv for a single training run.
void write_metrics_csv(std::ostream& os, const std::string& dataset, int depth, std::uint64_t seed, Method m,
                       const MethodRun& run);

}  // namespace cgtree

#endif  // CGTREE_BENCHMARK_HPP
