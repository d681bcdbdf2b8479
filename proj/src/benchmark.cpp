#include "cgtree/benchmark.hpp"

#include <atomic>
#include <chrono>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cgtree {

const char* to_string(Method m) {
  switch (m) {
    case Method::cart: return "cart";
    case Method::cart_star: return "cart_star";
    case Method::cgh: return "cgh";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "cart") return Method::cart;
  if (s == "cart_star") return Method::cart_star;
  if (s == "cgh") return Method::cgh;
  throw std::invalid_argument("unknown method '" + s + "' (expected cart, cart_star or cgh)");
}

Dataset load_dataset(const std::filesystem::path& csv, const std::optional<std::filesystem::path>& schema, bool header) {
  auto path = schema;
  if (!path) {
    auto sidecar = csv;
    sidecar.replace_extension(".schema");
    if (std::filesystem::exists(sidecar)) path = sidecar;
  }
  if (path) return load_csv(csv, Schema::read(*path), header);
  return load_csv(csv, std::nullopt, header);
}

MethodRun run_method(Method m, const Dataset& d, const SplitPartition& split, const CghConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  MethodRun out;
  auto score_cart = [&](const CartTree& t) {
    out.train_accuracy = t.accuracy(d, split.train);
    out.test_accuracy = t.accuracy(d, split.test);
    out.termination = "done";
  };
  auto full_depth = [&](const CartTree& t) {
    const auto pad = fallback_splits(d, split.train, static_cast<std::size_t>(cfg.depth));
    return align_cart_to_topology(t, cfg.depth, RestrictedSplits(std::vector<std::vector<Split>>(
                                                    Topology(cfg.depth).n_internal(), pad)));
  };
  switch (m) {
    case Method::cart: {
      CartParams p;
      p.max_depth = cfg.depth;
      const auto t = build_cart(d, split.train, p);
      score_cart(t);
      out.tree = full_depth(t);
      break;
    }
    case Method::cart_star: {
      const auto r = tune_cart_star(d, split.train, cfg.depth);
      score_cart(r.tree);
      out.tree = full_depth(r.tree);
      break;
    }
    case Method::cgh: {
      auto r = run_cgh(d, split.train, cfg);
      out.tree = r.tree;
      out.train_accuracy = r.train_accuracy;
      out.test_accuracy = evaluate(r, d, split.test);
      out.termination = to_string(r.termination);
      out.lp_integral = r.lp_was_integral;
      out.cgh = std::move(r);
      break;
    }
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

bool ExperimentReport::all_ok() const {
  for (const auto& r : rows)
    if (!r.ok()) return false;
  return true;
}

ExperimentReport run_benchmark(const BenchmarkSpec& spec) {
  struct Cell {
    std::size_t dataset;
    int depth;
    std::uint64_t seed;
    Method method;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < spec.datasets.size(); ++i)
    for (int k : spec.depths)
      for (auto seed : spec.seeds)
        for (auto m : spec.methods) cells.push_back({i, k, seed, m});

  ExperimentReport report;
  report.rows.resize(cells.size());
  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      const auto& cell = cells[c];
      const auto& named = spec.datasets[cell.dataset];
      auto& row = report.rows[c];
      row.dataset = named.name;
      row.depth = cell.depth;
      row.seed = cell.seed;
      row.method = cell.method;
      std::ostringstream cell_log;
      try {
        auto cfg = spec.cgh;
        cfg.depth = cell.depth;
        cfg.seed = cell.seed;
        cfg.log = spec.log ? &cell_log : nullptr;
        cfg.trace = nullptr;
        const auto split = split_train_test(*named.data, cell.seed);
        const auto run = run_method(cell.method, *named.data, split, cfg);
        row.train_accuracy = run.train_accuracy;
        row.test_accuracy = run.test_accuracy;
        row.wall_seconds = run.wall_seconds;
        row.termination = run.termination;
        row.lp_integral = run.lp_integral;
      } catch (const std::exception& e) {
        row.error = e.what();
        row.termination = "error";
      }
      if (spec.log) {
        std::lock_guard lock(log_mutex);
        *spec.log << "# " << row.dataset << " depth=" << row.depth << " seed=" << row.seed
                  << " method=" << to_string(row.method) << '\n'
                  << cell_log.str();
        if (!row.ok()) *spec.log << "error: " << row.error << '\n';
        spec.log->flush();
      }
    }
  };
  const unsigned jobs = std::max(1u, spec.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < spec.datasets.size(); ++i)
    for (int k : spec.depths)
      for (auto m : spec.methods) {
        ReportAverage a;
        a.dataset = spec.datasets[i].name;
        a.depth = k;
        a.method = m;
        std::size_t integral = 0, with_flag = 0;
        for (const auto& r : report.rows) {
          if (r.dataset != a.dataset || r.depth != k || r.method != m || !r.ok()) continue;
          ++a.runs;
          a.train_accuracy += r.train_accuracy;
          a.test_accuracy += r.test_accuracy;
          a.wall_seconds += r.wall_seconds;
          if (r.lp_integral) {
            ++with_flag;
            integral += *r.lp_integral;
          }
        }
        if (a.runs) {
          const auto n = static_cast<double>(a.runs);
          a.train_accuracy /= n;
          a.test_accuracy /= n;
          a.wall_seconds /= n;
        }
        if (with_flag) a.integral_ratio = static_cast<double>(integral) / static_cast<double>(with_flag);
        report.averages.push_back(a);
      }
  return report;
}

namespace {

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_report_csv(std::ostream& os, const ExperimentReport& r) {
  os << "kind,dataset,depth,seed,method,runs,train_accuracy,test_accuracy,wall_seconds,termination,lp_integral,error\n";
  os << std::setprecision(6);
  for (const auto& row : r.rows) {
    os << "run," << csv_field(row.dataset) << ',' << row.depth << ',' << row.seed << ',' << to_string(row.method)
       << ",1,";
    if (row.ok())
      os << row.train_accuracy << ',' << row.test_accuracy << ',' << row.wall_seconds;
    else
      os << ",,";
    os << ',' << row.termination << ',';
    if (row.lp_integral) os << (*row.lp_integral ? 1 : 0);
    os << ',' << csv_field(row.error) << '\n';
  }
  for (const auto& a : r.averages) {
    os << "average," << csv_field(a.dataset) << ',' << a.depth << ",," << to_string(a.method) << ',' << a.runs << ',';
    if (a.runs)
      os << a.train_accuracy << ',' << a.test_accuracy << ',' << a.wall_seconds;
    else
      os << ",,";
    os << ",,";
    if (a.integral_ratio) os << *a.integral_ratio;
    os << ",\n";
  }
}

void write_metrics_csv(std::ostream& os, const std::string& dataset, int depth, std::uint64_t seed, Method m,
                       const MethodRun& run) {
  os << "dataset,depth,seed,method,train_accuracy,test_accuracy,wall_seconds,termination,lp_integral,lp_bound,"
        "ilp_objective,iterations,columns_generated\n";
  os << csv_field(dataset) << ',' << depth << ',' << seed << ',' << to_string(m) << ',' << std::setprecision(17)
     << run.train_accuracy << ',' << run.test_accuracy << ',' << std::setprecision(6) << run.wall_seconds << ','
     << run.termination << ',';
  if (run.lp_integral) os << (*run.lp_integral ? 1 : 0);
  os << ',';
  if (run.cgh)
    os << std::setprecision(17) << run.cgh->lp_bound << ',' << run.cgh->ilp_objective << ',' << run.cgh->iterations
       << ',' << run.cgh->columns_generated;
  else
    os << ",,,";
  os << '\n';
}

}  // namespace cgtree
