#include "cgtree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace cgtree {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_fields(std::string_view line, char delim = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_missing(const std::string& s) { return s.empty() || s == "?" || s == "NA" || s == "nan"; }

FeatureKind parse_kind(const std::string& s) {
  if (s == "numeric") return FeatureKind::numeric;
  if (s == "ordinal") return FeatureKind::ordinal;
  if (s == "categorical") return FeatureKind::categorical;
  throw std::invalid_argument("unknown feature kind '" + s + "'");
}

}  // namespace

void Schema::validate(std::size_t n_columns) const {
  if (feature_names.empty()) throw std::invalid_argument("schema: at least one feature required");
  if (feature_kinds.size() != feature_names.size() || levels.size() != feature_names.size())
    throw std::invalid_argument("schema: per-feature arrays differ in length");
  if (target_column >= n_columns) throw std::invalid_argument("schema: target_column out of bounds");
  if (feature_names.size() + 1 != n_columns)
    throw std::invalid_argument("schema: expected " + std::to_string(feature_names.size() + 1) +
                                " columns, file has " + std::to_string(n_columns));
  std::vector<std::string> sorted = feature_names;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("schema: duplicate feature name");
  for (std::size_t i = 0; i < feature_kinds.size(); ++i)
    if (feature_kinds[i] == FeatureKind::ordinal && levels[i].empty())
      throw std::invalid_argument("schema: ordinal feature '" + feature_names[i] + "' has no levels");
}

Schema Schema::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema " + path.string());
  Schema s;
  bool has_target = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("schema: expected key = value", lineno);
    auto key = trim(t.substr(0, eq));
    auto val = trim(t.substr(eq + 1));
    if (key == "header") {
      s.has_header = (val == "true" || val == "1" || val == "yes");
    } else if (key == "target_column") {
      auto v = parse_number(val);
      if (!v || *v < 0) throw ParseError("schema: bad target_column", lineno);
      s.target_column = static_cast<std::size_t>(*v);
      has_target = true;
    } else if (key == "names") {
      s.feature_names = split_fields(val);
    } else if (key.starts_with("kind.")) {
      s.declared_kinds[key.substr(5)] = parse_kind(val);
    } else if (key.starts_with("levels.")) {
      s.declared_levels[key.substr(7)] = split_fields(val);
    } else {
      throw ParseError("schema: unknown key '" + key + "'", lineno);
    }
  }
  if (!has_target) throw ParseError("schema: target_column missing", 0);
  return s;
}

Dataset::Dataset(Matrix values, std::vector<int> targets, int n_classes,
                 std::vector<std::string> feature_names, std::vector<std::string> class_names)
    : values_(std::move(values)),
      targets_(std::move(targets)),
      n_classes_(n_classes),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)) {
  if (static_cast<std::size_t>(values_.rows()) != targets_.size())
    throw std::invalid_argument("dataset: row count mismatch between values and targets");
  if (n_classes_ < 2) throw std::invalid_argument("dataset: at least two classes required");
  for (int t : targets_)
    if (t < 0 || t >= n_classes_) throw std::invalid_argument("dataset: target out of range");
  if (!values_.allFinite()) throw std::invalid_argument("dataset: non-finite value");
  if (feature_names_.empty())
    for (std::size_t f = 0; f < n_features(); ++f) feature_names_.push_back("x" + std::to_string(f));
  if (class_names_.empty())
    for (int t = 0; t < n_classes_; ++t) class_names_.push_back(std::to_string(t));
  if (encodings_.empty())
    for (std::size_t f = 0; f < n_features(); ++f)
      encodings_.push_back({feature_names_[f], FeatureKind::numeric, {}, f, 1});
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Matrix v(static_cast<Eigen::Index>(rows.size()), values_.cols());
  std::vector<int> t(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= n_rows()) throw std::out_of_range("dataset: row index out of range");
    v.row(static_cast<Eigen::Index>(i)) = values_.row(static_cast<Eigen::Index>(rows[i]));
    t[i] = targets_[rows[i]];
  }
  Dataset out(std::move(v), std::move(t), n_classes_, feature_names_, class_names_);
  out.encodings_ = encodings_;
  return out;
}

std::vector<double> Dataset::encode_record(std::span<const std::string> raw) const {
  if (raw.size() != encodings_.size())
    throw std::invalid_argument("encode_record: expected " + std::to_string(encodings_.size()) + " fields");
  std::vector<double> out(n_features(), 0.0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& e = encodings_[i];
    if (e.kind == FeatureKind::numeric) {
      auto v = parse_number(raw[i]);
      if (!v) throw std::invalid_argument("encode_record: '" + raw[i] + "' is not a number");
      out[e.first] = *v;
      continue;
    }
    auto it = std::find(e.levels.begin(), e.levels.end(), raw[i]);
    if (it == e.levels.end())
      throw std::invalid_argument("encode_record: unknown category '" + raw[i] + "' for feature '" + e.name + "'");
    auto level = static_cast<std::size_t>(it - e.levels.begin());
    if (e.kind == FeatureKind::ordinal)
      out[e.first] = static_cast<double>(level);
    else
      out[e.first + level] = 1.0;
  }
  return out;
}

std::string Dataset::decode_category(std::size_t row, std::size_t raw_feature) const {
  const auto& e = encodings_.at(raw_feature);
  if (e.kind == FeatureKind::numeric) {
    std::ostringstream os;
    os.precision(17);
    os << value(row, e.first);
    return os.str();
  }
  if (e.kind == FeatureKind::ordinal) return e.levels.at(static_cast<std::size_t>(value(row, e.first)));
  for (std::size_t k = 0; k < e.width; ++k)
    if (value(row, e.first + k) == 1.0) return e.levels[k];
  throw std::logic_error("decode_category: empty one-hot block");
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<Schema>& schema_in, bool header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> line_of;
  std::vector<std::string> header_fields;
  const bool has_header = header || (schema_in && schema_in->has_header);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (has_header && header_fields.empty()) {
      header_fields = std::move(fields);
      continue;
    }
    if (!records.empty() && fields.size() != records.front().size())
      throw ParseError("malformed row: expected " + std::to_string(records.front().size()) + " fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    if (!header_fields.empty() && fields.size() != header_fields.size())
      throw ParseError("malformed row: field count differs from header", lineno);
    for (const auto& f : fields)
      if (is_missing(f)) throw ParseError("missing value", lineno);
    records.push_back(std::move(fields));
    line_of.push_back(lineno);
  }
  if (records.empty()) throw ParseError("empty file " + path.string(), 0);
  const std::size_t n_cols = records.front().size();
  if (n_cols < 2) throw ParseError("need at least one feature and a target column", line_of.front());

  Schema schema;
  if (schema_in) {
    schema = *schema_in;
  } else {
    schema.target_column = n_cols - 1;
  }
  // resolve feature names, then kinds (declared by name or inferred)
  if (schema.feature_names.empty()) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c == schema.target_column) continue;
      schema.feature_names.push_back(header_fields.empty() ? "x" + std::to_string(schema.feature_names.size())
                                                           : header_fields[c]);
    }
  }
  auto column_of = [&](std::size_t k) { return k < schema.target_column ? k : k + 1; };
  if (schema.feature_kinds.size() != schema.feature_names.size()) {
    for (const auto& [name, kind] : schema.declared_kinds)
      if (std::find(schema.feature_names.begin(), schema.feature_names.end(), name) == schema.feature_names.end())
        throw std::invalid_argument("schema: no column named '" + name + "'");
    schema.feature_kinds.clear();
    schema.levels.clear();
    for (std::size_t k = 0; k < schema.feature_names.size(); ++k) {
      const auto& name = schema.feature_names[k];
      auto lv = schema.declared_levels.find(name);
      schema.levels.push_back(lv == schema.declared_levels.end() ? std::vector<std::string>{} : lv->second);
      if (auto dk = schema.declared_kinds.find(name); dk != schema.declared_kinds.end()) {
        schema.feature_kinds.push_back(dk->second);
        continue;
      }
      const std::size_t col = column_of(k);
      if (col >= n_cols) break;  // reported by validate()
      bool numeric = std::all_of(records.begin(), records.end(),
                                 [&](const auto& r) { return parse_number(r[col]).has_value(); });
      schema.feature_kinds.push_back(numeric ? FeatureKind::numeric : FeatureKind::categorical);
    }
  }
  schema.validate(n_cols);

  // collect categorical levels in first-appearance order
  const std::size_t n_raw = schema.feature_names.size();
  for (std::size_t k = 0; k < n_raw; ++k) {
    if (schema.feature_kinds[k] != FeatureKind::categorical || !schema.levels[k].empty()) continue;
    for (const auto& r : records) {
      const auto& v = r[column_of(k)];
      if (std::find(schema.levels[k].begin(), schema.levels[k].end(), v) == schema.levels[k].end())
        schema.levels[k].push_back(v);
    }
  }

  std::vector<FeatureEncoding> enc;
  std::vector<std::string> names;
  std::size_t width = 0;
  for (std::size_t k = 0; k < n_raw; ++k) {
    FeatureEncoding e{schema.feature_names[k], schema.feature_kinds[k], schema.levels[k], width, 1};
    if (e.kind == FeatureKind::categorical) {
      e.width = e.levels.size();
      for (const auto& l : e.levels) names.push_back(e.name + "=" + l);
    } else {
      names.push_back(e.name);
    }
    width += e.width;
    enc.push_back(std::move(e));
  }

  Matrix values = Matrix::Zero(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(width));
  std::vector<int> targets;
  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> class_id;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    for (std::size_t k = 0; k < n_raw; ++k) {
      const auto& e = enc[k];
      const auto& raw = rec[column_of(k)];
      const auto ri = static_cast<Eigen::Index>(r);
      if (e.kind == FeatureKind::numeric) {
        auto v = parse_number(raw);
        if (!v) throw ParseError("feature '" + e.name + "': '" + raw + "' is not a number", line_of[r]);
        values(ri, static_cast<Eigen::Index>(e.first)) = *v;
        continue;
      }
      auto it = std::find(e.levels.begin(), e.levels.end(), raw);
      if (it == e.levels.end())
        throw ParseError("feature '" + e.name + "': undeclared level '" + raw + "'", line_of[r]);
      auto level = it - e.levels.begin();
      if (e.kind == FeatureKind::ordinal)
        values(ri, static_cast<Eigen::Index>(e.first)) = static_cast<double>(level);
      else
        values(ri, static_cast<Eigen::Index>(e.first + static_cast<std::size_t>(level))) = 1.0;
    }
    const auto& t = rec[schema.target_column];
    auto [it, inserted] = class_id.try_emplace(t, static_cast<int>(class_names.size()));
    if (inserted) class_names.push_back(t);
    targets.push_back(it->second);
  }
  if (class_names.size() < 2) {
    // a single observed class still yields a valid two-class problem
    class_names.push_back("<none>");
  }
  const auto n_classes = static_cast<int>(class_names.size());
  Dataset d(std::move(values), std::move(targets), n_classes, std::move(names), std::move(class_names));
  d.set_encodings(std::move(enc));
  return d;
}

SplitPartition split_train_test(const Dataset& d, std::uint64_t seed) {
  const std::size_t n = d.n_rows();
  if (n < 4) throw std::invalid_argument("split_train_test: need at least 4 rows");
  RowIndices perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t n_train = n / 2;
  const std::size_t n_test = n / 4;
  SplitPartition p;
  p.seed = seed;
  p.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  p.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
  p.unused.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_test), perm.end());
  return p;
}

std::vector<std::size_t> class_histogram(const Dataset& d, std::span<const std::size_t> rows) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(d.n_classes()), 0);
  for (auto r : rows) ++counts[static_cast<std::size_t>(d.target(r))];
  return counts;
}

std::vector<std::size_t> class_histogram(const Dataset& d) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(d.n_classes()), 0);
  for (int t : d.targets()) ++counts[static_cast<std::size_t>(t)];
  return counts;
}

int majority_class(std::span<const std::size_t> counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace cgtree
