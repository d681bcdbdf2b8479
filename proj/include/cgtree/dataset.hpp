#ifndef CGTREE_DATASET_HPP
#define CGTREE_DATASET_HPP

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgtree {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowIndices = std::vector<std::size_t>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(line ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class FeatureKind { numeric, ordinal, categorical };

/// Describes the raw columns of a CSV file (target column excluded from
/// `feature_names`). Ordinal features carry their levels in declared order;
/// categorical levels are collected from the data when left empty.
struct Schema {
  std::vector<std::string> feature_names;
  std::vector<FeatureKind> feature_kinds;
  std::vector<std::vector<std::string>> levels;
  std::size_t target_column = 0;
  bool has_header = false;
  // Kinds/levels declared by name in a sidecar, resolved against the column
  // names once those are known. Undeclared columns are inferred.
  std::map<std::string, FeatureKind> declared_kinds;
  std::map<std::string, std::vector<std::string>> declared_levels;

  void validate(std::size_t n_columns) const;

  /// Parses the sidecar `key = value` format:
  ///   header = true|false
  ///   target_column = <index>
  ///   names = a,b,c           (names of the feature columns, in file order)
  ///   kind.<name> = numeric|ordinal|categorical
  ///   levels.<name> = low,medium,high
  static Schema read(const std::filesystem::path& path);
};

/// How one raw feature column maps to encoded numeric features.
struct FeatureEncoding {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> levels;  // ordinal / categorical only
  std::size_t first = 0;            // first encoded feature index
  std::size_t width = 1;            // 1, or the number of one-hot columns
};

/// Numeric classification data: values(r, f) holds v_f^r, targets[r] = t_r.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix values, std::vector<int> targets, int n_classes,
          std::vector<std::string> feature_names = {}, std::vector<std::string> class_names = {});

  std::size_t n_rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t n_features() const { return static_cast<std::size_t>(values_.cols()); }
  int n_classes() const { return n_classes_; }

  double value(std::size_t row, std::size_t feature) const {
    return values_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(feature));
  }
  int target(std::size_t row) const { return targets_[row]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * n_features(), n_features()};
  }

  const Matrix& values() const { return values_; }
  const std::vector<int>& targets() const { return targets_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<FeatureEncoding>& encodings() const { return encodings_; }

  /// Rows in the given order, re-indexed 0..rows.size()-1. Class ids and
  /// the class count are preserved.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Encodes one raw record (target column excluded) with this dataset's
  /// encodings. Throws on an unknown category.
  std::vector<double> encode_record(std::span<const std::string> raw) const;

  /// Category of raw feature `raw_feature` for `row`, recovered from its
  /// one-hot (or ordinal) block.
  std::string decode_category(std::size_t row, std::size_t raw_feature) const;

  void set_encodings(std::vector<FeatureEncoding> e) { encodings_ = std::move(e); }

 private:
  Matrix values_;
  std::vector<int> targets_;
  int n_classes_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<std::string> class_names_;
  std::vector<FeatureEncoding> encodings_;
};

/// Reads a comma-delimited file. Without a schema every column but the last
/// is a feature, the last is the target, and kinds are inferred (all values
/// parse as numbers -> numeric, else categorical).
Dataset load_csv(const std::filesystem::path& path, const std::optional<Schema>& schema = std::nullopt,
                 bool header = false);

struct SplitPartition {
  RowIndices train;
  RowIndices test;
  RowIndices unused;
  std::uint64_t seed = 0;
};

/// Seeded random permutation: floor(|R|/2) training rows, floor(|R|/4)
/// test rows, the rest unused.
SplitPartition split_train_test(const Dataset& d, std::uint64_t seed);

std::vector<std::size_t> class_histogram(const Dataset& d, std::span<const std::size_t> rows);
std::vector<std::size_t> class_histogram(const Dataset& d);

/// Lowest class id among those with the maximal count.
int majority_class(std::span<const std::size_t> counts);

}  // namespace cgtree

#endif  // CGTREE_DATASET_HPP
