#include "cgtree/benchmark.hpp"
#include "cgtree/dataset.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

using namespace cgtree;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / ("cgtree_test_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("bundled datasets load with the expected shapes") {
    const auto iris = load_dataset(CGTREE_DATA_DIR "/iris.csv");
    CHECK(iris.n_rows() == 150);
    CHECK(iris.n_features() == 4);
    CHECK(iris.n_classes() == 3);
    CHECK(class_histogram(iris) == std::vector<std::size_t>{50, 50, 50});

    const auto balance = load_dataset(CGTREE_DATA_DIR "/balance-scale.csv");
    CHECK(balance.n_rows() == 625);
    CHECK(balance.n_features() == 4);
    CHECK(balance.n_classes() == 3);

    const auto ttt = load_dataset(CGTREE_DATA_DIR "/tic-tac-toe.csv");
    CHECK(ttt.n_rows() == 958);
    CHECK(ttt.n_features() == 27);  // 9 squares one-hot over {b, o, x}
    CHECK(ttt.n_classes() == 2);
  }

  TEST_CASE("seeded split sizes, disjointness and determinism") {
    const auto d = load_dataset(CGTREE_DATA_DIR "/iris.csv");
    const auto a = split_train_test(d, 3);
    CHECK(a.train.size() == 75);
    CHECK(a.test.size() == 37);
    CHECK(a.unused.size() == 38);
    std::set<std::size_t> all(a.train.begin(), a.train.end());
    all.insert(a.test.begin(), a.test.end());
    all.insert(a.unused.begin(), a.unused.end());
    CHECK(all.size() == 150);
    const auto b = split_train_test(d, 3);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK(split_train_test(d, 4).train != a.train);
  }

  TEST_CASE("categorical columns are one-hot encoded and decodable") {
    const auto p = write_temp("cat.csv", "red,1.5,yes\nblue,2.5,no\nred,0.5,no\ngreen,3,yes\n");
    const auto d = load_csv(p);
    CHECK(d.n_rows() == 4);
    REQUIRE(d.encodings().size() == 2);
    CHECK(d.encodings()[0].kind == FeatureKind::categorical);
    CHECK(d.encodings()[0].width == 3);
    CHECK(d.n_features() == 4);
    CHECK(d.decode_category(1, 0) == "blue");
    CHECK(d.decode_category(3, 0) == "green");
    CHECK(d.value(2, 3) == doctest::Approx(0.5));
    const std::vector<std::string> rec{"green", "7"};
    const auto enc = d.encode_record(rec);
    CHECK(enc.size() == 4);
    const std::vector<std::string> bad{"purple", "7"};
    CHECK_THROWS(d.encode_record(bad));
  }

  TEST_CASE("malformed input reports the offending line") {
    const auto p = write_temp("ragged.csv", "1,2,a\n3,4,b\n5,b\n");
    try {
      load_csv(p);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    const auto missing = write_temp("missing.csv", "1,2,a\n3,?,b\n");
    CHECK_THROWS_AS(load_csv(missing), ParseError);
  }

  TEST_CASE("schema sidecar picks the target column and ordinal levels") {
    const auto csv = write_temp("ord.csv", "a,low,x\nb,high,y\na,mid,x\n");
    const auto schema = write_temp("ord.schema",
                                   "header = false\ntarget_column = 0\nnames = size,label\n"
                                   "kind.size = ordinal\nlevels.size = low,mid,high\n");
    const auto d = load_csv(csv, Schema::read(schema));
    CHECK(d.n_classes() == 2);
    CHECK(d.value(0, 0) < d.value(2, 0));
    CHECK(d.value(2, 0) < d.value(1, 0));
    const auto bad = write_temp("bad.schema", "target_column = 0\nfoo = 1\n");
    CHECK_THROWS_AS(Schema::read(bad), ParseError);
  }

  TEST_CASE("majority ties go to the lowest class") {
    const std::vector<std::size_t> c{3, 5, 5};
    CHECK(majority_class(c) == 1);
  }
}
